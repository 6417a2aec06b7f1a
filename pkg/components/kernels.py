"""This module contains the closed-form flow kernels
ρ_s = e^{sθ} and Λ_s of every group class.

All functions accept a scalar or an array of parameters `s`
and return arrays of shape `s.shape + (2, 2)`."""

from dataclasses import dataclass, field
import numpy as np
from components.group_class import GroupClass, theta_of
from helpers.functions import assert_type, assert_type_and_range
from helpers.types import GroupKind
from simulation.constants import SMALL_S

_IDENTITY = np.eye(2)


def _compose(m11: np.ndarray, m12: np.ndarray,
             m21: np.ndarray, m22: np.ndarray) -> np.ndarray:
    """
    Stacks broadcastable entries into an array of 2x2 matrices.
    """
    m11, m12, m21, m22 = np.broadcast_arrays(m11, m12, m21, m22)
    return np.stack([np.stack([m11, m12], axis=-1),
                     np.stack([m21, m22], axis=-1)], axis=-2)


def _scaled_rotation(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """
    Returns diag·I + off·J with J the rotation generator.
    """
    return _compose(diag, -off, off, diag)


def rho_matrix(group: GroupClass, s: float|np.ndarray) -> np.ndarray:
    """
    Returns ρ_s = e^{sθ} by the class-specific closed form.
    """
    s = np.asarray(s, dtype=float)
    zeros = np.zeros_like(s)
    ones = np.ones_like(s)
    if group.in_r2_family:
        return _compose(ones, zeros, zeros, np.exp(s))
    if group.kind is GroupKind.R3:
        exp_s = np.exp(s)
        return _compose(exp_s, s * exp_s, zeros, exp_s)
    if group.kind is GroupKind.R3_LAMBDA:
        return _compose(np.exp(s), zeros, zeros, np.exp(group.lambda_ * s))
    if group.kind is GroupKind.R3_PRIME_LAMBDA:
        scale = np.exp(group.lambda_ * s)
        return _scaled_rotation(scale * np.cos(s), scale * np.sin(s))
    return _scaled_rotation(np.cos(s), np.sin(s))


def lambda_matrix(group: GroupClass, s: float|np.ndarray) -> np.ndarray:
    """
    Returns Λ_s = (ρ_s − I)θ⁻¹, or diag(s, e^s − 1) when θ is singular.
    Differences e^x − 1 and cos x − 1 are evaluated without cancellation.
    """
    s = np.asarray(s, dtype=float)
    zeros = np.zeros_like(s)
    if group.in_r2_family:
        return _compose(s, zeros, zeros, np.expm1(s))
    if group.kind is GroupKind.R3:
        em1 = np.expm1(s)
        return _compose(em1, s * np.exp(s) - em1, zeros, em1)
    if group.kind is GroupKind.R3_LAMBDA:
        lam = group.lambda_
        return _compose(np.expm1(s), zeros, zeros, np.expm1(lam * s) / lam)
    if group.kind is GroupKind.R3_PRIME_LAMBDA:
        lam = group.lambda_
        # ρ_s − I = a·I + b·J and θ⁻¹ = (λI − J)/(1 + λ²)
        a = np.expm1(lam * s) * np.cos(s) - 2.0 * np.sin(s / 2.0) ** 2
        b = np.exp(lam * s) * np.sin(s)
        norm = 1.0 + lam * lam
        return _scaled_rotation((a * lam + b) / norm, (b * lam - a) / norm)
    return _scaled_rotation(np.sin(s), 2.0 * np.sin(s / 2.0) ** 2)


def lambda_over_s(group: GroupClass, s: float) -> np.ndarray:
    """
    Returns (1/s)Λ_s, replaced by its expansion I + (s/2)θ near s = 0.
    """
    if abs(s) < SMALL_S:
        return _IDENTITY + 0.5 * s * theta_of(group)
    return lambda_matrix(group, s) / s


@dataclass(frozen=True)
class FlowKernel():
    """
    The pair (ρ_s, Λ_s) of a class at parameter `s`.
    """
    group: GroupClass
    s: float
    rho: np.ndarray=field(init=False, repr=False)
    lam: np.ndarray=field(init=False, repr=False)

    def __post_init__(self):
        assert_type(self.group,
                    expected_type=GroupClass)
        assert_type_and_range(self.s)
        object.__setattr__(self, "rho", rho_matrix(self.group, self.s))
        object.__setattr__(self, "lam", lambda_matrix(self.group, self.s))

    @property
    def theta(self) -> np.ndarray:
        return theta_of(self.group)

    def identity_residual(self) -> float:
        """
        Returns |ρ_s − θΛ_s − I|.
        """
        return float(np.max(np.abs(self.rho - self.theta @ self.lam - _IDENTITY)))


def kernels(group: GroupClass, s: float) -> FlowKernel:
    """
    Returns the flow kernels of `group` at `s`.
    """
    return FlowKernel(group, float(s))
