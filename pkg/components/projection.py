"""This module contains the projections of a linear system to the
two-dimensional homogeneous spaces used to read off barriers:

- `PlaneF`, the quotient by F = {(t, ρ_t-orbit)} when D* is invertible,
  with p = ρ_{−t}D*v − Λ_{−t}ξ.
- `PlaneH`, the quotient by H = exp ℝ(0, w₀) with w₀ ∈ ker D*, in the
  chart (t, z = ⟨v, v₀⟩) with v₀ ⊥ w₀.
- `CylinderH`, the torus quotient of R2 with D* = 0, in the chart
  (t, angle)."""

from collections.abc import Callable
from dataclasses import dataclass
import logging
from math import pi
from typing import Optional
import numpy as np
from components.algebra import GroupElement
from components.derivation import dstar_kernel
from components.group_class import theta_of
from components.kernels import lambda_matrix, rho_matrix
from components.linear_system import LinearSystem, NormalizedSystem, normalize
from helpers.functions import as_vector, assert_callable, assert_type, perpendicular, \
    wrap_periodic_array
from helpers.types import ChartSpace, DimensionMismatch, GroupKind, WrongRegime
from simulation.constants import ZERO_TOLERANCE

logger = logging.getLogger(__name__)

ChartMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProjectedSystem():
    """
    A linear system pushed to a two-dimensional chart. `drift` and
    every entry of `control_maps` map a chart point to a tangent vector.
    """
    space: ChartSpace
    system: LinearSystem
    shift: np.ndarray
    drift: ChartMap
    control_maps: tuple[ChartMap, ...]
    chart_note: str
    w0: Optional[np.ndarray]=None
    v0: Optional[np.ndarray]=None

    def __post_init__(self):
        assert_type(self.space,
                    expected_type=ChartSpace)
        assert_callable(self.drift, *self.control_maps)
        assert len(self.control_maps) == self.system.control_count

    def field(self, p: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Projected vector field at chart point `p` under controls `u`.
        """
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.shape != (len(self.control_maps),):
            raise DimensionMismatch(
                f"Expected {len(self.control_maps)} control values, got {u.shape[0]}")
        value = self.drift(p)
        for u_i, control_map in zip(u, self.control_maps):
            value = value + u_i * control_map(p)
        return value

    def project(self, tau: float|np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        Chart coordinates of points (τ, v) of the original system, after
        the normalization ψ. Shapes: τ (...), v (..., 2) -> (..., 2).
        """
        tau = np.asarray(tau, dtype=float)
        v = np.asarray(v, dtype=float) - lambda_matrix(self.system.group, tau) @ self.shift
        group = self.system.group
        if self.space is ChartSpace.PLANE_F:
            dstar = self.system.derivation.dstar
            xi = self.system.derivation.xi
            rotated = np.einsum("...ij,...j->...i", rho_matrix(group, -tau), v @ dstar.T)
            return rotated - lambda_matrix(group, -tau) @ xi
        z = v @ self.v0
        if self.space is ChartSpace.CYLINDER_H:
            z = wrap_periodic_array(z / self.w0[1], pi)  # type: ignore[index]
        return np.stack(np.broadcast_arrays(tau, z), axis=-1)

    def lift(self, p: np.ndarray) -> GroupElement:
        """
        A group point projecting to the chart point `p`.
        """
        p = as_vector(p)
        group = self.system.group
        if self.space is ChartSpace.PLANE_F:
            return GroupElement(0.0, tuple(np.linalg.solve(self.system.derivation.dstar, p)),
                                group)
        z = p[1] * self.w0[1] if self.space is ChartSpace.CYLINDER_H else p[1]  # type: ignore[index]
        v = z * self.v0 / (self.v0 @ self.v0) + lambda_matrix(group, p[0]) @ self.shift  # type: ignore[operator]
        return GroupElement(p[0], tuple(v), group)


def _plane_f(system: LinearSystem) -> tuple[ChartMap, list[ChartMap]]:
    theta = theta_of(system.group)
    dstar = system.derivation.dstar
    xi = system.derivation.xi
    drift = lambda p: dstar @ p
    controls = [
        (lambda a, dw: lambda p: -a * (theta @ p - xi) + dw)(control.a, dstar @ control.vec_w)
        for control in system.controls]
    return drift, controls


def _plane_h(system: LinearSystem, v0: np.ndarray,
             scale: float=1.0) -> tuple[ChartMap, list[ChartMap]]:
    group = system.group
    xi = system.derivation.xi
    mu = float(np.trace(system.derivation.dstar))
    def drift(p: np.ndarray) -> np.ndarray:
        return np.array([0.0, (mu * p[1] + (lambda_matrix(group, p[0]) @ xi) @ v0) / scale])
    controls = [
        (lambda a, w: lambda p: np.array([a, (rho_matrix(group, p[0]) @ w) @ v0 / scale]))(
            control.a, control.vec_w)
        for control in system.controls]
    return drift, controls


def projected_system(system: LinearSystem|NormalizedSystem,
                     w0: Optional[np.ndarray]=None,
                     space: Optional[ChartSpace]=None) -> ProjectedSystem:
    """
    Projects the normalized form of `system` to a homogeneous space.
    Without `space`, PlaneF is used when D* is invertible, CylinderH on
    R2 with D* = 0 and a slanted w₀, and PlaneH otherwise. Without
    `w0`, the first vector of ker D* is used.
    """
    normalized = system if isinstance(system, NormalizedSystem) else normalize(system)
    reduced = normalized.system
    dstar = reduced.derivation.dstar
    kernel = dstar_kernel(dstar)
    if space is None:
        if not kernel:
            space = ChartSpace.PLANE_F
        elif (reduced.group.kind is GroupKind.R2 and len(kernel) == 2 and w0 is not None
              and abs(w0[0]) > ZERO_TOLERANCE and abs(w0[1]) > ZERO_TOLERANCE):
            space = ChartSpace.CYLINDER_H
        else:
            space = ChartSpace.PLANE_H
    if space is ChartSpace.PLANE_F:
        if kernel:
            raise WrongRegime("PlaneF requires an invertible D*")
        drift, controls = _plane_f(reduced)
        note = "p = ρ_{-t} D* v − Λ_{-t} ξ"
        return ProjectedSystem(space, reduced, normalized.shift, drift, tuple(controls), note)
    if not kernel:
        raise WrongRegime(f"{space.value} requires a singular D*")
    w0 = kernel[0] if w0 is None else as_vector(w0)
    if np.linalg.norm(dstar @ w0) > ZERO_TOLERANCE * max(1.0, float(np.linalg.norm(w0))):
        raise WrongRegime(f"w0 = {w0.tolist()} is not in ker D*")
    v0 = perpendicular(w0)
    if space is ChartSpace.CYLINDER_H:
        if reduced.group.kind is not GroupKind.R2 or len(kernel) != 2:
            raise WrongRegime("CylinderH requires the R2 torus quotient with D* = 0")
        if abs(w0[0]) <= ZERO_TOLERANCE or abs(w0[1]) <= ZERO_TOLERANCE:
            raise WrongRegime("CylinderH requires w0 with both components nonzero")
        drift, controls = _plane_h(reduced, v0, scale=float(w0[1]))
        note = "(t, β⁻¹⟨v, v0⟩ mod 2π)"
    else:
        drift, controls = _plane_h(reduced, v0)
        note = "(t, ⟨v, v0⟩)"
    logger.debug("Projected %s to %s with w0 = %s", reduced.group.name, space.value, w0.tolist())
    return ProjectedSystem(space, reduced, normalized.shift, drift, tuple(controls), note,
                           w0=w0, v0=v0)
