"""This module contains the linear control system aggregate: the
control distribution, its generated subalgebra, the LARC and ad-rank
conditions and the normalization to the canonical control shapes."""

from dataclasses import dataclass
import logging
from typing import Iterable, Optional
import numpy as np
from components.algebra import AlgebraElement, bracket_vectors
from components.derivation import Derivation, derivation_matrix
from components.group_class import GroupClass, theta_of
from components.kernels import lambda_matrix
from helpers.functions import assert_type, span_basis, numerical_rank
from helpers.types import ClassMismatch
from simulation.constants import BRACKET_TOLERANCE, CLOSURE_MAX_ROUNDS, RANK_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearSystem():
    """
    ġ = X(g) + Σ uᵢ Yᵢ(g) with X the linear field of `derivation`
    and Yᵢ the left-invariant fields of `controls`.
    """
    group: GroupClass
    derivation: Derivation
    controls: tuple[AlgebraElement, ...]

    def __post_init__(self):
        assert_type(self.group,
                    expected_type=GroupClass)
        assert_type(self.derivation,
                    expected_type=Derivation)
        object.__setattr__(self, "controls", tuple(self.controls))
        assert len(self.controls) > 0, "A linear system needs at least one control"
        assert_type(*self.controls,
                    expected_type=AlgebraElement)
        if self.derivation.group != self.group:
            raise ClassMismatch(f"Derivation of {self.derivation.group.name} "
                                f"used on {self.group.name}")

    @property
    def control_count(self) -> int:
        return len(self.controls)

    @property
    def control_matrix(self) -> np.ndarray:
        """Controls as rows (a, w1, w2)."""
        return np.array([control.vector for control in self.controls])

    @staticmethod
    def from_arrays(group: GroupClass,
                    derivation: Derivation,
                    controls: Iterable[Iterable[float]]) -> "LinearSystem":
        return LinearSystem(group, derivation,
                            tuple(AlgebraElement.from_vector(row) for row in controls))


def _closure(theta: np.ndarray,
             vectors: np.ndarray,
             derivation: Optional[np.ndarray]=None) -> np.ndarray:
    """
    Closes the span of `vectors` under brackets (and under
    `derivation` when given). Returns orthonormal rows.
    """
    basis = span_basis(vectors, RANK_TOLERANCE)
    for _ in range(CLOSURE_MAX_ROUNDS):
        candidates = list(basis)
        for i, x in enumerate(basis):
            for y in basis[i + 1:]:
                candidates.append(bracket_vectors(theta, x, y))
            if derivation is not None:
                candidates.append(derivation @ x)
        grown = span_basis(np.array(candidates), RANK_TOLERANCE)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return basis


def generated_subalgebra(group: GroupClass,
                         vectors: Iterable[AlgebraElement]) -> tuple[list[AlgebraElement], int]:
    """
    Basis and dimension of the Lie subalgebra generated by `vectors`.
    """
    rows = np.array([vector.vector for vector in vectors])
    basis = _closure(theta_of(group), rows)
    return [AlgebraElement.from_vector(row) for row in basis], basis.shape[0]


def larc(system: LinearSystem) -> bool:
    """
    Whether the smallest D-invariant subalgebra containing the controls is g.
    """
    basis = _closure(theta_of(system.group), system.control_matrix,
                     derivation_matrix(system.derivation))
    logger.debug("LARC closure of %s reached dimension %d", system.group.name, basis.shape[0])
    return basis.shape[0] == 3


def ad_rank(system: LinearSystem) -> bool:
    """
    Whether span{D^k Y : k ≥ 0} over the controls is g. No brackets.
    """
    matrix = derivation_matrix(system.derivation)
    rows = []
    for control in system.controls:
        vector = control.vector
        for _ in range(3):
            rows.append(vector)
            vector = matrix @ vector
    return numerical_rank(np.array(rows), RANK_TOLERANCE) == 3


@dataclass(frozen=True)
class DistributionInfo():
    """
    Summary of the control distribution Δ of a system.
    """
    delta_basis: tuple[AlgebraElement, ...]
    delta_dim: int
    delta_is_aff: bool
    larc: bool
    ad_rank: bool


def distribution_info(system: LinearSystem) -> DistributionInfo:
    basis, dim = generated_subalgebra(system.group, system.controls)
    is_aff = False
    if dim == 2:
        commutator = bracket_vectors(theta_of(system.group), basis[0].vector, basis[1].vector)
        is_aff = bool(np.linalg.norm(commutator) > BRACKET_TOLERANCE)
    return DistributionInfo(delta_basis=tuple(basis),
                            delta_dim=dim,
                            delta_is_aff=is_aff,
                            larc=larc(system),
                            ad_rank=ad_rank(system))


@dataclass(frozen=True, eq=False)
class NormalizedSystem():
    """
    A system conjugated by ψ(t, v) = (t, v − Λ_t v₀) so that its controls
    read {(1,0)} or {(1,0),(0,w)}. `shift` holds v₀.
    """
    system: LinearSystem
    shift: np.ndarray
    larc: bool

    @property
    def is_identity(self) -> bool:
        return not np.any(self.shift)

    def apply(self, tau: float|np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        ψ in coordinates; `v` has shape (..., 2) matching `tau`.
        """
        tau = np.asarray(tau, dtype=float)
        return np.asarray(v, dtype=float) - lambda_matrix(self.system.group, tau) @ self.shift


def _pivot_controls(controls: np.ndarray) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Reduces the control rows to (1, v₀) and an optional nilradical
    vector w, pivoting on the largest ℝ-component.
    """
    pivot = int(np.argmax(np.abs(controls[:, 0])))
    first = controls[pivot] / controls[pivot, 0]
    scale = max(1.0, float(np.max(np.abs(controls))))
    nilradical = None
    for j, row in enumerate(controls):
        if j == pivot:
            continue
        residual = row - row[0] * first
        if np.linalg.norm(residual) > RANK_TOLERANCE * scale and (
                nilradical is None or np.linalg.norm(residual) > np.linalg.norm(nilradical)):
            nilradical = residual
    return first, nilradical


def normalize(system: LinearSystem) -> NormalizedSystem:
    """
    Conjugates the system so that Δ becomes {(1,0)} or {(1,0),(0,w)}.
    The new derivation is (D*, ξ + D*v₀). Systems failing LARC, or with
    dim Δ = 3, are returned unchanged.
    """
    holds = larc(system)
    _, dim = generated_subalgebra(system.group, system.controls)
    if not holds or dim == 3:
        if not holds:
            logger.info("System fails LARC; normalization skipped")
        return NormalizedSystem(system, np.zeros(2), holds)
    first, nilradical = _pivot_controls(system.control_matrix)
    shift = first[1:].copy()
    derivation = system.derivation
    conjugated = derivation.with_xi(derivation.xi + derivation.dstar @ shift)
    controls = [AlgebraElement(1.0, (0.0, 0.0))]
    if nilradical is not None:
        controls.append(AlgebraElement(0.0, (nilradical[1], nilradical[2])))
    logger.debug("Normalization shift v0 = %s", shift.tolist())
    return NormalizedSystem(LinearSystem(system.group, conjugated, tuple(controls)),
                            shift, holds)
