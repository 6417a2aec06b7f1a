"""This module contains the derivations D of the algebra, encoded by
the pair (D*, ξ) with D(a, w) = (0, aξ + D*w), together with their
spectra, the g⁺ ⊕ g⁰ ⊕ g⁻ decomposition and the structural
predicates used by the controllability theorems."""

from dataclasses import dataclass, field
import logging
from math import cos, cosh, sin, sinh, sqrt, exp
from typing import Iterable
import numpy as np
from components.algebra import AlgebraElement, bracket
from components.group_class import GroupClass, theta_of
from helpers.functions import as_matrix, as_vector, assert_type, assert_type_and_range
from helpers.types import CommutationViolation, GroupKind, ZeroDerivation
from simulation.constants import BRACKET_TOLERANCE, COMMUTATION_TOLERANCE, \
    RANK_TOLERANCE, REAL_PART_TOLERANCE, ZERO_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Derivation():
    """
    A derivation of ℝ ×_θ ℝ². Use `make_derivation` to build
    one; the constructor only checks shapes.
    """
    group: GroupClass
    dstar: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        assert_type(self.group,
                    expected_type=GroupClass)
        dstar = as_matrix(self.dstar).copy()
        xi = as_vector(self.xi).copy()
        dstar.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "dstar", dstar)
        object.__setattr__(self, "xi", xi)

    @property
    def matrix(self) -> np.ndarray:
        return derivation_matrix(self)

    def with_xi(self, xi: Iterable[float]) -> "Derivation":
        return Derivation(self.group, self.dstar, as_vector(xi))

    def to_dict(self) -> dict[str, list]:
        return {"dstar": self.dstar.tolist(),
                "xi": self.xi.tolist()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return (self.group == other.group
                and np.array_equal(self.dstar, other.dstar)
                and np.array_equal(self.xi, other.xi))

    __hash__ = None  # type: ignore[assignment]


def make_derivation(group: GroupClass,
                    dstar: Iterable[Iterable[float]],
                    xi: Iterable[float]) -> Derivation:
    """
    Validates D*θ = θD* and D ≠ 0, then builds the derivation.
    """
    dstar = as_matrix(dstar)
    xi = as_vector(xi)
    theta = theta_of(group)
    scale = max(1.0, float(np.max(np.abs(dstar))))
    defect = float(np.max(np.abs(dstar @ theta - theta @ dstar)))
    if defect > COMMUTATION_TOLERANCE * scale:
        raise CommutationViolation(
            f"D* = {dstar.tolist()} does not commute with θ of {group.name} (defect {defect:.3g})")
    if not np.any(dstar) and not np.any(xi):
        raise ZeroDerivation("D* and ξ are both zero")
    if group.kind is GroupKind.R3_PRIME_LAMBDA or group.in_e_family:
        assert abs(dstar[0, 0] - dstar[1, 1]) <= COMMUTATION_TOLERANCE * scale
        assert abs(dstar[0, 1] + dstar[1, 0]) <= COMMUTATION_TOLERANCE * scale
    derivation = Derivation(group, dstar, xi)
    if not descends_to_quotient(derivation):
        logger.warning("D*e1 = %s is nonzero: the linear field on R2 does not preserve "
                       "the torus lattice; verdicts follow the covering algebra",
                       dstar[:, 0].tolist())
    return derivation


def descends_to_quotient(derivation: Derivation) -> bool:
    """
    On R2 the flow must fix the lattice {(0, (2kπ, 0))}, i.e. D*e₁ = 0.
    """
    if derivation.group.kind is not GroupKind.R2:
        return True
    return bool(np.max(np.abs(derivation.dstar[:, 0])) <= ZERO_TOLERANCE)


def apply_derivation(derivation: Derivation, x: AlgebraElement) -> AlgebraElement:
    """
    D(a, w) = (0, aξ + D*w).
    """
    w = x.a * derivation.xi + derivation.dstar @ x.vec_w
    return AlgebraElement(0.0, tuple(w))


def derivation_matrix(derivation: Derivation) -> np.ndarray:
    """
    The 3x3 matrix of D in the basis {(1,0), e₁, e₂}.
    """
    matrix = np.zeros((3, 3))
    matrix[1:, 0] = derivation.xi
    matrix[1:, 1:] = derivation.dstar
    return matrix

# CLOSED FORMS

def matrix_exp_2x2(matrix: np.ndarray) -> np.ndarray:
    """
    e^A for a real 2x2 matrix. With A = τI + N, N² = qI, so
    e^A = e^τ (C(q) I + S(q) N) for C = cosh √q and S = sinh √q / √q.
    """
    tau = 0.5 * (matrix[0, 0] + matrix[1, 1])
    nil = matrix - tau * np.eye(2)
    q = 0.25 * (matrix[0, 0] - matrix[1, 1]) ** 2 + matrix[0, 1] * matrix[1, 0]
    root = sqrt(abs(q))
    if root < 1e-8:
        c_part, s_part = 1.0 + 0.5 * q, 1.0 + q / 6.0
    elif q > 0.0:
        c_part, s_part = cosh(root), sinh(root) / root
    else:
        c_part, s_part = cos(root), sin(root) / root
    return exp(tau) * (c_part * np.eye(2) + s_part * nil)


def flow_integral(dstar: np.ndarray, s: float) -> np.ndarray:
    """
    F_s = Σ_{j≥1} s^j (D*)^{j−1}/j!, i.e. (e^{sD*} − I)(D*)⁻¹ when
    D* is invertible and sI when D* = 0.
    """
    norm = float(np.max(np.abs(dstar)))
    if norm <= ZERO_TOLERANCE:
        return s * np.eye(2)
    det = float(np.linalg.det(dstar))
    if abs(det) <= ZERO_TOLERANCE * max(1.0, norm * norm):
        # (D*)² = tr(D*)·D* when det D* = 0
        trace = float(np.trace(dstar))
        x = trace * s
        if abs(x) < 1e-4:
            tail = s * s * (0.5 + x / 6.0 + x * x / 24.0)
        else:
            tail = (np.expm1(x) - x) / (trace * trace)
        return s * np.eye(2) + tail * dstar
    if abs(s) * norm < 1e-2:
        term = s * np.eye(2)
        total = term.copy()
        for j in range(2, 20):
            term = term @ dstar * (s / j)
            total += term
        return total
    return (matrix_exp_2x2(s * dstar) - np.eye(2)) @ np.linalg.inv(dstar)


def derivation_exp(derivation: Derivation, s: float) -> np.ndarray:
    """
    The 3x3 matrix e^{sD}: e^{sD}(a, w) = (a, e^{sD*}w + a F_s ξ).
    """
    assert_type_and_range(s)
    matrix = np.zeros((3, 3))
    matrix[0, 0] = 1.0
    matrix[1:, 0] = flow_integral(derivation.dstar, s) @ derivation.xi
    matrix[1:, 1:] = matrix_exp_2x2(s * derivation.dstar)
    return matrix

# SPECTRUM AND DECOMPOSITION

def dstar_eigenvalues(dstar: np.ndarray) -> tuple[complex, complex]:
    """
    Closed-form eigenvalues of D*, larger real part first.
    """
    tau = 0.5 * (dstar[0, 0] + dstar[1, 1])
    q = 0.25 * (dstar[0, 0] - dstar[1, 1]) ** 2 + dstar[0, 1] * dstar[1, 0]
    if q >= 0.0:
        root = sqrt(q)
        return complex(tau + root, 0.0), complex(tau - root, 0.0)
    root = sqrt(-q)
    return complex(tau, root), complex(tau, -root)


def _real_class(value: complex) -> int:
    if value.real > REAL_PART_TOLERANCE:
        return 1
    if value.real < -REAL_PART_TOLERANCE:
        return -1
    return 0


def _eigenvector(dstar: np.ndarray, eigenvalue: float) -> np.ndarray:
    """
    A unit null vector of D* − μI, taken perpendicular to its largest row.
    """
    shifted = dstar - eigenvalue * np.eye(2)
    rows = sorted(shifted, key=lambda row: -float(np.linalg.norm(row)))
    if np.linalg.norm(rows[0]) == 0.0:
        return np.array([1.0, 0.0])
    vector = np.array([-rows[0][1], rows[0][0]])
    if vector[np.argmax(np.abs(vector))] < 0.0:
        vector = -vector
    return vector / np.linalg.norm(vector)


@dataclass(frozen=True)
class Decomposition():
    """
    Bases of g⁺, g⁰ and g⁻ and the spectrum {0} ∪ eig(D*).
    """
    gplus: tuple[AlgebraElement, ...]
    gzero: tuple[AlgebraElement, ...]
    gminus: tuple[AlgebraElement, ...]
    gzero_abelian: bool
    spectrum: tuple[complex, ...]
    gzero_dim: int=field(init=False)

    def __post_init__(self):
        assert len(self.gplus) + len(self.gzero) + len(self.gminus) == 3
        object.__setattr__(self, "gzero_dim", len(self.gzero))

    @property
    def sorted_spectrum(self) -> list[list[float]]:
        """[re, im] pairs sorted lexicographically."""
        return sorted([value.real, value.imag] for value in self.spectrum)


def decompose(derivation: Derivation) -> Decomposition:
    """
    Splits g into generalized real eigenspaces of D grouped by the sign
    of the real part, using the 2x2 eigenstructure of D* and the explicit
    g⁰ vector (1, v*) with ξ + D*v* ∈ V⁰.
    """
    dstar, xi = derivation.dstar, derivation.xi
    first, second = dstar_eigenvalues(dstar)
    spaces: dict[int, list[np.ndarray]] = {1: [], 0: [], -1: []}
    hyperbolic: list[tuple[np.ndarray, float]] = []
    first_class, second_class = _real_class(first), _real_class(second)
    if first.imag != 0.0 or first_class == second_class:
        spaces[first_class] = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        for value, value_class in ((first, first_class), (second, second_class)):
            vector = _eigenvector(dstar, value.real)
            spaces[value_class].append(vector)
            if value_class != 0:
                hyperbolic.append((vector, value.real))
    if not spaces[0]:
        anchor = -np.linalg.solve(dstar, xi)
    elif len(spaces[0]) == 2:
        anchor = np.zeros(2)
    else:
        hyper_vector, hyper_value = hyperbolic[0]
        basis = np.column_stack([spaces[0][0], hyper_vector])
        coefficients = np.linalg.solve(basis, xi)
        anchor = -(coefficients[1] / hyper_value) * hyper_vector
    gzero = [AlgebraElement(1.0, tuple(anchor))]
    gzero += [AlgebraElement(0.0, tuple(vector)) for vector in spaces[0]]
    abelian = True
    for i, x in enumerate(gzero):
        for y in gzero[i + 1:]:
            scale = max(1.0, float(np.linalg.norm(x.vector) * np.linalg.norm(y.vector)))
            if np.linalg.norm(bracket(derivation.group, x, y).vector) > BRACKET_TOLERANCE * scale:
                abelian = False
    logger.debug("Decomposition of %s: dims (+%d, 0:%d, -%d)", derivation.group.name,
                 len(spaces[1]), len(gzero), len(spaces[-1]))
    return Decomposition(
        gplus=tuple(AlgebraElement(0.0, tuple(vector)) for vector in spaces[1]),
        gzero=tuple(gzero),
        gminus=tuple(AlgebraElement(0.0, tuple(vector)) for vector in spaces[-1]),
        gzero_abelian=abelian,
        spectrum=(complex(0.0, 0.0), first, second))

# PREDICATES

@dataclass(frozen=True)
class StructuralPredicates():
    """
    The structural facts about D consumed by the theorems.
    """
    dstar_invertible: bool
    dstar_zero: bool
    complex_pair: bool
    g_equals_g0: bool
    g0_is_aff: bool
    gzero_dim: int
    ker_dstar_basis: tuple[tuple[float, float], ...]

    def kernel_vectors(self) -> list[np.ndarray]:
        return [np.array(vector) for vector in self.ker_dstar_basis]


def dstar_kernel(dstar: np.ndarray) -> list[np.ndarray]:
    """
    Orthonormal basis of ker D*.
    """
    norm = float(np.max(np.abs(dstar)))
    if norm <= ZERO_TOLERANCE:
        return [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    _, singular, v_t = np.linalg.svd(dstar)
    if singular[1] > RANK_TOLERANCE * singular[0]:
        return []
    return [v_t[1]]


def structural_predicates(derivation: Derivation) -> StructuralPredicates:
    """
    Returns the predicates consistent with `decompose(derivation)`.
    """
    dstar = derivation.dstar
    decomposition = decompose(derivation)
    kernel = dstar_kernel(dstar)
    first, _ = dstar_eigenvalues(dstar)
    return StructuralPredicates(
        dstar_invertible=len(kernel) == 0,
        dstar_zero=len(kernel) == 2,
        complex_pair=abs(first.imag) > REAL_PART_TOLERANCE,
        g_equals_g0=decomposition.gzero_dim == 3,
        g0_is_aff=decomposition.gzero_dim == 2 and not decomposition.gzero_abelian,
        gzero_dim=decomposition.gzero_dim,
        ker_dstar_basis=tuple((float(v[0]), float(v[1])) for v in kernel))


def left_eigenvectors(matrix: np.ndarray) -> list[tuple[np.ndarray, float]]:
    """
    Real left eigenvectors ℓ (ℓᵀA = μℓᵀ) of a 2x2 matrix with their
    eigenvalues. Scalar matrices give the two coordinate axes.
    """
    first, second = dstar_eigenvalues(matrix)
    if first.imag != 0.0:
        return []
    if np.max(np.abs(matrix - first.real * np.eye(2))) <= ZERO_TOLERANCE:
        return [(np.array([0.0, 1.0]), first.real), (np.array([1.0, 0.0]), first.real)]
    found = [(_eigenvector(matrix.T, first.real), first.real)]
    if second.real != first.real:
        found.append((_eigenvector(matrix.T, second.real), second.real))
    return found
