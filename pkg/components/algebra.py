"""This module contains the algebra and group elements of
ℝ ×_θ ℝ² together with their basic operations."""

from dataclasses import dataclass
from typing import Iterable
import numpy as np
from components.group_class import GroupClass, theta_of
from components.kernels import rho_matrix, lambda_over_s
from helpers.functions import as_vector, assert_type, assert_type_and_range, \
    wrap_periodic
from helpers.types import ClassMismatch, GroupKind, Side


@dataclass(frozen=True)
class AlgebraElement():
    """
    A tangent vector (a, w) with `a` along the ℝ factor
    and `w` in the nilradical ℝ².
    """
    a: float
    w: tuple[float, float]

    def __post_init__(self):
        assert_type_and_range(self.a)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "w", tuple(float(x) for x in as_vector(self.w)))

    @property
    def vec_w(self) -> np.ndarray:
        return np.array(self.w)

    @property
    def vector(self) -> np.ndarray:
        """Coordinates in the basis {(1,0), e₁, e₂}."""
        return np.array([self.a, self.w[0], self.w[1]])

    @property
    def in_nilradical(self) -> bool:
        return self.a == 0.0

    def scaled(self, factor: float) -> "AlgebraElement":
        return AlgebraElement(factor * self.a, tuple(factor * self.vec_w))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement.from_vector(self.vector + other.vector)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement.from_vector(self.vector - other.vector)

    def isclose(self, other: "AlgebraElement", tolerance: float=1e-12) -> bool:
        return bool(np.max(np.abs(self.vector - other.vector)) <= tolerance)

    @staticmethod
    def from_vector(values: Iterable[float]) -> "AlgebraElement":
        vec = as_vector(values, length=3)
        return AlgebraElement(vec[0], (vec[1], vec[2]))

    @staticmethod
    def zero() -> "AlgebraElement":
        return AlgebraElement(0.0, (0.0, 0.0))


def canonical_coordinates(group: GroupClass,
                          t: float,
                          v: Iterable[float]) -> tuple[float, tuple[float, float]]:
    """
    Picks the coset representative on quotient classes:
    t in (−nπ, nπ] for En, v1 in (−π, π] for R2.
    """
    v1, v2 = (float(x) for x in v)
    t = float(t)
    if group.kind is GroupKind.E_N:
        t = wrap_periodic(t, group.half_period)  # type: ignore[arg-type]
    elif group.kind is GroupKind.R2:
        v1 = wrap_periodic(v1, group.half_period)  # type: ignore[arg-type]
    return t, (v1, v2)


@dataclass(frozen=True)
class GroupElement():
    """
    A point (t, v) of the group, stored canonically on quotients.
    """
    t: float
    v: tuple[float, float]
    group: GroupClass

    def __post_init__(self):
        assert_type(self.group,
                    expected_type=GroupClass)
        assert_type_and_range(self.t)
        t, v = canonical_coordinates(self.group, self.t, as_vector(self.v))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @property
    def vec_v(self) -> np.ndarray:
        return np.array(self.v)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.t, self.v[0], self.v[1]])

    def isclose(self, other: "GroupElement", tolerance: float=1e-9) -> bool:
        """
        Compares coordinates relative to their magnitude; wrapped
        coordinates are compared modulo their period.
        """
        diff = self.vector - other.vector
        half_period = self.group.half_period
        if half_period is not None:
            index = 0 if self.group.kind is GroupKind.E_N else 1
            diff[index] = wrap_periodic(diff[index], half_period)
        scale = max(1.0, float(np.max(np.abs(self.vector))))
        return bool(np.max(np.abs(diff)) <= tolerance * scale)

    @staticmethod
    def from_vector(group: GroupClass, values: Iterable[float]) -> "GroupElement":
        vec = as_vector(values, length=3)
        return GroupElement(vec[0], (vec[1], vec[2]), group)


def identity(group: GroupClass) -> GroupElement:
    return GroupElement(0.0, (0.0, 0.0), group)


def canonicalize(g: GroupElement) -> GroupElement:
    """
    Returns the canonical representative of `g`. Elements are
    canonicalized on construction, so this is a re-wrap of the
    stored coordinates.
    """
    return GroupElement(g.t, g.v, g.group)


def bracket(group: GroupClass,
            x: AlgebraElement,
            y: AlgebraElement) -> AlgebraElement:
    """
    [(a,w),(b,v)] = (0, aθv − bθw).
    """
    theta = theta_of(group)
    w = x.a * (theta @ y.vec_w) - y.a * (theta @ x.vec_w)
    return AlgebraElement(0.0, tuple(w))


def bracket_vectors(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Bracket on raw 3-vectors, used by the closure loops.
    """
    w = x[0] * (theta @ y[1:]) - y[0] * (theta @ x[1:])
    return np.array([0.0, w[0], w[1]])


def _check_same_class(*elements: GroupElement) -> None:
    first = elements[0].group
    for element in elements[1:]:
        if element.group != first:
            raise ClassMismatch(f"Cannot combine {first.name} with {element.group.name}")


def group_mul(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """
    (t1, v1)·(t2, v2) = (t1 + t2, v1 + ρ_{t1}v2).
    """
    _check_same_class(g1, g2)
    v = g1.vec_v + rho_matrix(g1.group, g1.t) @ g2.vec_v
    return GroupElement(g1.t + g2.t, tuple(v), g1.group)


def group_inv(g: GroupElement) -> GroupElement:
    """
    (t, v)⁻¹ = (−t, −ρ_{−t}v).
    """
    v = -rho_matrix(g.group, -g.t) @ g.vec_v
    return GroupElement(-g.t, tuple(v), g.group)


def exp_map(group: GroupClass, x: AlgebraElement) -> GroupElement:
    """
    exp(0, w) = (0, w) and exp(s, w) = (s, (1/s)Λ_s w).
    """
    if x.a == 0.0:
        return GroupElement(0.0, x.w, group)
    v = lambda_over_s(group, x.a) @ x.vec_w
    return GroupElement(x.a, tuple(v), group)


def invariant_field(group: GroupClass,
                    y: AlgebraElement,
                    g: GroupElement,
                    side: Side=Side.LEFT) -> AlgebraElement:
    """
    Evaluates the invariant field of `y` at `g` in the (t, v) chart:
    Y^L(t,v) = (a, ρ_t w) and Y^R(t,v) = (a, w + aθv).
    """
    assert_type(side,
                expected_type=Side)
    if g.group != group:
        raise ClassMismatch(f"Cannot evaluate a field of {group.name} at a point of {g.group.name}")
    if side is Side.LEFT:
        w = rho_matrix(group, g.t) @ y.vec_w
    else:
        w = y.vec_w + y.a * (theta_of(group) @ g.vec_v)
    return AlgebraElement(y.a, tuple(w))
