"""This module contains the catalogue of group classes
and their structure matrices θ."""

from dataclasses import dataclass
from math import pi
from typing import Any, Optional
import numpy as np
from helpers.functions import assert_type, assert_type_and_range
from helpers.types import GroupKind

LAMBDA_KINDS: tuple[GroupKind, ...] = (GroupKind.R3_LAMBDA, GroupKind.R3_PRIME_LAMBDA)
R2_FAMILY: tuple[GroupKind, ...] = (GroupKind.R2_TILDE, GroupKind.R2)
E_FAMILY: tuple[GroupKind, ...] = (GroupKind.E_TILDE, GroupKind.E_N)


@dataclass(frozen=True)
class GroupClass():
    """
    One of the groups ℝ ×_θ ℝ². `lambda_` is present only for
    R3Lambda / R3PrimeLambda and `n` only for En.
    """
    kind: GroupKind
    lambda_: Optional[float]=None
    n: Optional[int]=None

    def __post_init__(self):
        assert_type(self.kind,
                    expected_type=GroupKind)
        if self.kind in LAMBDA_KINDS:
            assert_type_and_range(self.lambda_)
            object.__setattr__(self, "lambda_", float(self.lambda_))  # type: ignore[arg-type]
        else:
            assert self.lambda_ is None, f"{self.kind.value} takes no lambda"
        if self.kind is GroupKind.R3_LAMBDA:
            assert 0.0 < abs(self.lambda_) <= 1.0, (  # type: ignore[arg-type]
                f"R3Lambda requires 0 < |lambda| <= 1, got {self.lambda_}")
        if self.kind is GroupKind.R3_PRIME_LAMBDA:
            assert self.lambda_ != 0.0, "R3PrimeLambda requires lambda != 0"
        if self.kind is GroupKind.E_N:
            assert_type(self.n,
                        expected_type=int)
            assert not isinstance(self.n, bool)
            assert self.n >= 1, f"En requires n >= 1, got {self.n}"  # type: ignore[operator]
        else:
            assert self.n is None, f"{self.kind.value} takes no n"

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def in_r2_family(self) -> bool:
        return self.kind in R2_FAMILY

    @property
    def in_e_family(self) -> bool:
        return self.kind in E_FAMILY

    @property
    def is_quotient(self) -> bool:
        return self.kind in (GroupKind.R2, GroupKind.E_N)

    @property
    def is_unit_lambda(self) -> bool:
        """Exact comparison: λ is user input."""
        return self.lambda_ == 1.0

    @property
    def half_period(self) -> Optional[float]:
        """
        Half period of the wrapped coordinate on quotient classes:
        t for En, v1 for R2.
        """
        if self.kind is GroupKind.E_N:
            return self.n * pi  # type: ignore[operator]
        if self.kind is GroupKind.R2:
            return pi
        return None

    def covering(self) -> "GroupClass":
        """
        Returns the simply connected class covering this one.
        """
        if not self.is_quotient:
            return self
        if self.kind is GroupKind.R2:
            return GroupClass(GroupKind.R2_TILDE)
        return GroupClass(GroupKind.E_TILDE)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"class": self.name}
        if self.lambda_ is not None:
            data["lambda"] = self.lambda_
        if self.n is not None:
            data["n"] = self.n
        return data

    @staticmethod
    def from_name(name: str,
                  lambda_: Optional[float]=None,
                  n: Optional[int]=None) -> "GroupClass":
        """
        Builds a class from its public name, e.g. `"R3Lambda"`.
        """
        try:
            kind = GroupKind(name)
        except ValueError as exc:
            known = ", ".join(kind.value for kind in GroupKind)
            raise AssertionError(f"Unknown group class '{name}' (expected one of {known})") from exc
        return GroupClass(kind, lambda_=lambda_, n=n)


def theta_of(group: GroupClass) -> np.ndarray:
    """
    Returns the structure matrix θ of the semidirect product.
    """
    if group.in_r2_family:
        return np.array([[0.0, 0.0], [0.0, 1.0]])
    if group.kind is GroupKind.R3:
        return np.array([[1.0, 1.0], [0.0, 1.0]])
    if group.kind is GroupKind.R3_LAMBDA:
        return np.array([[1.0, 0.0], [0.0, group.lambda_]])
    if group.kind is GroupKind.R3_PRIME_LAMBDA:
        return np.array([[group.lambda_, -1.0], [1.0, group.lambda_]])
    return np.array([[0.0, -1.0], [1.0, 0.0]])
