"""
Contains various types for use in the project.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any
from helpers.functions import assert_type, assert_type_and_range


class GroupKind(Enum):
    """
    The five nonnilpotent solvable three-dimensional algebra
    classes, with the quotient tags for R2 and En.
    """
    R2_TILDE        = "R2Tilde"
    R2              = "R2"
    R3              = "R3"
    R3_LAMBDA       = "R3Lambda"
    R3_PRIME_LAMBDA = "R3PrimeLambda"
    E_TILDE         = "ETilde"
    E_N             = "En"


class Side(Enum):
    """
    Side of the translation used to build an invariant field.
    """
    LEFT  = "left"
    RIGHT = "right"


class ChartSpace(Enum):
    """
    Homogeneous spaces a linear system can be projected to.
    """
    PLANE_F    = "PlaneF"
    PLANE_H    = "PlaneH"
    CYLINDER_H = "CylinderH"


class CertificateKind(Enum):
    """
    Catalogue of barrier certificates.
    """
    HALF_PLANE_F        = "HalfPlaneF"
    HALF_PLANE_H        = "HalfPlaneH"
    MONOTONE_COORDINATE = "MonotoneCoordinate"
    EXPANDING_DISK      = "ExpandingDisk"

    @property
    def is_monotone(self) -> bool:
        return self is CertificateKind.MONOTONE_COORDINATE


class Direction(Enum):
    """
    Time direction used when sampling reachable sets.
    """
    FORWARD  = "forward"
    BACKWARD = "backward"

    @property
    def time_sign(self) -> float:
        return 1.0 if self is Direction.FORWARD else -1.0


@dataclass(frozen=True)
class GridSpec():
    """
    An axis-aligned box over the (t, v1, v2) chart split in cells.
    """
    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    resolution: tuple[int, int, int]

    def __post_init__(self):
        assert len(self.lower) == len(self.upper) == len(self.resolution) == 3
        for low, high in zip(self.lower, self.upper):
            assert_type_and_range(low, high)
            assert low < high, f"Empty grid axis [{low}, {high}]"
        for cells in self.resolution:
            assert_type(cells,
                        expected_type=int)
            assert cells > 0

    @property
    def cell_count(self) -> int:
        return self.resolution[0] * self.resolution[1] * self.resolution[2]

    def to_dict(self) -> dict[str, Any]:
        return {"lower": list(self.lower),
                "upper": list(self.upper),
                "resolution": list(self.resolution)}

    @staticmethod
    def parse(text: str) -> "GridSpec":
        """
        Parses `lo:hi:cells` (same box on every axis) or
        `lo,lo,lo:hi,hi,hi:c,c,c`.
        """
        parts = text.split(":")
        assert len(parts) == 3, f"Grid spec '{text}' must be 'lower:upper:cells'"
        def expand(part: str, cast: type) -> tuple:
            values = [cast(item) for item in part.split(",")]
            if len(values) == 1:
                values = values * 3
            assert len(values) == 3, f"Grid spec '{text}' needs 1 or 3 values per field"
            return tuple(values)
        return GridSpec(lower=expand(parts[0], float),
                        upper=expand(parts[1], float),
                        resolution=expand(parts[2], int))


# ERRORS

class LieControlError(Exception):
    """Base class of the errors raised by this project."""


class CommutationViolation(LieControlError):
    """D* does not commute with the structure matrix θ."""


class ZeroDerivation(LieControlError):
    """Both D* and ξ vanish."""


class ClassMismatch(LieControlError):
    """Two operands belong to different group classes."""


class DimensionMismatch(LieControlError):
    """A control vector does not match the number of controls."""


class WrongRegime(LieControlError):
    """A projection was requested outside its regime."""


class NoCertificate(LieControlError):
    """No catalogued barrier applies to a negative verdict."""


class RegimeMismatch(LieControlError):
    """A certificate is monitored against a projection it was not built for."""


class NonFiniteTrajectory(LieControlError):
    """
    A coordinate left the blow-up bound. The partial
    trajectory is kept in `trajectory`.
    """
    def __init__(self, message: str, trajectory: Any=None) -> None:
        super().__init__(message)
        self.trajectory = trajectory


class ConfigError(LieControlError):
    """A configuration document is malformed."""


class SemanticError(LieControlError):
    """A well-formed configuration describes an invalid system."""
