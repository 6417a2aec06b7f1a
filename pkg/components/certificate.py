"""This module contains the barrier certificates witnessing that a
linear system is not controllable: a scalar functional on a projected
chart whose signed value cannot decrease along admissible trajectories."""

from collections.abc import Callable
from dataclasses import dataclass, field
import logging
from math import sqrt
from typing import Any, Optional
import numpy as np
from components.derivation import dstar_kernel, left_eigenvectors
from components.group_class import theta_of
from components.kernels import lambda_matrix
from components.linear_system import LinearSystem, NormalizedSystem, normalize
from components.projection import ProjectedSystem, projected_system
from helpers.functions import assert_callable, assert_type, perpendicular, sign
from helpers.types import CertificateKind, ChartSpace, GroupKind, NoCertificate
from simulation.constants import EIGENVECTOR_TOLERANCE, SEARCH_SAMPLES, SEARCH_T_MAX, \
    SEARCH_T_MIN, SIGN_DEFINITE_TOLERANCE, ZERO_TOLERANCE

logger = logging.getLogger(__name__)

Functional = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BarrierCertificate():
    """
    A functional F on the chart of `projection`. Barrier kinds keep
    `direction·(F − level) ≥ 0` forward invariant; MonotoneCoordinate
    makes `direction·F` non-decreasing.
    """
    kind: CertificateKind
    functional: Functional
    direction: int
    projection: ProjectedSystem
    level: float=0.0
    params: dict[str, Any]=field(default_factory=dict)

    def __post_init__(self):
        assert_type(self.kind,
                    expected_type=CertificateKind)
        assert_callable(self.functional)
        assert self.direction in (-1, 1)

    @property
    def space(self) -> ChartSpace:
        return self.projection.space

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Signed margin direction·(F − level) at chart points (..., 2).
        """
        return self.direction * (self.functional(np.asarray(points, dtype=float)) - self.level)

    def boundary_point(self) -> np.ndarray:
        """
        A chart point with zero margin. For the disk, the point of the
        circle farthest from the region where the functional decreases.
        """
        params = self.params
        if self.kind is CertificateKind.HALF_PLANE_F:
            return params["offset"] * params["ell"]
        if self.kind is CertificateKind.HALF_PLANE_H:
            return np.array([0.0, params["offset"] / params["mu"]])
        if self.kind is CertificateKind.EXPANDING_DISK:
            outward = params["center"] - params["k_center"]
            return params["center"] + params["radius"] * outward / np.linalg.norm(outward)
        return np.zeros(2)

    def flipped(self) -> "BarrierCertificate":
        """
        The same certificate with the opposite direction; never valid.
        """
        return BarrierCertificate(self.kind, self.functional, -self.direction,
                                  self.projection, self.level, dict(self.params))

    def to_dict(self) -> dict[str, Any]:
        params = {key: (value.tolist() if isinstance(value, np.ndarray) else value)
                  for key, value in self.params.items()}
        return {"kind": self.kind.value,
                "space": self.space.value,
                "direction": self.direction,
                "level": self.level,
                "params": params}

# MONOTONE COORDINATE

def z_drift(system: LinearSystem, v0: np.ndarray, t: np.ndarray) -> np.ndarray:
    """
    t ↦ ⟨Λ_t ξ, v₀⟩, the uncontrolled z-velocity on the PlaneH chart when D* = 0.
    """
    return lambda_matrix(system.group, t) @ system.derivation.xi @ v0


def is_sign_definite(values: np.ndarray) -> int:
    """
    Returns +1 or -1 if `values` keep a sign (up to a relative
    tolerance) and are not identically zero, 0 otherwise.
    """
    scale = float(np.max(np.abs(values)))
    if scale <= ZERO_TOLERANCE:
        return 0
    if np.min(values) >= -SIGN_DEFINITE_TOLERANCE * scale:
        return 1
    if np.max(values) <= SIGN_DEFINITE_TOLERANCE * scale:
        return -1
    return 0


def monotone_candidates(system: LinearSystem) -> list[tuple[str, np.ndarray]]:
    """
    Directions w₀ tried in order by the MonotoneCoordinate search.
    """
    xi1, xi2 = system.derivation.xi
    candidates: list[tuple[str, np.ndarray]] = []
    if abs(xi1) > ZERO_TOLERANCE and abs(xi2) > ZERO_TOLERANCE:
        candidates.append(("reciprocal", np.array([1.0 / xi2, 1.0 / xi1])))
        candidates.append(("reciprocal-flipped", np.array([-1.0 / xi2, 1.0 / xi1])))
    candidates.append(("xi", np.array([xi1, xi2])))
    theta = theta_of(system.group)
    if abs(np.linalg.det(theta)) > ZERO_TOLERANCE:
        candidates.append(("theta-inverse-xi", np.linalg.solve(theta, [xi1, xi2])))
    return [(name, w0) for name, w0 in candidates if np.linalg.norm(w0) > ZERO_TOLERANCE]


def _monotone_coordinate(normalized: NormalizedSystem) -> BarrierCertificate:
    system = normalized.system
    grid = np.linspace(SEARCH_T_MIN, SEARCH_T_MAX, SEARCH_SAMPLES)
    for name, w0 in monotone_candidates(system):
        v0 = perpendicular(w0)
        definite = is_sign_definite(z_drift(system, v0, grid))
        logger.debug("MonotoneCoordinate candidate %s w0 = %s: sign %d", name, w0.tolist(), definite)
        if definite == 0:
            continue
        projection = projected_system(normalized, w0=w0, space=ChartSpace.PLANE_H)
        return BarrierCertificate(
            kind=CertificateKind.MONOTONE_COORDINATE,
            functional=lambda points: points[..., 1],
            direction=definite,
            projection=projection,
            params={"w0": w0, "v0": v0, "candidate": name,
                    "xi": system.derivation.xi.copy()})
    raise NoCertificate("No sign-definite projected drift among the candidate directions")

# HALF PLANES

def _orthogonal_to_controls(system: LinearSystem, ell: np.ndarray) -> bool:
    for control in system.controls:
        if control.in_nilradical:
            scale = max(1.0, float(np.linalg.norm(control.vec_w)))
            if abs(ell @ control.vec_w) > EIGENVECTOR_TOLERANCE * scale:
                return False
    return True


def _half_plane_candidates(system: LinearSystem) -> list[tuple[np.ndarray, float]]:
    """
    Real left eigenvectors ℓ of θ with nonzero eigenvalue κ, e₂ first.
    On R3Lambda with λ = 1 (θ = I) the left eigenvectors of D* are used.
    """
    theta = theta_of(system.group)
    if system.group.kind is GroupKind.R3_LAMBDA and system.group.is_unit_lambda:
        return [(ell, 1.0) for ell, _ in left_eigenvectors(system.derivation.dstar)]
    found = [(ell, kappa) for ell, kappa in left_eigenvectors(theta)
             if abs(kappa) > ZERO_TOLERANCE]
    return sorted(found, key=lambda pair: -abs(pair[0][1]))


def _left_eigenvalue(matrix: np.ndarray, ell: np.ndarray) -> Optional[float]:
    mu = float(ell @ matrix @ ell) / float(ell @ ell)
    residual = np.linalg.norm(matrix.T @ ell - mu * ell)
    scale = max(1.0, float(np.max(np.abs(matrix))))
    return mu if residual <= EIGENVECTOR_TOLERANCE * scale else None


def _half_plane_f(normalized: NormalizedSystem) -> BarrierCertificate:
    """
    φ(p) = ⟨ℓ, p⟩ − ⟨ℓ, ξ⟩/κ; on φ = 0 the projected field gives φ̇ = μ·c.
    """
    system = normalized.system
    dstar, xi = system.derivation.dstar, system.derivation.xi
    for ell, kappa in _half_plane_candidates(system):
        mu = _left_eigenvalue(dstar, ell)
        if mu is None or abs(mu) <= ZERO_TOLERANCE or not _orthogonal_to_controls(system, ell):
            continue
        offset = float(ell @ xi) / kappa
        projection = projected_system(normalized, space=ChartSpace.PLANE_F)
        return BarrierCertificate(
            kind=CertificateKind.HALF_PLANE_F,
            functional=(lambda ell, offset: lambda points: points @ ell - offset)(ell, offset),
            direction=sign(mu * offset),
            projection=projection,
            params={"ell": ell, "kappa": kappa, "mu": mu, "offset": offset,
                    "xi": xi.copy(), "lambda": system.group.lambda_})
    raise NoCertificate("No common real left eigenvector of θ and D* avoids the controls")


def _half_plane_h(normalized: NormalizedSystem) -> BarrierCertificate:
    """
    Singular D* ≠ 0: with w₀ ∈ ker D* and v₀ ⊥ w₀ a left eigenvector of
    θ (eigenvalue κ), ψ = μz − ⟨v₀, ξ⟩/κ obeys ψ̇ = μψ + μc·e^{κt}.
    """
    system = normalized.system
    dstar, xi = system.derivation.dstar, system.derivation.xi
    theta = theta_of(system.group)
    mu = float(np.trace(dstar))
    for w0 in dstar_kernel(dstar):
        v0 = perpendicular(w0)
        kappa = _left_eigenvalue(theta, v0)
        if kappa is None or abs(kappa) <= ZERO_TOLERANCE or abs(mu) <= ZERO_TOLERANCE:
            continue
        if not _orthogonal_to_controls(system, v0):
            continue
        offset = float(v0 @ xi) / kappa
        projection = projected_system(normalized, w0=w0, space=ChartSpace.PLANE_H)
        return BarrierCertificate(
            kind=CertificateKind.HALF_PLANE_H,
            functional=(lambda mu, offset: lambda points: mu * points[..., 1] - offset)(mu, offset),
            direction=sign(mu * offset),
            projection=projection,
            params={"w0": w0, "v0": v0, "kappa": kappa, "mu": mu, "offset": offset,
                    "xi": xi.copy()})
    raise NoCertificate("Singular D* admits no invariant half-plane in the H chart")

# EXPANDING DISK

def _expanding_disk(normalized: NormalizedSystem) -> BarrierCertificate:
    """
    D* = αI + βJ with α ≠ 0. V(p) = ½|p − θ⁻¹ξ|² has V̇ = α·K(p), where
    {K ≤ 0} is a disk inside the circle of radius √(α²+β²)|ξ|/|α|.
    """
    system = normalized.system
    dstar, xi = system.derivation.dstar, system.derivation.xi
    alpha, beta = float(dstar[0, 0]), float(dstar[1, 0])
    center = np.array([xi[1], -xi[0]])
    radius = sqrt(alpha * alpha + beta * beta) * float(np.linalg.norm(xi)) / abs(alpha)
    disk_center = np.array([-(beta * xi[0] - alpha * xi[1]) / (2 * alpha),
                            -(beta * xi[1] + alpha * xi[0]) / (2 * alpha)])
    projection = projected_system(normalized, space=ChartSpace.PLANE_F)
    return BarrierCertificate(
        kind=CertificateKind.EXPANDING_DISK,
        functional=lambda points: 0.5 * np.sum((points - center) ** 2, axis=-1),
        direction=sign(alpha),
        projection=projection,
        level=0.5 * radius * radius,
        params={"alpha": alpha, "beta": beta, "xi": xi.copy(), "center": center,
                "radius": radius, "k_center": disk_center, "k_radius": 0.5 * radius})


def barrier_certificate(system: LinearSystem|NormalizedSystem) -> BarrierCertificate:
    """
    Builds the catalogued barrier of a non-controllable system satisfying
    LARC. Raises NoCertificate when none applies.
    """
    normalized = system if isinstance(system, NormalizedSystem) else normalize(system)
    reduced = normalized.system
    dstar = reduced.derivation.dstar
    kernel = dstar_kernel(dstar)
    if len(kernel) == 2:
        certificate = _monotone_coordinate(normalized)
    elif len(kernel) == 1:
        certificate = _half_plane_h(normalized)
    elif reduced.group.in_e_family:
        if abs(dstar[0, 0]) <= ZERO_TOLERANCE:
            raise NoCertificate("Purely imaginary D* on the E family has no barrier")
        certificate = _expanding_disk(normalized)
    else:
        certificate = _half_plane_f(normalized)
    logger.info("Barrier certificate %s on %s (direction %+d)", certificate.kind.value,
                certificate.space.value, certificate.direction)
    return certificate
