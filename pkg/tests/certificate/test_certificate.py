"""This module contains test routines for barrier certificates and
their validation along simulated trajectories."""

from math import sqrt
import numpy as np
import pytest
from components.algebra import GroupElement
from components.certificate import barrier_certificate, is_sign_definite, monotone_candidates, z_drift
from components.derivation import make_derivation
from components.group_class import GroupClass
from components.linear_system import LinearSystem
from components.projection import projected_system
from helpers.functions import perpendicular
from helpers.types import CertificateKind, ChartSpace, GroupKind, NoCertificate, RegimeMismatch
from simulation.constants import BARRIER_TOLERANCE, FLIPPED_BARRIER_MINIMUM
from simulation.control import ControlSignal
from simulation.monitor import monitor_barrier, validate_certificate
from simulation.simulator import integrate

r2_tilde = GroupClass(GroupKind.R2_TILDE)
r3 = GroupClass(GroupKind.R3)
r3_lambda = GroupClass(GroupKind.R3_LAMBDA, lambda_=0.5)
e_tilde = GroupClass(GroupKind.E_TILDE)
horizon: float = 2.0
dt: float = 1e-3
count: int = 40

def create_system(group: GroupClass,
                  dstar: list[list[float]],
                  xi: list[float],
                  controls: list[list[float]]) -> LinearSystem:
    return LinearSystem.from_arrays(group, make_derivation(group, dstar, xi), controls)

def half_plane_system() -> LinearSystem:
    return create_system(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])

def disk_system() -> LinearSystem:
    return create_system(e_tilde, [[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])

def monotone_system() -> LinearSystem:
    return create_system(r2_tilde, [[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])

def half_plane_h_system() -> LinearSystem:
    return create_system(r3_lambda, [[0.0, 0.0], [0.0, 1.0]], [0.0, 1.0],
                         [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

def test_half_plane_f_parameters() -> None:
    certificate = barrier_certificate(half_plane_system())
    assert certificate.kind is CertificateKind.HALF_PLANE_F
    assert certificate.space is ChartSpace.PLANE_F
    assert np.allclose(certificate.params["ell"], [0.0, 1.0])
    assert certificate.params["kappa"] == 0.5
    assert certificate.params["mu"] == -1.0
    assert certificate.params["offset"] == 2.0
    assert certificate.direction == -1
    assert np.allclose(certificate.boundary_point(), [0.0, 2.0])
    assert abs(float(certificate.evaluate(certificate.boundary_point()))) <= 1e-15

def test_expanding_disk_parameters() -> None:
    certificate = barrier_certificate(disk_system())
    assert certificate.kind is CertificateKind.EXPANDING_DISK
    assert certificate.direction == 1
    assert np.allclose(certificate.params["center"], [1.0, -1.0])
    assert abs(certificate.params["radius"] - sqrt(2.0)) <= 1e-15
    assert np.allclose(certificate.params["k_center"], [0.5, -0.5])
    assert abs(certificate.params["k_radius"] - sqrt(2.0) / 2.0) <= 1e-15
    assert np.allclose(certificate.boundary_point(), [2.0, -2.0])

def test_monotone_coordinate_search() -> None:
    system = monotone_system()
    certificate = barrier_certificate(system)
    assert certificate.kind is CertificateKind.MONOTONE_COORDINATE
    assert certificate.params["candidate"] == "reciprocal"
    assert certificate.direction == -1
    t = np.linspace(-3.0, 3.0, 61)
    drift = z_drift(system, certificate.params["v0"], t)
    assert np.allclose(drift, 1.0 + t - np.exp(t), rtol=1e-12, atol=1e-12)
    assert [name for name, _ in monotone_candidates(system)] == \
        ["reciprocal", "reciprocal-flipped", "xi"]

def test_xi_direction_is_sign_definite() -> None:
    grid = np.linspace(-20.0, 20.0, 4_001)
    for group, xi in ((e_tilde, [1.0, 2.0]), (r2_tilde, [1.0, -2.0]), (r3, [0.5, 1.5])):
        system = create_system(group, [[0.0, 0.0], [0.0, 0.0]], xi, [[1.0, 0.0, 0.0]])
        v0 = perpendicular(np.array(xi))
        assert is_sign_definite(z_drift(system, v0, grid)) != 0
    assert is_sign_definite(np.sin(grid)) == 0
    assert is_sign_definite(np.zeros(5)) == 0

def test_half_plane_h_parameters() -> None:
    certificate = barrier_certificate(half_plane_h_system())
    assert certificate.kind is CertificateKind.HALF_PLANE_H
    assert certificate.space is ChartSpace.PLANE_H
    assert certificate.params["kappa"] == 0.5
    assert certificate.params["mu"] == 1.0
    assert abs(certificate.params["offset"]) == 2.0

def test_no_certificate_for_imaginary_spectrum() -> None:
    system = create_system(e_tilde, [[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0], [[1.0, 0.0, 0.0]])
    with pytest.raises(NoCertificate):
        barrier_certificate(system)

def test_identity_trajectory_has_no_violation() -> None:
    system = half_plane_system()
    certificate = barrier_certificate(system)
    trajectory = integrate(system, ControlSignal.zero(1.0, 1), dt=0.1)
    assert monitor_barrier(trajectory, certificate) == 0.0

def test_certificates_hold_on_random_trajectories() -> None:
    for system in (half_plane_system(), disk_system(), half_plane_h_system()):
        certificate = barrier_certificate(system)
        violation = validate_certificate(system, certificate, count, horizon=horizon, seed=7, dt=dt)
        assert violation <= 1e-6 * horizon

def test_monotone_certificate_over_long_horizon() -> None:
    system = monotone_system()
    certificate = barrier_certificate(system)
    assert validate_certificate(system, certificate, 50, horizon=10.0, seed=42, dt=1e-2) <= 1e-6

def test_certificate_of_shifted_system() -> None:
    system = create_system(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[1.0, 2.0, 3.0]])
    certificate = barrier_certificate(system)
    assert certificate.projection.shift.tolist() == [2.0, 3.0]
    assert certificate.params["offset"] == -4.0
    starts = [GroupElement(0.0, (0.0, 0.0), r3_lambda), GroupElement(0.5, (1.0, -1.0), r3_lambda)]
    violation = validate_certificate(system, certificate, count, horizon=horizon, seed=3, dt=dt,
                                     starts=starts)
    assert violation <= 1e-6 * horizon

def test_flipped_certificates_fail() -> None:
    for system in (half_plane_system(), disk_system(), monotone_system()):
        certificate = barrier_certificate(system).flipped()
        start = certificate.projection.lift(certificate.boundary_point())
        violation = validate_certificate(system, certificate, count, horizon=horizon, seed=11,
                                         dt=1e-2, starts=[start])
        assert violation > FLIPPED_BARRIER_MINIMUM
        assert violation > BARRIER_TOLERANCE

def test_monitor_rejects_foreign_regimes() -> None:
    certificate = barrier_certificate(half_plane_system())
    other = create_system(r3, [[1.0, 2.0], [0.0, 1.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])
    trajectory = integrate(other, ControlSignal.zero(0.5, 1), dt=0.1)
    with pytest.raises(RegimeMismatch):
        monitor_barrier(trajectory, certificate)
    own = integrate(half_plane_system(), ControlSignal.zero(0.5, 1), dt=0.1)
    plane_h = projected_system(half_plane_h_system())
    with pytest.raises(RegimeMismatch):
        monitor_barrier(own, certificate, plane_h)
