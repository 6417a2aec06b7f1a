"""This module contains test routines for the linear flow and the RK4 integrator."""

import numpy as np
import pytest
from components.algebra import AlgebraElement, GroupElement, group_mul, identity
from components.derivation import make_derivation
from components.group_class import GroupClass
from components.linear_system import LinearSystem
from helpers.types import DimensionMismatch, GroupKind, NonFiniteTrajectory
from simulation.constants import BLOW_UP_BOUND, CSV_COLUMNS
from simulation.control import ControlSegment, ControlSignal
from simulation.simulator import integrate, linear_flow, system_field

r2_tilde = GroupClass(GroupKind.R2_TILDE)
r3_lambda = GroupClass(GroupKind.R3_LAMBDA, lambda_=0.5)
r3_prime = GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=0.5)
e_tilde = GroupClass(GroupKind.E_TILDE)

def create_system(group: GroupClass,
                  dstar: list[list[float]],
                  xi: list[float],
                  controls: list[list[float]]) -> LinearSystem:
    return LinearSystem.from_arrays(group, make_derivation(group, dstar, xi), controls)

def spiral_system() -> LinearSystem:
    return create_system(r3_prime, [[0.3, -1.0], [1.0, 0.3]], [1.0, 0.5], [[1.0, 0.2, -0.1]])

def final_error(system: LinearSystem, signal: ControlSignal, dt: float,
                reference: GroupElement) -> float:
    final = integrate(system, signal, dt=dt).final
    return float(np.max(np.abs(final.vector - reference.vector)))

def test_zero_control_follows_linear_flow() -> None:
    cases = [(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]),
             (e_tilde, [[0.2, -1.0], [1.0, 0.2]], [0.5, -1.0]),
             (r2_tilde, [[0.0, 0.0], [0.0, 0.7]], [1.0, 2.0])]
    start = (0.8, (0.5, -0.3))
    for group, dstar, xi in cases:
        system = create_system(group, dstar, xi, [[1.0, 0.0, 0.0]])
        g0 = GroupElement(start[0], start[1], group)
        trajectory = integrate(system, ControlSignal.zero(1.0, 1), g0, dt=1e-3)
        expected = linear_flow(system.derivation, 1.0, g0)
        assert np.max(np.abs(trajectory.final.vector - expected.vector)) <= 1e-8

def test_linear_flow_laws() -> None:
    system = spiral_system()
    derivation = system.derivation
    g = GroupElement(0.4, (1.0, -0.5), r3_prime)
    h = GroupElement(-1.2, (0.3, 2.0), r3_prime)
    assert linear_flow(derivation, 0.0, g).isclose(g, tolerance=1e-15)
    composed = linear_flow(derivation, 0.7, linear_flow(derivation, 0.5, g))
    assert composed.isclose(linear_flow(derivation, 1.2, g), tolerance=1e-10)
    product = linear_flow(derivation, 0.9, group_mul(g, h))
    assert product.isclose(group_mul(linear_flow(derivation, 0.9, g),
                                     linear_flow(derivation, 0.9, h)), tolerance=1e-10)
    assert linear_flow(derivation, 2.0, identity(r3_prime)).isclose(identity(r3_prime))

def test_rk4_convergence_order() -> None:
    system = spiral_system()
    signal = ControlSignal.constant(2.0, (0.8,))
    reference = integrate(system, signal, dt=1e-3).final
    coarse = final_error(system, signal, 0.1, reference)
    fine = final_error(system, signal, 0.05, reference)
    assert 8.0 <= coarse / fine <= 32.0

def test_segment_ends_are_sampled() -> None:
    system = spiral_system()
    signal = ControlSignal((ControlSegment(0.35, (1.0,)), ControlSegment(0.4, (-1.0,))))
    trajectory = integrate(system, signal, dt=0.1)
    assert np.min(np.abs(trajectory.s - 0.35)) <= 1e-15
    assert abs(trajectory.s[-1] - 0.75) <= 1e-15
    assert trajectory.steps == 4 + 4
    assert np.all(np.diff(trajectory.s) <= 0.1 + 1e-15)

def test_control_count_is_checked() -> None:
    system = spiral_system()
    with pytest.raises(DimensionMismatch):
        integrate(system, ControlSignal.zero(1.0, 2))
    with pytest.raises(DimensionMismatch):
        system_field(system, np.array([1.0, 0.0]), identity(r3_prime))

def test_blow_up_is_reported() -> None:
    system = create_system(r2_tilde, [[30.0, 0.0], [0.0, 30.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])
    g0 = GroupElement(0.0, (1.0, 1.0), r2_tilde)
    signal = ControlSignal.zero(1.0, 1)
    with pytest.raises(NonFiniteTrajectory) as error:
        integrate(system, signal, g0)
    partial = error.value.trajectory
    assert partial.blown_up
    assert 0.85 <= partial.s[-1] < 1.0
    assert np.max(np.abs(partial.points)) <= BLOW_UP_BOUND
    quiet = integrate(system, signal, g0, raise_on_blow_up=False)
    assert quiet.blown_up and len(quiet) == len(partial)

def test_system_field_values() -> None:
    system = spiral_system()
    e = identity(r3_prime)
    assert system_field(system, np.array([0.0]), e).isclose(AlgebraElement.zero())
    assert system_field(system, np.array([1.0]), e).isclose(AlgebraElement(1.0, (0.2, -0.1)))
    g = GroupElement(0.0, (1.0, 0.0), r3_prime)
    assert system_field(system, np.array([0.0]), g).isclose(AlgebraElement(0.0, (0.3, 1.0)))

def test_zero_signal_stays_at_identity() -> None:
    system = create_system(r3_lambda, [[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], [[1.0, 0.0, 0.0]])
    trajectory = integrate(system, ControlSignal.zero(1.0, 1), dt=0.1)
    assert np.all(trajectory.points == 0.0)
    frame = trajectory.to_dataframe()
    assert list(frame.columns) == list(CSV_COLUMNS)
    assert len(frame) == 11
