"""
This module implements the numerical dynamics of a linear system:
the closed-form linear flow, the control vector field and a
fixed-step RK4 integrator for piecewise-constant controls.
"""

from dataclasses import dataclass, field
import logging
from math import ceil
from typing import Iterator, Optional
import numpy as np
import pandas as pd
from components.algebra import AlgebraElement, GroupElement
from components.derivation import Derivation, flow_integral, matrix_exp_2x2
from components.group_class import GroupClass
from components.kernels import lambda_matrix, rho_matrix
from components.linear_system import LinearSystem
from components.projection import ProjectedSystem
from helpers.functions import as_vector, assert_type, assert_type_and_range, \
    wrap_periodic_array
from helpers.types import ChartSpace, DimensionMismatch, GroupKind, NonFiniteTrajectory
from simulation.constants import BLOW_UP_BOUND, CSV_COLUMNS, CSV_FLOAT_FORMAT, DEFAULT_DT
from simulation.control import ControlSignal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory():
    """
    Sampled solution: times `s` (strictly increasing) and rows
    (τ, v1, v2) in `points`. `blown_up` flags a partial trajectory.
    """
    group: GroupClass
    s: np.ndarray
    points: np.ndarray
    dt: float
    blown_up: bool=False

    def __post_init__(self):
        assert_type(self.group,
                    expected_type=GroupClass)
        assert self.points.ndim == 2 and self.points.shape[1] == 3
        assert self.s.shape == (self.points.shape[0],)
        assert np.all(np.diff(self.s) > 0.0), "Sample times must increase"

    def __len__(self) -> int:
        return self.s.shape[0]

    @property
    def samples(self) -> Iterator[tuple[float, GroupElement]]:
        for s, row in zip(self.s, self.points):
            yield float(s), GroupElement.from_vector(self.group, row)

    @property
    def final(self) -> GroupElement:
        return GroupElement.from_vector(self.group, self.points[-1])

    @property
    def steps(self) -> int:
        return len(self) - 1

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({CSV_COLUMNS[0]: self.s,
                             CSV_COLUMNS[1]: self.points[:, 0],
                             CSV_COLUMNS[2]: self.points[:, 1],
                             CSV_COLUMNS[3]: self.points[:, 2]})

    def save_csv(self, path: str) -> None:
        self.to_dataframe().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)


def linear_flow(derivation: Derivation, s: float, g: GroupElement) -> GroupElement:
    """
    φ_s(t, v) = (t, e^{sD*}v + F_s Λ_t ξ).
    """
    assert_type_and_range(s)
    v = (matrix_exp_2x2(s * derivation.dstar) @ g.vec_v
         + flow_integral(derivation.dstar, s) @ lambda_matrix(g.group, g.t) @ derivation.xi)
    return GroupElement(g.t, tuple(v), g.group)


def canonicalize_states(group: GroupClass, states: np.ndarray) -> np.ndarray:
    """
    Vectorized canonicalization of (..., 3) state rows, in place.
    """
    if group.kind is GroupKind.E_N:
        states[..., 0] = wrap_periodic_array(states[..., 0], group.half_period)
    elif group.kind is GroupKind.R2:
        states[..., 1] = wrap_periodic_array(states[..., 1], group.half_period)
    return states


@dataclass(frozen=True, eq=False)
class FieldModel():
    """
    The control-affine field of a system in array form, evaluated
    on batches of states (C, 3) and controls (C, m).
    """
    system: LinearSystem
    time_sign: float=1.0
    a: np.ndarray=field(init=False)
    w: np.ndarray=field(init=False)

    def __post_init__(self):
        controls = self.system.control_matrix
        object.__setattr__(self, "a", controls[:, 0].copy())
        object.__setattr__(self, "w", controls[:, 1:].copy())

    def __call__(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        group = self.system.group
        derivation = self.system.derivation
        tau, v = states[:, 0], states[:, 1:]
        rho = rho_matrix(group, tau)
        out = np.empty_like(states)
        out[:, 0] = u @ self.a
        out[:, 1:] = (v @ derivation.dstar.T
                      + lambda_matrix(group, tau) @ derivation.xi
                      + np.einsum("cij,mj,cm->ci", rho, self.w, u))
        return self.time_sign * out


def system_field(system: LinearSystem, u: np.ndarray, g: GroupElement) -> AlgebraElement:
    """
    X(g) + Σ uᵢ Yᵢ^L(g) in the (τ, v) chart:
    τ̇ = Σuᵢaᵢ, v̇ = D*v + Λ_τ ξ + Σuᵢ ρ_τ wᵢ.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (system.control_count,):
        raise DimensionMismatch(
            f"Expected {system.control_count} control values, got {u.shape[0]}")
    value = FieldModel(system)(g.vector[None, :], u[None, :])[0]
    return AlgebraElement.from_vector(value)


def rk4_step(model: FieldModel, states: np.ndarray, u: np.ndarray, h: float) -> np.ndarray:
    k1 = model(states, u)
    k2 = model(states + 0.5 * h * k1, u)
    k3 = model(states + 0.5 * h * k2, u)
    k4 = model(states + h * k3, u)
    return states + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def segment_steps(duration: float, dt: float) -> int:
    """
    Number of equal steps of length ≤ dt covering `duration` exactly.
    """
    return max(1, int(ceil(duration / dt - 1e-9)))


def integrate(system: LinearSystem,
              signal: ControlSignal,
              g0: Optional[GroupElement]=None,
              dt: float=DEFAULT_DT,
              raise_on_blow_up: bool=True) -> Trajectory:
    """
    Fixed-step RK4 within each constant segment of `signal`. Segment
    ends are hit exactly; states are canonicalized after every step.
    """
    assert_type_and_range(dt,
                          more_than=0.0,
                          include_more=False)
    if signal.control_count != system.control_count:
        raise DimensionMismatch(f"Signal has {signal.control_count} controls, "
                                f"system has {system.control_count}")
    if g0 is None:
        g0 = GroupElement(0.0, (0.0, 0.0), system.group)
    model = FieldModel(system)
    state = g0.vector[None, :]
    times, rows = [0.0], [state[0].copy()]
    elapsed = 0.0
    for segment in signal.segments:
        steps = segment_steps(segment.duration, dt)
        h = segment.duration / steps
        u = segment.vec_u[None, :]
        for k in range(1, steps + 1):
            state = canonicalize_states(system.group, rk4_step(model, state, u, h))
            if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > BLOW_UP_BOUND:
                trajectory = Trajectory(system.group, np.array(times), np.array(rows), dt,
                                        blown_up=True)
                logger.warning("Trajectory left the bound %.0e at s = %.6g", BLOW_UP_BOUND,
                               elapsed + k * h)
                if raise_on_blow_up:
                    raise NonFiniteTrajectory(
                        f"State exceeded {BLOW_UP_BOUND:.0e} at s = {elapsed + k * h:.6g}",
                        trajectory)
                return trajectory
            times.append(elapsed + k * h if k < steps else elapsed + segment.duration)
            rows.append(state[0].copy())
        elapsed += segment.duration
    logger.debug("Integrated %d steps up to s = %.6g", len(times) - 1, elapsed)
    return Trajectory(system.group, np.array(times), np.array(rows), dt)


@dataclass(frozen=True, eq=False)
class ChartTrajectory():
    """
    Solution of a projected system: times `s` and chart points (n, 2).
    """
    space: ChartSpace
    s: np.ndarray
    points: np.ndarray


def integrate_projected(projected: ProjectedSystem,
                        signal: ControlSignal,
                        p0: np.ndarray,
                        dt: float=DEFAULT_DT) -> ChartTrajectory:
    """
    RK4 on the projected field, with the CylinderH angle kept in (−π, π].
    """
    assert_type_and_range(dt,
                          more_than=0.0,
                          include_more=False)
    point = as_vector(p0)
    times, rows = [0.0], [point.copy()]
    elapsed = 0.0
    for segment in signal.segments:
        steps = segment_steps(segment.duration, dt)
        h = segment.duration / steps
        u = segment.vec_u
        for k in range(1, steps + 1):
            k1 = projected.field(point, u)
            k2 = projected.field(point + 0.5 * h * k1, u)
            k3 = projected.field(point + 0.5 * h * k2, u)
            k4 = projected.field(point + h * k3, u)
            point = point + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if projected.space is ChartSpace.CYLINDER_H:
                point[1] = wrap_periodic_array(point[1], np.pi)
            times.append(elapsed + k * h if k < steps else elapsed + segment.duration)
            rows.append(point.copy())
        elapsed += segment.duration
    return ChartTrajectory(projected.space, np.array(times), np.array(rows))
