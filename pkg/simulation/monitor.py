"""
This module contains the empirical validation of barrier
certificates along simulated trajectories.

Barrier kinds are monitored as the largest exit depth from the
certified region once a trajectory has entered it; monotone kinds
as the largest drop of the signed functional below its running maximum.
"""

import logging
from typing import Iterable, Optional
import numpy as np
from components.algebra import GroupElement
from components.certificate import BarrierCertificate
from components.linear_system import LinearSystem
from components.projection import ProjectedSystem
from helpers.functions import assert_type
from helpers.types import RegimeMismatch
from simulation.batch import BatchIntegrator
from simulation.constants import DEFAULT_CHUNK_SIZE, DEFAULT_DT, DEFAULT_HORIZON, \
    DEFAULT_SEED, DEFAULT_U_BOUND, DEFAULT_WORKERS
from simulation.simulator import Trajectory

logger = logging.getLogger(__name__)


def _check_regime(certificate: BarrierCertificate,
                  projected: Optional[ProjectedSystem],
                  group_name: str) -> None:
    if projected is not None and projected.space is not certificate.space:
        raise RegimeMismatch(f"Certificate lives on {certificate.space.value}, "
                             f"projection on {projected.space.value}")
    if certificate.projection.system.group.name != group_name:
        raise RegimeMismatch(f"Certificate built for {certificate.projection.system.group.name}, "
                             f"trajectory on {group_name}")


def chart_points(certificate: BarrierCertificate, states: np.ndarray) -> np.ndarray:
    return certificate.projection.project(states[..., 0], states[..., 1:])


def monitor_barrier(trajectory: Trajectory,
                    certificate: BarrierCertificate,
                    projected: Optional[ProjectedSystem]=None) -> float:
    """
    Largest violation of `certificate` along `trajectory` (0 when none).
    """
    assert_type(trajectory,
                expected_type=Trajectory)
    _check_regime(certificate, projected, trajectory.group.name)
    points = chart_points(certificate, trajectory.points)
    if certificate.kind.is_monotone:
        signed = certificate.direction * certificate.functional(points)
        return float(max(0.0, np.max(np.maximum.accumulate(signed) - signed)))
    margin = certificate.evaluate(points)
    entered = np.flatnonzero(margin >= 0.0)
    if entered.size == 0:
        return 0.0
    return float(max(0.0, np.max(-margin[entered[0]:])))


class BarrierMonitor():
    """
    Streaming form of `monitor_barrier` over a chunk of trajectories.
    """
    def __init__(self, certificate: BarrierCertificate) -> None:
        self.certificate = certificate
        self.reference: Optional[np.ndarray] = None
        self.entered: Optional[np.ndarray] = None
        self.violation = 0.0

    def observe(self, step: int, states: np.ndarray, alive: np.ndarray) -> None:
        points = chart_points(self.certificate, states)
        if self.certificate.kind.is_monotone:
            signed = self.certificate.direction * self.certificate.functional(points)
            if self.reference is None:
                self.reference = signed.copy()
            self.reference = np.maximum(self.reference, signed)
            drops = (self.reference - signed)[alive]
        else:
            margin = self.certificate.evaluate(points)
            if self.entered is None:
                self.entered = np.zeros(margin.shape, dtype=bool)
            self.entered |= margin >= 0.0
            drops = -margin[alive & self.entered]
        if drops.size:
            self.violation = max(self.violation, float(np.max(drops)))


def validate_certificate(system: LinearSystem,
                         certificate: BarrierCertificate,
                         count: int,
                         horizon: float=DEFAULT_HORIZON,
                         seed: int=DEFAULT_SEED,
                         dt: float=DEFAULT_DT,
                         starts: Optional[Iterable[GroupElement]]=None,
                         u_bound: float=DEFAULT_U_BOUND,
                         chunk_size: int=DEFAULT_CHUNK_SIZE,
                         workers: int=DEFAULT_WORKERS) -> float:
    """
    Runs `count` bang-bang trajectories of `system` (cycling over
    `starts`, identity by default) and returns the largest monitored
    violation of `certificate`.
    """
    _check_regime(certificate, None, system.group.name)
    start_rows = None
    if starts is not None:
        start_rows = np.array([start.vector for start in starts])
    integrator = BatchIntegrator(system, horizon,
                                 dt=dt,
                                 u_bound=u_bound,
                                 chunk_size=chunk_size,
                                 workers=workers)
    monitors, _, alive = integrator.run(seed, count, lambda: BarrierMonitor(certificate),
                                        starts=start_rows)
    violation = max((monitor.violation for monitor in monitors), default=0.0)
    logger.info("%s: max violation %.3g over %d trajectories (%d blown up)",
                certificate.kind.value, violation, count, int(np.sum(~alive)))
    return violation
