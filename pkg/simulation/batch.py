"""
This module contains a vectorized RK4 integrator running many
bang-bang trajectories of one system side by side.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
from typing import Callable, Optional, Protocol, TypeVar
import numpy as np
from components.linear_system import LinearSystem
from helpers.functions import assert_type, assert_type_and_range
from helpers.types import Direction
from simulation.constants import BLOW_UP_BOUND, DEFAULT_CHUNK_SIZE, DEFAULT_DT, \
    DEFAULT_RECORD_STRIDE, DEFAULT_U_BOUND, DEFAULT_WORKERS, MEAN_SWITCHING_TIME
from simulation.control import bang_bang_steps, trajectory_rng
from simulation.simulator import FieldModel, canonicalize_states, rk4_step, segment_steps

logger = logging.getLogger(__name__)


class StepObserver(Protocol):
    """
    Receives the states (C, 3) of a chunk at every recorded step;
    `alive` masks out trajectories that left the blow-up bound.
    """
    def observe(self, step: int, states: np.ndarray, alive: np.ndarray) -> None:
        ...


ObserverT = TypeVar("ObserverT", bound=StepObserver)


@dataclass
class BatchIntegrator():
    """
    Integrates trajectories with independent random bang-bang controls.
    Trajectory `i` draws its control from the stream `(seed, i)`, so
    results do not depend on chunking or on the number of workers.
    """
    system: LinearSystem
    horizon: float
    dt: float=DEFAULT_DT
    u_bound: float=DEFAULT_U_BOUND
    mean_switching_time: float=MEAN_SWITCHING_TIME
    direction: Direction=Direction.FORWARD
    record_stride: int=DEFAULT_RECORD_STRIDE
    chunk_size: int=DEFAULT_CHUNK_SIZE
    workers: int=DEFAULT_WORKERS

    def __post_init__(self):
        assert_type(self.system,
                    expected_type=LinearSystem)
        assert_type_and_range(self.horizon, self.dt, self.u_bound, self.mean_switching_time,
                              more_than=0.0,
                              include_more=False)
        assert_type(self.direction,
                    expected_type=Direction)
        assert_type(self.record_stride, self.chunk_size, self.workers,
                    expected_type=int)
        assert self.record_stride >= 1 and self.chunk_size >= 1 and self.workers >= 1
        self.model = FieldModel(self.system, time_sign=self.direction.time_sign)
        self.steps = segment_steps(self.horizon, self.dt)
        self.step = self.horizon / self.steps

    def _controls(self, seed: int, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Padded segment ends (C, K) in steps and levels (C, K, m).
        """
        m = self.system.control_count
        drawn = [bang_bang_steps(trajectory_rng(seed, int(index)), m, self.steps, self.step,
                                 self.u_bound, self.mean_switching_time)
                 for index in indices]
        width = max(lengths.shape[0] for lengths, _ in drawn)
        ends = np.full((len(drawn), width), self.steps + 1, dtype=int)
        levels = np.zeros((len(drawn), width, m))
        for row, (lengths, values) in enumerate(drawn):
            ends[row, :lengths.shape[0]] = np.cumsum(lengths)
            levels[row, :lengths.shape[0]] = values
        return ends, levels

    def run_chunk(self, seed: int, indices: np.ndarray, starts: np.ndarray,
                  observer: StepObserver) -> tuple[np.ndarray, np.ndarray]:
        """
        Integrates the trajectories `indices` from `starts` (C, 3).
        Returns the final states and the mask of bounded trajectories.
        """
        ends, levels = self._controls(seed, indices)
        rows = np.arange(len(indices))
        pointer = np.zeros(len(indices), dtype=int)
        states = canonicalize_states(self.system.group, np.array(starts, dtype=float))
        alive = np.ones(len(indices), dtype=bool)
        observer.observe(0, states, alive)
        for k in range(1, self.steps + 1):
            u = levels[rows, pointer]
            stepped = canonicalize_states(self.system.group,
                                          rk4_step(self.model, states, u, self.step))
            with np.errstate(invalid="ignore"):
                bad = ~np.all(np.isfinite(stepped), axis=1) | (
                    np.max(np.abs(stepped), axis=1) > BLOW_UP_BOUND)
            if np.any(bad & alive):
                logger.warning("%d trajectories left the bound %.0e at step %d",
                               int(np.sum(bad & alive)), BLOW_UP_BOUND, k)
            alive &= ~bad
            states = np.where(alive[:, None], stepped, states)
            pointer += ends[rows, pointer] <= k
            if k % self.record_stride == 0 or k == self.steps:
                observer.observe(k, states, alive)
        return states, alive

    def run(self, seed: int, count: int,
            make_observer: Callable[[], ObserverT],
            starts: Optional[np.ndarray]=None) -> tuple[list[ObserverT], np.ndarray, np.ndarray]:
        """
        Runs `count` trajectories in chunks. Trajectory `i` starts from
        `starts[i % len(starts)]` (identity by default). Returns one
        observer per chunk in chunk order, the final states and the
        bounded-trajectory mask.
        """
        assert_type(seed, count,
                    expected_type=int)
        assert count >= 0
        if starts is None:
            starts = np.zeros((1, 3))
        starts = np.atleast_2d(np.asarray(starts, dtype=float))
        assert starts.shape[1] == 3 and starts.shape[0] > 0
        chunks = [np.arange(begin, min(begin + self.chunk_size, count))
                  for begin in range(0, count, self.chunk_size)]
        def work(indices: np.ndarray) -> tuple[ObserverT, np.ndarray, np.ndarray]:
            observer = make_observer()
            final, alive = self.run_chunk(seed, indices, starts[indices % starts.shape[0]],
                                          observer)
            return observer, final, alive
        if self.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(work, chunks))
        else:
            results = [work(indices) for indices in chunks]
        logger.debug("Integrated %d trajectories in %d chunks", count, len(chunks))
        if not results:
            return [], np.zeros((0, 3)), np.zeros(0, dtype=bool)
        return ([observer for observer, _, _ in results],
                np.concatenate([final for _, final, _ in results]),
                np.concatenate([alive for _, _, alive in results]))
