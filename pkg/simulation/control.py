"""
This module contains the piecewise-constant control signals
driving a linear system, and the random bang-bang generator
used for reachable set sampling.
"""

from dataclasses import dataclass
from math import ceil
from typing import Any, Iterable
import numpy as np
from helpers.functions import assert_type, assert_type_and_range
from simulation.constants import DEFAULT_U_BOUND, MEAN_SWITCHING_TIME


@dataclass(frozen=True)
class ControlSegment():
    """
    Control values `u` held constant for `duration`.
    """
    duration: float
    u: tuple[float, ...]

    def __post_init__(self):
        assert_type_and_range(self.duration,
                              more_than=0.0,
                              include_more=False)
        values = tuple(float(value) for value in np.atleast_1d(self.u))
        assert len(values) > 0
        assert_type_and_range(*values)
        object.__setattr__(self, "duration", float(self.duration))
        object.__setattr__(self, "u", values)

    @property
    def vec_u(self) -> np.ndarray:
        return np.array(self.u)


@dataclass(frozen=True)
class ControlSignal():
    """
    A sequence of control segments, all with the same control count.
    """
    segments: tuple[ControlSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        assert len(self.segments) > 0, "A control signal needs at least one segment"
        assert_type(*self.segments,
                    expected_type=ControlSegment)
        counts = {len(segment.u) for segment in self.segments}
        assert len(counts) == 1, f"Segments disagree on the control count: {sorted(counts)}"

    @property
    def control_count(self) -> int:
        return len(self.segments[0].u)

    @property
    def duration(self) -> float:
        return sum(segment.duration for segment in self.segments)

    def truncated(self, horizon: float) -> "ControlSignal":
        """
        The signal restricted to [0, horizon].
        """
        assert_type_and_range(horizon,
                              more_than=0.0,
                              include_more=False)
        kept, elapsed = [], 0.0
        for segment in self.segments:
            if elapsed >= horizon:
                break
            kept.append(ControlSegment(min(segment.duration, horizon - elapsed), segment.u))
            elapsed += segment.duration
        return ControlSignal(tuple(kept))

    def to_dict(self) -> dict[str, Any]:
        return {"segments": [{"duration": segment.duration, "u": list(segment.u)}
                             for segment in self.segments]}

    @staticmethod
    def from_dict(data: dict[str, Any]) -> "ControlSignal":
        return ControlSignal(tuple(ControlSegment(item["duration"], tuple(item["u"]))
                                   for item in data["segments"]))

    @staticmethod
    def constant(duration: float, u: Iterable[float]) -> "ControlSignal":
        return ControlSignal((ControlSegment(duration, tuple(u)),))

    @staticmethod
    def zero(duration: float, control_count: int) -> "ControlSignal":
        return ControlSignal.constant(duration, (0.0,) * control_count)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """
    Independent stream of trajectory `index` under root `seed`.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def bang_bang_steps(rng: np.random.Generator,
                    control_count: int,
                    steps: int,
                    dt: float,
                    u_bound: float=DEFAULT_U_BOUND,
                    mean_switching_time: float=MEAN_SWITCHING_TIME) -> tuple[np.ndarray, np.ndarray]:
    """
    Random bang-bang control over `steps` integration steps. Holding
    times are exponential with the given mean, rounded to whole steps
    (at least one). Returns the segment lengths in steps and the
    levels (±u_bound per control) of each segment.
    """
    lengths, levels, total = [], [], 0
    while total < steps:
        length = max(1, int(round(rng.exponential(mean_switching_time) / dt)))
        length = min(length, steps - total)
        lengths.append(length)
        levels.append(u_bound * rng.choice((-1.0, 1.0), size=control_count))
        total += length
    return np.array(lengths, dtype=int), np.array(levels).reshape(-1, control_count)


def bang_bang_signal(rng: np.random.Generator,
                     control_count: int,
                     horizon: float,
                     dt: float,
                     u_bound: float=DEFAULT_U_BOUND,
                     mean_switching_time: float=MEAN_SWITCHING_TIME) -> ControlSignal:
    """
    The `bang_bang_steps` law as a ControlSignal with durations on the dt grid.
    """
    steps = int(ceil(horizon / dt - 1e-9))
    lengths, levels = bang_bang_steps(rng, control_count, steps, dt, u_bound,
                                      mean_switching_time)
    return ControlSignal(tuple(ControlSegment(length * dt, tuple(level))
                               for length, level in zip(lengths, levels)))
