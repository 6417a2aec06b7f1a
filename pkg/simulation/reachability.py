"""
This module contains the randomized sampling of reachable sets
from the identity and the grid occupancy measure built on it.
"""

from dataclasses import dataclass, field
import logging
from typing import Any, Optional
import numpy as np
import pandas as pd
from components.linear_system import LinearSystem
from helpers.functions import assert_type, assert_type_and_range
from helpers.types import Direction, GridSpec
from simulation.batch import BatchIntegrator
from simulation.constants import DEFAULT_CHUNK_SIZE, DEFAULT_GRID_LOWER, \
    DEFAULT_GRID_RESOLUTION, DEFAULT_GRID_UPPER, DEFAULT_HORIZON, DEFAULT_REACH_DT, \
    DEFAULT_RECORD_STRIDE, DEFAULT_SEED, DEFAULT_TRAJECTORIES, DEFAULT_U_BOUND, \
    DEFAULT_WORKERS, MEAN_SWITCHING_TIME

logger = logging.getLogger(__name__)

DEFAULT_GRID: GridSpec = GridSpec(DEFAULT_GRID_LOWER, DEFAULT_GRID_UPPER, DEFAULT_GRID_RESOLUTION)


class OccupancyGrid():
    """
    Marks the grid cells visited by (τ, v1, v2) points.
    """
    def __init__(self, grid: GridSpec) -> None:
        self.grid = grid
        self.lower = np.array(grid.lower)
        self.upper = np.array(grid.upper)
        self.resolution = np.array(grid.resolution)
        self.visited = np.zeros(grid.cell_count, dtype=bool)

    def cell_indices(self, points: np.ndarray) -> np.ndarray:
        """
        Flat indices of the cells holding `points` (n, 3); points
        outside the box are dropped.
        """
        points = np.atleast_2d(points)
        inside = np.all((points >= self.lower) & (points <= self.upper), axis=1)
        scaled = (points[inside] - self.lower) / (self.upper - self.lower) * self.resolution
        cells = np.minimum(scaled.astype(int), self.resolution - 1)
        return np.ravel_multi_index(cells.T, tuple(self.resolution))

    def mark(self, points: np.ndarray) -> None:
        self.visited[self.cell_indices(points)] = True

    def observe(self, step: int, states: np.ndarray, alive: np.ndarray) -> None:
        self.mark(states[alive])

    def merge(self, other: "OccupancyGrid") -> None:
        self.visited |= other.visited

    @property
    def occupancy(self) -> float:
        return float(np.mean(self.visited))


@dataclass(frozen=True)
class ReachParams():
    """
    Sampling parameters of `reachable_sample`.
    """
    count: int=DEFAULT_TRAJECTORIES
    horizon: float=DEFAULT_HORIZON
    u_bound: float=DEFAULT_U_BOUND
    seed: int=DEFAULT_SEED
    grid: GridSpec=DEFAULT_GRID
    direction: Direction=Direction.FORWARD
    dt: float=DEFAULT_REACH_DT
    mean_switching_time: float=MEAN_SWITCHING_TIME
    record_stride: int=DEFAULT_RECORD_STRIDE
    chunk_size: int=DEFAULT_CHUNK_SIZE
    workers: int=DEFAULT_WORKERS
    keep_points: bool=False

    def __post_init__(self):
        assert_type(self.count, self.seed,
                    expected_type=int)
        assert self.count >= 0
        assert_type_and_range(self.horizon, self.u_bound, self.dt,
                              more_than=0.0,
                              include_more=False)
        assert_type(self.grid,
                    expected_type=GridSpec)
        assert_type(self.direction,
                    expected_type=Direction)


@dataclass(frozen=True, eq=False)
class ReachSample():
    """
    Occupancy of the grid by the sampled trajectories. `points`
    holds the endpoints when requested.
    """
    seed: int
    horizon: float
    count: int
    grid: GridSpec
    direction: Direction
    occupancy: float
    visited_cells: int
    blown_up: int=0
    points: Optional[np.ndarray]=field(default=None, repr=False)

    def __post_init__(self):
        assert_type_and_range(self.occupancy,
                              more_than=0.0,
                              less_than=1.0)

    def to_dict(self) -> dict[str, Any]:
        return {"seed": self.seed,
                "horizon": self.horizon,
                "trajectories": self.count,
                "grid": self.grid.to_dict(),
                "direction": self.direction.value,
                "occupancy": self.occupancy,
                "visited_cells": self.visited_cells,
                "cells": self.grid.cell_count,
                "blown_up": self.blown_up}

    def points_dataframe(self) -> pd.DataFrame:
        assert self.points is not None, "Endpoints were not kept"
        return pd.DataFrame(self.points, columns=["tau", "v1", "v2"])


def reachable_sample(system: LinearSystem, params: ReachParams=ReachParams()) -> ReachSample:
    """
    Samples `params.count` bang-bang trajectories from the identity and
    measures the fraction of grid cells visited by their path points.
    The backward direction integrates the time-reversed field.
    """
    assert_type(params,
                expected_type=ReachParams)
    integrator = BatchIntegrator(system, params.horizon,
                                 dt=params.dt,
                                 u_bound=params.u_bound,
                                 mean_switching_time=params.mean_switching_time,
                                 direction=params.direction,
                                 record_stride=params.record_stride,
                                 chunk_size=params.chunk_size,
                                 workers=params.workers)
    grid = OccupancyGrid(params.grid)
    grid.mark(np.zeros((1, 3)))
    observers, final, alive = integrator.run(params.seed, params.count,
                                             lambda: OccupancyGrid(params.grid))
    for observer in observers:
        grid.merge(observer)
    blown_up = int(np.sum(~alive))
    logger.info("Occupancy %.4f over %d cells from %d trajectories (%d blown up)",
                grid.occupancy, params.grid.cell_count, params.count, blown_up)
    return ReachSample(seed=params.seed,
                       horizon=params.horizon,
                       count=params.count,
                       grid=params.grid,
                       direction=params.direction,
                       occupancy=grid.occupancy,
                       visited_cells=int(np.sum(grid.visited)),
                       blown_up=blown_up,
                       points=final if params.keep_points else None)
