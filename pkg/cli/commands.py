"""
This module implements the command-line verbs `decide`,
`simulate`, `reachable` and `selftest`.

Records go to standard output one JSON document per line.
Exit codes: 0 ok, 1 failed self-test, 2 parse error,
3 semantic error, 4 numeric error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Optional, Sequence
from components.verdict import decide
from configs.system_config import load_config, load_controls
from helpers.types import ConfigError, Direction, GridSpec, LieControlError, \
    NonFiniteTrajectory
from simulation.constants import CSV_FLOAT_FORMAT, DEFAULT_DT, DEFAULT_HORIZON, DEFAULT_REACH_DT, \
    DEFAULT_SEED, DEFAULT_TRAJECTORIES, DEFAULT_U_BOUND, DEFAULT_WORKERS, EXIT_NUMERIC_ERROR, \
    EXIT_OK, EXIT_PARSE_ERROR, EXIT_SELFTEST_FAILED, EXIT_SEMANTIC_ERROR
from simulation.control import ControlSegment, ControlSignal
from simulation.monitor import validate_certificate
from simulation.reachability import DEFAULT_GRID, ReachParams, reachable_sample
from simulation.results import ResultsManager, verdict_record
from simulation.selftest import run_selftest
from simulation.simulator import integrate

logger = logging.getLogger(__name__)


def _emit(record: Any) -> None:
    """
    Writes `record` as one line of JSON.
    """
    sys.stdout.write(json.dumps(record) + "\n")


def cmd_decide(args: argparse.Namespace) -> int:
    manager = ResultsManager()
    for path in args.configs:
        config = load_config(path)
        system = config.build()
        verdict = decide(system)
        _emit(verdict_record(config.to_dict(), verdict))
        manager.add_verdict(path, system.group.name, verdict)
    if args.table:
        for written in manager.save_csv(args.table):
            logger.info("Wrote %s", written)
    return EXIT_OK


def _fit_signal(signal: ControlSignal, horizon: Optional[float]) -> ControlSignal:
    """
    Truncates the signal to `horizon`, or holds its last value up to it.
    """
    if horizon is None:
        return signal
    if horizon <= signal.duration:
        return signal.truncated(horizon)
    tail = ControlSegment(horizon - signal.duration, signal.segments[-1].u)
    return ControlSignal(signal.segments + (tail,))


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    system = config.build()
    signal, start = load_controls(args.controls, system.group)
    signal = _fit_signal(signal, args.horizon)
    if signal.control_count != system.control_count:
        raise ConfigError(f"{args.controls}: {signal.control_count} control values per "
                          f"segment, the system has {system.control_count} controls")
    status = EXIT_OK
    try:
        trajectory = integrate(system, signal, start, dt=args.dt)
    except NonFiniteTrajectory as exc:
        logger.error("%s", exc)
        trajectory = exc.trajectory
        status = EXIT_NUMERIC_ERROR
    summary = (f"steps={trajectory.steps} final=({trajectory.points[-1, 0]!r}, "
               f"{trajectory.points[-1, 1]!r}, {trajectory.points[-1, 2]!r})")
    if args.output:
        trajectory.save_csv(args.output)
        print(summary)
    else:
        trajectory.to_dataframe().to_csv(sys.stdout, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.info("%s", summary)
    return status


def cmd_reachable(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    system = config.build()
    try:
        grid = GridSpec.parse(args.grid) if args.grid else DEFAULT_GRID
    except (AssertionError, ValueError) as exc:
        raise ConfigError(f"--grid: {exc}") from exc
    params = ReachParams(count=args.trajectories,
                         horizon=args.horizon,
                         u_bound=args.u_bound,
                         seed=args.seed,
                         grid=grid,
                         direction=Direction(args.direction),
                         dt=args.dt,
                         workers=args.workers,
                         keep_points=args.points is not None)
    sample = reachable_sample(system, params)
    verdict = decide(system)
    report = sample.to_dict()
    report["verdict"] = {"controllable": verdict.controllable, "clause": verdict.clause}
    if verdict.certificate is not None:
        report["verdict"]["certificate"] = verdict.certificate.kind.value
        report["max_violation"] = validate_certificate(
            system, verdict.certificate, args.trajectories, horizon=args.horizon,
            seed=args.seed, dt=args.dt, u_bound=args.u_bound, workers=args.workers)
    if args.points is not None:
        sample.points_dataframe().to_csv(args.points, index=False, float_format=CSV_FLOAT_FORMAT)
    if args.table:
        manager = ResultsManager()
        manager.add_reach(args.config, sample)
        for written in manager.save_csv(args.table):
            logger.info("Wrote %s", written)
    _emit(report)
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    cases = {"kernels": 100, "flow": 50, "integrator": 5, "larc": 50} if args.quick else None
    results = run_selftest(seed=args.seed, cases=cases)
    for result in results:
        print(f"{result.name}: {result.passed}/{result.total} passed")
        for failure in result.failures[:10]:
            print(f"  FAIL {failure}")
    return EXIT_OK if all(result.ok for result in results) else EXIT_SELFTEST_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m cli",
        description="Controllability of linear systems on three-dimensional solvable Lie groups")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Log errors only.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    decide_parser = subparsers.add_parser("decide", help="Decide controllability of systems.")
    decide_parser.add_argument("configs", nargs="+", help="System config JSON files.")
    decide_parser.add_argument("--table", help="Folder for a CSV summary of the verdicts.")
    decide_parser.set_defaults(handler=cmd_decide)

    simulate_parser = subparsers.add_parser("simulate", help="Integrate a control signal.")
    simulate_parser.add_argument("config", help="System config JSON file.")
    simulate_parser.add_argument("controls", help="Controls JSON file.")
    simulate_parser.add_argument("--dt", type=float, default=DEFAULT_DT, help="Step size.")
    simulate_parser.add_argument("-T", dest="horizon", type=float, default=None,
                                 help="Horizon; the last control value is held if needed.")
    simulate_parser.add_argument("-o", "--output", help="Trajectory CSV file.")
    simulate_parser.set_defaults(handler=cmd_simulate)

    reach_parser = subparsers.add_parser("reachable", help="Sample the reachable set.")
    reach_parser.add_argument("config", help="System config JSON file.")
    reach_parser.add_argument("-n", dest="trajectories", type=int, default=DEFAULT_TRAJECTORIES,
                              help="Number of trajectories.")
    reach_parser.add_argument("-T", dest="horizon", type=float, default=DEFAULT_HORIZON,
                              help="Horizon of each trajectory.")
    reach_parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Root seed.")
    reach_parser.add_argument("--grid", help="Grid as 'lower:upper:cells', per axis with commas.")
    reach_parser.add_argument("--direction", choices=[d.value for d in Direction],
                              default=Direction.FORWARD.value, help="Time direction.")
    reach_parser.add_argument("--u-bound", type=float, default=DEFAULT_U_BOUND,
                              help="Bang-bang control level.")
    reach_parser.add_argument("--dt", type=float, default=DEFAULT_REACH_DT, help="Step size.")
    reach_parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS,
                              help="Threads integrating chunks of trajectories.")
    reach_parser.add_argument("--points", help="CSV file for the trajectory endpoints.")
    reach_parser.add_argument("--table", help="Folder for a CSV summary of the sample.")
    reach_parser.set_defaults(handler=cmd_reachable)

    selftest_parser = subparsers.add_parser("selftest", help="Run the invariant suites.")
    selftest_parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Root seed.")
    selftest_parser.add_argument("--quick", action="store_true", help="Run fewer cases.")
    selftest_parser.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]]=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except NonFiniteTrajectory as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR
    except LieControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC_ERROR
