"""
This module contains the invariant suites run by `selftest`.
Every suite draws random cases from a seeded generator and checks
closed-form identities of the kernels, the flow and the integrator.
"""

from dataclasses import dataclass, field
import logging
from math import ceil, log2
from typing import Callable
import numpy as np
import components.kernels as kernels
from components.algebra import AlgebraElement, GroupElement, exp_map, group_mul
from components.derivation import Derivation, derivation_exp, derivation_matrix, make_derivation
from components.group_class import GroupClass, theta_of
from components.linear_system import LinearSystem, larc
from components.verdict import decide
from helpers.types import GroupKind
from simulation.constants import DEFAULT_SEED
from simulation.control import ControlSignal
from simulation.simulator import integrate, linear_flow

logger = logging.getLogger(__name__)

SERIES_TERMS: int = 30


@dataclass
class SuiteResult():
    """
    Outcome of one invariant suite.
    """
    name: str
    total: int=0
    failures: list[str]=field(default_factory=list)

    @property
    def passed(self) -> int:
        return self.total - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures and self.total > 0

    def check(self, condition: bool, message: str) -> None:
        self.total += 1
        if not condition:
            self.failures.append(message)

# RANDOM CASES

def random_group(rng: np.random.Generator, kind: GroupKind|None=None) -> GroupClass:
    kind = kind if kind is not None else list(GroupKind)[rng.integers(len(GroupKind))]
    if kind is GroupKind.R3_LAMBDA:
        lambda_ = 1.0 if rng.random() < 0.2 else float(rng.choice((-1.0, 1.0)) * rng.uniform(0.1, 1.0))
        return GroupClass(kind, lambda_=lambda_)
    if kind is GroupKind.R3_PRIME_LAMBDA:
        return GroupClass(kind, lambda_=float(rng.choice((-1.0, 1.0)) * rng.uniform(0.1, 1.0)))
    if kind is GroupKind.E_N:
        return GroupClass(kind, n=int(rng.integers(1, 4)))
    return GroupClass(kind)


def random_dstar(rng: np.random.Generator, group: GroupClass) -> np.ndarray:
    """
    A random D* commuting with θ; on R2 it also fixes the torus lattice.
    """
    a, b, c, d = rng.uniform(-1.0, 1.0, size=4)
    if group.kind is GroupKind.R2:
        return np.array([[0.0, 0.0], [0.0, d]])
    if group.in_r2_family:
        return np.array([[a, 0.0], [0.0, d]])
    if group.kind is GroupKind.R3:
        return np.array([[a, b], [0.0, a]])
    if group.kind is GroupKind.R3_LAMBDA:
        if group.is_unit_lambda:
            return np.array([[a, b], [c, d]])
        return np.array([[a, 0.0], [0.0, d]])
    return np.array([[a, -b], [b, a]])


def random_derivation(rng: np.random.Generator, group: GroupClass) -> Derivation:
    return make_derivation(group, random_dstar(rng, group), rng.uniform(-1.0, 1.0, size=2))


def random_point(rng: np.random.Generator, group: GroupClass, spread: float=2.0) -> GroupElement:
    return GroupElement.from_vector(group, rng.uniform(-spread, spread, size=3))


def _relative_error(first: np.ndarray, second: np.ndarray) -> float:
    return float(np.max(np.abs(first - second)) / max(1.0, float(np.max(np.abs(second)))))


def series_rho(group: GroupClass, s: float) -> np.ndarray:
    """
    e^{sθ} by the truncated Taylor series after scaling by 2^k,
    then squared k times.
    """
    scaled = s * theta_of(group)
    norm = float(np.max(np.sum(np.abs(scaled), axis=1)))
    squarings = max(0, int(ceil(log2(norm))) + 1) if norm > 0.0 else 0
    scaled = scaled / 2 ** squarings
    term, total = np.eye(2), np.eye(2)
    for k in range(1, SERIES_TERMS):
        term = term @ scaled / k
        total = total + term
    for _ in range(squarings):
        total = total @ total
    return total

# SUITES

def kernel_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    ρ_{t+s} = ρ_tρ_s, Λ_{t+s} = Λ_t + ρ_tΛ_s, ρ_t − I = θΛ_t,
    θΛ_t = Λ_tθ and ρ against its series, to 1e−10 relative.
    """
    result = SuiteResult("kernels")
    for _ in range(cases):
        group = random_group(rng)
        t, s = rng.uniform(-5.0, 5.0, size=2)
        theta = theta_of(group)
        rho_t, rho_s, rho_ts = (kernels.rho_matrix(group, x) for x in (t, s, t + s))
        lam_t, lam_s, lam_ts = (kernels.lambda_matrix(group, x) for x in (t, s, t + s))
        label = f"{group.name} t={t:.6g} s={s:.6g}"
        result.check(_relative_error(rho_t @ rho_s, rho_ts) <= 1e-10, f"rho group law, {label}")
        result.check(_relative_error(lam_t + rho_t @ lam_s, lam_ts) <= 1e-10, f"cocycle, {label}")
        result.check(_relative_error(np.eye(2) + theta @ lam_t, rho_t) <= 1e-10,
                     f"rho - I = theta Lambda, {label}")
        result.check(_relative_error(theta @ lam_t, lam_t @ theta) <= 1e-10,
                     f"theta commutes with Lambda, {label}")
        result.check(_relative_error(rho_t, series_rho(group, t)) <= 1e-12,
                     f"rho series, {label}")
    return result


def flow_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    φ_s(exp Y) = exp(e^{sD}Y), φ_s(gh) = φ_s(g)φ_s(h) and
    φ_{s1+s2} = φ_{s1}∘φ_{s2}, to 1e−9.
    """
    result = SuiteResult("flow")
    for _ in range(cases):
        group = random_group(rng)
        derivation = random_derivation(rng, group)
        s1, s2 = rng.uniform(-2.0, 2.0, size=2)
        y = AlgebraElement.from_vector(rng.uniform(-1.0, 1.0, size=3))
        g, h = random_point(rng, group), random_point(rng, group)
        label = f"{group.name} s={s1:.6g}"
        moved = AlgebraElement.from_vector(derivation_exp(derivation, s1) @ y.vector)
        result.check(linear_flow(derivation, s1, exp_map(group, y)).isclose(
            exp_map(group, moved)), f"flow of exp, {label}")
        result.check(linear_flow(derivation, s1, group_mul(g, h)).isclose(
            group_mul(linear_flow(derivation, s1, g), linear_flow(derivation, s1, h))),
            f"automorphism, {label}")
        result.check(linear_flow(derivation, s1 + s2, g).isclose(
            linear_flow(derivation, s1, linear_flow(derivation, s2, g))),
            f"one-parameter group, {label}")
    return result


def integrator_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    Uncontrolled RK4 at dt = 1e−3 against the closed-form flow at s = 1.
    """
    result = SuiteResult("integrator")
    for _ in range(cases):
        group = random_group(rng)
        derivation = random_derivation(rng, group)
        system = LinearSystem(group, derivation, (AlgebraElement(1.0, (0.0, 0.0)),))
        g0 = random_point(rng, group, spread=1.0)
        final = integrate(system, ControlSignal.zero(1.0, 1), g0, dt=1e-3).final
        result.check(final.isclose(linear_flow(derivation, 1.0, g0), tolerance=1e-8),
                     f"RK4 against flow, {group.name}")
    return result


def larc_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    LARC against a closure that adds brackets and derivatives
    one random candidate at a time.
    """
    result = SuiteResult("larc")
    for _ in range(cases):
        group = random_group(rng)
        derivation = random_derivation(rng, group)
        controls = rng.uniform(-1.0, 1.0, size=(int(rng.integers(1, 3)), 3))
        if rng.random() < 0.5:
            controls[:, 0] = 0.0
        if rng.random() < 0.3:
            controls[0] = [1.0, 0.0, 0.0]
        system = LinearSystem.from_arrays(group, derivation, controls)
        result.check(larc(system) == (randomized_closure_dim(rng, system) == 3),
                     f"LARC oracle, {group.name}")
    return result


def randomized_closure_dim(rng: np.random.Generator, system: LinearSystem) -> int:
    """
    Independent closure: random order of bracket and derivation
    candidates, each accepted when it raises the rank.
    """
    theta = theta_of(system.group)
    matrix = derivation_matrix(system.derivation)
    basis: list[np.ndarray] = []
    def rank_with(vector: np.ndarray) -> int:
        rows = np.array(basis + [vector])
        return int(np.linalg.matrix_rank(rows, tol=1e-10 * max(1.0, float(np.max(np.abs(rows))))))
    pending = [row for row in system.control_matrix]
    while pending:
        vector = pending.pop(int(rng.integers(len(pending))))
        if np.linalg.norm(vector) <= 1e-12 or rank_with(vector) == len(basis):
            continue
        basis.append(vector)
        for other in basis[:-1]:
            pending.append(vector[0] * np.concatenate([[0.0], theta @ other[1:]])
                           - other[0] * np.concatenate([[0.0], theta @ vector[1:]]))
        pending.append(matrix @ vector)
    return len(basis)


def theorem_suite(rng: np.random.Generator, cases: int) -> SuiteResult:
    """
    Verdicts of a few fixed systems with known answers.
    """
    result = SuiteResult("theorems")
    table = (
        (GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=2.0), [[1.0, -1.0], [1.0, 1.0]],
         [1.0, 0.0], True, "T1.R3Prime"),
        (GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=1.0), [[0.0, 0.0], [0.0, 0.0]],
         [1.0, 0.0], True, "T1.R3Prime"),
        (GroupClass(GroupKind.R3_LAMBDA, lambda_=0.5), [[1.0, 0.0], [0.0, -1.0]],
         [1.0, 1.0], False, "T1.R3Lambda"),
        (GroupClass(GroupKind.E_N, n=1), [[0.0, -1.0], [1.0, 0.0]], [1.0, 0.0], True, "T1.E"),
        (GroupClass(GroupKind.R2_TILDE), [[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0], False,
         "T1.R2Tilde"))
    for group, dstar, xi, expected, clause in table[:max(1, cases)]:
        system = LinearSystem(group, make_derivation(group, dstar, xi),
                              (AlgebraElement(1.0, (0.0, 0.0)),))
        verdict = decide(system)
        result.check(verdict.controllable == expected and verdict.clause == clause,
                     f"{group.name}: got {verdict.clause} controllable={verdict.controllable}")
    return result


SUITES: dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    "kernels": kernel_suite,
    "flow": flow_suite,
    "integrator": integrator_suite,
    "larc": larc_suite,
    "theorems": theorem_suite}

DEFAULT_CASES: dict[str, int] = {
    "kernels": 1_000,
    "flow": 500,
    "integrator": 20,
    "larc": 200,
    "theorems": 5}


def run_selftest(seed: int=DEFAULT_SEED,
                 cases: dict[str, int]|None=None) -> list[SuiteResult]:
    """
    Runs every suite and returns their results in a fixed order.
    """
    cases = {**DEFAULT_CASES, **(cases or {})}
    results = []
    for index, (name, suite) in enumerate(SUITES.items()):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        result = suite(rng, cases[name])
        logger.info("Suite %s: %d/%d passed", name, result.passed, result.total)
        results.append(result)
    return results
