"""This module contains test routines for the invariant suites run by `selftest`."""

import numpy as np
import components.kernels as kernels
from components.group_class import GroupClass
from helpers.types import GroupKind
from simulation.selftest import SUITES, SuiteResult, run_selftest, series_rho

small_cases: dict[str, int] = {"kernels": 40, "flow": 20, "integrator": 2, "larc": 20, "theorems": 1}

def test_suites_pass() -> None:
    results = run_selftest(seed=1, cases=small_cases)
    assert [result.name for result in results] == list(SUITES)
    for result in results:
        assert result.ok, (result.name, result.failures[:3])
        assert result.total > 0

def test_suites_are_reproducible() -> None:
    first = run_selftest(seed=4, cases=small_cases)
    second = run_selftest(seed=4, cases=small_cases)
    assert [(result.name, result.total) for result in first] == \
        [(result.name, result.total) for result in second]

def test_broken_kernel_is_detected(monkeypatch) -> None:
    monkeypatch.setattr(kernels, "lambda_matrix",
                        lambda group, s: np.zeros(np.shape(s) + (2, 2)))
    (result, *_) = run_selftest(seed=1, cases=small_cases)
    assert result.name == "kernels"
    assert not result.ok
    assert result.passed < result.total

def test_series_rho() -> None:
    group = GroupClass(GroupKind.R3_PRIME_LAMBDA, lambda_=0.5)
    for s in (-4.0, 0.0, 2.5):
        expected = np.exp(0.5 * s) * np.array([[np.cos(s), -np.sin(s)], [np.sin(s), np.cos(s)]])
        assert np.allclose(series_rho(group, s), expected, rtol=1e-12, atol=1e-14)

def test_suite_result_counts() -> None:
    result = SuiteResult("demo")
    assert not result.ok
    result.check(True, "first")
    result.check(False, "second")
    assert result.passed == 1 and result.total == 2
    assert result.failures == ["second"]
