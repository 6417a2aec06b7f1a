"""
Helper functions for use in the project.
"""

from math import ceil, isfinite
from typing import Any, Iterable
import numpy as np
from simulation.constants import RANK_TOLERANCE

def sign(val: float) -> int:
    """
    Returns +1 for non-negative values and -1 otherwise.
    """
    return 1 if val >= 0.0 else -1

def wrap_periodic(val: float, half_period: float) -> float:
    """
    Maps `val` to its representative in (-half_period, half_period].
    """
    assert_type_and_range(half_period,
                          more_than=0.0,
                          include_more=False)
    period = 2 * half_period
    return val - period * ceil((val - half_period) / period)

def wrap_periodic_array(vals: np.ndarray, half_period: float) -> np.ndarray:
    """
    Vectorized version of `wrap_periodic`.
    """
    period = 2 * half_period
    return vals - period * np.ceil((vals - half_period) / period)

# LINEAR ALGEBRA

def as_vector(values: Iterable[float], length: int=2) -> np.ndarray:
    """
    Converts `values` to a finite float vector of the given length.
    """
    vec = np.asarray(values, dtype=float).reshape(-1)
    assert vec.shape == (length,), (
        f"Expected a vector of length {length}, got shape {vec.shape}")
    assert np.all(np.isfinite(vec)), f"Vector {vec} has non-finite entries"
    return vec

def as_matrix(values: Any) -> np.ndarray:
    """
    Converts `values` to a finite 2x2 float matrix.
    """
    mat = np.asarray(values, dtype=float)
    assert mat.shape == (2, 2), f"Expected a 2x2 matrix, got shape {mat.shape}"
    assert np.all(np.isfinite(mat)), f"Matrix {mat} has non-finite entries"
    return mat

def numerical_rank(rows: np.ndarray,
                   tolerance: float=RANK_TOLERANCE) -> int:
    """
    Rank by singular values relative to the largest one.
    """
    rows = np.atleast_2d(rows)
    if rows.size == 0:
        return 0
    singular = np.linalg.svd(rows, compute_uv=False)
    if singular[0] == 0.0:
        return 0
    return int(np.sum(singular > tolerance * singular[0]))

def span_basis(rows: np.ndarray,
               tolerance: float=RANK_TOLERANCE) -> np.ndarray:
    """
    Returns an orthonormal basis (as rows) of the span of `rows`.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        return np.zeros((0, rows.shape[-1]))
    _, singular, v_t = np.linalg.svd(rows, full_matrices=False)
    if singular[0] == 0.0:
        return np.zeros((0, rows.shape[1]))
    keep = singular > tolerance * singular[0]
    return v_t[keep]

def in_span(vector: np.ndarray, basis: np.ndarray,
            tolerance: float=RANK_TOLERANCE) -> bool:
    """
    Checks whether `vector` lies in the span of the orthonormal rows of `basis`.
    """
    scale = max(1.0, float(np.linalg.norm(vector)))
    if basis.shape[0] == 0:
        return bool(np.linalg.norm(vector) <= tolerance * scale)
    residual = vector - basis.T @ (basis @ vector)
    return bool(np.linalg.norm(residual) <= tolerance * scale * 100)

def perpendicular(vector: np.ndarray) -> np.ndarray:
    """
    Returns (w2, -w1), the clockwise perpendicular of `vector`.
    """
    return np.array([vector[1], -vector[0]], dtype=float)

# VERIFICATIONS

def assert_callable(*args: Any,
                    allow_none: bool=False) -> None:
    """
    Asserts that all the arguments in *args are of type Callable.
    """
    assert isinstance(allow_none, bool)
    for arg in args:
        is_callable = callable(arg)
        is_none_allowed = allow_none and (arg is None)
        assert is_callable or is_none_allowed, (
            f"Variable {arg}: Expected callable" +
            (" or None" if allow_none else "") +
            f", got {type(arg).__name__}")

def assert_type(*args: Any,
                expected_type: type|tuple[type, ...],
                allow_none: bool=False) -> None:
    """
    Asserts that all the arguments in *args are of the expected types.
    """
    assert isinstance(expected_type, (type, tuple))
    assert isinstance(allow_none, bool)
    for arg in args:
        is_expected_type = isinstance(arg, expected_type)  # type: ignore[arg-type]
        is_none_allowed = allow_none and (arg is None)
        assert is_expected_type or is_none_allowed, (
            f"Variable {arg}: Expected {expected_type}" +
            (" or None" if allow_none else "") +
            f", got {type(arg).__name__}")

def assert_range(*args: Any,
                 more_than: float=float("-inf"),
                 less_than: float=float("inf"),
                 include_more: bool=True,
                 include_less: bool=True,
                 allow_none: bool=False) -> None:
    """
    Asserts if the arguments in *args are numeric and fall
    between the range of [`more_than`, `less_than`].
    The `include_more` and `include_less` control if the limits are
    included in the comparison.
    """
    assert_numeric(more_than, less_than)
    assert_type(include_more, include_less,
                expected_type=bool)
    for arg in args:
        assert_numeric(arg,
                       allow_none=allow_none)
        if arg is None:
            continue
        assert more_than <= arg if include_more else more_than < arg, (
            f"Variable {arg}: Expected more than {more_than}")
        assert arg <= less_than if include_less else arg < less_than, (
            f"Variable {arg}: Expected less than {less_than}")

def assert_type_and_range(*args: Any,
                          more_than: float=float("-inf"),
                          less_than: float=float("inf"),
                          include_more: bool=True,
                          include_less: bool=True,
                          allow_none: bool=False) -> None:
    """
    Verifies the input arguments are numeric (float or int) and
    checks that they span the selected range of values.
    Combines both assertions of type and range into a single check.
    """
    for arg in args:
        assert_numeric(arg,
                       allow_none=allow_none)
        if arg is not None:
            assert_range(arg,
                         more_than=more_than,
                         less_than=less_than,
                         include_more=include_more,
                         include_less=include_less)

def assert_numeric(*args: Any,
                   allow_none: bool=False) -> None:
    """
    Asserts if the arguments are finite numbers (`float`, `int`
    or numpy floating scalars). Booleans are rejected.
    """
    for arg in args:
        if allow_none and arg is None:
            continue
        assert not isinstance(arg, bool), f"Variable {arg}: Expected a number, got bool"
        assert_type(arg,
                    expected_type=(float, int, np.floating, np.integer))
        assert isfinite(arg) or abs(arg) == float("inf"), f"Variable {arg} is NaN"
