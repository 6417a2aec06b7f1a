"""
This module contains the JSON schema of system and control
configuration files and their conversion to domain objects.

A system config reads:

    {"group": {"class": "R3Lambda", "lambda": 0.5},
     "derivation": {"dstar": [[1, 0], [0, -1]], "xi": [1, 1]},
     "controls": [[1, 0, 0]]}

A controls file reads:

    {"segments": [{"duration": 1.0, "u": [0.5]}], "start": [0, 0, 0]}
"""

from dataclasses import dataclass
import json
from typing import Any, Optional
from components.algebra import GroupElement
from components.derivation import make_derivation
from components.group_class import GroupClass
from components.linear_system import LinearSystem
from helpers.types import ConfigError, LieControlError, SemanticError
from simulation.control import ControlSignal

GROUP_KEYS: frozenset[str] = frozenset({"class", "lambda", "n"})
DERIVATION_KEYS: frozenset[str] = frozenset({"dstar", "xi"})
SYSTEM_KEYS: frozenset[str] = frozenset({"group", "derivation", "controls"})
CONTROLS_KEYS: frozenset[str] = frozenset({"segments", "start"})
SEGMENT_KEYS: frozenset[str] = frozenset({"duration", "u"})


def _check_keys(data: Any, allowed: frozenset[str], required: frozenset[str], path: str) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _numbers(value: Any, length: int, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(f"{path}: expected a list of {length} numbers, got {value!r}")
    return tuple(_number(item, f"{path}[{i}]") for i, item in enumerate(value))


@dataclass(frozen=True)
class SystemConfig():
    """
    Parsed system config. `build()` checks the domain constraints.
    """
    group_class: str
    lambda_: Optional[float]
    n: Optional[int]
    dstar: tuple[tuple[float, float], tuple[float, float]]
    xi: tuple[float, float]
    controls: tuple[tuple[float, float, float], ...]

    @staticmethod
    def from_dict(data: Any) -> "SystemConfig":
        _check_keys(data, SYSTEM_KEYS, SYSTEM_KEYS, "$")
        group = data["group"]
        _check_keys(group, GROUP_KEYS, frozenset({"class"}), "$.group")
        if not isinstance(group["class"], str):
            raise ConfigError(f"$.group.class: expected a string, got {group['class']!r}")
        lambda_ = _number(group["lambda"], "$.group.lambda") if "lambda" in group else None
        n = group.get("n")
        if n is not None and (isinstance(n, bool) or not isinstance(n, int)):
            raise ConfigError(f"$.group.n: expected an integer, got {n!r}")
        derivation = data["derivation"]
        _check_keys(derivation, DERIVATION_KEYS, DERIVATION_KEYS, "$.derivation")
        dstar = derivation["dstar"]
        if not isinstance(dstar, list) or len(dstar) != 2:
            raise ConfigError(f"$.derivation.dstar: expected a 2x2 array, got {dstar!r}")
        rows = tuple(_numbers(row, 2, f"$.derivation.dstar[{i}]") for i, row in enumerate(dstar))
        xi = _numbers(derivation["xi"], 2, "$.derivation.xi")
        controls = data["controls"]
        if not isinstance(controls, list) or not controls:
            raise ConfigError("$.controls: expected a nonempty list of [a, w1, w2]")
        parsed = tuple(_numbers(row, 3, f"$.controls[{i}]") for i, row in enumerate(controls))
        return SystemConfig(group["class"], lambda_, n, rows, xi, parsed)  # type: ignore[arg-type]

    def to_dict(self) -> dict[str, Any]:
        group: dict[str, Any] = {"class": self.group_class}
        if self.lambda_ is not None:
            group["lambda"] = self.lambda_
        if self.n is not None:
            group["n"] = self.n
        return {"group": group,
                "derivation": {"dstar": [list(row) for row in self.dstar],
                               "xi": list(self.xi)},
                "controls": [list(row) for row in self.controls]}

    def group(self) -> GroupClass:
        try:
            return GroupClass.from_name(self.group_class, lambda_=self.lambda_, n=self.n)
        except AssertionError as exc:
            raise SemanticError(str(exc) or f"Invalid group {self.group_class}") from exc

    def build(self) -> LinearSystem:
        """
        The linear system described by the config. Domain violations
        are raised as SemanticError.
        """
        group = self.group()
        try:
            derivation = make_derivation(group, self.dstar, self.xi)
            return LinearSystem.from_arrays(group, derivation, self.controls)
        except LieControlError as exc:
            raise SemanticError(f"{type(exc).__name__}: {exc}") from exc
        except AssertionError as exc:
            raise SemanticError(str(exc) or "Invalid system") from exc


def _reject_constant(name: str) -> Any:
    raise ConfigError(f"non-finite number {name} is not allowed")


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as file:
            return json.load(file, parse_constant=_reject_constant)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc


def load_config(path: str) -> SystemConfig:
    try:
        return SystemConfig.from_dict(_read_json(path))
    except ConfigError as exc:
        message = str(exc)
        raise ConfigError(message if message.startswith(path) else f"{path}: {message}") from exc


def load_controls(path: str, group: GroupClass) -> tuple[ControlSignal, Optional[GroupElement]]:
    """
    Parses a controls file into a signal and an optional start point.
    """
    data = _read_json(path)
    try:
        _check_keys(data, CONTROLS_KEYS, frozenset({"segments"}), "$")
        segments = data["segments"]
        if not isinstance(segments, list) or not segments:
            raise ConfigError("$.segments: expected a nonempty list")
        for i, segment in enumerate(segments):
            _check_keys(segment, SEGMENT_KEYS, SEGMENT_KEYS, f"$.segments[{i}]")
            duration = _number(segment["duration"], f"$.segments[{i}].duration")
            if duration <= 0.0:
                raise ConfigError(f"$.segments[{i}].duration: must be positive, got {duration}")
            if not isinstance(segment["u"], list) or not segment["u"]:
                raise ConfigError(f"$.segments[{i}].u: expected a nonempty list")
            _numbers(segment["u"], len(segment["u"]), f"$.segments[{i}].u")
        try:
            signal = ControlSignal.from_dict(data)
        except AssertionError as exc:
            raise ConfigError(f"$.segments: {exc}") from exc
        start = None
        if "start" in data:
            t, v1, v2 = _numbers(data["start"], 3, "$.start")
            start = GroupElement(t, (v1, v2), group)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return signal, start
