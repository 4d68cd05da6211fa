"""Strict parsing of JSON experiment configs.

Example::

    {
      "n": 10, "target_rho": 0.9, "zero_diagonal": true,
      "sign_convention": "PLUS",
      "schedule": {"kind": "BOUNDED_DELAY_REPAIR", "p_update": 0.3},
      "T": 8,
      "criterion": {"tolerance": 1e-9, "max_iterations": 20000,
                    "reference": "FIXED_POINT"},
      "trials": 10, "master_seed": 2024,
      "perturbation_epsilon": 0.0, "record_stride": 1,
      "output_dir": "runs/bdr"
    }

``p_update`` may be a single number (shared by all nodes) or a list of n
numbers.  Only ``sign_convention``, ``perturbation_epsilon`` and
``record_stride`` have defaults; any key not listed here is rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .activation import ScheduleKind
from .dynamics import ConvergenceCriterion, Reference
from .matrix_gen import SignConvention
from .rng import MAX_SEED


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class UnknownKey(ValidationError):
    def __init__(self, path: str):
        super().__init__(path, "unknown key")


@dataclass(frozen=True)
class ScheduleConfig:
    kind: ScheduleKind
    p_update: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    target_rho: float
    zero_diagonal: bool
    schedule: ScheduleConfig
    T: int
    criterion: ConvergenceCriterion
    trials: int
    master_seed: int
    output_dir: str
    sign_convention: SignConvention = SignConvention.PLUS
    perturbation_epsilon: float = 0.0
    record_stride: int = 1

    def to_dict(self) -> dict:
        schedule = {"kind": self.schedule.kind.value}
        if self.schedule.p_update is not None:
            schedule["p_update"] = list(self.schedule.p_update)
        return {
            "n": self.n,
            "target_rho": self.target_rho,
            "zero_diagonal": self.zero_diagonal,
            "sign_convention": self.sign_convention.value,
            "schedule": schedule,
            "T": self.T,
            "criterion": {
                "tolerance": self.criterion.tolerance,
                "max_iterations": self.criterion.max_iterations,
                "reference": self.criterion.reference.value,
            },
            "trials": self.trials,
            "master_seed": self.master_seed,
            "perturbation_epsilon": self.perturbation_epsilon,
            "record_stride": self.record_stride,
            "output_dir": self.output_dir,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_TOP_KEYS = {
    "n", "target_rho", "zero_diagonal", "sign_convention", "schedule", "T",
    "criterion", "trials", "master_seed", "perturbation_epsilon",
    "record_stride", "output_dir",
}
_SCHEDULE_KEYS = {"kind", "p_update"}
_CRITERION_KEYS = {"tolerance", "max_iterations", "reference"}


def _object(value, path: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(path or "<root>", "must be a JSON object")
    for key in value:
        if key not in allowed:
            raise UnknownKey(f"{path}.{key}" if path else key)
    return value


def _required(obj: dict, key: str, path: str):
    if key not in obj:
        raise ValidationError(path, "required")
    return obj[key]


def _int(value, path: str, minimum: int, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(path, "must be an integer")
    if value < minimum:
        raise ValidationError(path, f"must be >= {minimum}")
    if maximum is not None and value > maximum:
        raise ValidationError(path, f"must be <= {maximum}")
    return value


def _real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, "must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(path, "must be finite")
    return value


def _enum(enum_cls, value, path: str):
    names = [m.value for m in enum_cls]
    if value not in names:
        raise ValidationError(path, f"must be one of {', '.join(names)}")
    return enum_cls(value)


def _schedule(value, n: int) -> ScheduleConfig:
    obj = _object(value, "schedule", _SCHEDULE_KEYS)
    kind = _enum(ScheduleKind, _required(obj, "kind", "schedule.kind"), "schedule.kind")
    needs_p = kind in (ScheduleKind.BERNOULLI, ScheduleKind.BOUNDED_DELAY_REPAIR)
    if not needs_p:
        if "p_update" in obj:
            raise ValidationError("schedule.p_update", f"not used by {kind.value}")
        return ScheduleConfig(kind)

    raw = _required(obj, "p_update", "schedule.p_update")
    if isinstance(raw, list):
        if len(raw) != n:
            raise ValidationError("schedule.p_update", f"must have n = {n} entries, got {len(raw)}")
        items = [(f"schedule.p_update[{i}]", v) for i, v in enumerate(raw)]
    else:
        items = [("schedule.p_update", raw)] * n
    p = []
    for path, v in items:
        v = _real(v, path)
        if not 0.0 < v <= 1.0:
            raise ValidationError(path, "must be in (0,1]")
        p.append(v)
    return ScheduleConfig(kind, tuple(p))


def _criterion(value) -> ConvergenceCriterion:
    obj = _object(value, "criterion", _CRITERION_KEYS)
    tol = _real(_required(obj, "tolerance", "criterion.tolerance"), "criterion.tolerance")
    if not tol > 0:
        raise ValidationError("criterion.tolerance", "must be > 0")
    max_it = _int(_required(obj, "max_iterations", "criterion.max_iterations"), "criterion.max_iterations", 1)
    ref = _enum(Reference, _required(obj, "reference", "criterion.reference"), "criterion.reference")
    return ConvergenceCriterion(tol, max_it, ref)


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    obj = _object(raw, "", _TOP_KEYS)

    n = _int(_required(obj, "n", "n"), "n", 1)
    rho = _real(_required(obj, "target_rho", "target_rho"), "target_rho")
    if rho < 0:
        raise ValidationError("target_rho", "must be >= 0")
    if rho >= 1:
        raise ValidationError("target_rho", "must be < 1")
    zero_diag = _required(obj, "zero_diagonal", "zero_diagonal")
    if not isinstance(zero_diag, bool):
        raise ValidationError("zero_diagonal", "must be a boolean")
    sign = _enum(SignConvention, obj.get("sign_convention", "PLUS"), "sign_convention")
    eps = _real(obj.get("perturbation_epsilon", 0.0), "perturbation_epsilon")
    if eps < 0:
        raise ValidationError("perturbation_epsilon", "must be >= 0")
    out = _required(obj, "output_dir", "output_dir")
    if not isinstance(out, str) or not out:
        raise ValidationError("output_dir", "must be a non-empty string")

    return ExperimentConfig(
        n=n,
        target_rho=rho,
        zero_diagonal=zero_diag,
        schedule=_schedule(_required(obj, "schedule", "schedule"), n),
        T=_int(_required(obj, "T", "T"), "T", 1),
        criterion=_criterion(_required(obj, "criterion", "criterion")),
        trials=_int(_required(obj, "trials", "trials"), "trials", 1),
        master_seed=_int(_required(obj, "master_seed", "master_seed"), "master_seed", 0, MAX_SEED),
        output_dir=out,
        sign_convention=sign,
        perturbation_epsilon=eps,
        record_stride=_int(obj.get("record_stride", 1), "record_stride", 1),
    )
