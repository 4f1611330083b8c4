"""Experiment configuration: JSON files checked against a strict schema."""

from __future__ import annotations

import copy
import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import jsonschema

U64_MAX = 2 ** 64 - 1

SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["mosaic", "n_list", "R_list"],
    "properties": {
        "mosaic": {"enum": ["voronoi", "hyperplane"]},
        "n_list": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
        "rho": {
            "oneOf": [
                {"type": "number"},
                {
                    "type": "object",
                    "minProperties": 1,
                    "patternProperties": {"^[0-9]+$": {"type": "number"}},
                    "properties": {"limit": {"type": "number"}},
                    "additionalProperties": False,
                },
            ]
        },
        "alpha": {"type": "number"},
        "R_list": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
        "scaling": {"enum": ["absolute", "sqrt_n"]},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": U64_MAX},
        "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "window": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "steps": {"type": ["integer", "null"], "minimum": 1},
    },
}

DEFAULTS: dict[str, Any] = {
    "rho": 0.0,
    "alpha": 0.0,
    "scaling": "absolute",
    "trials": 1000,
    "seed": 0,
    "level": 0.95,
    "window": None,
    "steps": None,
}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` is a dotted path, ``line`` 1-based or None."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class ExperimentConfig:
    mosaic: str
    n_list: tuple[int, ...]
    rho: float | dict
    alpha: float
    R_list: tuple[float, ...]
    scaling: str
    trials: int
    seed: int
    level: float
    window: float | None
    steps: int | None

    def rho_at(self, n: int) -> float:
        if not isinstance(self.rho, dict):
            return float(self.rho)
        try:
            return float(self.rho[str(n)])
        except KeyError:
            raise ConfigError(f"no rho value for n={n}", field="rho") from None

    @property
    def rho_limit(self) -> float:
        """Limit of the rho sequence: the scalar, the table's ``limit`` entry,
        or the entry at the largest tabulated dimension."""
        if not isinstance(self.rho, dict):
            return float(self.rho)
        if "limit" in self.rho:
            return float(self.rho["limit"])
        return float(self.rho[max((k for k in self.rho if k != "limit"), key=int)])

    def radius(self, n: int, R: float, scaled: bool | None = None) -> float:
        """Radius probed at multiplier ``R``: ``R`` itself, or ``R n^(1/2 - alpha)``."""
        scaled = self.scaling == "sqrt_n" if scaled is None else scaled
        return R * n ** (0.5 - self.alpha) if scaled else R

    def to_dict(self) -> dict[str, Any]:
        return {
            "mosaic": self.mosaic,
            "n_list": list(self.n_list),
            "rho": copy.deepcopy(self.rho),
            "alpha": self.alpha,
            "R_list": list(self.R_list),
            "scaling": self.scaling,
            "trials": self.trials,
            "seed": self.seed,
            "level": self.level,
            "window": self.window,
            "steps": self.steps,
        }

    def sha256(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def with_seed(self, seed: int | None) -> "ExperimentConfig":
        if seed is None:
            return self
        if not 0 <= seed <= U64_MAX:
            raise ConfigError("seed must be a 64-bit unsigned integer", field="seed")
        data = self.to_dict()
        data["seed"] = seed
        return from_dict(data)


def _field_path(path) -> str:
    parts = []
    for p in path:
        parts.append(f"[{p}]" if isinstance(p, int) else ("." if parts else "") + str(p))
    return "".join(parts)


def _line_of(text: str | None, path) -> int | None:
    """Best-effort line of the deepest named key of ``path`` in ``text``."""
    if text is None:
        return None
    keys = [p for p in path if isinstance(p, str)]
    pos = 0
    for key in keys:
        m = re.search(r'"' + re.escape(key) + r'"\s*:', text[pos:])
        if m is None:
            break
        pos += m.start()
    if not keys:
        return None
    return text.count("\n", 0, pos) + 1


def from_dict(data: Any, text: str | None = None) -> ExperimentConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        if err.validator == "additionalProperties" and not path:
            extra = sorted(set(data) - set(SCHEMA["properties"]))
            path = extra[:1]
            msg = f"unknown key {extra[0]!r}"
        else:
            msg = err.message
        raise ConfigError(msg, field=_field_path(path) or None, line=_line_of(text, path))
    merged = {**DEFAULTS, **data}
    for key in ("rho", "alpha"):
        values = merged[key].values() if isinstance(merged[key], dict) else [merged[key]]
        if not all(math.isfinite(v) for v in values):
            raise ConfigError("must be finite", field=key, line=_line_of(text, [key]))
    if merged["mosaic"] == "hyperplane":
        for i, n in enumerate(merged["n_list"]):
            if n < 2:
                raise ConfigError("hyperplane mosaics need every dimension >= 2",
                                  field=f"n_list[{i}]", line=_line_of(text, ["n_list"]))
    cfg = ExperimentConfig(
        mosaic=merged["mosaic"],
        n_list=tuple(int(n) for n in merged["n_list"]),
        rho=merged["rho"] if isinstance(merged["rho"], dict) else float(merged["rho"]),
        alpha=float(merged["alpha"]),
        R_list=tuple(float(r) for r in merged["R_list"]),
        scaling=merged["scaling"],
        trials=int(merged["trials"]),
        seed=int(merged["seed"]),
        level=float(merged["level"]),
        window=None if merged["window"] is None else float(merged["window"]),
        steps=None if merged["steps"] is None else int(merged["steps"]),
    )
    if isinstance(cfg.rho, dict):
        missing = [n for n in cfg.n_list if str(n) not in cfg.rho]
        if missing:
            raise ConfigError(f"no rho value for n={missing[0]}", field="rho", line=_line_of(text, ["rho"]))
    return cfg


def loads(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", line=1)
    return from_dict(data, text)


def load(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}") from None
    return loads(text)
