"""Experiment configuration: a JSON document checked against a versioned schema.

Unknown keys are rejected everywhere. Defaults are filled in by
:func:`load_config` and echoed into every report.
"""
from __future__ import annotations

import copy
import json
from pathlib import Path

from jsonschema import Draft7Validator

from .exceptions import MetSpecError

SCHEMA_VERSION = 1
EXPERIMENTS = ("drift", "functional", "wolff-denjoy", "mean-ergodic", "lyapunov",
               "thurston", "curve-growth", "invariants")
DEFAULT_TOLERANCES = {"algebraic": 1e-9, "geometric": 1e-6, "ergodic": 1e-3}


class ConfigError(MetSpecError):
    """Schema violation; ``path`` points at the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_num = {"type": "number"}
_complex = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}
_vector = {"type": "array", "items": _num, "minItems": 1}
_matrix = {"type": "array", "items": {"type": "array", "items": _complex, "minItems": 1}, "minItems": 1}
_int_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                          "minItems": 2, "maxItems": 2}, "minItems": 2, "maxItems": 2}
_pair = {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


def _tagged(tag: str, props: dict, required=()) -> dict:
    props = dict(props, type={"const": tag})
    return _obj(props, ("type", *required))


SPACE_SCHEMA = {"oneOf": [
    _tagged("euclidean", {"dim": {"type": "integer", "minimum": 1},
                          "p": {"oneOf": [{"type": "number", "minimum": 1}, {"const": "inf"}]}}),
    _tagged("poincare-disk", {"dps": {"type": "integer", "minimum": 15}}),
    _tagged("cone", {"dim": {"type": "integer", "minimum": 1}, "variant": {"enum": ["funk", "thompson"]}}),
    _tagged("operator", {"dim": {"type": "integer", "minimum": 1}}),
    _tagged("torus", {}),
]}

MAP_SCHEMA = {"oneOf": [
    _tagged("translation", {"c": _vector}, ["c"]),
    _tagged("rotation", {"angle": _num, "plane": _pair}, ["angle"]),
    _tagged("affine", {"U": _matrix, "v": _vector}, ["U", "v"]),
    _tagged("scaling", {"factor": _num, "center": _vector}, ["factor"]),
    _tagged("mobius", {"matrix": _matrix}, ["matrix"]),
    _tagged("hyperbolic", {"t": _num, "angle": _num}),
    _tagged("parabolic", {}),
    _tagged("disk-rotation", {"angle": _num}, ["angle"]),
    _tagged("power", {"k": {"type": "integer", "minimum": 1}}),
    _tagged("blaschke", {"zeros": {"type": "array", "items": _complex, "minItems": 1},
                         "boundary_point": _complex}, ["zeros"]),
    _tagged("cone-linear", {"matrix": _matrix}, ["matrix"]),
    _tagged("left-mult", {"matrix": _matrix}, ["matrix"]),
    _tagged("mapping-class", {"matrix": _int_matrix}, ["matrix"]),
]}

DRIVER_SCHEMA = _obj({
    "kind": {"enum": ["iid", "markov", "rotation"]},
    "family": {"type": "array", "items": MAP_SCHEMA, "minItems": 1},
    "weights": _vector,
    "transition": {"type": "array", "items": _vector},
    "angle": _num,
    "cuts": _vector,
}, ["kind", "family"])

_positive_num = {"type": "number", "exclusiveMinimum": 0}

PARAMS_SCHEMA = {
    "drift": _obj({"eps": _positive_num}),
    "functional": _obj({"k_check": {"type": "integer", "minimum": 1}, "probes": {"type": "integer", "minimum": 1}}),
    "wolff-denjoy": _obj({"probes": {"type": "integer", "minimum": 1}}),
    "mean-ergodic": _obj({"U": _matrix, "v": _vector, "rate_bound": _positive_num,
                          "tau_tol": _positive_num, "extraction_horizon": {"type": "integer", "minimum": 1}},
                         ["U", "v"]),
    "lyapunov": _obj({"expected": _num}),
    "thurston": _obj({"pairs": {"type": "integer", "minimum": 1}, "N": {"type": "integer", "minimum": 1},
                      "window": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}}),
    "curve-growth": _obj({"alpha": _pair, "expected": _num, "tolerance": _positive_num,
                          "eps": _positive_num, "records": {"type": "boolean"},
                          "basis": {"type": "array", "items": _pair, "minItems": 1}}),
    "invariants": _obj({"maps": {"type": "array", "items": MAP_SCHEMA}}),
}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "experiment"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "experiment": {"enum": list(EXPERIMENTS)},
        "space": SPACE_SCHEMA,
        "map": MAP_SCHEMA,
        "maps": {"type": "array", "items": MAP_SCHEMA, "minItems": 1},
        "driver": DRIVER_SCHEMA,
        "horizon": {"type": "integer", "minimum": 1},
        "eps_schedule": {"type": "array", "items": _positive_num, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "samples": {"type": "integer", "minimum": 1},
        "tolerances": _obj({k: _positive_num for k in DEFAULT_TOLERANCES}),
        "output": _obj({"formats": {"type": "array", "items": {"enum": ["csv", "json"]}, "uniqueItems": True},
                        "prefix": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"}}),
        "params": {"type": "object"},
    },
    "allOf": [
        {"if": {"properties": {"experiment": {"const": name}}},
         "then": {"properties": {"params": schema}}}
        for name, schema in PARAMS_SCHEMA.items()
    ],
}

DEFAULTS = {
    "horizon": 1000,
    "eps_schedule": [2.0 ** -i for i in range(1, 11)],
    "seed": 0,
    "samples": 1000,
    "output": {"formats": ["csv", "json"], "prefix": "run"},
    "params": {},
}

_validator = Draft7Validator(CONFIG_SCHEMA)


def _path(error) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path)


def validate_config(cfg: dict) -> None:
    """Raise :class:`ConfigError` for the deepest schema violation."""
    errors = sorted(_validator.iter_errors(cfg), key=lambda e: (-len(e.absolute_path), e.message))
    if errors:
        # oneOf failures hide the useful message in their context
        err = errors[0]
        while err.context:
            err = max(err.context, key=lambda e: len(e.absolute_path))
        raise ConfigError(_path(err), err.message)
    eps = cfg.get("eps_schedule")
    if eps is not None and any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigError("$.eps_schedule", "must be strictly decreasing")


def with_defaults(cfg: dict) -> dict:
    out = copy.deepcopy(cfg)
    for key, value in DEFAULTS.items():
        if key not in out:
            out[key] = copy.deepcopy(value)
    out["tolerances"] = dict(DEFAULT_TOLERANCES, **out.get("tolerances", {}))
    out["output"] = dict(DEFAULTS["output"], **out["output"])
    return out


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc
    validate_config(cfg)
    return with_defaults(cfg)
