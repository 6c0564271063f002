"""JSON config schemas shared by the CLI and the HTTP service.

Strict JSON only, one parser for both front ends. Shape and type checks
live in the schemas below; cross-field rules (a historical arm given
either as counts or as a prior, delta present when the adaptive method
is requested, and so on) are enforced while building the domain objects
and surface through the same error type, so every front end reports
{code, message, field_path}.
"""
from __future__ import annotations

from typing import Any, Iterable

import jsonschema

from .comparators import MethodSpec, UnsupportedMethodError, method_spec_from_dict
from .mixtures import (
    BinarySummary,
    MixtureDistribution,
    NormalSummary,
    mixture_from_dict,
)
from .simulate import ScenarioSpec

__all__ = [
    "ConfigError",
    "ANALYZE_SCHEMA",
    "SIMULATE_SCHEMA",
    "CALIBRATE_SCHEMA",
    "CURVE_SCHEMA",
    "validate_config",
    "parse_method",
    "parse_methods",
    "parse_scenario",
    "parse_summary",
    "scenario_to_dict",
    "resolve_theta_grid",
]


class ConfigError(Exception):
    """Config rejected; carries a machine-readable code and field path."""

    def __init__(self, code: str, message: str, field_path: str = "") -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.field_path = field_path

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "field_path": self.field_path}


_DEFS = {
    "mixture": {
        "type": "object",
        "required": ["family", "components"],
        "additionalProperties": False,
        "properties": {
            "family": {"enum": ["beta", "normal"]},
            "components": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["w"],
                    "additionalProperties": False,
                    "properties": {
                        "w": {"type": "number"},
                        "a": {"type": "number"},
                        "b": {"type": "number"},
                        "m": {"type": "number"},
                        "v": {"type": "number"},
                    },
                },
            },
        },
    },
    "binary_summary": {
        "type": "object",
        "required": ["x", "n"],
        "additionalProperties": False,
        "properties": {
            "x": {"type": "integer", "minimum": 0},
            "n": {"type": "integer", "minimum": 0},
        },
    },
    "normal_summary": {
        "type": "object",
        "required": ["n", "mean"],
        "additionalProperties": False,
        "properties": {
            "n": {"type": "integer", "minimum": 0},
            "mean": {"type": "number"},
            "sd": {"type": "number"},
            "sum_sq_dev": {"type": "number"},
        },
    },
    "summary": {
        "anyOf": [{"$ref": "#/$defs/binary_summary"}, {"$ref": "#/$defs/normal_summary"}]
    },
    "method": {
        "type": "object",
        "required": ["kind"],
        "additionalProperties": False,
        "properties": {
            # kind is deliberately an open string: unknown kinds must
            # reach the unsupported-method error, not a generic schema one.
            "kind": {"type": "string"},
            "w_tilde": {"type": "number"},
            "gamma_grid": {"type": "integer"},
        },
    },
    "scenario": {
        "type": "object",
        "required": ["endpoint", "theta", "n", "theta_t", "n_t", "delta"],
        "additionalProperties": False,
        "properties": {
            "endpoint": {"enum": ["binary", "normal"]},
            "theta": {"type": "number"},
            "n": {"type": "integer", "minimum": 1},
            "theta_t": {"type": "number"},
            "n_t": {"type": "integer", "minimum": 1},
            "delta": {"type": "number", "exclusiveMinimum": 0},
            "theta_h": {"type": "number"},
            "n_h": {"type": "integer", "minimum": 1},
            "informative": {"$ref": "#/$defs/mixture"},
            "sigma": {"type": "number", "exclusiveMinimum": 0},
            "vague": {"$ref": "#/$defs/mixture"},
            "sigma_mode": {"enum": ["pooled", "current"]},
            "label": {"type": "string"},
        },
    },
    "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
    "theta_grid": {
        "oneOf": [
            {"type": "array", "minItems": 1, "items": {"type": "number"}},
            {
                "type": "object",
                "required": ["from", "to", "points"],
                "additionalProperties": False,
                "properties": {
                    "from": {"type": "number"},
                    "to": {"type": "number"},
                    "points": {"type": "integer", "minimum": 2},
                },
            },
        ]
    },
}

ANALYZE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": _DEFS,
    "type": "object",
    "required": ["endpoint", "method", "control", "treatment"],
    "additionalProperties": False,
    "properties": {
        "endpoint": {"enum": ["binary", "normal"]},
        "method": {"$ref": "#/$defs/method"},
        "control": {"$ref": "#/$defs/summary"},
        "treatment": {"$ref": "#/$defs/summary"},
        "historical": {"$ref": "#/$defs/summary"},
        "informative": {"$ref": "#/$defs/mixture"},
        "vague": {"$ref": "#/$defs/mixture"},
        "delta": {"type": "number", "exclusiveMinimum": 0},
        "cutoff": {"type": "number", "minimum": 0, "maximum": 1},
        "sigma_mode": {"enum": ["pooled", "current"]},
    },
}

SIMULATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": _DEFS,
    "type": "object",
    "required": ["scenarios", "methods"],
    "additionalProperties": False,
    "properties": {
        "scenarios": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/scenario"}},
        "methods": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/method"}},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "replicates": {"type": "integer", "minimum": 1},
        "calibration_replicates": {"type": "integer", "minimum": 1000},
        "seed": {"$ref": "#/$defs/seed"},
        "calibration_seed": {"$ref": "#/$defs/seed"},
        "threads": {"type": "integer", "minimum": 1},
    },
}

CALIBRATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": _DEFS,
    "type": "object",
    "required": ["scenario", "methods"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"$ref": "#/$defs/scenario"},
        "methods": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/method"}},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "replicates": {"type": "integer", "minimum": 1000},
        "seed": {"$ref": "#/$defs/seed"},
        "threads": {"type": "integer", "minimum": 1},
    },
}

CURVE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": _DEFS,
    "type": "object",
    "required": ["scenario", "theta_grid"],
    "additionalProperties": False,
    "properties": {
        "scenario": {"$ref": "#/$defs/scenario"},
        "theta_grid": {"$ref": "#/$defs/theta_grid"},
        "replicates": {"type": "integer", "minimum": 1},
        "seed": {"$ref": "#/$defs/seed"},
    },
}


def _join_path(parts: Iterable[Any]) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def validate_config(obj: Any, schema: dict) -> None:
    """Check a parsed config against a schema; raise ConfigError on failure."""
    validator = jsonschema.Draft202012Validator(schema)
    best = jsonschema.exceptions.best_match(validator.iter_errors(obj))
    if best is not None:
        raise ConfigError("schema_violation", best.message, _join_path(best.absolute_path))


def parse_method(obj: dict, field_path: str = "method") -> MethodSpec:
    try:
        return method_spec_from_dict(obj)
    except UnsupportedMethodError:
        raise
    except ValueError as exc:
        raise ConfigError("invalid_config", str(exc), field_path) from exc


def parse_methods(items: list, field_path: str = "methods") -> list[MethodSpec]:
    return [parse_method(m, f"{field_path}[{i}]") for i, m in enumerate(items)]


def parse_summary(
    endpoint: str, obj: dict, field_path: str
) -> BinarySummary | NormalSummary:
    try:
        if endpoint == "binary":
            return BinarySummary(x=obj["x"], n=obj["n"])
        return NormalSummary(
            n=obj["n"],
            mean=obj["mean"],
            sd=obj.get("sd"),
            sum_sq_dev=obj.get("sum_sq_dev"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError("invalid_config", str(exc), field_path) from exc


def _parse_mixture(obj: dict | None, field_path: str) -> MixtureDistribution | None:
    if obj is None:
        return None
    try:
        return mixture_from_dict(obj)
    except (KeyError, ValueError) as exc:
        raise ConfigError("invalid_config", str(exc), field_path) from exc


def parse_scenario(obj: dict, field_path: str = "scenario") -> ScenarioSpec:
    try:
        return ScenarioSpec(
            endpoint=obj["endpoint"],
            theta=obj["theta"],
            n=obj["n"],
            theta_t=obj["theta_t"],
            n_t=obj["n_t"],
            delta=obj["delta"],
            theta_h=obj.get("theta_h"),
            n_h=obj.get("n_h"),
            informative=_parse_mixture(obj.get("informative"), f"{field_path}.informative"),
            sigma=obj.get("sigma"),
            vague=_parse_mixture(obj.get("vague"), f"{field_path}.vague"),
            sigma_mode=obj.get("sigma_mode", "pooled"),
            label=obj.get("label", ""),
        )
    except ConfigError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError("invalid_config", str(exc), field_path) from exc


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    from .mixtures import mixture_to_dict

    out: dict = {
        "endpoint": spec.endpoint,
        "theta": spec.theta,
        "n": spec.n,
        "theta_t": spec.theta_t,
        "n_t": spec.n_t,
        "delta": spec.delta,
    }
    if spec.theta_h is not None:
        out["theta_h"] = spec.theta_h
        out["n_h"] = spec.n_h
    if spec.informative is not None:
        out["informative"] = mixture_to_dict(spec.informative)
    if spec.sigma is not None:
        out["sigma"] = spec.sigma
    if spec.vague is not None:
        out["vague"] = mixture_to_dict(spec.vague)
    if spec.sigma_mode != "pooled":
        out["sigma_mode"] = spec.sigma_mode
    if spec.label:
        out["label"] = spec.label
    return out


def resolve_theta_grid(obj: list | dict) -> list[float]:
    """Either an explicit list or an inclusive equally spaced range."""
    if isinstance(obj, list):
        return [float(t) for t in obj]
    lo, hi, points = float(obj["from"]), float(obj["to"]), int(obj["points"])
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points)]
