"""Strict JSON run configuration for the benchmark harness."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import jsonschema

from .core import ConfigError
from .schedules import ScheduleParams, validate_schedule

_NUM = {"type": "number"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["problem", "algorithm", "seed", "epoch_budget"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "nu"],
            "properties": {
                "kind": {"enum": ["eq_selection", "lin_constrained"]},
                "nu": {"type": "integer", "minimum": 1},
            },
        },
        "algorithm": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["alg1", "alg2_l1", "alg2_l2", "det_eg"]},
                "theta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "a": {"type": "number", "exclusiveMinimum": 0},
                "b": {"type": "number", "exclusiveMinimum": 0},
                "K": {"type": "integer", "minimum": 1},
                "alpha": {"type": "number", "minimum": 0, "maximum": 1},
                "sampling": {"enum": ["static", "uniform"]},
                "epoch_model": {"enum": ["paper", "component"]},
            },
        },
        "sharpness": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rho": _NUM,
                "kappa": {"type": "number", "exclusiveMinimum": 0},
                "p_norm": {"type": "number", "minimum": 0},
            },
        },
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "epoch_budget": {"type": "number", "minimum": 0},
        "eval_every_epochs": {"type": "number", "exclusiveMinimum": 0},
        "start": {"enum": ["random", "uniform", "vertex"]},
        "checks": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "energy": {"type": "boolean"},
                "probes": {"type": "integer", "minimum": 1},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "csv_path": {"type": "string"},
                "svg_path": {"type": "string"},
                "events_path": {"type": "string"},
                "wallclock": {"type": "boolean"},
            },
        },
    },
}


@dataclass
class RunConfig:
    name: str
    problem_kind: str
    nu: int
    algorithm: str
    schedule: ScheduleParams
    seed: int
    epoch_budget: float
    eval_every_epochs: float = 10.0
    sampling: str = "static"
    epoch_model: str = "paper"
    start: str = "random"
    energy_checks: bool = False
    probes: int = 20
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None
    events_path: Optional[str] = None
    wallclock: bool = False
    warnings: list = field(default_factory=list)


def _path(err) -> str:
    parts = [str(p) for p in err.absolute_path]
    return "/".join(parts) if parts else "<root>"


def parse_config(data) -> RunConfig:
    """Parse and validate a JSON document (``bytes``, ``str`` or a decoded ``dict``).

    Raises :class:`ConfigError` naming the offending field.  Schedule
    diagnostics are attached as ``warnings`` and never refuse a run.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"<root>: config is not UTF-8 ({exc})") from None
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"<root>: malformed JSON ({exc})") from None
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"{_path(e)}: {e.message}")

    prob, alg = data["problem"], data["algorithm"]
    kind = alg["kind"]
    if kind == "alg1" and prob["kind"] == "lin_constrained":
        raise ConfigError(
            "algorithm/kind: iteration-dependent sampling required for lin_constrained; use alg2_l1 or alg2_l2"
        )
    if "sampling" in alg and kind != "alg1":
        raise ConfigError("algorithm/sampling: only alg1 takes a static sampling scheme")
    theta = alg.get("theta", 0.1)
    sharp = data.get("sharpness", {})
    schedule = ScheduleParams(
        theta=theta,
        alpha=alg.get("alpha", 1.0 - theta),
        gamma=alg.get("gamma", 0.5),
        delta=alg.get("delta", 0.1),
        a=alg.get("a", 1.0),
        b=alg.get("b", 1.0),
        K=alg.get("K", max(1, round(1.0 / theta))),
        rho=sharp.get("rho", 1.5),
        kappa=sharp.get("kappa", 1.0),
        p_norm=sharp.get("p_norm", 0.0),
    )
    if kind.startswith("alg2") and schedule.alpha >= 1.0:
        raise ConfigError("algorithm/alpha: must be < 1 for mirror prox (the step would vanish)")
    checks = data.get("checks", {})
    out = data.get("output", {})
    name = data.get("name") or f"{prob['kind']}-nu{prob['nu']}-{kind}-seed{data['seed']}"
    return RunConfig(
        name=name,
        problem_kind=prob["kind"],
        nu=prob["nu"],
        algorithm=kind,
        schedule=schedule,
        seed=data["seed"],
        epoch_budget=float(data["epoch_budget"]),
        eval_every_epochs=float(data.get("eval_every_epochs", 10.0)),
        sampling=alg.get("sampling", "static"),
        epoch_model=alg.get("epoch_model", "paper"),
        start=data.get("start", "random"),
        energy_checks=checks.get("energy", False),
        probes=checks.get("probes", 20),
        csv_path=out.get("csv_path"),
        svg_path=out.get("svg_path"),
        events_path=out.get("events_path"),
        wallclock=out.get("wallclock", False),
        warnings=_schedule_warnings(schedule, "sharpness" in data),
    )


def _schedule_warnings(schedule, sharpness_given):
    # the sharpness constants only mean something when the user asserts them
    out = validate_schedule(schedule)
    if not sharpness_given:
        out = [w for w in out if "rho" not in w and "kappa" not in w]
    return out


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        return parse_config(fh.read())
