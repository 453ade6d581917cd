"""JSON experiment configs: schema, validation and translation into model objects."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import jsonschema

from . import models
from .grid import MIN_INTERVALS, make_grid, make_grid_2d

EXPERIMENTS = (
    "convergence_space", "convergence_time", "stability_sweep", "decay_check",
    "solitary", "interaction", "bore", "bbmb", "custom",
)

_N = {"type": "integer", "minimum": MIN_INTERVALS}
_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}

_wave = {
    "type": "object",
    "additionalProperties": False,
    "required": ["c", "x0"],
    "properties": {"c": _pos, "x0": _num, "k": _pos},
}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment", "model", "domain", "time"],
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "description": {"type": "string"},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["equation"],
            "properties": {
                "equation": {"enum": ["linear", "linear2d", "ew", "bbmb"]},
                "alpha": _num,
                "alpha_y": _num,
                "gamma": {"type": "number", "minimum": 0},
                "delta": {"type": "number", "minimum": 0},
                "data": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["sine", "solitary", "multi_soliton", "bore", "sech_forced"]},
                        "c": _pos,
                        "x0": _num,
                        "waves": {"type": "array", "minItems": 1, "items": _wave},
                        "u0": _pos,
                        "d": _pos,
                        "xc": _num,
                    },
                },
                "boundary": {"enum": ["exact", "constant"]},
            },
        },
        "domain": {
            "type": "object",
            "additionalProperties": False,
            "required": ["a", "b", "N"],
            "properties": {
                "a": _num,
                "b": _num,
                "ya": _num,
                "yb": _num,
                "N": {"oneOf": [_N, {"type": "array", "minItems": 1, "items": _N}]},
                "N_y": _N,
            },
        },
        "time": {
            "type": "object",
            "additionalProperties": False,
            "required": ["T"],
            "properties": {
                "T": _pos,
                "tau_rule": {"enum": ["h6", "fixed"]},
                "tau": _pos,
                "tau_list": {"type": "array", "minItems": 1, "items": _pos},
                "expect": {"type": "array", "items": {"enum": ["bounded", "diverged"]}},
                "bounded_limit": _pos,
                "diverged_limit": _pos,
                "samples": {"type": "integer", "minimum": 1},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sample_times": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "directory": {"type": "string"},
                "rate_window": {"type": "array", "minItems": 2, "maxItems": 2, "items": _num},
            },
        },
    },
}


class ConfigError(ValueError):
    """Carries every validation problem, one message per entry of ``errors``."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def _describe(err: jsonschema.ValidationError) -> str:
    ptr = _pointer(err.absolute_path)
    path = [str(p) for p in err.absolute_path]
    on_grid = "N" in path[-2:] or path[-1:] == ["N_y"]
    if err.validator == "minimum" and on_grid:
        return f"{ptr}: {err.instance} < {MIN_INTERVALS}; the grid needs N >= {MIN_INTERVALS} intervals"
    if err.validator == "oneOf" and on_grid:
        return f"{ptr}: N must be an integer >= {MIN_INTERVALS} or a list of them (got {err.instance!r})"
    return f"{ptr}: {err.message}"


def _semantic_errors(cfg: dict) -> list[str]:
    out = []
    dom, tm, model = cfg["domain"], cfg["time"], cfg["model"]
    if dom["b"] <= dom["a"]:
        out.append("/domain: need a < b")
    if model["equation"] == "linear2d" and dom.get("yb", dom["b"]) <= dom.get("ya", dom["a"]):
        out.append("/domain: need ya < yb")
    rule = tm.get("tau_rule", "h6")
    if rule == "fixed" and "tau" not in tm and "tau_list" not in tm:
        out.append("/time: tau_rule 'fixed' needs tau or tau_list")
    if "expect" in tm and len(tm["expect"]) != len(tm.get("tau_list", [])):
        out.append("/time/expect: needs one entry per tau_list value")
    for t in cfg.get("outputs", {}).get("sample_times", []):
        if t > tm["T"]:
            out.append(f"/outputs/sample_times: {t} lies beyond T={tm['T']}")
    if model["equation"] == "ew" and not model.get("delta", 1.0) > 0:
        out.append("/model/delta: the EW equation needs delta > 0")
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: dict
    domain: dict
    time: dict
    outputs: dict = field(default_factory=dict)
    description: str = ""
    source: Optional[str] = None

    @property
    def is_2d(self) -> bool:
        return self.model["equation"] == "linear2d"

    @property
    def N_list(self) -> list[int]:
        N = self.domain["N"]
        return list(N) if isinstance(N, list) else [N]

    @property
    def sample_times(self) -> tuple:
        return tuple(self.outputs.get("sample_times", ()))

    @property
    def out_dir(self) -> Path:
        return Path(self.outputs.get("directory", "out"))

    def grid(self, N: Optional[int] = None):
        N = self.N_list[0] if N is None else N
        a, b = self.domain["a"], self.domain["b"]
        if self.is_2d:
            Ny = self.domain.get("N_y", N)
            return make_grid_2d(a, b, N, self.domain.get("ya", a), self.domain.get("yb", b), Ny)
        return make_grid(a, b, N)

    def problem(self):
        return build_problem(self.model)


def validate(raw: Any) -> list[str]:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    msgs = [_describe(e) for e in errors]
    if not msgs:
        msgs = _semantic_errors(raw)
    return msgs


def config_from_dict(raw: Any, source: Optional[str] = None) -> ExperimentConfig:
    msgs = validate(raw)
    if msgs:
        raise ConfigError(msgs)
    cfg = ExperimentConfig(
        raw["experiment"], raw["model"], raw["domain"], raw["time"],
        raw.get("outputs", {}), raw.get("description", ""), source,
    )
    try:
        cfg.problem()
    except models.ModelError as exc:
        raise ConfigError([f"/model: {exc}"]) from exc
    return cfg


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})"]) from exc
    return config_from_dict(raw, str(path))


def bundled_configs() -> dict[str, Path]:
    root = resources.files("compact6") / "configs"
    return {p.name[:-5]: Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")}


def load_bundled(name: str) -> ExperimentConfig:
    configs = bundled_configs()
    if name not in configs:
        raise ConfigError([f"no bundled config {name!r}; have {sorted(configs)}"])
    return parse_config(configs[name])


def build_problem(model: dict):
    """EquationSpec (1D) or LinearSpec2D from the ``model`` block."""
    eq = model["equation"]
    alpha = model.get("alpha", 0.0)
    gamma = model.get("gamma", 0.0)
    delta = model.get("delta", 1.0 if eq == "ew" else 0.0)
    data = model.get("data", {"kind": "sine"})
    kind = data["kind"]
    boundary = model.get("boundary")

    if eq == "linear2d":
        if kind != "sine":
            raise models.ModelError("the 2D model only ships the sin(x)sin(y) data")
        return models.linear_sine_problem_2d(alpha, model.get("alpha_y", alpha), gamma, delta)

    if eq == "linear":
        if kind != "sine":
            raise models.ModelError(f"linear model has no {kind!r} data")
        spec = models.linear_sine_problem(alpha, gamma, delta)
    elif eq == "bbmb":
        if kind != "sech_forced":
            raise models.ModelError(f"BBMB model has no {kind!r} data")
        spec = models.bbmb_equation(gamma, delta, models.bbmb_sech_forcing).with_data(
            exact=models.bbmb_sech_exact
        )
    else:
        if kind == "solitary":
            p = models.SolitaryWaveParams(data["c"], data["x0"], delta)
            spec = models.solitary_problem(p, boundary or "exact")
        elif kind == "multi_soliton":
            waves = [
                (w["c"], w.get("k", models.SolitaryWaveParams(w["c"], w["x0"], delta).k), w["x0"])
                for w in data["waves"]
            ]
            spec = models.ew_equation(delta).with_data(
                initial=models.multi_soliton_ic(waves), boundary="constant"
            )
            spec = spec.replace(params={**spec.params, "waves": waves})
        elif kind == "bore":
            spec = models.bore_problem(
                models.BoreParams(data["u0"], data["d"], data.get("xc", 0.0)), delta
            )
        else:
            raise models.ModelError(f"EW model has no {kind!r} data")
    if boundary is not None and boundary != spec.boundary:
        spec = spec.replace(boundary=boundary)
    return spec
