import json

import pytest

from compact6 import models
from compact6.config import (
    ConfigError,
    bundled_configs,
    config_from_dict,
    load_bundled,
    parse_config,
    validate,
)


def base(**over):
    cfg = {
        "experiment": "convergence_space",
        "model": {"equation": "linear", "alpha": 0.0, "gamma": 1.0, "delta": 1.0, "data": {"kind": "sine"}},
        "domain": {"a": 0.0, "b": 30.0, "N": 40},
        "time": {"T": 1.0, "tau_rule": "h6"},
    }
    cfg.update(over)
    return cfg


def test_bundled_example1():
    cfg = load_bundled("example1")
    assert cfg.domain["a"] == 0 and cfg.domain["b"] == 30
    spec = cfg.problem()
    assert (spec.alpha, spec.gamma, spec.delta) == (0, 1, 1)
    assert cfg.N_list == [40, 80, 160, 320]


@pytest.mark.parametrize("name", sorted(bundled_configs()))
def test_every_bundled_config_is_valid(name):
    cfg = load_bundled(name)
    assert name.startswith("example")
    assert cfg.description


def test_empty_file(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "nope.json")


def test_small_N_cites_grid_invariant():
    errs = validate(base(domain={"a": 0, "b": 1, "N": 4}))
    assert len(errs) == 1 and ">= 8" in errs[0] and errs[0].startswith("/domain/N")
    errs = validate(base(domain={"a": 0, "b": 1, "N": [40, 4]}))
    assert any(">= 8" in e for e in errs)


def test_all_errors_reported():
    raw = base(domain={"a": 0, "b": 1, "N": 4}, colour="blue")
    raw["model"]["equation"] = "kdv"
    raw["time"]["T"] = -1
    with pytest.raises(ConfigError) as err:
        config_from_dict(raw)
    msgs = err.value.errors
    assert len(msgs) == 4
    joined = "\n".join(msgs)
    for frag in ("/domain/N", "colour", "/model/equation", "/time/T"):
        assert frag in joined


def test_unknown_nested_key():
    raw = base()
    raw["time"]["dt"] = 0.1
    assert any("dt" in e for e in validate(raw))


@pytest.mark.parametrize(
    "patch,frag",
    [
        (lambda c: c["domain"].update(b=-1.0), "a < b"),
        (lambda c: c["time"].update(tau_rule="fixed"), "needs tau"),
        (lambda c: c["time"].update(tau_list=[1.0, 2.0], expect=["bounded"]), "one entry per"),
        (lambda c: c.update(outputs={"sample_times": [2.0]}), "beyond T"),
    ],
)
def test_semantic_errors(patch, frag):
    raw = base()
    patch(raw)
    errs = validate(raw)
    assert errs and frag in errs[0]


def test_model_errors_surface_as_config_errors():
    raw = base()
    raw["model"]["data"] = {"kind": "bore", "u0": 0.1, "d": 5.0}
    with pytest.raises(ConfigError, match="/model"):
        config_from_dict(raw)


def test_ew_models_built():
    cfg = load_bundled("example6")
    spec = cfg.problem()
    assert spec.name == "ew" and spec.boundary == "constant"
    assert [w[0] for w in spec.params["waves"]] == [0.4, 0.2]
    bore = load_bundled("example8").problem()
    assert bore.left_value == 0.1 and bore.right_value == 0.0
    sol = load_bundled("example5").problem()
    assert sol.boundary == "exact" and sol.params["solitary"].c == 0.03
    assert isinstance(load_bundled("example9").problem().forcing(0.0, 0.0), float)


def test_2d_config():
    cfg = load_bundled("example2")
    assert cfg.is_2d
    assert cfg.grid(40).shape == (41, 41)
    assert isinstance(cfg.problem(), models.LinearSpec2D)


def test_roundtrip_from_disk(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(base()))
    cfg = parse_config(p)
    assert cfg.source == str(p) and cfg.grid().N == 40
