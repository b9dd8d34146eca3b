import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellislab.config import ExperimentConfig, load_config, parse_config, serialize
from ellislab.errors import ConfigError


def test_minimal_config_gets_defaults():
    cfg = parse_config("flow:\n  kind: annulus\n")
    default = ExperimentConfig()
    assert cfg.flow == {"kind": "annulus"}
    assert cfg.detect == default.detect
    assert cfg.semigroup == default.semigroup
    assert cfg.theorems == default.theorems


def test_empty_document_is_default():
    assert parse_config("") == ExperimentConfig()


def test_negative_epsilon_names_key_and_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("seed: 1\nsemigroup:\n  epsilon: -0.1\n")
    assert exc.value.key == "semigroup.epsilon"
    assert exc.value.line == 3
    assert "semigroup.epsilon" in str(exc.value)


def test_unknown_key_lists_options():
    with pytest.raises(ConfigError) as exc:
        parse_config("detect:\n  epsilon: 0.1\n")
    assert exc.value.key == "detect.epsilon"
    assert "epsilons" in str(exc.value)


def test_type_errors():
    with pytest.raises(ConfigError):
        parse_config("seed: one\n")
    with pytest.raises(ConfigError):
        parse_config("semigroup:\n  second_level: 3\n")


def test_rational_alpha_rejected_under_flow_key():
    with pytest.raises(ConfigError) as exc:
        parse_config("flow:\n  kind: rotation\n  alpha: 0.5\n")
    assert exc.value.key == "flow.alpha"
    assert exc.value.line == 3


def test_malformed_yaml_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config("flow: [\n  kind: rotation\n")
    assert exc.value.line is not None


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.yaml")


positive = st.floats(1e-6, 1.0, allow_nan=False)


@st.composite
def configs(draw):
    cfg = ExperimentConfig()
    cfg.flow = draw(st.sampled_from([
        {"kind": "rotation", "alpha": "golden"},
        {"kind": "annulus", "alpha": "silver"},
        {"kind": "circle_stack", "depth": draw(st.integers(1, 30))},
        {"kind": "torus_circle", "mu": "silver", "alpha": "golden"},
        {"kind": "shift_pair", "block": [1, 0, 1], "window": draw(st.integers(3, 62))},
        {"kind": "full_shift", "window": draw(st.integers(1, 62))},
    ]))
    cfg.seed = draw(st.integers(0, 2**31))
    cfg.workers = draw(st.integers(1, 16))
    cfg.detect.epsilons = draw(st.lists(positive, min_size=1, max_size=4))
    cfg.detect.deltas = draw(st.lists(positive, min_size=1, max_size=4))
    cfg.detect.horizon = draw(st.integers(1, 10**6))
    cfg.detect.points = draw(st.lists(st.sampled_from(["0.1", "0.5", "1.5,0.2"]), max_size=3))
    cfg.semigroup.epsilon = draw(positive)
    cfg.semigroup.directions = draw(st.sampled_from(["forward", "both"]))
    cfg.semigroup.second_level = draw(st.booleans())
    cfg.theorems.select = draw(st.sampled_from([["all"], ["T-iso"], ["T-dis", "T-ts"]]))
    cfg.theorems.horizon = draw(st.integers(1, 10**5))
    cfg.theorems.alpha = draw(st.sampled_from(["golden", "silver", 0.41421356237309503]))
    cfg.output.dir = draw(st.sampled_from([None, "out", "/tmp/x y"]))
    return cfg


@settings(max_examples=100, deadline=None)
@given(configs())
def test_round_trip(cfg):
    assert parse_config(serialize(cfg)) == cfg
