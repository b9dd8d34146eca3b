"""Experiment configuration: a YAML tree with defaults, strict keys and range checks."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import yaml

from .errors import ConfigError
from .flows import PRESETS, make_flow, resolve_irrational

SCHEMA_VERSION = "1"

DEFAULT_EPSILONS = (0.25, 0.1, 0.05, 0.01)
DEFAULT_DELTAS = (0.1, 0.01, 1e-3, 1e-4)


@dataclass
class DetectConfig:
    epsilons: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    deltas: list = field(default_factory=lambda: list(DEFAULT_DELTAS))
    horizon: int = 10_000
    resolution: int = 16
    gap_bound: int = 256
    run_length: int = 5
    points: list = field(default_factory=list)


@dataclass
class SemigroupConfig:
    epsilon: float = 0.05
    horizon: int = 10_000
    resolution: int = 16
    directions: str = "both"
    second_level: bool = False
    second_level_horizon: int = 1000


@dataclass
class TheoremsConfig:
    select: list = field(default_factory=lambda: ["all"])
    horizon: int = 10_000
    alpha: Any = "golden"
    mu: Any = "silver"
    stack_depth: int = 6
    deep_stack_depth: int = 14
    shift_block: list = field(default_factory=lambda: [1])
    shift_window: int = 32
    full_shift_window: int = 8
    pairs: int = 50
    resolution: int = 16
    second_level_horizon: int = 1000
    gap_bound: int = 256
    run_length: int = 5


@dataclass
class OutputConfig:
    dir: str | None = None
    formats: list = field(default_factory=lambda: ["json", "csv", "txt"])


@dataclass
class ExperimentConfig:
    flow: dict = field(default_factory=lambda: {"kind": "rotation", "alpha": "golden"})
    seed: int = 0
    workers: int = 1
    detect: DetectConfig = field(default_factory=DetectConfig)
    semigroup: SemigroupConfig = field(default_factory=SemigroupConfig)
    theorems: TheoremsConfig = field(default_factory=TheoremsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


SECTIONS = {"detect": DetectConfig, "semigroup": SemigroupConfig, "theorems": TheoremsConfig, "output": OutputConfig}


def _line_map(text: str) -> dict:
    """Map dotted key paths to 1-based source lines."""
    lines: dict[str, int] = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                lines[path] = k.start_mark.line + 1
                walk(v, path)

    walk(yaml.compose(text), "")
    return lines


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
        lines = _line_map(text) if data else {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed config: {getattr(exc, 'problem', exc)}", line=mark.line + 1 if mark else None) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level", line=1)
    return from_dict(data, lines)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)


def from_dict(data: dict, lines: dict | None = None) -> ExperimentConfig:
    lines = lines or {}
    top = {f.name for f in dataclasses.fields(ExperimentConfig)}
    _reject_unknown(data, top, "", lines)
    cfg = ExperimentConfig()
    for key, value in data.items():
        if key in SECTIONS:
            if value is None:
                value = {}
            if not isinstance(value, dict):
                raise ConfigError(f"section must be a mapping", key=key, line=lines.get(key))
            section = SECTIONS[key]
            _reject_unknown(value, {f.name for f in dataclasses.fields(section)}, key, lines)
            setattr(cfg, key, section(**{k: _coerce(section, k, v, f"{key}.{k}", lines) for k, v in value.items()}))
        elif key == "flow":
            if not isinstance(value, dict) or "kind" not in value:
                raise ConfigError("flow must be a mapping with a 'kind'", key="flow", line=lines.get("flow"))
            cfg.flow = dict(value)
        else:
            setattr(cfg, key, _coerce(ExperimentConfig, key, value, key, lines))
    validate(cfg, lines)
    try:
        make_flow(cfg.flow)
    except ConfigError as exc:
        path = f"flow.{exc.key}" if exc.key else "flow"
        raise ConfigError(exc.message, key=path, line=lines.get(path, lines.get("flow"))) from None
    return cfg


def _reject_unknown(data: dict, allowed: set, prefix: str, lines: dict) -> None:
    for key in data:
        if key not in allowed:
            path = f"{prefix}.{key}" if prefix else str(key)
            hint = ", ".join(sorted(allowed))
            raise ConfigError(f"unknown key; expected one of: {hint}", key=path, line=lines.get(path))


def _coerce(cls, name: str, value, path: str, lines: dict):
    default = next(f for f in dataclasses.fields(cls) if f.name == name)
    kind = default.type if isinstance(default.type, str) else getattr(default.type, "__name__", "")
    if kind == "int" and not (isinstance(value, int) and not isinstance(value, bool)):
        raise ConfigError(f"expected an integer, got {value!r}", key=path, line=lines.get(path))
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key=path, line=lines.get(path))
        value = float(value)
    if kind == "bool" and not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", key=path, line=lines.get(path))
    if kind == "list" and not isinstance(value, list):
        raise ConfigError(f"expected a list, got {value!r}", key=path, line=lines.get(path))
    return value


def _require(ok: bool, message: str, key: str, lines: dict) -> None:
    if not ok:
        raise ConfigError(message, key=key, line=lines.get(key))


def validate(cfg: ExperimentConfig, lines: dict | None = None) -> ExperimentConfig:
    lines = lines or {}
    _require(cfg.workers >= 1, "workers must be >= 1", "workers", lines)
    _require(cfg.seed >= 0, "seed must be >= 0", "seed", lines)
    d = cfg.detect
    _require(bool(d.epsilons) and all(_positive(e) for e in d.epsilons), "epsilons must be positive numbers", "detect.epsilons", lines)
    _require(bool(d.deltas) and all(_positive(e) for e in d.deltas), "deltas must be positive numbers", "detect.deltas", lines)
    _require(d.horizon >= 1, "horizon must be >= 1", "detect.horizon", lines)
    _require(d.resolution >= 1, "resolution must be >= 1", "detect.resolution", lines)
    _require(d.gap_bound >= 1, "gap_bound must be >= 1", "detect.gap_bound", lines)
    _require(d.run_length >= 1, "run_length must be >= 1", "detect.run_length", lines)
    s = cfg.semigroup
    _require(_positive(s.epsilon), "epsilon must be positive", "semigroup.epsilon", lines)
    _require(s.horizon >= 1, "horizon must be >= 1", "semigroup.horizon", lines)
    _require(s.resolution >= 1, "resolution must be >= 1", "semigroup.resolution", lines)
    _require(s.directions in ("forward", "both"), "directions must be 'forward' or 'both'", "semigroup.directions", lines)
    _require(s.second_level_horizon >= 1, "second_level_horizon must be >= 1", "semigroup.second_level_horizon", lines)
    t = cfg.theorems
    _require(all(isinstance(x, str) for x in t.select) and bool(t.select), "select must list check ids or 'all'", "theorems.select", lines)
    _require(t.horizon >= 1, "horizon must be >= 1", "theorems.horizon", lines)
    for key in ("alpha", "mu"):
        try:
            resolve_irrational(getattr(t, key), key)
        except ConfigError as exc:
            raise ConfigError(exc.message, key=f"theorems.{key}", line=lines.get(f"theorems.{key}")) from None
    _require(1 <= t.stack_depth <= 30, "stack_depth must be in 1..30", "theorems.stack_depth", lines)
    _require(1 <= t.deep_stack_depth <= 30, "deep_stack_depth must be in 1..30", "theorems.deep_stack_depth", lines)
    _require(bool(t.shift_block) and all(b in (0, 1) for b in t.shift_block), "shift_block must be a nonempty 0/1 word", "theorems.shift_block", lines)
    _require(t.shift_window >= len(t.shift_block), "shift_window must be at least the block length", "theorems.shift_window", lines)
    _require(1 <= t.full_shift_window <= 8, "full_shift_window must be in 1..8", "theorems.full_shift_window", lines)
    _require(t.pairs >= 2, "pairs must be >= 2", "theorems.pairs", lines)
    _require(t.resolution >= 1, "resolution must be >= 1", "theorems.resolution", lines)
    _require(t.second_level_horizon >= 1, "second_level_horizon must be >= 1", "theorems.second_level_horizon", lines)
    _require(t.gap_bound >= 1, "gap_bound must be >= 1", "theorems.gap_bound", lines)
    _require(t.run_length >= 1, "run_length must be >= 1", "theorems.run_length", lines)
    o = cfg.output
    _require(all(f in ("json", "csv", "txt") for f in o.formats), "formats must be among json, csv, txt", "output.formats", lines)
    return cfg


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0


def serialize(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)


def preset_names() -> list:
    return sorted(PRESETS)
