"""Stable JSON/CSV output and text rendering of stored reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .config import SCHEMA_VERSION

SIG_DIGITS = 12


def normalize(obj):
    """Round floats to 12 significant digits and turn numpy values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    return obj


def dumps(obj) -> str:
    return json.dumps(normalize(obj), sort_keys=True, indent=2) + "\n"


def envelope(kind: str, config: dict, result) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "config": config, "result": result}


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{SIG_DIGITS}g}"
    return v


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def render(doc: dict) -> str:
    kind = doc.get("kind")
    result = doc.get("result", {})
    if kind == "theorems":
        return render_theorems(result)
    if kind == "semigroup":
        return render_semigroup(result)
    if kind == "detect":
        return render_verdict(result.get("verdict", result))
    raise ValueError(f"no renderer for report kind {kind!r}")


def render_theorems(result: dict) -> str:
    checks = result.get("checks", [])
    width = max([len(c["id"]) for c in checks] + [5])
    lines = [f"{'check':<{width}}  {'outcome':<12}  {'legs':>5}  title", "-" * (width + 40)]
    for c in checks:
        legs = c.get("legs", [])
        matched = sum(leg["match"] for leg in legs)
        lines.append(f"{c['id']:<{width}}  {c['outcome']:<12}  {matched:>2}/{len(legs):<2}  {c['title']}")
        for note in c.get("notes", []):
            lines.append(f"{'':<{width}}    - {note}")
    s = result.get("summary", {})
    lines.append("-" * (width + 40))
    lines.append(f"pass {s.get('pass', 0)}  fail {s.get('fail', 0)}  inconclusive {s.get('inconclusive', 0)}")
    return "\n".join(lines) + "\n"


def render_semigroup(result: dict) -> str:
    lines = [f"{result['count']} elements at epsilon {result['epsilon']} (horizon {result['horizon']}, {result['directions']})"]
    for e in result["elements"]:
        tag = f"  {e['tag']} d={e['symbolic_distance']:.3g}" if "tag" in e else ""
        lines.append(f"  #{e['id']:<4} t={e['time']:<7}{tag}")
    return "\n".join(lines) + "\n"


def render_verdict(v: dict) -> str:
    lines = [f"{v['property']}: {v['outcome']}"]
    lines += [f"  {n}" for n in v.get("notes", [])]
    for k, val in sorted(v.get("params", {}).items()):
        lines.append(f"  {k} = {val}")
    return "\n".join(lines) + "\n"
