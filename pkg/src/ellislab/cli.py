"""Command-line entry point: ``ellislab {simulate,semigroup,detect,theorems,report}``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import detectors as det
from . import report
from .config import ExperimentConfig, load_config, validate
from .errors import ConfigError, EllisLabError, KindError
from .flows import make_flow, orbit_rows
from .harness import run_all
from .numeric import approx_to_json, approximate_semigroup, distance_rows, second_level_semigroup, tag_elements
from .symbolic import make_algebra
from .verdict import Verdict

OUT_ENV = "ELLISLAB_OUT"

DEFAULT_POINTS = {
    "rotation": "0.0",
    "identity": "0.0",
    "annulus": "1.5,0.0",
    "circle_stack": "1,0.0",
    "torus_circle": "torus,0.1,0.2",
    "shift_pair": "0:1:0:0",
    "full_shift": "0:1:0:0",
}

PROPERTIES = (
    "proximal", "syndetic", "thick", "equicontinuous", "sensitive",
    "weakly_rigid", "uniformly_rigid", "transitive", "fixed_point",
)


def _flow_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("flow")
    g.add_argument("--flow", help="rotation, identity, circle_stack, annulus, torus_circle, shift_pair, full_shift")
    g.add_argument("--alpha", type=float, help="rotation number (numeric)")
    g.add_argument("--alpha-preset", choices=["golden", "silver"], help="rotation number by name")
    g.add_argument("--mu", type=float, help="torus skew parameter (numeric)")
    g.add_argument("--mu-preset", choices=["golden", "silver"])
    g.add_argument("--depth", type=int, help="circle stack truncation depth")
    g.add_argument("--block", help="0/1 word of the shift pair, e.g. 101")
    g.add_argument("--window", type=int, help="sequence metric window W")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./out)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ellislab", description="Flows, enveloping semigroups and theorem checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write an orbit segment as CSV")
    _common(p)
    _flow_args(p)
    p.add_argument("--point", help="starting point, space-specific text form")
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--direction", choices=["forward", "both"], default="forward")

    p = sub.add_parser("semigroup", help="approximate E(X) (and optionally E(E(X)))")
    _common(p)
    _flow_args(p)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--directions", choices=["forward", "both"])
    p.add_argument("--second-level", action="store_true")

    p = sub.add_parser("detect", help="run one detector")
    _common(p)
    _flow_args(p)
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.add_argument("--point", action="append", default=[], help="repeat for several points; default: a grid")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float, action="append", help="probe radius; repeat for a ladder")
    p.add_argument("--horizon", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--gap-bound", type=int)
    p.add_argument("--run-length", type=int)

    p = sub.add_parser("theorems", help="run the theorem checks")
    _common(p)
    p.add_argument("--all", action="store_true", help="run every registered check (the default)")
    p.add_argument("--select", nargs="+", metavar="ID")
    p.add_argument("--horizon", type=int)

    p = sub.add_parser("report", help="render a stored JSON report as text")
    p.add_argument("path")
    return parser


def effective_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    if getattr(args, "flow", None):
        cfg.flow = {"kind": args.flow}
    flow = cfg.flow
    for key in ("alpha", "mu"):
        value = getattr(args, key, None)
        preset = getattr(args, f"{key}_preset", None)
        if value is not None or preset is not None:
            flow[key] = value if value is not None else preset
    for key in ("depth", "window"):
        if getattr(args, key, None) is not None:
            flow[key] = getattr(args, key)
    if getattr(args, "block", None):
        flow["block"] = [int(c) for c in args.block]
    cmd = args.command
    if cmd == "semigroup":
        s = cfg.semigroup
        for key in ("epsilon", "horizon", "resolution", "directions"):
            if getattr(args, key) is not None:
                setattr(s, key, getattr(args, key))
        if args.second_level:
            s.second_level = True
    if cmd == "detect":
        d = cfg.detect
        if args.epsilon is not None:
            d.epsilons = [args.epsilon]
        if args.delta:
            d.deltas = list(args.delta)
        for key in ("horizon", "resolution", "gap_bound", "run_length"):
            if getattr(args, key) is not None:
                setattr(d, key, getattr(args, key))
        if args.point:
            d.points = list(args.point)
    if cmd == "theorems":
        t = cfg.theorems
        if args.select:
            t.select = list(args.select)
        elif args.all:
            t.select = ["all"]
        if args.horizon is not None:
            t.horizon = args.horizon
    validate(cfg)
    if cmd != "theorems":
        make_flow(cfg.flow)
    return cfg


def config_echo(cfg: ExperimentConfig) -> dict:
    """Effective config for embedding in reports; worker count and output paths do not affect results."""
    d = cfg.to_dict()
    d.pop("workers")
    d.pop("output")
    return d


def out_dir(args, cfg: ExperimentConfig) -> Path:
    return Path(args.out or cfg.output.dir or os.environ.get(OUT_ENV) or "out")


def cmd_simulate(args, cfg) -> int:
    flow = make_flow(cfg.flow)
    text = args.point or DEFAULT_POINTS[cfg.flow["kind"]]
    x = flow.space.parse_point(text)
    rows = orbit_rows(flow, x, args.horizon, args.direction)
    path = report.write_csv(out_dir(args, cfg) / "orbit.csv", ["t", "coord1", "coord2", "tag"], rows)
    print(f"wrote {len(rows)} rows to {path}")
    return 0


def cmd_semigroup(args, cfg) -> int:
    s = cfg.semigroup
    flow = make_flow(cfg.flow)
    grid = flow.space.sample_grid(s.resolution).points
    first = approximate_semigroup(flow, grid, s.horizon, s.epsilon, s.directions)
    try:
        algebra = make_algebra(flow)
    except KindError:
        algebra = None
    tags = tag_elements(first, algebra) if algebra is not None else None
    result = approx_to_json(first, tags)
    if s.second_level:
        second = second_level_semigroup(first, min(s.horizon, s.second_level_horizon), s.epsilon)
        tags2 = tag_elements(second, algebra, second_level=True) if algebra is not None else None
        result["second"] = approx_to_json(second, tags2)
    out = out_dir(args, cfg)
    report.write_json(out / "semigroup.json", report.envelope("semigroup", config_echo(cfg), result))
    D = first.pairwise_distances()
    report.write_csv(out / "distances.csv", ["element"] + [str(k) for k in range(len(first))],
                     [[k, *row] for k, row in enumerate(D)])
    report.write_csv(out / "identity_distance.csv", ["t", "distance"], distance_rows(first))
    print(f"{len(first)} elements; wrote {out / 'semigroup.json'}")
    return 0


def cmd_detect(args, cfg) -> int:
    d = cfg.detect
    flow = make_flow(cfg.flow)
    space = flow.space
    eps = d.epsilons[0]
    if d.points:
        points = space.pack([space.parse_point(t) for t in d.points])
    else:
        points = space.sample_grid(d.resolution).points
    prop = args.property
    rs = None
    if prop in ("proximal", "syndetic", "thick"):
        if points.shape[0] != 2:
            raise ConfigError(f"{prop} needs exactly two --point values", key="detect.points")
        rs = det.proximality(flow, points[0], points[1], eps, d.horizon)
        if prop == "proximal":
            ok = len(rs) > 0
            note = f"{len(rs)} times within {eps:g}; min distance {rs.min_value:.12g}"
        elif prop == "syndetic":
            ok = det.syndeticity(rs, d.gap_bound)
            note = f"max gap {rs.max_gap}, boundary gaps {rs.boundary_gaps}, gap bound {d.gap_bound}"
        else:
            ok = det.thick_syndeticity(rs, d.run_length, d.gap_bound)
            note = f"run length {d.run_length}, gap bound {d.gap_bound}"
        verdict = Verdict(prop, "holds" if ok else "fails", [], {"epsilon": eps, "horizon": d.horizon}, [note])
    elif prop == "equicontinuous":
        results = [det.equicontinuity_at(flow, x, eps, d.horizon, d.deltas) for x in points]
        bad = [v for delta, v in results if delta is None]
        verdict = bad[0] if bad else results[-1][1]
    elif prop == "sensitive":
        _, verdict = det.sensitivity(flow, points, d.horizon, d.epsilons, d.deltas)
    elif prop == "weakly_rigid":
        _, verdict = det.weak_rigidity(flow, points, eps, d.horizon)
    elif prop == "uniformly_rigid":
        _, verdict = det.uniform_rigidity(flow, points, eps, d.horizon)
    elif prop == "transitive":
        grid = space.sample_grid(d.resolution).points
        _, _, verdict = det.transitivity(flow, points[0], eps, d.horizon, grid)
    else:
        _, verdict = det.unique_minimal_fixed_point(flow, points, eps, d.horizon)
    out = out_dir(args, cfg)
    result = {"verdict": verdict.to_json()}
    if rs is not None:
        result["return_set"] = rs.to_json()
        report.write_csv(out / "return_set.csv", ["t", "distance"], rs.rows())
    report.write_json(out / "verdict.json", report.envelope("detect", config_echo(cfg), result))
    print(report.render_verdict(result["verdict"]), end="")
    return 0


def cmd_theorems(args, cfg) -> int:
    result = run_all(cfg.theorems, seed=cfg.seed, workers=cfg.workers)
    doc = report.envelope("theorems", config_echo(cfg), result)
    out = out_dir(args, cfg)
    report.write_json(out / "theorems.json", doc)
    table = report.render_theorems(result)
    (out / "theorems.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 1 if result["summary"]["fail"] else 0


def cmd_report(args) -> int:
    print(report.render(report.load_json(args.path)), end="")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return cmd_report(args)
        cfg = effective_config(args)
        handler = {"simulate": cmd_simulate, "semigroup": cmd_semigroup, "detect": cmd_detect, "theorems": cmd_theorems}
        return handler[args.command](args, cfg)
    except (EllisLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
