"""Executable instances of the theorems relating (X, T) and (E(X), T).

Each check binds detectors, sampled semigroups and the closed-form algebras
to concrete flows.  A check is a list of legs; every leg carries the outcome
the theorem (or example) predicts for that instance.  The check passes when
every leg matches, fails when a conclusion leg comes out with the opposite
definite outcome, and is inconclusive otherwise.
"""

from __future__ import annotations

import functools
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import detectors as det
from .config import TheoremsConfig
from .errors import Inconclusive, UnknownCheck
from .flows import (
    AnnulusFlow,
    CircleStackFlow,
    Flow,
    InducedFlow,
    Rotation,
    ShiftFlow,
    TorusCircleFlow,
    resolve_irrational,
)
from .numeric import approximate_semigroup, is_isolated_identity, second_level_semigroup, tag_elements
from .spaces import OUTER, FunctionMetric, SeqPoint, SeqSpace, stack_radius
from .symbolic import (
    H1,
    H2,
    AnnulusAlgebra,
    Collapse,
    InducedAnnulusAlgebra,
    Odometer,
    OdometerAlgebra,
    Power,
    ShiftAlgebra,
    check_equivariance,
    group_check,
    is_injective_on,
    iso_G,
    limit_of_powers,
)
from .verdict import Verdict, Witness

ROLES = ("hypothesis", "conclusion", "context")
RELATIONS = ("implies", "iff", "counterexample", "equivalence", "example")


@dataclass
class Leg:
    role: str
    claim: str
    expected: str
    verdict: Verdict

    @property
    def matches(self) -> bool:
        return self.verdict.outcome == self.expected

    @property
    def contradicts(self) -> bool:
        return self.verdict.outcome != "inconclusive" and not self.matches

    def to_json(self) -> dict:
        return {
            "role": self.role,
            "claim": self.claim,
            "expected": self.expected,
            "match": self.matches,
            "verdict": self.verdict.to_json(),
        }


@dataclass
class CheckReport:
    id: str
    title: str
    relation: str
    instance: str
    outcome: str
    legs: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "relation": self.relation,
            "instance": self.instance,
            "outcome": self.outcome,
            "notes": list(self.notes),
            "legs": [leg.to_json() for leg in self.legs],
        }


@dataclass
class TheoremCheck:
    id: str
    title: str
    relation: str
    instance: str
    min_horizon: int
    build: Callable[["Context"], list]

    def run(self, cfg: TheoremsConfig, seed: int) -> CheckReport:
        if cfg.horizon < self.min_horizon:
            note = f"resource exhausted: horizon {cfg.horizon} is below the {self.min_horizon} this check needs"
            return CheckReport(self.id, self.title, self.relation, self.instance, "inconclusive", [], [note])
        ctx = Context(cfg, np.random.default_rng([seed, zlib.crc32(self.id.encode())]))
        legs = self.build(ctx)
        return CheckReport(self.id, self.title, self.relation, self.instance, judge(legs), legs, judge_notes(legs))


def judge(legs: list) -> str:
    if any(leg.role == "conclusion" and leg.contradicts for leg in legs):
        return "fail"
    if all(leg.matches for leg in legs):
        return "pass"
    return "inconclusive"


def judge_notes(legs: list) -> list:
    notes = []
    for leg in legs:
        if not leg.matches:
            what = "contradicts" if leg.contradicts else "does not establish"
            notes.append(f"{leg.role} '{leg.claim}' {what} the expected outcome ({leg.verdict.outcome} vs {leg.expected})")
    return notes


@dataclass
class Context:
    cfg: TheoremsConfig
    rng: np.random.Generator

    @property
    def H(self) -> int:
        return int(self.cfg.horizon)

    @property
    def alpha(self) -> float:
        return resolve_irrational(self.cfg.alpha, "alpha")

    @property
    def mu(self) -> float:
        return resolve_irrational(self.cfg.mu, "mu")


def _verdict(prop: str, ok: bool, note: str, witnesses=(), **params) -> Verdict:
    return Verdict(prop, "holds" if ok else "fails", list(witnesses), params, [note])


# ---------------------------------------------------------------------------
# shared instances


def stack_pairs(flow: CircleStackFlow, rng: np.random.Generator, n: int):
    """Random pairs on the circle stack, half on shared rings, with their distality lower bounds."""
    rings = flow.space.rings
    pairs, bounds = [], []
    for i in range(n):
        r1 = rng.choice(rings)
        r2 = r1 if i % 2 == 0 else rng.choice(rings[rings != r1])
        a1, a2 = rng.random(2)
        pairs.append([[r1, a1], [r2, a2]])
        if r1 == r2:
            d = float(np.minimum(abs(a1 - a2), 1 - abs(a1 - a2)))
        else:
            d = float(abs(stack_radius(r1) - stack_radius(r2)))
        bounds.append(d)
    return np.array(pairs, dtype=float), np.array(bounds)


@dataclass
class SampledFamily:
    """Closed-form elements sampled on a grid, as points of the induced flow."""

    flow: InducedFlow
    images: np.ndarray
    labels: list


def odometer_family(depth: int, resolution: int, values=None) -> SampledFamily:
    alg = OdometerAlgebra(depth)
    grid = alg.space.sample_grid(resolution).points
    metric = FunctionMetric.dprime(alg.space, grid)
    values = range(1 << depth) if values is None else values
    elems = [Odometer(int(v), depth) for v in values]
    images = np.stack([alg.evaluate(e, grid) for e in elems])
    return SampledFamily(InducedFlow(alg.flow, metric), images, [f"v={e.value}" for e in elems])


def shift_family(block, window: int, nmax: int = 20, part: int | None = None) -> SampledFamily:
    """{sigma^n : |n| <= nmax} and Collapse sampled on the shift-pair grid (optionally one orbit closure)."""
    alg = ShiftAlgebra(block, window)
    grid = alg.space.sample_grid(1).points
    if part is not None:
        grid = grid[grid[:, 0] == part]
    metric = FunctionMetric.sup(alg.space, grid)
    elems = [Power(n) for n in range(-nmax, nmax + 1)] + [Collapse()]
    images = np.stack([alg.evaluate(e, grid) for e in elems])
    labels = [f"sigma^{e.n}" if isinstance(e, Power) else "g" for e in elems]
    return SampledFamily(InducedFlow(alg.flow, metric), images, labels)


def torus_enveloping(flow: TorusCircleFlow, y: np.ndarray, pool_horizon: int, extra: int = 8):
    """Sampled iterates pi^t, |t| <= pool_horizon, on a grid whose first point is y; metric S(y, .)."""
    grid = np.concatenate([y[None], flow.space.sample_grid(extra).points[:: max(1, extra)]])
    metric = FunctionMetric.at_point(flow.space, grid, 0)
    times = np.arange(-pool_horizon, pool_horizon + 1)
    pool = flow.trajectory(times, grid)
    return InducedFlow(flow, metric), pool, times


def torus_sensitivity_leg(ctx: Context, flow: TorusCircleFlow, role: str) -> tuple[Leg, float]:
    grid = flow.space.sample_grid(8, part="torus").points
    eps, v = det.sensitivity(flow, grid, min(ctx.H, 1000), [0.25, 0.2, 0.1, 0.05])
    return Leg(role, "torus part is sensitive (every 8x8 grid point)", "holds", v), eps or 0.0


def enveloping_sensitivity_leg(ctx: Context, flow: TorusCircleFlow, eps_y: float, role: str) -> Leg:
    """Sensitivity of the induced flow measured through the sub-basic entourage at y on the torus."""
    y = np.array([0.0, 0.2, 0.7])
    induced, pool, times = torus_enveloping(flow, y, min(ctx.H, 10000))
    picks = [0, 1, -1, 7, -7, 50]
    elements = np.stack([pool[times == s][0] for s in picks])
    target = max(eps_y / 2.0, 1e-3)
    ladder = sorted({target, 0.25, 0.2, 0.1, 0.05} - {x for x in (0.25, 0.2, 0.1, 0.05) if x > 0.5})
    eps, v = det.sensitivity(induced, elements, min(ctx.H, 1000), ladder, deltas=(0.1, 0.03, 0.01), candidates=pool)
    ok = eps is not None and eps >= target
    v.params["required"] = target
    if not ok and v.outcome == "holds":
        v = Verdict(v.prop, "fails", v.witnesses, v.params, [f"separation constant {eps} below {target:g}"])
    claim = f"E(X) sensitive under S(y, eps) with eps >= {target:.3g}"
    return Leg(role, claim, "holds", v)


def transitivity_leg(flow: Flow, x, grid, eps: float, horizon: int, role: str, expected: str, claim: str) -> Leg:
    _, _, v = det.transitivity(flow, x, eps, horizon, grid)
    return Leg(role, claim, expected, v)


# ---------------------------------------------------------------------------
# checks


def check_dis(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    flow = CircleStackFlow(k)
    pairs, lb = stack_pairs(flow, ctx.rng, ctx.cfg.pairs)
    legs = [Leg("hypothesis", f"X = circle stack (k={k}) is distal", "holds", det.distality(flow, pairs, ctx.H, lb))]
    fam = odometer_family(k, 4)
    m = fam.images.shape[0]
    idx = ctx.rng.choice(m, size=(ctx.cfg.pairs, 2))
    idx = idx[idx[:, 0] != idx[:, 1]]
    epairs = np.stack([fam.images[idx[:, 0]], fam.images[idx[:, 1]]], axis=1)
    elb = fam.flow.space.dist(epairs[:, 0], epairs[:, 1])
    legs.append(Leg("conclusion", "E(X) = odometer is distal", "holds", det.distality(fam.flow, epairs, min(ctx.H, 1 << k), elb)))
    ann = AnnulusFlow(ctx.alpha)
    space = ann.space
    x, y = space.from_polar(1.5, 0.0), space.from_polar(1.2, 0.0)
    rs = det.proximality(ann, x, y, 0.05, min(ctx.H, 1000))
    legs.append(Leg("context", "annulus has a proximal pair (not distal)", "holds", _return_verdict("proximal_pair", rs, ann, x, y, 0.05)))
    alg = AnnulusAlgebra(ctx.alpha)
    grid = space.sample_grid(ctx.cfg.resolution).points
    metric = FunctionMetric.sup(space, grid)
    induced = InducedFlow(ann, metric)
    e, h = grid, alg.evaluate(H1(0.0), grid)
    rs = det.proximality(induced, e, h, 0.05, min(ctx.H, 1000))
    legs.append(Leg("context", "E(annulus) has a proximal pair (e, H1(0))", "holds", _return_verdict("proximal_pair", rs, induced, e, h, 0.05)))
    return legs


def _return_verdict(prop: str, rs: det.ReturnSet, flow: Flow, x, y, eps: float) -> Verdict:
    params = {"epsilon": eps, "window": [rs.lo, rs.hi], "hits": len(rs), "min_distance": rs.min_value}
    if len(rs):
        t = int(rs.hits[np.argmin(np.abs(rs.hits))])
        P = np.stack([x, y])
        Q = flow.act(t, P)
        w = Witness("pair", P, t, float(flow.space.dist(Q[0], Q[1])), eps, space=flow.space)
        return Verdict(prop, "holds", [w], params, [f"{len(rs)} times within {eps:g}"])
    return Verdict(prop, "fails", [], params, [f"exhaustive scan of [{rs.lo}, {rs.hi}]: distance never below {eps:g} (min {rs.min_value:.12g})"])


def _permutation_group(first, second) -> Verdict:
    """Each second-level element permutes the first-level representatives, and the set is a group."""
    F = first.stacked()
    perms = []
    for rep in second.elements:
        D = first.metric.dist(rep.images[:, None], F[None, :])
        perm = D.argmin(axis=1)
        if D[np.arange(len(perm)), perm].max() > 1e-9 or len(set(perm.tolist())) != len(perm):
            return Verdict("group_of_homeomorphisms", "fails", [], {"elements": len(second)}, ["a second-level element is not a permutation"])
        perms.append(tuple(perm.tolist()))
    pset = set(perms)
    ident = tuple(range(F.shape[0]))
    closed = all(tuple(a[i] for i in b) in pset for a in perms for b in perms)
    inverses = all(any(tuple(a[i] for i in b) == ident for b in perms) for a in perms)
    ok = closed and inverses and ident in pset
    note = f"{len(perms)} permutations of {F.shape[0]} elements; closed={closed}, inverses={inverses}"
    return _verdict("group_of_homeomorphisms", ok, note, elements=len(perms))


def check_group(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    alg = OdometerAlgebra(k)
    legs = [Leg("hypothesis", f"E(X) = Z/2^{k} is a group", "holds", group_check(alg, alg.elements()))]
    flow = CircleStackFlow(k)
    grid = flow.space.sample_grid(4).points
    first = approximate_semigroup(flow, grid, ctx.H, 1e-4)
    second = second_level_semigroup(first, min(ctx.H, 4 << k), 1e-4)
    legs.append(Leg("conclusion", "numeric E(E(X)) acts by a group of permutations", "holds", _permutation_group(first, second)))
    ann = AnnulusAlgebra(ctx.alpha)
    legs.append(Leg("context", "annulus E(X) is not a group", "fails", group_check(ann, ann.probe_set(ctx.rng, 20))))
    return legs


def _equicontinuity_everywhere(flow: Flow, points, eps: float, horizon: int, deltas, candidates=None, prop="equicontinuous") -> Verdict:
    worst = None
    for x in points:
        d, v = det.equicontinuity_at(flow, x, eps, horizon, deltas, candidates)
        if d is None:
            return Verdict(prop, "fails", v.witnesses, {"epsilon": eps, "horizon": horizon}, v.notes)
        worst = d if worst is None else min(worst, d)
    return _verdict(prop, True, f"delta = {worst:g} works at all {len(points)} points for epsilon {eps:g}", epsilon=eps, delta=worst, horizon=horizon)


def check_equi(ctx: Context) -> list:
    rot = Rotation(ctx.alpha)
    grid = rot.space.sample_grid(16).points
    H = min(ctx.H, 2000)
    legs = []
    for eps in (0.25, 0.1):
        legs.append(Leg("hypothesis", f"rotation equicontinuous at eps={eps}", "holds",
                        _equicontinuity_everywhere(rot, grid, eps, H, [eps, eps / 10])))
    first = approximate_semigroup(rot, grid, ctx.H, 0.01)
    S = first.stacked()
    induced = InducedFlow(rot, first.metric)
    legs.append(Leg("conclusion", "E(rotation) equicontinuous at eps=0.1", "holds",
                    _equicontinuity_everywhere(induced, S[:8], 0.1, H, [0.1, 0.05, 0.01], candidates=S)))
    legs.append(transitivity_leg(rot, grid[0], grid, 0.05, H, "context", "holds", "rotation is point-transitive (converse applies)"))
    return legs


def check_t3(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    flow = CircleStackFlow(k)
    pairs, lb = stack_pairs(flow, ctx.rng, ctx.cfg.pairs)
    H = min(ctx.H, 4 << k)
    legs = [Leg("hypothesis", "X distal", "holds", det.distality(flow, pairs, ctx.H, lb))]
    grid = flow.space.sample_grid(8).points
    ring_verdicts = []
    for ring in flow.space.rings:
        sub = grid[grid[:, 0] == ring]
        ring_verdicts.append(_equicontinuity_everywhere(flow, sub, 0.1, H, [0.1], candidates=sub))
    ok = all(v.holds for v in ring_verdicts)
    legs.append(Leg("hypothesis", "every ring subflow is equicontinuous (hereditary evidence)", "holds",
                    _verdict("hereditarily_almost_equicontinuous", ok, f"{len(ring_verdicts)} closed invariant rings checked", rings=len(ring_verdicts))))
    fam = odometer_family(k, 4)
    legs.append(Leg("conclusion", "E(X) = odometer equicontinuous", "holds",
                    _equicontinuity_everywhere(fam.flow, fam.images[:: max(1, len(fam.images) // 8)], 0.1, H, [0.1, 0.05, 0.01], candidates=fam.images)))
    return legs


def check_circ(ctx: Context) -> list:
    k = ctx.cfg.deep_stack_depth
    flow = CircleStackFlow(k)
    x = np.array([float(OUTER), 0.0])
    d, v = det.equicontinuity_at(flow, x, 0.25, ctx.H, [0.1, 0.01, 1e-3, 1e-4])
    legs = [Leg("hypothesis", f"X (k={k}) not equicontinuous at the outer ring", "fails", v)]
    near = [m << (k - 6) for m in range(64)]
    rng_vals = ctx.rng.integers(0, 1 << k, size=64).tolist()
    fam = odometer_family(k, 4, values=sorted(set(near + rng_vals)))
    points = fam.images[:4]
    legs.append(Leg("conclusion", "truncated E(X) = odometer equicontinuous", "holds",
                    _equicontinuity_everywhere(fam.flow, points, 0.25, min(ctx.H, 2000), [0.1, 0.01, 1e-3], candidates=fam.images)))
    grid = flow.space.sample_grid(8).points
    legs.append(transitivity_leg(flow, np.array([1.0, 0.0]), grid, 0.05, min(ctx.H, 2000), "context", "fails", "X is not point-transitive"))
    return legs


def check_iso(ctx: Context) -> list:
    alg = AnnulusAlgebra(ctx.alpha)
    second = InducedAnnulusAlgebra(alg)
    probes = alg.probe_set(ctx.rng, 100)
    inj, pair = is_injective_on(second, probes, iso_G)
    note = "G injective on the probe set" if inj else f"G collides on {pair}"
    legs = [Leg("conclusion", "G is a bijection onto its image on the probe set", "holds", _verdict("bijective", inj, note, probes=len(probes)))]
    subset = [probes[5], probes[11], probes[111]]
    bad = [(t, e) for e in probes for t in range(-100, 101) if not check_equivariance(second, t, e, subset)]
    note = f"G(t.e) = t.G(e) for all |t| <= 100 on {len(probes)} elements" if not bad else f"{len(bad)} violations, first {bad[0]}"
    legs.append(Leg("conclusion", "G is equivariant", "holds", _verdict("equivariant", not bad, note, violations=len(bad))))
    rot = Rotation(ctx.alpha)
    grid = rot.space.sample_grid(16).points
    H = min(ctx.H, 2000)
    first = approximate_semigroup(rot, grid, H, 0.05)
    sec = second_level_semigroup(first, H, 0.05)
    ok = len(first) == len(sec)
    legs.append(Leg("conclusion", "rotation: E(X) and E(E(X)) nets have equal size", "holds",
                    _verdict("equal_cluster_count", ok, f"{len(first)} vs {len(sec)} clusters at eps 0.05", first=len(first), second=len(sec))))
    return legs


def check_annulus(ctx: Context) -> list:
    alg = AnnulusAlgebra(ctx.alpha)
    space = alg.space
    X = space.random(ctx.rng, 1000)
    phi, chi = ctx.rng.random(2)
    relations = relation_table(phi, chi)
    errs = []
    for a, b in relations:
        lhs = alg.evaluate(alg.compose(a, b), X)
        rhs = alg.evaluate(a, alg.evaluate(b, X))
        errs.append(float(np.max(space.dist(lhs, rhs))))
    legs = [Leg("conclusion", "eight composition relations agree with pointwise evaluation", "holds",
                _verdict("table_coherence", max(errs) <= 1e-9, f"max error {max(errs):.3g} over {len(X)} points", max_error=max(errs)))]
    flow = alg.flow
    grid = space.sample_grid(ctx.cfg.resolution).points
    first = approximate_semigroup(flow, grid, ctx.H, 0.05)
    tags = tag_elements(first, alg)
    n1 = sum(t.family == "H1" for t in tags)
    n2 = sum(t.family == "H2" for t in tags)
    worst = max(t.distance for t in tags)
    ok = worst < 0.05 and n1 >= 10 and n2 >= 10
    legs.append(Leg("conclusion", "numeric E(X) representatives match closed-form elements", "holds",
                    _verdict("symbolic_recovery", ok, f"{len(tags)} clusters: {n1} H1, {n2} H2; worst distance {worst:.4g}", clusters=len(tags), h1=n1, h2=n2)))
    beta = float(ctx.rng.random())
    dists, times, n_prev = [], [], 15  # radii collapse to 1 within 2^-16 by n = 16
    for tol in (1e-1, 1e-2, 1e-3):
        lim = limit_of_powers(alg, beta, tol, ctx.H)
        n = next(m for m in lim.witnesses if m > n_prev)
        dists.append(float(first.metric.dist(flow.act(n, grid), alg.evaluate(lim.element, grid))))
        times.append(n)
        n_prev = n
    ok = all(d < 2 * tol for d, tol in zip(dists, (1e-1, 1e-2, 1e-3)))
    legs.append(Leg("conclusion", "h^{n_k} -> H1(beta) along recurrence times", "holds",
                    _verdict("convergence", ok, f"n_k = {times}: distances {', '.join(f'{d:.3g}' for d in dists)}", times=times, beta=beta)))
    second = second_level_semigroup(first, min(ctx.H, ctx.cfg.second_level_horizon), 0.05)
    second_alg = InducedAnnulusAlgebra(alg)
    tags2 = tag_elements(second, alg, second_level=True)
    table_err = 0.0
    S = first.stacked()
    for tg, rep in zip(tags2, second.elements):
        expected = np.stack([alg.evaluate(second_alg.apply(tg.element, Power(s)), grid) for s in first.rep_times])
        table_err = max(table_err, float(second.metric.dist(rep.images, expected)))
    m1 = sum(t.family == "IH1" for t in tags2)
    m2 = sum(t.family == "IH2" for t in tags2)
    ok = table_err < 0.05 and m1 >= 1 and m2 >= 1
    legs.append(Leg("conclusion", "second-level representatives follow the IH1/IH2 action tables", "holds",
                    _verdict("second_level_tables", ok, f"{len(tags2)} clusters ({m1} IH1, {m2} IH2); worst table distance {table_err:.4g}",
                             clusters=len(tags2), ih1=m1, ih2=m2)))
    return legs


def relation_table(phi: float, chi: float) -> list:
    """The eight composition relations as (a, b) pairs whose product a∘b is tabulated."""
    return [
        (Power(1), H1(phi)),
        (Power(1), H2(phi)),
        (H1(phi), H2(phi)),
        (H2(phi), H1(phi)),
        (H1(phi), H2(chi)),
        (H2(chi), H1(phi)),
        (H2(phi), H2(chi)),
        (H1(phi), H1(chi)),
    ]


def _single_one(window: int) -> tuple[ShiftFlow, np.ndarray]:
    flow = ShiftFlow(SeqSpace(window))
    return flow, flow.space.pack([SeqPoint(0, 0, (1,), 0)])


def _isolation_leg(flow: Flow, grid: np.ndarray, H: int, eps: float, role: str, expected: str, claim: str) -> Leg:
    first = approximate_semigroup(flow, grid, H, eps)
    isolated, dmin, t = is_isolated_identity(first, eps)
    v = _verdict("identity_not_isolated", not isolated, f"min distance to e over 0 < |t| <= {H}: {dmin:.12g} at t = {t}",
                 min_distance=dmin, t=t, epsilon=eps)
    return Leg(role, claim, expected, v)


def check_niso(ctx: Context) -> list:
    legs = []
    rot = Rotation(ctx.alpha)
    g = rot.space.sample_grid(16).points
    H = min(ctx.H, 2000)
    legs.append(Leg("hypothesis", "rotation weakly rigid", "holds", det.weak_rigidity(rot, g[:3], 0.01, H)[1]))
    legs.append(_isolation_leg(rot, g, H, 0.01, "conclusion", "holds", "rotation: e not isolated in E(X)"))
    k = ctx.cfg.stack_depth
    st = CircleStackFlow(k)
    pts = np.array([[float(n), 0.3] for n in range(1, k + 1)])
    legs.append(Leg("hypothesis", f"circle stack (k={k}) weakly rigid", "holds", det.weak_rigidity(st, pts, 1e-3, H)[1]))
    legs.append(_isolation_leg(st, st.space.sample_grid(4).points, H, 1e-3, "conclusion", "holds", "circle stack: e not isolated"))
    fs, x = _single_one(ctx.cfg.full_shift_window)
    legs.append(Leg("hypothesis", "full shift not weakly rigid", "fails", det.weak_rigidity(fs, x, 0.5, H)[1]))
    legs.append(_isolation_leg(fs, x, H, 0.5, "conclusion", "fails", "full shift: e isolated"))
    return legs


def _odometer_insensitive(ctx: Context, k: int, role: str) -> Leg:
    fam = odometer_family(k, 4)
    pts = fam.images[:: max(1, len(fam.images) // 8)]
    eps, v = det.sensitivity(fam.flow, pts, min(ctx.H, 1 << k), [0.25, 0.1, 0.05, 0.01], deltas=(0.1, 0.01, 1e-3), candidates=fam.images)
    return Leg(role, "E(circle stack) = odometer is sensitive", "fails", v)


def _full_shift_E_insensitive(ctx: Context, role: str) -> Leg:
    fs = ShiftFlow(SeqSpace(ctx.cfg.full_shift_window))
    grid = fs.space.sample_grid(3).points
    metric = FunctionMetric.sup(fs.space, grid)
    induced = InducedFlow(fs, metric)
    H = min(ctx.H, 200)
    pool = fs.trajectory(np.arange(-H, H + 1), grid)
    eps, v = det.sensitivity(induced, grid[None], H, [0.25, 0.1, 0.05, 0.01], deltas=(0.5, 0.1), candidates=pool)
    return Leg(role, "E(full shift) is sensitive at e", "fails", v)


def check_wr(ctx: Context) -> list:
    tc = TorusCircleFlow(ctx.mu, ctx.alpha)
    leg, eps_y = torus_sensitivity_leg(ctx, tc, "context")
    legs = [leg, enveloping_sensitivity_leg(ctx, tc, eps_y, "hypothesis")]
    pts = tc.space.random(ctx.rng, 2, part="torus")
    pts = np.concatenate([pts, tc.space.random(ctx.rng, 1, part="circle")])
    legs.append(Leg("conclusion", "torus-circle flow weakly rigid (3 random points, eps 0.1)", "holds", det.weak_rigidity(tc, pts, 0.1, ctx.H)[1]))
    fs, x = _single_one(ctx.cfg.full_shift_window)
    legs.append(Leg("context", "full shift not weakly rigid", "fails", det.weak_rigidity(fs, x, 0.5, min(ctx.H, 1000))[1]))
    legs.append(_full_shift_E_insensitive(ctx, "context"))
    return legs


def check_fullshift(ctx: Context) -> list:
    fs, x = _single_one(ctx.cfg.full_shift_window)
    t, v = det.weak_rigidity(fs, x, 0.5, ctx.H)
    legs = [Leg("hypothesis", "full shift not weakly rigid (single 1 never returns)", "fails", v)]
    legs.append(_isolation_leg(fs, x, min(ctx.H, 1000), 0.5, "hypothesis", "fails", "e isolated in E(full shift)"))
    legs.append(_full_shift_E_insensitive(ctx, "conclusion"))
    return legs


def check_sensitive(ctx: Context) -> list:
    tc = TorusCircleFlow(ctx.mu, ctx.alpha)
    leg, eps_y = torus_sensitivity_leg(ctx, tc, "hypothesis")
    grid = tc.space.sample_grid(16, part="torus").points
    y = np.array([0.0, 0.2, 0.7])
    legs = [leg, transitivity_leg(tc, y, grid, 0.1, min(ctx.H, 10000), "hypothesis", "holds", "phi(p) = p y maps onto the torus (orbit of y dense)")]
    legs.append(enveloping_sensitivity_leg(ctx, tc, eps_y, "conclusion"))
    return legs


def _torus_pairs(flow: TorusCircleFlow, rng: np.random.Generator, n: int):
    A = flow.space.random(rng, n)
    B = flow.space.random(rng, n)
    pairs = np.stack([A, B], axis=1)
    same = A[:, 0] == B[:, 0]
    d1 = np.minimum(abs(A[:, 1] - B[:, 1]), 1 - abs(A[:, 1] - B[:, 1]))
    return pairs, np.where(same, d1, 1.0)


def check_sub(ctx: Context) -> list:
    tc = TorusCircleFlow(ctx.mu, ctx.alpha)
    pairs, lb = _torus_pairs(tc, ctx.rng, ctx.cfg.pairs)
    legs = [Leg("hypothesis", "torus-circle flow distal", "holds", det.distality(tc, pairs, min(ctx.H, 2000), lb))]
    leg, eps_y = torus_sensitivity_leg(ctx, tc, "hypothesis")
    legs.append(leg)
    grid = tc.space.sample_grid(16, part="torus").points
    starts = tc.space.random(ctx.rng, 3, part="torus")
    minimal = [det.transitivity(tc, s, 0.1, min(ctx.H, 10000), grid)[2] for s in starts]
    ok = all(v.holds for v in minimal)
    legs.append(Leg("hypothesis", "torus is minimal (random orbits dense)", "holds",
                    _verdict("minimal", ok, f"{sum(v.holds for v in minimal)}/3 random orbits cover the torus grid", witnesses=[w for v in minimal for w in v.witnesses])))
    legs.append(enveloping_sensitivity_leg(ctx, tc, eps_y, "conclusion"))
    return legs


def check_sensE(ctx: Context) -> list:
    tc = TorusCircleFlow(ctx.mu, ctx.alpha)
    y = np.array([0.0, 0.2, 0.7])
    H = min(ctx.H, 10000)
    legs = [transitivity_leg(tc, y, tc.space.sample_grid(16, part="torus").points, 0.1, H, "hypothesis", "holds", "torus point-transitive")]
    pts = tc.space.random(ctx.rng, 2, part="torus")
    legs.append(Leg("hypothesis", "torus weakly rigid", "holds", det.weak_rigidity(tc, pts, 0.1, ctx.H)[1]))
    sample = tc.space.random(ctx.rng, 64, part="torus")
    legs.append(Leg("hypothesis", "torus not uniformly rigid (64 random points, eps 0.1)", "fails", det.uniform_rigidity(tc, sample, 0.1, H)[1]))
    leg, eps_y = torus_sensitivity_leg(ctx, tc, "context")
    legs.append(leg)
    legs.append(enveloping_sensitivity_leg(ctx, tc, eps_y, "conclusion"))
    k = ctx.cfg.stack_depth
    st = CircleStackFlow(k)
    legs.append(Leg("context", "circle stack weakly rigid", "holds", det.weak_rigidity(st, np.array([[float(n), 0.3] for n in range(1, k + 1)]), 1e-3, H)[1]))
    legs.append(transitivity_leg(st, np.array([1.0, 0.0]), st.space.sample_grid(8).points, 0.05, min(H, 2000), "context", "fails",
                                 "circle stack not point-transitive (hypothesis dropped)"))
    legs.append(_odometer_insensitive(ctx, k, "context"))
    return legs


def check_ad2(ctx: Context) -> list:
    rot = Rotation(ctx.alpha)
    grid = rot.space.sample_grid(16).points
    H = min(ctx.H, 2000)
    legs = [transitivity_leg(rot, grid[0], grid, 0.05, H, "hypothesis", "holds", "rotation point-transitive")]
    legs.append(Leg("conclusion", "rotation almost equicontinuous (all grid points)", "holds", _equicontinuity_everywhere(rot, grid, 0.1, H, [0.1])))
    fine = rot.space.sample_grid(64).points
    trans = [det.transitivity(rot, x, 0.05, H, fine)[0] for x in grid]
    legs.append(Leg("conclusion", "Eq(X) = Trans(X) on the grid", "holds",
                    _verdict("eq_equals_trans", all(trans), f"{sum(trans)}/{len(grid)} equicontinuity points are transitive")))
    tc = TorusCircleFlow(ctx.mu, ctx.alpha)
    tgrid = tc.space.sample_grid(16, part="torus").points
    y = np.array([0.0, 0.2, 0.7])
    legs.append(transitivity_leg(tc, y, tgrid, 0.1, min(ctx.H, 10000), "hypothesis", "holds", "torus point-transitive"))
    leg, _ = torus_sensitivity_leg(ctx, tc, "conclusion")
    legs.append(leg)
    d, v = det.equicontinuity_at(tc, y, 0.25, min(ctx.H, 1000), [0.1, 0.01, 1e-3])
    legs.append(Leg("context", "torus not equicontinuous at y (sensitive branch)", "fails", v))
    return legs


def check_ur(ctx: Context) -> list:
    rot = Rotation(ctx.alpha)
    grid = rot.space.sample_grid(16).points
    H = min(ctx.H, 2000)
    legs = [transitivity_leg(rot, grid[0], grid, 0.05, H, "hypothesis", "holds", "rotation point-transitive")]
    legs.append(Leg("hypothesis", "rotation almost equicontinuous", "holds", _equicontinuity_everywhere(rot, grid, 0.1, H, [0.1])))
    for eps in (0.25, 0.1, 0.05, 0.01):
        legs.append(Leg("conclusion", f"rotation uniformly rigid at eps={eps}", "holds", det.uniform_rigidity(rot, grid, eps, ctx.H)[1]))
    return legs


def check_weakly(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    st = CircleStackFlow(k)
    H = min(ctx.H, 4 << k)
    pts = np.array([[float(n), 0.3] for n in range(1, k + 1)])
    legs = [Leg("hypothesis", f"circle stack (k={k}) weakly rigid", "holds", det.weak_rigidity(st, pts, 1e-3, H)[1])]
    fam = odometer_family(k, 4)
    picks = fam.images[ctx.rng.choice(len(fam.images), size=4, replace=False)]
    legs.append(Leg("conclusion", "E(circle stack) weakly rigid", "holds", det.weak_rigidity(fam.flow, picks, 1e-3, H)[1]))
    fs, x = _single_one(ctx.cfg.full_shift_window)
    legs.append(Leg("hypothesis", "full shift not weakly rigid", "fails", det.weak_rigidity(fs, x, 0.5, min(ctx.H, 1000))[1]))
    grid = fs.space.sample_grid(3).points
    induced = InducedFlow(fs, FunctionMetric.sup(fs.space, grid))
    legs.append(Leg("conclusion", "E(full shift) not weakly rigid (at e)", "fails", det.weak_rigidity(induced, grid[None], 0.5, min(ctx.H, 1000))[1]))
    return legs


def check_uni(ctx: Context) -> list:
    rot = Rotation(ctx.alpha)
    grid = rot.space.sample_grid(16).points
    legs = [Leg("hypothesis", "rotation uniformly rigid (eps 0.05)", "holds", det.uniform_rigidity(rot, grid, 0.05, ctx.H)[1])]
    first = approximate_semigroup(rot, grid, min(ctx.H, 2000), 0.02)
    induced = InducedFlow(rot, first.metric)
    legs.append(Leg("conclusion", "E(rotation) uniformly rigid (eps 0.05)", "holds", det.uniform_rigidity(induced, first.stacked(), 0.05, ctx.H)[1]))
    times_x, times_e = [], []
    for k in range(3, 9):
        st = CircleStackFlow(k)
        times_x.append(det.uniform_rigidity(st, st.space.sample_grid(4).points, 0.25, min(ctx.H, 1 << (k + 1)))[0])
        fam = odometer_family(k, 4)
        times_e.append(det.uniform_rigidity(fam.flow, fam.images, 0.25, min(ctx.H, 1 << (k + 1)))[0])
    diverge = times_x == [1 << k for k in range(3, 9)]
    bounded = all(t is not None and t <= 2 for t in times_e)
    legs.append(Leg("context", "circle stack: uniform return time of X is 2^k (diverges with depth)", "holds",
                    _verdict("return_time_diverges", diverge, f"X return times for k=3..8: {times_x}", times=times_x)))
    legs.append(Leg("context", "circle stack: uniform return time of E(X) stays bounded", "holds",
                    _verdict("return_time_bounded", bounded, f"E(X) return times for k=3..8: {times_e}", times=times_e)))
    st = CircleStackFlow(ctx.cfg.stack_depth)
    legs.append(transitivity_leg(st, np.array([1.0, 0.0]), st.space.sample_grid(8).points, 0.05, min(ctx.H, 2000), "context", "fails",
                                 "circle stack not point-transitive (converse need not hold)"))
    return legs


def _syndetic_verdict(sets: list, labels, eps: float, horizon: int, K: int) -> Verdict:
    bad = next(((i, j, rs) for (i, j), rs in sets if not det.syndeticity(rs, K)), None)
    params = {"epsilon": eps, "horizon": horizon, "gap_bound": K, "pairs": len(sets)}
    if bad is None:
        gap = max(rs.max_gap for _, rs in sets)
        return Verdict("syndetically_proximal", "holds", [], params, [f"all {len(sets)} return sets have gaps <= {gap} <= {K}"])
    i, j, rs = bad
    return Verdict("syndetically_proximal", "fails", [], params,
                   [f"pair ({labels[i]}, {labels[j]}): max gap {rs.max_gap}, boundary {rs.boundary_gaps}, hits {len(rs)}"])


@functools.lru_cache(maxsize=4)
def _shift_pair_scan(block: tuple, window: int, nmax: int, eps: float, horizon: int):
    fam = shift_family(block, window, nmax)
    return fam, det.pair_return_sets(fam.flow, fam.images, eps, horizon)


def _synd_legs(ctx: Context) -> tuple[list, list]:
    """The three equivalent properties on E(Y) (proximal, fixed minimal set, syndetically proximal), sharing one pair scan."""
    cfg = ctx.cfg
    H = ctx.H
    K = cfg.gap_bound
    fam, sets = _shift_pair_scan(tuple(cfg.shift_block), cfg.shift_window, 20, 0.25, H)
    prox = det.all_pairs_proximal(fam.flow, fam.images, 0.25, H, fam.labels)
    p, fixed = det.unique_minimal_fixed_point(fam.flow, fam.images, 0.25, H, fam.labels)
    synd = _syndetic_verdict(list(sets.items()), fam.labels, 0.25, H, K)
    legs = [
        Leg("conclusion", "E(Y): every pair proximal (eps 0.25)", "holds", prox),
        Leg("conclusion", "E(Y): unique minimal set is the fixed point g", "holds", fixed),
        Leg("conclusion", f"E(Y): syndetically proximal (gap bound {K})", "holds", synd),
    ]
    if fixed.holds and fixed.params.get("fixed_point") != "g":
        legs[1] = Leg("conclusion", "E(Y): unique minimal set is the fixed point g", "holds",
                      Verdict(fixed.prop, "fails", fixed.witnesses, fixed.params, [f"fixed point is {fixed.params.get('fixed_point')}, not g"]))
    return legs, list(sets.items())


def check_synd(ctx: Context) -> list:
    legs, _ = _synd_legs(ctx)
    cfg = ctx.cfg
    space = SeqSpace(cfg.shift_window, cfg.shift_block)
    flow = ShiftFlow(space)
    grid = space.sample_grid(1).points
    H = min(ctx.H, 2000)
    zero, one = space.pack([SeqPoint.fill(0), SeqPoint.fill(1)])
    rs = det.proximality(flow, zero, one, 0.5, ctx.H)
    legs.append(Leg("context", "Y: (0-fill, 1-fill) proximal", "fails", _return_verdict("proximal_pair", rs, flow, zero, one, 0.5)))
    legs.append(Leg("context", "Y: a fixed point is the unique minimal set", "fails", det.unique_minimal_fixed_point(flow, grid, 0.25, H)[1]))
    synd = det.syndeticity(rs, cfg.gap_bound)
    legs.append(Leg("context", "Y: (0-fill, 1-fill) syndetically proximal", "fails",
                    _verdict("syndetically_proximal", synd, f"{len(rs)} hits in [{rs.lo}, {rs.hi}]", hits=len(rs))))
    return legs


def check_ts(ctx: Context) -> list:
    cfg = ctx.cfg
    legs, sets = _synd_legs(ctx)
    legs = [Leg("hypothesis", leg.claim, leg.expected, leg.verdict) for leg in legs[2:]]
    K = cfg.gap_bound
    failures, stats = [], []
    for (i, j), rs in sets:
        if not det.syndeticity(rs, K):
            continue
        for k in range(1, cfg.run_length + 1):
            try:
                ok = det.thick_syndeticity(rs, k, K)
            except Inconclusive as exc:
                return legs + [Leg("conclusion", "thickly syndetic return sets", "holds",
                                   Verdict("thickly_syndetic", "inconclusive", [], {}, [f"resource exhausted: {exc}"]))]
            stats.append(det.run_starts(rs, k).max_gap)
            if not ok:
                failures.append((i, j, k))
    note = f"{len(sets)} pairs, run lengths 1..{cfg.run_length}: max run-start gap {max(stats) if stats else 'n/a'}"
    legs.append(Leg("conclusion", f"return sets thickly syndetic for run lengths 1..{cfg.run_length}", "holds",
                    _verdict("thickly_syndetic", not failures and bool(stats), note if not failures else f"failures {failures[:3]}", gap_bound=K)))
    back = all(det.syndeticity(rs, K) == det.thick_syndeticity(rs, 1, K) for _, rs in sets)
    legs.append(Leg("conclusion", "thick syndeticity at run length 1 recovers syndeticity", "holds",
                    _verdict("converse", back, "run length 1 agrees with the gap test on every pair")))
    return legs


def check_proxE(ctx: Context) -> list:
    cfg = ctx.cfg
    H = min(ctx.H, 2000)
    sub = shift_family(cfg.shift_block, cfg.shift_window, 20, part=0)
    xs_space = SeqSpace(cfg.shift_window, cfg.shift_block)
    flow = ShiftFlow(xs_space)
    xgrid = xs_space.sample_grid(1).points
    xgrid = xgrid[xgrid[:, 0] == 0]
    picks = xgrid[:: max(1, len(xgrid) // 12)]
    legs = [Leg("hypothesis", "X = orbit closure of 0-fill.b.0-fill is proximal", "holds", det.all_pairs_proximal(flow, picks, 0.25, H))]
    legs.append(Leg("conclusion", "E(X) proximal", "holds", det.all_pairs_proximal(sub.flow, sub.images, 0.25, H, sub.labels)))
    zero, one = xs_space.pack([SeqPoint.fill(0), SeqPoint.fill(1)])
    rs = det.proximality(flow, zero, one, 0.5, ctx.H)
    legs.append(Leg("context", "Y not proximal: (0-fill, 1-fill)", "fails", _return_verdict("proximal_pair", rs, flow, zero, one, 0.5)))
    grid = xs_space.sample_grid(1).points
    legs.append(transitivity_leg(flow, grid[0], grid, 0.25, H, "context", "fails", "Y not point-transitive"))
    fam = shift_family(cfg.shift_block, cfg.shift_window, 20)
    legs.append(Leg("context", "E(Y) proximal nonetheless", "holds", det.all_pairs_proximal(fam.flow, fam.images, 0.25, H, fam.labels)))
    return legs


def _syndetically_distal(flow: Flow, pairs: np.ndarray, eps: np.ndarray, horizon: int, K: int, prop: str) -> Verdict:
    """No pair has a syndetic return set into an entourage smaller than its separation."""
    offenders = []
    for P, e in zip(pairs, eps):
        rs = det.proximality(flow, P[0], P[1], float(e), horizon)
        if det.syndeticity(rs, K):
            offenders.append(rs)
    ok = not offenders
    return _verdict(prop, ok, f"{len(pairs)} pairs, none syndetically proximal" if ok else f"{len(offenders)} syndetically proximal pairs",
                    pairs=len(pairs), gap_bound=K, horizon=horizon)


def check_syndist(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    st = CircleStackFlow(k)
    pairs, lb = stack_pairs(st, ctx.rng, 20)
    H = min(ctx.H, 4 << k)
    K = ctx.cfg.gap_bound
    legs = [Leg("hypothesis", "circle stack syndetically distal", "holds", _syndetically_distal(st, pairs, lb / 2, H, K, "syndetically_distal"))]
    fam = odometer_family(k, 4)
    idx = ctx.rng.choice(len(fam.images), size=(20, 2))
    idx = idx[idx[:, 0] != idx[:, 1]]
    ep = np.stack([fam.images[idx[:, 0]], fam.images[idx[:, 1]]], axis=1)
    d0 = fam.flow.space.dist(ep[:, 0], ep[:, 1])
    legs.append(Leg("conclusion", "E(X) syndetically distal", "holds", _syndetically_distal(fam.flow, ep, d0 / 2, H, K, "syndetically_distal")))
    return legs


def check_last(ctx: Context) -> list:
    k = ctx.cfg.stack_depth
    H = min(ctx.H, 4 << k)
    K = ctx.cfg.gap_bound
    fam = odometer_family(k, 4)
    idx = ctx.rng.choice(len(fam.images), size=(20, 2))
    idx = idx[idx[:, 0] != idx[:, 1]]
    ep = np.stack([fam.images[idx[:, 0]], fam.images[idx[:, 1]]], axis=1)
    d0 = fam.flow.space.dist(ep[:, 0], ep[:, 1])
    legs = [Leg("hypothesis", "E(circle stack) syndetically distal", "holds", _syndetically_distal(fam.flow, ep, d0 / 2, H, K, "syndetically_distal"))]
    st = CircleStackFlow(k)
    pts = st.space.sample_grid(2).points
    legs.append(Leg("conclusion", "X not proximal (some pair never approaches)", "fails", det.all_pairs_proximal(st, pts[:6], 0.05, H)))
    return legs


CHECKS = [
    TheoremCheck("T-dis", "distal iff E(X) distal", "iff", "circle stack / odometer; annulus for the non-distal side", 100, check_dis),
    TheoremCheck("T-group", "E(X) group of homeomorphisms implies E(E(X)) group", "implies", "odometer, numeric second level", 64, check_group),
    TheoremCheck("T-equi", "equicontinuity passes to E(X); converse for point-transitive X", "implies", "irrational rotation", 100, check_equi),
    TheoremCheck("T-t3", "distal + hereditarily almost equicontinuous implies E(X) equicontinuous", "implies", "circle stack", 64, check_t3),
    TheoremCheck("E-circ", "E(X) equicontinuous while X is not", "counterexample", "deep circle stack", 5000, check_circ),
    TheoremCheck("T-iso", "E(X) isomorphic to E(E(X))", "iff", "annulus tables; rotation nets", 1, check_iso),
    TheoremCheck("E-annulus", "closed-form E(X) and E(E(X)) of the annulus", "example", "annulus", 1000, check_annulus),
    TheoremCheck("T-niso", "weakly rigid iff e not isolated in E(X)", "iff", "rotation, circle stack, full shift", 100, check_niso),
    TheoremCheck("C-wr", "E(X) sensitive implies X weakly rigid", "implies", "torus-circle; full shift contrapositive", 5000, check_wr),
    TheoremCheck("C-fullshift", "E(full shift) not sensitive", "implies", "full shift", 100, check_fullshift),
    TheoremCheck("T-sensitive", "sensitivity lifts through feeble-open factors", "implies", "phi(p) = p y from E(torus-circle)", 5000, check_sensitive),
    TheoremCheck("T-sub", "distal with a minimal sensitive subsystem implies E(X) sensitive", "implies", "torus-circle", 5000, check_sub),
    TheoremCheck("C-sensE", "transitive, weakly but not uniformly rigid implies E(X) sensitive", "implies", "torus; circle stack without transitivity", 5000, check_sensE),
    TheoremCheck("T-ad2", "transitive flows are almost equicontinuous or sensitive", "implies", "rotation, torus skew", 1000, check_ad2),
    TheoremCheck("T-ur", "transitive almost equicontinuous implies uniformly rigid", "implies", "rotation", 1000, check_ur),
    TheoremCheck("T-weakly", "weakly rigid iff E(X) weakly rigid", "iff", "circle stack, full shift", 128, check_weakly),
    TheoremCheck("T-uni", "uniform rigidity passes to E(X); converse needs transitivity", "implies", "rotation; circle stack", 512, check_uni),
    TheoremCheck("T-synd", "proximal iff unique fixed minimal set iff syndetically proximal", "equivalence", "E(shift pair); shift pair", 500, check_synd),
    TheoremCheck("T-ts", "syndetically proximal iff thickly syndetic return sets", "iff", "E(shift pair)", 500, check_ts),
    TheoremCheck("T-proxE", "proximal X gives proximal E(X); converse needs transitivity", "counterexample", "shift pair", 500, check_proxE),
    TheoremCheck("T-syndist", "syndetically distal passes to E(X)", "implies", "circle stack / odometer", 128, check_syndist),
    TheoremCheck("C-last", "E(X) syndetically distal implies X not proximal", "implies", "odometer / circle stack", 128, check_last),
]

REGISTRY = {c.id: c for c in CHECKS}


def run_theorem(check_id: str, cfg: TheoremsConfig, seed: int = 0) -> CheckReport:
    if check_id not in REGISTRY:
        raise UnknownCheck(f"no check registered as {check_id!r}; known: {', '.join(sorted(REGISTRY))}")
    return REGISTRY[check_id].run(cfg, seed)


def _run_one(args) -> dict:
    check_id, cfg, seed = args
    return run_theorem(check_id, cfg, seed).to_json()


def selected_ids(cfg: TheoremsConfig, registry=None) -> list:
    registry = REGISTRY if registry is None else registry
    if "all" in cfg.select:
        return sorted(registry)
    unknown = [i for i in cfg.select if i not in registry]
    if unknown:
        raise UnknownCheck(f"unknown check id(s): {', '.join(unknown)}")
    return sorted(set(cfg.select))


def run_all(cfg: TheoremsConfig, seed: int = 0, workers: int = 1, registry=None) -> dict:
    """Run the selected checks and return a report sorted by id (independent of ``workers``)."""
    ids = selected_ids(cfg, registry)
    jobs = [(i, cfg, seed) for i in ids]
    if registry is not None:
        results = [registry[i].run(cfg, seed).to_json() for i in ids]
    elif workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    results.sort(key=lambda r: r["id"])
    counts = {o: sum(r["outcome"] == o for r in results) for o in ("pass", "fail", "inconclusive")}
    return {"summary": counts, "checks": results}
