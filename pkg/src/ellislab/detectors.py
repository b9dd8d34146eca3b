"""Semi-decision procedures for recurrence and stability properties of Z-flows.

Every detector works within explicit resources (epsilon, horizon, probe
radii) and reports them.  A search that comes back empty yields "fails" with
a note that the scan was exhaustive; windows too short to decide raise
``Inconclusive``.  Ties in time are broken by smallest |t|, positive first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import Inconclusive
from .flows import Flow, scan_order
from .verdict import Verdict, Witness

FIXED_TOL = 1e-9
BUDGET = 4_000_000


def _chunk(flow: Flow, P: np.ndarray) -> int:
    return int(np.clip(BUDGET // max(1, P.size), 1, 4096))


def _scan(flow: Flow, P, times, reduce):
    """Apply ``reduce(t_chunk, trajectory_chunk)`` over chunks of ``times`` and concatenate."""
    P = np.asarray(P)
    times = np.asarray(times, dtype=np.int64)
    step = _chunk(flow, P)
    out = [reduce(times[i : i + step], flow.trajectory(times[i : i + step], P)) for i in range(0, times.size, step)]
    return np.concatenate(out) if out else np.empty(0)


def _pack(flow: Flow, points) -> np.ndarray:
    space = flow.space
    if isinstance(points, np.ndarray):
        return points
    return np.stack([space.as_array(p) for p in points])


# ---------------------------------------------------------------------------
# return sets


@dataclass
class ReturnSet:
    """Times in [lo, hi] where a predicate held, with gap statistics."""

    predicate: str
    lo: int
    hi: int
    hits: np.ndarray
    min_value: float = float("nan")
    times: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.hits = np.unique(np.asarray(self.hits, dtype=np.int64))
        if self.hits.size and (self.hits[0] < self.lo or self.hits[-1] > self.hi):
            raise ValueError("hits outside the scanned window")

    @classmethod
    def from_hits(cls, hits, lo: int, hi: int, predicate: str = "given") -> "ReturnSet":
        return cls(predicate, int(lo), int(hi), np.asarray(list(hits), dtype=np.int64))

    @property
    def horizon(self) -> int:
        return max(abs(self.lo), abs(self.hi))

    @property
    def max_gap(self) -> int:
        """Largest difference between consecutive hits (0 for fewer than two hits)."""
        return int(np.diff(self.hits).max()) if self.hits.size > 1 else 0

    @property
    def boundary_gaps(self) -> tuple[int, int]:
        """Distance from the window edges to the first and last hit."""
        if not self.hits.size:
            return (self.hi - self.lo + 1, self.hi - self.lo + 1)
        return (int(self.hits[0] - self.lo), int(self.hi - self.hits[-1]))

    def __len__(self):
        return int(self.hits.size)

    def rows(self) -> list[tuple]:
        """(t, distance) rows for every scanned time."""
        if self.times is None:
            return [(int(t), "") for t in self.hits]
        return [(int(t), float(v)) for t, v in zip(self.times, self.values)]

    def to_json(self) -> dict:
        return {
            "predicate": self.predicate,
            "window": [self.lo, self.hi],
            "count": len(self),
            "max_gap": self.max_gap,
            "boundary_gaps": list(self.boundary_gaps),
            "min_value": self.min_value,
            "first_hits": self.hits[:20].tolist(),
        }


def proximality(flow: Flow, x, y, epsilon: float, horizon: int) -> ReturnSet:
    """Times |t| <= horizon with d(t x, t y) < epsilon."""
    P = _pack(flow, [x, y])
    times = np.arange(-int(horizon), int(horizon) + 1)
    space = flow.space
    d = _scan(flow, P, times, lambda ts, Q: space.dist(Q[:, 0], Q[:, 1]))
    return ReturnSet(f"d(tx, ty) < {epsilon:g}", -int(horizon), int(horizon), times[d < epsilon], float(d.min()), times, d)


def pair_return_sets(flow: Flow, points, epsilon: float, horizon: int) -> dict:
    """proximality() for every pair i < j among ``points``, sharing one trajectory scan."""
    P = _pack(flow, points)
    m = P.shape[0]
    iu, ju = np.triu_indices(m, 1)
    times = np.arange(-int(horizon), int(horizon) + 1)
    space = flow.space
    step = _chunk(flow, P)
    embed = flow.embedder(P)
    chunks = []
    for i in range(0, times.size, step):
        F = embed(times[i : i + step])
        # identical time slices (a shift that has pushed every block out of the window) are scored once
        flat = F.reshape(F.shape[0], -1)
        fresh = np.ones(F.shape[0], dtype=bool)
        fresh[1:] = (flat[1:] != flat[:-1]).any(axis=1)
        U = F[fresh]
        inverse = np.cumsum(fresh) - 1
        # row a against every later row by broadcasting: no gathered pair copies
        d = np.concatenate([space.embedded_dist(U[:, a : a + 1], U[:, a + 1 :]) for a in range(m - 1)], axis=1)
        chunks.append(d[inverse.reshape(-1)])
    D = np.concatenate(chunks) if m > 1 else np.empty((times.size, 0))
    pred = f"d(tx, ty) < {epsilon:g}"
    return {
        (int(a), int(b)): ReturnSet(pred, -int(horizon), int(horizon), times[D[:, k] < epsilon], float(D[:, k].min()), times, D[:, k])
        for k, (a, b) in enumerate(zip(iu, ju))
    }


def syndeticity(rs: ReturnSet, K: int) -> bool:
    """Bounded gaps: consecutive hits at most K apart and both window edges within K of a hit."""
    if not len(rs):
        return False
    lead, tail = rs.boundary_gaps
    return rs.max_gap <= K and lead < K and tail < K


def run_starts(rs: ReturnSet, k: int) -> ReturnSet:
    """Times t with [t, t + k - 1] contained in the hits."""
    if k < 1:
        raise ValueError("run length must be >= 1")
    if rs.hi - rs.lo + 1 < k:
        raise Inconclusive(f"window [{rs.lo}, {rs.hi}] shorter than run length {k}")
    h = rs.hits
    mask = np.zeros(rs.hi - rs.lo + 1, dtype=bool)
    mask[h - rs.lo] = True
    runs = np.ones(mask.size - k + 1, dtype=bool)
    for j in range(k):
        runs &= mask[j : j + mask.size - k + 1]
    starts = np.flatnonzero(runs) + rs.lo
    return ReturnSet(f"run of {k} in [{rs.predicate}]", rs.lo, rs.hi - k + 1, starts, rs.min_value)


def thick_syndeticity(rs: ReturnSet, k: int, K: int) -> bool:
    """The starts of length-k runs of hits form a syndetic set with gap bound K."""
    return syndeticity(run_starts(rs, k), K)


# ---------------------------------------------------------------------------
# pairwise behaviour


def pair_minima(flow: Flow, pairs: np.ndarray, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """For packed pairs of shape (m, 2, ...): min over |t| <= horizon of d(t x, t y) and the t attaining it."""
    pairs = np.asarray(pairs)
    times = scan_order(horizon, "both")
    space = flow.space
    best = np.full(pairs.shape[0], np.inf)
    arg = np.zeros(pairs.shape[0], dtype=np.int64)
    step = _chunk(flow, pairs)
    for i in range(0, times.size, step):
        ts = times[i : i + step]
        Q = flow.trajectory(ts, pairs)
        d = space.dist(Q[:, :, 0], Q[:, :, 1])
        k = d.argmin(axis=0)
        dk = d[k, np.arange(d.shape[1])]
        better = dk < best
        best = np.where(better, dk, best)
        arg = np.where(better, ts[k], arg)
    return best, arg


def distality(flow: Flow, pairs: np.ndarray, horizon: int, lower_bounds: Sequence[float], factor: float = 0.99) -> Verdict:
    """Every pair keeps d(t x, t y) >= factor * its lower bound for all |t| <= horizon."""
    pairs = np.asarray(pairs)
    lb = np.asarray(lower_bounds, dtype=float)
    mins, args = pair_minima(flow, pairs, horizon)
    ok = (mins >= factor * lb) & (lb > 0)
    worst = int(np.argmin(np.where(lb > 0, mins / np.where(lb > 0, lb, 1.0), -1.0)))
    witness = Witness("pair", pairs[worst], int(args[worst]), float(mins[worst]), float(factor * lb[worst]), space=flow.space)
    params = {"horizon": int(horizon), "pairs": int(pairs.shape[0]), "factor": factor}
    params["min_ratio"] = float(np.min(mins / np.where(lb > 0, lb, np.inf)))
    if ok.all():
        return Verdict("distal", "holds", [witness], params, [f"all {pairs.shape[0]} pairs stay above {factor} x their lower bound"])
    bad = int(np.flatnonzero(~ok)[0])
    w = Witness("pair", pairs[bad], int(args[bad]), float(mins[bad]), float(factor * lb[bad]), space=flow.space)
    return Verdict("distal", "fails", [w], params, [f"{int((~ok).sum())} pairs came closer than their lower bound"])


def all_pairs_proximal(flow: Flow, points, epsilon: float, horizon: int, labels: Sequence[str] | None = None) -> Verdict:
    """Every pair among ``points`` has some |t| <= horizon with d(t x, t y) < epsilon."""
    P = _pack(flow, points)
    m = P.shape[0]
    times = scan_order(horizon, "both")
    found = np.full((m, m), np.iinfo(np.int64).min)
    mins = np.full((m, m), np.inf)
    iu, ju = np.triu_indices(m, 1)
    step = int(np.clip(BUDGET // max(1, P.size * max(1, iu.size // max(1, m))), 1, 4096))
    embed = flow.embedder(P)
    for i in range(0, times.size, step):
        ts = times[i : i + step]
        F = embed(ts)
        d = flow.space.embedded_dist(F[:, iu], F[:, ju])
        np.minimum.at(mins, (iu, ju), d.min(axis=0))
        for c in range(ts.size):
            new = (d[c] < epsilon) & (found[iu, ju] == np.iinfo(np.int64).min)
            found[iu[new], ju[new]] = ts[c]
        if (found[iu, ju] != np.iinfo(np.int64).min).all():
            break
    missing = [(int(a), int(b)) for a, b in zip(iu, ju) if found[a, b] == np.iinfo(np.int64).min]
    params = {"epsilon": epsilon, "horizon": int(horizon), "pairs": int(iu.size)}
    names = list(labels) if labels is not None else [str(i) for i in range(m)]
    if missing:
        a, b = missing[0]
        w = Witness("pair", P[[a, b]], 0, float(flow.space.dist(P[a], P[b])), epsilon, (names[a], names[b]), space=flow.space)
        return Verdict("proximal", "fails", [w], params, [f"{len(missing)} pairs never came within {epsilon:g} for |t| <= {horizon}"])
    witnesses = []
    for a, b in zip(iu, ju):
        t = int(found[a, b])
        Q = flow.act(t, P[[a, b]])
        witnesses.append(Witness("pair", P[[a, b]], t, float(flow.space.dist(Q[0], Q[1])), epsilon, (names[a], names[b]), space=flow.space))
    return Verdict("proximal", "holds", witnesses, params, [f"all {iu.size} pairs proximal"])


# ---------------------------------------------------------------------------
# stability


def _probe_set(flow: Flow, x: np.ndarray, delta: float, candidates) -> np.ndarray:
    if candidates is None:
        return flow.space.probes(x[None], delta)[0]
    C = np.asarray(candidates)
    return C[flow.space.dist(C, x) < delta]


def _max_separation(flow: Flow, x: np.ndarray, Y: np.ndarray, horizon: int, stop_above: float = np.inf):
    """max over |t| <= horizon and y in Y of d(t x, t y), with the (y index, t) attaining it.

    The scan stops early once the running maximum exceeds ``stop_above``.
    """
    times = scan_order(horizon, "both")
    P = np.concatenate([x[None], Y])
    best, arg_t, arg_y = -1.0, 0, 0
    step = _chunk(flow, P)
    for i in range(0, times.size, step):
        ts = times[i : i + step]
        Q = flow.trajectory(ts, P)
        d = flow.space.dist(Q[:, 1:], Q[:, :1])
        k = int(np.argmax(d))
        c, j = np.unravel_index(k, d.shape)
        if d[c, j] > best:
            best, arg_t, arg_y = float(d[c, j]), int(ts[c]), int(j)
        if best > stop_above:
            break
    return best, arg_y, arg_t


def equicontinuity_at(flow: Flow, x, epsilon: float, horizon: int, delta_grid: Sequence[float], candidates=None):
    """Largest delta in ``delta_grid`` keeping every probe within epsilon of x's orbit, and the verdict."""
    x = flow.space.as_array(x)
    last = None
    for delta in sorted(delta_grid, reverse=True):
        Y = _probe_set(flow, x, delta, candidates)
        if not Y.size:
            continue
        sep, j, t = _max_separation(flow, x, Y, horizon)
        w = Witness("pair", np.stack([x, Y[j]]), t, sep, epsilon, space=flow.space)
        if sep < epsilon:
            return delta, Verdict(
                "equicontinuous_at", "holds", [w], {"epsilon": epsilon, "delta": delta, "horizon": int(horizon)},
                [f"probes within {delta:g} stay within {sep:.6g} < {epsilon:g} for |t| <= {horizon}"],
            )
        last = w
    notes = [f"every delta down to {min(delta_grid):g} has a probe separating to >= {epsilon:g}"]
    witnesses = [last] if last is not None else []
    if last is None:
        notes = ["no probe points inside any delta ball"]
    return None, Verdict("equicontinuous_at", "fails", witnesses, {"epsilon": epsilon, "horizon": int(horizon)}, notes)


def sensitivity(
    flow: Flow,
    points,
    horizon: int,
    epsilon_candidates: Sequence[float],
    deltas: Sequence[float] = (0.1, 0.01, 0.001),
    candidates=None,
):
    """Largest epsilon such that near every point, at every probe radius, some t separates by more than epsilon.

    Returns (epsilon or None, verdict).  One witness per point, taken at the
    smallest probe radius.
    """
    X = _pack(flow, points)
    worst = np.inf
    witnesses = []
    target = max(epsilon_candidates)
    for i in range(X.shape[0]):
        x = X[i]
        per_point = np.inf
        w = None
        for delta in sorted(deltas, reverse=True):
            Y = _probe_set(flow, x, delta, candidates)
            if not Y.size:
                per_point = -np.inf
                break
            sep, j, t = _max_separation(flow, x, Y, horizon, stop_above=target)
            per_point = min(per_point, sep)
            w = Witness("pair", np.stack([x, Y[j]]), t, sep, float(delta), space=flow.space)
        worst = min(worst, per_point)
        if w is not None:
            witnesses.append(w)
    params = {"horizon": int(horizon), "deltas": list(deltas), "points": int(X.shape[0]), "min_separation": float(worst)}
    for eps in sorted(epsilon_candidates, reverse=True):
        if worst > eps:
            params["epsilon"] = eps
            return eps, Verdict("sensitive", "holds", witnesses, params, [f"separation > {eps:g} found near all {X.shape[0]} points"])
    return None, Verdict(
        "sensitive", "fails", witnesses[:1], params,
        [f"some point separates by at most {worst:.6g} <= every candidate within |t| <= {horizon}"],
    )


def _first_return(flow: Flow, P: np.ndarray, epsilon: float, horizon: int):
    times = scan_order(horizon, "both")[1:]
    space = flow.space
    best, best_t = np.inf, None
    step = _chunk(flow, P)
    for i in range(0, times.size, step):
        ts = times[i : i + step]
        Q = flow.trajectory(ts, P)
        d = space.dist(Q, P[None])
        d = d.reshape(ts.size, -1).max(axis=1)
        k = int(np.argmin(d))
        if d[k] < best:
            best, best_t = float(d[k]), int(ts[k])
        hit = np.flatnonzero(d < epsilon)
        if hit.size:
            return int(ts[hit[0]]), float(d[hit[0]]), best_t, best
    return None, None, best_t, best


def weak_rigidity(flow: Flow, points, epsilon: float, horizon: int, prop: str = "weakly_rigid"):
    """Smallest |t| >= 1 (positive first) with max_i d(t x_i, x_i) < epsilon."""
    P = _pack(flow, points)
    t, d, best_t, best = _first_return(flow, P, epsilon, horizon)
    params = {"epsilon": epsilon, "horizon": int(horizon), "points": int(P.shape[0])}
    if t is not None:
        w = Witness("return", P, t, d, epsilon, space=flow.space)
        params["t"] = t
        return t, Verdict(prop, "holds", [w], params, [f"all points return within {epsilon:g} at t = {t}"])
    params["min_distance"] = best
    w = Witness("return", P, best_t, best, epsilon, space=flow.space)
    return None, Verdict(prop, "fails", [w], params, [f"exhaustive scan of 1 <= |t| <= {horizon}: closest return {best:.12g} at t = {best_t}"])


def uniform_rigidity(flow: Flow, grid, epsilon: float, horizon: int):
    """Smallest |t| >= 1 with sup over the grid of d(t x, x) < epsilon."""
    return weak_rigidity(flow, grid, epsilon, horizon, prop="uniformly_rigid")


def transitivity(flow: Flow, x, epsilon: float, horizon: int, grid):
    """Whether the orbit segment |t| <= horizon of x comes within epsilon of every grid point."""
    x = flow.space.as_array(x)
    G = _pack(flow, grid)
    times = np.arange(-int(horizon), int(horizon) + 1)
    nearest = np.full(G.shape[0], np.inf)
    step = max(1, BUDGET // max(1, G.size))
    for i in range(0, times.size, step):
        O = flow.trajectory(times[i : i + step], x)
        d = flow.space.dist(O[:, None], G[None])
        nearest = np.minimum(nearest, d.min(axis=0))
    coverage = float(np.mean(nearest < epsilon))
    params = {"epsilon": epsilon, "horizon": int(horizon), "grid": int(G.shape[0]), "coverage": coverage}
    k = int(np.argmax(nearest))
    w = Witness("static", np.stack([x, G[k]]), 0, float(flow.space.dist(x, G[k])), epsilon, space=flow.space)
    if coverage == 1.0:
        return True, coverage, Verdict("transitive", "holds", [w], params, [f"orbit comes within {epsilon:g} of all grid points"])
    return False, coverage, Verdict(
        "transitive", "fails", [w], params, [f"grid point {k} stays {nearest[k]:.6g} from the scanned orbit"]
    )


def unique_minimal_fixed_point(flow: Flow, points, epsilon: float, horizon: int, labels: Sequence[str] | None = None):
    """A fixed point among ``points`` that every orbit of ``points`` approaches within epsilon."""
    P = _pack(flow, points)
    space = flow.space
    moved = space.dist(flow.act(1, P), P)
    idx = np.flatnonzero(moved < FIXED_TOL)
    distinct: list[int] = []
    for i in idx:
        if all(space.dist(P[i], P[j]) >= FIXED_TOL for j in distinct):
            distinct.append(int(i))
    names = list(labels) if labels is not None else [str(i) for i in range(P.shape[0])]
    params = {"epsilon": epsilon, "horizon": int(horizon), "points": int(P.shape[0])}
    fixed = [Witness("fixed", P[[i]], 1, float(moved[i]), FIXED_TOL, (names[i],), space=space) for i in distinct]
    if not distinct:
        return None, Verdict("unique_minimal_fixed_point", "fails", [], params, [f"no fixed point among {P.shape[0]} points"])
    if len(distinct) > 1:
        return None, Verdict(
            "unique_minimal_fixed_point", "fails", fixed[:2], params,
            [f"{len(distinct)} distinct fixed points: {', '.join(names[i] for i in distinct[:4])}"],
        )
    p = P[distinct[0]]
    times = scan_order(horizon, "both")
    closest = np.full(P.shape[0], np.inf)
    step = _chunk(flow, P)
    for i in range(0, times.size, step):
        Q = flow.trajectory(times[i : i + step], P)
        closest = np.minimum(closest, space.dist(Q, p[None]).min(axis=0))
        if (closest < epsilon).all():
            break
    params["fixed_point"] = names[distinct[0]]
    if (closest < epsilon).all():
        return p, Verdict(
            "unique_minimal_fixed_point", "holds", fixed, params,
            [f"{names[distinct[0]]} is the only fixed point and every orbit enters its {epsilon:g}-ball"],
        )
    k = int(np.argmax(closest))
    w = Witness("static", np.stack([P[k], p]), 0, float(space.dist(P[k], p)), epsilon, (names[k], names[distinct[0]]), space=space)
    return None, Verdict(
        "unique_minimal_fixed_point", "fails", fixed + [w], params,
        [f"orbit of {names[k]} stays {closest[k]:.6g} from the fixed point for |t| <= {horizon}"],
    )
