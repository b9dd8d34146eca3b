"""Finite approximations of E(X) and E(E(X)) by sampled maps.

An element of E(X) is represented by its values on a fixed grid.  The
closure of {pi^t} is approximated by a greedy epsilon-net over the iterates
|t| <= horizon, scanned in the order 0, 1, -1, 2, -2, ...; the second level
repeats the construction with the first-level representatives as the grid
and the induced action t . p = pi^t o p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .flows import Flow, InducedFlow, scan_order
from .spaces import FunctionMetric, Grid, MetricSpace
from .symbolic import Algebra, element_label, element_to_json, iso_G

CHUNK = 512
BUDGET = 4_000_000  # floats per distance block
COARSE = 16  # subgrid size per level for the lower-bound prefilter


@dataclass
class SampledMap:
    """A self-map of X known on ``grid``; provenance is ("iterate", t), ("limit", id) or ("symbolic", label)."""

    grid: np.ndarray
    images: np.ndarray
    provenance: tuple = ("iterate", 0)

    def __post_init__(self):
        if np.shape(self.grid) != np.shape(self.images):
            raise ValueError("images must have the grid's shape")


def _grid_array(grid) -> np.ndarray:
    return grid.points if isinstance(grid, Grid) else np.asarray(grid)


def sampled_iterate(flow: Flow, t: int, grid) -> SampledMap:
    G = _grid_array(grid)
    return SampledMap(G, flow.act(int(t), G), ("iterate", int(t)))


def induced_act(flow: Flow, t: int, p: SampledMap) -> SampledMap:
    """t . p = pi^t o p."""
    prov = p.provenance
    if prov[0] == "iterate":
        prov = ("iterate", prov[1] + int(t))
    elif int(t) != 0:
        prov = ("induced", int(t), prov)
    return SampledMap(p.grid, flow.act(int(t), p.images), prov)


def symbolic_sample(algebra: Algebra, e, grid) -> SampledMap:
    G = _grid_array(grid)
    return SampledMap(G, algebra.evaluate(e, G), ("symbolic", element_label(e)))


@dataclass(frozen=True)
class FunctionEntourage:
    """S(x0, eps) = {(p, q) : d(p(x0), q(x0)) < eps}, with x0 given by its grid index."""

    index: int
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("entourage epsilon must be positive")

    def contains(self, base: MetricSpace, p, q) -> bool:
        a = getattr(p, "images", p)[self.index]
        b = getattr(q, "images", q)[self.index]
        return bool(base.dist(a, b) < self.epsilon)

    def metric(self, base: MetricSpace, grid) -> FunctionMetric:
        return FunctionMetric.at_point(base, _grid_array(grid), self.index)


@dataclass
class SemigroupApprox:
    flow: Flow
    grid: np.ndarray
    metric: FunctionMetric
    epsilon: float
    horizon: int
    directions: str
    elements: list
    rep_times: list
    witness_times: list
    times: np.ndarray = field(repr=False)
    assignment: np.ndarray = field(repr=False)
    identity_distance: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.stack([e.images for e in self.elements])

    def pairwise_distances(self) -> np.ndarray:
        S = self.stacked()
        return self.metric.dist(S[:, None], S[None, :])

    def element_of_time(self, t: int) -> int:
        hit = np.flatnonzero(self.times == t)
        if not hit.size:
            raise KeyError(f"time {t} was not scanned")
        return int(self.assignment[hit[0]])


def approximate_semigroup(
    flow: Flow,
    grid,
    horizon: int,
    epsilon: float,
    directions: str = "both",
    metric: FunctionMetric | None = None,
) -> SemigroupApprox:
    """Greedy epsilon-net over the sampled iterates pi^t, |t| <= horizon."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if int(horizon) < 1:
        raise ValueError("horizon must be >= 1")
    if directions not in ("forward", "both"):
        raise ValueError("directions must be forward or both")
    G = _grid_array(grid)
    if metric is None:
        metric = FunctionMetric.for_space(flow.space, G)
    times = scan_order(horizon, directions)
    size = int(np.prod(G.shape))
    coarse = metric.coarsen(COARSE) if G.shape[0] > 2 * COARSE or G.ndim > 2 else None
    reps: list[np.ndarray] = []
    coarse_reps: list[np.ndarray] = []
    rep_times: list[int] = []
    assignment = np.empty(times.size, dtype=np.int64)
    ident = np.empty(times.size)
    start = 0
    while start < times.size:
        chunk = int(np.clip(BUDGET // (size * max(1, len(reps) if coarse is None else 1)), 8, CHUNK))
        ts = times[start : start + chunk]
        imgs = flow.trajectory(ts, G)
        ident[start : start + ts.size] = metric.dist(imgs, G)
        best, mind = _nearest(metric, coarse, imgs, reps, coarse_reps, epsilon)
        for i in range(ts.size):
            if mind[i] < epsilon:
                assignment[start + i] = best[i]
                continue
            reps.append(imgs[i])
            if coarse is not None:
                coarse_reps.append(coarse.take(imgs[i]))
            rep_times.append(int(ts[i]))
            k = len(reps) - 1
            assignment[start + i] = k
            if i + 1 < ts.size:
                d_new = _distances_to(metric, coarse, imgs[i + 1 :], imgs[i], np.minimum(mind[i + 1 :], epsilon))
                closer = d_new < mind[i + 1 :]
                mind[i + 1 :] = np.where(closer, d_new, mind[i + 1 :])
                best[i + 1 :] = np.where(closer, k, best[i + 1 :])
        start += ts.size
    elements = [SampledMap(G, r, ("iterate", t)) for r, t in zip(reps, rep_times)]
    witness = [times[assignment == k].tolist() for k in range(len(reps))]
    return SemigroupApprox(
        flow, G, metric, float(epsilon), int(horizon), directions, elements, rep_times, witness,
        times, assignment, ident,
    )


def _distances_to(metric, coarse, imgs, rep, bound):
    """Distances from each image to ``rep``, exact where below ``bound`` and inf where provably not."""
    if coarse is None:
        return metric.dist(imgs, rep)
    lower = coarse.dist(coarse.take(imgs), coarse.take(rep))
    out = np.full(lower.shape, np.inf)
    need = np.flatnonzero(lower < bound)
    if need.size:
        out[need] = metric.dist(imgs[need], rep)
    return out


def _nearest(metric, coarse, imgs, reps, coarse_reps, epsilon):
    """Index of and distance to the nearest representative, exact whenever it is < epsilon.

    With a coarse metric, pairs whose lower bound already reaches epsilon are
    skipped and reported at distance inf.
    """
    n = imgs.shape[0]
    if not reps:
        return np.full(n, -1), np.full(n, np.inf)
    if coarse is None:
        D = metric.dist(imgs[:, None], np.stack(reps)[None, :])
    else:
        lower = coarse.dist(coarse.take(imgs)[:, None], np.stack(coarse_reps)[None, :])
        ii, kk = np.nonzero(lower < epsilon)
        D = np.full(lower.shape, np.inf)
        R = np.stack(reps)
        step = max(1, BUDGET // int(np.prod(imgs.shape[1:])))
        for j in range(0, ii.size, step):
            sl = slice(j, j + step)
            D[ii[sl], kk[sl]] = metric.dist(imgs[ii[sl]], R[kk[sl]])
    best = D.argmin(axis=1)
    return best, D[np.arange(n), best]


def second_level_semigroup(first: SemigroupApprox, horizon: int, epsilon: float, directions: str | None = None) -> SemigroupApprox:
    """Cluster the maps p -> pi^t o p on the first-level representatives."""
    if not first.elements:
        raise ValueError("first-level approximation is empty")
    stacked = first.stacked()
    metric = FunctionMetric.sup(first.metric, stacked)
    induced = InducedFlow(first.flow, metric)
    return approximate_semigroup(induced, stacked, horizon, epsilon, directions or first.directions, metric)


def is_isolated_identity(first: SemigroupApprox, epsilon: float) -> tuple[bool, float, int]:
    """(isolated, min distance from pi^t to e over scanned t != 0, the t achieving it)."""
    mask = first.times != 0
    if not mask.any():
        raise ValueError("no nonzero times were scanned")
    d = first.identity_distance[mask]
    k = int(np.argmin(d))
    dmin = float(d[k])
    return dmin >= epsilon, dmin, int(first.times[mask][k])


@dataclass
class Tag:
    index: int
    time: int
    family: str
    element: Any
    distance: float


def tag_elements(approx: SemigroupApprox, algebra: Algebra, epsilon: float | None = None, second_level: bool = False) -> list[Tag]:
    """Match each representative pi^t with a closed-form element, preferring limit elements.

    For a second-level approximation the candidates act by left multiplication
    on the first-level representatives and are reported through G.
    """
    eps = approx.epsilon if epsilon is None else epsilon
    tags = []
    for k, (rep, t) in enumerate(zip(approx.elements, approx.rep_times)):
        chosen = None
        for cand in algebra.candidates_for_iterate(t):
            d = float(approx.metric.dist(rep.images, algebra.evaluate(cand, approx.grid)))
            if d < eps:
                chosen = (cand, d)
                break
        if chosen is None:
            cand = algebra.candidates_for_iterate(t)[-1]
            chosen = (cand, float(approx.metric.dist(rep.images, algebra.evaluate(cand, approx.grid))))
        element = iso_G(chosen[0]) if second_level else chosen[0]
        tags.append(Tag(k, t, type(element).__name__, element, chosen[1]))
    return tags


def approx_to_json(approx: SemigroupApprox, tags: Sequence[Tag] | None = None) -> dict:
    by_index = {tg.index: tg for tg in tags or ()}
    elements = []
    for k, t in enumerate(approx.rep_times):
        entry: dict = {"id": k, "time": t, "witness_times": approx.witness_times[k]}
        if k in by_index:
            tg = by_index[k]
            entry["tag"] = tg.family
            entry["symbolic"] = element_to_json(tg.element)
            entry["symbolic_distance"] = tg.distance
        elements.append(entry)
    return {
        "flow": approx.flow.descriptor(),
        "metric": approx.metric.label,
        "grid_size": int(approx.grid.shape[0]),
        "epsilon": approx.epsilon,
        "horizon": approx.horizon,
        "directions": approx.directions,
        "count": len(approx),
        "elements": elements,
        "pairwise_distances": approx.pairwise_distances().tolist(),
    }


def distance_rows(approx: SemigroupApprox) -> list[tuple]:
    """(t, distance to identity) for every scanned t, in increasing t."""
    order = np.argsort(approx.times, kind="stable")
    return [(int(approx.times[i]), float(approx.identity_distance[i])) for i in order]


def image_rows(approx: SemigroupApprox) -> list[tuple]:
    """(element, grid index, coord1, coord2, tag) for every representative and grid point."""
    space = approx.flow.space
    rows = []
    for k, e in enumerate(approx.elements):
        for i, p in enumerate(space.unpack(e.images)):
            rows.append((k, i, *space.csv_fields(p)))
    return rows
