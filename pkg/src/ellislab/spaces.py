"""Compact metric spaces underlying the example flows.

Every space packs its points into a float (or int) array whose trailing axis
holds the coordinates, so flows and detectors work on whole grids at once.
``dist`` broadcasts over any leading axes.

Angles are measured in turns and always live in [0, 1).  The annulus stores
its radius through the *level* coordinate ``log2(-log2(r - 1))``, in which the
radial map ``r -> 1 + (r - 1)**2`` is the translation ``level -> level + 1``;
this keeps forward/backward iteration exact where the radius itself would
lose every significant digit near r = 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError, GridMismatch, KindError

TURN = 2.0**64
ANGLE_TOL = 1e-9
OUTER = -1  # ring index of the limit circle r = 2 in the circle stack
MAX_BLOCK = 62


def wrap(a):
    """Reduce angles mod 1 into [0, 1)."""
    a = np.mod(a, 1.0)
    return np.where(a >= 1.0, 0.0, a)


def wrap_scalar(a: float) -> float:
    a = float(a) % 1.0
    return 0.0 if a >= 1.0 else a


def circle_distance(a, b):
    if isinstance(a, float) and isinstance(b, float):
        d = (a - b) % 1.0
        return min(d, 1.0 - d)
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0)
    return np.minimum(d, 1.0 - d)


def turns_mul(t, x):
    """Fractional part of ``t * x`` for integer ``t``.

    Both factors are taken to 64-bit fixed point so the product wraps exactly
    mod 1; a plain float product loses ~log10(|t|) digits of the angle.
    """
    if isinstance(t, (int, np.integer)) and isinstance(x, (float, int, np.floating)):
        fx = int(wrap_scalar(x) * TURN)
        return wrap_scalar(float((int(t) * fx) % (1 << 64)) / TURN)
    fx = np.floor(wrap(np.asarray(x, dtype=float)) * TURN).astype(np.uint64)
    ut = np.asarray(t, dtype=np.int64).astype(np.uint64)
    prod = np.multiply(ut, fx)
    return wrap(prod.astype(np.float64) / TURN)


def angle_gap(a, b):
    """Circle distance for angles already reduced into [0, 1)."""
    d = np.abs(a - b)
    return np.minimum(d, 1.0 - d)


def radius_from_level(level):
    with np.errstate(over="ignore"):
        return 1.0 + np.exp2(-np.exp2(np.asarray(level, dtype=float)))


def level_from_radius(r):
    s = np.asarray(r, dtype=float) - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lev = np.log2(-np.log2(s))
    lev = np.where(s <= 0.0, np.inf, lev)
    return np.where(s >= 1.0, -np.inf, lev)


def stack_radius(ring):
    ring = np.asarray(ring)
    r = 2.0 - np.exp2(-np.maximum(ring, 0).astype(float))
    return np.where(ring == OUTER, 2.0, r)


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class CirclePoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap_scalar(self.angle))


@dataclass(frozen=True)
class AnnulusPoint:
    """Point of the annulus 1 <= r <= 2; ``level`` is +inf on r = 1, -inf on r = 2."""

    level: float
    angle: float

    def __post_init__(self):
        if math.isnan(self.level):
            raise ValueError("annulus level must not be NaN")
        object.__setattr__(self, "level", float(self.level))
        object.__setattr__(self, "angle", wrap_scalar(self.angle))

    @classmethod
    def at(cls, r: float, angle: float) -> "AnnulusPoint":
        if not 1.0 <= r <= 2.0:
            raise ValueError(f"annulus radius {r} outside [1, 2]")
        return cls(float(level_from_radius(r)), angle)

    @property
    def r(self) -> float:
        return float(radius_from_level(self.level))


@dataclass(frozen=True)
class StackPoint:
    """Point on ring ``ring`` of the circle stack (ring OUTER is r = 2)."""

    ring: int
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "ring", int(self.ring))
        object.__setattr__(self, "angle", wrap_scalar(self.angle))

    @property
    def r(self) -> float:
        return float(stack_radius(self.ring))


@dataclass(frozen=True)
class TorusPoint:
    a1: float
    a2: float

    def __post_init__(self):
        object.__setattr__(self, "a1", wrap_scalar(self.a1))
        object.__setattr__(self, "a2", wrap_scalar(self.a2))


@dataclass(frozen=True)
class SeqPoint:
    """Bi-infinite 0/1 sequence: ``left`` fill, then ``block`` from ``offset``, then ``right`` fill.

    Stored in canonical form (block trimmed of fill symbols at both ends), so
    equal sequences compare equal.  Shifting only moves ``offset``.
    """

    left: int = 0
    right: int = 0
    block: tuple = ()
    offset: int = 0

    def __post_init__(self):
        left, right = int(self.left), int(self.right)
        blk = [int(s) for s in self.block]
        if left not in (0, 1) or right not in (0, 1) or any(s not in (0, 1) for s in blk):
            raise ValueError("sequence symbols must be 0 or 1")
        off = int(self.offset)
        while blk and blk[0] == left:
            blk.pop(0)
            off += 1
        while blk and blk[-1] == right:
            blk.pop()
        if not blk:
            off = 0
        if len(blk) > MAX_BLOCK:
            raise ValueError(f"block longer than {MAX_BLOCK} symbols")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "block", tuple(blk))
        object.__setattr__(self, "offset", off)

    @classmethod
    def fill(cls, symbol: int) -> "SeqPoint":
        return cls(symbol, symbol)

    def symbol(self, i: int) -> int:
        if i < self.offset:
            return self.left
        if i >= self.offset + len(self.block):
            return self.right
        return self.block[i - self.offset]

    def window(self, radius: int) -> tuple:
        return tuple(self.symbol(i) for i in range(-radius, radius + 1))

    def shifted(self, t: int) -> "SeqPoint":
        return SeqPoint(self.left, self.right, self.block, self.offset - t)


Point = Any


@dataclass
class Grid:
    """Finite sample of a space, ``delta``-dense in it."""

    space: "MetricSpace"
    points: np.ndarray
    delta: float

    def __len__(self):
        return self.points.shape[0]

    def to_points(self) -> list:
        return self.space.unpack(self.points)


# ---------------------------------------------------------------------------
# spaces


class MetricSpace:
    kind = "abstract"
    point_types: tuple = ()
    dtype = np.float64
    point_shape: tuple = ()

    def dist(self, A, B) -> np.ndarray:
        raise NotImplementedError

    def embed(self, A) -> np.ndarray:
        """Features from which ``embedded_dist`` recovers the metric; lets pair scans encode each point once."""
        return np.asarray(A)

    def embedded_dist(self, FA, FB) -> np.ndarray:
        return self.dist(FA, FB)

    def embedded_max(self, FA, FB, idx=None) -> np.ndarray:
        """Max of ``embedded_dist`` over the trailing point axis (restricted to ``idx``)."""
        per = self.embedded_dist(FA, FB)
        return (per if idx is None else per[..., idx]).max(axis=-1)

    def pack_one(self, p) -> np.ndarray:
        raise NotImplementedError

    def unpack_one(self, row):
        raise NotImplementedError

    def check(self, p):
        if not isinstance(p, self.point_types):
            raise KindError(f"{type(p).__name__} is not a point of the {self.kind} space")
        return p

    def pack(self, points: Sequence) -> np.ndarray:
        rows = [self.pack_one(self.check(p)) for p in points]
        if not rows:
            return np.empty((0,) + self.point_shape, dtype=self.dtype)
        return np.stack(rows).astype(self.dtype)

    def unpack(self, A) -> list:
        A = np.asarray(A)
        return [self.unpack_one(row) for row in A.reshape((-1,) + self.point_shape)]

    def as_array(self, x) -> np.ndarray:
        """Accept a point, a list of points, or an already packed array."""
        if isinstance(x, np.ndarray):
            return x
        if isinstance(x, (list, tuple)) and x and isinstance(x[0], self.point_types):
            return self.pack(x)
        return self.pack_one(self.check(x)).astype(self.dtype)

    def distance(self, a, b) -> float:
        self.check(a)
        self.check(b)
        return float(self.dist(self.pack_one(a), self.pack_one(b)))

    def sample_grid(self, resolution: int) -> Grid:
        raise NotImplementedError

    def probes(self, X, delta: float) -> np.ndarray:
        """Deterministic neighbours of each row of X, strictly within ``delta``."""
        raise NotImplementedError(f"{self.kind} space has no intrinsic probes")

    def random(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def csv_fields(self, p) -> tuple:
        raise NotImplementedError

    def parse_point(self, text: str):
        raise NotImplementedError

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.descriptor().items() if k != "kind")
        return f"{type(self).__name__}({args})"


def _offsets(delta: float) -> np.ndarray:
    return np.array([0.9, -0.9, 0.45, -0.45]) * min(delta, 0.999)


class CircleSpace(MetricSpace):
    kind = "circle"
    point_types = (CirclePoint,)
    point_shape = (1,)

    def dist(self, A, B):
        return angle_gap(np.asarray(A)[..., 0], np.asarray(B)[..., 0])

    def pack_one(self, p):
        return np.array([p.angle])

    def unpack_one(self, row):
        return CirclePoint(float(row[0]))

    def sample_grid(self, resolution):
        n = _check_resolution(resolution)
        return Grid(self, (np.arange(n) / n)[:, None], 0.5 / n)

    def probes(self, X, delta):
        X = np.asarray(X, dtype=float)
        return wrap(X[:, None, :] + _offsets(delta)[None, :, None])

    def random(self, rng, n):
        return rng.random((n, 1))

    def csv_fields(self, p):
        return (p.angle, "", "circle")

    def parse_point(self, text):
        return CirclePoint(float(text))


class AnnulusSpace(MetricSpace):
    """Annulus 1 <= r <= 2 with metric |r - r'| + d_circle(theta, theta').

    Packed rows are ``[level, angle, r]``; the radius is derived from the
    level and cached so the metric needs no transcendental calls.
    """

    kind = "annulus"
    point_types = (AnnulusPoint,)
    point_shape = (3,)

    def dist(self, A, B):
        A, B = np.asarray(A), np.asarray(B)
        return np.abs(A[..., 2] - B[..., 2]) + angle_gap(A[..., 1], B[..., 1])

    def pack_one(self, p):
        return np.array([p.level, p.angle, p.r])

    def unpack_one(self, row):
        return AnnulusPoint(float(row[0]), float(row[1]))

    @staticmethod
    def from_levels(level, angle) -> np.ndarray:
        level, angle = np.broadcast_arrays(np.asarray(level, dtype=float), np.asarray(angle, dtype=float))
        return np.stack([level, angle, radius_from_level(level)], axis=-1)

    def from_polar(self, r, angle) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        angle = np.broadcast_to(np.asarray(angle, dtype=float), r.shape)
        return np.stack([level_from_radius(r), wrap(angle), r], axis=-1)

    def radii(self, X) -> np.ndarray:
        return np.asarray(X)[..., 2]

    def sample_grid(self, resolution):
        n = _check_resolution(resolution)
        radii = np.linspace(1.0, 2.0, n) if n > 1 else np.array([1.5])
        rr, aa = np.meshgrid(radii, np.arange(n) / n, indexing="ij")
        dr = 0.5 / (n - 1) if n > 1 else 0.5
        return Grid(self, self.from_polar(rr.ravel(), aa.ravel()), dr + 0.5 / n)

    def probes(self, X, delta):
        X = np.asarray(X, dtype=float)
        r = self.radii(X)[:, None]
        a = X[:, 1][:, None]
        step = min(delta, 0.999)
        rad = np.array([0.9, -0.9, 0.45, 0.0, 0.0, 0.45]) * step
        ang = np.array([0.0, 0.0, 0.0, 0.9, -0.9, 0.45]) * step
        pr = r + rad[None, :]
        # reflect radial steps that leave [1, 2]
        pr = np.where((pr > 2.0) | (pr < 1.0), r - rad[None, :], pr)
        return self.from_polar(np.clip(pr, 1.0, 2.0), a + ang[None, :])

    def random(self, rng, n):
        r = 1.0 + rng.random(n)
        u = rng.random(n)
        r = np.where(u < 0.1, 1.0, np.where(u > 0.9, 2.0, r))
        return self.from_polar(r, rng.random(n))

    def csv_fields(self, p):
        return (p.r, p.angle, "annulus")

    def parse_point(self, text):
        r, a = (float(v) for v in text.split(","))
        return AnnulusPoint.at(r, a)


class CircleStackSpace(MetricSpace):
    """Rings r_n = 2 - 2**-n for n = 0..depth plus the limit ring r = 2.

    Metric |r_m - r_m'| + d_circle(theta, theta').
    """

    kind = "circle_stack"
    point_types = (StackPoint,)
    point_shape = (2,)

    def __init__(self, depth: int):
        if not 1 <= int(depth) <= 40:
            raise ConfigError("circle stack depth must be in 1..40", key="depth")
        self.depth = int(depth)
        self.rings = np.array(list(range(self.depth + 1)) + [OUTER])

    def check(self, p):
        super().check(p)
        if p.ring != OUTER and not 0 <= p.ring <= self.depth:
            raise KindError(f"ring {p.ring} outside truncation depth {self.depth}")
        return p

    def dist(self, A, B):
        A, B = np.asarray(A), np.asarray(B)
        dr = np.abs(stack_radius(A[..., 0].astype(int)) - stack_radius(B[..., 0].astype(int)))
        return dr + angle_gap(A[..., 1], B[..., 1])

    def pack_one(self, p):
        return np.array([float(p.ring), p.angle])

    def unpack_one(self, row):
        return StackPoint(int(row[0]), float(row[1]))

    def sample_grid(self, resolution):
        n = _check_resolution(resolution)
        rr, aa = np.meshgrid(self.rings.astype(float), np.arange(n) / n, indexing="ij")
        return Grid(self, np.stack([rr.ravel(), aa.ravel()], axis=-1), 0.5 / n)

    def probes(self, X, delta):
        X = np.asarray(X, dtype=float)
        radii = stack_radius(self.rings)
        out = []
        for ring, angle in X:
            r0 = float(stack_radius(int(ring)))
            rows = [(ring, angle + o) for o in _offsets(delta)]
            gaps = np.abs(radii - r0)
            near = [(g, int(k)) for g, k in zip(gaps, self.rings) if 0 < g < delta]
            for g, k in sorted(near)[:2]:
                rows.append((float(k), angle + 0.5 * (delta - g)))
                rows.append((float(k), angle))
            while len(rows) < 8:
                rows.append(rows[len(rows) % 4])
            out.append(rows[:8])
        P = np.array(out, dtype=float)
        P[..., 1] = wrap(P[..., 1])
        return P

    def random(self, rng, n):
        rings = rng.choice(self.rings, size=n).astype(float)
        return np.stack([rings, rng.random(n)], axis=-1)

    def descriptor(self):
        return {"kind": self.kind, "depth": self.depth}

    def csv_fields(self, p):
        return (p.r, p.angle, "outer" if p.ring == OUTER else str(p.ring))

    def parse_point(self, text):
        ring, a = text.split(",")
        ring = ring.strip()
        return self.check(StackPoint(OUTER if ring in ("outer", "-1") else int(ring), float(a)))


class TorusCircleSpace(MetricSpace):
    """Disjoint union of the 2-torus (sup of the two circle distances) and a circle.

    Points of different parts are at distance 1.
    """

    kind = "torus_circle"
    point_types = (TorusPoint, CirclePoint)
    point_shape = (3,)
    SEPARATION = 1.0

    def dist(self, A, B):
        A, B = np.asarray(A), np.asarray(B)
        d1 = angle_gap(A[..., 1], B[..., 1])
        d2 = angle_gap(A[..., 2], B[..., 2])
        same = A[..., 0] == B[..., 0]
        return np.where(same, np.maximum(d1, d2), self.SEPARATION)

    def pack_one(self, p):
        if isinstance(p, TorusPoint):
            return np.array([0.0, p.a1, p.a2])
        return np.array([1.0, p.angle, 0.0])

    def unpack_one(self, row):
        if row[0] == 0:
            return TorusPoint(float(row[1]), float(row[2]))
        return CirclePoint(float(row[1]))

    def sample_grid(self, resolution, part: str | None = None):
        n = _check_resolution(resolution)
        g = np.arange(n) / n
        aa, bb = np.meshgrid(g, g, indexing="ij")
        torus = np.stack([np.zeros(n * n), aa.ravel(), bb.ravel()], axis=-1)
        circle = np.stack([np.ones(n), g, np.zeros(n)], axis=-1)
        if part == "torus":
            pts = torus
        elif part == "circle":
            pts = circle
        else:
            pts = np.concatenate([torus, circle])
        return Grid(self, pts, 0.5 / n)

    def probes(self, X, delta):
        X = np.asarray(X, dtype=float)
        s = min(delta, 0.999)
        da = np.array([0.9, 0.0, 0.9, -0.9, 0.45, -0.45]) * s
        db = np.array([0.0, 0.9, 0.9, 0.45, -0.9, 0.0]) * s
        P = np.repeat(X[:, None, :], da.size, axis=1).copy()
        on_torus = (X[:, 0] == 0)[:, None]
        P[..., 1] = wrap(P[..., 1] + da[None, :])
        P[..., 2] = np.where(on_torus, wrap(P[..., 2] + db[None, :]), 0.0)
        # circle points get pure angular offsets
        P[..., 1] = np.where(on_torus, P[..., 1], wrap(X[:, 1][:, None] + (da + db)[None, :] / 2))
        return P

    def random(self, rng, n, part: str | None = None):
        if part == "torus":
            parts = np.zeros(n)
        elif part == "circle":
            parts = np.ones(n)
        else:
            parts = (rng.random(n) < 0.25).astype(float)
        a = rng.random(n)
        b = np.where(parts == 0, rng.random(n), 0.0)
        return np.stack([parts, a, b], axis=-1)

    def csv_fields(self, p):
        if isinstance(p, TorusPoint):
            return (p.a1, p.a2, "torus")
        return (p.angle, "", "circle")

    def parse_point(self, text):
        part, *vals = [v.strip() for v in text.split(",")]
        if part == "torus":
            return TorusPoint(float(vals[0]), float(vals[1]))
        if part == "circle":
            return CirclePoint(float(vals[0]))
        raise ValueError(f"unknown torus_circle part {part!r}")


_U1 = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def _shl(x, k):
    k = np.asarray(k)
    return np.where(k >= 64, np.uint64(0), x << np.clip(k, 0, 63).astype(np.uint64))


def _shr(x, k):
    k = np.asarray(k)
    return np.where(k >= 64, np.uint64(0), x >> np.clip(k, 0, 63).astype(np.uint64))


def _low_mask(k):
    k = np.asarray(k)
    return np.where(k >= 64, _ALL, _shl(_U1, k) - _U1)


def _reverse_bits(x, length):
    """Reverse the lowest ``length`` bits of each word."""
    for shift, mask in ((1, 0x5555555555555555), (2, 0x3333333333333333), (4, 0x0F0F0F0F0F0F0F0F),
                        (8, 0x00FF00FF00FF00FF), (16, 0x0000FFFF0000FFFF), (32, 0x00000000FFFFFFFF)):
        m, sh = np.uint64(mask), np.uint64(shift)
        x = ((x >> sh) & m) | ((x & m) << sh)
    return _shr(x, 64 - np.asarray(length))


def _side_word(left, right, off, length, bits, width: int):
    """Bit p (0 <= p < width) is the symbol at coordinate p."""
    a = np.clip(off, 0, width)
    b = np.clip(off + length, 0, width)
    placed = np.where(off >= 0, _shl(bits, off), _shr(bits, -off))
    inside = _low_mask(b) & ~_low_mask(a)
    word = np.where(left == 1, _low_mask(a), np.uint64(0))
    word |= np.where(right == 1, _low_mask(width) & ~_low_mask(b), np.uint64(0))
    return word | (placed & inside)


def _window_words(A: np.ndarray, window: int):
    left, right, off, length = (A[..., i] for i in range(4))
    bits = A[..., 4].astype(np.uint64)
    pos = _side_word(left, right, off, length, bits, window + 1)
    # reflect: symbol at -1-p becomes bit p
    neg = _side_word(right, left, -off - length, length, _reverse_bits(bits, length), window)
    return pos, neg


def _or_fold(x):
    """OR-reduce over axis -2 by halving; much faster than ufunc.reduce on a middle axis."""
    while x.shape[-2] > 1:
        n = x.shape[-2]
        h = n // 2
        head = x[..., :h, :] | x[..., h : 2 * h, :]
        x = np.concatenate([head, x[..., 2 * h :, :]], axis=-2) if n % 2 else head
    return x[..., 0, :]


def _bit_weight(x, scale: float):
    """scale * 2**-j for the lowest set bit j of each word, 0 for zero words."""
    with np.errstate(over="ignore"):
        low = (x & (~x + _U1)).astype(np.float64)
    out = np.zeros(low.shape)
    np.divide(scale, low, out=out, where=low > 0)
    return out


class SeqSpace(MetricSpace):
    """Two-sided 0/1 sequences with metric max_{|i| <= window} 2**-|i| [s_i != u_i].

    With ``block`` set, the space is the orbit closure of the two sequences
    0-fill.block.0-fill and 1-fill.block.1-fill (block starting at coordinate 0);
    otherwise it is the full shift.
    Packed rows are int64 ``[left, right, offset, length, bits]``.
    """

    kind = "seq"
    point_types = (SeqPoint,)
    point_shape = (5,)
    dtype = np.int64

    def __init__(self, window: int, block: Sequence[int] | None = None):
        if int(window) < 1:
            raise ConfigError("sequence window must be >= 1", key="window")
        self.window = int(window)
        if block is not None:
            block = tuple(int(s) for s in block)
            if not block or any(s not in (0, 1) for s in block):
                raise ConfigError("block must be a nonempty 0/1 word", key="block")
            if len(block) > self.window:
                raise ConfigError("window must be at least the block length", key="window")
        self.block = block
        self._coords = np.arange(-self.window, self.window + 1)
        self._weights = np.exp2(-np.abs(self._coords).astype(float))

    def generators(self) -> tuple:
        """The two sequences whose orbit closures make up the pair space."""
        if self.block is None:
            raise KindError("full shift has no generating pair")
        return SeqPoint(0, 0, self.block, 0), SeqPoint(1, 1, self.block, 0)

    def check(self, p):
        super().check(p)
        if self.block is not None:
            x, y = self.generators()
            base = x if p.left == 0 else y
            if not (p.left == p.right and (not p.block or p.block == base.block)):
                raise KindError(f"{p} is not in the orbit closure of the generating pair")
        return p

    def symbols(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        left, right, off, length, bits = (A[..., i, None] for i in range(5))
        rel = self._coords - off
        inner = (bits >> np.clip(rel, 0, MAX_BLOCK)) & 1
        return np.where(rel < 0, left, np.where(rel >= length, right, inner))

    def dist(self, A, B):
        return self.embedded_dist(self.embed(A), self.embed(B))

    def embed(self, A):
        """Coordinates 0..W and -1..-W as two bit words, shape (..., 2)."""
        pos, neg = _window_words(np.asarray(A, dtype=np.int64), self.window)
        return np.stack([pos, neg], axis=-1)

    def embedded_dist(self, FA, FB):
        # the lowest differing bit is the coordinate nearest 0 where the sequences disagree
        x = FA ^ FB
        return np.maximum(_bit_weight(x[..., 0], 1.0), _bit_weight(x[..., 1], 0.5))

    def embedded_max(self, FA, FB, idx=None):
        # the max weight over several points is the weight of the OR of their difference words
        x = FA ^ FB
        if idx is not None:
            x = x[..., idx, :]
        x = _or_fold(x)
        return np.maximum(_bit_weight(x[..., 0], 1.0), _bit_weight(x[..., 1], 0.5))

    def pack_one(self, p):
        bits = sum(s << i for i, s in enumerate(p.block))
        return np.array([p.left, p.right, p.offset, len(p.block), bits], dtype=np.int64)

    def unpack_one(self, row):
        left, right, off, length, bits = (int(v) for v in row)
        block = tuple((bits >> i) & 1 for i in range(length))
        return SeqPoint(left, right, block, off)

    def sample_grid(self, resolution):
        """Full shift: all words on [-m, m] (m = resolution) with 0 tails.

        Pair space: every class of the window metric is represented, so delta = 0
        and ``resolution`` is ignored.
        """
        if self.block is None:
            m = _check_resolution(resolution)
            if m > 8:
                raise ConfigError("full-shift grid radius capped at 8 (2**17 points)", key="resolution")
            pts = [SeqPoint(0, 0, w, -m) for w in itertools.product((0, 1), repeat=2 * m + 1)]
            delta = 0.0 if m >= self.window else 2.0 ** -(m + 1)
            return Grid(self, self.pack(pts), delta)
        pts = []
        for gen in self.generators():
            lo, hi = -self.window, self.window + len(self.block) - 1
            pts += [gen.shifted(n) for n in range(lo, hi + 1)]
            pts.append(SeqPoint.fill(gen.left))
        return Grid(self, self.pack(pts), 0.0)

    def probes(self, X, delta):
        out = []
        j = 0
        while 2.0**-j >= delta:
            j += 1
        for row in np.asarray(X):
            p = self.unpack_one(row)
            rows = []
            for c in (j, -j, j + 1, -(j + 1)):
                rows.append(self.pack_one(_flip(p, c)))
            out.append(rows)
        return np.array(out, dtype=np.int64)

    def random(self, rng, n):
        if self.block is not None:
            grid = self.sample_grid(1).points
            picks = grid[rng.integers(0, len(grid), size=n)].copy()
            picks[:, 2] -= np.where(picks[:, 3] > 0, rng.integers(-2 * self.window, 2 * self.window + 1, size=n), 0)
            return picks
        pts = []
        for _ in range(n):
            length = int(rng.integers(0, min(2 * self.window + 1, MAX_BLOCK) + 1))
            block = tuple(int(v) for v in rng.integers(0, 2, size=length))
            off = int(rng.integers(-self.window - 3, self.window + 4))
            pts.append(SeqPoint(int(rng.integers(0, 2)), int(rng.integers(0, 2)), block, off))
        return self.pack(pts)

    def descriptor(self):
        d = {"kind": self.kind, "window": self.window}
        if self.block is not None:
            d["block"] = list(self.block)
        return d

    def csv_fields(self, p):
        word = "".join(str(s) for s in p.window(self.window))
        return (p.offset, word, f"{p.left}|{p.right}")

    def parse_point(self, text):
        """``left:block:offset:right``, e.g. ``0:1:0:0`` for 0-fill.1.0-fill."""
        left, block, off, right = text.split(":")
        return self.check(SeqPoint(int(left), int(right), tuple(int(c) for c in block.strip()), int(off)))


def _flip(p: SeqPoint, c: int) -> SeqPoint:
    lo = min(c, p.offset)
    hi = max(c, p.offset + len(p.block) - 1)
    word = [p.symbol(i) for i in range(lo, hi + 1)]
    word[c - lo] ^= 1
    return SeqPoint(p.left, p.right, tuple(word), lo)


def _check_resolution(resolution) -> int:
    n = int(resolution)
    if n < 1:
        raise ConfigError("resolution must be >= 1", key="resolution")
    return n


# ---------------------------------------------------------------------------
# function spaces


class FunctionMetric(MetricSpace):
    """Metric on maps sampled on a fixed grid.

    d'(p, q) = sum_g weight_g * max_{i in group g} d(p(x_i), q(x_i)).
    One group holding the whole grid gives the sup metric; singleton groups
    give a weighted sum.  Points of this space are image arrays of shape
    ``grid.shape``, so the class nests: a FunctionMetric over a FunctionMetric
    measures maps on the enveloping semigroup.
    """

    kind = "function"

    def __init__(self, base: MetricSpace, grid, weights=None, groups=None, label: str = "sup"):
        self.base = base
        self.grid = np.asarray(grid)
        n = self.grid.shape[0]
        if groups is None:
            groups = [np.arange(n)]
        self.groups = [np.asarray(g, dtype=int) for g in groups]
        self.weights = np.ones(len(self.groups)) if weights is None else np.asarray(weights, dtype=float)
        if self.weights.shape != (len(self.groups),) or np.any(self.weights <= 0):
            raise ValueError("need one positive weight per group")
        self.label = label
        self.point_shape = self.grid.shape
        self.dtype = self.grid.dtype
        self._pointwise = all(g.size == 1 for g in self.groups) and len(self.groups) == n
        self._whole = len(self.groups) == 1 and np.array_equal(self.groups[0], np.arange(n))
        self._order = np.concatenate(self.groups) if self._pointwise else None

    @classmethod
    def sup(cls, base, grid):
        return cls(base, grid, label="sup")

    @classmethod
    def weighted_sum(cls, base, grid, weights):
        n = np.asarray(grid).shape[0]
        return cls(base, grid, weights, [[i] for i in range(n)], label="weighted-sum")

    @classmethod
    def dprime(cls, space: CircleStackSpace, grid):
        """Ring-wise sup with weight 1 on the outer circle and 2**-n on ring n."""
        rings = np.asarray(grid)[:, 0].astype(int)
        groups, weights = [], []
        for ring in sorted(set(rings.tolist()), key=lambda k: (k == OUTER, k)):
            groups.append(np.flatnonzero(rings == ring))
            weights.append(1.0 if ring == OUTER else 2.0**-ring)
        return cls(space, grid, weights, groups, label="dprime")

    @classmethod
    def at_point(cls, base, grid, index: int):
        """Distance of the values at one grid point only (a pseudometric on maps)."""
        return cls(base, grid, groups=[[int(index)]], label=f"at[{int(index)}]")

    @classmethod
    def for_space(cls, base, grid):
        if isinstance(base, CircleStackSpace):
            return cls.dprime(base, grid)
        return cls.sup(base, grid)

    def dist(self, A, B):
        return self._aggregate(self.base.dist(A, B))

    def embed(self, A):
        return self.base.embed(A)

    def embedded_dist(self, FA, FB):
        if len(self.groups) == 1:
            return self.weights[0] * self.base.embedded_max(FA, FB, None if self._whole else self.groups[0])
        return self._aggregate(self.base.embedded_dist(FA, FB))

    def _aggregate(self, per):
        if len(self.groups) == 1:
            return self.weights[0] * per[..., self.groups[0]].max(axis=-1)
        if self._pointwise:
            w = np.empty(per.shape[-1])
            w[self._order] = self.weights
            return (per * w).sum(axis=-1)
        total = 0.0
        for g, w in zip(self.groups, self.weights):
            total = total + w * per[..., g].max(axis=-1)
        return total

    def coarsen(self, k: int) -> "FunctionMetric":
        """Metric on a subgrid of at most k points per nesting level.

        Its distance between ``take``-restricted maps never exceeds the full
        distance, so it serves as a cheap lower bound.
        """
        n = self.grid.shape[0]
        idx = np.unique(np.linspace(0, n - 1, min(int(k), n)).round().astype(int))
        sub = self.grid[idx]
        base = self.base
        if isinstance(base, FunctionMetric):
            base = base.coarsen(k)
            sub = base.take(sub)
        groups, weights = [], []
        for g, w in zip(self.groups, self.weights):
            kept = np.searchsorted(idx, np.intersect1d(g, idx))
            if kept.size:
                groups.append(kept)
                weights.append(w)
        coarse = FunctionMetric(base, sub, weights, groups, label=f"{self.label}|coarse")
        coarse._take = idx
        return coarse

    def take(self, A) -> np.ndarray:
        """Restrict full-grid image arrays to this (coarsened) metric's subgrid."""
        A = np.asarray(A)
        axis = A.ndim - len(self.point_shape)
        m = self
        while isinstance(m, FunctionMetric):
            idx = getattr(m, "_take", None)
            if idx is not None:
                A = np.take(A, idx, axis=axis)
            axis += 1
            m = m.base
        return A

    def check(self, p):
        images = getattr(p, "images", p)
        if np.shape(images) != self.point_shape:
            raise KindError("sampled map is not defined on this grid")
        return p

    def pack_one(self, p):
        return np.asarray(getattr(p, "images", p))

    def unpack_one(self, row):
        return np.asarray(row)

    def as_array(self, x):
        if hasattr(x, "images"):
            return np.asarray(x.images)
        if isinstance(x, (list, tuple)):
            return np.stack([self.as_array(v) for v in x])
        return np.asarray(x)

    def descriptor(self):
        return {"kind": self.kind, "base": self.base.descriptor(), "grid_size": int(self.grid.shape[0]), "metric": self.label}


@dataclass(frozen=True)
class Entourage:
    """The metric entourage {(x, y) : d(x, y) < epsilon}."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("entourage epsilon must be positive")

    def contains(self, space: MetricSpace, x, y) -> bool:
        return space.distance(x, y) < self.epsilon

    def ball(self, space: MetricSpace, x, candidates) -> np.ndarray:
        """Rows of ``candidates`` inside U[x]."""
        C = space.as_array(candidates)
        return C[space.dist(C, space.as_array(x)) < self.epsilon]


# ---------------------------------------------------------------------------
# module-level operations


def distance(space: MetricSpace, a, b) -> float:
    return space.distance(a, b)


def sample_grid(space: MetricSpace, resolution: int) -> Grid:
    return space.sample_grid(resolution)


def function_distance(fm: FunctionMetric, p, q) -> float:
    for m in (p, q):
        grid = getattr(m, "grid", None)
        if grid is not None and (np.shape(grid) != fm.grid.shape or not np.array_equal(grid, fm.grid)):
            raise GridMismatch("sampled map is defined on a different grid")
    return float(fm.dist(fm.as_array(p), fm.as_array(q)))


def space_from_descriptor(d: dict) -> MetricSpace:
    kind = d.get("kind")
    if kind == "circle":
        return CircleSpace()
    if kind == "annulus":
        return AnnulusSpace()
    if kind == "circle_stack":
        return CircleStackSpace(d["depth"])
    if kind == "torus_circle":
        return TorusCircleSpace()
    if kind == "seq":
        return SeqSpace(d["window"], d.get("block"))
    raise ConfigError(f"unknown space kind {kind!r}", key="kind")
