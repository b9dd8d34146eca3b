"""Z-actions on the concrete spaces: generator, inverse, and their iterates.

Iterates are evaluated in closed form rather than by repeated stepping, so
``act(s + t, x)`` and ``act(s, act(t, x))`` agree to rounding at any horizon
below the cap.  All flows act on packed arrays; ``t`` may be an integer array
broadcast against the leading axes of the points, which is how
``trajectory`` evaluates many times at once.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .errors import ConfigError, HorizonError
from .spaces import (
    OUTER,
    AnnulusSpace,
    CircleSpace,
    CircleStackSpace,
    FunctionMetric,
    MetricSpace,
    SeqSpace,
    TorusCircleSpace,
    space_from_descriptor,
    turns_mul,
    wrap,
)

HORIZON_CAP = 10**6

PRESETS = {
    "golden": (math.sqrt(5.0) - 1.0) / 2.0,
    "silver": math.sqrt(2.0) - 1.0,
}


def resolve_irrational(value, key: str) -> float:
    """Turn a preset name or a number into a parameter in (0, 1), rejecting near-rationals."""
    if isinstance(value, str):
        if value not in PRESETS:
            raise ConfigError(f"unknown preset {value!r}; choose from {sorted(PRESETS)}", key=key)
        return PRESETS[value]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number or preset name, got {value!r}", key=key)
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{key} must lie in (0, 1), got {value}", key=key)
    approx = Fraction(value).limit_denominator(1000)
    if abs(float(approx) - value) < 1e-12:
        raise ConfigError(f"{key}={value} equals the rational {approx}; use an irrational surrogate", key=key)
    return value


class Flow:
    """A Z-action on ``space`` generated by one homeomorphism."""

    kind = "abstract"

    def __init__(self, space: MetricSpace, cap: int = HORIZON_CAP):
        self.space = space
        self.cap = int(cap)

    # subclasses implement the closed-form iterate; ``t`` is an int64 array
    # broadcastable to X.shape[:-1] (or to the leading shape of a function point)
    def _act(self, t: np.ndarray, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_t(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        if t.size and int(np.max(np.abs(t))) > self.cap:
            raise HorizonError(f"|t| = {int(np.max(np.abs(t)))} exceeds the horizon cap {self.cap}")
        return t

    def act(self, t, X) -> np.ndarray:
        """Image of packed points X under the t-th iterate."""
        X = np.asarray(X)
        return self._act(self._check_t(t), X)

    def trajectory(self, ts: Iterable[int], X) -> np.ndarray:
        """Stack of ``act(t, X)`` for every t in ``ts``, shape (len(ts),) + X.shape."""
        X = np.asarray(X)
        ts = self._check_t(np.asarray(list(ts) if not isinstance(ts, np.ndarray) else ts))
        lead = X.ndim - len(self.space.point_shape)
        tt = ts.reshape((-1,) + (1,) * lead)
        return self._act(tt, X[None, ...])

    def embedder(self, X):
        """Callable ``ts -> space.embed(trajectory(ts, X))``; flows may precompute per-point tables."""
        return lambda ts: self.space.embed(self.trajectory(ts, X))

    def embedded_trajectory(self, ts, X) -> np.ndarray:
        return self.embedder(X)(ts)

    def apply(self, t: int, x):
        self.space.check(x)
        return self.space.unpack_one(self.act(int(t), self.space.pack_one(x)))

    def orbit(self, x, horizon: int, direction: str = "forward") -> list:
        """Orbit segment as (t, point) pairs, ordered by increasing t."""
        times = orbit_times(horizon, direction)
        X = self.trajectory(times, self.space.pack_one(self.space.check(x)))
        return [(int(t), self.space.unpack_one(row)) for t, row in zip(times, X)]

    @property
    def params(self) -> dict:
        return {}

    def descriptor(self) -> dict:
        return {"kind": self.kind, **self.params}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


def _joint_shape(t: np.ndarray, X: np.ndarray) -> tuple:
    return np.broadcast_shapes(X.shape[:-1], t.shape) + X.shape[-1:]


def orbit_times(horizon: int, direction: str = "forward") -> np.ndarray:
    horizon = int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if direction == "forward":
        return np.arange(0, horizon + 1)
    if direction == "backward":
        return np.arange(-horizon, 1)
    if direction == "both":
        return np.arange(-horizon, horizon + 1)
    raise ValueError(f"direction must be forward, backward or both, got {direction!r}")


def scan_order(horizon: int, direction: str = "both") -> np.ndarray:
    """Times 0, 1, -1, 2, -2, ... (or 0, 1, 2, ... when forward only)."""
    horizon = int(horizon)
    if direction == "forward":
        return np.arange(0, horizon + 1)
    out = np.empty(2 * horizon + 1, dtype=np.int64)
    out[0] = 0
    out[1::2] = np.arange(1, horizon + 1)
    out[2::2] = -np.arange(1, horizon + 1)
    return out


class IdentityFlow(Flow):
    kind = "identity"

    def __init__(self, space: MetricSpace | None = None, cap: int = HORIZON_CAP):
        super().__init__(space or CircleSpace(), cap)

    def _act(self, t, X):
        return np.array(np.broadcast_to(X, _joint_shape(t, X)))

    @property
    def params(self):
        return {"space": self.space.descriptor()}


class Rotation(Flow):
    """theta -> theta + alpha on the circle."""

    kind = "rotation"

    def __init__(self, alpha: float, cap: int = HORIZON_CAP):
        super().__init__(CircleSpace(), cap)
        self.alpha = float(alpha)

    def _act(self, t, X):
        return wrap(X + turns_mul(t, self.alpha)[..., None])

    @property
    def params(self):
        return {"alpha": self.alpha}


class CircleStackFlow(Flow):
    """(r, theta) -> (r, theta + r) on the rings r = 2 - 2**-n and r in {1, 2}.

    On ring n one step rotates by -2**-n mod 1, so t steps rotate by the exact
    dyadic ((-t) mod 2**n) / 2**n; the limit rings r = 1, 2 are fixed.
    """

    kind = "circle_stack"

    def __init__(self, depth: int, cap: int = HORIZON_CAP):
        if not 1 <= int(depth) <= 30:
            raise ConfigError("circle stack depth must be in 1..30", key="depth")
        super().__init__(CircleStackSpace(depth), cap)
        self.depth = int(depth)

    def shift(self, t, ring):
        ring = np.asarray(ring).astype(np.int64)
        n = np.where(ring == OUTER, 0, ring)
        mod = np.left_shift(np.int64(1), n)
        return np.mod(-np.asarray(t, dtype=np.int64), mod) / mod.astype(float)

    def _act(self, t, X):
        out = np.array(np.broadcast_to(X, _joint_shape(t, X)), dtype=float)
        out[..., 1] = wrap(out[..., 1] + self.shift(t, out[..., 0]))
        return out

    @property
    def params(self):
        return {"depth": self.depth}


class AnnulusFlow(Flow):
    """(r, theta) -> (1 + (r - 1)**2, theta + alpha): a translation by 1 in the level coordinate."""

    kind = "annulus"

    def __init__(self, alpha: float, cap: int = HORIZON_CAP):
        super().__init__(AnnulusSpace(), cap)
        self.alpha = float(alpha)

    def _act(self, t, X):
        level = X[..., 0] + t
        angle = wrap(X[..., 1] + turns_mul(t, self.alpha))
        return AnnulusSpace.from_levels(level, angle)

    @property
    def params(self):
        return {"alpha": self.alpha}


class TorusCircleFlow(Flow):
    """Skew product (a1, a2) -> (a1 + mu, a1 + a2) on the torus, rotation by alpha on the circle.

    t-th iterate of the skew: (a1 + t mu, a2 + t a1 + mu t(t-1)/2), valid for negative t.
    """

    kind = "torus_circle"

    def __init__(self, mu: float, alpha: float, cap: int = HORIZON_CAP):
        super().__init__(TorusCircleSpace(), cap)
        self.mu = float(mu)
        self.alpha = float(alpha)

    def _act(self, t, X):
        part, a1, a2 = X[..., 0], X[..., 1], X[..., 2]
        tri = t * (t - 1) // 2
        t1 = wrap(a1 + turns_mul(t, self.mu))
        t2 = wrap(a2 + turns_mul(t, a1) + turns_mul(tri, self.mu))
        c1 = wrap(a1 + turns_mul(t, self.alpha))
        on_torus = part == 0
        new1 = np.where(on_torus, t1, c1)
        new2 = np.where(on_torus, t2, 0.0)
        return np.stack(np.broadcast_arrays(part, new1, new2), axis=-1).astype(float)

    @property
    def params(self):
        return {"mu": self.mu, "alpha": self.alpha}


class ShiftFlow(Flow):
    """Left shift (sigma s)_i = s_{i+1} on a sequence space: the block offset moves by -t."""

    kind = "full_shift"

    def __init__(self, space: SeqSpace, cap: int = HORIZON_CAP):
        super().__init__(space, cap)
        self.kind = "full_shift" if space.block is None else "shift_pair"

    def _act(self, t, X):
        out = np.array(np.broadcast_to(X, _joint_shape(t, X)), dtype=np.int64)
        moving = out[..., 3] > 0
        out[..., 2] = np.where(moving, out[..., 2] - t, 0)
        return out

    def embedder(self, X):
        # Only the offset moves, and once the block leaves the window the words stop
        # changing, so each row needs one embedding per offset in a bounded range.
        X = np.asarray(X, dtype=np.int64)
        flat = X.reshape(-1, 5)
        W = self.space.window
        length, off0 = flat[:, 3], flat[:, 2]
        moving = length > 0
        lo = np.where(moving, -W - length, off0)
        span = 2 * W + 2 + int(length.max(initial=0))
        rows = np.repeat(flat[:, None, :], span, axis=1)
        rows[:, :, 2] = np.where(moving[:, None], lo[:, None] + np.arange(span), off0[:, None])
        table = self.space.embed(rows)
        row_ids = np.arange(flat.shape[0])[None, :]

        def embed_at(ts):
            ts = self._check_t(np.asarray(ts)).reshape(-1)
            idx = np.where(moving, np.clip(off0[None, :] - ts[:, None] - lo, 0, span - 1), 0)
            out = table[row_ids, idx]
            return out.reshape((ts.size,) + X.shape[:-1] + out.shape[-1:])

        return embed_at

    @property
    def params(self):
        d = self.space.descriptor()
        d.pop("kind")
        return d


class InducedFlow(Flow):
    """t . p = pi^t o p on sampled maps (points of a FunctionMetric space)."""

    kind = "induced"

    def __init__(self, base: Flow, metric: FunctionMetric):
        super().__init__(metric, base.cap)
        self.base = base

    def _act(self, t, P):
        # one extra trailing axis per nesting level is absorbed by the base flow
        extra = len(self.space.point_shape) - len(self.base.space.point_shape)
        tt = t.reshape(t.shape + (1,) * extra) if t.ndim else t
        return self.base._act(tt, P)

    def embedder(self, X):
        return self.base.embedder(X)

    def apply(self, t, p):
        return self.act(int(t), self.space.as_array(p))

    def orbit(self, p, horizon, direction="forward"):
        times = orbit_times(horizon, direction)
        P = self.trajectory(times, self.space.as_array(p))
        return [(int(t), P[i]) for i, t in enumerate(times)]

    @property
    def params(self):
        return {"base": self.base.descriptor()}


def make_flow(desc: dict[str, Any]) -> Flow:
    """Build a flow from a descriptor such as ``{"kind": "annulus", "alpha": "golden"}``."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("flow descriptor needs a 'kind'", key="kind")
    kind = desc["kind"]
    allowed = {
        "rotation": {"alpha"},
        "identity": {"space"},
        "circle_stack": {"depth"},
        "annulus": {"alpha"},
        "torus_circle": {"mu", "alpha"},
        "shift_pair": {"block", "window"},
        "full_shift": {"window"},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown flow kind {kind!r}; choose from {sorted(allowed)}", key="kind")
    extra = set(desc) - allowed[kind] - {"kind"}
    if extra:
        raise ConfigError(f"unexpected parameter(s) {sorted(extra)} for {kind}", key=sorted(extra)[0])

    def alpha():
        return resolve_irrational(desc.get("alpha", "golden"), "alpha")

    if kind == "rotation":
        return Rotation(alpha())
    if kind == "identity":
        space = desc.get("space", {"kind": "circle"})
        return IdentityFlow(space_from_descriptor(space) if isinstance(space, dict) else space)
    if kind == "circle_stack":
        return CircleStackFlow(_int(desc.get("depth", 6), "depth", 1, 30))
    if kind == "annulus":
        return AnnulusFlow(alpha())
    if kind == "torus_circle":
        return TorusCircleFlow(resolve_irrational(desc.get("mu", "silver"), "mu"), alpha())
    if kind == "full_shift":
        return ShiftFlow(SeqSpace(_int(desc.get("window", 8), "window", 1, 62)))
    block = desc.get("block", [1])
    if isinstance(block, str):
        block = [int(c) for c in block if c in "01"]
    if not block or any(b not in (0, 1) for b in block):
        raise ConfigError("block must be a nonempty 0/1 word", key="block")
    window = _int(desc.get("window", 8), "window", 1, 62)
    if window < len(block):
        raise ConfigError(f"window {window} shorter than block length {len(block)}", key="window")
    return ShiftFlow(SeqSpace(window, block))


def _int(value, key, lo, hi) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}", key=key)
    if not lo <= value <= hi:
        raise ConfigError(f"{key} must be in {lo}..{hi}, got {value}", key=key)
    return value


def apply(flow: Flow, t: int, x):
    return flow.apply(t, x)


def orbit(flow: Flow, x, horizon: int, direction: str = "forward") -> list:
    return flow.orbit(x, horizon, direction)


def orbit_rows(flow: Flow, x, horizon: int, direction: str = "forward") -> list[tuple]:
    """CSV rows (t, coord1, coord2, tag) for an orbit segment."""
    return [(t, *flow.space.csv_fields(p)) for t, p in flow.orbit(x, horizon, direction)]
