"""Closed-form enveloping semigroups of the annulus, circle-stack and shift-pair flows.

Composition ``compose(a, b)`` always means a∘b: apply ``b`` first.  Angles
are stored mod 1 and compared with tolerance ``ANGLE_TOL``.

Annulus family (rotation number alpha):
    Power(n)   the n-th iterate
    H1(beta)   r in [1, 2) -> r = 1, r = 2 fixed, angle + beta
    H2(beta)   r in (1, 2] -> r = 2, r = 1 fixed, angle - beta
Odometer family: Odometer(v) rotates ring n by -(v mod 2**n) / 2**n, fixes r in {1, 2}.
Shift-pair family: Power(n) and Collapse, which sends each point to the fixed
sequence of its own fill symbol.
Second level of the annulus: InducedPower(n), IH1(eta), IH2(eta) act on
first-level elements as left multiplication by Power(n), H1(eta), H2(eta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import HorizonExhausted, KindError
from .flows import AnnulusFlow, CircleStackFlow, ShiftFlow
from .spaces import (
    ANGLE_TOL,
    OUTER,
    AnnulusSpace,
    CircleStackSpace,
    SeqPoint,
    SeqSpace,
    circle_distance,
    turns_mul,
    wrap,
    wrap_scalar,
)
from .verdict import Verdict, Witness


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class Power:
    n: int

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class H1:
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", wrap_scalar(self.beta))


@dataclass(frozen=True)
class H2:
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", wrap_scalar(self.beta))


@dataclass(frozen=True)
class Collapse:
    pass


@dataclass(frozen=True)
class Odometer:
    """Truncated 2-adic integer ``value`` mod 2**depth."""

    value: int
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % (1 << int(self.depth)))

    @property
    def digits(self) -> tuple:
        """Binary digits, least significant first."""
        return tuple((self.value >> i) & 1 for i in range(self.depth))

    @classmethod
    def from_digits(cls, digits: Sequence[int]) -> "Odometer":
        return cls(sum(int(d) << i for i, d in enumerate(digits)), len(digits))


@dataclass(frozen=True)
class InducedPower:
    n: int

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class IH1:
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", wrap_scalar(self.eta))


@dataclass(frozen=True)
class IH2:
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", wrap_scalar(self.eta))


_ELEMENT_TYPES = {c.__name__: c for c in (Power, H1, H2, Collapse, Odometer, InducedPower, IH1, IH2)}


def element_to_json(e) -> dict:
    return {"type": type(e).__name__, **{k: v for k, v in vars(e).items()}}


def element_from_json(d: dict):
    d = dict(d)
    cls = _ELEMENT_TYPES.get(d.pop("type", None))
    if cls is None:
        raise KindError(f"unknown element type in {d!r}")
    return cls(**d)


def element_label(e) -> str:
    if isinstance(e, (Power, InducedPower)):
        return f"{type(e).__name__}({e.n})"
    if isinstance(e, (H1, H2)):
        return f"{type(e).__name__}({e.beta:.12g})"
    if isinstance(e, (IH1, IH2)):
        return f"{type(e).__name__}({e.eta:.12g})"
    if isinstance(e, Odometer):
        return f"Odometer({e.value} mod 2^{e.depth})"
    return type(e).__name__


def _angle_eq(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    d = (float(a) - float(b)) % 1.0
    return min(d, 1.0 - d) <= tol


# ---------------------------------------------------------------------------
# algebras


class Algebra:
    """Exact semigroup of one family: evaluation, composition, equality."""

    family = "abstract"
    element_types: tuple = ()

    def check(self, e):
        if not isinstance(e, self.element_types):
            raise KindError(f"{type(e).__name__} is not an element of the {self.family} family")
        return e

    def identity(self):
        return Power(0)

    def evaluate(self, e, X) -> np.ndarray:
        raise NotImplementedError

    def eval_point(self, e, x):
        space = self.space
        space.check(x)
        return space.unpack_one(self.evaluate(e, space.pack_one(x)))

    def compose(self, a, b):
        raise NotImplementedError

    def equal(self, a, b, tol: float = ANGLE_TOL) -> bool:
        raise NotImplementedError

    def act(self, t: int, e):
        """Induced action t . e = pi^t o e."""
        return self.compose(Power(t), e)

    def inverse(self, e):
        """Two-sided inverse within the family, or None."""
        raise NotImplementedError

    def collision(self, e):
        """Two distinct points with the same image under ``e``, or None."""
        raise NotImplementedError

    def candidates_for_iterate(self, t: int) -> list:
        """Symbolic elements a sampled iterate pi^t may be tagged with, limit elements first."""
        return [Power(t)]


class AnnulusAlgebra(Algebra):
    family = "annulus"
    element_types = (Power, H1, H2)

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.flow = AnnulusFlow(self.alpha)
        self.space: AnnulusSpace = self.flow.space
        self._turns: dict[int, float] = {}

    def turn(self, n: int) -> float:
        """n * alpha mod 1."""
        n = int(n)
        if n not in self._turns:
            self._turns[n] = float(turns_mul(n, self.alpha))
        return self._turns[n]

    def evaluate(self, e, X):
        self.check(e)
        X = np.asarray(X, dtype=float)
        if isinstance(e, Power):
            return self.flow.act(e.n, X)
        level, angle = X[..., 0], X[..., 1]
        if isinstance(e, H1):
            new_level = np.where(level == -np.inf, -np.inf, np.inf)
            new_angle = wrap(angle + e.beta)
        else:
            new_level = np.where(level == np.inf, np.inf, -np.inf)
            new_angle = wrap(angle - e.beta)
        return AnnulusSpace.from_levels(new_level, new_angle)

    def compose(self, a, b):
        self.check(a)
        self.check(b)
        if isinstance(a, Power):
            if isinstance(b, Power):
                return Power(a.n + b.n)
            if isinstance(b, H1):
                return H1(b.beta + self.turn(a.n))
            return H2(b.beta - self.turn(a.n))
        if isinstance(b, Power):
            if isinstance(a, H1):
                return H1(a.beta + self.turn(b.n))
            return H2(a.beta - self.turn(b.n))
        if isinstance(a, H1) and isinstance(b, H1):
            return H1(a.beta + b.beta)
        if isinstance(a, H1) and isinstance(b, H2):
            return H2(b.beta - a.beta)
        if isinstance(a, H2) and isinstance(b, H1):
            return H1(b.beta - a.beta)
        return H2(a.beta + b.beta)

    def equal(self, a, b, tol=ANGLE_TOL):
        if type(a) is not type(b):
            return False
        if isinstance(a, Power):
            return a.n == b.n
        return _angle_eq(a.beta, b.beta, tol)

    def inverse(self, e):
        self.check(e)
        return Power(-e.n) if isinstance(e, Power) else None

    def collision(self, e):
        self.check(e)
        if isinstance(e, H1):
            return self.space.pack([_ann(1.5, 0.0), _ann(1.25, 0.0)])
        if isinstance(e, H2):
            return self.space.pack([_ann(1.5, 0.0), _ann(1.75, 0.0)])
        return None

    def candidates_for_iterate(self, t):
        if t > 0:
            return [H1(self.turn(t)), Power(t)]
        if t < 0:
            return [H2(-self.turn(t)), Power(t)]
        return [Power(0)]

    def probe_set(self, rng: np.random.Generator, n_random: int = 100, powers: Iterable[int] = range(-5, 6)) -> list:
        probes: list = [Power(n) for n in powers]
        probes += [H1(b) for b in rng.random(n_random)]
        probes += [H2(b) for b in rng.random(n_random)]
        return probes


def _ann(r, a):
    from .spaces import AnnulusPoint

    return AnnulusPoint.at(r, a)


class OdometerAlgebra(Algebra):
    """Enveloping semigroup of the circle stack truncated at ``depth`` rings: Z / 2**depth."""

    family = "odometer"
    element_types = (Odometer, Power)

    def __init__(self, depth: int):
        self.depth = int(depth)
        self.flow = CircleStackFlow(self.depth)
        self.space: CircleStackSpace = self.flow.space

    def element(self, e) -> Odometer:
        self.check(e)
        if isinstance(e, Power):
            return Odometer(e.n, self.depth)
        if e.depth != self.depth:
            raise KindError(f"odometer of depth {e.depth} used in a depth-{self.depth} algebra")
        return e

    def identity(self):
        return Odometer(0, self.depth)

    def evaluate(self, e, X):
        v = self.element(e).value
        return self.flow.act(v, X)

    def compose(self, a, b):
        return Odometer(self.element(a).value + self.element(b).value, self.depth)

    def equal(self, a, b, tol=ANGLE_TOL):
        return self.element(a).value == self.element(b).value

    def act(self, t, e):
        return Odometer(self.element(e).value + int(t), self.depth)

    def inverse(self, e):
        return Odometer(-self.element(e).value, self.depth)

    def collision(self, e):
        return None

    def candidates_for_iterate(self, t):
        return [Odometer(t, self.depth)]

    def elements(self) -> list:
        return [Odometer(v, self.depth) for v in range(1 << self.depth)]


class ShiftAlgebra(Algebra):
    """Enveloping semigroup {sigma^n} ∪ {Collapse} of the shift-pair flow."""

    family = "shift_pair"
    element_types = (Power, Collapse)

    def __init__(self, block: Sequence[int], window: int):
        self.space = SeqSpace(window, block)
        self.flow = ShiftFlow(self.space)

    def evaluate(self, e, X):
        self.check(e)
        X = np.asarray(X, dtype=np.int64)
        if isinstance(e, Power):
            return self.flow.act(e.n, X)
        out = np.zeros_like(X)
        out[..., 0] = X[..., 0]
        out[..., 1] = X[..., 0]
        return out

    def compose(self, a, b):
        self.check(a)
        self.check(b)
        if isinstance(a, Power) and isinstance(b, Power):
            return Power(a.n + b.n)
        return Collapse()

    def equal(self, a, b, tol=ANGLE_TOL):
        return a == b

    def inverse(self, e):
        self.check(e)
        return Power(-e.n) if isinstance(e, Power) else None

    def collision(self, e):
        self.check(e)
        if isinstance(e, Collapse):
            x, _ = self.space.generators()
            return self.space.pack([x, SeqPoint.fill(0)])
        return None

    def candidates_for_iterate(self, t):
        return [Collapse(), Power(t)] if t != 0 else [Power(0)]


class InducedAnnulusAlgebra(Algebra):
    """Second level of the annulus: maps of E(X) given by the action tables on first-level elements."""

    family = "induced_annulus"
    element_types = (InducedPower, IH1, IH2)

    def __init__(self, first: AnnulusAlgebra):
        self.first = first

    def identity(self):
        return InducedPower(0)

    def apply(self, E, e):
        """Image of the first-level element ``e`` under the second-level element ``E``."""
        self.check(E)
        self.first.check(e)
        return self._apply(E, e)

    def _apply(self, E, e):
        turn = self.first.turn
        if isinstance(E, InducedPower):
            if isinstance(e, Power):
                return Power(E.n + e.n)
            return type(e)(e.beta + turn(E.n) if isinstance(e, H1) else e.beta - turn(E.n))
        if isinstance(E, IH1):
            if isinstance(e, Power):
                return H1(E.eta + turn(e.n))
            if isinstance(e, H1):
                return H1(e.beta + E.eta)
            return H2(e.beta - E.eta)
        if isinstance(e, Power):
            return H2(E.eta - turn(e.n))
        if isinstance(e, H1):
            return H1(e.beta - E.eta)
        return H2(e.beta + E.eta)

    def compose(self, A, B):
        self.check(A)
        self.check(B)
        turn = self.first.turn
        if isinstance(A, InducedPower):
            if isinstance(B, InducedPower):
                return InducedPower(A.n + B.n)
            if isinstance(B, IH1):
                return IH1(B.eta + turn(A.n))
            return IH2(B.eta - turn(A.n))
        if isinstance(B, InducedPower):
            if isinstance(A, IH1):
                return IH1(A.eta + turn(B.n))
            return IH2(A.eta - turn(B.n))
        if isinstance(A, IH1) and isinstance(B, IH1):
            return IH1(A.eta + B.eta)
        if isinstance(A, IH1) and isinstance(B, IH2):
            return IH2(B.eta - A.eta)
        if isinstance(A, IH2) and isinstance(B, IH1):
            return IH1(B.eta - A.eta)
        return IH2(A.eta + B.eta)

    def act(self, t, E):
        return self.compose(InducedPower(t), E)

    def equal(self, A, B, tol=ANGLE_TOL):
        if type(A) is not type(B):
            return False
        if isinstance(A, InducedPower):
            return A.n == B.n
        return _angle_eq(A.eta, B.eta, tol)

    def inverse(self, E):
        self.check(E)
        return InducedPower(-E.n) if isinstance(E, InducedPower) else None

    def collision(self, E):
        self.check(E)
        # both elements of the returned pair map to the same image
        if isinstance(E, IH1):
            return [Power(0), H1(0.0)]
        if isinstance(E, IH2):
            return [Power(0), H2(0.0)]
        return None

    def evaluate(self, E, X):
        raise KindError("second-level elements act on first-level elements; use apply()")


def make_algebra(flow):
    """Symbolic algebra matching a flow, or KindError when none is tabulated."""
    if isinstance(flow, AnnulusFlow):
        return AnnulusAlgebra(flow.alpha)
    if isinstance(flow, CircleStackFlow):
        return OdometerAlgebra(flow.depth)
    if isinstance(flow, ShiftFlow) and flow.space.block is not None:
        return ShiftAlgebra(flow.space.block, flow.space.window)
    raise KindError(f"no closed-form enveloping semigroup for {flow.kind}")


# ---------------------------------------------------------------------------
# operations


def eval_symbolic(algebra: Algebra, e, x):
    return algebra.eval_point(e, x)


def compose(algebra: Algebra, a, b):
    return algebra.compose(a, b)


def iso_G(e):
    """G(lim pi^t) = lim of the induced iterates: Power -> InducedPower, H1 -> IH1, H2 -> IH2."""
    if isinstance(e, Power):
        return InducedPower(e.n)
    if isinstance(e, H1):
        return IH1(e.beta)
    if isinstance(e, H2):
        return IH2(e.beta)
    raise KindError(f"G is tabulated for the annulus family only, not {type(e).__name__}")


def iso_G_inverse(E):
    if isinstance(E, InducedPower):
        return Power(E.n)
    if isinstance(E, IH1):
        return H1(E.eta)
    if isinstance(E, IH2):
        return H2(E.eta)
    raise KindError(f"{type(E).__name__} is not in the image of G")


def check_equivariance(second: InducedAnnulusAlgebra, t: int, e, probes: Sequence | None = None) -> bool:
    """G(t . e) == t . G(e), compared structurally and by action on probe elements."""
    lhs = iso_G(second.first.act(t, e))
    rhs = second.act(t, iso_G(e))
    if not second.equal(lhs, rhs):
        return False
    if lhs == rhs:
        # bitwise-identical elements act identically; probing only matters within tolerance
        return True
    first = second.first
    for q in probes or ():
        first.check(q)
        if not first.equal(second._apply(lhs, q), second._apply(rhs, q)):
            return False
    return True


def is_injective_on(second_or_first, elements: Sequence, mapping) -> tuple[bool, tuple | None]:
    """Whether ``mapping`` is injective on ``elements``; returns a colliding pair if not."""
    images = [mapping(e) for e in elements]
    for i in range(len(elements)):
        for j in range(i):
            if second_or_first.equal(images[i], images[j]) and not _same(elements[i], elements[j]):
                return False, (elements[j], elements[i])
    return True, None


def _same(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (H1, H2)):
        return _angle_eq(a.beta, b.beta)
    return a == b


@dataclass
class LimitResult:
    element: object
    witnesses: list
    errors: list


def limit_of_powers(algebra: Algebra, target, tolerance: float, horizon: int, direction: str = "forward") -> LimitResult:
    """Limit element of pi^{n_k} along times whose rotation approaches ``target``.

    Annulus: forward times give H1(target), backward times give H2(target); the
    witness list holds the exponents (negative for backward), |n_k| increasing.
    Odometer: ``target`` is the residue v; witnesses are n = v mod 2**depth.
    """
    horizon = int(horizon)
    if isinstance(algebra, OdometerAlgebra):
        mod = 1 << algebra.depth
        v = int(target) % mod
        wits = list(range(v if v else mod, horizon + 1, mod))
        if not wits:
            raise HorizonExhausted(f"no n <= {horizon} with n = {v} mod {mod}", best=None)
        return LimitResult(Odometer(v, algebra.depth), wits, [0.0] * len(wits))
    if not isinstance(algebra, AnnulusAlgebra):
        raise KindError(f"limit_of_powers is not tabulated for {algebra.family}")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be forward or backward")
    beta = wrap_scalar(target)
    n = np.arange(1, horizon + 1)
    err = circle_distance(turns_mul(n, algebra.alpha), beta)
    hit = err < tolerance
    if not hit.any():
        k = int(np.argmin(err))
        best = (int(n[k]) if direction == "forward" else -int(n[k]), float(err[k]))
        raise HorizonExhausted(f"no power within {tolerance} of {beta} up to horizon {horizon}", best=best)
    sign = 1 if direction == "forward" else -1
    wits = [sign * int(v) for v in n[hit]]
    element = H1(beta) if direction == "forward" else H2(beta)
    return LimitResult(element, wits, [float(v) for v in err[hit]])


def group_check(algebra: Algebra, probes: Sequence) -> Verdict:
    """Closure under composition, identity and inverses on a finite probe set."""
    notes = []
    witnesses = []
    ident = algebra.identity()
    for a in probes:
        for b in probes:
            algebra.check(algebra.compose(a, b))
    for e in probes:
        inv = algebra.inverse(e)
        if inv is not None and algebra.equal(algebra.compose(e, inv), ident) and algebra.equal(algebra.compose(inv, e), ident):
            continue
        pts = algebra.collision(e)
        label = element_label(e)
        if pts is not None and not hasattr(algebra, "space"):
            a, b = pts
            notes.append(f"{label} maps {element_label(a)} and {element_label(b)} to the same element")
        elif pts is not None:
            img = algebra.evaluate(e, pts)
            d = float(algebra.space.dist(img[0], img[1]))
            witnesses.append(
                Witness(
                    kind="collision",
                    points=pts,
                    labels=(label,),
                    t=0,
                    distance=d,
                    epsilon=ANGLE_TOL,
                    images=img,
                    space=algebra.space,
                )
            )
        notes.append(f"{label} has no inverse in the family")
        if len(witnesses) >= 3:
            break
    if isinstance(algebra, AnnulusAlgebra):
        phi = next((e.beta for e in probes if isinstance(e, H1)), 0.0)
        prod = algebra.compose(H2(phi), H1(phi))
        if not algebra.equal(prod, ident):
            notes.append(f"H2({phi:.6g}) o H1({phi:.6g}) = {element_label(prod)} != identity")
    outcome = "fails" if notes else "holds"
    if outcome == "holds":
        notes.append(f"closure, identity and inverses verified exhaustively on {len(probes)} probe elements")
    return Verdict(f"group[{algebra.family}]", outcome, witnesses, {"probes": len(probes)}, notes)
