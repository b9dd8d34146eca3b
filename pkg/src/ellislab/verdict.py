"""Certificates (witnesses) and verdicts returned by detectors and checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

OUTCOMES = ("holds", "fails", "inconclusive")


@dataclass
class Witness:
    """Points, a time and the distance they realise, replayable against a flow.

    kind:
      pair       d(t x0, t x1)
      return     max_i d(t x_i, x_i)
      fixed      d(1 x0, x0)
      static     d(x0, x1), no dynamics involved
      collision  d(e x0, e x1) for a non-injective element e; ``images`` holds e x0, e x1
    """

    kind: str
    points: np.ndarray
    t: int
    distance: float
    epsilon: float
    labels: tuple = ()
    images: np.ndarray | None = None
    space: Any = field(default=None, repr=False, compare=False)

    def measure(self, flow=None) -> float:
        space = flow.space if flow is not None else self.space
        P = np.asarray(self.points)
        if self.kind == "pair":
            moved = flow.act(self.t, P)
            return float(space.dist(moved[0], moved[1]))
        if self.kind == "return":
            return float(np.max(space.dist(flow.act(self.t, P), P)))
        if self.kind == "fixed":
            return float(space.dist(flow.act(1, P[0]), P[0]))
        if self.kind == "collision":
            return float(space.dist(self.images[0], self.images[1]))
        return float(space.dist(P[0], P[1]))

    def replay(self, flow=None, tol: float = 1e-9) -> bool:
        """Recompute the distance from the stored inputs and compare."""
        return abs(self.measure(flow) - self.distance) <= tol

    def to_json(self) -> dict:
        d = {
            "kind": self.kind,
            "t": int(self.t),
            "distance": float(self.distance),
            "epsilon": float(self.epsilon),
            "points": np.asarray(self.points).tolist(),
        }
        if self.labels:
            d["labels"] = list(self.labels)
        if self.images is not None:
            d["images"] = np.asarray(self.images).tolist()
        return d


@dataclass
class Verdict:
    prop: str
    outcome: str
    witnesses: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}, got {self.outcome!r}")
        if not self.witnesses and not self.notes:
            raise ValueError(f"verdict '{self.prop}' needs a witness or a note")

    @property
    def holds(self) -> bool:
        return self.outcome == "holds"

    def to_json(self) -> dict:
        return {
            "property": self.prop,
            "outcome": self.outcome,
            "params": self.params,
            "notes": list(self.notes),
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def holds(prop: str, witnesses=(), notes=(), **params) -> Verdict:
    return Verdict(prop, "holds", list(witnesses), params, list(notes))


def fails(prop: str, witnesses=(), notes=(), **params) -> Verdict:
    return Verdict(prop, "fails", list(witnesses), params, list(notes))


def inconclusive(prop: str, reason: str, **params) -> Verdict:
    return Verdict(prop, "inconclusive", [], params, [reason])
