import numpy as np
import pytest

from conftest import GOLDEN, SILVER
from ellislab.errors import ConfigError, HorizonError
from ellislab.flows import (
    AnnulusFlow,
    CircleStackFlow,
    IdentityFlow,
    InducedFlow,
    Rotation,
    ShiftFlow,
    TorusCircleFlow,
    make_flow,
    orbit_rows,
    resolve_irrational,
)
from ellislab.spaces import AnnulusPoint, CirclePoint, FunctionMetric, SeqPoint, SeqSpace, StackPoint, TorusPoint

FLOWS = [
    IdentityFlow(),
    Rotation(GOLDEN),
    AnnulusFlow(GOLDEN),
    CircleStackFlow(8),
    TorusCircleFlow(SILVER, GOLDEN),
    ShiftFlow(SeqSpace(12)),
    ShiftFlow(SeqSpace(12, (1, 0, 1))),
]


@pytest.mark.parametrize("flow", FLOWS, ids=lambda f: f.kind)
def test_action_law(flow, rng):
    X = flow.space.random(rng, 200)
    assert np.array_equal(flow.act(0, X), X)
    for s, t in [(3, 5), (-7, 2), (1000, -999), (4096, 4096)]:
        lhs = flow.act(s + t, X)
        rhs = flow.act(s, flow.act(t, X))
        assert np.all(flow.space.dist(lhs, rhs) < 1e-9)


@pytest.mark.parametrize("flow", FLOWS, ids=lambda f: f.kind)
def test_trajectory_matches_act(flow, rng):
    X = flow.space.random(rng, 5)
    ts = np.array([-3, 0, 2, 17])
    T = flow.trajectory(ts, X)
    for i, t in enumerate(ts):
        assert np.array_equal(T[i], flow.act(int(t), X))


def test_stack_odd_iterate_is_half_turn():
    f = CircleStackFlow(4)
    assert f.apply(1, StackPoint(1, 0.0)) == StackPoint(1, 0.5)


def test_stack_generator_adds_radius():
    f = CircleStackFlow(5)
    for ring in range(6):
        p = f.apply(1, StackPoint(ring, 0.1))
        assert p.ring == ring
        assert abs(((p.angle - 0.1 - p.r) + 0.5) % 1.0 - 0.5) < 1e-12


def test_annulus_outer_circle_fixed_radius():
    f = AnnulusFlow(GOLDEN)
    p = f.apply(1, AnnulusPoint.at(2.0, 0.3))
    assert p.r == 2.0
    assert p.angle == pytest.approx((0.3 + GOLDEN) % 1.0, abs=1e-12)


def test_annulus_radius_after_three_steps():
    f = AnnulusFlow(GOLDEN)
    assert f.apply(3, AnnulusPoint.at(1.5, 0.0)).r == pytest.approx(1.00390625, abs=1e-15)


def test_annulus_generator_formula(rng):
    f = AnnulusFlow(GOLDEN)
    for r, a in rng.random((20, 2)):
        p = f.apply(1, AnnulusPoint.at(1 + r, a))
        assert p.r == pytest.approx(1 + r * r, abs=1e-12)
        assert p.angle == pytest.approx((a + GOLDEN) % 1.0, abs=1e-12)


def test_torus_generator_formula():
    f = TorusCircleFlow(SILVER, GOLDEN)
    X = np.array([[0.0, 0.3, 0.55]])
    Y = f.act(1, X)
    assert Y[0, 1] == pytest.approx((0.3 + SILVER) % 1.0, abs=1e-12)
    assert Y[0, 2] == pytest.approx(0.85, abs=1e-12)
    c = f.act(1, np.array([[1.0, 0.2, 0.0]]))
    assert c[0, 1] == pytest.approx((0.2 + GOLDEN) % 1.0, abs=1e-12)


def test_torus_iterate_matches_stepping():
    f = TorusCircleFlow(SILVER, GOLDEN)
    x = np.array([0.0, 0.123, 0.456])
    a1, a2 = x[1], x[2]
    for _ in range(50):
        a1, a2 = (a1 + SILVER) % 1.0, (a1 + a2) % 1.0
    y = f.act(50, x)
    assert y[1] == pytest.approx(a1, abs=1e-9)
    assert y[2] == pytest.approx(a2, abs=1e-9)


def test_identity_orbit_constant():
    f = IdentityFlow()
    assert all(p == CirclePoint(0.4) for _, p in f.orbit(CirclePoint(0.4), 10))


def test_rotation_orbit_angles():
    f = Rotation(GOLDEN)
    orb = f.orbit(CirclePoint(0.0), 100)
    assert [t for t, _ in orb] == list(range(101))
    expected = (np.arange(101) * GOLDEN) % 1.0
    got = np.array([p.angle for _, p in orb])
    assert np.all(np.minimum(abs(got - expected), 1 - abs(got - expected)) < 1e-9)


def test_shift_pair_single_one_moves_left():
    f = ShiftFlow(SeqSpace(8, (1,)))
    x = SeqPoint(0, 0, (1,), 0)
    for t, p in f.orbit(x, 8):
        w = p.window(8)
        assert w.count(1) == (1 if t <= 8 else 0)
        assert w.index(1) - 8 == -t


def test_induced_flow_translates_powers(rng):
    f = Rotation(GOLDEN)
    grid = f.space.sample_grid(8).points
    induced = InducedFlow(f, FunctionMetric.sup(f.space, grid))
    ps = f.act(5, grid)
    assert np.all(induced.space.dist(induced.act(3, ps), f.act(8, grid)) < 1e-12)
    assert np.array_equal(induced.act(0, ps), ps)


def test_horizon_cap():
    f = Rotation(GOLDEN, cap=100)
    with pytest.raises(HorizonError):
        f.act(101, np.zeros((1, 1)))


def test_make_flow_and_presets():
    assert make_flow({"kind": "rotation", "alpha": "golden"}).alpha == GOLDEN
    assert make_flow({"kind": "circle_stack", "depth": 3}).depth == 3
    assert make_flow({"kind": "shift_pair", "block": "101", "window": 8}).space.block == (1, 0, 1)
    with pytest.raises(ConfigError):
        make_flow({"kind": "rotation", "alpha": 0.5})
    with pytest.raises(ConfigError):
        make_flow({"kind": "mystery"})
    with pytest.raises(ConfigError):
        make_flow({"kind": "annulus", "depth": 2})
    with pytest.raises(ConfigError):
        resolve_irrational("bronze", "alpha")


def test_orbit_rows_shape():
    rows = orbit_rows(Rotation(GOLDEN), CirclePoint(0.0), 10)
    assert len(rows) == 11
    assert rows[0][0] == 0 and rows[-1][0] == 10
    tc = TorusCircleFlow(SILVER, GOLDEN)
    assert orbit_rows(tc, TorusPoint(0.1, 0.2), 3)[0][3] == "torus"


@pytest.mark.parametrize("block", [None, (1,), (1, 0, 1, 1)])
def test_shift_embedded_trajectory_matches_generic(block, rng):
    space = SeqSpace(6, block)
    flow = ShiftFlow(space)
    X = space.sample_grid(2).points
    ts = np.arange(-40, 41)
    fast = flow.embedded_trajectory(ts, X)
    slow = space.embed(flow.trajectory(ts, X))
    assert np.array_equal(fast, slow)
