import numpy as np
import pytest

from conftest import GOLDEN, SILVER
from ellislab import detectors as det
from ellislab.errors import Inconclusive
from ellislab.flows import AnnulusFlow, CircleStackFlow, IdentityFlow, InducedFlow, Rotation, ShiftFlow, TorusCircleFlow
from ellislab.harness import shift_family
from ellislab.spaces import CirclePoint, SeqPoint, SeqSpace


def test_rotation_pair_never_closer():
    f = Rotation(GOLDEN)
    rs = det.proximality(f, CirclePoint(0.0), CirclePoint(0.3), 0.25, 1000)
    assert len(rs) == 0
    assert rs.min_value == pytest.approx(0.3, abs=1e-9)


def test_annulus_radii_merge():
    f = AnnulusFlow(GOLDEN)
    x, y = f.space.from_polar(1.5, 0.0), f.space.from_polar(1.2, 0.0)
    rs = det.proximality(f, x, y, 0.01, 100)
    assert len(rs) > 0
    assert rs.hits.max() == 100


def test_shift_fills_never_proximal():
    f = ShiftFlow(SeqSpace(8, (1,)))
    rs = det.proximality(f, SeqPoint.fill(0), SeqPoint.fill(1), 0.5, 10**4)
    assert len(rs) == 0 and rs.min_value == 1.0


def test_pair_return_sets_match_single_scans(rng):
    f = Rotation(GOLDEN)
    pts = f.space.random(rng, 4)
    sets = det.pair_return_sets(f, pts, 0.1, 300)
    assert len(sets) == 6
    for (i, j), rs in sets.items():
        ref = det.proximality(f, pts[i], pts[j], 0.1, 300)
        assert np.array_equal(rs.hits, ref.hits)


def test_syndeticity_cases():
    even = det.ReturnSet.from_hits(range(-100, 101, 2), -100, 100)
    assert det.syndeticity(even, 2)
    assert not det.syndeticity(det.ReturnSet.from_hits([], -10, 10), 5)
    k = 4
    dyadic = det.ReturnSet.from_hits(range(-256, 257, 1 << k), -256, 256)
    assert det.syndeticity(dyadic, 1 << k)
    assert not det.syndeticity(dyadic, (1 << k) - 1)


def test_thick_syndeticity_cases():
    every = det.ReturnSet.from_hits(range(-50, 51), -50, 50)
    for k in range(1, 6):
        for K in (1, 3):
            assert det.thick_syndeticity(every, k, K)
    even = det.ReturnSet.from_hits(range(-50, 51, 2), -50, 50)
    assert not det.thick_syndeticity(even, 2, 10)
    with pytest.raises(Inconclusive):
        det.run_starts(det.ReturnSet.from_hits([0], 0, 1), 5)


def test_induced_shift_pair_thick_return_set():
    fam = shift_family((1,), 32, nmax=20)
    rs = det.proximality(fam.flow, fam.images[0], fam.images[5], 0.25, 10**4)
    assert det.thick_syndeticity(rs, 5, 256)


def test_rotation_equicontinuous_with_delta_epsilon():
    f = Rotation(GOLDEN)
    delta, v = det.equicontinuity_at(f, CirclePoint(0.2), 0.1, 1000, [0.1, 0.01])
    assert delta == 0.1 and v.holds


def test_annulus_interior_point_equicontinuous():
    f = AnnulusFlow(GOLDEN)
    delta, v = det.equicontinuity_at(f, f.space.from_polar(1.5, 0.0), 0.2, 1000, [0.1, 0.01, 1e-3, 1e-4])
    assert delta is not None and v.holds


def test_annulus_outer_circle_not_equicontinuous():
    f = AnnulusFlow(GOLDEN)
    delta, v = det.equicontinuity_at(f, f.space.from_polar(2.0, 0.0), 0.2, 1000, [0.1, 0.01, 1e-3, 1e-4])
    assert delta is None and v.outcome == "fails"
    assert v.witnesses[0].replay(f)


def test_torus_part_sensitive():
    f = TorusCircleFlow(SILVER, GOLDEN)
    grid = f.space.sample_grid(4, part="torus").points
    eps, v = det.sensitivity(f, grid, 1000, [0.25])
    assert eps == 0.25 and v.holds
    assert all(w.replay(f) for w in v.witnesses)


@pytest.mark.parametrize("flow", [Rotation(GOLDEN), IdentityFlow()], ids=["rotation", "identity"])
def test_isometries_not_sensitive(flow):
    grid = flow.space.sample_grid(8).points
    eps, v = det.sensitivity(flow, grid, 1000, [0.25, 0.1, 0.05, 0.01])
    assert eps is None and v.outcome == "fails"


@pytest.mark.parametrize("k", [3, 5])
def test_stack_weak_rigidity_time(k):
    f = CircleStackFlow(k)
    pts = np.array([[float(n), 0.3] for n in range(1, k + 1)])
    t, v = det.weak_rigidity(f, pts, 0.01, 4 << k)
    assert t == 1 << k


def test_full_shift_not_weakly_rigid():
    f = ShiftFlow(SeqSpace(8))
    x = f.space.pack([SeqPoint(0, 0, (1,), 0)])
    t, v = det.weak_rigidity(f, x, 0.5, 1000)
    assert t is None and v.params["min_distance"] == 1.0


def test_torus_weakly_rigid(rng):
    f = TorusCircleFlow(SILVER, GOLDEN)
    pts = np.concatenate([f.space.random(rng, 2, part="torus"), f.space.random(rng, 1, part="circle")])
    t, v = det.weak_rigidity(f, pts, 0.05, 10**5)
    assert t is not None
    assert v.witnesses[0].replay(f)


def test_uniform_rigidity_cases():
    rot = Rotation(GOLDEN)
    grid = rot.space.sample_grid(16).points
    t_all, _ = det.uniform_rigidity(rot, grid, 0.05, 1000)
    t_one, _ = det.weak_rigidity(rot, grid[:1], 0.05, 1000)
    assert t_all == t_one
    assert det.uniform_rigidity(IdentityFlow(), grid, 0.05, 10)[0] == 1
    for k in (3, 6):
        st = CircleStackFlow(k)
        assert det.uniform_rigidity(st, st.space.sample_grid(4).points, 0.25, 4 << k)[0] == 1 << k


def test_transitivity_cases():
    rot = Rotation(GOLDEN)
    grid = rot.space.sample_grid(64).points
    assert det.transitivity(rot, CirclePoint(0.1), 0.05, 1000, grid)[0]
    assert not det.transitivity(IdentityFlow(), CirclePoint(0.1), 0.05, 1000, grid)[0]
    st = CircleStackFlow(4)
    assert not det.transitivity(st, np.array([1.0, 0.0]), 0.05, 1000, st.space.sample_grid(8).points)[0]


def test_fixed_point_detection():
    fam = shift_family((1,), 32, nmax=20)
    p, v = det.unique_minimal_fixed_point(fam.flow, fam.images, 0.25, 500, fam.labels)
    assert v.holds and v.params["fixed_point"] == "g"
    flow = ShiftFlow(SeqSpace(8, (1,)))
    p, v = det.unique_minimal_fixed_point(flow, flow.space.sample_grid(1).points, 0.25, 200)
    assert v.outcome == "fails"
    rot = Rotation(GOLDEN)
    p, v = det.unique_minimal_fixed_point(rot, rot.space.sample_grid(8).points, 0.1, 100)
    assert p is None and v.outcome == "fails"


def test_stack_distality_bounds(rng):
    f = CircleStackFlow(4)
    pairs = np.array([[[2, 0.1], [2, 0.4]], [[1, 0.0], [3, 0.0]]], dtype=float)
    mins, _ = det.pair_minima(f, pairs, 500)
    assert mins[0] == pytest.approx(0.3, abs=1e-12)
    assert mins[1] >= 0.25 - 1e-12
