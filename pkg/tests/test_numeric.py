import numpy as np
import pytest

from conftest import GOLDEN
from ellislab.flows import AnnulusFlow, CircleStackFlow, IdentityFlow, Rotation, ShiftFlow, scan_order
from ellislab.numeric import (
    FunctionEntourage,
    SampledMap,
    approximate_semigroup,
    approx_to_json,
    distance_rows,
    induced_act,
    is_isolated_identity,
    sampled_iterate,
    second_level_semigroup,
    symbolic_sample,
    tag_elements,
)
from ellislab.spaces import SeqPoint, SeqSpace
from ellislab.symbolic import H1, AnnulusAlgebra, OdometerAlgebra, Power


def _greedy_rotation_count(alpha, horizon, eps):
    reps = []
    for t in scan_order(horizon, "both"):
        a = (int(t) * alpha) % 1.0
        if all(min(abs(a - r), 1 - abs(a - r)) >= eps for r in reps):
            reps.append(a)
    return len(reps)


def test_sampled_iterate_zero_is_identity():
    f = AnnulusFlow(GOLDEN)
    g = f.space.sample_grid(4).points
    assert np.array_equal(sampled_iterate(f, 0, g).images, g)


def test_sampled_iterate_rotation():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(8).points
    m = sampled_iterate(f, 3, g)
    assert np.all(f.space.dist(m.images, (g + 3 * GOLDEN) % 1.0) < 1e-12)
    assert m.provenance == ("iterate", 3)


def test_annulus_iterate_sixteen_reaches_inner_circle():
    f = AnnulusFlow(GOLDEN)
    g = f.space.from_polar(np.full(4, 1.5), np.arange(4) / 4)
    # 1 + 0.5**(2**16) rounds to 1 in double precision
    assert np.all(f.space.radii(sampled_iterate(f, 16, g).images) == 1.0)


def test_induced_act_translates():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(8).points
    p = sampled_iterate(f, 5, g)
    assert induced_act(f, 0, p).images.tolist() == p.images.tolist()
    q = induced_act(f, 4, p)
    assert q.provenance == ("iterate", 9)
    assert np.all(f.space.dist(q.images, sampled_iterate(f, 9, g).images) < 1e-12)


def test_induced_act_on_h1_matches_table():
    alg = AnnulusAlgebra(GOLDEN)
    g = alg.space.sample_grid(8).points
    p = symbolic_sample(alg, H1(0.3), g)
    q = induced_act(alg.flow, 1, p)
    expected = alg.evaluate(H1(0.3 + GOLDEN), g)
    assert float(np.max(alg.space.dist(q.images, expected))) <= 1e-9


def test_sampled_map_shape_check():
    with pytest.raises(ValueError):
        SampledMap(np.zeros((3, 1)), np.zeros((2, 1)))


def test_identity_flow_single_element():
    f = IdentityFlow()
    first = approximate_semigroup(f, f.space.sample_grid(8).points, 50, 0.05)
    assert len(first) == 1
    second = second_level_semigroup(first, 50, 0.05)
    assert len(second) == 1
    isolated, dmin, _ = is_isolated_identity(first, 0.05)
    assert not isolated and dmin == 0.0


@pytest.mark.parametrize("eps", [0.26, 0.1, 0.05])
def test_rotation_cluster_count_matches_bruteforce(eps):
    f = Rotation(GOLDEN)
    first = approximate_semigroup(f, f.space.sample_grid(16).points, 10**4, eps)
    assert len(first) == _greedy_rotation_count(GOLDEN, 10**4, eps)
    assert len(first) <= int(np.ceil(1 / eps))


def test_net_covers_every_iterate():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(16).points
    first = approximate_semigroup(f, g, 2000, 0.05)
    S = first.stacked()
    imgs = f.trajectory(first.times, g)
    d = first.metric.dist(imgs[:, None], S[None, :]).min(axis=1)
    assert d.max() < 0.05
    D = first.pairwise_distances()
    assert np.all(D[~np.eye(len(first), dtype=bool)] >= 0.05)


def test_rotation_second_level_same_count():
    f = Rotation(GOLDEN)
    first = approximate_semigroup(f, f.space.sample_grid(16).points, 2000, 0.05)
    assert len(second_level_semigroup(first, 2000, 0.05)) == len(first)


def test_annulus_representatives_match_symbolic():
    alg = AnnulusAlgebra(GOLDEN)
    first = approximate_semigroup(alg.flow, alg.space.sample_grid(8).points, 2000, 0.05)
    tags = tag_elements(first, alg)
    assert len(tags) == len(first)
    assert max(t.distance for t in tags) < 0.05
    assert {t.family for t in tags} >= {"Power", "H1", "H2"}


def test_odometer_tags():
    f = CircleStackFlow(4)
    first = approximate_semigroup(f, f.space.sample_grid(4).points, 200, 1e-4)
    assert len(first) == 16
    tags = tag_elements(first, OdometerAlgebra(4))
    assert sorted(t.element.value for t in tags) == list(range(16))
    assert all(t.distance == 0.0 for t in tags)


def test_full_shift_identity_isolated():
    f = ShiftFlow(SeqSpace(8))
    x = f.space.pack([SeqPoint(0, 0, (1,), 0)])
    first = approximate_semigroup(f, x, 1000, 0.5)
    isolated, dmin, _ = is_isolated_identity(first, 0.5)
    assert isolated and dmin == 1.0


def test_rotation_identity_not_isolated():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(16).points
    first = approximate_semigroup(f, g, 2000, 0.01)
    isolated, dmin, t = is_isolated_identity(first, 0.01)
    brute = min(min((n * GOLDEN) % 1.0, 1 - (n * GOLDEN) % 1.0) for n in range(1, 2001))
    assert not isolated
    assert dmin == pytest.approx(brute, abs=1e-9)
    assert abs(t) == 1597


def test_function_entourage():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(4).points
    U = FunctionEntourage(0, 0.1)
    p = sampled_iterate(f, 0, g)
    q = sampled_iterate(f, 1, g)
    assert U.contains(f.space, p, p)
    assert not U.contains(f.space, p, q)
    with pytest.raises(ValueError):
        FunctionEntourage(0, 0.0)


def test_json_and_rows():
    f = Rotation(GOLDEN)
    first = approximate_semigroup(f, f.space.sample_grid(4).points, 20, 0.1)
    doc = approx_to_json(first)
    assert doc["count"] == len(first)
    assert len(doc["pairwise_distances"]) == len(first)
    rows = distance_rows(first)
    assert [r[0] for r in rows] == list(range(-20, 21))


def test_bad_arguments():
    f = Rotation(GOLDEN)
    g = f.space.sample_grid(4).points
    with pytest.raises(ValueError):
        approximate_semigroup(f, g, 10, 0.0)
    with pytest.raises(ValueError):
        approximate_semigroup(f, g, 0, 0.1)
