import itertools

import numpy as np
import pytest

from conftest import GOLDEN
from ellislab.errors import HorizonExhausted, KindError
from ellislab.flows import Rotation
from ellislab.harness import relation_table
from ellislab.spaces import AnnulusPoint, SeqPoint, StackPoint
from ellislab.symbolic import (
    H1,
    H2,
    IH1,
    IH2,
    AnnulusAlgebra,
    Collapse,
    InducedAnnulusAlgebra,
    InducedPower,
    Odometer,
    OdometerAlgebra,
    Power,
    ShiftAlgebra,
    check_equivariance,
    element_from_json,
    element_to_json,
    group_check,
    is_injective_on,
    iso_G,
    iso_G_inverse,
    limit_of_powers,
    make_algebra,
)

ALG = AnnulusAlgebra(GOLDEN)


def _angle_close(a, b, tol=1e-9):
    d = abs(a - b) % 1.0
    return min(d, 1 - d) < tol


def test_h1_collapses_interior_to_inner_circle():
    p = ALG.eval_point(H1(0.3), AnnulusPoint.at(1.7, 0.5))
    assert p.r == 1.0
    assert _angle_close(p.angle, 0.8)


def test_h1_h2_case_formulas():
    outer = AnnulusPoint.at(2.0, 0.1)
    inner = AnnulusPoint.at(1.0, 0.1)
    mid = AnnulusPoint.at(1.4, 0.1)
    p = ALG.eval_point(H1(0.2), outer)
    assert p.r == 2.0 and _angle_close(p.angle, 0.3)
    p = ALG.eval_point(H2(0.2), mid)
    assert p.r == 2.0 and _angle_close(p.angle, 0.9)
    p = ALG.eval_point(H2(0.2), inner)
    assert p.r == 1.0 and _angle_close(p.angle, 0.9)


def test_composition_relations():
    phi, chi = 0.31, 0.77
    assert ALG.equal(ALG.compose(H1(phi), H2(chi)), H2(chi - phi))
    assert ALG.equal(ALG.compose(H2(phi), H1(phi)), H1(0.0))
    assert ALG.equal(ALG.compose(Power(0), H1(phi)), H1(phi))
    assert ALG.equal(ALG.compose(Power(1), H1(phi)), H1(phi + GOLDEN))
    assert ALG.equal(ALG.compose(Power(1), H2(phi)), H2(phi - GOLDEN))
    assert ALG.equal(ALG.compose(Power(3), Power(-5)), Power(-2))


def test_relation_table_coherent_with_evaluation(rng):
    X = ALG.space.random(rng, 1000)
    for phi, chi in rng.random((5, 2)):
        for a, b in relation_table(phi, chi):
            lhs = ALG.evaluate(ALG.compose(a, b), X)
            rhs = ALG.evaluate(a, ALG.evaluate(b, X))
            assert float(np.max(ALG.space.dist(lhs, rhs))) <= 1e-9


def test_annulus_compose_associative(rng):
    probes = [Power(n) for n in (-2, 0, 3)] + [H1(b) for b in rng.random(3)] + [H2(b) for b in rng.random(3)]
    for a, b, c in itertools.product(probes, repeat=3):
        assert ALG.equal(ALG.compose(ALG.compose(a, b), c), ALG.compose(a, ALG.compose(b, c)))


def test_power_matches_flow(rng):
    X = ALG.space.random(rng, 100)
    for n in (-4, 0, 1, 9):
        assert np.all(ALG.space.dist(ALG.evaluate(Power(n), X), ALG.flow.act(n, X)) < 1e-12)


def test_shift_collapse():
    alg = ShiftAlgebra((1, 0, 1), 8)
    x, y = alg.space.generators()
    assert y != SeqPoint.fill(1)
    for t in (-9, 0, 4):
        assert alg.eval_point(Collapse(), y.shifted(t)) == SeqPoint.fill(1)
        assert alg.eval_point(Collapse(), x.shifted(t)) == SeqPoint.fill(0)


def test_shift_collapse_absorbs_powers(rng):
    alg = ShiftAlgebra((1,), 8)
    grid = alg.space.sample_grid(1).points
    for n in (-5, 0, 7):
        assert alg.compose(Collapse(), Power(n)) == Collapse()
        assert alg.compose(Power(n), Collapse()) == Collapse()
        for a, b in ((Collapse(), Power(n)), (Power(n), Collapse())):
            lhs = alg.evaluate(alg.compose(a, b), grid)
            rhs = alg.evaluate(a, alg.evaluate(b, grid))
            assert np.array_equal(lhs, rhs)


def test_odometer_zero_is_identity():
    alg = OdometerAlgebra(5)
    grid = alg.space.sample_grid(8).points
    assert np.array_equal(alg.evaluate(Odometer(32, 5), grid), grid)


def test_odometer_acts_on_rings():
    alg = OdometerAlgebra(4)
    p = alg.eval_point(Odometer(3, 4), StackPoint(2, 0.0))
    assert _angle_close(p.angle, (-3 % 4) / 4)


def test_odometer_addition_and_digits():
    alg = OdometerAlgebra(6)
    for a, b in itertools.product(range(0, 64, 7), range(0, 64, 5)):
        c = alg.compose(Odometer(a, 6), Odometer(b, 6))
        assert c.digits == Odometer((a + b) % 64, 6).digits
        assert Odometer.from_digits(c.digits) == c
    assert alg.element(Power(67)) == Odometer(3, 6)


def test_limit_forward_contains_seven():
    beta = (7 * GOLDEN) % 1.0
    lim = limit_of_powers(ALG, beta, 1e-6, 10**4)
    assert isinstance(lim.element, H1)
    assert 7 in lim.witnesses
    assert lim.witnesses == sorted(lim.witnesses)


def test_limit_backward():
    lim = limit_of_powers(ALG, 0.25, 1e-3, 10**5, direction="backward")
    assert isinstance(lim.element, H2)
    assert _angle_close(lim.element.beta, 0.25, 1e-3)
    assert lim.witnesses and all(n < 0 for n in lim.witnesses)
    for n in lim.witnesses:
        assert _angle_close((-n * GOLDEN) % 1.0, 0.25, 1e-3)


def test_limit_odometer_zero():
    lim = limit_of_powers(OdometerAlgebra(4), 0, 0.0, 100)
    assert lim.element == Odometer(0, 4)
    assert lim.witnesses == [16, 32, 48, 64, 80, 96]


def test_limit_exhausted_reports_best():
    with pytest.raises(HorizonExhausted) as exc:
        limit_of_powers(ALG, 0.25, 1e-9, 10)
    assert exc.value.best is not None


def test_iso_g_identity_and_inverse():
    assert iso_G(Power(0)) == InducedPower(0)
    for e in (Power(4), H1(0.2), H2(0.9)):
        assert iso_G_inverse(iso_G(e)) == e
    with pytest.raises(KindError):
        iso_G(Collapse())


def test_second_level_tables():
    second = InducedAnnulusAlgebra(ALG)
    eta, phi = 0.17, 0.42
    assert ALG.equal(second.apply(IH1(eta), Power(3)), H1(eta + 3 * GOLDEN))
    assert ALG.equal(second.apply(IH1(eta), H1(phi)), H1(phi + eta))
    assert ALG.equal(second.apply(IH1(eta), H2(phi)), H2(phi - eta))
    assert ALG.equal(second.apply(IH2(eta), Power(3)), H2(eta - 3 * GOLDEN))
    assert ALG.equal(second.apply(InducedPower(2), H1(phi)), H1(phi + 2 * GOLDEN))


def test_equivariance_at_one_step():
    second = InducedAnnulusAlgebra(ALG)
    phi = 0.6
    assert iso_G(ALG.act(1, H1(phi))) == IH1((phi + GOLDEN) % 1.0)
    assert check_equivariance(second, 1, H1(phi), [Power(2), H2(0.1)])


def test_iso_g_injective_on_probes(rng):
    second = InducedAnnulusAlgebra(ALG)
    probes = ALG.probe_set(rng, 100)
    ok, pair = is_injective_on(second, probes, iso_G)
    assert ok and pair is None


def test_group_checks(rng):
    for k in range(1, 9):
        alg = OdometerAlgebra(k)
        assert group_check(alg, alg.elements()).outcome == "holds"
    v = group_check(ALG, ALG.probe_set(rng, 5))
    assert v.outcome == "fails"
    alg = ShiftAlgebra((1,), 8)
    assert group_check(alg, [Power(0), Power(1), Collapse()]).outcome == "fails"


def test_element_json_round_trip():
    for e in (Power(-3), H1(0.25), H2(0.5), Collapse(), Odometer(5, 4), InducedPower(1), IH1(0.1), IH2(0.2)):
        assert element_from_json(element_to_json(e)) == e


def test_make_algebra_unsupported():
    with pytest.raises(KindError):
        make_algebra(Rotation(GOLDEN))
