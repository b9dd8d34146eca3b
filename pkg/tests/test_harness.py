import pytest

from ellislab.config import TheoremsConfig
from ellislab.errors import UnknownCheck
from ellislab.harness import CHECKS, REGISTRY, Leg, TheoremCheck, judge, run_all, run_theorem
from ellislab.verdict import Verdict


def _leg(role, expected, outcome):
    return Leg(role, "claim", expected, Verdict("p", outcome, [], {}, ["note"]))


def test_judge_rules():
    assert judge([_leg("hypothesis", "holds", "holds"), _leg("conclusion", "fails", "fails")]) == "pass"
    assert judge([_leg("hypothesis", "holds", "holds"), _leg("conclusion", "holds", "fails")]) == "fail"
    assert judge([_leg("hypothesis", "holds", "fails"), _leg("conclusion", "holds", "holds")]) == "inconclusive"
    assert judge([_leg("conclusion", "holds", "inconclusive")]) == "inconclusive"
    assert judge([_leg("context", "holds", "fails"), _leg("conclusion", "holds", "holds")]) == "inconclusive"


def test_registry_ids_unique():
    assert len(REGISTRY) == len(CHECKS) == 22


@pytest.mark.parametrize("check_id", ["T-dis", "T-iso", "E-circ", "T-proxE"])
def test_named_checks_pass(check_id):
    rep = run_theorem(check_id, TheoremsConfig(), seed=0)
    assert rep.outcome == "pass", rep.notes
    assert all(leg.matches for leg in rep.legs)


def test_unknown_check():
    with pytest.raises(UnknownCheck):
        run_theorem("T-none", TheoremsConfig())
    with pytest.raises(UnknownCheck):
        run_all(TheoremsConfig(select=["T-none"]))


def test_tiny_horizon_is_inconclusive_not_failing():
    result = run_all(TheoremsConfig(horizon=10))
    assert result["summary"]["fail"] == 0
    inconclusive = [c for c in result["checks"] if c["outcome"] == "inconclusive"]
    assert len(inconclusive) >= 5
    assert all(any("resource exhausted" in n for n in c["notes"]) for c in inconclusive)


def test_empty_registry_gives_empty_report():
    assert run_all(TheoremsConfig(), registry={}) == {"summary": {"pass": 0, "fail": 0, "inconclusive": 0}, "checks": []}


def test_custom_registry():
    check = TheoremCheck("X", "demo", "implies", "none", 1, lambda ctx: [_leg("conclusion", "holds", "holds")])
    result = run_all(TheoremsConfig(), registry={"X": check})
    assert result["summary"]["pass"] == 1


def test_selection_and_seed_reproducibility():
    cfg = TheoremsConfig(select=["T-iso"])
    a = run_all(cfg, seed=3)
    b = run_all(cfg, seed=3)
    assert a == b
    assert [c["id"] for c in a["checks"]] == ["T-iso"]
