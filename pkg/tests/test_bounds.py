from fractions import Fraction

import pytest

from mvclab.bounds import (
    all_bounds,
    profile_audit,
    prop1_bound,
    prop1_witness,
    prop2_bound,
    wc14a_bound,
    wc14b_bound,
    witness_information,
)
from mvclab.errors import UnsupportedParams
from mvclab.model import SystemParams, latest_common_version, make_pattern
from mvclab.schemes import ORIGINAL_SCHEMES, SCHEMES, claimed_worst_cost
from mvclab.verifier import verify_original


def test_prop1():
    assert prop1_bound(3, 3) == Fraction(3, 4)
    assert prop1_bound(4, 5) == 1
    assert prop1_bound(3, 2) == Fraction(1, 2)
    assert all(prop1_bound(c, v) == 1 for c in range(1, 10) for v in range(c + 1, 15))


def test_wc14a():
    for c in range(1, 8):
        assert wc14a_bound(c, 1) == Fraction(1, c)
    assert wc14a_bound(2, 2) == Fraction(3, 4)
    assert wc14a_bound(3, 2) == Fraction(5, 9) == claimed_worst_cost("alg2", 3, 2)


def test_prop2():
    for v in range(1, 10):
        assert prop2_bound(v + 1, v) == Fraction(1, 2)
    for c in range(1, 10):
        assert prop2_bound(c, 1) == Fraction(1, c)
    assert prop2_bound(5, 3) == Fraction(3, 7)


def test_wc14b():
    assert wc14b_bound(3) == Fraction(1, 2)
    assert wc14b_bound(4) == Fraction(5, 12)
    assert wc14b_bound(1) == 1


def test_all_bounds_keys():
    assert list(all_bounds(3, 2)) == ["wc14a_lb", "prop1_lb", "wc14b_lb", "prop2_lb"]


def test_prop2_vs_wc14b():
    for c in range(2, 51):
        assert prop2_bound(c, 1) <= wc14b_bound(c)  # v = 1: not an improvement
        for v in range(3, 12):
            assert prop2_bound(c, v) >= wc14b_bound(c)
        if c % 2:
            assert prop2_bound(c, 2) == wc14b_bound(c)
        else:
            assert prop2_bound(c, 2) < wc14b_bound(c)


def test_alg2_gap_identity():
    for c in range(1, 13):
        for v in range(1, c + 1):
            gap = claimed_worst_cost("alg2", c, v) - prop2_bound(c, v)
            assert gap == Fraction((c - 1) * (v - 1) ** 2, c * c * (c + v - 1))
            assert gap >= 0


def test_witness_examples():
    assert prop1_witness(3, 2) == make_pattern([{2}, {1}, {1, 2}, {1, 2}])
    # server i misses exactly version i, so with v = 1 the first server gets nothing
    assert prop1_witness(2, 1) == make_pattern([set(), {1}, {1}])
    w = prop1_witness(3, 3)
    assert latest_common_version(w, {0, 2, 3}) == 2
    with pytest.raises(UnsupportedParams):
        prop1_witness(3, 4)


@pytest.mark.parametrize("name", ORIGINAL_SCHEMES)
@pytest.mark.parametrize("c", [2, 3, 4])
def test_witness_forces_all_versions(name, c):
    for v in range(1, c + 1):
        if not verify_original(name, SystemParams(c + 1, c, v), sample_every=4096).clean:
            continue
        info = witness_information(name, c, v)
        assert all(q >= 1 for q in info.values())
        assert sum(info.values()) >= v


def test_audit_replication_trace():
    res = profile_audit("replication", SystemParams(2, 2, 2))
    assert res.profiles == [(1, 1)]
    assert res.m == 1
    assert res.steps[1].start == (1, 1)
    assert res.steps[1].nullified == [(2, Fraction(2)), (1, Fraction(1))]
    assert res.steps[1].result == (0, 0)
    assert res.implied_bound == Fraction(2, 3)
    assert res.violation is None


def test_audit_alg2_trace():
    res = profile_audit("alg2", SystemParams(3, 3, 2))
    assert res.profiles == [(1, 1), (1, 1)]
    assert res.steps[1].nullified == []
    assert res.steps[2].nullified == [(2, Fraction(1)), (1, Fraction(1))]
    assert res.m == 2
    assert res.per_version_info == {1: Fraction(4, 9), 2: Fraction(6, 9)}
    assert res.implied_bound == Fraction(1, 2) <= Fraction(5, 9)


@pytest.mark.parametrize("name", sorted(SCHEMES))
@pytest.mark.parametrize("c", [2, 3, 4, 5])
def test_audit_conclusions(name, c):
    for v in range(1, c + 1):
        res = profile_audit(name, SystemParams(c, c, v))
        assert res.violation is None
        assert res.m <= c - 1
        assert res.implied_bound >= prop2_bound(c, v)
        assert res.implied_bound <= claimed_worst_cost(name, c, v)
        for q in res.per_version_info.values():
            assert q >= 1 - res.cap


def test_audit_c1_keeps_first_profile():
    # a lone all-ones profile is never checked on its own, so m = 1 even when c = 1
    res = profile_audit("replication", SystemParams(1, 1, 2))
    assert res.m == 1 and res.violation is None
    assert res.implied_bound == Fraction(2, 3) < prop2_bound(1, 2)


def test_audit_v1_single_coordinate():
    for c in range(2, 6):
        res = profile_audit("mds", SystemParams(c, c, 1))
        assert res.implied_bound == Fraction(1, res.m + 1) >= Fraction(1, c)


class _Hoarder(type(SCHEMES["replication"])):
    """Broken scheme: keeps nothing it receives."""

    name = "hoarder"

    def _apply(self, holdings, version, history, params, base):
        holdings.clear()


def test_audit_reports_violation():
    res = profile_audit(_Hoarder(), SystemParams(3, 3, 2))
    assert res.violation is not None
    assert res.violation["shared_versions"] == [1, 2]
    assert res.m == 3


def test_audit_json():
    js = profile_audit("alg2", SystemParams(3, 3, 2)).to_json()
    assert js["profiles"] == ["11", "11"]
    assert js["implied_bound"] == "1/2"
    assert js["steps"][2]["nullified"][0] == {"version": 2, "joint_info": "1/1"}
