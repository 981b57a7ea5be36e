import json
from fractions import Fraction

import pytest

from mvclab.bounds import prop1_bound, prop2_bound, wc14a_bound
from mvclab.errors import BudgetExceeded, UnsupportedParams
from mvclab.model import SystemParams, versions_of
from mvclab.schemes import ORIGINAL_SCHEMES, SCHEMES, Alg2, get_scheme
from mvclab.verifier import (
    impossibility_probe,
    measured_vs_claimed,
    verify,
    verify_extended,
    verify_original,
)

GRID = [(n, c, v) for c in (2, 3, 4) for n in (c, c + 1) for v in range(1, min(c, 3) + 1)]


def _mode(name, c, v):
    # replication only meets the exact-latest obligation for v <= 2 (or c = 1)
    if name == "ext_latest" or (name == "replication" and v > 2 and c > 1):
        return "extended"
    return "original"


@pytest.fixture(scope="module")
def grid_reports():
    return {
        (name, n, c, v): verify(name, SystemParams(n, c, v), _mode(name, c, v))
        for name in SCHEMES
        for n, c, v in GRID
    }


def test_alg2_example():
    rep = verify_original("alg2", SystemParams(4, 3, 2))
    assert rep.violation_count == 0
    assert rep.measured_worst_cost == Fraction(5, 9)


@pytest.mark.parametrize("n, c, v", [(2, 2, 2), (3, 2, 1), (4, 3, 2), (3, 1, 4)])
def test_replication_example(n, c, v):
    rep = verify_original("replication", SystemParams(n, c, v))
    assert rep.clean and rep.measured_worst_cost == 1


@pytest.mark.parametrize("n, c, v", [(2, 2, 3), (3, 2, 3), (4, 3, 3), (5, 4, 3)])
def test_replication_misses_older_common_version(n, c, v):
    p = SystemParams(n, c, v)
    rep = verify_original("replication", p, sample_every=1)
    assert rep.violation_count > 0 and not rep.codec_mismatches
    # servers {1,2} and {1,3}: common version 1 was overwritten on both
    assert any(x["required_version"] == 1 for x in rep.violations)
    assert verify_extended("replication", p).clean
    assert verify_extended("replication", p, general=True).clean


def test_alg1_example():
    rep = verify_original("alg1", SystemParams(4, 3, 3))
    assert rep.clean
    assert rep.measured_worst_cost == Fraction(2, 4) + Fraction(1, 3)


def test_ext_latest_tight():
    rep = verify_extended("ext_latest", SystemParams(3, 3, 2), general=True)
    assert rep.clean
    assert rep.measured_worst_cost == Fraction(1, 2) == prop2_bound(3, 2)


def test_ext_latest_not_tight():
    rep = verify_extended("ext_latest", SystemParams(4, 4, 2))
    assert rep.clean
    assert rep.measured_worst_cost == Fraction(1, 2) > prop2_bound(4, 2) == Fraction(2, 5)


@pytest.mark.parametrize("n, c, v", [(3, 2, 2), (4, 3, 3)])
def test_mds_extended(n, c, v):
    assert verify_extended("mds", SystemParams(n, c, v)).clean


def test_ext_latest_fails_original():
    rep = verify_original("ext_latest", SystemParams(3, 3, 2), sample_every=1)
    assert rep.violation_count > 0
    assert not rep.codec_mismatches
    viol = rep.violations[0]
    assert viol["required_version"] is not None
    assert all(viol["joint_symbols"][k] < viol["L"][k] for k in viol["L"])


class _Stingy(Alg2):
    """alg2 with one symbol too few for the first received version."""

    name = "stingy"

    def _apply(self, holdings, version, history, params, base):
        super()._apply(holdings, version, history, params, base)
        if not history:
            holdings[version] = set(sorted(holdings[version])[1:])


def test_broken_scheme_caught(monkeypatch):
    monkeypatch.setitem(SCHEMES, "stingy", _Stingy())
    rep = verify_original("stingy", SystemParams(4, 3, 2), sample_every=1)
    assert rep.violation_count > 0
    assert not rep.codec_mismatches
    assert rep.codec_checks == rep.obligations_checked


@pytest.mark.parametrize("name", sorted(SCHEMES))
@pytest.mark.parametrize("mode", ["original", "extended", "extended_general"])
def test_accounting_codec_equivalence(name, mode):
    rep = verify(name, SystemParams(4, 3, 2), mode, sample_every=1)
    assert rep.codec_checks == rep.obligations_checked
    assert not rep.codec_mismatches


def test_grid_zero_violations(grid_reports):
    for key, rep in grid_reports.items():
        assert rep.clean, key


def test_grid_measured_equals_claimed(grid_reports):
    for key, rep in grid_reports.items():
        assert rep.measured_worst_cost == rep.claimed_worst_cost, key


def test_grid_bounds_below_measured(grid_reports):
    for (name, n, c, v), rep in grid_reports.items():
        if name in ORIGINAL_SCHEMES:
            assert prop1_bound(c, v) <= rep.measured_worst_cost
            assert wc14a_bound(c, v) <= rep.measured_worst_cost
        assert prop2_bound(c, v) <= rep.measured_worst_cost


def test_general_mode_grid():
    for n, c, v in GRID:
        assert verify_extended("ext_latest", SystemParams(n, c, v), general=True).clean


@pytest.mark.parametrize("name", sorted(SCHEMES))
def test_prefix_peaks(name):
    # no transition lowers a server's total, so the peak is the final cost
    sch = get_scheme(name)
    p = SystemParams(5, 4, 4)
    L = sch.L_map(p)
    cap = sch.claimed_worst_cost(4, 4)
    for mask in range(16):
        state, peak = sch.run(p, versions_of(mask))
        final = sum((Fraction(len(x), L[i]) for i, x in state.store.holdings.items()), Fraction(0))
        assert peak == final <= cap


def test_measured_vs_claimed_examples():
    assert measured_vs_claimed("alg2", SystemParams(4, 3, 3)) == (Fraction(7, 9), Fraction(7, 9), True)
    assert measured_vs_claimed("mds", SystemParams(4, 2, 2)) == (1, 1, True)
    assert measured_vs_claimed("alg1", SystemParams(5, 4, 2)) == (Fraction(9, 20), Fraction(9, 20), True)


def test_impossibility_probe():
    w = impossibility_probe(Fraction(2, 5), SystemParams(4, 4, 2))
    assert w.group_size == 2 and w.groups == [[0, 1], [2, 3]]
    assert w.joint_info == {1: Fraction(4, 5), 2: Fraction(4, 5)}
    assert [sorted(s) for s in w.pattern] == [[1], [1], [2], [2]]
    assert impossibility_probe(Fraction(1, 2), SystemParams(4, 4, 2)) is None
    assert impossibility_probe(Fraction(1, 3), SystemParams(5, 5, 2)) is None
    w = impossibility_probe(Fraction(1, 4), SystemParams(5, 5, 2))
    assert w.group_size == 3 and len(w.pattern) == 6
    assert all(q == Fraction(3, 4) for q in w.joint_info.values())


def test_probe_pattern_defeats_undersized_latest_only():
    # a latest-only scheme at L = ceil(c/v) + 1 stores 1/(g+1) < 1/g
    class Undersized(type(SCHEMES["ext_latest"])):
        def subpacketization(self, params, version):
            return super().subpacketization(params, version) + 1

    sch = Undersized()
    p = SystemParams(4, 4, 2)
    w = impossibility_probe(Fraction(1, 3), p)
    L = sch.L_map(p)
    for ver in (1, 2):
        held = sum(len(sch.run(p, s)[0].store.holdings.get(ver, ())) for s in w.pattern)
        assert held < L[ver]


def test_parallel_matches_serial():
    p = SystemParams(4, 3, 3)
    a = verify("alg1", p, workers=1)
    b = verify("alg1", p, workers=3)
    assert (a.obligations_checked, a.violation_count, a.codec_checks, a.measured_worst_cost) == (
        b.obligations_checked, b.violation_count, b.codec_checks, b.measured_worst_cost)


def test_seed_reproducible(monkeypatch):
    p = SystemParams(4, 3, 2)
    monkeypatch.setenv("MVCLAB_SEED", "7")
    assert verify("alg2", p).to_json() == verify("alg2", p, seed=7).to_json()


def test_report_json():
    rep = verify("alg2", SystemParams(4, 3, 2))
    js = json.loads(json.dumps(rep.to_json()))
    assert js["measured_worst_cost"] == "5/9"
    assert js["clean"] is True
    assert js["summary"] == "alg2,original,4,3,2,240,0,%d,5/9,5/9" % rep.codec_checks
    assert js["worst_cost_witness"]["pattern"].count("\n") == 4


def test_guards():
    with pytest.raises(UnsupportedParams):
        verify("alg2", SystemParams(4, 3, 5))
    with pytest.raises(BudgetExceeded):
        verify("replication", SystemParams(12, 6, 3))
    with pytest.raises(ValueError):
        verify("alg2", SystemParams(4, 3, 2), "sideways")


@pytest.mark.parametrize("mode", [0, 1, 2])
def test_scan_kernels_agree(mode):
    from itertools import combinations

    import numpy as np

    from mvclab import _kernels
    from mvclab.verifier import _Tables

    found = _kernels.available()
    p = SystemParams(4, 3, 3)
    tab = _Tables(get_scheme("alg1"), p.with_payload_size([12]))
    subsets = np.array(list(combinations(range(4), 3)), dtype=np.int32)
    outs = [k.scan_obligations(100, 3000, 4, 3, subsets, tab.counts, tab.L_arr, mode) for k in found.values()]
    for o in outs[1:]:
        assert (o == outs[0]).all()
    # the reference per-obligation check agrees with the kernel
    from mvclab.model import pattern_masks_at
    from mvclab.verifier import MODES

    for row in range(0, 2900, 37):
        masks = pattern_masks_at(4, 3, 100 + row)
        for si, sub in enumerate(subsets):
            ref = tab.obligation(masks, sub, MODES[mode], 3)
            expect = -1 if ref is None else (ref[2] or 0)
            assert outs[0][row, si] == expect


def test_pure_backend_verify(monkeypatch):
    from mvclab import _pure, verifier

    monkeypatch.setattr(verifier, "KERNELS", _pure)
    rep = verify("alg2", SystemParams(5, 4, 3), sample_every=64)
    assert rep.clean and rep.measured_worst_cost == Fraction(10, 16)
    rep = verify_original("replication", SystemParams(3, 2, 3))
    assert rep.violation_count > 0
