"""Exhaustive adversarial verification of storage schemes.

Every reachability pattern on ``n`` servers is enumerated; for each pattern
and each ``c``-subset of servers the decode obligation of the chosen mode is
checked by symbol accounting (distinct coded symbols held >= L).  The scan
itself runs in the ``scan_obligations`` kernel over per-server symbol counts.
A deterministic 1-in-K sample of obligations is re-derived from the actual
index sets and pushed through the real codec; any disagreement with the
kernel is reported as a mismatch.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import codec
from ._kernels import KERNELS
from .errors import BudgetExceeded, InsufficientShares, MvcError
from .model import (
    SystemParams,
    format_pattern,
    fmt_q,
    latest_common_mask,
    make_pattern,
    pattern_count,
    pattern_masks_at,
    versions_of,
)
from .schemes import Scheme, _resolve

MODES = ("original", "extended", "extended_general")
OBLIGATION_BUDGET = 10**9
DEFAULT_SEED = 0xC0DE
DEFAULT_SAMPLE_EVERY = 16
MAX_RECORDED = 50
TABLE_BUDGET = 1 << 20  # n * 2^v per-server state tables
CHUNK = 1 << 16  # patterns per kernel call


def default_seed() -> int:
    env = os.environ.get("MVCLAB_SEED")
    return int(env, 0) if env else DEFAULT_SEED


@dataclass
class VerifyReport:
    params: SystemParams
    scheme: str
    mode: str
    obligations_checked: int = 0
    violation_count: int = 0
    violations: list[dict] = field(default_factory=list)
    codec_checks: int = 0
    codec_mismatches: list[dict] = field(default_factory=list)
    measured_worst_cost: Fraction = Fraction(0)
    worst_cost_witness: tuple[tuple[int, ...], int] | None = None
    claimed_worst_cost: Fraction | None = None

    @property
    def clean(self) -> bool:
        return self.violation_count == 0 and not self.codec_mismatches

    def merge(self, other: "VerifyReport") -> None:
        self.obligations_checked += other.obligations_checked
        self.violation_count += other.violation_count
        self.violations.extend(other.violations[: MAX_RECORDED - len(self.violations)])
        self.codec_checks += other.codec_checks
        self.codec_mismatches.extend(other.codec_mismatches)
        if other.measured_worst_cost > self.measured_worst_cost or self.worst_cost_witness is None:
            self.measured_worst_cost = other.measured_worst_cost
            self.worst_cost_witness = other.worst_cost_witness

    def summary_line(self) -> str:
        """CSV row: scheme,mode,n,c,v,obligations,violations,codec_checks,measured,claimed."""
        p = self.params
        claimed = fmt_q(self.claimed_worst_cost) if self.claimed_worst_cost is not None else ""
        return ",".join(
            str(x)
            for x in (
                self.scheme, self.mode, p.n, p.c, p.v, self.obligations_checked,
                self.violation_count, self.codec_checks, fmt_q(self.measured_worst_cost), claimed,
            )
        )

    def to_json(self) -> dict:
        witness = None
        if self.worst_cost_witness is not None:
            masks, server = self.worst_cost_witness
            witness = {
                "pattern": format_pattern(make_pattern(versions_of(m) for m in masks)),
                "server": server,
            }
        return {
            "scheme": self.scheme,
            "mode": self.mode,
            "params": {"n": self.params.n, "c": self.params.c, "v": self.params.v, "B": self.params.B},
            "obligations_checked": self.obligations_checked,
            "violation_count": self.violation_count,
            "violations": self.violations,
            "codec_checks": self.codec_checks,
            "codec_mismatches": self.codec_mismatches,
            "measured_worst_cost": fmt_q(self.measured_worst_cost),
            "claimed_worst_cost": fmt_q(self.claimed_worst_cost) if self.claimed_worst_cost is not None else None,
            "worst_cost_witness": witness,
            "clean": self.clean,
            "summary": self.summary_line(),
        }


class _Tables:
    """Holdings and peak cost of every (server, received-set) pair."""

    def __init__(self, sch: Scheme, params: SystemParams):
        n, v = params.n, params.v
        if n * (1 << v) > TABLE_BUDGET:
            raise BudgetExceeded(f"n * 2^v = {n * (1 << v)} state tables exceed {TABLE_BUDGET}")
        self.L = sch.L_map(params)
        self.L_arr = np.array([0] + [self.L[j] for j in range(1, v + 1)], dtype=np.int32)
        width = sch.block_size(params)
        nmask = 1 << v
        self.peak: list[Fraction] = []
        self.held: list[list[dict[int, frozenset]]] = [[{} for _ in range(nmask)] for _ in range(n)]
        self.counts = np.zeros((n, nmask, v + 1), dtype=np.int32)
        for mask in range(nmask):
            for s in range(n):
                st, peak = sch.run(params, versions_of(mask), server_id=s)
                if s == 0:
                    self.peak.append(peak)
                for i, idx in st.store.holdings.items():
                    # per-server blocks are what make summed counts equal distinct counts
                    if not all(s * width <= j < (s + 1) * width for j in idx):
                        raise MvcError(f"{sch.name}: server {s} holds indices outside its block")
                    self.held[s][mask][i] = frozenset(idx)
                    self.counts[s, mask, i] = len(idx)

    def joint(self, servers, masks, version: int) -> frozenset:
        out: frozenset = frozenset()
        for s in servers:
            got = self.held[s][masks[s]].get(version)
            if got:
                out = out | got
        return out

    def obligation(self, masks, sub, mode: str, v: int):
        """Reference check of one obligation: (required, {version: joint indices}, target or None)."""
        sub_masks = [masks[s] for s in sub]
        if mode == "extended_general":
            if not all(sub_masks):
                return None
            required, candidates = None, range(v, 0, -1)
        else:
            required = latest_common_mask(sub_masks)
            if not required:
                return None
            candidates = [required] if mode == "original" else range(v, required - 1, -1)
        joint = {}
        for j in candidates:
            joint[j] = self.joint(sub, masks, j)
            if len(joint[j]) >= self.L[j]:
                return required, joint, j
        return required, joint, None


def _sampled(slots: np.ndarray, every: int) -> np.ndarray:
    # multiplicative hash keeps the sample independent of how ordinals are partitioned
    h = (slots.astype(np.uint64) + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
    return (h >> np.uint64(32)) % np.uint64(every) == 0


def _payload(seed: int, ordinal: int, version: int, size: int) -> bytes:
    rng = np.random.default_rng([seed, ordinal, version])
    return rng.integers(0, 256, size=size, dtype=np.uint8).tobytes()


def _codec_agrees(payload: bytes, indices: frozenset, L: int, expect_ok: bool) -> bool:
    params = codec.CodecParams(L)
    shares = codec.encode(payload, params, indices)
    try:
        out = codec.decode(shares, params)
    except InsufficientShares:
        return not expect_ok
    return expect_ok and out[: len(payload)] == payload


def _verify_range(scheme_name: str, params: SystemParams, mode: str, start: int, stop: int,
                  seed: int, sample_every: int) -> VerifyReport:
    sch = _resolve(scheme_name)
    tab = _Tables(sch, params)
    n, c, v = params.n, params.c, params.v
    subsets = np.array(list(combinations(range(n), c)), dtype=np.int32)
    nsub = len(subsets)
    mode_code = MODES.index(mode)
    rep = VerifyReport(params, sch.name, mode)
    best, best_at = Fraction(-1), None
    peak_rank = np.argsort(np.argsort(np.array([float(q) for q in tab.peak])))

    for lo in range(start, stop, CHUNK):
        hi = min(stop, lo + CHUNK)
        targets = KERNELS.scan_obligations(lo, hi, n, v, subsets, tab.counts, tab.L_arr, mode_code)
        rep.obligations_checked += int((targets >= 0).sum())

        bad = np.argwhere(targets == 0)
        rep.violation_count += len(bad)
        for p, si in bad[: MAX_RECORDED - len(rep.violations)]:
            masks = pattern_masks_at(n, v, lo + int(p))
            required, joint, _ = tab.obligation(masks, subsets[si], mode, v)
            rep.violations.append({
                "pattern": format_pattern(make_pattern(versions_of(m) for m in masks)),
                "subset": [int(x) for x in subsets[si]],
                "required_version": required,
                "joint_symbols": {str(j): len(x) for j, x in joint.items()},
                "L": {str(j): tab.L[j] for j in joint},
            })

        slots = np.arange(lo, hi, dtype=np.int64)[:, None] * nsub + np.arange(nsub)[None, :]
        for p, si in np.argwhere(_sampled(slots, sample_every) & (targets >= 0)):
            k = lo + int(p)
            masks = pattern_masks_at(n, v, k)
            required, joint, target = tab.obligation(masks, subsets[si], mode, v)
            rep.codec_checks += 1
            kernel_target = int(targets[p, si]) or None
            j = target if target is not None else next(iter(joint))
            payload = _payload(seed, k, j, params.B)
            if kernel_target != target or not _codec_agrees(payload, joint[j], tab.L[j], target is not None):
                rep.codec_mismatches.append({"ordinal": k, "subset": [int(x) for x in subsets[si]],
                                             "version": j, "kernel_target": kernel_target})

        # worst cost: highest-peak received set present in this chunk, first occurrence
        ks = np.arange(lo, hi, dtype=np.int64)
        width = 1 << v
        chunk_masks = np.empty((len(ks), n), dtype=np.int64)
        for s in range(n - 1, -1, -1):
            chunk_masks[:, s] = ks % width
            ks = ks // width
        ranks = peak_rank[chunk_masks]
        flat = int(np.argmax(ranks))
        p, s = divmod(flat, n)
        m = int(chunk_masks[p, s])
        if tab.peak[m] > best:
            best = tab.peak[m]
            best_at = (tuple(int(x) for x in chunk_masks[p]), s)

    rep.measured_worst_cost = max(best, Fraction(0))
    rep.worst_cost_witness = best_at
    return rep


def _prepare(scheme, params: SystemParams, mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    sch = _resolve(scheme)
    sch.check(params.c, params.v)
    params = params.with_payload_size(sch.L_map(params).values())
    total = pattern_count(params.n, params.v)
    if total * comb(params.n, params.c) > OBLIGATION_BUDGET:
        raise BudgetExceeded(f"{total} patterns x C({params.n},{params.c}) subsets exceeds {OBLIGATION_BUDGET}")
    return sch, params, total


def verify(scheme: Scheme | str, params: SystemParams, mode: str = "original", *, workers: int = 1,
           seed: int | None = None, sample_every: int = DEFAULT_SAMPLE_EVERY) -> VerifyReport:
    """Check ``scheme`` against every pattern and c-subset under ``mode``."""
    sch, params, total = _prepare(scheme, params, mode)
    seed = default_seed() if seed is None else seed
    workers = max(1, min(workers, total))
    if workers == 1:
        rep = _verify_range(sch.name, params, mode, 0, total, seed, sample_every)
    else:
        bounds = [total * w // workers for w in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_verify_range, sch.name, params, mode, bounds[w], bounds[w + 1], seed, sample_every)
                for w in range(workers)
            ]
            parts = [f.result() for f in futures]
        rep = parts[0]
        for part in parts[1:]:
            rep.merge(part)
    rep.claimed_worst_cost = sch.claimed_worst_cost(params.c, params.v)
    return rep


def verify_original(scheme, params: SystemParams, **kw) -> VerifyReport:
    return verify(scheme, params, "original", **kw)


def verify_extended(scheme, params: SystemParams, general: bool = False, **kw) -> VerifyReport:
    return verify(scheme, params, "extended_general" if general else "extended", **kw)


def measured_vs_claimed(scheme, params: SystemParams, report: VerifyReport | None = None):
    """(measured worst cost, claimed worst cost, whether they are equal)."""
    if report is None:
        sch = _resolve(scheme)
        mode = "extended" if sch.name == "ext_latest" else "original"
        report = verify(sch, params, mode)
    claimed = report.claimed_worst_cost
    return report.measured_worst_cost, claimed, report.measured_worst_cost == claimed


@dataclass
class ProbeWitness:
    c: int
    v: int
    cost_cap: Fraction
    group_size: int
    groups: list[list[int]]
    pattern: tuple[frozenset, ...]
    joint_info: dict[int, Fraction]


def impossibility_probe(cost_cap: Fraction, params: SystemParams) -> ProbeWitness | None:
    """Configuration defeating any latest-only scheme storing less than 1/ceil(c/v).

    Builds v groups of ceil(c/v) servers where group i received only version
    i.  Each version is then held by exactly one group, so its joint
    information is ``group_size * cost_cap``; below one, nothing decodes.
    """
    c, v = params.c, params.v
    g = -(-c // v)
    cost_cap = Fraction(cost_cap)
    if cost_cap >= Fraction(1, g):
        return None
    groups = [list(range(i * g, (i + 1) * g)) for i in range(v)]
    pattern = make_pattern([[i + 1] for i in range(v) for _ in range(g)])
    return ProbeWitness(c, v, cost_cap, g, groups, pattern, {i: g * cost_cap for i in range(1, v + 1)})
