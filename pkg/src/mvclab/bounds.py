"""Closed-form storage-cost lower bounds and executable forms of their proofs."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import UnsupportedParams
from .model import Pattern, SystemParams, fmt_q, make_pattern
from .schemes import Scheme, _resolve


def prop1_bound(c: int, v: int) -> Fraction:
    """min(1, v/(c+1)) for the original problem."""
    return min(Fraction(1), Fraction(v, c + 1))


def wc14a_bound(c: int, v: int) -> Fraction:
    """1 - (1 - 1/c)^v, the earlier original-problem bound."""
    return 1 - Fraction(c - 1, c) ** v


def prop2_bound(c: int, v: int) -> Fraction:
    """v/(c+v-1) for the extended problem."""
    return Fraction(v, c + v - 1)


def wc14b_bound(c: int) -> Fraction:
    """Earlier extended-problem bound; independent of v."""
    if c % 2:
        return Fraction(2, c + 1)
    return Fraction(2 * (c + 1), c * (c + 2))


def all_bounds(c: int, v: int) -> dict[str, Fraction]:
    return {
        "wc14a_lb": wc14a_bound(c, v),
        "prop1_lb": prop1_bound(c, v),
        "wc14b_lb": wc14b_bound(c),
        "prop2_lb": prop2_bound(c, v),
    }


def prop1_witness(c: int, v: int) -> Pattern:
    """Pattern on c+1 servers forcing all v versions to be stored collectively.

    Server ``i-1`` (for i in 1..v) misses only version i; the remaining
    servers get everything.  Dropping server ``i-1`` leaves c servers whose
    latest common version is i.
    """
    if v > c:
        raise UnsupportedParams(f"witness needs v <= c (got v={v}, c={c})")
    everything = set(range(1, v + 1))
    return make_pattern([everything - {i} for i in range(1, v + 1)] + [everything] * (c + 1 - v))


def witness_information(scheme: Scheme | str, c: int, v: int) -> dict[int, Fraction]:
    """Per-version information (units of B) held by the c+1 witness servers."""
    sch = _resolve(scheme)
    params = SystemParams(c + 1, c, v)
    L = sch.L_map(params)
    total = {i: Fraction(0) for i in range(1, v + 1)}
    for s, received in enumerate(prop1_witness(c, v)):
        state, _ = sch.run(params, received, server_id=s)
        for i, idx in state.store.holdings.items():
            total[i] += Fraction(len(idx), L[i])
    return total


# -- profile-nullification audit -------------------------------------------

Profile = tuple[int, ...]


def profile_str(p: Profile) -> str:
    return "".join(str(b) for b in p)


@dataclass
class AuditStep:
    """Nullifications performed while building one profile."""

    start: Profile
    nullified: list[tuple[int, Fraction]] = field(default_factory=list)  # (version, joint info at nullification)
    result: Profile = ()


@dataclass
class AuditResult:
    scheme: str
    c: int
    v: int
    cap: Fraction
    profiles: list[Profile]
    m: int
    per_version_info: dict[int, Fraction]
    implied_bound: Fraction
    steps: list[AuditStep]
    violation: dict | None = None

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "c": self.c,
            "v": self.v,
            "cap": fmt_q(self.cap),
            "profiles": [profile_str(p) for p in self.profiles],
            "m": self.m,
            "per_version_info": {str(k): fmt_q(q) for k, q in self.per_version_info.items()},
            "implied_bound": fmt_q(self.implied_bound),
            "steps": [
                {
                    "start": profile_str(st.start),
                    "nullified": [{"version": j, "joint_info": fmt_q(q)} for j, q in st.nullified],
                    "result": profile_str(st.result),
                }
                for st in self.steps
            ],
            "violation": self.violation,
        }


def profile_audit(scheme: Scheme | str, params: SystemParams) -> AuditResult:
    """Run the iterative profile construction against a scheme's accounting.

    p_1 is all-ones.  Each later profile starts as a copy of the previous one;
    while some coordinate j (scanned from 1, restarting after every hit) has
    joint information >= 1 over the profiles built so far plus the candidate,
    that coordinate is zeroed and the candidate's holdings recomputed.  The
    construction stops when a candidate ends up all-zero, giving m.

    If c profiles get built, they share a received version yet hold less than
    one message of every version; that is returned as ``violation`` instead.
    """
    sch = _resolve(scheme)
    c, v = params.c, params.v
    sch.check(c, v)
    L = sch.L_map(params)
    cap = sch.claimed_worst_cost(c, v)
    memo: dict[Profile, dict[int, Fraction]] = {}

    def info(p: Profile) -> dict[int, Fraction]:
        if p not in memo:
            state, _ = sch.run(params, [i + 1 for i, b in enumerate(p) if b])
            memo[p] = {i: Fraction(len(idx), L[i]) for i, idx in state.store.holdings.items()}
        return memo[p]

    def joint(profiles: list[Profile], j: int) -> Fraction:
        return sum((info(p).get(j, Fraction(0)) for p in profiles), Fraction(0))

    profiles: list[Profile] = [(1,) * v]
    steps = [AuditStep(start=(1,) * v, result=(1,) * v)]
    violation = None
    while True:
        cand = list(profiles[-1])
        step = AuditStep(start=tuple(cand))
        j = 1
        while j <= v:
            if cand[j - 1]:
                q = joint(profiles + [tuple(cand)], j)
                if q >= 1:
                    cand[j - 1] = 0
                    step.nullified.append((j, q))
                    j = 1
                    continue
            j += 1
        step.result = tuple(cand)
        steps.append(step)
        if not any(cand):
            break
        profiles.append(tuple(cand))
        if len(profiles) >= c:
            group = profiles[:c]
            shared = [j for j in range(1, v + 1) if all(p[j - 1] for p in group)]
            violation = {
                "profiles": [profile_str(p) for p in group],
                "shared_versions": shared,
                "joint_info": {str(j): fmt_q(joint(group, j)) for j in range(1, v + 1)},
            }
            break

    m = len(profiles)
    return AuditResult(
        scheme=sch.name,
        c=c,
        v=v,
        cap=cap,
        profiles=profiles,
        m=m,
        per_version_info={j: joint(profiles, j) for j in range(1, v + 1)},
        implied_bound=Fraction(v, m + v),
        steps=steps,
        violation=violation,
    )
