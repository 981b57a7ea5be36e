"""Instance parameters, reachability patterns and exact storage accounting.

Server ids are 0-based throughout; version ids are 1-based.  A received set
is stored either as a ``frozenset`` of version ids or, inside hot loops, as a
bitmask with bit ``i-1`` set when version ``i`` was received.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, UnknownServerId

ENUM_BUDGET = 30  # max n*v for exhaustive pattern enumeration


@dataclass(frozen=True)
class SystemParams:
    n: int
    c: int
    v: int
    B: int = 0  # 0 -> choose a size that makes every share a whole number of bytes

    def __post_init__(self):
        if not 1 <= self.c <= self.n:
            raise ValueError(f"need 1 <= c <= n, got c={self.c}, n={self.n}")
        if self.v < 1:
            raise ValueError(f"need v >= 1, got v={self.v}")
        if self.B < 0:
            raise ValueError("B must be positive")

    def with_payload_size(self, Ls: Iterable[int]) -> "SystemParams":
        """Copy with ``B`` set to ``2*lcm(Ls)`` if it was left unset."""
        if self.B:
            return self
        return SystemParams(self.n, self.c, self.v, 2 * reduce(lcm, Ls, 1))


Pattern = tuple[frozenset, ...]


def make_pattern(received: Sequence[Iterable[int]]) -> Pattern:
    return tuple(frozenset(int(x) for x in s) for s in received)


def mask_of(versions: Iterable[int]) -> int:
    m = 0
    for i in versions:
        m |= 1 << (i - 1)
    return m


def versions_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def latest_common_version(pattern: Pattern, subset: Iterable[int]) -> int | None:
    """Largest version received by every server in ``subset``, or None."""
    subset = list(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    common = None
    for s in subset:
        if not 0 <= s < len(pattern):
            raise UnknownServerId(s)
        common = set(pattern[s]) if common is None else common & pattern[s]
    return max(common) if common else None


def latest_common_mask(masks: Iterable[int]) -> int:
    """Bitmask variant: returns 0 for no common version, else the version id."""
    common = -1
    for m in masks:
        common &= m
    return common.bit_length() if common > 0 else 0


def _check_budget(n: int, v: int) -> None:
    if n * v > ENUM_BUDGET:
        raise BudgetExceeded(f"n*v = {n * v} exceeds enumeration budget {ENUM_BUDGET}")


def pattern_count(n: int, v: int) -> int:
    return (1 << v) ** n


def pattern_masks_at(n: int, v: int, k: int) -> tuple[int, ...]:
    """Per-server bitmasks of the ``k``-th pattern (server 0 most significant)."""
    width = 1 << v
    out = [0] * n
    for s in range(n - 1, -1, -1):
        k, out[s] = divmod(k, width)
    return tuple(out)


def iter_pattern_masks(n: int, v: int, start: int = 0, stop: int | None = None) -> Iterator[tuple[int, ...]]:
    """Per-server bitmask tuples for ordinals ``[start, stop)`` in order."""
    _check_budget(n, v)
    total = pattern_count(n, v)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    width = 1 << v
    cur = list(pattern_masks_at(n, v, start))
    for _ in range(start, stop):
        yield tuple(cur)
        s = n - 1
        while s >= 0:
            cur[s] += 1
            if cur[s] < width:
                break
            cur[s] = 0
            s -= 1


def enumerate_patterns(n: int, v: int) -> Iterator[Pattern]:
    """All ``(2^v)^n`` patterns in lexicographic order of per-server bitmasks."""
    for masks in iter_pattern_masks(n, v):
        yield tuple(frozenset(versions_of(m)) for m in masks)


@dataclass
class ServerStore:
    holdings: dict[int, set[int]] = field(default_factory=dict)
    payload_lengths: dict[int, int] = field(default_factory=dict)

    def copy(self) -> "ServerStore":
        return ServerStore({k: set(v) for k, v in self.holdings.items()}, dict(self.payload_lengths))

    def counts(self) -> dict[int, int]:
        return {k: len(v) for k, v in self.holdings.items() if v}


def storage_cost(store: ServerStore, params: SystemParams | None, L: Mapping[int, int]) -> Fraction:
    """Stored amount in units of one message: sum of |holdings[i]| / L[i]."""
    return sum((Fraction(len(idx), L[i]) for i, idx in store.holdings.items()), Fraction(0))


# -- rationals and the pattern text format ---------------------------------

def fmt_q(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_q_dec(q: Fraction) -> str:
    return f"{fmt_q(q)} ({float(q):.6f})"


def parse_q(text: str) -> Fraction:
    return Fraction(text)


def format_pattern(pattern: Pattern) -> str:
    """One line per server, comma-separated ascending ids; empty line for no versions."""
    return "".join(",".join(str(i) for i in sorted(s)) + "\n" for s in pattern)


def parse_pattern(text: str) -> Pattern:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out = []
    for ln in lines:
        ln = ln.strip()
        out.append(frozenset(int(x) for x in ln.split(",")) if ln else frozenset())
    return tuple(out)
