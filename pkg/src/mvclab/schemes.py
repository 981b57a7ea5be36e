"""Per-server storage schemes as deterministic state machines.

Every scheme codes each version with its own systematic MDS code of
subpacketization ``L`` (see :func:`Scheme.subpacketization`) and stores a
whole number of coded symbols per version.  Server ``s`` draws the symbols it
stores for any version from its private index block
``[s * block, (s + 1) * block)``, so symbols held by different servers are
always distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import OutOfOrderArrival, UnderflowDeletion, UnsupportedParams
from .model import ServerStore, SystemParams, storage_cost


@dataclass(frozen=True)
class SchemeState:
    server_id: int
    store: ServerStore = field(default_factory=ServerStore)
    history: tuple[int, ...] = ()


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class Scheme:
    name = ""
    needs_v_le_c = False

    def check(self, c: int, v: int) -> None:
        if c < 1 or v < 1:
            raise UnsupportedParams(f"{self.name}: need c >= 1 and v >= 1")
        if self.needs_v_le_c and v > c:
            raise UnsupportedParams(f"{self.name} requires v <= c (got v={v}, c={c})")

    def subpacketization(self, params: SystemParams, version: int) -> int:
        raise NotImplementedError

    def block_size(self, params: SystemParams) -> int:
        raise NotImplementedError

    def claimed_worst_cost(self, c: int, v: int) -> Fraction:
        raise NotImplementedError

    def _apply(self, holdings: dict[int, set[int]], version: int, history: tuple[int, ...],
               params: SystemParams, base: int) -> None:
        raise NotImplementedError

    # -- shared machinery -------------------------------------------------

    def L_map(self, params: SystemParams) -> dict[int, int]:
        return {i: self.subpacketization(params, i) for i in range(1, params.v + 1)}

    def on_receive(self, state: SchemeState, version: int, params: SystemParams) -> SchemeState:
        self.check(params.c, params.v)
        if not 1 <= version <= params.v:
            raise ValueError(f"version {version} outside [1, {params.v}]")
        if state.history and version <= state.history[-1]:
            raise OutOfOrderArrival(f"version {version} after {state.history[-1]}")
        store = state.store.copy()
        base = state.server_id * self.block_size(params)
        self._apply(store.holdings, version, state.history, params, base)
        store.holdings = {k: s for k, s in store.holdings.items() if s}
        store.payload_lengths = {k: params.B for k in store.holdings}
        return SchemeState(state.server_id, store, state.history + (version,))

    def run(self, params: SystemParams, versions: Iterable[int], server_id: int = 0):
        """Feed ``versions`` in increasing order; returns (final state, max cost over prefixes)."""
        L = self.L_map(params)
        state = SchemeState(server_id)
        peak = Fraction(0)
        for i in sorted(versions):
            state = self.on_receive(state, i, params)
            peak = max(peak, storage_cost(state.store, params, L))
        return state, peak


def _block(base: int, count: int) -> set[int]:
    return set(range(base, base + count))


def _drop_lowest(held: set[int], count: int, what: str) -> set[int]:
    if count > len(held):
        raise UnderflowDeletion(f"{what}: delete {count} of {len(held)} held symbols")
    return set(sorted(held)[count:])


class Replication(Scheme):
    name = "replication"

    def subpacketization(self, params, version):
        return 1

    def block_size(self, params):
        return 1

    def claimed_worst_cost(self, c, v):
        self.check(c, v)
        return Fraction(1)

    def _apply(self, holdings, version, history, params, base):
        holdings.clear()
        holdings[version] = _block(base, 1)


class PerVersionMDS(Scheme):
    """One symbol of an (n, c) MDS code per received version, nothing deleted."""

    name = "mds"

    def subpacketization(self, params, version):
        return params.c

    def block_size(self, params):
        return 1

    def claimed_worst_cost(self, c, v):
        self.check(c, v)
        return Fraction(v, c)

    def _apply(self, holdings, version, history, params, base):
        holdings[version] = _block(base, 1)


class Alg1(Scheme):
    """(n, c+1) code for versions below v, (n, c) code for version v.

    All versions share L = c(c+1): a fresh non-final version gets 2c symbols
    (2B/(c+1)), which drop to c symbols (B/(c+1)) when its immediate successor
    arrives; version v gets c+1 symbols (B/c).
    """

    name = "alg1"
    needs_v_le_c = True

    def subpacketization(self, params, version):
        self.check(params.c, params.v)
        return params.c * (params.c + 1)

    def block_size(self, params):
        return 2 * params.c

    def claimed_worst_cost(self, c, v):
        self.check(c, v)
        return Fraction(v - 1, c + 1) + Fraction(1, c)

    def _apply(self, holdings, version, history, params, base):
        c = params.c
        prev = version - 1
        if prev in holdings and len(holdings[prev]) == 2 * c:
            holdings[prev] = set(sorted(holdings[prev])[:c])
        holdings[version] = _block(base, c + 1 if version == params.v else 2 * c)


class Alg2(Scheme):
    """L = c^2.  The first version a server receives gets vc-(v-1) symbols;
    each later arrival gets c symbols and takes c away from that first version.
    """

    name = "alg2"
    needs_v_le_c = True

    def subpacketization(self, params, version):
        self.check(params.c, params.v)
        return params.c ** 2

    def block_size(self, params):
        return params.v * params.c - params.v + 1

    def claimed_worst_cost(self, c, v):
        self.check(c, v)
        return Fraction(v * c - v + 1, c * c)

    def _apply(self, holdings, version, history, params, base):
        c, v = params.c, params.v
        if not history:
            holdings[version] = _block(base, v * c - v + 1)
            return
        first = history[0]
        holdings[first] = _drop_lowest(holdings.get(first, set()), c, f"alg2 version {first}")
        holdings[version] = _block(base, c)


class ExtLatest(Scheme):
    """Keeps one symbol of an L = ceil(c/v) code for the latest version only."""

    name = "ext_latest"

    def subpacketization(self, params, version):
        return _ceil_div(params.c, params.v)

    def block_size(self, params):
        return 1

    def claimed_worst_cost(self, c, v):
        self.check(c, v)
        return Fraction(1, _ceil_div(c, v))

    def _apply(self, holdings, version, history, params, base):
        holdings.clear()
        holdings[version] = _block(base, 1)


SCHEMES: dict[str, Scheme] = {s.name: s for s in (Replication(), PerVersionMDS(), Alg1(), Alg2(), ExtLatest())}
ORIGINAL_SCHEMES = ("replication", "mds", "alg1", "alg2")


def get_scheme(name: str) -> Scheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise UnsupportedParams(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}") from None


def subpacketization(scheme: Scheme | str, params: SystemParams, version: int) -> int:
    return _resolve(scheme).subpacketization(params, version)


def on_receive(scheme: Scheme | str, state: SchemeState, version: int, params: SystemParams) -> SchemeState:
    return _resolve(scheme).on_receive(state, version, params)


def claimed_worst_cost(scheme: Scheme | str, c: int, v: int) -> Fraction:
    return _resolve(scheme).claimed_worst_cost(c, v)


def _resolve(scheme: Scheme | str) -> Scheme:
    return get_scheme(scheme) if isinstance(scheme, str) else scheme
