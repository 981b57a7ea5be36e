"""Systematic MDS erasure codec over GF(2^16).

A payload is zero-padded to a multiple of ``2*L`` bytes and read as
big-endian 16-bit symbols, grouped into stripes of ``L`` symbols.  For each
stripe there is a unique polynomial of degree < L taking the stripe's
symbols at points ``0..L-1``; the share at index ``j`` holds its value at the
field point ``j``.  Indices ``0..L-1`` therefore reproduce the raw symbols,
and any ``L`` distinct shares determine the polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import gf
from .errors import IndexCollision, IndexOutOfRange, InsufficientShares


@dataclass(frozen=True)
class CodecParams:
    L: int
    index_space: int = gf.ORDER

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be positive")
        if not (self.L <= self.index_space <= gf.ORDER):
            raise ValueError(f"need L <= index_space <= {gf.ORDER}, got L={self.L}, index_space={self.index_space}")


@dataclass(frozen=True)
class SymbolShare:
    index: int
    value: tuple[int, ...]


def pad(payload: bytes, L: int) -> bytes:
    block = 2 * L
    rem = len(payload) % block
    if rem:
        payload = payload + bytes(block - rem)
    return payload


def _stripes(payload: bytes, L: int) -> np.ndarray:
    """(L, stripes) matrix: column s is stripe s."""
    sym = np.frombuffer(pad(payload, L), dtype=">u2").astype(np.uint16)
    return sym.reshape(-1, L).T


@lru_cache(maxsize=256)
def _systematic_inverse(L: int) -> np.ndarray:
    return gf.mat_inv(gf.vandermonde(range(L), L))


@lru_cache(maxsize=4096)
def _encode_matrix(L: int, indices: tuple[int, ...]) -> np.ndarray:
    # values at the requested points = V(indices) @ V(0..L-1)^-1 @ data
    return gf.mat_mul(gf.vandermonde(indices, L), _systematic_inverse(L))


@lru_cache(maxsize=4096)
def _decode_matrix(L: int, indices: tuple[int, ...]) -> np.ndarray:
    # data = V(0..L-1) @ V(indices)^-1 @ received
    inv = gf.mat_inv(gf.vandermonde(indices, L))
    return gf.mat_mul(gf.vandermonde(range(L), L), inv)


def _check_indices(indices: Iterable[int], params: CodecParams) -> tuple[int, ...]:
    idx = tuple(indices)
    if len(set(idx)) != len(idx):
        raise IndexCollision(f"duplicate share index in {sorted(idx)}")
    for j in idx:
        if not 0 <= j < params.index_space:
            raise IndexOutOfRange(f"index {j} outside [0, {params.index_space})")
    return idx


def encode(payload: bytes, params: CodecParams, indices: Iterable[int]) -> list[SymbolShare]:
    """Shares of ``payload`` at each requested index, in ascending index order."""
    idx = tuple(sorted(_check_indices(indices, params)))
    if not idx:
        return []
    data = _stripes(bytes(payload), params.L)
    values = gf.mat_mul(_encode_matrix(params.L, idx), data)
    return [SymbolShare(j, tuple(int(x) for x in row)) for j, row in zip(idx, values)]


def decode(shares: Iterable[SymbolShare], params: CodecParams) -> bytes:
    """Reconstruct the padded payload from any ``L`` distinct shares.

    Raises InsufficientShares when fewer than ``L`` distinct indices are given.
    Extra shares beyond ``L`` are ignored (the lowest ``L`` indices are used).
    """
    by_index: dict[int, SymbolShare] = {}
    for s in shares:
        by_index.setdefault(s.index, s)
    L = params.L
    if len(by_index) < L:
        raise InsufficientShares(f"{len(by_index)} distinct shares, need {L}")
    _check_indices(by_index, params)
    idx = tuple(sorted(by_index)[:L])
    widths = {len(by_index[j].value) for j in idx}
    if len(widths) != 1:
        raise ValueError("shares have unequal stripe counts")
    if widths == {0}:
        return b""
    received = np.array([by_index[j].value for j in idx], dtype=np.uint16)
    data = gf.mat_mul(_decode_matrix(L, idx), received)
    return data.T.reshape(-1).astype(">u2").tobytes()
