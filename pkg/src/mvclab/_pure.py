"""Numpy fallback for the compiled kernels in ``_core``."""

from __future__ import annotations

import numpy as np

GROUP = 65535


def _mul_arrays(x: np.ndarray, y: np.ndarray, exp: np.ndarray, log: np.ndarray) -> np.ndarray:
    x, y = np.broadcast_arrays(x, y)
    out = exp[log[x] + log[y]]
    out[(x == 0) | (y == 0)] = 0
    return out


def mat_mul(a, b, exp, log):
    r, k = a.shape
    k2, s = b.shape
    if k != k2:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    out = np.zeros((r, s), dtype=np.uint16)
    for t in range(k):
        out ^= _mul_arrays(a[:, t : t + 1], b[t : t + 1, :], exp, log)
    return out


def mat_inv(a, exp, log):
    n, m = a.shape
    if n != m:
        raise ValueError("matrix is not square")
    work = np.concatenate([a.astype(np.uint16), np.eye(n, dtype=np.uint16)], axis=1)
    for col in range(n):
        nz = np.nonzero(work[col:, col])[0]
        if len(nz) == 0:
            raise ValueError("matrix is singular")
        piv = col + int(nz[0])
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        inv_p = exp[GROUP - log[work[col, col]]]
        work[col] = _mul_arrays(work[col], np.uint16(inv_p), exp, log)
        factors = work[:, col].copy()
        factors[col] = 0
        rows = np.nonzero(factors)[0]
        if len(rows):
            work[rows] ^= _mul_arrays(factors[rows, None], work[col][None, :], exp, log)
    return work[:, n:].copy()


def _bit_length_table(v: int) -> np.ndarray:
    return np.array([m.bit_length() for m in range(1 << v)], dtype=np.int8)


def scan_obligations(start, stop, n, v, subsets, counts, L, mode):
    """Decode target of every (pattern, subset) obligation in ``[start, stop)``.

    Returns an int8 array of shape (stop - start, len(subsets)): -1 where the
    subset carries no obligation, 0 where no admissible version has enough
    symbols, else the version found (highest first).
    """
    width = 1 << v
    ks = np.arange(start, stop, dtype=np.int64)
    masks = np.empty((len(ks), n), dtype=np.int64)
    rest = ks.copy()
    for s in range(n - 1, -1, -1):
        masks[:, s] = rest % width
        rest //= width
    bitlen = _bit_length_table(v)
    out = np.empty((len(ks), len(subsets)), dtype=np.int8)
    for si, sub in enumerate(np.asarray(subsets)):
        sm = masks[:, sub]
        common = np.bitwise_and.reduce(sm, axis=1)
        if mode == 2:
            obligated = (sm != 0).all(axis=1)
            lo = np.ones(len(ks), dtype=np.int64)
        else:
            obligated = common != 0
            lo = bitlen[common].astype(np.int64)
        target = np.zeros(len(ks), dtype=np.int8)
        for j in range(v, 0, -1):
            joint = np.zeros(len(ks), dtype=np.int64)
            for s in sub:
                joint += counts[s, masks[:, s], j]
            ok = (joint >= L[j]) & (target == 0) & (j >= lo)
            if mode == 0:
                ok &= lo == j
            target[ok] = j
        out[:, si] = np.where(obligated, target, -1)
    return out
