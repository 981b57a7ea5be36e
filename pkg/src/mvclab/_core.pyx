# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: GF(2^16) matrix ops and the obligation scan.

Same contracts as the numpy fallback in ``_pure``.
"""

import numpy as np
cimport numpy as cnp

cdef int GROUP = 65535


cdef inline cnp.uint16_t _mul(cnp.uint16_t x, cnp.uint16_t y,
                              const cnp.uint16_t[:] exp, const cnp.int32_t[:] log) noexcept nogil:
    if x == 0 or y == 0:
        return 0
    return exp[log[x] + log[y]]


def mat_mul(const cnp.uint16_t[:, :] a, const cnp.uint16_t[:, :] b,
            const cnp.uint16_t[:] exp, const cnp.int32_t[:] log):
    cdef Py_ssize_t r = a.shape[0], k = a.shape[1], s = b.shape[1]
    cdef Py_ssize_t i, j, t
    cdef cnp.uint16_t x
    cdef int lx
    if b.shape[0] != k:
        raise ValueError(f"shape mismatch: ({r}, {k}) @ ({b.shape[0]}, {s})")
    out_arr = np.zeros((r, s), dtype=np.uint16)
    cdef cnp.uint16_t[:, :] out = out_arr
    with nogil:
        for i in range(r):
            for t in range(k):
                x = a[i, t]
                if x == 0:
                    continue
                lx = log[x]
                for j in range(s):
                    if b[t, j] != 0:
                        out[i, j] ^= exp[lx + log[b[t, j]]]
    return out_arr


def mat_inv(const cnp.uint16_t[:, :] a, const cnp.uint16_t[:] exp, const cnp.int32_t[:] log):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, col, piv
    cdef cnp.uint16_t f, inv_p, tmp
    if a.shape[1] != n:
        raise ValueError("matrix is not square")
    work_arr = np.zeros((n, 2 * n), dtype=np.uint16)
    cdef cnp.uint16_t[:, :] w = work_arr
    for i in range(n):
        for j in range(n):
            w[i, j] = a[i, j]
        w[i, n + i] = 1
    for col in range(n):
        piv = -1
        for i in range(col, n):
            if w[i, col] != 0:
                piv = i
                break
        if piv < 0:
            raise ValueError("matrix is singular")
        if piv != col:
            for j in range(2 * n):
                tmp = w[col, j]
                w[col, j] = w[piv, j]
                w[piv, j] = tmp
        inv_p = exp[GROUP - log[w[col, col]]]
        for j in range(2 * n):
            w[col, j] = _mul(w[col, j], inv_p, exp, log)
        for i in range(n):
            if i == col:
                continue
            f = w[i, col]
            if f == 0:
                continue
            for j in range(2 * n):
                w[i, j] ^= _mul(f, w[col, j], exp, log)
    return work_arr[:, n:].copy()


def scan_obligations(long long start, long long stop, int n, int v,
                     const cnp.int32_t[:, :] subsets, const cnp.int32_t[:, :, :] counts,
                     const cnp.int32_t[:] L, int mode):
    cdef Py_ssize_t P = stop - start
    cdef Py_ssize_t S = subsets.shape[0], c = subsets.shape[1]
    cdef long long width = 1LL << v, k
    cdef Py_ssize_t p, si, t, s
    cdef int common, m, allnz, lo, hi, j, target, tot, srv
    cdef int masks[64]
    if n > 64:
        raise ValueError("too many servers")
    out_arr = np.empty((P, S), dtype=np.int8)
    cdef cnp.int8_t[:, :] out = out_arr
    with nogil:
        for p in range(P):
            k = start + p
            for s in range(n - 1, -1, -1):
                masks[s] = <int>(k % width)
                k = k // width
            for si in range(S):
                common = <int>(width - 1)
                allnz = 1
                for t in range(c):
                    m = masks[subsets[si, t]]
                    common = common & m
                    if m == 0:
                        allnz = 0
                if mode == 2:
                    if not allnz:
                        out[p, si] = -1
                        continue
                    lo = 1
                    hi = v
                else:
                    if common == 0:
                        out[p, si] = -1
                        continue
                    lo = 0
                    while common:
                        common >>= 1
                        lo += 1
                    hi = lo if mode == 0 else v
                target = 0
                for j in range(hi, lo - 1, -1):
                    tot = 0
                    for t in range(c):
                        srv = subsets[si, t]
                        tot += counts[srv, masks[srv], j]
                    if tot >= L[j]:
                        target = j
                        break
                out[p, si] = target
    return out_arr
