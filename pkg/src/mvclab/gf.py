"""GF(2^16) arithmetic and the matrix kernels used by the codec.

Elements are plain ints in ``[0, 65535]``; addition is XOR and multiplication
is carry-less multiplication reduced modulo ``x^16 + x^12 + x^3 + x + 1``.
That polynomial is primitive, so ``x`` (the element ``2``) generates the
multiplicative group and log/exp tables cover every nonzero element.

The matrix kernels (``mat_mul``, ``mat_inv``) come from the compiled
``_core`` extension when it is importable and from the numpy fallback in
``_pure`` otherwise.  Set ``MVCLAB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import numpy as np

from ._kernels import BACKEND, KERNELS, available

POLY = 0x1100B
ORDER = 1 << 16
GROUP = ORDER - 1


def _carryless_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & ORDER:
            a ^= POLY
    return r


def _build_tables() -> tuple[np.ndarray, np.ndarray]:
    # exp is doubled so exp[log a + log b] never needs a modulo
    exp = np.zeros(2 * GROUP, dtype=np.uint16)
    log = np.zeros(ORDER, dtype=np.int32)
    x = 1
    for i in range(GROUP):
        exp[i] = x
        log[x] = i
        x = _carryless_mul(x, 2)
    exp[GROUP:] = exp[:GROUP]
    return exp, log


EXP, LOG = _build_tables()
_EXP = EXP.tolist()
_LOG = LOG.tolist()


def field_add(a: int, b: int) -> int:
    return a ^ b


def field_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def field_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^16)")
    return _EXP[GROUP - _LOG[a]]


def field_div(a: int, b: int) -> int:
    return field_mul(a, field_inv(b))


def field_pow(a: int, e: int) -> int:
    if e == 0:
        return 1
    if a == 0:
        return 0
    return _EXP[(_LOG[a] * e) % GROUP]


def vandermonde(points, ncols: int) -> np.ndarray:
    """Rows ``[1, p, p^2, ..., p^(ncols-1)]`` for each evaluation point ``p``."""
    pts = np.fromiter(points, dtype=np.int64)
    k = np.arange(ncols, dtype=np.int64)
    out = EXP[(LOG[pts][:, None].astype(np.int64) * k[None, :]) % GROUP]
    out[pts == 0, 1:] = 0
    out[:, 0] = 1
    return out


_backend = KERNELS


def mat_mul(a: np.ndarray, b: np.ndarray, backend=None) -> np.ndarray:
    """Field matrix product of uint16 matrices ``a`` (r x k) and ``b`` (k x s)."""
    mod = backend or _backend
    return mod.mat_mul(
        np.ascontiguousarray(a, dtype=np.uint16),
        np.ascontiguousarray(b, dtype=np.uint16),
        EXP,
        LOG,
    )


def mat_inv(a: np.ndarray, backend=None) -> np.ndarray:
    """Inverse of a square field matrix; raises ``ValueError`` if singular."""
    mod = backend or _backend
    return mod.mat_inv(np.ascontiguousarray(a, dtype=np.uint16), EXP, LOG)


def backends() -> dict:
    return available()
