"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time
from itertools import combinations

import numpy as np

from mvclab import gf
from mvclab._kernels import available
from mvclab.model import SystemParams
from mvclab.schemes import get_scheme
from mvclab.verifier import _Tables


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    for L in (9, 20, 60):
        v = gf.vandermonde(rng.choice(1 << 16, L, replace=False), L)
        data = rng.integers(0, 1 << 16, (L, 512), dtype=np.uint16)
        yield f"mat_inv L={L}", lambda k, v=v: gf.mat_inv(v, backend=k)
        yield f"mat_mul {L}x{L} @ {L}x512", lambda k, v=v, d=data: gf.mat_mul(v, d, backend=k)

    for name, n, c, vv in (("alg2", 5, 4, 3), ("alg1", 5, 4, 4)):
        sch = get_scheme(name)
        p = SystemParams(n, c, vv)
        tab = _Tables(sch, p.with_payload_size(sch.L_map(p).values()))
        subsets = np.array(list(combinations(range(n), c)), dtype=np.int32)
        total = (1 << vv) ** n
        yield (f"scan {name} n={n} c={c} v={vv} ({total * len(subsets)} obligations)",
               lambda k, t=tab, s=subsets, total=total, n=n, vv=vv:
               k.scan_obligations(0, total, n, vv, s, t.counts, t.L_arr, 0))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = available()
    names = sorted(backends)
    print(f"{'kernel':55s}" + "".join(f"{b:>12s}" for b in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        t = {b: _best(lambda: fn(backends[b]), args.repeat) for b in names}
        row = f"{label:55s}" + "".join(f"{t[b] * 1e3:10.2f}ms" for b in names)
        if len(names) > 1:
            row += f"{t['python'] / t['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
