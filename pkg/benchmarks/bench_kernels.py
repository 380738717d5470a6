"""Time the compiled kernels against their pure-Python twins.

Run ``python benchmarks/bench_kernels.py``; pass ``--repeat`` to change the
number of timed runs per case.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from treembed import kernels
from treembed.rgraph import bipartite_gnp, gnp
from treembed.rng import stream


def _prufer_case(n: int):
    code = stream(1, "bench-prufer").integers(0, n, size=n - 2)
    return lambda mod: mod.prufer_decode(code, n)


def _matching_case(a: int, b: int, p: float):
    h = bipartite_gnp(a, b, p, 7)
    return lambda mod: mod.hopcroft_karp(h.indptr, h.indices, len(h.left), len(h.right))


def _domination_case(n: int, p: float, k: int):
    g = gnp(n, p, 11)
    closed = [(1 << v) | sum(1 << int(w) for w in g.neighbors(v)) for v in range(n)]
    return lambda mod: mod.dominating_bnb(closed, n, k, 10**7)


CASES = {
    "prufer_decode n=100000": _prufer_case(100_000),
    "hopcroft_karp 2000x2000 p=0.005": _matching_case(2000, 2000, 0.005),
    "dominating_bnb n=60 p=0.15 k=7 (no)": _domination_case(60, 0.15, 7),
}


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = kernels.backends()
    names = sorted(mods)
    print(f"{'case':36s}" + "".join(f"{n:>12s}" for n in names) + (f"{'speedup':>10s}" if len(names) == 2 else ""))
    for label, run in CASES.items():
        times = {}
        for name in names:
            mod = mods[name]
            times[name] = min(timeit.repeat(lambda: run(mod), number=1, repeat=args.repeat))
        line = f"{label:36s}" + "".join(f"{times[n] * 1000:10.1f}ms" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['cython']:9.1f}x"
        print(line)
    # agreement check so a fast but wrong kernel cannot pass unnoticed
    if len(names) == 2:
        for label, run in CASES.items():
            a, b = (run(mods[n]) for n in names)
            print(f"{label}: backends agree = {_same(a, b)}")

if __name__ == "__main__":
    main()
