"""Compare the compiled frontier kernels with the numpy fallback.

Run ``python benchmarks/bench_frontier.py`` after an editable install. Two
measurements: the raw kernels on random integer frontiers, and a full
``distance`` call that spends most of its time expanding words.
"""

from __future__ import annotations

import argparse
import json
import random
import time
from fractions import Fraction

import numpy as np

from lmpbisim import frontier
from lmpbisim.equivalence import distance
from lmpbisim.model import FiniteLmp, SubDist, dirac


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_case(rows, n, k, dtype, seed=0):
    rng = np.random.default_rng(seed)
    F = rng.integers(0, 1000, size=(rows, n)).astype(dtype)
    F[rng.random(F.shape) < 0.5] = 0
    mats = rng.integers(0, 12, size=(k, n, n)).astype(dtype)
    mats[rng.random(mats.shape) < 0.6] = 0
    R = np.ascontiguousarray(mats.sum(axis=2).T)
    flat = np.arange(rows * k)
    return F, mats, R, flat // k, flat % k


def bench_kernels(repeat):
    out = []
    for rows, n, k in ((1_000, 8, 3), (20_000, 8, 3), (100_000, 12, 2)):
        for dtype in (np.int64, np.float64):
            F, mats, R, parents, acts = kernel_case(rows, n, k, dtype)
            row = {"rows": rows, "n": n, "k": k, "dtype": np.dtype(dtype).name}
            for name, flag in (("numpy", False), ("cython", True)):
                if flag and not frontier.HAVE_EXTENSION:
                    continue
                row[f"child_masses_{name}"] = best_of(lambda: frontier.child_masses(F, R, flag), repeat)
                row[f"expand_{name}"] = best_of(lambda: frontier.expand(F, mats, parents, acts, flag), repeat)
            out.append(row)
    return out


def slow_leak_model(n=10, seed=0):
    """Rows keep 11/12 or all of their mass, so few words get pruned."""
    rng = random.Random(seed)

    def row():
        r = [0] * n
        for _ in range(rng.choice([11, 12])):
            r[rng.randrange(n)] += 1
        return tuple(Fraction(x, 12) for x in r)

    start = SubDist((Fraction(1),) + (Fraction(0),) * (n - 1))
    return FiniteLmp(tuple(f"q{i}" for i in range(n)), ("a", "b", "c"),
                     {a: [row() for _ in range(n)] for a in "abc"}, start)


def bench_distance(repeat, horizon):
    m = slow_leak_model()
    mu, nu = dirac(m, "q0"), dirac(m, "q1")
    row = {"n": m.n, "k": len(m.actions), "horizon": horizon}
    for name, flag in (("numpy", False), ("cython", True)):
        if flag and not frontier.HAVE_EXTENSION:
            continue
        row[name] = best_of(lambda: distance(m, mu, nu, Fraction(1), max_horizon=horizon, use_extension=flag), repeat)
    return row


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--horizon", type=int, default=11)
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    args = ap.parse_args(argv)

    kernels = bench_kernels(args.repeat)
    dist = bench_distance(args.repeat, args.horizon)
    if args.json:
        print(json.dumps({"backend": frontier.backend_name(), "kernels": kernels, "distance": dist}, indent=2))
        return
    print(f"extension available: {frontier.HAVE_EXTENSION}")
    print(f"{'rows':>7} {'n':>3} {'k':>2} {'dtype':>8}   {'masses np':>10} {'masses cy':>10}   {'expand np':>10} {'expand cy':>10}")
    for r in kernels:
        cy_m = r.get("child_masses_cython", float("nan"))
        cy_e = r.get("expand_cython", float("nan"))
        print(f"{r['rows']:>7} {r['n']:>3} {r['k']:>2} {r['dtype']:>8}   "
              f"{r['child_masses_numpy'] * 1e3:>8.2f}ms {cy_m * 1e3:>8.2f}ms   "
              f"{r['expand_numpy'] * 1e3:>8.2f}ms {cy_e * 1e3:>8.2f}ms")
    cy = dist.get("cython", float("nan"))
    print(f"\ndistance, {dist['n']} states, {dist['k']} actions, horizon {dist['horizon']}: "
          f"numpy {dist['numpy'] * 1e3:.1f}ms, cython {cy * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
