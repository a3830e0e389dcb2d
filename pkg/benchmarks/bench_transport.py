"""Time the compiled and pure-Python transport kernels on random dense problems.

    python3 benchmarks/bench_transport.py [--sizes 20 50 150] [--repeat 3]
"""
import argparse
import time

import numpy as np

from cfid.ot import _backend


def problem(rng, m):
    a = rng.dirichlet(np.ones(m))
    b = rng.dirichlet(np.ones(m))
    cost = rng.random((m, m))
    return cost, a, b


def best_time(kernel, cost, a, b, repeat):
    tol = 1e-11 * max(1.0, float(np.abs(cost).max()))
    max_iter = max(1000, 20 * cost.size)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        flow, status, _ = kernel(cost, a, b, tol, max_iter)
        times.append(time.perf_counter() - t0)
    return min(times), float(np.sum(flow * cost)), status


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", type=int, nargs="+", default=[20, 50, 150])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    kernels = _backend.kernels()
    rng = np.random.default_rng(args.seed)
    print(f"{'size':>6} " + " ".join(f"{k:>12}" for k in kernels) + "   speedup")
    for m in args.sizes:
        cost, a, b = problem(rng, m)
        res = {k: best_time(fn, cost, a, b, args.repeat) for k, fn in kernels.items()}
        objs = {round(r[1], 12) for r in res.values()}
        assert len(objs) == 1, f"kernels disagree at size {m}: {objs}"
        row = f"{m:>6} " + " ".join(f"{res[k][0]:>11.4f}s" for k in kernels)
        if "cython" in res and "python" in res:
            row += f"   {res['python'][0] / res['cython'][0]:.0f}x"
        print(row)


if __name__ == "__main__":
    main()
