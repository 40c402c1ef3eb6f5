"""Time the compiled and pure-Python kernels on the workloads that dominate a run.

    python3 benchmarks/bench_kernels.py [--n 2] [--repeat 3]

Both backends run the identical step sequence, so the table also reports
the largest difference in the endpoint state.
"""

import argparse
import math
import time

import numpy as np

from csminimal import kernels
from csminimal.profile import EmbeddingParams, build_curve


def workloads(curve):
    n, T, y0 = curve.n, curve.period, list(curve.initial_state)
    tail = [1.0, 0.0, 0.0, 1.0, math.pi / 2, 0.0, 0.0, 0.0, 0.0]
    return {
        "profile shot": dict(system=kernels.PROFILE, y0=[curve.r0, math.pi / 4, -math.pi / 2],
                             t0=0.0, t1=20.0, n=n, event=True),
        "profile period": dict(system=kernels.PROFILE, y0=y0, t0=0.0, t1=T, n=n,
                               t_eval=np.linspace(0, T, 1025)),
        "hill L11 monodromy": dict(system=kernels.HILL_L, y0=y0 + tail, t0=0.0, t1=T, n=n,
                                   lam=2 * n - 1, ai=0.0, aj=0.0),
        "hill S22 monodromy": dict(system=kernels.HILL_S, y0=y0 + tail, t0=0.0, t1=T, n=n,
                                   lam=0.0, ai=n - 1.0, aj=n - 1.0),
        "yau ode": dict(system=kernels.YAU, y0=y0 + [1.0, 0.0], t0=0.0, t1=T, n=n),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    curve = build_curve(EmbeddingParams(args.n))
    names = kernels.backends()
    print(f"n={args.n}  backends: {', '.join(names)}")
    header = f"{'workload':<22}" + "".join(f"{b + ' [ms]':>16}" for b in names)
    if len(names) == 2:
        header += f"{'speedup':>10}{'max |dy|':>12}"
    print(header)
    for label, kw in workloads(curve).items():
        res = {}
        for b in names:
            dt, out = best_of(lambda: kernels.integrate(backend=b, **kw), args.repeat)
            res[b] = (dt, out)
        line = f"{label:<22}" + "".join(f"{res[b][0] * 1e3:>16.3f}" for b in names)
        if len(names) == 2:
            dy = float(np.max(np.abs(res["cython"][1][2] - res["python"][1][2])))
            line += f"{res['python'][0] / res['cython'][0]:>9.1f}x{dy:>12.2e}"
        print(line)


if __name__ == "__main__":
    main()
