"""Compare the compiled and pure-Python integration kernels.

Runs every system with both methods on the same random initial states and
reports the median wall time per run and the speedup. Also checks that the
two backends agree to the last few ulps.

    python benchmarks/bench_kernels.py --repeats 5 --t-end 5
"""

import argparse
import statistics
import time

import numpy as np

from h3mag.dynamics import SystemKind
from h3mag.geometry import ModelParams
from h3mag.integrate import IntegratorConfig, _compiled, integrate

SYSTEMS = ("geodesic", "k1", "k2", "k3", "k4")


def _time(fn, repeats):
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--t-end", type=float, default=5.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . "
                         "--no-build-isolation` first")
    rng = np.random.default_rng(args.seed)
    p = ModelParams(1.0)
    configs = {
        "embedded-45": IntegratorConfig(t_end=args.t_end, rel_tol=1e-10, abs_tol=1e-12),
        "fixed-rk4": IntegratorConfig(method="fixed-rk4", step=1e-3, t_end=args.t_end),
    }
    print(f"{'system':9s} {'method':12s} {'python ms':>10s} {'cython ms':>10s} "
          f"{'speedup':>8s} {'max diff':>9s}")
    for name in SYSTEMS:
        sys_kind = SystemKind.parse(name)
        s0 = tuple(rng.uniform(-1, 1, 6))
        for method, cfg in configs.items():
            tp, a = _time(lambda: integrate(p, sys_kind, s0, cfg, backend="python"), args.repeats)
            tc, b = _time(lambda: integrate(p, sys_kind, s0, cfg, backend="cython"), args.repeats)
            diff = float(np.max(np.abs(a.states - b.states)))
            print(f"{name:9s} {method:12s} {tp * 1e3:10.2f} {tc * 1e3:10.2f} "
                  f"{tp / tc:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
