"""Numba vs numpy timings for the hot kernels, plus one full reference run per backend.

    python benchmarks/bench_kernels.py [--repeat 20] [--size 20000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from handoffkit import _kernels as K


def best_of(fn, args, repeat):
    fn(*args)  # compile / warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(size, rng):
    raw = rng.uniform(-1.0, 2.0, (size, 6))
    lo, hi = np.zeros(6), np.ones(6)
    norm = rng.uniform(1e-3, 1.0, (size, 6))
    coeffs = rng.uniform(-2.0, 2.0, 6)
    cand = rng.normal(size=(min(size, 400), 5))
    n = min(size, 2000)
    cx, cy = rng.uniform(-500, 500, n), rng.uniform(-500, 500, n)
    radius = rng.uniform(50, 400, n)
    p0, d0, nexp = np.full(n, -40.0), np.full(n, 5.0), np.full(n, 2.5)
    return {
        "normalize_matrix": (raw, lo, hi, K.EPS),
        "weighted_log_sum": (norm, coeffs),
        "pareto_mask": (cand,),
        "rss_vector": (12.0, -3.0, cx, cy, radius, p0, d0, nexp),
    }


FULL_RUN = (
    "import time;from handoffkit import _kernels, parse_scenario, reference_scenario_path, run_scenario;"
    "_kernels.warmup();s,c,g,p,k=parse_scenario(reference_scenario_path());"
    "t=time.perf_counter();run_scenario(s,g,c,p,k);print(_kernels.BACKEND, time.perf_counter()-t)"
)


def full_run(disable):
    env = dict(os.environ)
    if disable:
        env["HANDOFFKIT_DISABLE_NUMBA"] = "1"
    else:
        env.pop("HANDOFFKIT_DISABLE_NUMBA", None)
    out = subprocess.run([sys.executable, "-c", FULL_RUN], env=env, capture_output=True, text=True, check=True)
    backend, secs = out.stdout.split()
    return backend, float(secs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--size", type=int, default=20000)
    ap.add_argument("--skip-full", action="store_true")
    args = ap.parse_args()
    if not K.HAS_NUMBA:
        sys.exit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, a in kernel_cases(args.size, rng).items():
        t_np = best_of(getattr(K, f"{name}_numpy"), a, args.repeat)
        t_nb = best_of(getattr(K, f"{name}_numba"), a, args.repeat)
        print(f"{name:<18}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}x")

    if not args.skip_full:
        for disable in (True, False):
            backend, secs = full_run(disable)
            print(f"reference run ({backend}): {secs:.3f} s")


if __name__ == "__main__":
    main()
