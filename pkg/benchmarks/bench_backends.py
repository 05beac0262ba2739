"""Compare the numba kernels against the pure-numpy fallback.

Runs the same workloads under NAPES_BACKEND=numba and =numpy and prints a
table of median wall times.  JIT compilation is excluded: every kernel is
exercised once per backend before timing starts.

    python3 benchmarks/bench_backends.py [--repeats 5]
"""

import argparse
import os
import time

import numpy as np

import napes
from napes import (FrequencyGrid, GappedConfig, NoiseModel, SinusoidSpec,
                   SnapshotPlan, SnapshotPlan2D)


def _timed(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def make_workloads():
    rng = np.random.default_rng(7)

    n, m, k = 512, 16, 256
    y1 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x1 = np.exp(2j * np.pi * rng.random(n))
    plan1 = SnapshotPlan.from_data_length(n, m)
    grid1 = FrequencyGrid.uniform(k)

    shape, m2, k2 = (64, 48), 4, 48
    y2 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    x2 = np.exp(2j * np.pi * rng.random(shape))
    plan2 = SnapshotPlan2D.from_data_shape(shape, m2, m2)
    grid2 = FrequencyGrid.uniform(k2)

    ng = 256
    yg, xg = napes.gen_signal(
        [SinusoidSpec(1.0, 2 * np.pi * 20 / 128), SinusoidSpec(0.5, 2 * np.pi * 60 / 128)],
        NoiseModel("unit_modulus_random_phase", seed=7), ng, 30.0, 7)
    seg = napes.drop_segments(yg, [(96, 48)], x=xg)
    cfg = GappedConfig(grid=FrequencyGrid.uniform(128), m0=32, m=32, max_iter=15)

    return [
        (f"1-D sweep N={n} M={m} K={k}",
         lambda: napes.spectrum(y1, x1, plan1, grid1)),
        (f"2-D sweep {shape[0]}x{shape[1]} M=M'={m2} K=K'={k2}",
         lambda: napes.spectrum2d(y2, x2, plan2, grid2, grid2)),
        (f"gapped cyclic N={ng} gap=48 K=128 m=32 (15 cycles)",
         lambda: napes.cyclic_optimize(seg, cfg)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = ["numba", "numpy"] if napes.HAS_NUMBA else ["numpy"]
    if not napes.HAS_NUMBA:
        print("numba not importable; timing the numpy fallback only\n")

    workloads = make_workloads()
    results = {}
    for backend in backends:
        os.environ["NAPES_BACKEND"] = backend
        for _, fn in workloads:  # warm caches / JIT outside the timers
            fn()
        results[backend] = [_timed(fn, args.repeats) for _, fn in workloads]

    name_w = max(len(name) for name, _ in workloads)
    header = f"{'workload':<{name_w}}" + "".join(f"  {b:>10}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for i, (name, _) in enumerate(workloads):
        row = f"{name:<{name_w}}"
        for backend in backends:
            row += f"  {results[backend][i] * 1e3:>8.2f}ms"
        if len(backends) == 2:
            row += f"  {results['numpy'][i] / results['numba'][i]:>7.2f}x"
        print(row)
    print(f"\nmedians of {args.repeats} runs; numba threads="
          f"{os.environ.get('NAPES_THREADS', '(default)')}")


if __name__ == "__main__":
    main()
