#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-Python fallback.

Times the raw state-evaluation kernels and a full analyze+correct pass
over a synthetic batch, running each available backend in this process.

Usage: python benchmarks/bench_backends.py [--points N] [--repeats R]
"""
import argparse
import importlib
import statistics
import time

import numpy as np


def _load_backends():
    backends = {}
    from polycorr._kernels import _pure
    backends["python"] = _pure
    try:
        from polycorr._kernels import _core
        backends["compiled"] = _core
    except ImportError:
        pass
    return backends


def bench_kernel(impl, packed, n_calls=20000, repeats=5):
    """Median seconds per eval_state_real call."""
    args = (76.5e5, 299.5, packed.x, packed.mw, packed.tc, packed.pc,
            packed.omega, packed.kij, packed.cpc)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(n_calls):
            impl.eval_state_real(*args)
        times.append((time.perf_counter() - t0) / n_calls)
    return statistics.median(times)


def bench_pipeline(backend_name, n_points, seed):
    """Seconds to analyze + correct a synthetic batch under one backend."""
    import os
    os.environ["POLYCORR_BACKEND"] = backend_name
    # reload the backend selection and everything that bound its symbols
    import polycorr._kernels
    importlib.reload(polycorr._kernels)
    import polycorr.thermo
    importlib.reload(polycorr.thermo)
    import polycorr.performance
    importlib.reload(polycorr.performance)
    import polycorr.correction
    importlib.reload(polycorr.correction)
    from polycorr.correction import ReferenceConditions, correct_point
    from polycorr.performance import OperatingPoint, analyze_point
    from polycorr.thermo import GasComposition

    comp = GasComposition.from_dict({
        "methane": 0.85, "ethane": 0.07, "propane": 0.03, "n-butane": 0.012,
        "n-pentane": 0.005, "n-hexane": 0.003, "nitrogen": 0.02,
        "carbon_dioxide": 0.01})
    ref = ReferenceConditions(76.5e5, 299.5, comp)
    rng = np.random.default_rng(seed)
    points = []
    for i in range(n_points):
        p1 = 76.5e5 * (1.0 + float(rng.uniform(-0.05, 0.05)))
        t1 = 299.5 + float(rng.uniform(-5.0, 5.0))
        ratio = float(rng.uniform(1.4, 2.4))
        t2 = t1 * ratio ** 0.30
        points.append(OperatingPoint(f"t{i}", p1, t1, p1 * ratio, t2,
                                     float(rng.uniform(45.0, 75.0)),
                                     float(rng.uniform(7200.0, 8800.0)), comp))
    t0 = time.perf_counter()
    for pt in points:
        correct_point(analyze_point(pt), ref)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=300,
                        help="batch size for the pipeline benchmark")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = _load_backends()
    from polycorr.components import default_database
    packed = default_database().pack(
        ("methane", "ethane", "propane", "n-butane", "n-pentane", "n-hexane",
         "nitrogen", "carbon_dioxide"),
        (0.85, 0.07, 0.03, 0.012, 0.005, 0.003, 0.02, 0.01))

    print(f"{'backend':<10} {'kernel call':>14} {'pipeline/'+str(args.points)+'pt':>16}")
    results = {}
    for name in ("python", "compiled"):
        impl = backends.get(name)
        if impl is None:
            print(f"{name:<10} {'not built':>14}")
            continue
        per_call = bench_kernel(impl, packed, repeats=args.repeats)
        pipeline = bench_pipeline(name, args.points, seed=1)
        results[name] = (per_call, pipeline)
        print(f"{name:<10} {per_call * 1e6:>11.2f} us {pipeline:>13.2f} s")
    if len(results) == 2:
        k = results["python"][0] / results["compiled"][0]
        p = results["python"][1] / results["compiled"][1]
        print(f"\nspeedup: {k:.1f}x on the raw kernel, {p:.1f}x end to end")


if __name__ == "__main__":
    main()
