#!/usr/bin/env python3
"""Compare the compiled orbit kernels against the pure-Python fallback.

Both backends are required to produce bitwise-identical trajectories, so
this doubles as a cross-validation of the extension. Run directly:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ergobreak.kernels import load_backend


def bench(label, fn_name, args_builder, steps):
    rows = {}
    outputs = {}
    shared_args, out_shape = args_builder()
    for name in ("python", "compiled"):
        try:
            backend = load_backend(name)
        except ImportError:
            print(f"{label}: backend {name} unavailable, skipping")
            return
        args = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in shared_args)
        out = np.empty(out_shape)
        fn = getattr(backend, fn_name)
        t0 = time.perf_counter()
        fn(*args, steps, out)
        rows[name] = time.perf_counter() - t0
        outputs[name] = out
    identical = np.array_equal(outputs["python"], outputs["compiled"])
    speedup = rows["python"] / rows["compiled"]
    print(
        f"{label:18s} python {rows['python']*1e3:9.1f} ms   "
        f"compiled {rows['compiled']*1e3:8.1f} ms   "
        f"speedup {speedup:7.1f}x   bitwise-identical: {identical}"
    )
    if not identical:
        raise SystemExit(f"{label}: backends diverged")


def main():
    rng = np.random.default_rng(0)

    def torus_args():
        u0 = rng.random(3).copy()
        return (u0, np.full(3, 1 / 3), 0.43), (20_001, 3)

    def lorenz_args():
        return (0.337, 1.1, 0.3), (200_001,)

    def simplex_args():
        return (np.array([0.21, 0.33]), 0.4, np.full(3, 1 / 3), 0.45), (20_001, 2)

    bench("torus  (20k steps)", "torus_orbit", torus_args, 20_000)
    bench("lorenz (200k steps)", "lorenz_orbit", lorenz_args, 200_000)
    bench("simplex (20k steps)", "simplex_g_orbit", simplex_args, 20_000)


if __name__ == "__main__":
    main()
