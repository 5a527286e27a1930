"""Time the numba kernels against their numpy twins on circle grids.

    python3 benchmarks/bench_kernels.py [--samples 4096] [--repeat 20]

Both paths are imported side by side (the module keeps the numpy versions
around even when numba is active), checked for agreement, then timed.
Numba compile time is excluded by a warm-up call.
"""
import argparse
import timeit

import numpy as np

from hermpade import _accel


def cases(samples):
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    z = 0.9 * np.exp(1j * theta)
    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    locs = np.array([0.5, -0.75, 2.0 + 1.0j], dtype=np.complex128)
    orders = np.array([1, 2, 3], dtype=np.int64)
    pcoef = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    return {
        "horner": (coeffs, z),
        "principal": (locs, orders, pcoef, z),
        "lacunary": (z, 1e-18),
        "dilog": (z, 1.0, 1e-18),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)

    if not _accel.HAS_NUMBA:
        print("numba unavailable or disabled; only the numpy path can be timed")
    print(f"{'kernel':<10} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for name, call_args in cases(args.samples).items():
        ref = getattr(_accel, f"{name}_grid_numpy")
        t_np = min(timeit.repeat(lambda: ref(*call_args), number=1, repeat=args.repeat)) * 1e3
        fast = getattr(_accel, f"{name}_grid_numba", None)
        if fast is None:
            print(f"{name:<10} {t_np:12.3f} {'-':>12} {'-':>9}")
            continue
        got = fast(*call_args)  # warm-up compiles
        want = ref(*call_args)
        if not np.allclose(got, want, rtol=1e-12, atol=1e-12):
            raise SystemExit(f"{name}: numba and numpy disagree")
        t_nb = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<10} {t_np:12.3f} {t_nb:12.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
