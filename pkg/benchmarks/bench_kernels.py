"""Compiled kernels against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--repeat N]

Both implementations are imported directly, so QPFOCK_PURE is not needed.
Results agree to rounding; the script checks that before timing.
"""
import argparse
import time

import numpy as np

from qpfock import _fallback

try:
    from qpfock import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def hermitian(n, rng):
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray(x @ x.conj().T)


def bench_jacobi(impl, a0, want_vectors):
    def run():
        a = a0.copy()
        v = np.eye(len(a0), dtype=complex)
        impl.jacobi_hermitian(a, v, 1e-15, 60, want_vectors)
        return np.sort(np.diag(a).real)
    return run


def bench_factor(impl, z, zk):
    return lambda: impl.log_factor_pair(z, zk)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    rng = np.random.default_rng(0)

    cases = []
    for n in (25, 49, 85):
        a0 = hermitian(n, rng)
        cases.append((f"jacobi n={n} values", bench_jacobi, (a0, False)))
        cases.append((f"jacobi n={n} vectors", bench_jacobi, (a0, True)))
    for m, k in ((200, 31), (2000, 61), (20000, 121)):
        z = np.ascontiguousarray(rng.random(m) + 1j * rng.uniform(-3, 3, m))
        zk = np.ascontiguousarray(rng.random(k) + 1j * rng.uniform(-3, 3, k))
        cases.append((f"log_factor_pair {m}x{k}", bench_factor, (z, zk)))

    print(f"{'case':28s} {'compiled [ms]':>14s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name, make, extra in cases:
        fc, fp = make(_kernels, *extra), make(_fallback, *extra)
        rc, rp = fc(), fp()
        if isinstance(rc, tuple):
            err = max(float(np.max(np.abs(x - y))) for x, y in zip(rc, rp))
        else:
            err = float(np.max(np.abs(rc - rp)) / np.max(np.abs(rc)))
        assert err < 1e-9, (name, err)
        tc, tp = best_of(fc, args.repeat), best_of(fp, args.repeat)
        print(f"{name:28s} {1e3 * tc:14.3f} {1e3 * tp:12.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
