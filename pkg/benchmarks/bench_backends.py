"""Time the numba kernels against the pure-numpy fallback.

Runs both backends in one process (the env flag only picks the default
used by the library; both modules stay importable), so the comparison is
apples to apples on identical inputs.

    python benchmarks/bench_backends.py
"""

import time

import numpy as np

from drscreen._kernels import numpy_backend

try:
    from drscreen._kernels import numba_backend
except ImportError:
    numba_backend = None


def make_problem(rng, n, d, sep=1.3):
    half = n // 2
    x = np.vstack([
        rng.standard_normal((half, d)) + sep,
        rng.standard_normal((n - half, d)) - sep,
    ])
    y = np.concatenate([np.ones(half), -np.ones(n - half)])
    ones = np.ones((n, 1))
    xck = np.ascontiguousarray(y[:, None] * np.hstack([x, ones]))
    return xck


def best_of(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(backend, n, rng):
    m = rng.standard_normal((n, n))
    a = m @ m.T
    tol = 1e-12 * max(1.0, float(np.linalg.norm(a)))
    return best_of(lambda: backend.jacobi_eigh(a, tol, 100))


def bench_hinge(backend, n, d, rng):
    xck = make_problem(rng, n, d)
    w = np.ones(n)

    def run():
        alpha = np.zeros(n)
        v = np.zeros(d + 1)
        backend.hinge_l2_cd(xck, w, n / 10.0, alpha, v, 0, 100_000, 1e-10 * n)

    return best_of(run, repeats=3)


def bench_sqhinge(backend, n, d, rng):
    xck = make_problem(rng, n, d)
    w = np.ones(n)

    def run():
        beta = np.zeros(d + 1)
        m = np.zeros(n)
        backend.sqhinge_l1_cd(xck, w, 5.0, beta, m, 100_000, 1e-10 * n, 1e-10)

    return best_of(run, repeats=3)


def main():
    rng = np.random.default_rng(0)
    cases = [
        ("jacobi_eigh n=60", lambda b: bench_jacobi(b, 60, rng)),
        ("jacobi_eigh n=150", lambda b: bench_jacobi(b, 150, rng)),
        ("hinge_l2_cd n=200 d=20", lambda b: bench_hinge(b, 200, 20, rng)),
        ("hinge_l2_cd n=500 d=40", lambda b: bench_hinge(b, 500, 40, rng)),
        ("sqhinge_l1_cd n=200 d=20", lambda b: bench_sqhinge(b, 200, 20, rng)),
        ("sqhinge_l1_cd n=500 d=40", lambda b: bench_sqhinge(b, 500, 40, rng)),
    ]
    if numba_backend is None:
        print("numba not available; timing the numpy backend only")
    else:
        # trigger compilation outside the timed region
        for _, fn in cases:
            fn(numba_backend)
    header = f"{'kernel':<28}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, fn in cases:
        t_np = fn(numpy_backend)
        if numba_backend is None:
            print(f"{name:<28}{t_np:>12.4f}{'-':>12}{'-':>10}")
        else:
            t_nb = fn(numba_backend)
            print(f"{name:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
