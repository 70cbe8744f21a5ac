"""Benchmark the numba kernels against their pure-numpy twins.

Run:  python3 benchmarks/bench_kernels.py
The numba side includes a warmup call so JIT compilation is not billed.
"""

import time

import numpy as np

from chernofflab import _kernels as K


def timeit(fn, *args, repeat=5):
    fn(*args)  # warmup (JIT compile / cache touch)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    n_nodes = 4097
    values = np.cumsum(rng.normal(size=n_nodes))
    origin, spacing = -8.0, 16.0 / (n_nodes - 1)
    base = np.linspace(-8, 8, n_nodes)
    atoms = rng.normal(size=64)
    w = rng.uniform(0.5, 1.0, size=64)
    w /= w.sum()
    shifts = np.linspace(-2, 2, 65)
    cost = shifts ** 2
    queries = rng.uniform(-9, 9, size=(n_nodes, 64))
    hp = np.linspace(-12, 12, 971)
    hv = hp ** 2 / 2
    u0 = -np.abs(base)
    lam = np.linspace(0, 1, 33)
    z = np.linspace(-8, 8, 20001)
    g = np.cosh(z)
    y = np.linspace(-40, 40, 20001)

    cases = [
        ("interp1 (4097x64 queries)",
         (values, origin, spacing, queries, True)),
        ("one_step_weighted (4097 nodes, 64 atoms)",
         (values, origin, spacing, True, base, 0.1 * atoms, w)),
        ("one_step_entropic (4097 nodes, 64 atoms)",
         (values, origin, spacing, True, base, 0.1 * atoms, np.log(w), 0.01)),
        ("one_step_shiftmax (4097 nodes, 64 atoms, 65 shifts)",
         (values, origin, spacing, True, base, 0.1 * atoms, w, shifts, cost,
          0.01, False)),
        ("lax_friedrichs (4097 nodes, 500 steps)",
         (values, spacing, 1e-4, 500, hp, hv, 12.0)),
        ("g_heat (4097 nodes, 500 steps)",
         (u0, spacing, 1e-6, 500, lam, np.zeros(33), 0.5)),
        ("legendre_scan (20001 x 20001)",
         (z, g, y)),
    ]
    pairs = [
        (K.interp1_py, getattr(K, "interp1_nb", None)),
        (K.one_step_weighted_py, getattr(K, "one_step_weighted_nb", None)),
        (K.one_step_entropic_py, getattr(K, "one_step_entropic_nb", None)),
        (K.one_step_shiftmax_py, getattr(K, "one_step_shiftmax_nb", None)),
        (K.lax_friedrichs_py, getattr(K, "lax_friedrichs_nb", None)),
        (K.g_heat_py, getattr(K, "g_heat_nb", None)),
        (K.legendre_scan_py, getattr(K, "legendre_scan_nb", None)),
    ]

    print(f"numba available: {K._HAVE_NUMBA}, enabled: {K.NUMBA_ENABLED}")
    header = f"{'kernel':50s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for (name, args), (py, nb) in zip(cases, pairs):
        t_py = timeit(py, *args)
        if nb is None:
            print(f"{name:50s} {t_py * 1e3:9.2f}ms {'n/a':>10s}")
            continue
        t_nb = timeit(nb, *args)
        print(f"{name:50s} {t_py * 1e3:9.2f}ms {t_nb * 1e3:9.2f}ms "
              f"{t_py / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
