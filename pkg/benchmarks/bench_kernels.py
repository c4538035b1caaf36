"""Compare the compiled and numpy kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--number 20]

Prints one row per (kernel, size) with the best per-call time of each backend
and the speed-up of the compiled one. Outputs of both backends are checked to
agree before timing.
"""
import argparse
import timeit

import numpy as np

from qsteer import kernels
from qsteer.classical import random_strategy_batch
from qsteer.encoding import fourier_matrix
from qsteer.qstate import random_density
from qsteer.witness import projector_stack


def epr_case(n, rng):
    alice = projector_stack(n, 2, offsets=[rng.normal(0, 0.01, 2 ** (m - 1)) for m in range(1, n + 1)])
    bob = projector_stack(n, 1)
    rho = np.stack([random_density(4, rng).data for _ in range(n)])
    return kernels.epr_table, (alice, bob, rho)


def product_case(n, rng):
    return kernels.product_table, (rng.uniform(size=(n, 2**n, 2**n)),)


def lhs_case(d, rng, count=2000):
    w, a1, a2, resp = random_strategy_batch(d, count, rng)
    return kernels.lhs_values, (w, a1, a2, resp, fourier_matrix(d))


CASES = [
    ("epr_table", "d=16", lambda rng: epr_case(4, rng)),
    ("epr_table", "d=64", lambda rng: epr_case(6, rng)),
    ("product_table", "d=64", lambda rng: product_case(6, rng)),
    ("lhs_values", "d=4, S=2000", lambda rng: lhs_case(4, rng)),
    ("lhs_values", "d=16, S=2000", lambda rng: lhs_case(16, rng)),
]


def best_time(fn, args, backend, repeat, number):
    times = timeit.repeat(lambda: fn(*args, backend=backend), repeat=repeat, number=number)
    return min(times) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if "cython" not in kernels.BACKENDS:
        print("compiled extension not built; only the numpy backend is available")
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<14} {'size':<14} {'python':>12} {'cython':>12} {'speed-up':>9}")
    for name, size, make in CASES:
        fn, fargs = make(rng)
        np.testing.assert_allclose(fn(*fargs, backend="cython"), fn(*fargs, backend="python"), atol=1e-12)
        t_py = best_time(fn, fargs, "python", args.repeat, args.number)
        t_cy = best_time(fn, fargs, "cython", args.repeat, args.number)
        print(f"{name:<14} {size:<14} {t_py * 1e6:>10.1f}us {t_cy * 1e6:>10.1f}us {t_py / t_cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
