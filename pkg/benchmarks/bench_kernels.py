"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per (kernel, size) with the per-call time of each backend
and the speedup.  Full solves are timed in a child process per backend,
since the backend is fixed at import through INTEGRAX_DISABLE_NUMBA.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from integrax import kernels

SOLVE_SNIPPET = """
import time
from integrax.drawfuns import shabat_solve, conservative_solve
from integrax.trees import tree_from_partition
t = tree_from_partition([4, 3, 3, 3, 2] + [1] * 7)
shabat_solve(t); conservative_solve(t)
t0 = time.perf_counter()
for _ in range({repeat}):
    shabat_solve(t); conservative_solve(t)
print((time.perf_counter() - t0) / {repeat})
"""


def _inputs(n: int, rng: np.random.Generator):
    p = n // 2 + 1
    alpha = np.ones(p, dtype=np.int64)
    alpha[0] += n - p
    q = n + 1 - p
    beta = np.ones(q, dtype=np.int64)
    beta[0] += n - q
    white = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    black = rng.standard_normal(q) + 1j * rng.standard_normal(q)
    return white, alpha, black, beta


def bench_kernels(repeat: int) -> None:
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>4}{'numpy us':>12}{'numba us':>12}{'speedup':>10}")
    for n in (4, 8, 16, 32):
        white, alpha, black, beta = _inputs(n, rng)
        c = 0.7 + 0.1j
        cases = {
            "shabat_system": (kernels.np_shabat_system, kernels.jit_shabat_system, (white, alpha, black, beta, c)),
            "conservative_system": (kernels.np_conservative_system, kernels.jit_conservative_system, (white, alpha, float(n + 1))),
        }
        for name, (np_fn, jit_fn, args) in cases.items():
            r_np, j_np = np_fn(*args)
            r_jit, j_jit = jit_fn(*args)
            assert np.allclose(r_np, r_jit) and np.allclose(j_np, j_jit), name
            t_np = min(timeit.repeat(lambda: np_fn(*args), number=repeat, repeat=3)) / repeat
            t_jit = min(timeit.repeat(lambda: jit_fn(*args), number=repeat, repeat=3)) / repeat
            print(f"{name:<22}{n:>4}{t_np * 1e6:>12.1f}{t_jit * 1e6:>12.1f}{t_np / t_jit:>10.1f}x")


def bench_solves(repeat: int) -> None:
    times = {}
    for label, flag in (("numpy", "1"), ("numba", "0")):
        env = dict(os.environ, INTEGRAX_DISABLE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", SOLVE_SNIPPET.format(repeat=repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        times[label] = float(out.stdout.strip())
    print(f"full solves (11 edges): numpy {times['numpy'] * 1e3:.2f} ms, "
          f"numba {times['numba'] * 1e3:.2f} ms, speedup {times['numpy'] / times['numba']:.1f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    bench_kernels(args.repeat)
    bench_solves(max(1, args.repeat // 20))


if __name__ == "__main__":
    main()
