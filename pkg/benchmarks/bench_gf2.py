"""Benchmark: compiled GF(2) kernels vs the pure-Python (numpy) fallback.

Two parts:
  1. kernel microbenchmarks (matrix product, elimination) run in-process
     against both kernel modules on identical bit-packed inputs;
  2. an end-to-end resolution + graded-dimension computation run in
     subprocesses, once per backend (COHOMTC_FORCE_PY selects the
     fallback), since the backend is bound at import time.

Usage: python3 benchmarks/bench_gf2.py [--repeat N] [--skip-e2e]
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from cohomtc.gf2 import _np_backend, pack_rows

try:
    from cohomtc.gf2 import _speedups
except ImportError:
    _speedups = None


def timed(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def bench_kernels(repeat):
    rng = np.random.default_rng(2024)
    sizes = [(256, 256, 256), (1024, 512, 1024), (2048, 2048, 512)]
    backends = [("numpy", _np_backend)]
    if _speedups is not None:
        backends.append(("cython", _speedups))

    print(f"{'operation':<26} {'size':<18} "
          + " ".join(f"{name + ' (ms)':>14}" for name, _ in backends)
          + f" {'speedup':>9}")
    for n, k, m in sizes:
        a = rng.integers(0, 2, (n, k)).astype(np.uint8)
        b = rng.integers(0, 2, (k, m)).astype(np.uint8)
        pa, pb = pack_rows(a, k), pack_rows(b, m)
        results = []
        for _, mod in backends:
            best, _ = timed(lambda mod=mod: mod.mul(pa, k, pb), repeat)
            results.append(best * 1000)
        _print_row("matrix product", f"{n}x{k} @ {k}x{m}", results)

        results = []
        for _, mod in backends:
            best, _ = timed(
                lambda mod=mod: mod.rref_inplace(pa.copy(), k, None), repeat)
            results.append(best * 1000)
        _print_row("row reduction", f"{n}x{k}", results)


def _print_row(op, size, results):
    cells = " ".join(f"{ms:>14.2f}" for ms in results)
    speedup = f"{results[0] / results[-1]:>8.1f}x" if len(results) > 1 else f"{'-':>9}"
    print(f"{op:<26} {size:<18} {cells} {speedup}")


E2E_CODE = """
import time
from cohomtc.gf2 import BACKEND
from cohomtc.workspace import Workspace
from cohomtc.groups import make_quaternion
from cohomtc.tc import TCEngine
t0 = time.perf_counter()
ws = Workspace()
Q = make_quaternion(1)
row = ws.betti(ws.square(Q), 6)
assert row == [1, 4, 8, 10, 10, 12, 17], row
page = TCEngine(ws).e1_page(Q, 1, 1)
assert sum(b.dim for b in page.blocks) == 5
print(f"{BACKEND} {time.perf_counter() - t0:.3f}")
"""


def bench_end_to_end():
    print("\nend-to-end: graded dims of the square of Q8 through degree 6\n"
          "and its arity-1 block decomposition")
    for force in (None, "1"):
        env = dict(os.environ)
        env.pop("COHOMTC_FORCE_PY", None)
        if force:
            env["COHOMTC_FORCE_PY"] = force
        out = subprocess.run([sys.executable, "-c", E2E_CODE], env=env,
                             capture_output=True, text=True)
        if out.returncode != 0:
            print(out.stderr, file=sys.stderr)
            raise SystemExit(1)
        backend, secs = out.stdout.split()
        print(f"  backend {backend:<8} {float(secs) * 1000:10.1f} ms")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()
    if _speedups is None:
        print("compiled extension not available; timing the fallback only\n")
    bench_kernels(args.repeat)
    if not args.skip_e2e:
        bench_end_to_end()


if __name__ == "__main__":
    main()
