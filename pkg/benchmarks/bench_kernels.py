"""Numba vs numpy timings for the hot kernels.

The backend is fixed at import time, so each backend runs in its own
subprocess:

    python3 benchmarks/bench_kernels.py            # both backends, table
    python3 benchmarks/bench_kernels.py --worker   # current backend, JSON

Times are the best of ``--repeat`` runs after one warm-up call, so numba
compilation is excluded.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def best_of(fn, repeat):
    fn()  # warm-up (jit compile)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    from sparseres import kernels
    from sparseres.fixtures import CYCLOHEXANE, MOLECULE_90, molecule_system
    from sparseres.solver import solve_hidden
    from sparseres.subdivision import mixed_volume

    rng = np.random.default_rng(0)
    m, n = 30, 80
    A = rng.normal(size=(m, n))
    b = A @ rng.uniform(0.1, 1.0, size=n)
    c = rng.uniform(0.0, 1.0, size=n)

    P = rng.integers(-20, 21, size=(50_000, 3))
    H = rng.integers(-5, 6, size=(12, 3))
    hb = rng.integers(50, 100, size=12)
    dnum = np.zeros(3, dtype=np.int64)

    X = rng.normal(size=(200, 3)) + 1j * rng.normal(size=(200, 3))
    E = rng.integers(-3, 4, size=(400, 3))

    Mi = rng.integers(-9, 10, size=(120, 120))
    L = rng.normal(size=(300, 300))

    mol = molecule_system(MOLECULE_90).supports()
    cyc = molecule_system(CYCLOHEXANE)

    return {
        "simplex 30x80": lambda: kernels.simplex(A, b, c),
        "classify_box 50k pts": lambda: kernels.classify_box(P, H, hb, dnum, 1),
        "monomial_values 200x400": lambda: kernels.monomial_values(X, E),
        "det_mod_p 120x120": lambda: kernels.det_mod_p(Mi),
        "lu_complete 300x300": lambda: kernels.lu_complete(L, 1e-10),
        "mixed_volume molecule": lambda: mixed_volume(mol),
        "solve_hidden cyclohexane": lambda: solve_hidden(cyc, "t3"),
    }


def worker(repeat):
    from sparseres._accel import backend_name

    out = {"backend": backend_name()}
    for name, fn in cases().items():
        out[name] = best_of(fn, repeat)
    print(json.dumps(out))


def run_backend(disable, repeat):
    env = dict(os.environ)
    env.pop("SPARSERES_DISABLE_NUMBA", None)
    if disable:
        env["SPARSERES_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worker", action="store_true")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    print(f"{'kernel':28s} {fast['backend']:>10s} {slow['backend']:>10s} {'speedup':>8s}")
    for name in fast:
        if name == "backend":
            continue
        a, b = fast[name], slow[name]
        print(f"{name:28s} {a * 1e3:8.2f}ms {b * 1e3:8.2f}ms {b / a:7.1f}x")


if __name__ == "__main__":
    main()
