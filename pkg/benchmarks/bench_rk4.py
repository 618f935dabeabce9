"""Compare the compiled and pure-Python RK4 kernels on a Schroedinger run.

    python3 benchmarks/bench_rk4.py [--span 10] [--dt 1e-3] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from ptdyson import kernels
from ptdyson.evolution import psi_solutions
from ptdyson.model import ModelParams, hamiltonian_H


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--span", type=float, default=10.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = ModelParams(omega=1.0, alpha=0.5, c1=4.0, c2=1.0)
    n = int(round(args.span / args.dt))
    half = 0.5 * args.dt * np.arange(2 * n + 1)
    gen = np.ascontiguousarray(-1j * hamiltonian_H(params, half))
    plus, _ = psi_solutions(params, np.array([0.0, n * args.dt]))

    backends = {"python": kernels.rk4_linear_python}
    if kernels.rk4_linear_compiled is not None:
        backends["cython"] = kernels.rk4_linear_compiled
    else:
        print("compiled kernel not built; timing the fallback only")

    timings = {}
    for name, fn in backends.items():
        ys, _ = fn(gen, plus[0], args.dt, 1e12)
        err = np.abs(ys[-1] - plus[1]).max()
        best = min(timeit.repeat(lambda f=fn: f(gen, plus[0], args.dt, 1e12), number=1, repeat=args.repeat))
        timings[name] = best
        print(f"{name:>7}: {n} steps in {best * 1e3:8.2f} ms  ({best / n * 1e6:.3f} us/step), end error {err:.1e}")
    if len(timings) == 2:
        print(f"speed-up: {timings['python'] / timings['cython']:.1f}x")


if __name__ == "__main__":
    main()
