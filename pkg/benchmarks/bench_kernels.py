"""Compare the compiled trial kernel against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--trials N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from qclone.cloner import CLONER
from qclone.kernels import BACKENDS
from qclone.montecarlo import kernel_tables, trial_uniforms
from qclone.restoration import SCENARIOS
from qclone.states import uniform_sphere_kets


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    u = trial_uniforms(0, 0, args.trials)
    inputs = uniform_sphere_kets(u[:, 0], u[:, 1])
    uo, us = np.ascontiguousarray(u[:, 2]), np.ascontiguousarray(u[:, 3])
    iso = np.ascontiguousarray(CLONER)
    if "compiled" not in BACKENDS:
        print("compiled extension not built; only the python backend is available")

    print(f"{'scenario':<26}" + "".join(f"{b + ' (ms)':>16}" for b in BACKENDS) + f"{'speedup':>10}")
    for name in SCENARIOS:
        meas, steps, success = kernel_tables(name)
        times = {}
        for backend, kern in BACKENDS.items():
            t = timeit.repeat(lambda: kern(iso, inputs, uo, us, meas, steps, success), number=1, repeat=args.repeat)
            times[backend] = 1e3 * min(t)
        row = f"{name:<26}" + "".join(f"{times[b]:>16.2f}" for b in BACKENDS)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)
    print(f"trials per call: {args.trials}, best of {args.repeat}")


if __name__ == "__main__":
    main()
