"""Compare the numba and pure-numpy kernel paths.

Part 1 times each kernel pair directly on random admissible data and checks
that both agree.  Part 2 times a full 2D Euler run in two subprocesses, one
per ``CRKDG_NUMBA`` setting, since the flag is read at import time.

    python benchmarks/bench_kernels.py [--repeat 5] [--cells 40]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from crkdg import _kernels as K

GAMMA = 1.4


def _states(rng, n, dim=2):
    rho = rng.uniform(0.5, 2.0, n)
    vel = rng.normal(0.0, 1.0, (n, dim))
    p = rng.uniform(0.5, 2.0, n)
    E = p / (GAMMA - 1) + 0.5 * rho * np.sum(vel * vel, axis=1)
    return np.column_stack([rho, rho[:, None] * vel, E])


def _time(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(n, repeat, seed=0):
    if not K.HAVE_NUMBA:
        print("numba is not importable; only the numpy path exists")
        return
    rng = np.random.default_rng(seed)
    U = _states(rng, n)
    a = rng.normal(size=(n, 4))
    b = rng.normal(size=(n, 4))
    c = rng.normal(size=(n, 4))
    bound = np.full((n, 4), 0.1)
    uL = rng.uniform(-2, 2, n // 8)
    uR = rng.uniform(-2, 2, n // 8)
    pairs = {
        "euler_flux": (lambda: K.euler_flux_numpy(U, 0, GAMMA), lambda: K.euler_flux_numba(U, 0, GAMMA)),
        "euler_speed": (lambda: K.euler_speed_numpy(U, 0, GAMMA), lambda: K.euler_speed_numba(U, 0, GAMMA)),
        "euler_first_bad": (lambda: K.euler_first_bad_numpy(U, GAMMA), lambda: K.euler_first_bad_numba(U, GAMMA)),
        "modified_minmod": (lambda: K.modified_minmod_numpy(a, b, c, bound),
                            lambda: K.modified_minmod_numba(a, b, c, bound)),
        "godunov_burgers": (lambda: K.godunov_numpy(lambda u: 0.5 * u * u, uL, uR),
                            lambda: K.godunov_numba(K.SCALAR_BURGERS, 0.0, 1.0, uL, uR)),
    }
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}{'max |diff|':>12}")
    for name, (fn_np, fn_nb) in pairs.items():
        diff = float(np.max(np.abs(np.asarray(fn_np(), float) - np.asarray(fn_nb(), float))))
        t_np, t_nb = _time(fn_np, repeat), _time(fn_nb, repeat)
        print(f"{name:<18}{1e3 * t_np:12.3f}{1e3 * t_nb:12.3f}{t_np / t_nb:9.2f}{diff:12.2e}")


_RUN = """
import time
from crkdg import _kernels as K
from crkdg.harness import get_scenario, run_scenario
s = get_scenario("euler_wave_2d", degree=2, cells={cells})
run_scenario(s, max_steps=2)
t = time.perf_counter(); r = run_scenario(s, max_steps={steps}); t = time.perf_counter() - t
print(K.USE_NUMBA, t / r.steps, r.u.sum())
"""


def end_to_end(cells, steps):
    print(f"\n2D Euler wave, k=2, {cells}x{cells} cells, {steps} steps")
    for flag in ("0", "1"):
        env = dict(os.environ, CRKDG_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", _RUN.format(cells=cells, steps=steps)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  numba={out[0]:<5} {1e3 * float(out[1]):8.2f} ms/step  checksum {out[2]}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="states per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--cells", type=int, default=40)
    ap.add_argument("--steps", type=int, default=20)
    args = ap.parse_args()
    kernel_table(args.n, args.repeat)
    end_to_end(args.cells, args.steps)


if __name__ == "__main__":
    main()
