"""Wall-clock comparison of the numba and numpy relaxation kernels.

    python3 benchmarks/bench_relax.py [--eps 0.05] [--n-pts 3201] [--repeat 3]

Both kernels run the same IMEX iteration from the same start, so they take
the same number of steps and reach the same steady state.
"""

import argparse
import time

import numpy as np

from metapop_hj._accel import HAVE_NUMBA
from metapop_hj.fd import steady_state_solve
from metapop_hj.model import ModelParams


def timed(p, eps, n_pts, use_numba, repeat):
    best = np.inf
    gs = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        gs = steady_state_solve(p, eps, n_pts=n_pts, use_numba=use_numba)
        best = min(best, time.perf_counter() - t0)
    return best, gs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--n-pts", type=int, default=3201)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    p = ModelParams.symmetric(1.5, 0.5, 1.0, 1.2, 1.0)

    t_np, gs_np = timed(p, args.eps, args.n_pts, False, args.repeat)
    print(f"numpy : {t_np:8.3f} s  steps={gs_np.iterations}  N1={gs_np.N1:.12f}")
    if not HAVE_NUMBA:
        print("numba : unavailable (not installed or disabled by METAPOP_HJ_DISABLE_NUMBA)")
        return
    # first call compiles (or loads the on-disk cache)
    steady_state_solve(p, args.eps, n_pts=801, use_numba=True)
    t_nb, gs_nb = timed(p, args.eps, args.n_pts, True, args.repeat)
    print(f"numba : {t_nb:8.3f} s  steps={gs_nb.iterations}  N1={gs_nb.N1:.12f}")
    print(f"speedup {t_np / t_nb:.1f}x, max |n1 diff| = "
          f"{np.abs(gs_np.n1 - gs_nb.n1).max():.3g}")


if __name__ == "__main__":
    main()
