"""Time the exhaustive grid scan under the numba and numpy backends.

Usage: python benchmarks/bench_grid_scan.py [--resolutions 32 64 128]
       [--ternary-resolutions 4 8 12] [--repeat 3]

Both backends must return the same maximum and the same incumbent channel;
the script exits nonzero otherwise.
"""
import argparse
import sys
import time

import numpy as np

from interactive_rd import _accel
from interactive_rd.binary_erasure import BinaryJoint
from interactive_rd.info_core import DistortionMatrix
from interactive_rd.kernels import scan_grid

INSTANCES = {
    "binary-erasure": (BinaryJoint.from_bsc(0.2, 0.3).to_joint().probs, DistortionMatrix.binary_erasure().values, 0.4),
    "ternary-hamming": (np.full((3, 1), 1 / 3), DistortionMatrix.hamming(3).values, 0.3),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolutions", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--ternary-resolutions", type=int, nargs="+", default=[4, 8, 12])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can run", file=sys.stderr)
        return 1
    backends = ("numba", "numpy")
    print(f"{'instance':<16} {'res':>5} {'numba_s':>10} {'numpy_s':>10} {'speedup':>8}  value")
    mismatch = False
    for name, (pxy, d, budget) in INSTANCES.items():
        n_aux = pxy.shape[0] + 1
        scan_grid(pxy, d, 4, n_aux, budget, backend="numba")  # compile outside the timing
        # the ternary grid grows like res**6, so it gets its own, smaller list
        for res in args.resolutions if pxy.shape[0] == 2 else args.ternary_resolutions:
            results = {b: best_of(lambda: scan_grid(pxy, d, res, n_aux, budget, backend=b), args.repeat) for b in backends}
            (t_nb, (v_nb, rows_nb)), (t_np, (v_np, rows_np)) = results["numba"], results["numpy"]
            same = v_nb == v_np and np.array_equal(rows_nb, rows_np)
            mismatch |= not same
            flag = "" if same else "  MISMATCH"
            print(f"{name:<16} {res:>5} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}  {v_nb:.12f}{flag}", flush=True)
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
