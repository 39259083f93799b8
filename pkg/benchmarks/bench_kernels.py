"""Compare the compiled and pure-numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--batch 256] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from subspace_doa.array_sim import ArrayGeometry
from subspace_doa.kernels import _pykernels

try:
    from subspace_doa.kernels import _ckernels
except ImportError:
    _ckernels = None


def _inputs(batch, geom, rng):
    Z = rng.standard_normal((batch, geom.N, geom.N)) + 1j * rng.standard_normal((batch, geom.N, geom.N))
    R = Z @ Z.conj().transpose(0, 2, 1)
    U = rng.standard_normal((batch, geom.M)) + 1j * rng.standard_normal((batch, geom.M))
    W = rng.standard_normal((batch, geom.M, geom.M)) + 1j * rng.standard_normal((batch, geom.M, geom.M))
    return R, U, W


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = {"numpy": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled backend not built; timing numpy only")
    print(f"{'geometry':8s} {'kernel':18s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for name in ("mra4", "mra5", "mra6"):
        geom = ArrayGeometry.named(name)
        R, U, W = _inputs(args.batch, geom, rng)
        S = np.asarray(geom.indices, dtype=np.int64)
        calls = {
            "lag_average": lambda m: m.lag_average(R, S, geom.M),
            "toeplitz_hermitian": lambda m: m.toeplitz_hermitian(U),
            "diag_sums": lambda m: m.diag_sums(W),
        }
        for kname, call in calls.items():
            times = {}
            for bname, mod in backends.items():
                call(mod)
                times[bname] = min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
            speed = f"{times['numpy'] / times['cython']:8.1f}x" if "cython" in times else ""
            row = " ".join(f"{1e6 * times[b]:10.1f}us" for b in backends)
            print(f"{name:8s} {kname:18s} {row}  {speed}")


if __name__ == "__main__":
    main()
