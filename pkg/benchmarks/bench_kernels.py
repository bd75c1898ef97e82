"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--level 5] [--tour 150] [--repeat 3]

Reports the best wall time of each kernel per backend and checks the two
backends return identical results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from curverecon._kernels import _pykernels
from curverecon.shapes import icosphere

try:
    from curverecon._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--level", type=int, default=5, help="icosphere subdivision level for Dijkstra")
    ap.add_argument("--sources", type=int, default=64)
    ap.add_argument("--tour", type=int, default=150, help="tour size for 2-opt")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    mesh = icosphere(args.level)
    csr = mesh.csr
    src = rng.choice(mesh.n_vertices, args.sources, replace=False)
    pts = rng.uniform(size=(args.tour, 2))
    D = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    order = rng.permutation(args.tour).astype(np.int64)

    cases = {
        f"dijkstra ({mesh.n_vertices} vertices, {args.sources} sources)": lambda m: m.dijkstra(*csr, src),
        f"two_opt ({args.tour} nodes, random start)": lambda m: m.two_opt(order.copy(), D, 1e-12),
    }
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{'kernel':<48} {'backend':<8} {'best s':>9} {'speedup':>8}")
    for name, fn in cases.items():
        times, outs = {}, {}
        for label, mod in backends.items():
            times[label], outs[label] = best_of(lambda: fn(mod), args.repeat)
        for label in backends:
            speed = times["python"] / times[label]
            print(f"{name:<48} {label:<8} {times[label]:9.4f} {speed:7.1f}x")
        if len(outs) == 2:
            a, b = outs["python"], outs["cython"]
            same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else a == b
            print(f"{'':<48} identical results: {same}")


if __name__ == "__main__":
    main()
