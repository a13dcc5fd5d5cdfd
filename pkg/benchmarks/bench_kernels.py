"""Benchmark the compiled flux-differencing kernel against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--N 3] [--nelem 256] [--repeats 5]

Also times a full right-hand-side evaluation under each backend by toggling
the ESDG2D_PURE_PYTHON environment switch in subprocesses.
"""

import argparse
import subprocess
import sys
import time

import numpy as np

from esdg2d import kernels
from esdg2d import refelem as re
from esdg2d.kernels import pykernels
from esdg2d.mesh import build_uniform_mesh, geometric_factors, warp_mesh


def setup(kind: str, n: int, nelem: int):
    side = max(2, int(np.ceil(np.sqrt(nelem))))
    mesh = build_uniform_mesh(kind, side, side, (0.0, 2.0, 0.0, 2.0))
    mapping = warp_mesh(mesh, 1.0 / 8.0, min(n, 2))
    ops = re.reference_operators(kind, n, 2)
    ids = [e for e, k in enumerate(mesh.kinds) if k == kind][:nelem]
    geo = geometric_factors(mapping, ops, ids)
    rng = np.random.default_rng(0)
    rho = rng.uniform(0.5, 2.0, (len(ids), ops.Nt))
    vel = rng.uniform(-1.0, 1.0, (len(ids), ops.Nt, 2))
    p = rng.uniform(0.5, 2.0, (len(ids), ops.Nt))
    u = np.empty((len(ids), ops.Nt, 4))
    u[..., 0] = rho
    u[..., 1] = rho * vel[..., 0]
    u[..., 2] = rho * vel[..., 1]
    u[..., 3] = p / 0.4 + 0.5 * rho * (vel[..., 0] ** 2 + vel[..., 1] ** 2)
    pat = kernels.build_pattern(ops.QNskew[0], ops.QNskew[1])
    prim = kernels.primitive_table(u, 1.4)
    gflat = np.ascontiguousarray(geo.G.reshape(len(ids), ops.Nt, 4))
    return ops, pat, prim, gflat


def time_backend(fn, prim, gflat, pat, repeats: int) -> float:
    out = np.zeros((prim.shape[0], prim.shape[1], 4))
    fn(prim, gflat, pat, 1.4, out)  # warm up
    best = np.inf
    for _ in range(repeats):
        out[:] = 0.0
        t0 = time.perf_counter()
        fn(prim, gflat, pat, 1.4, out)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(args):
    print(f"active backend: {kernels.BACKEND}", flush=True)
    for kind in ("quad", "tri"):
        ops, pat, prim, gflat = setup(kind, args.N, args.nelem)
        nelem = prim.shape[0]
        pairs = pat.npairs
        t_py = time_backend(pykernels.flux_diff_accumulate, prim, gflat, pat, args.repeats)
        row = (
            f"{kind:5s} N={args.N} elems={nelem} points={ops.Nt} pairs={pairs}: "
            f"numpy {1e3 * t_py:8.3f} ms"
        )
        if kernels.BACKEND == "cython":
            t_cy = time_backend(kernels.flux_diff_accumulate, prim, gflat, pat, args.repeats)
            row += f"   cython {1e3 * t_cy:8.3f} ms   speedup {t_py / t_cy:5.1f}x"
        print(row, flush=True)


def bench_full_rhs(args):
    code = (
        "import time, numpy as np\n"
        "from esdg2d import euler, kernels\n"
        "from esdg2d.solver import RunConfig, Discretization\n"
        f"cfg = RunConfig(N={args.N}, option=3, element_kind='hybrid', nx=12, ny=12,\n"
        "                domain=(0,10,-5,5), flux='es')\n"
        "disc = Discretization(cfg)\n"
        "state = disc.project_initial(lambda x, y: euler.vortex_solution(x, y, 0.0))\n"
        "disc.rhs(state)\n"
        "t0 = time.perf_counter(); n = 0\n"
        "while time.perf_counter() - t0 < 2.0:\n"
        "    disc.rhs(state); n += 1\n"
        "dt = (time.perf_counter() - t0) / n\n"
        "print(f'{kernels.BACKEND}: {1e3*dt:.2f} ms per rhs ({n} evals)')\n"
    )
    for env_val in ("", "1"):
        import os

        env = dict(os.environ, ESDG2D_PURE_PYTHON=env_val)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--nelem", type=int, default=256)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--skip-rhs", action="store_true")
    args = ap.parse_args()
    bench_kernels(args)
    if not args.skip_rhs:
        print("\nfull right-hand-side evaluation (12x12 hybrid mesh):", flush=True)
        bench_full_rhs(args)


if __name__ == "__main__":
    main()
