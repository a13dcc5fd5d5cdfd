"""Flux-differencing kernel backends.

The compiled extension is preferred when importable; otherwise the pure-NumPy
implementation is used.  Set ESDG2D_PURE_PYTHON=1 to force the fallback
(useful for benchmarking the two against each other).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import pykernels
from .patterns import FluxDiffPattern, build_pattern, primitive_table

__all__ = [
    "BACKEND",
    "FluxDiffPattern",
    "build_pattern",
    "primitive_table",
    "flux_diff_accumulate",
]

_compiled = None
if not os.environ.get("ESDG2D_PURE_PYTHON"):
    try:
        from . import _fluxdiff as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def flux_diff_accumulate(prim, geo, pattern, gamma, out, threads: int = 1) -> None:
    """Accumulate the flux-differenced volume residual into ``out`` (K, Nt, 4).

    Results are independent of ``threads``: each element's accumulation is
    private, so chunking the element range is bitwise reproducible.
    """
    if _compiled is None:
        pykernels.flux_diff_accumulate(prim, geo, pattern, gamma, out)
        return
    nelem = prim.shape[0]
    if threads <= 1 or nelem < 2 * threads:
        _compiled.flux_diff_accumulate(prim, geo, pattern, gamma, out)
        return
    bounds = np.linspace(0, nelem, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(
                _compiled.flux_diff_accumulate, prim, geo, pattern, gamma, out, int(lo), int(hi)
            )
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()
