"""Entropy-stable modal DG solver for the 2D compressible Euler equations."""

from . import quadrature, refelem, sbp, mesh, euler, kernels, solver, diagnostics
from .solver import Discretization, RunConfig

__all__ = [
    "quadrature",
    "refelem",
    "sbp",
    "mesh",
    "euler",
    "kernels",
    "solver",
    "diagnostics",
    "Discretization",
    "RunConfig",
]
__version__ = "0.1.0"
