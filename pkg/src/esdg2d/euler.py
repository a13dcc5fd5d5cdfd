"""2D compressible Euler physics: variable maps, entropy pairs, two-point fluxes.

States are ndarrays whose last axis holds the conserved variables
[rho, rho*u, rho*v, E].  The convex entropy used throughout is U = -rho*s
with s = log(p / rho^gamma); its gradient gives the entropy variables below,
and the matching entropy potential is psi_i = (gamma-1) * rho * u_i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonphysicalStateError

__all__ = [
    "EulerState",
    "GAMMA_DEFAULT",
    "primitive_vars",
    "check_physical",
    "entropy_vars",
    "cons_vars",
    "entropy",
    "entropy_potential",
    "log_mean",
    "physical_flux",
    "flux_ec",
    "flux_ec_both",
    "flux_dissipation",
    "max_wavespeed",
    "vortex_solution",
]

GAMMA_DEFAULT = 1.4

# switch to the even Taylor series of the logarithmic mean when
# zeta^2 = ((a-b)/(a+b))^2 falls below this
_LOGMEAN_SERIES_CUT = 1.0e-4


@dataclass
class EulerState:
    """Named view over a conserved-variable array with its gas constant."""

    array: np.ndarray  # (..., 4)
    gamma: float = GAMMA_DEFAULT

    def __post_init__(self):
        self.array = np.asarray(self.array, dtype=float)
        if self.array.shape[-1] != 4:
            raise ValueError("conserved-variable arrays must have last axis 4")

    @property
    def rho(self):
        return self.array[..., 0]

    @property
    def rhou(self):
        return self.array[..., 1]

    @property
    def rhov(self):
        return self.array[..., 2]

    @property
    def E(self):
        return self.array[..., 3]

    @classmethod
    def from_primitive(cls, rho, u, v, p, gamma=GAMMA_DEFAULT):
        rho, u, v, p = np.broadcast_arrays(*map(np.asarray, (rho, u, v, p)))
        E = p / (gamma - 1.0) + 0.5 * rho * (u**2 + v**2)
        return cls(np.stack([rho, rho * u, rho * v, E], axis=-1), gamma)


def primitive_vars(u: np.ndarray, gamma: float = GAMMA_DEFAULT):
    """(rho, velocity-x, velocity-y, pressure) from conserved variables."""
    rho = u[..., 0]
    vx = u[..., 1] / rho
    vy = u[..., 2] / rho
    p = (gamma - 1.0) * (u[..., 3] - 0.5 * rho * (vx**2 + vy**2))
    return rho, vx, vy, p


def _internal_energy(u: np.ndarray):
    rho = u[..., 0]
    return u[..., 3] - 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho


def check_physical(u: np.ndarray, gamma: float = GAMMA_DEFAULT, element: int | None = None):
    """Raise if density or internal energy is nonpositive anywhere."""
    rho = u[..., 0]
    if not np.all(np.isfinite(u)):
        raise NonphysicalStateError("non-finite state", element)
    if np.any(rho <= 0.0):
        raise NonphysicalStateError("nonpositive density", element)
    if np.any(_internal_energy(u) <= 0.0):
        raise NonphysicalStateError("nonpositive internal energy", element)


def entropy_vars(u: np.ndarray, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Entropy variables v = dU/du for U = -rho*s."""
    check_physical(u, gamma)
    rho = u[..., 0]
    rhoe = _internal_energy(u)
    p = (gamma - 1.0) * rhoe
    s = np.log(p) - gamma * np.log(rho)
    v = np.empty_like(u)
    v[..., 0] = (rhoe * (gamma + 1.0 - s) - u[..., 3]) / rhoe
    v[..., 1] = u[..., 1] / rhoe
    v[..., 2] = u[..., 2] / rhoe
    v[..., 3] = -rho / rhoe
    return v


def cons_vars(v: np.ndarray, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Inverse of entropy_vars; requires v4 < 0."""
    v = np.asarray(v, dtype=float)
    v4 = v[..., 3]
    if np.any(v4 >= 0.0):
        raise NonphysicalStateError("entropy variables with v4 >= 0 have no physical state")
    gm1 = gamma - 1.0
    s = gamma - v[..., 0] + 0.5 * (v[..., 1] ** 2 + v[..., 2] ** 2) / v4
    rhoe = (gm1 / (-v4) ** gamma) ** (1.0 / gm1) * np.exp(-s / gm1)
    u = np.empty_like(v)
    u[..., 0] = -rhoe * v4
    u[..., 1] = rhoe * v[..., 1]
    u[..., 2] = rhoe * v[..., 2]
    u[..., 3] = rhoe * (1.0 - 0.5 * (v[..., 1] ** 2 + v[..., 2] ** 2) / v4)
    return u


def entropy(u: np.ndarray, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Entropy function U = -rho*s (the one generated by entropy_vars)."""
    check_physical(u, gamma)
    rho, _, _, p = primitive_vars(u, gamma)
    s = np.log(p) - gamma * np.log(rho)
    return -rho * s


def entropy_potential(u: np.ndarray, i: int, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Entropy potential psi_i = (gamma-1) rho u_i paired with entropy_vars.

    Satisfies the two-point conservation identity
    (v_L - v_R)^T f_S^i = psi_i(u_L) - psi_i(u_R) for the fluxes below.
    """
    check_physical(u, gamma)
    return (gamma - 1.0) * u[..., 1 + i]


def log_mean(a, b):
    """Logarithmic mean (a-b)/(log a - log b), series-stabilized near a = b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("log_mean requires positive arguments")
    s = a + b
    d = a - b
    zeta2 = (d / s) ** 2
    series = 0.5 * s / (1.0 + zeta2 * (1.0 / 3.0 + zeta2 * (1.0 / 5.0 + zeta2 / 7.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = d / (np.log(a) - np.log(b))
    return np.where(zeta2 < _LOGMEAN_SERIES_CUT, series, direct)


def physical_flux(u: np.ndarray, gamma: float = GAMMA_DEFAULT):
    """Pair of flux arrays (x-direction, y-direction), each shaped like u."""
    rho, vx, vy, p = primitive_vars(u, gamma)
    fx = np.stack([rho * vx, rho * vx**2 + p, rho * vx * vy, vx * (u[..., 3] + p)], axis=-1)
    fy = np.stack([rho * vy, rho * vx * vy, rho * vy**2 + p, vy * (u[..., 3] + p)], axis=-1)
    return fx, fy


def flux_ec_both(uL: np.ndarray, uR: np.ndarray, gamma: float = GAMMA_DEFAULT):
    """Entropy-conservative two-point flux in both coordinate directions.

    Kinetic-energy-preserving flux built from arithmetic and logarithmic
    means of density and inverse temperature beta = rho/(2p); satisfies
    consistency, symmetry, and the entropy-potential conservation identity.
    """
    rL, uxL, uyL, pL = primitive_vars(uL, gamma)
    rR, uxR, uyR, pR = primitive_vars(uR, gamma)
    bL = 0.5 * rL / pL
    bR = 0.5 * rR / pR
    rlog = log_mean(rL, rR)
    blog = log_mean(bL, bR)
    ra = 0.5 * (rL + rR)
    ba = 0.5 * (bL + bR)
    ua = 0.5 * (uxL + uxR)
    va = 0.5 * (uyL + uyR)
    p_avg = 0.5 * ra / ba
    vel2_avg = uxL * uxR + uyL * uyR
    e_avg = rlog / (2.0 * blog * (gamma - 1.0)) + 0.5 * rlog * vel2_avg
    f1x = rlog * ua
    f1y = rlog * va
    fx = np.stack([f1x, f1x * ua + p_avg, f1y * ua, (e_avg + p_avg) * ua], axis=-1)
    fy = np.stack([f1y, f1y * ua, f1y * va + p_avg, (e_avg + p_avg) * va], axis=-1)
    return fx, fy


def flux_ec(uL: np.ndarray, uR: np.ndarray, i: int, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Entropy-conservative two-point flux in coordinate direction i (0 or 1)."""
    return flux_ec_both(uL, uR, gamma)[i]


def max_wavespeed(u: np.ndarray, normal: np.ndarray, gamma: float = GAMMA_DEFAULT):
    """|u . n| + c with n a unit normal (last axis 2)."""
    rho, vx, vy, p = primitive_vars(u, gamma)
    un = vx * normal[..., 0] + vy * normal[..., 1]
    c = np.sqrt(gamma * p / rho)
    return np.abs(un) + c


def flux_dissipation(u_int, u_ext, normal, gamma: float = GAMMA_DEFAULT) -> np.ndarray:
    """Local Lax-Friedrichs penalty -lambda/2 (u_ext - u_int), unit normal."""
    lam = np.maximum(max_wavespeed(u_int, normal, gamma), max_wavespeed(u_ext, normal, gamma))
    return -0.5 * lam[..., None] * (u_ext - u_int)


def vortex_solution(
    x,
    y,
    t: float,
    gamma: float = GAMMA_DEFAULT,
    strength: float = 5.0,
    center=(5.0, 0.0),
    wrap=None,
) -> np.ndarray:
    """Isentropic vortex advecting with the free stream (1, 0); p = rho^gamma.

    ``wrap`` = (Lx, Ly) folds the vortex-relative displacements into the
    nearest periodic image, so the analytic solution matches periodic runs.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - center[0] - t
    dy = y - center[1]
    if wrap is not None:
        lx, ly = wrap
        if lx:
            dx = dx - lx * np.round(dx / lx)
        if ly:
            dy = dy - ly * np.round(dy / ly)
    r2 = dx**2 + dy**2
    g = strength / (2.0 * np.pi) * np.exp(1.0 - r2)
    rho = (1.0 - 0.5 * (gamma - 1.0) * g**2 / (2.0 * gamma)) ** (1.0 / (gamma - 1.0))
    u = 1.0 - g * dy
    v = g * dx
    p = rho**gamma
    E = p / (gamma - 1.0) + 0.5 * rho * (u**2 + v**2)
    return np.stack([rho, rho * u, rho * v, E], axis=-1)
