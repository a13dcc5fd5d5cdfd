"""Orthonormal bases and quadrature-induced operators on reference elements.

Triangles use the Koornwinder-Dubiner basis in collapsed coordinates;
quadrilaterals use tensor products of orthonormal 1D Legendre polynomials.
Both are orthonormal under exact integration, so the mass matrix is the
identity whenever the volume rule is exact for degree-2N integrands.

``build_reference_operators`` assembles every quadrature-induced matrix used
by the solver: interpolation (Vq, Vf), modal differentiation (Dr, Ds), mass
and projection (M, Pq), extrapolation (E), boundary weights (B), and the
generalized, hybridized, and skew-hybridized difference operators
(Q, QN, QNskew).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import _jacobi, quadrature
from .errors import DomainError, InsufficientQuadratureError

__all__ = [
    "Basis",
    "basis_eval",
    "basis_grad",
    "ReferenceOperators",
    "build_reference_operators",
    "reference_operators",
    "volume_rule_for_option",
    "face_rule_1d_for_option",
    "gll_rule_for_exactness",
    "gauss_rule_for_exactness",
]

_DOMAIN_TOL = 1e-10


@dataclass(frozen=True)
class Basis:
    """Orthonormal polynomial basis of one element kind and degree."""

    element_kind: str  # "tri" | "quad"
    degree: int

    def __post_init__(self):
        if self.element_kind not in ("tri", "quad"):
            raise ValueError(f"unknown element kind {self.element_kind!r}")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")

    @property
    def num_modes(self) -> int:
        n = self.degree
        return (n + 1) * (n + 2) // 2 if self.element_kind == "tri" else (n + 1) ** 2

    @property
    def mode_indices(self):
        n = self.degree
        if self.element_kind == "tri":
            return [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]
        return [(i, j) for i in range(n + 1) for j in range(n + 1)]


def _check_domain(kind: str, pts: np.ndarray):
    x, y = pts[:, 0], pts[:, 1]
    if kind == "quad":
        ok = (np.abs(x) <= 1.0 + _DOMAIN_TOL) & (np.abs(y) <= 1.0 + _DOMAIN_TOL)
    else:
        ok = (x >= -1.0 - _DOMAIN_TOL) & (y >= -1.0 - _DOMAIN_TOL) & (x + y <= _DOMAIN_TOL)
    if not np.all(ok):
        bad = pts[~ok][0]
        raise DomainError(f"point {tuple(bad)} outside reference {kind}")


def _collapsed(pts: np.ndarray):
    """Map triangle coordinates to the collapsed square; a := -1 at the top vertex."""
    x, y = pts[:, 0], pts[:, 1]
    b = y
    denom = 1.0 - b
    safe = denom > 1e-12
    a = np.full_like(x, -1.0)
    a[safe] = 2.0 * (1.0 + x[safe]) / denom[safe] - 1.0
    return a, b


def basis_eval(basis: Basis, points: np.ndarray) -> np.ndarray:
    """Matrix of basis values, one row per point, one column per mode."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _check_domain(basis.element_kind, pts)
    n = basis.degree
    if basis.element_kind == "quad":
        px = _jacobi.eval_orthonormal(pts[:, 0], n)
        py = _jacobi.eval_orthonormal(pts[:, 1], n)
        cols = [px[:, i] * py[:, j] for (i, j) in basis.mode_indices]
        return np.column_stack(cols)
    a, b = _collapsed(pts)
    pa = _jacobi.eval_orthonormal(a, n)
    one_minus_b = 1.0 - b
    cols = []
    for i, j in basis.mode_indices:
        pb = _jacobi.eval_orthonormal(b, j, alpha=2.0 * i + 1.0)[:, j]
        cols.append(np.sqrt(2.0) * pa[:, i] * pb * one_minus_b**i)
    return np.column_stack(cols)


def basis_grad(basis: Basis, points: np.ndarray):
    """Pair of matrices with the two reference-coordinate derivatives of each mode."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _check_domain(basis.element_kind, pts)
    n = basis.degree
    if basis.element_kind == "quad":
        px, dpx = _jacobi.eval_orthonormal_deriv(pts[:, 0], n)
        py, dpy = _jacobi.eval_orthonormal_deriv(pts[:, 1], n)
        dx = [dpx[:, i] * py[:, j] for (i, j) in basis.mode_indices]
        dy = [px[:, i] * dpy[:, j] for (i, j) in basis.mode_indices]
        return np.column_stack(dx), np.column_stack(dy)
    a, b = _collapsed(pts)
    pa, dpa = _jacobi.eval_orthonormal_deriv(a, n)
    one_minus_b = 1.0 - b
    dx_cols, dy_cols = [], []
    for i, j in basis.mode_indices:
        pb, dpb = _jacobi.eval_orthonormal_deriv(b, j, alpha=2.0 * i + 1.0)
        pb, dpb = pb[:, j], dpb[:, j]
        pow_i = one_minus_b**i
        pow_im1 = one_minus_b ** (i - 1) if i >= 1 else np.zeros_like(b)
        # d/dx = (2/(1-b)) d/da
        dx_cols.append(np.sqrt(2.0) * 2.0 * dpa[:, i] * pb * pow_im1)
        # d/dy = ((1+a)/(1-b)) d/da + d/db
        term = dpa[:, i] * (1.0 + a) * pb * pow_im1
        term = term + pa[:, i] * (dpb * pow_i - i * pb * pow_im1)
        dy_cols.append(np.sqrt(2.0) * term)
    return np.column_stack(dx_cols), np.column_stack(dy_cols)


@lru_cache(maxsize=None)
def _modal_diff_matrices(kind: str, degree: int):
    """Exact modal differentiation matrices via an exactly-integrating rule."""
    basis = Basis(kind, degree)
    if kind == "quad":
        rule = quadrature.tensor_rule_2d(quadrature.gauss_1d(degree + 1))
    else:
        rule = quadrature.triangle_volume_rule(max(2 * degree - 1, 0))
    v = basis_eval(basis, rule.points)
    vx, vy = basis_grad(basis, rule.points)
    w = rule.weights[:, None]
    gram = v.T @ (w * v)
    dr = np.linalg.solve(gram, v.T @ (w * vx))
    ds = np.linalg.solve(gram, v.T @ (w * vy))
    return dr, ds


class ReferenceOperators:
    """All quadrature-induced matrices for one (element kind, degree, rule pairing).

    Attributes
    ----------
    Vq, Vf : interpolation to volume / stacked surface quadrature points
    Dr, Ds : modal differentiation matrices per reference coordinate
    M      : mass matrix Vq^T W Vq (Cholesky factor retained, not inverted)
    Pq     : quadrature projection M^{-1} Vq^T W
    E      : extrapolation Vf Pq
    wq     : volume weights; wf: stacked raw 1D face weights
    nrstJ  : stacked scaled reference normals at surface points, shape (Nqf, 2)
    wf_arc : true surface integration weights wf * |nrstJ|
    B      : pair of diagonal vectors wf * nrstJ[:, i]
    Q      : generalized operators W Vq D^i Pq
    QN     : hybridized operators; QNskew: skew-hybridized operators
    """

    def __init__(self, basis: Basis, volume_rule, face_rules):
        self.basis = basis
        self.volume_rule = volume_rule
        self.face_rules = list(face_rules)
        self.Np = basis.num_modes

        self.wq = volume_rule.weights
        self.Nq = volume_rule.npoints
        self.Vq = basis_eval(basis, volume_rule.points)

        face_pts = np.vstack([f.points for f in self.face_rules])
        self.Vf = basis_eval(basis, face_pts)
        self.surface_points = face_pts
        self.wf = np.concatenate([f.weights for f in self.face_rules])
        self.nrstJ = np.vstack([f.normals for f in self.face_rules])
        self.wf_arc = np.concatenate([f.arc_weights for f in self.face_rules])
        self.Nqf = self.wf.shape[0]

        self.M = self.Vq.T @ (self.wq[:, None] * self.Vq)
        try:
            self.M_chol = sla.cho_factor(self.M)
        except np.linalg.LinAlgError as exc:
            raise InsufficientQuadratureError(
                "insufficient volume quadrature: mass matrix is not positive definite"
            ) from exc
        self.Pq = sla.cho_solve(self.M_chol, self.Vq.T * self.wq[None, :])
        self.E = self.Vf @ self.Pq

        self.Dr, self.Ds = _modal_diff_matrices(basis.element_kind, basis.degree)
        self.B = tuple(self.wf * self.nrstJ[:, i] for i in range(2))
        self.Q = tuple(
            (self.wq[:, None] * self.Vq) @ d @ self.Pq for d in (self.Dr, self.Ds)
        )
        self.QN = tuple(self._hybridized(i) for i in range(2))
        self.QNskew = tuple(self._skew_hybridized(i) for i in range(2))

    def _hybridized(self, i: int) -> np.ndarray:
        q, e, b = self.Q[i], self.E, self.B[i]
        top_left = q - 0.5 * e.T @ (b[:, None] * e)
        top_right = 0.5 * e.T * b[None, :]
        bot_left = -0.5 * b[:, None] * e
        bot_right = 0.5 * np.diag(b)
        return np.block([[top_left, top_right], [bot_left, bot_right]])

    def _skew_hybridized(self, i: int) -> np.ndarray:
        q, e, b = self.Q[i], self.E, self.B[i]
        top_left = 0.5 * (q - q.T)
        top_right = 0.5 * e.T * b[None, :]
        bot_left = -0.5 * b[:, None] * e
        bot_right = 0.5 * np.diag(b)
        return np.block([[top_left, top_right], [bot_left, bot_right]])

    @property
    def Nt(self) -> int:
        return self.Nq + self.Nqf

    @property
    def VN(self) -> np.ndarray:
        """Stacked interpolation [Vq; Vf] to all volume+surface points."""
        return np.vstack([self.Vq, self.Vf])

    def BN(self, i: int) -> np.ndarray:
        """Boundary matrix blockdiag(0, B^i) of the SBP identity."""
        out = np.zeros((self.Nt, self.Nt))
        out[self.Nq :, self.Nq :] = np.diag(self.B[i])
        return out

    def mass_solve(self, rhs: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self.M_chol, rhs)


def build_reference_operators(element_kind, N, volume_rule, face_rule_1d) -> ReferenceOperators:
    """Assemble reference operators from a volume rule and one shared 1D face rule."""
    basis = Basis(element_kind, N)
    nfaces = 4 if element_kind == "quad" else 3
    faces = [quadrature.face_rule(element_kind, f, face_rule_1d) for f in range(nfaces)]
    return ReferenceOperators(basis, volume_rule, faces)


def volume_rule_for_option(element_kind: str, N: int, option: int):
    """Volume rule of one of the three hybrid-mesh quadrature pairings.

    Quadrilaterals: options 1-2 use (N+1)-point GLL, option 3 (N+1)-point
    Gauss tensor rules.  Triangles always use a degree-2N volume rule.
    """
    if option not in (1, 2, 3):
        raise ValueError("option must be 1, 2, or 3")
    if element_kind == "tri":
        return quadrature.triangle_volume_rule(2 * N)
    rule_1d = quadrature.gauss_1d(N + 1) if option == 3 else quadrature.gll_1d(N + 1)
    return quadrature.tensor_rule_2d(rule_1d)


def face_rule_1d_for_option(N: int, option: int):
    """Shared 1D face rule: GLL(N+1) for option 1, Gauss(N+1) for options 2-3."""
    if option not in (1, 2, 3):
        raise ValueError("option must be 1, 2, or 3")
    return quadrature.gll_1d(N + 1) if option == 1 else quadrature.gauss_1d(N + 1)


def gll_rule_for_exactness(e: int):
    """Smallest GLL rule exact for degree e (an odd target is hit exactly)."""
    n = max(2, -(-(e + 3) // 2))
    return quadrature.gll_1d(n)


def gauss_rule_for_exactness(e: int):
    """Smallest Gauss rule exact for degree e (an odd target is hit exactly)."""
    n = max(1, -(-(e + 1) // 2))
    return quadrature.gauss_1d(n)


@lru_cache(maxsize=None)
def reference_operators(element_kind: str, N: int, option: int) -> ReferenceOperators:
    """Reference operators for one of the three standard quadrature options."""
    return build_reference_operators(
        element_kind,
        N,
        volume_rule_for_option(element_kind, N, option),
        face_rule_1d_for_option(N, option),
    )
