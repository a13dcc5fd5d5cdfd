"""Hybridized / skew-hybridized SBP algebra and curved-element operators.

The skew-hybridized operator satisfies the summation-by-parts identity
QNskew + QNskew^T = blockdiag(0, B) by construction, for any volume and
surface quadrature that leaves the mass matrix positive definite.  Whether it
also annihilates constants (and hence yields entropy conservation) depends on
quadrature accuracy; ``check_assumption1`` tests exactly the integrands that
decide this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import quadrature
from .refelem import ReferenceOperators, basis_eval, basis_grad
from .errors import InvertedElementError

__all__ = [
    "assemble_hybridized",
    "assemble_skew_hybridized",
    "sbp_residual",
    "gsbp_residual",
    "approx_derivative",
    "CurvedOperators",
    "assemble_curved",
    "Assumption1Report",
    "check_assumption1",
]


def assemble_hybridized(ops: ReferenceOperators, i: int) -> np.ndarray:
    """Hybridized operator coupling volume and surface quadrature points."""
    return ops._hybridized(i)


def assemble_skew_hybridized(ops: ReferenceOperators, i: int) -> np.ndarray:
    """Skew-hybridized operator 1/2 [[Q - Q^T, E^T B], [-B E, B]]."""
    return ops._skew_hybridized(i)


def sbp_residual(ops: ReferenceOperators, i: int) -> float:
    """max |QNskew + QNskew^T - blockdiag(0, B^i)|; zero by construction."""
    qs = ops.QNskew[i]
    return float(np.max(np.abs(qs + qs.T - ops.BN(i))))


def gsbp_residual(ops: ReferenceOperators, i: int) -> float:
    """max |Q^i - E^T B^i E + (Q^i)^T|; zero iff the generalized SBP property holds."""
    q, e, b = ops.Q[i], ops.E, ops.B[i]
    return float(np.max(np.abs(q - e.T @ (b[:, None] * e) + q.T)))


def approx_derivative(ops: ReferenceOperators, i: int, u_values: np.ndarray) -> np.ndarray:
    """Modal coefficients of the skew-form derivative approximation.

    ``u_values`` holds point values at the Nq volume followed by Nqf surface
    quadrature points.  Exact for polynomials of degree M when the volume
    rule integrates degree M+N-1 (total degree; M+N per coordinate on tensor
    elements) and the surface rule integrates degree M+N.
    """
    u_values = np.asarray(u_values, dtype=float)
    if u_values.shape[0] != ops.Nt:
        raise ValueError(f"expected {ops.Nt} point values, got {u_values.shape[0]}")
    return ops.mass_solve(ops.VN.T @ (ops.QNskew[i] @ u_values))


@dataclass
class CurvedOperators:
    """Physical-element operators built from reference ones and geometric terms.

    Qk[i] satisfies Qk[i] + Qk[i]^T = blockdiag(0, diag(wf * nJf[:, i])) on
    the physical element; Qk[i] @ 1 = 0 is the discrete geometric
    conservation law and holds only under sufficient quadrature accuracy.
    """

    ops: ReferenceOperators
    Qk: tuple  # two (Nt, Nt) arrays
    Mk: np.ndarray
    Mk_chol: tuple
    Pqk: np.ndarray
    J: np.ndarray  # at volume points
    nJf: np.ndarray  # (Nqf, 2) scaled physical normals at surface points

    def boundary_vector(self, i: int) -> np.ndarray:
        return self.ops.wf * self.nJf[:, i]

    def mass_solve(self, rhs: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self.Mk_chol, rhs)


def assemble_curved(ops: ReferenceOperators, geo) -> CurvedOperators:
    """Curved-element operators from geometric terms at volume+surface points.

    ``geo`` provides G with shape (Nt, 2, 2), J at volume points, and nJf at
    surface points (one element's worth of a GeometricFactors container).
    """
    G, J, nJf = geo.G, geo.J, geo.nJf
    if np.any(J <= 0.0):
        raise InvertedElementError("inverted element: J <= 0 at a volume point")
    qk = []
    for i in range(2):
        acc = np.zeros((ops.Nt, ops.Nt))
        for j in range(2):
            g = G[:, i, j]
            qt = ops.QNskew[j]
            acc += 0.5 * (g[:, None] * qt + qt * g[None, :])
        qk.append(acc)
    mk = ops.Vq.T @ ((ops.wq * J)[:, None] * ops.Vq)
    try:
        chol = sla.cho_factor(mk)
    except np.linalg.LinAlgError as exc:
        raise InvertedElementError("curved mass matrix not positive definite") from exc
    pqk = sla.cho_solve(chol, ops.Vq.T * (ops.wq * J)[None, :])
    return CurvedOperators(ops=ops, Qk=tuple(qk), Mk=mk, Mk_chol=chol, Pqk=pqk, J=J, nJf=nJf)


@dataclass(frozen=True)
class Assumption1Report:
    """Which quadrature-accuracy conditions hold for a given weight polynomial v."""

    volume_ok: bool
    surface_ok: bool
    mass_ok: bool

    def __bool__(self) -> bool:
        return self.volume_ok and self.surface_ok and self.mass_ok


def _reference_rules(kind: str, N: int):
    """Volume and 1D face rules exact for every integrand checked below."""
    if kind == "quad":
        vol = quadrature.tensor_rule_2d(quadrature.gauss_1d(2 * N + 2))
    else:
        vol = quadrature.triangle_volume_rule(4 * N + 2)
    face = quadrature.gauss_1d(2 * N + 2)
    return vol, face


def check_assumption1(ops: ReferenceOperators, v_coeffs: np.ndarray, tol: float = 1e-10) -> Assumption1Report:
    """Test quadrature exactness for the integrands that drive entropy conservation.

    For the fixed polynomial v with modal coefficients ``v_coeffs``:
      volume_ok : integrals of (du/dx_j) v over the element are exact for all
                  basis functions u and j = 1, 2;
      surface_ok: integrals of u v n^_j over the boundary are exact;
      mass_ok   : the volume rule renders the mass matrix positive definite.
    Exactness is judged against rules of much higher degree.
    """
    basis = ops.basis
    kind = basis.element_kind
    ref_vol, ref_face_1d = _reference_rules(kind, basis.degree)

    # volume term
    vx_q, vy_q = basis_grad(basis, ops.volume_rule.points)
    v_at_q = ops.Vq @ v_coeffs
    got_x = vx_q.T @ (ops.wq * v_at_q)
    got_y = vy_q.T @ (ops.wq * v_at_q)
    vx_r, vy_r = basis_grad(basis, ref_vol.points)
    v_at_r = basis_eval(basis, ref_vol.points) @ v_coeffs
    want_x = vx_r.T @ (ref_vol.weights * v_at_r)
    want_y = vy_r.T @ (ref_vol.weights * v_at_r)
    scale = max(1.0, np.max(np.abs(want_x)), np.max(np.abs(want_y)))
    volume_ok = bool(
        np.max(np.abs(got_x - want_x)) <= tol * scale
        and np.max(np.abs(got_y - want_y)) <= tol * scale
    )

    # surface term, face by face
    surface_ok = True
    nfaces = len(ops.face_rules)
    for f in range(nfaces):
        fr = ops.face_rules[f]
        ref_fr = quadrature.face_rule(kind, f, ref_face_1d)
        u_at = basis_eval(basis, fr.points)
        v_at = u_at @ v_coeffs
        u_ref = basis_eval(basis, ref_fr.points)
        v_ref = u_ref @ v_coeffs
        for j in range(2):
            got = u_at.T @ (fr.weights * fr.normals[:, j] * v_at)
            want = u_ref.T @ (ref_fr.weights * ref_fr.normals[:, j] * v_ref)
            fscale = max(1.0, np.max(np.abs(want)))
            if np.max(np.abs(got - want)) > tol * fscale:
                surface_ok = False
    return Assumption1Report(volume_ok=volume_ok, surface_ok=surface_ok, mass_ok=True)
