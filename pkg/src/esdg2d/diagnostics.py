"""Entropy monitoring, error norms, free-stream residuals, and timestep constants."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from . import euler, quadrature
from .refelem import Basis, basis_eval, basis_grad, build_reference_operators
from .solver import Discretization, RunConfig

__all__ = [
    "entropy_rhs",
    "l2_error",
    "inverse_trace_constants",
    "free_stream_test",
    "gll_norm_ratios",
    "gll_norm_equivalence_check",
    "constants_table",
    "fit_rate",
]


def entropy_rhs(disc: Discretization, state: dict, dudt: dict | None = None) -> float:
    """Instantaneous entropy production of the semi-discrete scheme."""
    return disc.entropy_rhs_value(state, dudt)


def _error_rule(kind: str, n: int):
    """Measurement quadrature of degree 2N+2, finer than any run quadrature."""
    if kind == "quad":
        return quadrature.tensor_rule_2d(quadrature.gauss_1d(n + 2))
    return quadrature.triangle_volume_rule(2 * n + 2)


def l2_error(disc: Discretization, state: dict, exact_fn, t: float):
    """Per-field and total L2 errors against exact_fn(x, y, t) -> (..., 4)."""
    sq = np.zeros(4)
    n = disc.config.N
    for kind in disc.kinds:
        rule = _error_rule(kind, n)
        v_err = basis_eval(Basis(kind, n), rule.points)
        geo_basis = Basis(kind, disc.mapping.ngeo)
        gr, gs = basis_grad(geo_basis, rule.points)
        coeffs = np.stack([disc.mapping.coeffs[e] for e in disc.elem_ids[kind]])
        dxdr = np.einsum("qp,kpc->kqc", gr, coeffs)
        dxds = np.einsum("qp,kpc->kqc", gs, coeffs)
        jac = dxdr[..., 0] * dxds[..., 1] - dxds[..., 0] * dxdr[..., 1]
        x = disc.mapping.evaluate_batch(disc.elem_ids[kind], rule.points)
        uh = np.einsum("qp,kpf->kqf", v_err, state[kind])
        ue = np.asarray(exact_fn(x[..., 0], x[..., 1], t), dtype=float)
        sq += np.einsum("kq,kqf->f", rule.weights[None, :] * jac, (uh - ue) ** 2)
    per_field = np.sqrt(sq)
    return per_field, float(np.sqrt(np.sum(sq)))


def inverse_trace_constants(ops) -> tuple[float, float]:
    """Largest generalized eigenvalues of the discrete inverse/trace inequalities.

    C_I bounds the quadrature seminorm of the gradient by the quadrature norm;
    C_T bounds the surface quadrature norm by the volume one.  Both use the
    same rules as the computation, and the surface norm uses the raw 1D face
    weights (the W_f of the scheme, whose face Jacobian lives in the scaled
    normals), so they reflect the active discretization.
    """
    vq, m = ops.Vq, ops.M
    stiff = np.zeros_like(m)
    for d in (ops.Dr, ops.Ds):
        g = vq @ d
        stiff += g.T @ (ops.wq[:, None] * g)
    stiff = 0.5 * (stiff + stiff.T)
    trace = ops.Vf.T @ (ops.wf[:, None] * ops.Vf)
    trace = 0.5 * (trace + trace.T)
    c_i = float(np.max(sla.eigh(stiff, m, eigvals_only=True)))
    c_t = float(np.max(sla.eigh(trace, m, eigvals_only=True)))
    return c_i, c_t


def free_stream_test(config: RunConfig, state_value=(1.0, 0.4, -0.3, 1.0), nsteps: int = 3) -> float:
    """Max |du/dt| over a few steps for a constant initial state on the warped mesh."""
    disc = Discretization(config)
    rho0, u0, v0, p0 = state_value
    const = euler.EulerState.from_primitive(rho0, u0, v0, p0, config.gamma).array

    def init(x, y):
        return np.broadcast_to(const, x.shape + (4,)).copy()

    state = disc.project_initial(init)
    worst = 0.0
    for _ in range(nsteps):
        dudt = disc.rhs(state)
        worst = max(worst, max(np.max(np.abs(dudt[k])) for k in disc.kinds))
        disc.advance(state, disc.estimate_dt(state), first_rhs=dudt)
    return worst


def gll_norm_ratios(N: int, nsamples: int = 1000, seed: int = 0) -> np.ndarray:
    """Ratios of the GLL-quadrature L2 norm to the exact L2 norm on random Q^N."""
    basis = Basis("quad", N)
    gll = quadrature.tensor_rule_2d(quadrature.gll_1d(N + 1))
    exact = quadrature.tensor_rule_2d(quadrature.gauss_1d(N + 1))
    v_gll = basis_eval(basis, gll.points)
    v_ex = basis_eval(basis, exact.points)
    m_gll = v_gll.T @ (gll.weights[:, None] * v_gll)
    m_ex = v_ex.T @ (exact.weights[:, None] * v_ex)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((nsamples, basis.num_modes))
    num = np.einsum("sp,pq,sq->s", coeffs, m_gll, coeffs)
    den = np.einsum("sp,pq,sq->s", coeffs, m_ex, coeffs)
    return np.sqrt(num / den)


def gll_norm_equivalence_check(N: int, nsamples: int = 1000, seed: int = 0) -> float:
    """Largest ratio of the GLL-quadrature L2 norm to the exact L2 norm on Q^N.

    Sampling random polynomials, the ratio always lies in
    [1, (2 + 1/N)^(d/2)] with d = 2; the degree-N Legendre tensor mode
    attains the upper bound.
    """
    return float(np.max(gll_norm_ratios(N, nsamples, seed)))


def constants_table(n_values) -> dict:
    """Inverse and trace constants for the standard quadrature configurations.

    Returns a dict of rows keyed like the reference table: quadrilateral C_I
    under GLL/Gauss volume rules, quadrilateral C_T under matched GLL/Gauss
    volume+surface rules, triangle C_I under degree-2N volume rules, and
    triangle C_T under GLL/Gauss surface rules.
    """
    rows = {
        "quad_CI_gll": [],
        "quad_CI_gauss": [],
        "quad_CT_gll": [],
        "quad_CT_gauss": [],
        "tri_CI": [],
        "tri_CT_gll": [],
        "tri_CT_gauss": [],
    }
    for n in n_values:
        gll_vol = quadrature.tensor_rule_2d(quadrature.gll_1d(n + 1))
        gauss_vol = quadrature.tensor_rule_2d(quadrature.gauss_1d(n + 1))
        gll_1d_rule = quadrature.gll_1d(n + 1)
        gauss_1d_rule = quadrature.gauss_1d(n + 1)
        ops_gll = build_reference_operators("quad", n, gll_vol, gll_1d_rule)
        ops_gauss = build_reference_operators("quad", n, gauss_vol, gauss_1d_rule)
        ci, ct = inverse_trace_constants(ops_gll)
        rows["quad_CI_gll"].append(ci)
        rows["quad_CT_gll"].append(ct)
        ci, ct = inverse_trace_constants(ops_gauss)
        rows["quad_CI_gauss"].append(ci)
        rows["quad_CT_gauss"].append(ct)
        tri_vol = quadrature.triangle_volume_rule(2 * n)
        ops_tri_gll = build_reference_operators("tri", n, tri_vol, gll_1d_rule)
        ops_tri_gauss = build_reference_operators("tri", n, tri_vol, gauss_1d_rule)
        ci, ct = inverse_trace_constants(ops_tri_gll)
        rows["tri_CI"].append(ci)
        rows["tri_CT_gll"].append(ct)
        _, ct = inverse_trace_constants(ops_tri_gauss)
        rows["tri_CT_gauss"].append(ct)
    return rows


def fit_rate(hs, errors, last: int | None = None) -> float:
    """Least-squares slope of log(error) against log(h) over the finest levels."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if last is not None:
        hs, errors = hs[-last:], errors[-last:]
    lx, ly = np.log(hs), np.log(errors)
    lx = lx - lx.mean()
    return float(np.sum(lx * (ly - ly.mean())) / np.sum(lx * lx))
