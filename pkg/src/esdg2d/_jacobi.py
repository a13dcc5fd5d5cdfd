"""Orthonormal Jacobi polynomials: recurrences, evaluation, and Gauss nodes.

All polynomials are orthonormal with respect to the weight
(1-x)^alpha (1+x)^beta on [-1, 1].  Nodes of the Gauss rules are computed
from the symmetric Jacobi matrix (Golub-Welsch) and then polished by Newton
iteration on the three-term recurrence to a tolerance of 1e-15.
"""

from __future__ import annotations

import numpy as np
from math import lgamma

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


def _log_beta(a: float, b: float) -> float:
    return lgamma(a) + lgamma(b) - lgamma(a + b)


def recurrence(n: int, alpha: float, beta: float):
    """Coefficients (a_k, sqrt(b_k)) of the symmetric three-term recurrence.

    With p_{-1} = 0 and p_0 = 1/sqrt(b_0), the orthonormal polynomials satisfy
        sqrt(b_{k+1}) p_{k+1}(x) = (x - a_k) p_k(x) - sqrt(b_k) p_{k-1}(x).
    Returns arrays a[0..n], sqrtb[0..n+1] with b_0 the total weight mass.
    """
    ab = alpha + beta
    k = np.arange(n + 2, dtype=float)
    a = np.zeros(n + 1)
    b = np.zeros(n + 2)
    b[0] = 2.0 ** (ab + 1.0) * np.exp(_log_beta(alpha + 1.0, beta + 1.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0)
        a_all = (beta**2 - alpha**2) / denom
    if ab == 0.0:
        a_all[0] = 0.0
    else:
        a_all[0] = (beta - alpha) / (ab + 2.0)
    a[:] = a_all[: n + 1]
    kk = k[1:]
    b[1:] = (
        4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
        / ((2.0 * kk + ab) ** 2 * (2.0 * kk + ab + 1.0) * (2.0 * kk + ab - 1.0))
    )
    return a, np.sqrt(b)


def eval_orthonormal(x, nmax: int, alpha: float = 0.0, beta: float = 0.0):
    """Values of the orthonormal Jacobi polynomials of degree 0..nmax at x.

    Returns an array of shape x.shape + (nmax+1,).
    """
    x = np.asarray(x, dtype=float)
    a, sb = recurrence(nmax, alpha, beta)
    out = np.empty(x.shape + (nmax + 1,))
    pkm1 = np.zeros_like(x)
    pk = np.full_like(x, 1.0 / sb[0])
    out[..., 0] = pk
    for k in range(nmax):
        pkp1 = ((x - a[k]) * pk - sb[k] * pkm1) / sb[k + 1]
        pkm1, pk = pk, pkp1
        out[..., k + 1] = pk
    return out


def eval_orthonormal_deriv(x, nmax: int, alpha: float = 0.0, beta: float = 0.0):
    """Values and first derivatives of orthonormal Jacobi polynomials 0..nmax."""
    x = np.asarray(x, dtype=float)
    a, sb = recurrence(nmax, alpha, beta)
    vals = np.empty(x.shape + (nmax + 1,))
    ders = np.empty(x.shape + (nmax + 1,))
    pkm1 = np.zeros_like(x)
    dkm1 = np.zeros_like(x)
    pk = np.full_like(x, 1.0 / sb[0])
    dk = np.zeros_like(x)
    vals[..., 0] = pk
    ders[..., 0] = dk
    for k in range(nmax):
        pkp1 = ((x - a[k]) * pk - sb[k] * pkm1) / sb[k + 1]
        dkp1 = (pk + (x - a[k]) * dk - sb[k] * dkm1) / sb[k + 1]
        pkm1, pk = pk, pkp1
        dkm1, dk = dk, dkp1
        vals[..., k + 1] = pk
        ders[..., k + 1] = dk
    return vals, ders


def gauss_nodes_weights(n: int, alpha: float = 0.0, beta: float = 0.0):
    """n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta.

    Eigenvalues of the Jacobi matrix seed a Newton polish of the nodes; the
    weights come from the Christoffel function 1/sum_k p_k(x)^2, which is
    exact for the polished nodes.
    """
    if n < 1:
        raise ValueError("Gauss rule needs at least one point")
    a, sb = recurrence(n, alpha, beta)
    if n == 1:
        x = np.array([a[0]])
    else:
        jac = np.diag(a[:n]) + np.diag(sb[1:n], 1) + np.diag(sb[1:n], -1)
        x = np.linalg.eigvalsh(jac)
    for _ in range(_NEWTON_MAXIT):
        vals, ders = eval_orthonormal_deriv(x, n, alpha, beta)
        step = vals[:, n] / ders[:, n]
        x = x - step
        if np.max(np.abs(step)) < _NEWTON_TOL:
            break
    vals = eval_orthonormal(x, n - 1, alpha, beta)
    w = 1.0 / np.sum(vals * vals, axis=-1)
    order = np.argsort(x)
    return x[order], w[order]


def legendre_standard(x, nmax: int):
    """Standard (unnormalized) Legendre polynomials P_0..P_nmax at x."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (nmax + 1,))
    out[..., 0] = 1.0
    if nmax >= 1:
        out[..., 1] = x
    for k in range(1, nmax):
        out[..., k + 1] = ((2 * k + 1) * x * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def lobatto_nodes_weights(n: int):
    """n-point Gauss-Lobatto-Legendre rule (endpoints included), n >= 2.

    Interior nodes are the roots of P'_{n-1}, located as the Gauss-Jacobi(1,1)
    nodes of degree n-2 and Newton-polished; weights are 2/(n(n-1) P_{n-1}^2).
    """
    if n < 2:
        raise ValueError("Lobatto rule needs at least two points")
    if n == 2:
        x = np.array([-1.0, 1.0])
    else:
        xi, _ = gauss_nodes_weights(n - 2, 1.0, 1.0)
        # polish on P'_{n-1} directly: P'' from the Legendre ODE
        for _ in range(_NEWTON_MAXIT):
            p = legendre_standard(xi, n - 1)
            pn, pnm1 = p[:, n - 1], p[:, n - 2]
            dp = (n - 1) * (xi * pn - pnm1) / (xi**2 - 1.0)
            d2p = (2.0 * xi * dp - (n - 1) * n * pn) / (1.0 - xi**2)
            step = dp / d2p
            xi = xi - step
            if np.max(np.abs(step)) < _NEWTON_TOL:
                break
        x = np.concatenate(([-1.0], np.sort(xi), [1.0]))
    pn = legendre_standard(x, n - 1)[:, n - 1]
    w = 2.0 / (n * (n - 1) * pn**2)
    return x, w
