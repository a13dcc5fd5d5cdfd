"""Pure-NumPy flux-differencing kernel (fallback when the extension is absent).

Same pair-list semantics as the compiled kernel: one symmetric two-point flux
evaluation per unordered pair, scattered to both endpoints with
direction-dependent geometric weights.  Scatter uses ``add.reduceat`` over
pair runs, so the whole element batch is evaluated with array operations.
"""

from __future__ import annotations

import numpy as np

from .patterns import FluxDiffPattern

__all__ = ["flux_diff_accumulate"]

_SERIES_CUT = 1.0e-4


def _log_mean_pair(a, b, la, lb):
    s = a + b
    zeta2 = ((a - b) / s) ** 2
    series = 0.5 * s / (1.0 + zeta2 * (1.0 / 3.0 + zeta2 * (1.0 / 5.0 + zeta2 / 7.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (a - b) / (la - lb)
    return np.where(zeta2 < _SERIES_CUT, series, direct)


def flux_diff_accumulate(
    prim: np.ndarray,  # (K, Nt, 6)
    geo: np.ndarray,  # (K, Nt, 4) rows of G: [G11, G12, G21, G22]
    pattern: FluxDiffPattern,
    gamma: float,
    out: np.ndarray,  # (K, Nt, 4), accumulated in place
    threads: int = 1,
) -> None:
    im, inn = pattern.im, pattern.inn
    pm = prim[:, im, :]
    pn = prim[:, inn, :]
    gm = geo[:, im, :]
    gn = geo[:, inn, :]

    rlog = _log_mean_pair(pm[..., 0], pn[..., 0], pm[..., 4], pn[..., 4])
    blog = _log_mean_pair(pm[..., 3], pn[..., 3], pm[..., 5], pn[..., 5])
    ra = 0.5 * (pm[..., 0] + pn[..., 0])
    ba = 0.5 * (pm[..., 3] + pn[..., 3])
    ua = 0.5 * (pm[..., 1] + pn[..., 1])
    va = 0.5 * (pm[..., 2] + pn[..., 2])
    p_avg = 0.5 * ra / ba
    vel2 = pm[..., 1] * pn[..., 1] + pm[..., 2] * pn[..., 2]
    e_avg = rlog / (2.0 * blog * (gamma - 1.0)) + 0.5 * rlog * vel2

    f1x = rlog * ua
    f1y = rlog * va
    fx = np.stack([f1x, f1x * ua + p_avg, f1y * ua, (e_avg + p_avg) * ua], axis=-1)
    fy = np.stack([f1y, f1y * ua, f1y * va + p_avg, (e_avg + p_avg) * va], axis=-1)

    gsum = gm + gn  # (K, P, 4): [G11m+G11n, G12m+G12n, G21m+G21n, G22m+G22n]
    w1m = gsum[..., 0] * pattern.q1mn + gsum[..., 1] * pattern.q2mn
    w2m = gsum[..., 2] * pattern.q1mn + gsum[..., 3] * pattern.q2mn
    contrib_m = w1m[..., None] * fx + w2m[..., None] * fy
    out[:, pattern.m_unique, :] += np.add.reduceat(contrib_m, pattern.m_starts, axis=1)

    order = pattern.n_order
    w1n = gsum[..., 0] * pattern.q1nm + gsum[..., 1] * pattern.q2nm
    w2n = gsum[..., 2] * pattern.q1nm + gsum[..., 3] * pattern.q2nm
    contrib_n = (w1n[..., None] * fx + w2n[..., None] * fy)[:, order, :]
    out[:, pattern.n_unique, :] += np.add.reduceat(contrib_n, pattern.n_starts, axis=1)
