"""Pair-list setup shared by the compiled and pure-Python flux-differencing kernels.

The volume term of the split-form residual is, per element and output point m,

    r_m = sum_n sum_j (G_ij(m) + G_ij(n)) * Qt^j[m, n] * f_S^i(u_m, u_n)

summed over directions i, where Qt^j are the (shared) skew-hybridized
reference operators and G holds the geometric terms at all volume+surface
points.  Because f_S is symmetric, each unordered pair (m, n) needs a single
flux evaluation.  The pair list enumerates m <= n and skips entries where all
four operator values Qt^j[m, n], Qt^j[n, m] are exactly zero (the face-face
off-diagonal block and the diagonal of the skew part vanish identically by
construction, so skipping them cannot change the result).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FluxDiffPattern", "build_pattern", "primitive_table"]


@dataclass(frozen=True)
class FluxDiffPattern:
    """Sparse unordered-pair representation of a pair of Nt x Nt operators."""

    npoints: int
    im: np.ndarray  # (P,) int32, im <= inn
    inn: np.ndarray
    q1mn: np.ndarray  # Qt^1[m, n]
    q1nm: np.ndarray  # Qt^1[n, m]
    q2mn: np.ndarray
    q2nm: np.ndarray
    # reduceat machinery for the vectorized NumPy backend
    m_unique: np.ndarray
    m_starts: np.ndarray
    n_order: np.ndarray  # permutation of off-diagonal pairs, sorted by inn
    n_unique: np.ndarray
    n_starts: np.ndarray
    offdiag: np.ndarray  # bool mask of pairs with im != inn

    @property
    def npairs(self) -> int:
        return self.im.shape[0]


def build_pattern(q1: np.ndarray, q2: np.ndarray) -> FluxDiffPattern:
    """Enumerate the unordered point pairs with any exactly-nonzero operator entry."""
    nt = q1.shape[0]
    nonzero = (q1 != 0.0) | (q1.T != 0.0) | (q2 != 0.0) | (q2.T != 0.0)
    iu, ju = np.triu_indices(nt)
    keep = nonzero[iu, ju]
    im = iu[keep].astype(np.int32)
    inn = ju[keep].astype(np.int32)
    # pairs arrive sorted by im (triu order)
    m_unique, m_starts = np.unique(im, return_index=True)
    offdiag = im != inn
    off_idx = np.nonzero(offdiag)[0]
    n_order = off_idx[np.argsort(inn[off_idx], kind="stable")]
    n_sorted = inn[n_order]
    n_unique, n_starts = np.unique(n_sorted, return_index=True)
    return FluxDiffPattern(
        npoints=nt,
        im=im,
        inn=inn,
        q1mn=np.ascontiguousarray(q1[im, inn]),
        q1nm=np.ascontiguousarray(q1[inn, im]),
        q2mn=np.ascontiguousarray(q2[im, inn]),
        q2nm=np.ascontiguousarray(q2[inn, im]),
        m_unique=m_unique.astype(np.int64),
        m_starts=m_starts.astype(np.int64),
        n_order=n_order.astype(np.int64),
        n_unique=n_unique.astype(np.int64),
        n_starts=n_starts.astype(np.int64),
        offdiag=offdiag,
    )


def primitive_table(u: np.ndarray, gamma: float) -> np.ndarray:
    """Per-point quantities consumed by the two-point flux kernels.

    Columns: rho, velocity-x, velocity-y, beta = rho/(2p), log(rho), log(beta).
    Precomputing the logarithms removes all transcendentals from the pair loop.
    """
    rho = u[..., 0]
    vx = u[..., 1] / rho
    vy = u[..., 2] / rho
    p = (gamma - 1.0) * (u[..., 3] - 0.5 * rho * (vx**2 + vy**2))
    beta = 0.5 * rho / p
    out = np.empty(u.shape[:-1] + (6,))
    out[..., 0] = rho
    out[..., 1] = vx
    out[..., 2] = vy
    out[..., 3] = beta
    out[..., 4] = np.log(rho)
    out[..., 5] = np.log(beta)
    return out
