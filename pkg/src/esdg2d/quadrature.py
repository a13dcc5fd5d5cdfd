"""Quadrature rules on the line, the bi-unit quadrilateral, and the bi-unit triangle.

Conventions:
  * 1D rules live on [-1, 1].
  * The reference quadrilateral is [-1, 1]^2 (measure 4).
  * The reference triangle has vertices (-1,-1), (1,-1), (-1,1) (measure 2).
  * ``exactness`` is the total polynomial degree integrated exactly on the
    triangle, and the per-coordinate (1D) degree for tensor-product rules.

Triangle rules are collapsed-coordinate (Duffy) products of a Gauss-Legendre
rule with a Gauss-Jacobi(1,0) rule, so total-degree exactness is certified by
the 1D rules alone and no tabulated data is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jacobi

__all__ = [
    "QuadratureRule",
    "FaceRule",
    "gauss_1d",
    "gll_1d",
    "triangle_volume_rule",
    "duffy_rule",
    "composite_triangle_rule",
    "tensor_rule_2d",
    "face_rule",
    "QUAD_FACES",
    "TRI_FACES",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class QuadratureRule:
    """Points, positive weights, and certified degree of exactness."""

    points: np.ndarray  # (n,) for 1D rules, (n, 2) otherwise
    weights: np.ndarray  # (n,)
    exactness: int
    domain: str  # "line" | "quad" | "tri"

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points))
        object.__setattr__(self, "weights", _readonly(self.weights))
        if np.any(self.weights <= 0.0):
            raise ValueError("quadrature weights must be positive")

    @property
    def npoints(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class FaceRule:
    """A 1D rule lifted to one face of a reference element.

    ``weights`` are the raw 1D weights; ``normals`` carry the outward
    reference normal scaled by the face Jacobian, n^_i * J^_f.  True
    arc-length weights (summing to the face length) are
    ``weights * |normals|`` and are exposed as ``arc_weights``.
    """

    points: np.ndarray  # (n, 2) in element coordinates
    weights: np.ndarray  # (n,) raw 1D weights
    normals: np.ndarray  # (n, 2) scaled reference normals
    exactness: int

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points))
        object.__setattr__(self, "weights", _readonly(self.weights))
        object.__setattr__(self, "normals", _readonly(self.normals))

    @property
    def arc_weights(self) -> np.ndarray:
        return self.weights * np.linalg.norm(self.normals, axis=1)

    @property
    def npoints(self) -> int:
        return self.weights.shape[0]


def gauss_1d(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1]; exact for degree 2n-1."""
    if n < 1:
        raise ValueError("gauss_1d requires n >= 1")
    x, w = _jacobi.gauss_nodes_weights(n)
    return QuadratureRule(points=x, weights=w, exactness=2 * n - 1, domain="line")


def gll_1d(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre-Lobatto rule on [-1, 1]; exact for degree 2n-3."""
    if n < 2:
        raise ValueError("gll_1d requires n >= 2")
    x, w = _jacobi.lobatto_nodes_weights(n)
    return QuadratureRule(points=x, weights=w, exactness=2 * n - 3, domain="line")


def duffy_rule(n: int) -> QuadratureRule:
    """Collapsed-coordinate triangle rule with n x n points, exact for degree 2n-1.

    Built as Gauss-Legendre(n) in the collapsed coordinate times
    Gauss-Jacobi(1,0)(n) in the other, absorbing the (1-b)/2 Duffy Jacobian.
    """
    if n < 1:
        raise ValueError("duffy_rule requires n >= 1")
    xa, wa = _jacobi.gauss_nodes_weights(n)
    xb, wb = _jacobi.gauss_nodes_weights(n, alpha=1.0, beta=0.0)
    a, b = np.meshgrid(xa, xb, indexing="ij")
    x = 0.5 * (1.0 + a) * (1.0 - b) - 1.0
    y = b
    w = 0.5 * np.outer(wa, wb)
    pts = np.column_stack([x.ravel(), y.ravel()])
    return QuadratureRule(points=pts, weights=w.ravel(), exactness=2 * n - 1, domain="tri")


def triangle_volume_rule(degree: int) -> QuadratureRule:
    """Triangle rule exact for all bivariate polynomials of total degree <= degree."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    n = (degree + 1) // 2 + 1
    return duffy_rule(n)


def composite_triangle_rule(rule: QuadratureRule, levels: int = 1) -> QuadratureRule:
    """Refine a triangle rule over uniform 4-way subdivisions of the triangle.

    Polynomial exactness is preserved (each panel map is affine) while the
    point count grows by 4 per level, which keeps mass matrices full-rank for
    deliberately low-exactness rules.
    """
    if rule.domain != "tri":
        raise ValueError("composite refinement is defined for triangle rules")
    verts = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]])
    pts, wts = rule.points, rule.weights
    for _ in range(levels):
        v0, v1, v2 = verts
        m01, m12, m02 = 0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v0 + v2)
        panels = [(v0, m01, m02), (m01, v1, m12), (m02, m12, v2), (m01, m12, m02)]
        new_pts, new_wts = [], []
        lam0 = -0.5 * (pts[:, 0] + pts[:, 1])  # barycentric w.r.t. reference verts
        lam1 = 0.5 * (1.0 + pts[:, 0])
        lam2 = 0.5 * (1.0 + pts[:, 1])
        for p0, p1, p2 in panels:
            new_pts.append(np.outer(lam0, p0) + np.outer(lam1, p1) + np.outer(lam2, p2))
            new_wts.append(0.25 * wts)
        pts = np.vstack(new_pts)
        wts = np.concatenate(new_wts)
    return QuadratureRule(points=pts, weights=wts, exactness=rule.exactness, domain="tri")


def tensor_rule_2d(rule_1d: QuadratureRule) -> QuadratureRule:
    """Tensor-product rule on [-1,1]^2; exactness is the 1D degree per coordinate."""
    x = rule_1d.points
    w = rule_1d.weights
    xx, yy = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    ww = np.outer(w, w).ravel()
    return QuadratureRule(points=pts, weights=ww, exactness=rule_1d.exactness, domain="quad")


# Face tables: vertex-to-vertex parametrizations (counterclockwise) with the
# outward reference normal scaled by the face Jacobian.
QUAD_FACES = (
    {"start": (-1.0, -1.0), "end": (1.0, -1.0), "normal": (0.0, -1.0)},
    {"start": (1.0, -1.0), "end": (1.0, 1.0), "normal": (1.0, 0.0)},
    {"start": (1.0, 1.0), "end": (-1.0, 1.0), "normal": (0.0, 1.0)},
    {"start": (-1.0, 1.0), "end": (-1.0, -1.0), "normal": (-1.0, 0.0)},
)
TRI_FACES = (
    {"start": (-1.0, -1.0), "end": (1.0, -1.0), "normal": (0.0, -1.0)},
    {"start": (1.0, -1.0), "end": (-1.0, 1.0), "normal": (1.0, 1.0)},
    {"start": (-1.0, 1.0), "end": (-1.0, -1.0), "normal": (-1.0, 0.0)},
)


def face_rule(element_kind: str, face_index: int, rule_1d: QuadratureRule) -> FaceRule:
    """Lift a 1D rule onto one reference-element face.

    The returned normals are n^ * J^_f where J^_f is the 1D-parameter-to-face
    Jacobian (1 for axis-aligned faces, sqrt(2) for the triangle hypotenuse),
    so surface integrals of v n^_i are sum(w * normals[:, i] * v).
    """
    faces = {"quad": QUAD_FACES, "tri": TRI_FACES}.get(element_kind)
    if faces is None:
        raise ValueError(f"unknown element kind {element_kind!r}")
    if not 0 <= face_index < len(faces):
        raise ValueError(f"face index {face_index} invalid for {element_kind!r}")
    f = faces[face_index]
    start = np.asarray(f["start"])
    end = np.asarray(f["end"])
    r = rule_1d.points
    pts = start[None, :] + 0.5 * (r[:, None] + 1.0) * (end - start)[None, :]
    normals = np.tile(np.asarray(f["normal"]), (len(r), 1))
    return FaceRule(points=pts, weights=rule_1d.weights, normals=normals, exactness=rule_1d.exactness)
