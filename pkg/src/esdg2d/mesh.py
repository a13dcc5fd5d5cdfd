"""Uniform periodic 2D meshes (triangular, quadrilateral, hybrid), curvilinear
warping, and geometric factors.

Mesh layout: the rectangle is split into nx x ny cells.  A "quad" mesh keeps
every cell; a "tri" mesh splits each cell into two triangles along the
bottom-left to top-right diagonal; a "hybrid" mesh keeps quads on the left
half of the columns and splits the right half.  All boundaries are periodic.

Geometry of degree Ngeo is represented per element by modal coefficients of
an interpolant through equispaced mapping nodes.  Equispaced nodes restrict
to the same 1D set on every (possibly shared) edge, which keeps curved hybrid
interfaces watertight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .refelem import Basis, basis_eval, basis_grad
from .errors import InvertedElementError

__all__ = [
    "MeshTopology",
    "build_uniform_mesh",
    "CurvedMapping",
    "warp_mesh",
    "GeometricFactors",
    "geometric_factors",
    "mesh_dump",
]


@dataclass
class MeshTopology:
    """Element/vertex lists plus periodic face adjacency.

    ``neighbors[e][f]`` is the (element, face) across face f of element e;
    ``shifts[e][f]`` is the translation to add to the neighbor's coordinates
    so they land on this element's face (nonzero across periodic wraps).
    """

    domain: tuple
    nx: int
    ny: int
    vertices: np.ndarray  # (Nv, 2)
    elements: list  # per element: tuple of vertex indices (3 or 4), CCW
    kinds: list  # per element: "tri" | "quad"
    neighbors: list  # per element: list of (nbr_elem, nbr_face)
    shifts: list  # per element: list of (2,) arrays

    @property
    def num_elements(self) -> int:
        return len(self.elements)

    def element_vertices(self, e: int) -> np.ndarray:
        return self.vertices[list(self.elements[e])]

    def check_adjacency(self):
        """Every face must be paired reciprocally with an opposite shift."""
        for e, nbrs in enumerate(self.neighbors):
            for f, (ne, nf) in enumerate(nbrs):
                back = self.neighbors[ne][nf]
                if back != (e, f):
                    raise AssertionError(f"face ({e},{f}) not reciprocal: {back}")
                if not np.allclose(self.shifts[ne][nf], -self.shifts[e][f]):
                    raise AssertionError(f"shift mismatch on face ({e},{f})")


def build_uniform_mesh(kind: str, nx: int, ny: int, domain) -> MeshTopology:
    """Structured periodic mesh of quads, triangles, or the hybrid pattern."""
    if kind not in ("quad", "tri", "hybrid"):
        raise ValueError(f"unknown mesh kind {kind!r}")
    if nx < 1 or ny < 1:
        raise ValueError("nx and ny must be at least 1")
    x0, x1, y0, y1 = map(float, domain)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate domain")
    lx, ly = x1 - x0, y1 - y0

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    vid = lambda i, j: j * (nx + 1) + i
    verts = np.array([[xs[i], ys[j]] for j in range(ny + 1) for i in range(nx + 1)])

    def cell_is_quad(i: int) -> bool:
        if kind == "quad":
            return True
        if kind == "tri":
            return False
        return i < nx // 2

    elements, kinds = [], []
    # per cell: map side label -> (element, face)
    sides = {}
    for j in range(ny):
        for i in range(nx):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v11, v01 = vid(i + 1, j + 1), vid(i, j + 1)
            if cell_is_quad(i):
                e = len(elements)
                elements.append((v00, v10, v11, v01))
                kinds.append("quad")
                sides[i, j] = {"B": (e, 0), "R": (e, 1), "T": (e, 2), "L": (e, 3)}
            else:
                lo = len(elements)
                elements.append((v00, v10, v11))  # lower: faces B, R, diagonal
                kinds.append("tri")
                up = len(elements)
                elements.append((v00, v11, v01))  # upper: faces diagonal, T, L
                kinds.append("tri")
                sides[i, j] = {
                    "B": (lo, 0),
                    "R": (lo, 1),
                    "T": (up, 1),
                    "L": (up, 2),
                    "_diag": ((lo, 2), (up, 0)),
                }

    neighbors = [[None] * (4 if k == "quad" else 3) for k in kinds]
    shifts = [[None] * (4 if k == "quad" else 3) for k in kinds]

    def pair(a, b, shift_ab):
        (ea, fa), (eb, fb) = a, b
        neighbors[ea][fa] = (eb, fb)
        neighbors[eb][fb] = (ea, fa)
        shifts[ea][fa] = np.asarray(shift_ab, dtype=float)
        shifts[eb][fb] = -np.asarray(shift_ab, dtype=float)

    for j in range(ny):
        for i in range(nx):
            s = sides[i, j]
            if "_diag" in s:
                pair(s["_diag"][0], s["_diag"][1], (0.0, 0.0))
            # right neighbor (periodic wrap in x)
            i2 = (i + 1) % nx
            wrap_x = lx if i + 1 == nx else 0.0
            pair(s["R"], sides[i2, j]["L"], (wrap_x, 0.0))
            # top neighbor (periodic wrap in y)
            j2 = (j + 1) % ny
            wrap_y = ly if j + 1 == ny else 0.0
            pair(s["T"], sides[i, j2]["B"], (0.0, wrap_y))

    mesh = MeshTopology(
        domain=(x0, x1, y0, y1),
        nx=nx,
        ny=ny,
        vertices=verts,
        elements=elements,
        kinds=kinds,
        neighbors=neighbors,
        shifts=shifts,
    )
    mesh.check_adjacency()
    return mesh


@lru_cache(maxsize=None)
def _mapping_nodes(kind: str, ngeo: int):
    """Equispaced degree-ngeo interpolation nodes and inverse Vandermonde."""
    if ngeo < 1:
        raise ValueError("mapping degree must be at least 1")
    pts_1d = np.linspace(-1.0, 1.0, ngeo + 1)
    if kind == "quad":
        rr, ss = np.meshgrid(pts_1d, pts_1d, indexing="ij")
        nodes = np.column_stack([rr.ravel(), ss.ravel()])
    else:
        nodes = np.array(
            [(pts_1d[i], pts_1d[j]) for i in range(ngeo + 1) for j in range(ngeo + 1 - i)]
        )
    v = basis_eval(Basis(kind, ngeo), nodes)
    return nodes, np.linalg.inv(v)


def _straight_map(kind: str, verts: np.ndarray, ref_pts: np.ndarray) -> np.ndarray:
    r, s = ref_pts[:, 0], ref_pts[:, 1]
    if kind == "quad":
        sh = np.stack(
            [
                0.25 * (1 - r) * (1 - s),
                0.25 * (1 + r) * (1 - s),
                0.25 * (1 + r) * (1 + s),
                0.25 * (1 - r) * (1 + s),
            ],
            axis=1,
        )
    else:
        sh = np.stack([-0.5 * (r + s), 0.5 * (1 + r), 0.5 * (1 + s)], axis=1)
    return sh @ verts


@dataclass
class CurvedMapping:
    """Degree-ngeo polynomial geometry for every element of a mesh."""

    mesh: MeshTopology
    ngeo: int
    alpha: float
    coeffs: list  # per element: (Np_geo, 2) modal coefficients

    def evaluate(self, e: int, ref_pts: np.ndarray) -> np.ndarray:
        return basis_eval(Basis(self.mesh.kinds[e], self.ngeo), ref_pts) @ self.coeffs[e]

    def evaluate_batch(self, elem_ids, ref_pts: np.ndarray) -> np.ndarray:
        kind = self.mesh.kinds[elem_ids[0]]
        v = basis_eval(Basis(kind, self.ngeo), ref_pts)
        c = np.stack([self.coeffs[e] for e in elem_ids])
        return np.einsum("qp,kpc->kqc", v, c)


def _warp_points(pts: np.ndarray, alpha: float, domain) -> np.ndarray:
    """Smooth warp applied in domain-rescaled coordinates on [-1, 1]^2."""
    x0, x1, y0, y1 = domain
    xi = 2.0 * (pts[:, 0] - x0) / (x1 - x0) - 1.0
    eta = 2.0 * (pts[:, 1] - y0) / (y1 - y0) - 1.0
    xi_w = xi + alpha * np.cos(0.5 * np.pi * xi) * np.sin(np.pi * eta)
    eta_w = eta + alpha * np.sin(np.pi * xi) * np.cos(0.5 * np.pi * eta)
    out = np.empty_like(pts)
    out[:, 0] = x0 + 0.5 * (xi_w + 1.0) * (x1 - x0)
    out[:, 1] = y0 + 0.5 * (eta_w + 1.0) * (y1 - y0)
    return out


def warp_mesh(mesh: MeshTopology, alpha: float, ngeo: int) -> CurvedMapping:
    """Degree-ngeo interpolant of the warped geometry on every element.

    With alpha = 0 the interpolant reproduces the straight mesh exactly
    (affine triangles, bilinear quads).
    """
    coeffs = []
    for e in range(mesh.num_elements):
        kind = mesh.kinds[e]
        nodes, vinv = _mapping_nodes(kind, ngeo)
        phys = _straight_map(kind, mesh.element_vertices(e), nodes)
        if alpha != 0.0:
            phys = _warp_points(phys, alpha, mesh.domain)
        coeffs.append(vinv @ phys)
    return CurvedMapping(mesh=mesh, ngeo=ngeo, alpha=alpha, coeffs=coeffs)


@dataclass
class GeometricFactors:
    """Stacked geometric terms for a batch of same-kind elements.

    G[k, q] is the 2x2 matrix of J * d(ref)/d(phys) at point q (volume points
    first, then surface points); J holds the Jacobian at volume points; nJf
    the scaled outward normals n_i J_f at surface points.
    """

    elem_ids: np.ndarray
    G: np.ndarray  # (K, Nt, 2, 2)
    J: np.ndarray  # (K, Nq)
    nJf: np.ndarray  # (K, Nqf, 2)
    ngeo: int

    def element(self, k: int):
        return _ElementGeometry(G=self.G[k], J=self.J[k], nJf=self.nJf[k], ngeo=self.ngeo)


@dataclass
class _ElementGeometry:
    G: np.ndarray
    J: np.ndarray
    nJf: np.ndarray
    ngeo: int


def geometric_factors(mapping: CurvedMapping, ops, elem_ids) -> GeometricFactors:
    """Geometric terms of a batch of same-kind elements at the rule points of ops."""
    elem_ids = np.asarray(list(elem_ids), dtype=int)
    kind = mapping.mesh.kinds[elem_ids[0]]
    for e in elem_ids:
        if mapping.mesh.kinds[e] != kind:
            raise ValueError("geometric_factors expects elements of a single kind")
    gb = Basis(kind, mapping.ngeo)
    pts = np.vstack([ops.volume_rule.points, ops.surface_points])
    vr, vs = basis_grad(gb, pts)
    c = np.stack([mapping.coeffs[e] for e in elem_ids])  # (K, Npg, 2)
    dxdr = np.einsum("qp,kpc->kqc", vr, c)  # (K, Nt, 2)
    dxds = np.einsum("qp,kpc->kqc", vs, c)
    nq = ops.Nq

    G = np.empty((len(elem_ids), pts.shape[0], 2, 2))
    G[..., 0, 0] = dxds[..., 1]  # J dr/dx =  y_s
    G[..., 0, 1] = -dxdr[..., 1]  # J ds/dx = -y_r
    G[..., 1, 0] = -dxds[..., 0]  # J dr/dy = -x_s
    G[..., 1, 1] = dxdr[..., 0]  # J ds/dy =  x_r
    J = dxdr[..., 0] * dxds[..., 1] - dxds[..., 0] * dxdr[..., 1]
    Jvol = J[:, :nq]
    if np.any(Jvol <= 0.0):
        bad = int(elem_ids[np.argwhere(np.any(Jvol <= 0.0, axis=1))[0, 0]])
        raise InvertedElementError(f"inverted element {bad}: J <= 0 at a volume point")
    nJf = np.einsum("kqij,qj->kqi", G[:, nq:], ops.nrstJ)
    return GeometricFactors(elem_ids=elem_ids, G=G, J=Jvol, nJf=nJf, ngeo=mapping.ngeo)


def mesh_dump(mesh: MeshTopology, mapping: CurvedMapping | None = None) -> str:
    """Plain-text element/vertex/adjacency listing for inspection."""
    lines = []
    x0, x1, y0, y1 = mesh.domain
    lines.append(f"domain [{x0}, {x1}] x [{y0}, {y1}]  cells {mesh.nx} x {mesh.ny}")
    lines.append(f"elements {mesh.num_elements}  vertices {len(mesh.vertices)}")
    if mapping is not None:
        lines.append(f"mapping degree {mapping.ngeo}  warp amplitude {mapping.alpha}")
    lines.append("# vertices: id x y")
    for i, (x, y) in enumerate(mesh.vertices):
        lines.append(f"v {i} {x:.15g} {y:.15g}")
    lines.append("# elements: id kind vertex-ids")
    for e in range(mesh.num_elements):
        ids = " ".join(str(v) for v in mesh.elements[e])
        lines.append(f"e {e} {mesh.kinds[e]} {ids}")
    lines.append("# adjacency: elem face -> nbr-elem nbr-face shift-x shift-y")
    for e in range(mesh.num_elements):
        for f, (ne, nf) in enumerate(mesh.neighbors[e]):
            sx, sy = mesh.shifts[e][f]
            lines.append(f"f {e} {f} -> {ne} {nf} {sx:.15g} {sy:.15g}")
    return "\n".join(lines) + "\n"
