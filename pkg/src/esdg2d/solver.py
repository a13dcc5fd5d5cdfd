"""Global semi-discrete assembly and explicit time integration.

The spatial scheme is the skew-symmetric split form: per element,

    M_k du/dt + sum_i [Vq; Vf]^T 2 (Q_k^i o F_S^i) 1
              + Vf^T diag(wf) diag(nJf_i) (f*_i - f_i(u~_f)) = 0,

where u~ are the entropy-projected conservative variables, F_S the matrix of
two-point entropy-conservative fluxes among all volume+surface points, and
f* the interface flux built from neighbor traces (optionally with local
Lax-Friedrichs dissipation).  The curved operators Q_k^i never get
materialized: the kernel applies their diagonal-scaling structure directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from . import euler, kernels
from .errors import NonphysicalStateError
from .mesh import build_uniform_mesh, geometric_factors, warp_mesh
from .refelem import (
    build_reference_operators,
    face_rule_1d_for_option,
    volume_rule_for_option,
)

__all__ = [
    "RunConfig",
    "Discretization",
    "RunResult",
    "lsrk45_step",
    "RK_A",
    "RK_B",
    "RK_C",
]

KIND_ORDER = ("quad", "tri")

# 5-stage low-storage 4th-order Runge-Kutta coefficients (exact rationals)
RK_A = (
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
)
RK_B = (
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
)
RK_C = (
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
)


def lsrk45_step(y: np.ndarray, t: float, dt: float, rhs) -> np.ndarray:
    """One low-storage RK step of a generic ODE y' = rhs(t, y)."""
    res = np.zeros_like(y)
    for a, b, c in zip(RK_A, RK_B, RK_C):
        res = a * res + dt * np.asarray(rhs(t + c * dt, y))
        y = y + b * res
    return y


@dataclass
class RunConfig:
    """Run parameters; field names double as the config-file keys."""

    N: int = 3
    Ngeo: int = 1
    option: int = 3
    element_kind: str = "hybrid"
    nx: int = 4
    ny: int = 4
    domain: tuple = (0.0, 10.0, -5.0, 5.0)
    alpha: float = 0.0
    cfl: float = 0.5
    T: float = 1.0
    flux: str = "ec"
    gamma: float = 1.4
    out_dir: str = "."
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.option not in (1, 2, 3):
            raise ValueError("option must be 1, 2, or 3")
        if self.element_kind not in ("tri", "quad", "hybrid"):
            raise ValueError("element_kind must be tri, quad, or hybrid")
        if self.flux not in ("ec", "es"):
            raise ValueError("flux must be 'ec' or 'es'")
        if self.cfl <= 0.0:
            raise ValueError("cfl must be positive")
        if self.T < 0.0:
            raise ValueError("T must be nonnegative")
        if self.Ngeo < 1:
            raise ValueError("Ngeo must be at least 1")
        bound = self._ngeo_bound()
        if self.Ngeo > bound:
            warnings.warn(
                f"Ngeo={self.Ngeo} exceeds the entropy-stability bound {bound} for "
                f"N={self.N}, option={self.option}, {self.element_kind}; expect a "
                "nonzero entropy residual",
                stacklevel=2,
            )

    def _ngeo_bound(self) -> int:
        # option 1 faces are exact for degree 2N-1 (M = N-1), Gauss faces for
        # 2N+1 (M = N+1); stability needs Ngeo <= min(N, M+1) on quads and
        # <= min(N+1, M+1) on triangles
        m_face = self.N - 1 if self.option == 1 else self.N + 1
        if self.element_kind == "quad":
            return min(self.N, m_face + 1)
        if self.element_kind == "tri":
            return min(self.N + 1, m_face + 1)
        return min(self.N, m_face + 1)

    def replace(self, **kw) -> "RunConfig":
        return replace(self, **kw)


@dataclass
class RunResult:
    times: np.ndarray  # per-step sample times (state time before each step)
    entropy_rhs: np.ndarray
    total_mass: np.ndarray
    dts: np.ndarray
    steps: int
    final_time: float
    state: dict
    failed: bool = False  # a physicality failure ended the run early

    @property
    def max_entropy_rhs(self) -> float:
        return float(np.max(np.abs(self.entropy_rhs))) if len(self.entropy_rhs) else 0.0


class Discretization:
    """Mesh + operators + geometric factors, ready to evaluate the RHS.

    ``face_rule_1d`` overrides the per-option surface rule (used to vary the
    surface quadrature accuracy in entropy-conservation sweeps).
    """

    def __init__(self, config: RunConfig, face_rule_1d=None):
        self.config = config
        self.gamma = config.gamma
        mesh = build_uniform_mesh(config.element_kind, config.nx, config.ny, config.domain)
        self.mesh = mesh
        self.mapping = warp_mesh(mesh, config.alpha, config.Ngeo)
        self.kinds = [k for k in KIND_ORDER if k in mesh.kinds]

        self.ops = {}
        self.elem_ids = {}
        self.geo = {}
        self.pattern = {}
        self.Gflat = {}
        self.wJ = {}
        self.Pqk = {}
        self.Rk = {}
        self.local_index = {}
        for kind in self.kinds:
            ids = [e for e, k in enumerate(mesh.kinds) if k == kind]
            ops = build_reference_operators(
                kind,
                config.N,
                volume_rule_for_option(kind, config.N, config.option),
                face_rule_1d if face_rule_1d is not None else face_rule_1d_for_option(config.N, config.option),
            )
            geo = geometric_factors(self.mapping, ops, ids)
            self.ops[kind] = ops
            self.elem_ids[kind] = np.asarray(ids)
            self.geo[kind] = geo
            self.pattern[kind] = kernels.build_pattern(ops.QNskew[0], ops.QNskew[1])
            self.Gflat[kind] = np.ascontiguousarray(geo.G.reshape(len(ids), ops.Nt, 4))
            self.wJ[kind] = ops.wq[None, :] * geo.J
            self.local_index.update({e: (kind, i) for i, e in enumerate(ids)})

            vn_t = ops.VN.T
            nelem = len(ids)
            pqk = np.empty((nelem, ops.Np, ops.Nq))
            rk = np.empty((nelem, ops.Np, ops.Nt))
            for i in range(nelem):
                wj = ops.wq * geo.J[i]
                mk = ops.Vq.T @ (wj[:, None] * ops.Vq)
                chol = sla.cho_factor(mk)  # certifies positive definiteness
                pqk[i] = sla.cho_solve(chol, ops.Vq.T * wj[None, :])
                rk[i] = sla.cho_solve(chol, vn_t)
            self.Pqk[kind] = pqk
            self.Rk[kind] = rk

        self.h_min = self._min_diameter()
        self._build_face_exchange()
        from .diagnostics import inverse_trace_constants

        self.constants = {k: inverse_trace_constants(self.ops[k]) for k in self.kinds}
        self.dt_denominator = max(
            max(0.5 * ct, ci) for (ci, ct) in self.constants.values()
        )

    # -- setup helpers -------------------------------------------------

    def _min_diameter(self) -> float:
        h = np.inf
        for e in range(self.mesh.num_elements):
            v = self.mesh.element_vertices(e)
            d = np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2))
            h = min(h, d)
        return float(h)

    def _build_face_exchange(self):
        offsets = {}
        off = 0
        for kind in self.kinds:
            offsets[kind] = off
            off += len(self.elem_ids[kind]) * self.ops[kind].Nqf
        surf_phys = {
            kind: self.mapping.evaluate_batch(self.elem_ids[kind], self.ops[kind].surface_points)
            for kind in self.kinds
        }
        tol = 1e-8 * self.h_min
        self.gather = {}
        for kind in self.kinds:
            ops = self.ops[kind]
            nfq = ops.face_rules[0].npoints
            nelem = len(self.elem_ids[kind])
            gather = np.empty((nelem, ops.Nqf), dtype=np.int64)
            for i, e in enumerate(self.elem_ids[kind]):
                for f in range(len(ops.face_rules)):
                    ne, nf = self.mesh.neighbors[e][f]
                    nkind, nloc = self.local_index[ne]
                    nops = self.ops[nkind]
                    if nops.face_rules[0].npoints != nfq:
                        raise ValueError("matched faces must carry identical surface rules")
                    mine = surf_phys[kind][i, f * nfq : (f + 1) * nfq]
                    theirs = (
                        surf_phys[nkind][nloc, nf * nfq : (nf + 1) * nfq]
                        + self.mesh.shifts[e][f][None, :]
                    )
                    dist = np.linalg.norm(mine[:, None, :] - theirs[None, :, :], axis=2)
                    perm = np.argmin(dist, axis=1)
                    if len(np.unique(perm)) != nfq or np.max(dist[np.arange(nfq), perm]) > tol:
                        raise ValueError(
                            f"face point mismatch between elements {e} and {ne}"
                        )
                    gather[i, f * nfq : (f + 1) * nfq] = (
                        offsets[nkind] + nloc * nops.Nqf + nf * nfq + perm
                    )
            self.gather[kind] = gather

    # -- state handling ------------------------------------------------

    def project_initial(self, fn) -> dict:
        """L2-project fn(x, y) -> (..., 4) with each element's own volume rule."""
        state = {}
        for kind in self.kinds:
            ops = self.ops[kind]
            xq = self.mapping.evaluate_batch(self.elem_ids[kind], ops.volume_rule.points)
            uq = np.asarray(fn(xq[..., 0], xq[..., 1]), dtype=float)
            state[kind] = np.einsum("kpq,kqf->kpf", self.Pqk[kind], uq)
        return state

    def volume_values(self, state: dict) -> dict:
        return {
            kind: np.einsum("qp,kpf->kqf", self.ops[kind].Vq, state[kind])
            for kind in self.kinds
        }

    def _named_physical_check(self, u: np.ndarray, kind: str):
        try:
            euler.check_physical(u, self.gamma)
        except NonphysicalStateError as exc:
            rho = u[..., 0]
            rhoe = u[..., 3] - 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho
            bad = ~(np.isfinite(u).all(axis=(-2, -1)) & (rho > 0).all(axis=-1) & (rhoe > 0).all(axis=-1))
            elem = int(self.elem_ids[kind][np.argmax(bad)]) if bad.any() else None
            raise NonphysicalStateError(str(exc), elem) from None

    def entropy_project(self, state: dict) -> dict:
        """Entropy-projected conservative variables at all volume+surface points."""
        util = {}
        for kind in self.kinds:
            ops = self.ops[kind]
            uq = np.einsum("qp,kpf->kqf", ops.Vq, state[kind])
            self._named_physical_check(uq, kind)
            vq = euler.entropy_vars(uq, self.gamma)
            coeffs = np.einsum("kpq,kqf->kpf", self.Pqk[kind], vq)
            vt = np.einsum("tp,kpf->ktf", ops.VN, coeffs)
            try:
                util[kind] = euler.cons_vars(vt, self.gamma)
            except NonphysicalStateError:
                v4 = vt[..., 3]
                bad = ~(v4 < 0).all(axis=-1)
                elem = int(self.elem_ids[kind][np.argmax(bad)]) if bad.any() else None
                raise NonphysicalStateError("entropy projection left the physical set", elem) from None
        return util

    # -- semi-discrete right-hand side ----------------------------------

    def rhs(self, state: dict) -> dict:
        util = self.entropy_project(state)
        traces = np.concatenate(
            [util[k][:, self.ops[k].Nq :, :].reshape(-1, 4) for k in self.kinds], axis=0
        )
        dudt = {}
        dissipative = self.config.flux == "es"
        for kind in self.kinds:
            ops = self.ops[kind]
            nq = ops.Nq
            r = np.zeros((util[kind].shape[0], ops.Nt, 4))
            prim = kernels.primitive_table(util[kind], self.gamma)
            kernels.flux_diff_accumulate(
                prim, self.Gflat[kind], self.pattern[kind], self.gamma, r,
                threads=self.config.threads,
            )
            uf = util[kind][:, nq:, :]
            uplus = traces[self.gather[kind]]
            fx, fy = euler.flux_ec_both(uplus, uf, self.gamma)
            pfx, pfy = euler.physical_flux(uf, self.gamma)
            njf = self.geo[kind].nJf
            wf = ops.wf[None, :]
            surf = (wf * njf[..., 0])[..., None] * (fx - pfx)
            surf += (wf * njf[..., 1])[..., None] * (fy - pfy)
            if dissipative:
                nrm = np.linalg.norm(njf, axis=-1)
                unit = njf / nrm[..., None]
                surf += (wf * nrm)[..., None] * euler.flux_dissipation(
                    uf, uplus, unit, self.gamma
                )
            r[:, nq:, :] += surf
            dudt[kind] = -np.einsum("kpt,ktf->kpf", self.Rk[kind], r)
        return dudt

    # -- diagnostics hooks ----------------------------------------------

    def conserved_totals(self, state: dict) -> np.ndarray:
        """Integrals of the four conserved fields over the mesh."""
        totals = np.zeros(4)
        for kind in self.kinds:
            uq = np.einsum("qp,kpf->kqf", self.ops[kind].Vq, state[kind])
            totals += np.einsum("kq,kqf->f", self.wJ[kind], uq)
        return totals

    def entropy_total(self, state: dict) -> float:
        total = 0.0
        for kind in self.kinds:
            uq = np.einsum("qp,kpf->kqf", self.ops[kind].Vq, state[kind])
            total += float(np.sum(self.wJ[kind] * euler.entropy(uq, self.gamma)))
        return total

    def entropy_rhs_value(self, state: dict, dudt: dict | None = None) -> float:
        """Semi-discrete entropy production: sum_k v(u_q)^T diag(w J) d(u_q)/dt."""
        if dudt is None:
            dudt = self.rhs(state)
        total = 0.0
        for kind in self.kinds:
            ops = self.ops[kind]
            uq = np.einsum("qp,kpf->kqf", ops.Vq, state[kind])
            duq = np.einsum("qp,kpf->kqf", ops.Vq, dudt[kind])
            vq = euler.entropy_vars(uq, self.gamma)
            total += float(np.sum(self.wJ[kind][..., None] * vq * duq))
        return total

    # -- time stepping ---------------------------------------------------

    def estimate_dt(self, state: dict) -> float:
        cmax = 0.0
        for kind in self.kinds:
            uq = np.einsum("qp,kpf->kqf", self.ops[kind].Vq, state[kind])
            rho, vx, vy, p = euler.primitive_vars(uq, self.gamma)
            c = np.sqrt(self.gamma * p / rho)
            cmax = max(cmax, float(np.max(np.sqrt(vx**2 + vy**2) + c)))
        return self.config.cfl * self.h_min / (cmax * self.dt_denominator)

    def advance(self, state: dict, dt: float, first_rhs: dict | None = None) -> dict:
        res = {k: np.zeros_like(v) for k, v in state.items()}
        for stage, (a, b) in enumerate(zip(RK_A, RK_B)):
            dudt = first_rhs if (stage == 0 and first_rhs is not None) else self.rhs(state)
            for k in self.kinds:
                res[k] *= a
                res[k] += dt * dudt[k]
                state[k] += b * res[k]
        return state

    def run(
        self,
        state: dict | None = None,
        initial=None,
        csv_file=None,
        max_steps=None,
        halt_on_physics_failure=False,
    ) -> RunResult:
        """March to T, sampling (time, entropy_rhs, total_mass, dt) every step.

        With ``halt_on_physics_failure`` a nonphysical state ends the run and
        returns the diagnostics recorded so far instead of raising (useful for
        sweeps that deliberately include entropy-unstable configurations).
        """
        if state is None:
            if initial is None:
                raise ValueError("provide a state or an initial-condition function")
            state = self.project_initial(initial)
        t = 0.0
        rows = []
        steps = 0
        failed = False
        tiny = 1e-12 * max(self.config.T, 1.0)
        if csv_file is not None:
            csv_file.write("time,entropy_rhs,total_mass,dt\n")
        while t < self.config.T - tiny:
            if max_steps is not None and steps >= max_steps:
                break
            try:
                first = self.rhs(state)
                ent = self.entropy_rhs_value(state, first)
                mass = self.conserved_totals(state)[0]
                dt = min(self.estimate_dt(state), self.config.T - t)
                self.advance(state, dt, first_rhs=first)
            except NonphysicalStateError:
                if not halt_on_physics_failure:
                    raise
                failed = True
                break
            rows.append((t, ent, mass, dt))
            if csv_file is not None:
                csv_file.write(f"{t:.16e},{ent:.16e},{mass:.16e},{dt:.16e}\n")
            t += dt
            steps += 1
        arr = np.asarray(rows) if rows else np.zeros((0, 4))
        return RunResult(
            times=arr[:, 0],
            entropy_rhs=arr[:, 1],
            total_mass=arr[:, 2],
            dts=arr[:, 3],
            steps=steps,
            final_time=t,
            state=state,
            failed=failed,
        )
