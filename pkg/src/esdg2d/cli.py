"""Batch command-line interface.

Subcommands: check-operators, constants, entropy-test, convergence, simulate,
mesh-dump.  Every run-configuration key can come from a ``--config`` file and
be overridden on the command line.  Exit codes: 0 success (check-operators:
all checks pass), 1 check failure, 2 malformed configuration, 3 physics
failure (nonphysical state or inverted element).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import warnings
from dataclasses import fields

import numpy as np

from . import diagnostics, euler, quadrature, sbp
from .config import config_from_dict, parse_config_file
from .errors import ConfigError, InvertedElementError, NonphysicalStateError
from .mesh import mesh_dump
from .refelem import reference_operators
from .solver import Discretization, RunConfig

__all__ = ["main"]


def _parse_int_list(text: str):
    """Parse '1,3,5' and '1..7' (inclusive) style integer lists."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _add_config_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value configuration file")
    for f in fields(RunConfig):
        p.add_argument(f"--{f.name}", type=str, default=None, help=f"override {f.name}")


def _build_config(args) -> RunConfig:
    from .config import _PARSERS

    values = {}
    if args.config:
        values.update(parse_config_file(args.config))
    for f in fields(RunConfig):
        raw = getattr(args, f.name, None)
        if raw is not None:
            try:
                values[f.name] = _PARSERS[f.name](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for --{f.name}: {exc}") from None
    return config_from_dict(values)


def _out_path(cfg_or_dir, name: str) -> str:
    out_dir = cfg_or_dir if isinstance(cfg_or_dir, str) else cfg_or_dir.out_dir
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


# -- check-operators ----------------------------------------------------


def _cmd_check_operators(args) -> int:
    kinds = [args.kind] if args.kind else ["quad", "tri"]
    all_ok = True
    for kind in kinds:
        for n in _parse_int_list(args.N):
            for option in _parse_int_list(args.option):
                ops = reference_operators(kind, n, option)
                ones_t = np.ones(ops.Nt)
                checks = []
                checks.append(("mass positive definite", 0.0, 0.0, True))
                pv = np.max(np.abs(ops.Pq @ ops.Vq - np.eye(ops.Np)))
                checks.append(("Pq Vq = I", pv, 1e-12, pv <= 1e-12))
                e1 = np.max(np.abs(ops.E @ np.ones(ops.Nq) - 1.0))
                checks.append(("E 1 = 1", e1, 1e-13, e1 <= 1e-13))
                rs = max(sbp.sbp_residual(ops, i) for i in range(2))
                checks.append(("QNskew + QNskew^T = BN", rs, 1e-13, rs <= 1e-13))
                q1 = max(np.max(np.abs(ops.QNskew[i] @ ones_t)) for i in range(2))
                checks.append(("QNskew 1 = 0", q1, 1e-12, q1 <= 1e-12))
                ft = max(
                    np.max(np.abs(ops.Q[i].T @ np.ones(ops.Nq) - ops.E.T @ ops.B[i]))
                    for i in range(2)
                )
                checks.append(("Q^T 1 = E^T B 1", ft, 1e-12, ft <= 1e-12))
                gs = max(sbp.gsbp_residual(ops, i) for i in range(2))
                checks.append(("GSBP residual (info)", gs, float("nan"), True))
                print(f"# {kind} N={n} option={option}")
                for name, value, tol, ok in checks:
                    status = "PASS" if ok else "FAIL"
                    all_ok = all_ok and ok
                    print(f"{status:4s}  {name:28s} {value:.3e}")
    return 0 if all_ok else 1


# -- constants ----------------------------------------------------------


def _cmd_constants(args) -> int:
    ns = _parse_int_list(args.N)
    table = diagnostics.constants_table(ns)
    lines = ["row," + ",".join(f"N={n}" for n in ns)]
    for key, vals in table.items():
        lines.append(key + "," + ",".join(f"{v:.2f}" for v in vals))
    text = "\n".join(lines) + "\n"
    path = _out_path(args.out_dir, "constants.csv")
    with open(path, "w") as fh:
        fh.write(text)
    print(text, end="")
    print(f"wrote {path}")
    return 0


# -- entropy-test -------------------------------------------------------


def _parse_sweep(text: str):
    """Parse 'Ngeo=1..6,M=1,3,5' into {'Ngeo': [...], 'M': [...]}."""
    out = {}
    for match in re.finditer(r"(Ngeo|M)=((?:\d+(?:\.\.\d+)?,?)+?)(?=(?:,?(?:Ngeo|M)=)|$)", text):
        out[match.group(1)] = _parse_int_list(match.group(2).rstrip(","))
    if not out:
        raise ConfigError(f"could not parse sweep {text!r}")
    return out


def density_jump_initial(domain, gamma):
    """L2-projectable density jump: rho = 3 inside the middle third, else 2."""
    x0, x1 = domain[0], domain[1]
    center, halfwidth = 0.5 * (x0 + x1), (x1 - x0) / 6.0

    def fn(x, y):
        rho = np.where(np.abs(x - center) < halfwidth, 3.0, 2.0)
        p = rho**gamma
        zero = np.zeros_like(rho)
        return np.stack([rho, zero, zero, p / (gamma - 1.0)], axis=-1)

    return fn


def entropy_sweep(config: RunConfig, m_values, ngeo_values, max_steps=None):
    """Max |entropy RHS| over a run for each (M, Ngeo) surface-rule pairing."""
    results = {}
    for m in m_values:
        face = quadrature.gll_1d((m + config.N + 3) // 2)
        if face.exactness != m + config.N:
            raise ValueError(f"no GLL rule with exactness exactly {m + config.N}")
        for ngeo in ngeo_values:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cfg = config.replace(Ngeo=ngeo, flux="ec")
            disc = Discretization(cfg, face_rule_1d=face)
            initial = density_jump_initial(cfg.domain, cfg.gamma)
            # unstable pairings may blow up; keep the growth recorded so far
            res = disc.run(initial=initial, max_steps=max_steps, halt_on_physics_failure=True)
            results[m, ngeo] = res.max_entropy_rhs
    return results


def _cmd_entropy_test(args) -> int:
    cfg = _build_config(args)
    sweep = _parse_sweep(args.sweep)
    m_values = sweep.get("M", [1, 3, 5])
    ngeo_values = sweep.get("Ngeo", list(range(1, cfg.N + 1)))
    results = entropy_sweep(cfg, m_values, ngeo_values)
    lines = ["M\\Ngeo," + ",".join(str(g) for g in ngeo_values)]
    for m in m_values:
        lines.append(f"{m}," + ",".join(f"{results[m, g]:.3e}" for g in ngeo_values))
    text = "\n".join(lines) + "\n"
    path = _out_path(cfg, f"entropy_{cfg.element_kind}_N{cfg.N}.csv")
    with open(path, "w") as fh:
        fh.write(text)
    print(text, end="")
    print(f"wrote {path}")
    return 0


# -- convergence --------------------------------------------------------


def vortex_initial(gamma):
    def fn(x, y):
        return euler.vortex_solution(x, y, 0.0, gamma=gamma)

    return fn


def convergence_study(config: RunConfig, levels: int, base_nx: int | None = None, nx_values=None):
    """Vortex L2 errors under refinement; returns (h, error) lists.

    Levels double the base resolution unless an explicit ``nx_values`` list
    is given.
    """
    base = base_nx or config.nx
    lx = config.domain[1] - config.domain[0]
    ly = config.domain[3] - config.domain[2]
    hs, errors = [], []
    if nx_values is None:
        nx_values = [base * 2**lev for lev in range(levels)]
    for nx in nx_values:
        ny = max(1, round(nx * ly / lx))
        cfg = config.replace(nx=nx, ny=ny)
        disc = Discretization(cfg)
        res = disc.run(initial=vortex_initial(cfg.gamma))
        exact = lambda x, y, t: euler.vortex_solution(x, y, t, gamma=cfg.gamma, wrap=(lx, ly))
        _, err = diagnostics.l2_error(disc, res.state, exact, res.final_time)
        hs.append(lx / nx)
        errors.append(err)
    return hs, errors


def _cmd_convergence(args) -> int:
    n_spec = args.N or "2,3"
    args.N = None  # the study sweeps N; keep it out of the base config
    cfg = _build_config(args)
    rows = ["option,N,h,error,rate"]
    for n in _parse_int_list(n_spec):
        for option in _parse_int_list(args.options):
            run_cfg = cfg.replace(N=n, option=option)
            hs, errors = convergence_study(run_cfg, args.levels, args.base_nx)
            rates = [float("nan")] + [
                np.log(errors[i - 1] / errors[i]) / np.log(hs[i - 1] / hs[i])
                for i in range(1, len(errors))
            ]
            for h, e, r in zip(hs, errors, rates):
                rows.append(f"{option},{n},{h:.6e},{e:.6e},{r:.3f}")
            fitted = diagnostics.fit_rate(hs, errors, last=min(3, len(hs)))
            rows.append(f"{option},{n},fitted,,{fitted:.3f}")
            print(f"N={n} option={option}: errors {['%.3e' % e for e in errors]} fitted {fitted:.3f}")
    path = _out_path(cfg, "convergence.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {path}")
    return 0


# -- simulate and mesh-dump ----------------------------------------------


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    disc = Discretization(cfg)
    path = _out_path(cfg, "simulate.csv")
    with open(path, "w") as fh:
        res = disc.run(initial=vortex_initial(cfg.gamma), csv_file=fh)
    lx = cfg.domain[1] - cfg.domain[0]
    ly = cfg.domain[3] - cfg.domain[2]
    exact = lambda x, y, t: euler.vortex_solution(x, y, t, gamma=cfg.gamma, wrap=(lx, ly))
    _, err = diagnostics.l2_error(disc, res.state, exact, res.final_time)
    print(f"steps {res.steps}  final time {res.final_time:.6g}")
    print(f"max |entropy rhs| {res.max_entropy_rhs:.6e}")
    print(f"vortex L2 error {err:.6e}")
    print(f"wrote {path}")
    return 0


def _cmd_mesh_dump(args) -> int:
    cfg = _build_config(args)
    from .mesh import build_uniform_mesh, warp_mesh

    msh = build_uniform_mesh(cfg.element_kind, cfg.nx, cfg.ny, cfg.domain)
    mapping = warp_mesh(msh, cfg.alpha, cfg.Ngeo)
    text = mesh_dump(msh, mapping)
    path = _out_path(cfg, "mesh.txt")
    with open(path, "w") as fh:
        fh.write(text)
    print(f"wrote {path}")
    return 0


# -- entry point ----------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="esdg2d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-operators", help="verify reference-operator invariants")
    p.add_argument("--kind", choices=["quad", "tri"], default=None)
    p.add_argument("--N", default="1..7")
    p.add_argument("--option", default="1,2,3")
    p.set_defaults(fn=_cmd_check_operators)

    p = sub.add_parser("constants", help="inverse/trace constants table")
    p.add_argument("--N", default="1..7")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=_cmd_constants)

    p = sub.add_parser("entropy-test", help="entropy-conservation sweep over (M, Ngeo)")
    _add_config_args(p)
    p.add_argument("--sweep", default="Ngeo=1..4,M=1,3,5")
    p.set_defaults(fn=_cmd_entropy_test)

    p = sub.add_parser("convergence", help="vortex convergence study")
    _add_config_args(p)
    p.add_argument("--options", default="1,2,3")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--base-nx", type=int, default=None)
    p.set_defaults(fn=_cmd_convergence)

    p = sub.add_parser("simulate", help="single isentropic-vortex simulation")
    _add_config_args(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("mesh-dump", help="write the mesh listing")
    _add_config_args(p)
    p.set_defaults(fn=_cmd_mesh_dump)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NonphysicalStateError, InvertedElementError) as exc:
        print(f"physics failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
