"""Command-line entry point: ``bevolume {check,sweep,profile,constants}``.

Exit status: 0 when every cell passes, 1 when any cell fails or is
inconclusive, 2 on configuration or usage errors (no reports are written).
"""

from __future__ import annotations

import argparse
import importlib.resources
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .catalog import make_manifold, parse_manifold_spec
from .checks import volume_ratio
from .config import CHECK_PARAMS, ConfigError, SweepConfig, expand_cells, load_config, parse_config
from .constants import explicit_constants
from .model_space import ModelSpace, alpha_on_grid, comparison_radius_limit, unit_sphere_area
from .radial_manifold import (
    RadialManifold,
    mean_curvature,
    psi,
    ric_f_lambda_minus,
    rho_a,
    ricci_f_eigenvalues,
    weighted_mean_curvature,
)
from .sweep import format_float, reports_to_csv, resolve_workers, run_cells, run_sweep

__all__ = ["main", "build_parser", "emit_profile", "PROFILE_QUANTITIES"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _builtin(name: str) -> str:
    return (importlib.resources.files("bevolume") / "configs" / f"{name}.yaml").read_text()


def _profile_fn(quantity: str, m: RadialManifold, lam: float, a: float) -> Callable[[np.ndarray], np.ndarray]:
    model = ModelSpace(m.n, lam)
    table: dict[str, Callable[[np.ndarray], np.ndarray]] = {
        "psi": lambda r: psi(m, lam, a, r),
        "h": lambda r: mean_curvature(m, r),
        "h_f": lambda r: weighted_mean_curvature(m, r),
        "mu_rad": lambda r: ricci_f_eigenvalues(m, r)[0],
        "mu_tan": lambda r: ricci_f_eigenvalues(m, r)[1],
        "ric_minus": lambda r: ric_f_lambda_minus(m, lam, r),
        "rho_a": lambda r: rho_a(m, a, r),
        "ratio": lambda r: np.array([volume_ratio(m, lam, a, float(t)) for t in r]),
        "alpha": lambda r: alpha_on_grid(model, r),
    }
    return table[quantity]


PROFILE_QUANTITIES = ("psi", "h", "h_f", "mu_rad", "mu_tan", "ric_minus", "rho_a", "ratio", "alpha")


def emit_profile(
    manifold_spec: str, quantity: str, grid: Sequence[float], out_path, n: int = 3, lam: float = 0.0, a: float = 0.0
) -> np.ndarray:
    """Write a two-column ``r value`` table and return the values.

    ``ric_minus`` is Ric_f^lambda_-; ``psi``, ``ratio`` and ``alpha`` are taken
    against the model of curvature ``lam`` with allowance ``a``.
    """
    if quantity not in PROFILE_QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; known: {list(PROFILE_QUANTITIES)}")
    name, params = parse_manifold_spec(manifold_spec)
    m = make_manifold(name, n, params)
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(_profile_fn(quantity, m, lam, a)(grid), dtype=float)
    lines = [f"# r {quantity} manifold={m.name} n={n} lambda={format_float(lam)} a={format_float(a)}"]
    lines += [f"{format_float(r)} {format_float(v)}" for r, v in zip(grid, values)]
    Path(out_path).write_text("\n".join(lines) + "\n")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bevolume", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run one check over the cells of a config")
    p_check.add_argument("name", help=f"one of {sorted(CHECK_PARAMS) + ['conformal_identities', 'conformal_be_lower_bound']}")
    p_check.add_argument("--config", help="YAML config (default: built-in worked examples)")
    p_check.add_argument("--out", help="write the CSV report here")

    p_sweep = sub.add_parser("sweep", help="run every cell of a config")
    p_sweep.add_argument("--config", required=True, help="YAML config path, or builtin:smoke")
    p_sweep.add_argument("--out", required=True, help="output directory for report.csv / report.json")

    p_prof = sub.add_parser("profile", help="emit an r/value table for a radial quantity")
    p_prof.add_argument("manifold", help='catalog spec, e.g. "hyperbolic:k=1"')
    p_prof.add_argument("quantity", help=f"one of {list(PROFILE_QUANTITIES)}")
    p_prof.add_argument("--out", required=True)
    p_prof.add_argument("--n", type=int, default=3)
    p_prof.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p_prof.add_argument("--a", type=float, default=0.0)
    p_prof.add_argument("--R", type=float, default=None, help="grid end (default min(r_max, 3))")
    p_prof.add_argument("--points", type=int, default=512)

    p_const = sub.add_parser("constants", help="print the explicit constant ledger")
    for flag, kind in (("--n", int), ("--p", float), ("--q", float), ("--l", float), ("--a", float), ("--R", float)):
        p_const.add_argument(flag, type=kind, required=flag != "--a", default=0.0 if flag == "--a" else None)
    p_const.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p_const.add_argument("--kappa", type=float, default=None,
                         help="growth constant (default: Euclidean unit-ball volume |S^(n-1)|/n)")
    return parser


def _load(spec: str) -> SweepConfig:
    if spec.startswith("builtin:"):
        return parse_config(_builtin(spec.split(":", 1)[1]))
    return load_config(spec)


def _cmd_check(args) -> int:
    cfg = _load(args.config) if args.config else parse_config(_builtin("examples"))
    cells = [c for c in expand_cells(cfg) if c.check == args.name]
    if not cells:
        raise ConfigError(f"no cells for check {args.name!r} in the config")
    reports = run_cells(cells, resolve_workers(cfg.workers), cfg.tolerance.model_dump())
    for cell, rep in zip(cells, reports):
        print(f"{rep.outcome:12s} {cell.check} {cell.label} n={cell.n} "
              f"lhs={format_float(rep.lhs)} rhs={format_float(rep.rhs)}")
    if args.out:
        Path(args.out).write_text(reports_to_csv(cells, reports))
    return EXIT_OK if all(r.outcome == "pass" for r in reports) else EXIT_FAIL


def _cmd_sweep(args) -> int:
    cfg = _load(args.config)
    status, reports = run_sweep(cfg, args.out)
    failed = sum(r.outcome != "pass" for r in reports)
    print(f"{len(reports)} cells, {failed} not passing; reports in {args.out}")
    return status


def _cmd_profile(args) -> int:
    name, params = parse_manifold_spec(args.manifold)
    m = make_manifold(name, args.n, params)
    top = args.R if args.R is not None else min(m.r_max, comparison_radius_limit(args.lam), 3.0)
    grid = np.linspace(0.0, top, args.points + 1)[1:]
    emit_profile(args.manifold, args.quantity, grid, args.out, n=args.n, lam=args.lam, a=args.a)
    return EXIT_OK


def _cmd_constants(args) -> int:
    kappa = args.kappa if args.kappa is not None else unit_sphere_area(args.n) / args.n
    const = explicit_constants(args.n, args.p, args.q, kappa, args.l, args.lam, args.a, args.R)
    for key, value in const.as_dict().items():
        print(f"{key} = {format_float(value) if isinstance(value, float) else value}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"check": _cmd_check, "sweep": _cmd_sweep, "profile": _cmd_profile, "constants": _cmd_constants}
    try:
        return handler[args.command](args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
