"""Execute sweep cells, possibly in parallel, and write deterministic reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .catalog import make_manifold
from .checks import CHECKS
from .config import Cell, SweepConfig, conformal_grid, expand_cells
from .conformal import (
    ConformalPair,
    conformal_be_lower_bound,
    conformal_hessian_residual,
    conformal_ricci_residual,
    make_factor,
)
from .quadrature import QuadratureError
from .report import CheckReport, Tolerance, scalar_report

__all__ = [
    "WORKERS_ENV",
    "CONFORMAL_IDENTITY_TOL",
    "resolve_workers",
    "run_cell",
    "run_cells",
    "run_sweep",
    "format_float",
    "reports_to_csv",
    "reports_to_json",
    "exit_status",
]

WORKERS_ENV = "BEVOLUME_WORKERS"
CONFORMAL_IDENTITY_TOL = 1e-8


def _call_check(cell: Cell, tol: Tolerance, dtol: Tolerance) -> CheckReport:
    m = make_manifold(cell.manifold, cell.n, dict(cell.manifold_params))
    p = dict(cell.params)
    lam = p.get("lambda", 0.0)
    name = cell.check
    if name == "riccati":
        grid = np.linspace(0.0, p["R"], int(p.get("points", 512)) + 1)[1:]
        return CHECKS[name](m, lam, p["a"], grid=grid, tolerance=tol)
    if name == "integral_estimate":
        return CHECKS[name](m, lam, p["a"], p["p"], p["R"], tolerance=tol)
    if name == "dyadic_bound":
        return CHECKS[name](m, p["a"], p["p"], p["q"], p.get("kappa"), p["l"], p["R"], tolerance=tol)
    if name == "psi_lp":
        return CHECKS[name](m, lam, p["a"], p["p"], p["q"], p.get("kappa"), p["l"], p["R"], tolerance=tol)
    if name == "ratio_derivative":
        return CHECKS[name](m, lam, p["a"], p["R"], tolerance=dtol)
    if name == "ratio_derivative_reduced":
        return CHECKS[name](m, lam, p["a"], p["p"], p["R"], tolerance=dtol)
    if name == "main_theorem":
        return CHECKS[name](m, lam, p["a"], p["p"], p["q"], p["l"], p["r"], p["R"], p.get("R0"), tolerance=tol)
    if name == "petersen_wei":
        return CHECKS[name](m, lam, p["p"], p["r"], p["R"], tolerance=tol)
    if name == "bounded_gradient_remark":
        return CHECKS[name](m, lam, p["a"], p["p"], p["r"], p["R"], tolerance=tol)
    raise ValueError(f"unknown check {name!r}")


def _conformal(cell: Cell, tol: Tolerance) -> CheckReport:
    base = make_manifold(cell.manifold, cell.n, dict(cell.manifold_params))
    p = dict(cell.params)
    factor_params = {k[len("factor_"):]: v for k, v in p.items() if k.startswith("factor_")}
    pair = ConformalPair(base, make_factor(p["factor"], factor_params), str(p["factor"]))
    grid = conformal_grid(p["R"], int(p["points"]))
    if cell.check == "conformal_be_lower_bound":
        return conformal_be_lower_bound(pair, p["rho0"], grid=grid, tolerance=tol)
    residuals = np.concatenate([np.abs(x) for x in conformal_ricci_residual(pair, grid)]
                               + [np.abs(x) for x in conformal_hessian_residual(pair, grid)])
    worst = int(np.argmax(residuals))
    return scalar_report(
        "conformal_identities",
        {"manifold": base.name, "n": base.n, "factor": p["factor"], **factor_params},
        float(residuals[worst]), CONFORMAL_IDENTITY_TOL, Tolerance(0.0, 0.0),
        worst_point=float(grid[worst % grid.size]),
        resolution={"grid_points": int(grid.size)},
    )


def run_cell(cell: Cell, tolerance: Optional[dict] = None) -> CheckReport:
    """Run one cell; quadrature exhaustion becomes an "inconclusive" report."""
    t = tolerance or {}
    tol = Tolerance(t.get("abs", 1e-9), t.get("rel", 1e-7))
    dtol = Tolerance(t.get("abs", 1e-9), t.get("derivative_rel", 1e-4))
    try:
        if cell.check.startswith("conformal_"):
            return _conformal(cell, tol)
        return _call_check(cell, tol, dtol)
    except QuadratureError as exc:
        best = getattr(exc, "best", None)
        return CheckReport(
            cell.check, {"manifold": cell.label, "n": cell.n, **dict(cell.params)},
            math.nan, math.nan, math.nan, None, False,
            {"quadrature_best": getattr(best, "value", None)},
            (f"quadrature budget exhausted: {exc}",), outcome="inconclusive",
        )


def _star(args):
    return run_cell(*args)


def resolve_workers(configured: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {env!r}")
        return value
    return configured


def run_cells(cells: Sequence[Cell], workers: int = 1, tolerance: Optional[dict] = None) -> list[CheckReport]:
    """Reports in cell order regardless of completion order."""
    jobs = [(c, tolerance) for c in cells]
    if workers <= 1 or len(cells) <= 1:
        return [run_cell(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
        return list(pool.map(_star, jobs))


def exit_status(reports: Iterable[CheckReport]) -> int:
    """0 when every cell passed, 1 otherwise (failure or inconclusive)."""
    return 0 if all(r.outcome == "pass" for r in reports) else 1


def format_float(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _fmt_point(wp) -> str:
    if wp is None:
        return ""
    if isinstance(wp, (tuple, list)):
        return ";".join(format_float(v) for v in wp)
    return format_float(wp)


def _fmt_param(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format_float(v)


CSV_COLUMNS = ["check", "manifold", "n", "parameters", "lhs", "rhs", "margin", "worst_point", "outcome"]


def reports_to_csv(cells: Sequence[Cell], reports: Sequence[CheckReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cell, rep in zip(cells, reports):
        params = ";".join(f"{k}={_fmt_param(v)}" for k, v in cell.params)
        writer.writerow([
            cell.check, cell.label, cell.n, params,
            format_float(rep.lhs), format_float(rep.rhs), format_float(rep.margin),
            _fmt_point(rep.worst_point), rep.outcome,
        ])
    return buf.getvalue()


def _json_value(v, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        return json.dumps(format_float(x)) if not math.isfinite(x) else format_float(x)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_value(v[k], indent + 1)}" for k in v]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        if len(v) == 0:
            return "[]"
        items = [f"{inner}{_json_value(x, indent + 1)}" for x in v]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def reports_to_json(cells: Sequence[Cell], reports: Sequence[CheckReport]) -> str:
    """Full reports with resolution metadata; floats printed with 17 significant digits."""
    rows = []
    for cell, rep in zip(cells, reports):
        d = rep.to_dict()
        d["cell"] = cell.index
        d["manifold_spec"] = cell.label
        rows.append(d)
    return _json_value({"cells": rows, "exit_status": exit_status(reports)}, 0) + "\n"


def run_sweep(cfg: SweepConfig, out_dir, workers: Optional[int] = None) -> tuple[int, list[CheckReport]]:
    """Run every cell of a validated config and write report files into ``out_dir``."""
    cells = expand_cells(cfg)
    n_workers = resolve_workers(cfg.workers if workers is None else workers)
    reports = run_cells(cells, n_workers, cfg.tolerance.model_dump())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if "csv" in cfg.output.formats:
        (out / "report.csv").write_text(reports_to_csv(cells, reports))
    if "json" in cfg.output.formats:
        (out / "report.json").write_text(reports_to_json(cells, reports))
    return exit_status(reports), reports
