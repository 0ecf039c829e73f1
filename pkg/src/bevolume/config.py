"""Sweep configuration: a YAML document validated in full before any cell runs.

Schema (unknown keys are errors)::

    workers: 2                      # optional, default 1; BEVOLUME_WORKERS overrides
    tolerance: {abs: 1e-9, rel: 1e-7, derivative_rel: 1e-4}
    output: {formats: [csv, json]}
    manifolds:
      - {name: hyperbolic, n: [2, 3], params: {k: 1.0}}
    checks:
      - name: main_theorem
        grid: {lambda: [0.0], a: [0.0], p: [2.0], q: [8.0], l: [3.0], r: [0.25], R: [1.0]}
    conformal:
      - {base: euclidean, n: [3], factor: bump, factor_params: {c: 0.05}, rho0: 0.1}

Every grid value may be a scalar or a list; cells are the cartesian product of
manifolds x dimensions x grid values, per check entry. An ``n`` key in a check's
``grid`` restricts that entry to those dimensions, and an optional
``manifolds: [name, ...]`` list restricts it to those catalog entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .catalog import CATALOG, make_manifold
from .checks import _sup_abs_gradient
from .conformal import FACTORS, ConformalPair, make_factor, rho0_hypothesis
from .constants import explicit_constants, gradient_free_constants, integral_estimate_constants
from .model_space import comparison_radius_limit

__all__ = [
    "SweepConfig",
    "Cell",
    "ConfigError",
    "load_config",
    "parse_config",
    "expand_cells",
    "conformal_grid",
    "CHECK_PARAMS",
]

Scalars = Union[float, list[float]]


class ConfigError(ValueError):
    """Configuration could not be read or violates a check's hypotheses."""


# required and optional grid keys per check
CHECK_PARAMS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "riccati": (("lambda", "a", "R"), ("points",)),
    "integral_estimate": (("lambda", "a", "p", "R"), ()),
    "dyadic_bound": (("a", "p", "q", "l", "R"), ("kappa",)),
    "psi_lp": (("lambda", "a", "p", "q", "l", "R"), ("kappa",)),
    "ratio_derivative": (("lambda", "a", "R"), ()),
    "ratio_derivative_reduced": (("lambda", "a", "p", "R"), ()),
    "main_theorem": (("lambda", "a", "p", "q", "l", "r", "R"), ("R0",)),
    "petersen_wei": (("lambda", "p", "r", "R"), ()),
    "bounded_gradient_remark": (("lambda", "a", "p", "r", "R"), ()),
}
CONFORMAL_CHECKS = ("conformal_identities", "conformal_be_lower_bound")


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ToleranceConfig(_Strict):
    abs: float = Field(1e-9, ge=0)
    rel: float = Field(1e-7, ge=0)
    derivative_rel: float = Field(1e-4, ge=0)


class OutputConfig(_Strict):
    formats: list[Literal["csv", "json"]] = ["csv", "json"]


class ManifoldEntry(_Strict):
    name: str
    n: Union[int, list[int]]
    params: dict[str, float] = {}

    @field_validator("name")
    @classmethod
    def _known(cls, v):
        if v not in CATALOG:
            raise ValueError(f"unknown manifold {v!r}; known: {sorted(CATALOG)}")
        return v

    @property
    def dims(self) -> list[int]:
        return [int(x) for x in _as_list(self.n)]


class CheckEntry(_Strict):
    name: str
    grid: dict[str, Scalars]
    manifolds: Optional[list[str]] = None

    @field_validator("name")
    @classmethod
    def _known(cls, v):
        if v not in CHECK_PARAMS:
            raise ValueError(f"unknown check {v!r}; known: {sorted(CHECK_PARAMS)}")
        return v


class ConformalEntry(_Strict):
    base: str
    n: Union[int, list[int]]
    base_params: dict[str, float] = {}
    factor: str
    factor_params: dict[str, float] = {}
    rho0: Optional[float] = None
    R: float = 2.0
    points: int = Field(64, ge=2)

    @field_validator("base")
    @classmethod
    def _known_base(cls, v):
        if v not in CATALOG:
            raise ValueError(f"unknown manifold {v!r}; known: {sorted(CATALOG)}")
        return v

    @field_validator("factor")
    @classmethod
    def _known_factor(cls, v):
        if v not in FACTORS:
            raise ValueError(f"unknown conformal factor {v!r}; known: {sorted(FACTORS)}")
        return v


class SweepConfig(_Strict):
    workers: int = Field(1, ge=1)
    tolerance: ToleranceConfig = ToleranceConfig()
    output: OutputConfig = OutputConfig()
    manifolds: list[ManifoldEntry] = []
    checks: list[CheckEntry] = []
    conformal: list[ConformalEntry] = []


@dataclass(frozen=True)
class Cell:
    """One unit of work: a check on one manifold with scalar parameters."""

    index: int
    check: str
    manifold: str
    manifold_params: tuple[tuple[str, float], ...]
    n: int
    params: tuple[tuple[str, float], ...]

    @property
    def label(self) -> str:
        mp = ",".join(f"{k}={v:g}" for k, v in self.manifold_params)
        return f"{self.manifold}:{mp}" if mp else self.manifold


def conformal_grid(R: float, points: int) -> np.ndarray:
    return np.linspace(0.0, R, int(points) + 1)[1:]


def parse_config(text: str) -> SweepConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at top level")
    try:
        cfg = SweepConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config:\n{exc}") from None
    expand_cells(cfg)  # validates every cell's hypotheses
    return cfg


def load_config(path: Union[str, Path]) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def _validate_cell(check: str, n: int, r_max: float, manifold, p: dict[str, float]) -> None:
    """Raise ValueError naming the first violated hypothesis of ``check``."""
    lam = p.get("lambda", 0.0)
    R = p["R"]
    if not R > 0:
        raise ValueError(f"violated: R > 0 (R = {R!r})")
    strict = check in ("ratio_derivative", "ratio_derivative_reduced")
    if R > r_max or (strict and R >= r_max):
        raise ValueError(f"violated: R {'<' if strict else '<='} r_max = {r_max!r} (R = {R!r})")
    limit = comparison_radius_limit(lam)
    if R > limit:
        raise ValueError(f"violated: R <= pi/(2 sqrt(lambda)) = {limit!r} (R = {R!r})")
    if "a" in p and p["a"] < 0:
        raise ValueError(f"violated: a >= 0 (a = {p['a']!r})")
    if "r" in p and not 0 < p["r"] <= R:
        raise ValueError(f"violated: 0 < r <= R (r = {p['r']!r}, R = {R!r})")
    kappa = p.get("kappa", 1.0)
    if check == "integral_estimate":
        if not p["p"] < n:
            raise ValueError(f"violated: p < n (p = {p['p']!r}, n = {n})")
        integral_estimate_constants(n, p["p"])
    elif check == "dyadic_bound":
        pp, q, l = p["p"], p["q"], p["l"]
        if not 0 < pp < l:
            raise ValueError(f"violated: 0 < p < l (p = {pp!r}, l = {l!r})")
        if not q > l * pp / (l - pp):
            raise ValueError(f"violated: q > l p/(l - p) = {l * pp / (l - pp)!r} (q = {q!r})")
        if "kappa" not in p and not n / 2 < l <= n:
            raise ValueError(f"violated: n/2 < l <= n for the computed kappa (l = {l!r}, n = {n})")
    elif check in ("psi_lp", "main_theorem"):
        explicit_constants(n, p["p"], p["q"], kappa, p["l"], lam, p["a"], R)
        R0 = p.get("R0", R)
        if not R <= R0 <= r_max:
            raise ValueError(f"violated: R <= R0 <= r_max (R0 = {R0!r})")
    elif check == "ratio_derivative_reduced":
        if not p["p"] > 0:
            raise ValueError(f"violated: p > 0 (p = {p['p']!r})")
    elif check == "petersen_wei":
        if not manifold.weight_is_trivial:
            raise ValueError("violated: f == 0 for the unweighted comparison")
        if lam > 0:
            raise ValueError(f"violated: lambda <= 0 (lambda = {lam!r})")
        gradient_free_constants(n, p["p"], lam, 0.0, R)
    elif check == "bounded_gradient_remark":
        gradient_free_constants(n, p["p"], lam, p["a"], R)
        sup = _sup_abs_gradient(manifold, R)
        if sup > p["a"] + 1e-12:
            raise ValueError(f"violated: sup |f'| <= a (sup = {sup!r}, a = {p['a']!r})")


def expand_cells(cfg: SweepConfig) -> list[Cell]:
    """All cells in a stable order, each validated; raises ConfigError on the first bad one."""
    cells: list[Cell] = []
    for entry in cfg.checks:
        required, optional = CHECK_PARAMS[entry.name]
        grid = dict(entry.grid)
        dims_filter = None
        if "n" in grid:
            dims_filter = {int(x) for x in _as_list(grid.pop("n"))}
        missing = [k for k in required if k not in grid]
        unknown = [k for k in grid if k not in required + optional]
        if missing:
            raise ConfigError(f"check {entry.name!r}: missing grid parameter(s) {missing}")
        if unknown:
            raise ConfigError(f"check {entry.name!r}: unknown grid parameter(s) {unknown}")
        keys = [k for k in required + optional if k in grid]
        combos = list(itertools.product(*(_as_list(grid[k]) for k in keys)))
        for man in cfg.manifolds:
            if entry.manifolds is not None and man.name not in entry.manifolds:
                continue
            for n in man.dims:
                if dims_filter is not None and n not in dims_filter:
                    continue
                try:
                    manifold = make_manifold(man.name, n, man.params)
                except ValueError as exc:
                    raise ConfigError(f"manifold {man.name!r} (n={n}): {exc}") from None
                for combo in combos:
                    params = {k: float(v) for k, v in zip(keys, combo)}
                    try:
                        _validate_cell(entry.name, n, manifold.r_max, manifold, params)
                    except ValueError as exc:
                        raise ConfigError(
                            f"check {entry.name!r} on {man.name} n={n} {params}: {exc}"
                        ) from None
                    cells.append(Cell(len(cells), entry.name, man.name, tuple(sorted(man.params.items())),
                                      n, tuple(params.items())))
    for entry in cfg.conformal:
        for n in [int(x) for x in _as_list(entry.n)]:
            try:
                base = make_manifold(entry.base, n, entry.base_params)
            except ValueError as exc:
                raise ConfigError(f"conformal base {entry.base!r} (n={n}): {exc}") from None
            try:
                make_factor(entry.factor, entry.factor_params)
            except ValueError as exc:
                raise ConfigError(f"conformal factor {entry.factor!r}: {exc}") from None
            R = min(entry.R, base.r_max)
            if not R > 0:
                raise ConfigError(f"conformal entry: R must be > 0 (R = {entry.R!r})")
            params = {"R": R, "points": float(entry.points)}
            extra = tuple(sorted(entry.base_params.items()))
            factor = (("factor", entry.factor),) + tuple(
                (f"factor_{k}", v) for k, v in sorted(entry.factor_params.items())
            )
            cells.append(Cell(len(cells), "conformal_identities", entry.base, extra, n,
                              tuple(params.items()) + factor))
            if entry.rho0 is not None:
                pair = ConformalPair(base, make_factor(entry.factor, entry.factor_params))
                grid = conformal_grid(R, entry.points)
                worst = float(np.max(rho0_hypothesis(pair, grid)))
                if worst > entry.rho0 + 1e-9 + 1e-7 * abs(entry.rho0):
                    raise ConfigError(
                        f"conformal entry {entry.base}/{entry.factor} n={n}: violated: "
                        f"Delta u + |du|^2 + Ric_- <= rho0 (max {worst!r} > rho0 = {entry.rho0!r})"
                    )
                cells.append(Cell(len(cells), "conformal_be_lower_bound", entry.base, extra, n,
                                  tuple(params.items()) + (("rho0", float(entry.rho0)),) + factor))
    if not cells:
        raise ConfigError("config defines no cells")
    return cells
