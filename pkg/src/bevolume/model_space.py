"""Constant-curvature model spaces M^n_lambda.

Radii are plain floats or numpy arrays; every function is vectorised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import cumulative_integrals, integrate
from .report import CheckReport, pointwise_report, Tolerance

__all__ = [
    "ModelSpace",
    "sn",
    "sn_prime",
    "sn_log_derivative_excess",
    "h_model",
    "omega_model",
    "unit_sphere_area",
    "ball_volume_model",
    "weighted_ball_volume_model",
    "alpha",
    "alpha_on_grid",
    "check_alpha_monotone",
    "max_t_sn_ratio",
    "comparison_radius_limit",
    "require_comparison_radius",
]

# below x = sqrt(|lambda|) r = 1e-3 the cot/coth differences use their Taylor series
_SERIES_SWITCH = 1e-3


@dataclass(frozen=True)
class ModelSpace:
    n: int
    lam: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"model dimension must be an integer >= 2, got {self.n!r}")
        if not math.isfinite(self.lam):
            raise ValueError("curvature parameter must be finite")

    @property
    def domain_limit(self) -> float:
        """First zero of sn_lambda (infinite when lambda <= 0)."""
        return math.pi / math.sqrt(self.lam) if self.lam > 0 else math.inf


def comparison_radius_limit(lam: float) -> float:
    """pi / (2 sqrt(lambda)) for lambda > 0, else infinity."""
    return math.pi / (2.0 * math.sqrt(lam)) if lam > 0 else math.inf


def require_comparison_radius(lam: float, r, what: str = "radius") -> None:
    limit = comparison_radius_limit(lam)
    if np.size(r) == 0:
        return
    rmax = float(np.max(r))
    if rmax > limit * (1 + 1e-14):
        raise ValueError(
            f"{what} {rmax!r} exceeds pi/(2 sqrt(lambda)) = {limit!r} for lambda = {lam!r}"
        )


def _check_domain(model: ModelSpace, r, strict_positive: bool = False) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or (strict_positive and np.any(r <= 0)):
        bound = "> 0" if strict_positive else ">= 0"
        raise ValueError(f"radius must be {bound}")
    if model.lam > 0 and np.any(r >= model.domain_limit):
        raise ValueError(
            f"radius must be < pi/sqrt(lambda) = {model.domain_limit!r} for lambda = {model.lam!r}"
        )
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def sn(model: ModelSpace, r):
    """Generalised sine: solution of y'' + lambda y = 0, y(0) = 0, y'(0) = 1."""
    r = _check_domain(model, r)
    lam = model.lam
    if lam == 0:
        return _out(r.copy())
    k = math.sqrt(abs(lam))
    if lam > 0:
        return _out(np.sin(k * r) / k)
    return _out(np.sinh(k * r) / k)


def sn_prime(model: ModelSpace, r):
    r = _check_domain(model, r)
    lam = model.lam
    if lam == 0:
        return _out(np.ones_like(r))
    k = math.sqrt(abs(lam))
    if lam > 0:
        return _out(np.cos(k * r))
    return _out(np.cosh(k * r))


def sn_log_derivative_excess(lam: float, r):
    """sn'/sn - 1/r, cancellation-free near r = 0 (vanishes at r = 0)."""
    r = np.asarray(r, dtype=float)
    if lam == 0:
        return _out(np.zeros_like(r))
    k = math.sqrt(abs(lam))
    x = k * r
    small = x < _SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    x3 = xs**3
    x5 = xs**5
    if lam < 0:
        series = xs / 3.0 - x3 / 45.0 + 2.0 * x5 / 945.0
        direct = 1.0 / np.tanh(xl) - 1.0 / xl
    else:
        series = -(xs / 3.0 + x3 / 45.0 + 2.0 * x5 / 945.0)
        direct = 1.0 / np.tan(xl) - 1.0 / xl
    return _out(k * np.where(small, series, direct))


def h_model(model: ModelSpace, r):
    """Mean curvature (n-1) sn'/sn of the geodesic sphere of radius r."""
    r = _check_domain(model, r, strict_positive=True)
    if model.lam == 0:
        return _out((model.n - 1) / r)
    return _out((model.n - 1) * np.asarray(sn_prime(model, r)) / np.asarray(sn(model, r)))


def omega_model(model: ModelSpace, r):
    """Volume element sn^(n-1) per unit solid angle."""
    return _out(np.asarray(sn(model, r)) ** (model.n - 1))


def unit_sphere_area(n: int) -> float:
    """|S^(n-1)| = 2 pi^(n/2) / Gamma(n/2), Gamma by integer/half-integer recursion."""
    if int(n) != n or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    if n % 2 == 0:
        gamma = float(math.factorial(n // 2 - 1))
    else:
        gamma = math.sqrt(math.pi)
        x = 0.5
        while x < n / 2:
            gamma *= x
            x += 1.0
    return 2.0 * math.pi ** (n / 2) / gamma


def ball_volume_model(model: ModelSpace, r: float, tol: float = 1e-9) -> float:
    """v(n, lambda, r)."""
    return weighted_ball_volume_model(model, 0.0, r, tol=tol)


def weighted_ball_volume_model(model: ModelSpace, a: float, r: float, tol: float = 1e-9) -> float:
    """v_a(n, lambda, r) = |S^(n-1)| int_0^r e^(a t) sn(t)^(n-1) dt."""
    if a < 0:
        raise ValueError("a must be >= 0")
    _check_domain(model, r)
    r = float(r)
    if r == 0.0:
        return 0.0
    n = model.n

    def integrand(t):
        return np.exp(a * t) * np.asarray(sn(model, t)) ** (n - 1)

    res = integrate(integrand, 0.0, r, tol=tol)
    return unit_sphere_area(n) * res.value


def alpha(model: ModelSpace, s: float, tol: float = 1e-12) -> float:
    """alpha_lambda(s) = int_0^s omega / omega(s)."""
    s = float(s)
    if s <= 0:
        raise ValueError("alpha needs s > 0 (its limit at 0 is 0)")
    _check_domain(model, s)
    require_comparison_radius(model.lam, s, "s")
    if model.lam == 0:
        return s / model.n
    n = model.n
    num = integrate(lambda t: np.asarray(sn(model, t)) ** (n - 1), 0.0, s, tol=tol).value
    return num / float(omega_model(model, s))


def alpha_on_grid(model: ModelSpace, grid, tol: float = 1e-12) -> np.ndarray:
    """alpha at every point of an increasing positive grid (shared running integral)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return grid.copy()
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and positive")
    _check_domain(model, grid)
    require_comparison_radius(model.lam, grid, "s")
    n = model.n
    nodes = np.concatenate([[0.0], grid])
    running = cumulative_integrals(lambda t: np.asarray(sn(model, t)) ** (n - 1), nodes, tol=tol)[1:]
    return running / np.asarray(omega_model(model, grid))


def check_alpha_monotone(model: ModelSpace, grid, tol: float = 1e-10) -> CheckReport:
    """Forward differences of alpha_lambda along ``grid`` must be >= -tol.

    The report's ``rhs`` is the minimal forward difference, ``lhs`` is 0.
    """
    grid = np.asarray(grid, dtype=float)
    values = alpha_on_grid(model, grid)
    diffs = np.diff(values)
    params = {"n": model.n, "lambda": model.lam}
    res = {"points": int(grid.size), "grid_min": float(grid[0]), "grid_max": float(grid[-1])}
    if diffs.size == 0:
        return pointwise_report("alpha_monotone", params, [], [], [], resolution=res)
    report = pointwise_report(
        "alpha_monotone",
        params,
        grid[:-1],
        np.zeros_like(diffs),
        diffs,
        tolerance=Tolerance(abs=tol, rel=0.0),
        resolution=res,
    )
    i = int(np.argmin(diffs))
    return CheckReport(
        check_name=report.check_name,
        parameters=report.parameters,
        lhs=0.0,
        rhs=float(diffs[i]),
        margin=float(diffs[i]),
        worst_point=(float(grid[i]), float(grid[i + 1])),
        passed=report.passed,
        resolution=report.resolution,
    )


def max_t_sn_ratio(lam: float, R: float) -> float:
    """max over t in [0, R] of t sn'(t)/sn(t); the t -> 0 limit is 1.

    x coth x increases and x cot x decreases on (0, pi/2), so the maximum
    sits at R for lambda < 0 and at t = 0 otherwise.
    """
    if R <= 0 or lam >= 0:
        return 1.0
    x = math.sqrt(-lam) * R
    return max(1.0, x / math.tanh(x))
