"""Weighted volumes and weighted L^p norms over pole-centred balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model_space import unit_sphere_area
from .quadrature import cumulative_integrals, integrate
from .radial_manifold import RadialManifold, volume_element

__all__ = [
    "NormSpec",
    "weighted_ball_volume",
    "radial_integral",
    "weighted_lp_norm",
    "kappa_for_growth",
    "VOLUME_TOL",
    "NESTED_TOL",
]

VOLUME_TOL = 1e-9
NESTED_TOL = 1e-7

RadialFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NormSpec:
    p: float
    a: float
    R: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("norm exponent p must be > 0")
        if self.a < 0:
            raise ValueError("discount rate a must be >= 0")
        if not self.R > 0:
            raise ValueError("radius R must be > 0")


def _check_radius(m: RadialManifold, R: float) -> None:
    if not 0 < R <= m.r_max:
        raise ValueError(f"R = {R!r} outside (0, r_max = {m.r_max!r}]")


def radial_integral(
    m: RadialManifold,
    integrand: RadialFn,
    R: float,
    a: float = 0.0,
    tol: float = VOLUME_TOL,
    singular_exponent: Optional[float] = None,
    points=None,
) -> float:
    """int_0^R integrand(r) e^(-a r) omega_f(r) dr along one ray (no solid angle)."""
    _check_radius(m, R)

    def g(r):
        return np.asarray(integrand(r), dtype=float) * np.exp(-a * r) * volume_element(m, r)

    return integrate(g, 0.0, R, tol=tol, singular_exponent=singular_exponent, points=points).value


def weighted_ball_volume(m: RadialManifold, R: float, tol: float = VOLUME_TOL) -> float:
    """vol_f B(R) = |S^(n-1)| int_0^R omega_f."""
    one = lambda r: np.ones_like(np.asarray(r, dtype=float))  # noqa: E731
    return unit_sphere_area(m.n) * radial_integral(m, one, R, tol=tol)


def weighted_lp_norm(
    m: RadialManifold,
    integrand: RadialFn,
    spec: NormSpec,
    tol: float = VOLUME_TOL,
    singular_exponent: Optional[float] = None,
    points=None,
) -> float:
    """(|S^(n-1)| int_0^R |integrand|^p e^(-a r) omega_f dr)^(1/p)."""
    _check_radius(m, spec.R)
    p = spec.p

    def powered(r):
        return np.abs(np.asarray(integrand(r), dtype=float)) ** p

    total = unit_sphere_area(m.n) * radial_integral(
        m, powered, spec.R, a=spec.a, tol=tol, singular_exponent=singular_exponent, points=points
    )
    return max(total, 0.0) ** (1.0 / p)


def kappa_for_growth(
    m: RadialManifold, l: float, R0: float, points: int = 256, tol: float = VOLUME_TOL
) -> float:
    """Smallest kappa with vol_f B(r) <= kappa r^l on a dense grid of (0, R0].

    The r -> 0 limit of the ratio is |S^(n-1)| e^(-f(0)) / n when l = n and 0
    when l < n; it joins the grid maximum.
    """
    n = m.n
    if not n / 2 < l <= n:
        raise ValueError(f"growth exponent must satisfy n/2 < l <= n, got l = {l!r}, n = {n}")
    _check_radius(m, R0)
    # geometric near the pole, uniform further out
    grid = np.unique(np.concatenate([
        R0 * np.geomspace(1e-3, 1.0, points // 2),
        np.linspace(R0 / points, R0, points),
    ]))
    nodes = np.concatenate([[0.0], grid])
    volumes = unit_sphere_area(n) * cumulative_integrals(
        lambda r: volume_element(m, r), nodes, tol=tol
    )[1:]
    ratios = volumes / grid**l
    limit = unit_sphere_area(n) * math.exp(-float(m.f.value(np.array([0.0]))[0])) / n if l == n else 0.0
    return float(max(np.max(ratios), limit))
