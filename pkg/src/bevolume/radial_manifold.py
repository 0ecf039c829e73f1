"""Rotationally symmetric weighted manifolds ``dr^2 + phi(r)^2 g_S`` with weight ``e^{-f(r)}``.

All balls are centred at the pole, so every geometric quantity is a function of
the radius alone and has a closed form in terms of phi, f and their first two
derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model_space import (
    ModelSpace,
    require_comparison_radius,
    sn,
    sn_log_derivative_excess,
    sn_prime,
)

__all__ = [
    "RadialProfile",
    "RadialManifold",
    "validate_profile_derivatives",
    "mean_curvature",
    "weighted_mean_curvature",
    "weighted_mean_curvature_derivative",
    "log_derivative_excess",
    "ricci_f_eigenvalues",
    "mu_f",
    "ric_f_lambda_minus",
    "ric_minus",
    "psi_argument",
    "psi",
    "psi_derivative",
    "rho_a",
    "volume_element",
    "volume_element_log_derivative_identity",
    "riccati_trace_residual",
]

Fn = Callable[[np.ndarray], np.ndarray]

# below this radius phi'/phi - 1/r comes from (r phi' - phi) = int_0^r t phi''(t) dt
_SMALL_R = 1e-3
_GL3_NODES = np.array([0.5 - math.sqrt(15) / 10, 0.5, 0.5 + math.sqrt(15) / 10])
_GL3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0
# below this radius 1 - phi'^2 comes from -int_0^r 2 phi' phi''
_SPHERE_R = 0.1
_GL5_NODES, _GL5_WEIGHTS = np.polynomial.legendre.leggauss(5)
_GL5_NODES = (_GL5_NODES + 1) / 2
_GL5_WEIGHTS = _GL5_WEIGHTS / 2
# eigenvalue deficits within this many ulps of the term magnitudes count as zero
_ROUNDOFF_ULPS = 64


@dataclass(frozen=True)
class RadialProfile:
    """A radial function with its exact first and second derivatives."""

    value: Fn
    d1: Fn
    d2: Fn
    description: str = ""

    def __call__(self, r):
        return self.value(np.asarray(r, dtype=float))

    @staticmethod
    def zero() -> "RadialProfile":
        z = lambda r: np.zeros_like(np.asarray(r, dtype=float))  # noqa: E731
        return RadialProfile(z, z, z, "0")

    @staticmethod
    def constant(c: float) -> "RadialProfile":
        z = lambda r: np.zeros_like(np.asarray(r, dtype=float))  # noqa: E731
        return RadialProfile(lambda r: np.full_like(np.asarray(r, dtype=float), c), z, z, f"{c!r}")

    def is_zero(self, points=None) -> bool:
        pts = np.linspace(0.0, 5.0, 41) if points is None else np.asarray(points, dtype=float)
        return bool(np.all(self.value(pts) == 0) and np.all(self.d1(pts) == 0))


def validate_profile_derivatives(
    profile: RadialProfile, points, rel_tol: float = 1e-6, step: float = 1e-5
) -> float:
    """Largest relative mismatch between d1/d2 and central differences.

    Raises ValueError above ``rel_tol``.
    """
    pts = np.asarray(points, dtype=float)
    worst = 0.0
    for exact, base in ((profile.d1, profile.value), (profile.d2, profile.d1)):
        fd = (base(pts + step) - base(pts - step)) / (2 * step)
        ex = exact(pts)
        scale = np.maximum(np.abs(ex), 1.0)
        err = float(np.max(np.abs(fd - ex) / scale))
        worst = max(worst, err)
    if worst > rel_tol:
        raise ValueError(
            f"profile {profile.description!r}: derivative mismatch {worst:.3e} > {rel_tol:.1e}"
        )
    return worst


@dataclass(frozen=True)
class RadialManifold:
    n: int
    phi: RadialProfile
    f: RadialProfile
    r_max: float
    name: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n!r}")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        zero = np.array([0.0])
        if abs(float(self.phi.value(zero)[0])) > 1e-12:
            raise ValueError("warping function must vanish at the pole")
        if abs(float(self.phi.d1(zero)[0]) - 1.0) > 1e-12:
            raise ValueError("warping function must satisfy phi'(0) = 1")
        if abs(float(self.f.d1(zero)[0])) > 1e-12:
            raise ValueError("radial weight must satisfy f'(0) = 0")
        top = self.r_max if math.isfinite(self.r_max) else 10.0
        sample = np.linspace(0.0, top, 257)[1:]
        if np.any(self.phi.value(sample) <= 0):
            raise ValueError("warping function must be positive on (0, r_max]")

    @property
    def weight_is_trivial(self) -> bool:
        top = self.r_max if math.isfinite(self.r_max) else 10.0
        return self.f.is_zero(np.linspace(0.0, top, 257))


def _domain(m: RadialManifold, r, allow_zero: bool = False) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    lower_ok = np.all(r >= 0) if allow_zero else np.all(r > 0)
    if not lower_ok or np.any(r > m.r_max):
        interval = "[0, r_max]" if allow_zero else "(0, r_max]"
        raise ValueError(f"radius outside {interval} with r_max = {m.r_max!r}")
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def mean_curvature(m: RadialManifold, r):
    """h = (n-1) phi'/phi, the Laplacian of the distance to the pole."""
    r = _domain(m, r)
    return _out((m.n - 1) * m.phi.d1(r) / m.phi.value(r))


def weighted_mean_curvature(m: RadialManifold, r):
    """h_f = h - f'."""
    r = _domain(m, r)
    return _out((m.n - 1) * m.phi.d1(r) / m.phi.value(r) - m.f.d1(r))


def weighted_mean_curvature_derivative(m: RadialManifold, r):
    r = _domain(m, r)
    ratio = m.phi.d1(r) / m.phi.value(r)
    return _out((m.n - 1) * (m.phi.d2(r) / m.phi.value(r) - ratio**2) - m.f.d2(r))


def log_derivative_excess(m: RadialManifold, r):
    """phi'/phi - 1/r without cancellation for small r (0 at the pole)."""
    r = np.asarray(r, dtype=float)
    small = r < _SMALL_R
    rl = np.where(small, 2 * _SMALL_R, r)
    direct = m.phi.d1(rl) / m.phi.value(rl) - 1.0 / rl
    if not np.any(small):
        return _out(direct)
    rs = np.where(small, r, 0.0)
    t = rs[..., None] * _GL3_NODES
    integral = rs * np.sum(_GL3_WEIGHTS * t * m.phi.d2(t), axis=-1)
    phi_s = m.phi.value(np.where(small, rs, 1.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        series = np.where(rs > 0, integral / (np.where(rs > 0, rs, 1.0) * phi_s), 0.0)
    return _out(np.where(small, series, direct))


def _log_derivative_gap(m: RadialManifold, lam: float, r: np.ndarray) -> np.ndarray:
    """phi'/phi - sn_lambda'/sn_lambda."""
    model = ModelSpace(m.n, lam)
    small = r < _SMALL_R
    rl = np.where(small, 2 * _SMALL_R, r)
    direct = m.phi.d1(rl) / m.phi.value(rl) - np.asarray(sn_prime(model, rl)) / np.asarray(sn(model, rl))
    if not np.any(small):
        return direct
    series = np.asarray(log_derivative_excess(m, r)) - np.asarray(sn_log_derivative_excess(lam, r))
    return np.where(small, series, direct)


def _sphere_term(m: RadialManifold, r: np.ndarray) -> np.ndarray:
    """(1 - phi'^2) / phi^2, integrated from the pole for small r to avoid cancellation."""
    d1 = m.phi.d1(r)
    phi = m.phi.value(r)
    small = r < _SPHERE_R
    direct = (1.0 - d1) * (1.0 + d1) / phi**2
    if not np.any(small):
        return direct
    rs = np.where(small, r, 0.0)
    t = rs[..., None] * _GL5_NODES
    deficit = -rs * np.sum(_GL5_WEIGHTS * 2 * m.phi.d1(t) * m.phi.d2(t), axis=-1)
    return np.where(small, deficit / np.where(small, phi, 1.0) ** 2, direct)


def _eigen_terms(m: RadialManifold, r: np.ndarray, weighted: bool = True):
    """Summands of (mu_rad, mu_tan) plus their absolute magnitudes for roundoff control."""
    phi = m.phi.value(r)
    d1 = m.phi.d1(r)
    curv = m.phi.d2(r) / phi
    sphere = (m.n - 2) * _sphere_term(m, r)
    hess_rad = m.f.d2(r) if weighted else 0.0 * r
    hess_tan = m.f.d1(r) * d1 / phi if weighted else 0.0 * r
    mu_rad = -(m.n - 1) * curv + hess_rad
    mu_tan = -curv + sphere + hess_tan
    scale_rad = (m.n - 1) * np.abs(curv) + np.abs(hess_rad)
    scale_tan = np.abs(curv) + np.abs(sphere) + np.abs(hess_tan)
    return mu_rad, mu_tan, scale_rad, scale_tan


def ricci_f_eigenvalues(m: RadialManifold, r):
    """Eigenvalues (radial, tangential) of Ric + Hess f at radius r."""
    r = _domain(m, r)
    mu_rad, mu_tan, _, _ = _eigen_terms(m, r)
    return _out(mu_rad), _out(mu_tan)


def mu_f(m: RadialManifold, r):
    mu_rad, mu_tan = ricci_f_eigenvalues(m, r)
    return _out(np.minimum(mu_rad, mu_tan))


def _deficit(m: RadialManifold, target: float, r, weighted: bool) -> np.ndarray:
    """max(target - min eigenvalue, 0), with roundoff-level deficits set to zero."""
    r = _domain(m, r)
    mu_rad, mu_tan, s_rad, s_tan = _eigen_terms(m, r, weighted)
    floor = _ROUNDOFF_ULPS * np.finfo(float).eps
    d_rad = target - mu_rad
    d_tan = target - mu_tan
    d_rad = np.where(d_rad <= floor * (s_rad + abs(target)), 0.0, d_rad)
    d_tan = np.where(d_tan <= floor * (s_tan + abs(target)), 0.0, d_tan)
    return np.maximum(np.maximum(d_rad, d_tan), 0.0)


def ric_f_lambda_minus(m: RadialManifold, lam: float, r):
    """max((n-1) lambda - mu_f, 0)."""
    return _out(_deficit(m, (m.n - 1) * lam, r, weighted=True))


def ric_minus(m: RadialManifold, r):
    """Ric_-(g) = max(-mu, 0) for the unweighted Ricci tensor."""
    return _out(_deficit(m, 0.0, r, weighted=False))


def psi_argument(m: RadialManifold, lam: float, a: float, r):
    """h_f - h_lambda - a, with the r -> 0 limit -f'(0) - a at the pole."""
    r = _domain(m, r, allow_zero=True)
    require_comparison_radius(lam, r)
    gap = _log_derivative_gap(m, lam, r)
    return _out((m.n - 1) * gap - m.f.d1(r) - a)


def psi(m: RadialManifold, lam: float, a: float, r):
    """Mean-curvature error (h_f - h_lambda - a)_+."""
    return _out(np.maximum(np.asarray(psi_argument(m, lam, a, r)), 0.0))


def psi_derivative(m: RadialManifold, lam: float, r):
    """d/dr (h_f - h_lambda), smooth wherever psi > 0."""
    r = _domain(m, r)
    require_comparison_radius(lam, r)
    model = ModelSpace(m.n, lam)
    phi = m.phi.value(r)
    ratio = m.phi.d1(r) / phi
    model_ratio = np.asarray(sn_prime(model, r)) / np.asarray(sn(model, r))
    gap = _log_derivative_gap(m, lam, r)
    out = (m.n - 1) * (m.phi.d2(r) / phi + lam) - m.f.d2(r) - (m.n - 1) * gap * (ratio + model_ratio)
    return _out(out)


def rho_a(m: RadialManifold, a: float, r):
    """Excess gradient max(|f'| - a, 0)."""
    r = _domain(m, r, allow_zero=True)
    return _out(np.maximum(np.abs(m.f.d1(r)) - a, 0.0))


def volume_element(m: RadialManifold, r):
    """omega_f = phi^(n-1) e^(-f) per unit solid angle."""
    r = _domain(m, r, allow_zero=True)
    return _out(m.phi.value(r) ** (m.n - 1) * np.exp(-m.f.value(r)))


def volume_element_log_derivative_identity(m: RadialManifold, r):
    """|d/dr omega_f - h_f omega_f| from exact derivatives (should be roundoff)."""
    r = _domain(m, r)
    n = m.n
    phi = m.phi.value(r)
    d1 = m.phi.d1(r)
    weight = np.exp(-m.f.value(r))
    derivative = ((n - 1) * phi ** (n - 2) * d1 - m.f.d1(r) * phi ** (n - 1)) * weight
    h_f = (n - 1) * d1 / phi - m.f.d1(r)
    return _out(np.abs(derivative - h_f * phi ** (n - 1) * weight))


def riccati_trace_residual(m: RadialManifold, r):
    """h_f' + h^2/(n-1) + Ric_f(d_r, d_r); identically zero on warped products."""
    h = np.asarray(mean_curvature(m, r))
    mu_rad, _ = ricci_f_eigenvalues(m, r)
    return _out(np.asarray(weighted_mean_curvature_derivative(m, r)) + h**2 / (m.n - 1) + mu_rad)
