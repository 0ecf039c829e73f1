"""Radial conformal changes g~ = e^{2u} g of a warped product, checked in the induced chart.

A radial factor u keeps the metric a warped product: with r~(r) = int_0^r e^u,
g~ = dr~^2 + (e^u phi)^2 g_S. All tensor identities below are compared in a
g-orthonormal frame, so a g~-eigenvalue mu~ enters as e^{2u} mu~.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .quadrature import integrate
from .radial_manifold import RadialManifold, RadialProfile, ric_minus, ricci_f_eigenvalues
from .report import DEFAULT_TOLERANCE, CheckReport, Tolerance, pointwise_report

__all__ = [
    "ConformalPair",
    "FACTORS",
    "make_factor",
    "conformal_ricci_residual",
    "conformal_hessian_residual",
    "conformal_be_lower_bound",
    "derived_A0",
    "rho0_hypothesis",
    "roundtrip_error",
    "conformal_volumes",
]

# working radius for pairs over complete bases
DEFAULT_INFINITE_LIMIT = 10.0
_PANEL = 0.25
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_GL_NODES = (_GL_NODES + 1) / 2
_GL_WEIGHTS = _GL_WEIGHTS / 2
_NEWTON_MAX = 60


def _arr(r):
    return np.asarray(r, dtype=float)


def log1p_sq(c: float = 0.5) -> RadialProfile:
    return RadialProfile(
        lambda r: c * np.log1p(_arr(r) ** 2),
        lambda r: 2 * c * _arr(r) / (1 + _arr(r) ** 2),
        lambda r: 2 * c * (1 - _arr(r) ** 2) / (1 + _arr(r) ** 2) ** 2,
        f"{c}log(1+r^2)",
    )


def bump(c: float = 0.3) -> RadialProfile:
    return RadialProfile(
        lambda r: c * np.exp(-_arr(r) ** 2),
        lambda r: -2 * c * _arr(r) * np.exp(-_arr(r) ** 2),
        lambda r: c * (4 * _arr(r) ** 2 - 2) * np.exp(-_arr(r) ** 2),
        f"{c}exp(-r^2)",
    )


def quadratic(c: float = 0.1) -> RadialProfile:
    return RadialProfile(
        lambda r: c * _arr(r) ** 2,
        lambda r: 2 * c * _arr(r),
        lambda r: np.full_like(_arr(r), 2 * c),
        f"{c}r^2",
    )


def constant(c: float = 0.5) -> RadialProfile:
    return RadialProfile.constant(c)


FACTORS: dict[str, tuple[Callable[..., RadialProfile], dict[str, float]]] = {
    "log1p_sq": (log1p_sq, {"c": 0.5}),
    "bump": (bump, {"c": 0.3}),
    "quadratic": (quadratic, {"c": 0.1}),
    "constant": (constant, {"c": 0.5}),
}


def make_factor(name: str, params: Optional[dict] = None) -> RadialProfile:
    if name not in FACTORS:
        raise ValueError(f"unknown conformal factor {name!r}; known: {sorted(FACTORS)}")
    ctor, defaults = FACTORS[name]
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for factor {name!r}")
    return ctor(**{**defaults, **{k: float(v) for k, v in params.items()}})


@dataclass(frozen=True)
class ConformalPair:
    """Base warped product plus a radial conformal factor u with u'(0) = 0."""

    base: RadialManifold
    factor: RadialProfile
    name: str = ""
    r_limit: Optional[float] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if abs(float(self.factor.d1(np.array([0.0]))[0])) > 1e-12:
            raise ValueError("conformal factor must satisfy u'(0) = 0")
        if self.r_limit is not None and not 0 < self.r_limit <= self.base.r_max:
            raise ValueError(f"r_limit must lie in (0, r_max], got {self.r_limit!r}")

    @property
    def r_max(self) -> float:
        """Base radius covered by the pair: r_limit, else r_max, else DEFAULT_INFINITE_LIMIT.

        A finite cap keeps the induced domain finite even when int_0^inf e^u converges.
        """
        if self.r_limit is not None:
            return self.r_limit
        return self.base.r_max if math.isfinite(self.base.r_max) else DEFAULT_INFINITE_LIMIT

    @property
    def n(self) -> int:
        return self.base.n

    def _stretch(self, r):
        return np.exp(self.factor.value(_arr(r)))

    def tilde_radius(self, r):
        """r~(r) = int_0^r e^{u(t)} dt."""
        r = _arr(r)
        if np.any(r < 0) or np.any(r > self.r_max):
            raise ValueError(f"radius outside [0, {self.r_max!r}] covered by the pair")
        flat = r.ravel()
        # composite Gauss-Legendre with a shared panel count, vectorised over radii
        panels = max(1, int(math.ceil(float(np.max(flat, initial=0.0)) / _PANEL)))
        width = flat / panels
        starts = width[:, None] * np.arange(panels)[None, :]
        nodes = starts[..., None] + width[:, None, None] * _GL_NODES
        out = width * np.sum(_GL_WEIGHTS * self._stretch(nodes), axis=(1, 2))
        return out.reshape(r.shape) if r.ndim else float(out[0])

    @property
    def tilde_r_max(self) -> float:
        if "r_max" not in self._cache:
            self._cache["r_max"] = float(self.tilde_radius(self.r_max))
        return self._cache["r_max"]

    def base_radius(self, rt):
        """Inverse of tilde_radius by safeguarded Newton iteration."""
        rt = _arr(rt)
        if np.any(rt < 0) or np.any(rt > self.tilde_r_max * (1 + 1e-14)):
            raise ValueError("radius outside the induced domain")
        target = rt.ravel()
        hi = self.r_max
        x = np.minimum(target * float(np.exp(-self.factor.value(np.array([0.0]))[0])), hi)
        for _ in range(_NEWTON_MAX):
            resid = np.atleast_1d(self.tilde_radius(x)) - target
            step = resid / self._stretch(x)
            x_new = np.clip(x - step, 0.0, hi)
            x_new = np.where(x_new <= 0, 0.5 * x, x_new)
            x_new = np.where(target == 0, 0.0, x_new)
            if np.all(np.abs(x_new - x) <= 1e-15 * np.maximum(1.0, np.abs(x))):
                x = x_new
                break
            x = x_new
        return x.reshape(rt.shape) if rt.ndim else float(x[0])

    def induced_warping(self) -> RadialProfile:
        """phi~ as a function of r~, with derivatives by the chain rule through r(r~)."""
        u, phi = self.factor, self.base.phi

        def at(rt):
            return _arr(self.base_radius(rt))

        def value(rt):
            r = at(rt)
            return np.exp(u.value(r)) * phi.value(r)

        def d1(rt):
            r = at(rt)
            return u.d1(r) * phi.value(r) + phi.d1(r)

        def d2(rt):
            r = at(rt)
            return np.exp(-u.value(r)) * (u.d2(r) * phi.value(r) + u.d1(r) * phi.d1(r) + phi.d2(r))

        return RadialProfile(value, d1, d2, f"e^u phi, u={u.description}")

    def induced_factor(self, scale: float = 1.0) -> RadialProfile:
        """scale * u as a function of r~."""
        u = self.factor

        def at(rt):
            return _arr(self.base_radius(rt))

        def d1(rt):
            r = at(rt)
            return scale * np.exp(-u.value(r)) * u.d1(r)

        def d2(rt):
            r = at(rt)
            return scale * np.exp(-2 * u.value(r)) * (u.d2(r) - u.d1(r) ** 2)

        return RadialProfile(lambda rt: scale * u.value(at(rt)), d1, d2, f"{scale}u")

    def induced_manifold(self, weight_scale: float = 0.0) -> RadialManifold:
        key = ("manifold", weight_scale)
        if key not in self._cache:
            f = RadialProfile.zero() if weight_scale == 0 else self.induced_factor(weight_scale)
            self._cache[key] = RadialManifold(
                self.n, self.induced_warping(), f, self.tilde_r_max, f"conformal({self.name})"
            )
        return self._cache[key]


def _radii(pair: ConformalPair, r) -> tuple[np.ndarray, np.ndarray]:
    r = _arr(r)
    if np.any(r <= 0) or np.any(r > pair.r_max):
        raise ValueError(f"radius outside (0, {pair.r_max!r}]")
    return r, _arr(pair.tilde_radius(r))


def _laplacian(pair: ConformalPair, r: np.ndarray) -> np.ndarray:
    u, phi = pair.factor, pair.base.phi
    return u.d2(r) + (pair.n - 1) * phi.d1(r) / phi.value(r) * u.d1(r)


def conformal_ricci_residual(pair: ConformalPair, r):
    """Radial and tangential residuals of
    Ric(g~) + (n-2) Hess_g u = Ric(g) - (Delta u) g + (n-2) du(x)du - (n-2)|du|^2 g."""
    r, rt = _radii(pair, r)
    n = pair.n
    u, phi = pair.factor, pair.base.phi
    mt_rad, mt_tan = (np.asarray(x) for x in ricci_f_eigenvalues(pair.induced_manifold(), rt))
    base = RadialManifold(n, phi, RadialProfile.zero(), pair.base.r_max, pair.base.name)
    mu_rad, mu_tan = (np.asarray(x) for x in ricci_f_eigenvalues(base, r))
    scale = np.exp(2 * u.value(r))
    lap = _laplacian(pair, r)
    du = u.d1(r)
    hess_tan = du * phi.d1(r) / phi.value(r)
    res_rad = scale * mt_rad + (n - 2) * u.d2(r) - (mu_rad - lap + (n - 2) * du**2 - (n - 2) * du**2)
    res_tan = scale * mt_tan + (n - 2) * hess_tan - (mu_tan - lap - (n - 2) * du**2)
    return _pair_out(res_rad, res_tan)


def conformal_hessian_residual(pair: ConformalPair, r):
    """Radial and tangential residuals of Hess_{g~} u = Hess_g u - 2 du(x)du + |du|^2 g."""
    r, rt = _radii(pair, r)
    u, phi = pair.factor, pair.base.phi
    induced = pair.induced_manifold()
    ut = pair.induced_factor()
    scale = np.exp(2 * u.value(r))
    tilde_rad = ut.d2(rt)
    tilde_tan = ut.d1(rt) * induced.phi.d1(rt) / induced.phi.value(rt)
    du = u.d1(r)
    res_rad = scale * tilde_rad - (u.d2(r) - 2 * du**2 + du**2)
    res_tan = scale * tilde_tan - (du * phi.d1(r) / phi.value(r) + du**2)
    return _pair_out(res_rad, res_tan)


def _pair_out(a, b):
    if np.ndim(a) == 0:
        return float(a), float(b)
    return a, b


def rho0_hypothesis(pair: ConformalPair, r) -> np.ndarray:
    """Delta u + |du|^2 + Ric_-(g) at each radius; rho0 must dominate it."""
    r = _arr(r)
    return _laplacian(pair, r) + pair.factor.d1(r) ** 2 + np.asarray(ric_minus(pair.base, r))


def derived_A0(n: int) -> float:
    """Coefficient of |grad_{g~} f^|^2 in the lower bound for Ric_{f^}(g~), f^ = (n-2)u.

    Ric_{f^}(g~) = Ric(g) - (Delta u) g - (n-2) du(x)du, and
    (n-2) |du|^2_g e^{-2u} = |grad_{g~} f^|^2 / (n-2); trading one |du|^2 against
    the hypothesis leaves (n-3)/(n-2)^2.
    """
    return max(n - 3, 0) / (n - 2) ** 2 if n > 2 else 0.0


def conformal_be_lower_bound(
    pair: ConformalPair,
    rho0: float,
    A0: Optional[float] = None,
    grid: Optional[Sequence[float]] = None,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Ric_{f^}(g~) >= -(rho0^ + A0 |grad_{g~} f^|^2) g~ pointwise, f^ = (n-2)u.

    Hypothesis checked first on the grid: Delta u + |du|^2 + Ric_-(g) <= rho0.
    rho0^ absorbs e^{-2u} through B1 = max |u| on the grid.
    """
    n = pair.n
    A0 = derived_A0(n) if A0 is None else float(A0)
    if grid is None:
        top = min(pair.r_max, 3.0)
        grid = np.linspace(0.0, top, 65)[1:]
    r, rt = _radii(pair, grid)
    u = pair.factor
    hyp = rho0_hypothesis(pair, r)
    over = hyp - rho0
    if np.any(over > tolerance.abs + tolerance.rel * abs(rho0)):
        i = int(np.argmax(over))
        raise ValueError(
            f"rho0 hypothesis fails: Delta u + |du|^2 + Ric_- = {hyp[i]!r} > rho0 = {rho0!r} at r = {r[i]!r}"
        )
    b1 = float(np.max(np.abs(u.value(r))))
    rho_hat = rho0 * math.exp(2 * b1) if rho0 >= 0 else rho0 * math.exp(-2 * b1)
    weighted = pair.induced_manifold(weight_scale=n - 2)
    mu_rad, mu_tan = (np.asarray(x) for x in ricci_f_eigenvalues(weighted, rt))
    grad_sq = np.asarray(weighted.f.d1(rt)) ** 2
    bound = -(rho_hat + A0 * grad_sq)
    # inequality as lhs <= rhs: -mu <= rho^ + A0 |grad f^|^2
    lhs = -np.minimum(mu_rad, mu_tan)
    return pointwise_report(
        "conformal_be_lower_bound",
        {"base": pair.base.name, "factor": pair.factor.description, "n": n, "rho0": rho0, "A0": A0},
        r, lhs, -bound, tolerance,
        resolution={"grid_points": int(r.size), "B1": b1, "rho0_hat": rho_hat,
                    "hypothesis_max": float(np.max(hyp)) if r.size else 0.0},
    )


def roundtrip_error(pair: ConformalPair, r) -> float:
    """max |r(r~(r)) - r|."""
    r = _arr(r)
    back = _arr(pair.base_radius(pair.tilde_radius(r)))
    return float(np.max(np.abs(back - r)))


def conformal_volumes(pair: ConformalPair, R: float, tol: float = 1e-12) -> tuple[float, float]:
    """(int_0^{R~} phi~^{n-1} dr~, int_0^R e^{nu} phi^{n-1} dr) per unit solid angle."""
    n = pair.n
    Rt = float(pair.tilde_radius(R))
    induced = pair.induced_manifold()
    chart = integrate(lambda t: induced.phi.value(t) ** (n - 1), 0.0, Rt, tol=tol).value
    base = integrate(
        lambda t: np.exp(n * pair.factor.value(t)) * pair.base.phi.value(t) ** (n - 1), 0.0, R, tol=tol
    ).value
    return chart, base
