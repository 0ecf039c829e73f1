"""Both sides of every inequality in the weighted comparison chain, as CheckReports.

Conventions shared by all checkers:
  * balls are centred at the pole of a RadialManifold;
  * ``lam`` is the model curvature, ``a`` the exponential allowance;
  * ray integrals carry the weight e^{-a r} omega_f(r); ball quantities add |S^{n-1}|.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .constants import (
    explicit_constants,
    gradient_free_constants,
    hoelder_exponent_s,
    integral_estimate_constants,
    psi_lp_constant,
    ratio_derivative_constant,
    theorem_constant,
    dyadic_constant,
)
from .model_space import (
    ModelSpace,
    alpha_on_grid,
    comparison_radius_limit,
    h_model,
    max_t_sn_ratio,
    omega_model,
    require_comparison_radius,
    unit_sphere_area,
    weighted_ball_volume_model,
)
from .norms import NESTED_TOL, kappa_for_growth, radial_integral, weighted_ball_volume
from .quadrature import finite_difference
from .radial_manifold import (
    RadialManifold,
    mu_f,
    psi,
    psi_argument,
    psi_derivative,
    ric_f_lambda_minus,
    rho_a,
)
from .report import (
    DEFAULT_TOLERANCE,
    DERIVATIVE_TOLERANCE,
    CheckReport,
    Tolerance,
    pointwise_report,
    scalar_report,
)

__all__ = [
    "check_riccati",
    "check_integral_estimate",
    "check_dyadic_bound",
    "check_psi_lp",
    "check_ratio_derivative",
    "check_ratio_derivative_reduced",
    "check_main_theorem",
    "check_petersen_wei",
    "check_bounded_gradient_remark",
    "volume_ratio",
    "curvature_norm",
    "gradient_norm",
    "psi_norm",
    "CHECKS",
]

VOLUME_FD_TOL = 1e-12
_KINK_SAMPLES = 257


def _params(m: RadialManifold, **kw) -> dict:
    return {"manifold": m.name, "n": m.n, **kw}


def _require_radius(m: RadialManifold, lam: float, R: float, strict: bool = False) -> None:
    if not R > 0:
        raise ValueError(f"R must be > 0, got {R!r}")
    if R > m.r_max or (strict and R >= m.r_max):
        bound = "<" if strict else "<="
        raise ValueError(f"R = {R!r} must be {bound} r_max = {m.r_max!r}")
    require_comparison_radius(lam, R, "R")


def _sign_changes(fn: Callable[[np.ndarray], np.ndarray], R: float) -> list[float]:
    grid = np.linspace(0.0, R, _KINK_SAMPLES)[1:]
    vals = np.asarray(fn(grid), dtype=float)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(lambda t: float(fn(np.array(t))), grid[i], grid[i + 1], xtol=1e-14))
    return roots


def _kinks(m: RadialManifold, lam: float, a: float, R: float) -> list[float]:
    """Break points where psi, rho_a or Ric_- switch on or off."""
    pts = _sign_changes(lambda r: psi_argument(m, lam, a, r), R)
    pts += _sign_changes(lambda r: np.abs(m.f.d1(r)) - a, R)
    pts += _sign_changes(lambda r: (m.n - 1) * lam - np.asarray(mu_f(m, r)), R)
    return sorted(set(pts))


def volume_ratio(m: RadialManifold, lam: float, a: float, R: float, tol: float = VOLUME_FD_TOL) -> float:
    """vol_f B(R) / v_a(n, lambda, R)."""
    return weighted_ball_volume(m, R, tol=tol) / weighted_ball_volume_model(ModelSpace(m.n, lam), a, R, tol=tol)


def curvature_norm(m: RadialManifold, lam: float, a: float, p: float, R: float, tol: float = NESTED_TOL) -> float:
    """||Ric_f^lambda_-||_{p,f,a}(R)."""
    pts = _kinks(m, lam, a, R)
    ray = radial_integral(m, lambda r: np.asarray(ric_f_lambda_minus(m, lam, r)) ** p, R, a, tol, points=pts)
    return (unit_sphere_area(m.n) * ray) ** (1 / p)


def gradient_norm(m: RadialManifold, a: float, q: float, R: float, tol: float = NESTED_TOL) -> float:
    """||rho_a(grad f)||_{q,f,a}(R)."""
    pts = _sign_changes(lambda r: np.abs(m.f.d1(r)) - a, R)
    ray = radial_integral(m, lambda r: np.asarray(rho_a(m, a, r)) ** q, R, a, tol, points=pts)
    return (unit_sphere_area(m.n) * ray) ** (1 / q)


def psi_norm(m: RadialManifold, lam: float, a: float, p2: float, R: float, tol: float = NESTED_TOL) -> float:
    """||psi||_{p2,f,a}(R)."""
    pts = _kinks(m, lam, a, R)
    ray = radial_integral(m, lambda r: np.asarray(psi(m, lam, a, r)) ** p2, R, a, tol, points=pts)
    return (unit_sphere_area(m.n) * ray) ** (1 / p2)


def _default_grid(m: RadialManifold, lam: float, points: int = 512, R: Optional[float] = None) -> np.ndarray:
    top = min(m.r_max, comparison_radius_limit(lam), 3.0) if R is None else R
    return np.linspace(0.0, top, points + 1)[1:]


def check_riccati(
    m: RadialManifold,
    lam: float,
    a: float,
    grid: Optional[Sequence[float]] = None,
    eps_active: float = 1e-8,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """psi' + psi^2/(n-1) <= -2(sn'/sn) psi + 2/(n-1) rho psi + 2(sn'/sn) rho + Ric_-,
    evaluated where psi > eps_active."""
    grid = _default_grid(m, lam) if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid > m.r_max):
        raise ValueError("grid must lie in (0, r_max]")
    require_comparison_radius(lam, grid, "grid radius")
    n = m.n
    values = np.asarray(psi(m, lam, a, grid))
    active = values > eps_active
    g = grid[active]
    ps = values[active]
    lhs = np.asarray(psi_derivative(m, lam, g)) + ps**2 / (n - 1)
    log_sn = np.asarray(h_model(ModelSpace(n, lam), g)) / (n - 1) if g.size else g
    rho = np.asarray(rho_a(m, a, g))
    rhs = (
        -2 * log_sn * ps
        + 2 / (n - 1) * rho * ps
        + 2 * log_sn * rho
        + np.asarray(ric_f_lambda_minus(m, lam, g))
    )
    return pointwise_report(
        "riccati",
        _params(m, **{"lambda": lam, "a": a}),
        g, lhs, rhs, tolerance,
        resolution={"grid_points": int(grid.size), "active_points": int(g.size), "eps_active": eps_active},
    )


def check_integral_estimate(
    m: RadialManifold, lam: float, a: float, p: float, R: float, tol: float = NESTED_TOL,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Along one ray: int psi^{2p} w <= C1 M^p int (rho/r)^p w + C2 int rho^{2p} w + C3 int Ric_-^p w."""
    n = m.n
    if not n / 2 < p < n:
        raise ValueError(f"violated: n/2 < p < n (p = {p!r}, n = {n})")
    _require_radius(m, lam, R)
    D, c1, c2, c3 = integral_estimate_constants(n, p)
    M = max_t_sn_ratio(lam, R)
    pts = _kinks(m, lam, a, R)

    def ray(fn, singular=None):
        return radial_integral(m, fn, R, a, tol, singular_exponent=singular, points=pts)

    def rho_over_r(r):
        r = np.asarray(r, dtype=float)
        return np.asarray(rho_a(m, a, r)) / np.where(r > 0, r, 1.0)

    X = ray(lambda r: np.asarray(psi(m, lam, a, r)) ** (2 * p))
    Q = ray(lambda r: rho_over_r(r) ** p, singular=n - 1 - p)
    P = ray(lambda r: np.asarray(rho_a(m, a, r)) ** (2 * p))
    K = ray(lambda r: np.asarray(ric_f_lambda_minus(m, lam, r)) ** p)
    rhs = c1 * M**p * Q + c2 * P + c3 * K

    # sharper root of Y^2 <= A Y + B before the 3^{2p-1} splitting
    A = 2 * P ** (1 / (2 * p)) / ((n - 1) * D)
    B = (2 * M * Q ** (1 / p) + K ** (1 / p)) / D
    sharp = ((A + math.sqrt(A * A + 4 * B)) / 2) ** (2 * p)
    return scalar_report(
        "integral_estimate",
        _params(m, **{"lambda": lam, "a": a, "p": p, "R": R}),
        X, rhs, tolerance, worst_point=R,
        resolution={"quad_tol": tol, "D": D, "C1": c1, "C2": c2, "C3": c3, "max_t_sn_ratio": M,
                    "X": X, "P": P, "Q": Q, "K": K, "sharp_rhs": sharp},
        extra_conditions=[("X <= quadratic-root bound", bool(tolerance.slack(X, sharp) >= 0))],
    )


def check_dyadic_bound(
    m: RadialManifold, a: float, p: float, q: float, kappa: Optional[float], l: float, R: float,
    tol: float = NESTED_TOL, tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """(int_B rho^p r^{-p} e^{-ar} dvol_f)^{1/(2p)} <= C_excess R^{l/(2p)-l/(2q)-1/2} ||rho||_q^{1/2},
    together with the dyadic shell bound it rests on."""
    n = m.n
    if not 0 < p < l:
        raise ValueError(f"violated: 0 < p < l (p = {p!r}, l = {l!r})")
    q_min = l * p / (l - p)
    if not q > q_min:
        raise ValueError(f"violated: q > l p/(l - p) = {q_min!r} (q = {q!r})")
    if not 0 < R <= m.r_max:
        raise ValueError(f"R = {R!r} outside (0, r_max]")
    if kappa is None:
        kappa = kappa_for_growth(m, l, R)
    s = hoelder_exponent_s(p, q)
    c_dyadic = dyadic_constant(kappa, l, s)
    c_excess = c_dyadic ** (1 / (2 * s))
    area = unit_sphere_area(n)
    pts = _sign_changes(lambda r: np.abs(m.f.d1(r)) - a, R)

    def rho_over_r(r):
        r = np.asarray(r, dtype=float)
        return np.asarray(rho_a(m, a, r)) / np.where(r > 0, r, 1.0)

    ball_q = area * radial_integral(m, lambda r: rho_over_r(r) ** p, R, a, tol,
                                    singular_exponent=n - 1 - p, points=pts)
    shells = area * radial_integral(m, lambda r: np.asarray(r, dtype=float) ** (-s), R, a, tol,
                                    singular_exponent=n - 1 - s)
    shell_bound = c_dyadic * R ** (l - s)
    rho_q = gradient_norm(m, a, q, R, tol)

    lhs = ball_q ** (1 / (2 * p))
    exponent = l / (2 * p) - l / (2 * q) - 0.5
    rhs = c_excess * R**exponent * math.sqrt(rho_q)
    hoelder_rhs = rho_q * shells ** (1 / s)
    return scalar_report(
        "dyadic_bound",
        _params(m, a=a, p=p, q=q, kappa=kappa, l=l, R=R),
        lhs, rhs, tolerance, worst_point=R,
        resolution={"quad_tol": tol, "s": s, "C_excess": c_excess, "shell_integral": shells,
                    "shell_bound": shell_bound, "rho_q_norm": rho_q},
        extra_conditions=[
            ("dyadic shell bound", bool(tolerance.slack(shells, shell_bound) >= 0)),
            ("Hoelder split", bool(tolerance.slack(ball_q ** (1 / p), hoelder_rhs) >= 0)),
        ],
    )


def _gradient_terms(m, lam, a, p, q, R, tol):
    ric = curvature_norm(m, lam, a, p, R, tol)
    rho = gradient_norm(m, a, q, R, tol)
    return ric, rho, math.sqrt(ric) + math.sqrt(rho) + rho


def check_psi_lp(
    m: RadialManifold, lam: float, a: float, p: float, q: float, kappa: Optional[float], l: float,
    R: float, tol: float = NESTED_TOL, tolerance: Tolerance = DEFAULT_TOLERANCE, monotone_points: int = 16,
) -> CheckReport:
    """||psi||_{2p,f,a} <= C_psi_lp(R) (||Ric_-||_p^{1/2} + ||rho||_q^{1/2} + ||rho||_q)."""
    _require_radius(m, lam, R)
    if kappa is None:
        kappa = kappa_for_growth(m, l, R)
    const = explicit_constants(m.n, p, q, kappa, l, lam, a, R)
    lhs = psi_norm(m, lam, a, 2 * p, R, tol)
    ric, rho, bracket = _gradient_terms(m, lam, a, p, q, R, tol)
    radii = np.linspace(R / monotone_points, R, monotone_points)
    consts = np.array([psi_lp_constant(const.C_star, lam, l, p, q, t) for t in radii])
    monotone = bool(np.all(np.diff(consts) >= -1e-14 * consts[1:]))
    return scalar_report(
        "psi_lp",
        _params(m, **{"lambda": lam, "a": a, "p": p, "q": q, "kappa": kappa, "l": l, "R": R}),
        lhs, const.C_psi_lp * bracket, tolerance, worst_point=R,
        resolution={"quad_tol": tol, "C_psi_lp": const.C_psi_lp, "ric_norm": ric, "rho_norm": rho},
        extra_conditions=[("C_psi_lp non-decreasing in R", monotone)],
    )


def _ratio_fd(m, lam, a, R, transform=lambda x: x):
    h = max(1e-4, 1e-3 * R)
    if R + h > m.r_max:
        raise ValueError(f"R + h = {R + h!r} exceeds r_max = {m.r_max!r}; need R < r_max")
    return finite_difference(lambda t: transform(volume_ratio(m, lam, a, t)), R, h)


def check_ratio_derivative(
    m: RadialManifold, lam: float, a: float, R: float, tol: float = NESTED_TOL,
    tolerance: Tolerance = DERIVATIVE_TOLERANCE, alpha_points: int = 64,
) -> CheckReport:
    """d/dR (vol_f B / v_a) <= e^{aR} omega_lambda(R) |S| / v_a^2 * max alpha * int_B psi dvol_f."""
    _require_radius(m, lam, R, strict=True)
    model = ModelSpace(m.n, lam)
    deriv = _ratio_fd(m, lam, a, R)
    area = unit_sphere_area(m.n)
    v_a = weighted_ball_volume_model(model, a, R, tol=VOLUME_FD_TOL)
    alpha_max = float(np.max(alpha_on_grid(model, np.linspace(R / alpha_points, R, alpha_points))))
    pts = _kinks(m, lam, a, R)
    psi_mass = area * radial_integral(m, lambda r: psi(m, lam, a, r), R, 0.0, tol, points=pts)
    rhs = math.exp(a * R) * float(omega_model(model, R)) * area / v_a**2 * alpha_max * psi_mass
    return scalar_report(
        "ratio_derivative",
        _params(m, **{"lambda": lam, "a": a, "R": R}),
        deriv.value, rhs, tolerance, worst_point=R,
        resolution={"quad_tol": tol, "fd_error": deriv.error_estimate, "alpha_max": alpha_max,
                    "psi_mass": psi_mass},
    )


def check_ratio_derivative_reduced(
    m: RadialManifold, lam: float, a: float, p: float, R: float, tol: float = NESTED_TOL,
    tolerance: Tolerance = DERIVATIVE_TOLERANCE,
) -> CheckReport:
    """d/dR (vol_f B / v_a)^{1/(2p)} <= C(n,p) e^{aR(1+1/(2p))} R^{-n/(2p)} ||psi||_{2p,f,a}."""
    _require_radius(m, lam, R, strict=True)
    deriv = _ratio_fd(m, lam, a, R, transform=lambda x: x ** (1 / (2 * p)))
    c = ratio_derivative_constant(m.n, p, lam, a, R)
    norm = psi_norm(m, lam, a, 2 * p, R, tol)
    rhs = c * R ** (-m.n / (2 * p)) * norm
    return scalar_report(
        "ratio_derivative_reduced",
        _params(m, **{"lambda": lam, "a": a, "p": p, "R": R}),
        deriv.value, rhs, tolerance, worst_point=R,
        resolution={"quad_tol": tol, "fd_error": deriv.error_estimate, "C_ratio": c, "psi_norm": norm},
    )


def _comparison_lhs(m, lam, a, p, r, R):
    if not 0 < r <= R:
        raise ValueError(f"need 0 < r <= R (r = {r!r}, R = {R!r})")
    root = 1 / (2 * p)
    return volume_ratio(m, lam, a, R) ** root - volume_ratio(m, lam, a, r) ** root


def _scaling_bounded(constant_at: Callable[[float], float], n: int, p: float, R: float, decades: int = 2) -> tuple[bool, float]:
    """C(t)/t^{1-n/(2p)} on t = R .. R 10^{-decades} stays below its value at R."""
    expo = 1 - n / (2 * p)
    radii = R * np.logspace(0, -decades, 9)
    scaled = np.array([constant_at(t) / t**expo for t in radii])
    return bool(np.all(scaled <= scaled[0] * (1 + 1e-12))), float(np.max(scaled) / np.min(scaled))


def check_main_theorem(
    m: RadialManifold, lam: float, a: float, p: float, q: float, l: float, r: float, R: float,
    R0: Optional[float] = None, tol: float = NESTED_TOL, tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """(vol_f B(R)/v_a(R))^{1/2p} - (vol_f B(r)/v_a(r))^{1/2p}
    <= C_thm(R) (||Ric_-||_p^{1/2} + ||rho||_q^{1/2} + ||rho||_q), with kappa computed on (0, R0]."""
    R0 = R if R0 is None else R0
    if not R <= R0 <= m.r_max:
        raise ValueError(f"need R <= R0 <= r_max (R = {R!r}, R0 = {R0!r}, r_max = {m.r_max!r})")
    _require_radius(m, lam, R)
    kappa = kappa_for_growth(m, l, R0)
    const = explicit_constants(m.n, p, q, kappa, l, lam, a, R)
    lhs = _comparison_lhs(m, lam, a, p, r, R)
    ric, rho, bracket = _gradient_terms(m, lam, a, p, q, R, tol)

    def c_at(t):
        c_psi = psi_lp_constant(const.C_star, lam, l, p, q, t)
        return theorem_constant(ratio_derivative_constant(m.n, p, lam, a, t), c_psi, m.n, p, t)

    bounded, spread = _scaling_bounded(c_at, m.n, p, R)
    notes = ()
    if lam > 0:
        notes = ("lambda > 0: comparison inequality tested under R <= pi/(2 sqrt(lambda))",)
    return scalar_report(
        "main_theorem",
        _params(m, **{"lambda": lam, "a": a, "p": p, "q": q, "l": l, "r": r, "R": R, "R0": R0}),
        lhs, const.C_thm * bracket, tolerance, worst_point=(r, R),
        resolution={"quad_tol": tol, "kappa": kappa, "C_thm": const.C_thm, "ric_norm": ric,
                    "rho_norm": rho, "scaling_spread": spread},
        extra_conditions=[("C(R)/R^(1-n/(2p)) bounded as R decreases", bounded)],
        notes=notes,
    )


def _loglog_slope(constant_at: Callable[[float], float], R: float, points: int = 11) -> float:
    radii = np.geomspace(R / 10, R, points)
    logs = np.log([constant_at(t) for t in radii])
    return float(np.polyfit(np.log(radii), logs, 1)[0])


def check_petersen_wei(
    m: RadialManifold, lam: float, p: float, r: float, R: float, tol: float = NESTED_TOL,
    tolerance: Tolerance = DEFAULT_TOLERANCE, slope_tol: float = 0.1,
) -> CheckReport:
    """Unweighted case: (vol B(R)/v(R))^{1/2p} - (vol B(r)/v(r))^{1/2p} <= C ||Ric^lambda_-||_p^{1/2},
    with C = O(R^{1-n/(2p)}) confirmed by a log-log slope fit over one decade of R."""
    if not m.weight_is_trivial:
        raise ValueError("unweighted comparison needs f == 0")
    if lam > 0:
        raise ValueError("unweighted comparison is stated for lambda <= 0")
    _require_radius(m, lam, R)
    const = gradient_free_constants(m.n, p, lam, 0.0, R)
    lhs = _comparison_lhs(m, lam, 0.0, p, r, R)
    ric = curvature_norm(m, lam, 0.0, p, R, tol)
    slope = _loglog_slope(lambda t: gradient_free_constants(m.n, p, lam, 0.0, t).C_thm, R)
    expected = 1 - m.n / (2 * p)
    return scalar_report(
        "petersen_wei",
        _params(m, **{"lambda": lam, "p": p, "r": r, "R": R}),
        lhs, const.C_thm * math.sqrt(ric), tolerance, worst_point=(r, R),
        resolution={"quad_tol": tol, "C": const.C_thm, "ric_norm": ric,
                    "loglog_slope": slope, "expected_slope": expected},
        extra_conditions=[(f"log-log slope within {slope_tol} of 1 - n/(2p)", abs(slope - expected) <= slope_tol)],
    )


def _sup_abs_gradient(m: RadialManifold, R: float) -> float:
    top = m.r_max if math.isfinite(m.r_max) else max(100.0, 100.0 * R)
    grid = np.unique(np.concatenate([np.linspace(0.0, top, 20001), np.geomspace(1e-6, top, 2001)]))
    return float(np.max(np.abs(m.f.d1(grid))))


def check_bounded_gradient_remark(
    m: RadialManifold, lam: float, a: float, p: float, r: float, R: float, tol: float = NESTED_TOL,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """With |f'| <= a everywhere the excess-gradient terms vanish and no growth pair is needed."""
    sup = _sup_abs_gradient(m, R)
    if sup > a + 1e-12:
        raise ValueError(f"gradient bound violated: sup |f'| = {sup!r} > a = {a!r}")
    _require_radius(m, lam, R)
    const = gradient_free_constants(m.n, p, lam, a, R)
    lhs = _comparison_lhs(m, lam, a, p, r, R)
    ric = curvature_norm(m, lam, a, p, R, tol)
    return scalar_report(
        "bounded_gradient_remark",
        _params(m, **{"lambda": lam, "a": a, "p": p, "r": r, "R": R}),
        lhs, const.C_thm * math.sqrt(ric), tolerance, worst_point=(r, R),
        resolution={"quad_tol": tol, "C": const.C_thm, "ric_norm": ric, "sup_grad_f": sup},
    )


CHECKS: dict[str, Callable[..., CheckReport]] = {
    "riccati": check_riccati,
    "integral_estimate": check_integral_estimate,
    "dyadic_bound": check_dyadic_bound,
    "psi_lp": check_psi_lp,
    "ratio_derivative": check_ratio_derivative,
    "ratio_derivative_reduced": check_ratio_derivative_reduced,
    "main_theorem": check_main_theorem,
    "petersen_wei": check_petersen_wei,
    "bounded_gradient_remark": check_bounded_gradient_remark,
}
