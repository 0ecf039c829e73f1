"""Explicit values for every unnamed constant in the comparison chain.

Notation (all along one ray, w = omega_f e^{-a r}):
    X = int psi^{2p} w,  P = int rho^{2p} w,  Q = int (rho/r)^p w,  K = int (Ric_-)^p w,
    M = max_{0<=t<=R} t sn'/sn.

Integrating the Riccati inequality against psi^{2p-2} w and dropping the
nonnegative boundary term gives

    D X <= 2/(n-1) int psi^{2p-1} rho w + 2 M int psi^{2p-2} (rho/r) w + int psi^{2p-2} Ric_- w,
    D = (2p - n) / ((n-1)(2p-1)).

Three Hoelder steps and division by D X^{(p-1)/p} leave Y^2 <= A Y + B for
Y = X^{1/(2p)} with A = 2 P^{1/(2p)} / ((n-1) D) and B = (2 M Q^{1/p} + K^{1/p}) / D,
hence Y <= A + sqrt(B), and (u+v+w)^{2p} <= 3^{2p-1}(u^{2p}+v^{2p}+w^{2p}) gives

    X <= C1 M^p Q + C2 P + C3 K,
    C1 = 3^{2p-1} (2/D)^p,  C2 = 3^{2p-1} (2/((n-1)D))^{2p},  C3 = 3^{2p-1} D^{-p}.

Dyadic shells with vol_f B(r) <= kappa r^l and 1/s = 1/p - 1/q give

    int_{B(R)} e^{-a r} r^{-s} dvol_f <= kappa 2^s R^{l-s} / (1 - 2^{-(l-s)}) =: C_dyadic R^{l-s},

so the excess-gradient term is bounded with C_excess = C_dyadic^{1/(2s)} and the
exponent (l-s)/(2s) = l/(2p) - l/(2q) - 1/2. Summing rays, the subadditivity of
t -> t^{1/(2p)} and vol_f B(R)^{1/(2p)-1/q} <= (kappa R^l)^{1/(2p)-1/q} give the
L^{2p} bound for psi with

    C_psi_lp(R) = C_star sqrt(M) max(R^{l/(2p)-l/q}, 1),
    C_star = max(C1^{1/(2p)} C_excess, C2^{1/(2p)} kappa^{1/(2p)-1/q}, C3^{1/(2p)}),

which is non-decreasing in R (M >= 1). The ratio derivative is bounded with
C_ratio(R) = (1/(2p)) (sup R^n / v(n,lambda,R))^{1/(2p)} e^{a R (1 + 1/(2p))}, where
sup R^n/v = n/|S^{n-1}| for lambda <= 0 and n/|S^{n-1}| (pi/2)^{n-1} for lambda > 0,
R <= pi/(2 sqrt(lambda)). Integrating the product from r to R with both
factors frozen at R gives C_thm(R) = C_ratio(R) C_psi_lp(R) R^{1-n/(2p)} / (1 - n/(2p)).

When rho_a vanishes identically only the curvature term survives and
Y <= sqrt(B) = D^{-1/2} K^{1/(2p)}, so the gradient-free constant is
C_free(R) = C_ratio(R) D^{-1/2} R^{1-n/(2p)} / (1 - n/(2p)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .model_space import comparison_radius_limit, max_t_sn_ratio, unit_sphere_area

__all__ = [
    "ExplicitConstants",
    "GradientFreeConstants",
    "explicit_constants",
    "gradient_free_constants",
    "riccati_D",
    "integral_estimate_constants",
    "hoelder_exponent_s",
    "dyadic_constant",
    "ratio_derivative_constant",
    "psi_lp_constant",
    "theorem_constant",
]


@dataclass(frozen=True)
class ExplicitConstants:
    n: int
    p: float
    q: float
    kappa: float
    l: float
    lam: float
    a: float
    R: float
    D: float
    s: float
    max_t_sn_ratio: float
    C1: float
    C2: float
    C3: float
    C_dyadic: float
    C_excess: float
    C_star: float
    C_psi_lp: float
    C_ratio: float
    C_thm: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class GradientFreeConstants:
    n: int
    p: float
    lam: float
    a: float
    R: float
    D: float
    C_psi: float
    C_ratio: float
    C_thm: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def riccati_D(n: int, p: float) -> float:
    """(2p - n) / ((n - 1)(2p - 1)); positive iff p > n/2."""
    return (2 * p - n) / ((n - 1) * (2 * p - 1))


def hoelder_exponent_s(p: float, q: float) -> float:
    """s with 1/s = 1/p - 1/q."""
    return 1.0 / (1.0 / p - 1.0 / q)


def integral_estimate_constants(n: int, p: float) -> tuple[float, float, float, float]:
    """(D, C1, C2, C3) for the along-ray psi^{2p} estimate; needs n/2 < p."""
    D = riccati_D(n, p)
    if not D > 0:
        raise ValueError(f"violated: p > n/2 (p = {p!r}, n/2 = {n / 2!r})")
    spread = 3.0 ** (2 * p - 1)
    return D, spread * (2 / D) ** p, spread * (2 / ((n - 1) * D)) ** (2 * p), spread * D ** (-p)


def dyadic_constant(kappa: float, l: float, s: float) -> float:
    """kappa 2^s / (1 - 2^{-(l-s)}), valid for s < l."""
    if not s < l:
        raise ValueError(f"dyadic sum needs s < l (got s = {s!r}, l = {l!r})")
    return kappa * 2.0**s / (1.0 - 2.0 ** (s - l))


def _radius_rule(lam: float, R: float) -> None:
    if not R > 0:
        raise ValueError(f"violated: R > 0 (R = {R!r})")
    limit = comparison_radius_limit(lam)
    if R > limit * (1 + 1e-14):
        raise ValueError(f"violated: R <= pi/(2 sqrt(lambda)) = {limit!r} for lambda = {lam!r}")


def ratio_derivative_constant(n: int, p: float, lam: float, a: float, R: float) -> float:
    """C(n,p) e^{aR(1+1/(2p))} bounding d/dR of the 2p-th root volume ratio."""
    if not p > 0:
        raise ValueError("violated: p > 0")
    _radius_rule(lam, R)
    bound = n / unit_sphere_area(n)
    if lam > 0:
        bound *= (math.pi / 2) ** (n - 1)
    return bound ** (1 / (2 * p)) / (2 * p) * math.exp(a * R * (1 + 1 / (2 * p)))


def psi_lp_constant(c_star: float, lam: float, l: float, p: float, q: float, R: float) -> float:
    e2 = l / (2 * p) - l / q
    return c_star * math.sqrt(max_t_sn_ratio(lam, R)) * max(R**e2, 1.0)


def theorem_constant(c_ratio: float, c_psi: float, n: int, p: float, R: float) -> float:
    expo = 1 - n / (2 * p)
    return c_ratio * c_psi * R**expo / expo


def explicit_constants(
    n: int, p: float, q: float, kappa: float, l: float, lam: float, a: float, R: float
) -> ExplicitConstants:
    """Constant ledger for the weighted comparison chain at the given parameters.

    Raises ValueError naming the first violated hypothesis.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"violated: n integer >= 2 (n = {n!r})")
    n = int(n)
    checks = [
        (p > n / 2, f"p > n/2 (p = {p!r}, n/2 = {n / 2!r})"),
        (p < l, f"p < l (p = {p!r}, l = {l!r})"),
        (l <= n, f"l <= n (l = {l!r}, n = {n})"),
        (kappa > 0, f"kappa > 0 (kappa = {kappa!r})"),
        (a >= 0, f"a >= 0 (a = {a!r})"),
    ]
    for ok, label in checks:
        if not ok:
            raise ValueError(f"violated: {label}")
    q_min = p * l / (l - p)
    if not q > q_min:
        raise ValueError(f"violated: q > p l/(l - p) = {q_min!r} (q = {q!r})")
    _radius_rule(lam, R)

    D, c1, c2, c3 = integral_estimate_constants(n, p)
    s = hoelder_exponent_s(p, q)
    c_dyadic = dyadic_constant(kappa, l, s)
    c_excess = c_dyadic ** (1 / (2 * s))
    c_star = max(
        c1 ** (1 / (2 * p)) * c_excess,
        c2 ** (1 / (2 * p)) * kappa ** (1 / (2 * p) - 1 / q),
        c3 ** (1 / (2 * p)),
    )
    c_psi_lp = psi_lp_constant(c_star, lam, l, p, q, R)
    c_ratio = ratio_derivative_constant(n, p, lam, a, R)
    return ExplicitConstants(
        n=n, p=p, q=q, kappa=kappa, l=l, lam=lam, a=a, R=R,
        D=D, s=s, max_t_sn_ratio=max_t_sn_ratio(lam, R),
        C1=c1, C2=c2, C3=c3,
        C_dyadic=c_dyadic, C_excess=c_excess, C_star=c_star,
        C_psi_lp=c_psi_lp, C_ratio=c_ratio,
        C_thm=theorem_constant(c_ratio, c_psi_lp, n, p, R),
    )


def gradient_free_constants(n: int, p: float, lam: float, a: float, R: float) -> GradientFreeConstants:
    """Constants when |grad f| <= a pointwise: no growth pair (kappa, l) enters."""
    if int(n) != n or n < 2:
        raise ValueError(f"violated: n integer >= 2 (n = {n!r})")
    n = int(n)
    if not p > n / 2:
        raise ValueError(f"violated: p > n/2 (p = {p!r}, n/2 = {n / 2!r})")
    if a < 0:
        raise ValueError(f"violated: a >= 0 (a = {a!r})")
    _radius_rule(lam, R)
    D = riccati_D(n, p)
    c_psi = D ** -0.5
    c_ratio = ratio_derivative_constant(n, p, lam, a, R)
    return GradientFreeConstants(
        n=n, p=p, lam=lam, a=a, R=R, D=D, C_psi=c_psi, C_ratio=c_ratio,
        C_thm=theorem_constant(c_ratio, c_psi, n, p, R),
    )
