"""Adaptive 1-D quadrature and finite-difference derivatives.

Every ball integral in this package reduces to a radial integral because the
manifolds are rotationally symmetric, so a single globally adaptive
Gauss-Kronrod (7, 15) integrator serves all of them.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "QuadratureResult",
    "QuadratureError",
    "DerivativeEstimate",
    "integrate",
    "cumulative_integrals",
    "finite_difference",
]

# Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


class QuadratureError(RuntimeError):
    """Raised when the subdivision budget runs out; carries the best estimate."""

    def __init__(self, message: str, best: QuadratureResult):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    error_estimate: float


def _gk15(g: Integrand, a: float, b: float) -> tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(g(mid + half * _NODES), dtype=float)
    if fx.shape != (15,):
        fx = np.broadcast_to(fx, (15,))
    if not np.all(np.isfinite(fx)):
        raise FloatingPointError(f"non-finite integrand value on [{a!r}, {b!r}]")
    kronrod = half * float(_KRONROD_W @ fx)
    gauss = half * float(_GAUSS_W @ fx)
    return kronrod, abs(kronrod - gauss)


def _substitution_power(exponent: float) -> int:
    if exponent <= -1.0:
        raise ValueError(f"singularity exponent {exponent} is not integrable (need > -1)")
    if exponent >= 0.0:
        return 1
    return max(2, math.ceil(1.0 / (1.0 + exponent) - 1e-12))


def integrate(
    g: Integrand,
    r0: float,
    r1: float,
    tol: float = 1e-9,
    singular_exponent: Optional[float] = None,
    points: Optional[Iterable[float]] = None,
    max_intervals: int = 4000,
) -> QuadratureResult:
    """Integrate ``g`` over ``[r0, r1]`` to ``|error| <= tol * max(1, |value|)``.

    ``g`` must accept a numpy array of abscissae. If the integrand behaves like
    ``(r - r0)**singular_exponent`` near ``r0`` the caller declares the exponent
    and the interval is remapped by ``t = r0 + (r1 - r0) * u**k``, which grades
    the mesh toward ``r0`` and turns the power law into a bounded integrand.
    ``points`` are interior break points (kinks) seeded into the initial mesh.
    """
    r0 = float(r0)
    r1 = float(r1)
    if not (math.isfinite(r0) and math.isfinite(r1)):
        raise ValueError("integration limits must be finite")
    if r1 < r0:
        raise ValueError(f"need r0 <= r1, got [{r0}, {r1}]")
    if r1 == r0:
        return QuadratureResult(0.0, 0.0, 0)

    width = r1 - r0
    k = 1 if singular_exponent is None else _substitution_power(singular_exponent)
    if k == 1:
        h: Integrand = g
        lo, hi = r0, r1
        to_inner = lambda t: t  # noqa: E731
    else:
        def h(u: np.ndarray) -> np.ndarray:
            return np.asarray(g(r0 + width * u**k), dtype=float) * (width * k * u ** (k - 1))

        lo, hi = 0.0, 1.0
        to_inner = lambda t: ((t - r0) / width) ** (1.0 / k)  # noqa: E731

    cuts = sorted({lo, hi, *(to_inner(float(p)) for p in (points or ()) if r0 < float(p) < r1)})

    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    total_err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err = _gk15(h, a, b)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, a, b, val))
    evaluations = 15 * len(heap)

    scale = max(abs(lo), abs(hi))
    while total_err > tol * max(1.0, abs(total)):
        if len(heap) >= max_intervals:
            best = QuadratureResult(total, total_err, evaluations)
            raise QuadratureError(
                f"adaptive quadrature did not converge in {max_intervals} intervals "
                f"(estimate {total!r}, error {total_err:.3e})",
                best,
            )
        neg_err, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if b - a <= 64 * np.finfo(float).eps * max(scale, 1e-300):
            # interval at roundoff resolution: keep it, further bisection cannot help
            heapq.heappush(heap, (0.0, a, b, val))
            total_err += neg_err
            continue
        lval, lerr = _gk15(h, a, mid)
        rval, rerr = _gk15(h, mid, b)
        evaluations += 30
        total += lval + rval - val
        total_err += lerr + rerr + neg_err
        heapq.heappush(heap, (-lerr, a, mid, lval))
        heapq.heappush(heap, (-rerr, mid, b, rval))

    # re-sum to shed accumulated update roundoff
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return QuadratureResult(total, total_err, evaluations)


def cumulative_integrals(
    g: Integrand,
    grid: Sequence[float],
    tol: float = 1e-9,
    singular_exponent: Optional[float] = None,
) -> np.ndarray:
    """Running integrals ``int_{grid[0]}^{grid[i]} g`` for a sorted grid.

    Only the first panel sees ``singular_exponent``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be non-decreasing")
    pieces = np.zeros_like(grid)
    for i in range(1, grid.size):
        exponent = singular_exponent if i == 1 else None
        pieces[i] = integrate(g, grid[i - 1], grid[i], tol=tol, singular_exponent=exponent).value
    return np.cumsum(pieces)


def finite_difference(
    g: Callable[[float], float], r: float, h: Optional[float] = None
) -> DerivativeEstimate:
    """Central difference at ``r`` with one Richardson extrapolation level."""
    if h is None:
        h = max(1e-4, 1e-3 * abs(r))
    coarse = (g(r + h) - g(r - h)) / (2.0 * h)
    half = 0.5 * h
    fine = (g(r + half) - g(r - half)) / (2.0 * half)
    extrapolated = (4.0 * fine - coarse) / 3.0
    return DerivativeEstimate(extrapolated, abs(extrapolated - fine))
