"""Named weighted warped products with closed-form geometry."""

from __future__ import annotations

import math
from typing import Any, Callable, Mapping

import numpy as np

from .radial_manifold import RadialManifold, RadialProfile

__all__ = [
    "euclidean",
    "hyperbolic",
    "sphere",
    "gaussian_soliton",
    "bounded_weight",
    "perturbed",
    "linear_weight",
    "CATALOG",
    "make_manifold",
    "parse_manifold_spec",
]


def _arr(r):
    return np.asarray(r, dtype=float)


def _flat_phi() -> RadialProfile:
    return RadialProfile(
        lambda r: _arr(r).copy(),
        lambda r: np.ones_like(_arr(r)),
        lambda r: np.zeros_like(_arr(r)),
        "r",
    )


def euclidean(n: int) -> RadialManifold:
    return RadialManifold(n, _flat_phi(), RadialProfile.zero(), math.inf, "euclidean")


def hyperbolic(n: int, k: float = 1.0) -> RadialManifold:
    if k <= 0:
        raise ValueError("hyperbolic curvature scale k must be > 0")
    s = math.sqrt(k)
    phi = RadialProfile(
        lambda r: np.sinh(s * _arr(r)) / s,
        lambda r: np.cosh(s * _arr(r)),
        lambda r: s * np.sinh(s * _arr(r)),
        f"sinh({s}r)/{s}",
    )
    return RadialManifold(n, phi, RadialProfile.zero(), math.inf, f"hyperbolic(k={k:g})")


def sphere(n: int, k: float = 1.0) -> RadialManifold:
    if k <= 0:
        raise ValueError("sphere curvature scale k must be > 0")
    s = math.sqrt(k)
    phi = RadialProfile(
        lambda r: np.sin(s * _arr(r)) / s,
        lambda r: np.cos(s * _arr(r)),
        lambda r: -s * np.sin(s * _arr(r)),
        f"sin({s}r)/{s}",
    )
    return RadialManifold(n, phi, RadialProfile.zero(), math.pi / (2 * s), f"sphere(k={k:g})")


def gaussian_soliton(n: int, c: float = 0.25) -> RadialManifold:
    """Flat space with weight c r^2; c = 1/4 is the shrinking Gaussian soliton."""
    if c <= 0:
        raise ValueError("soliton constant c must be > 0")
    f = RadialProfile(
        lambda r: c * _arr(r) ** 2,
        lambda r: 2 * c * _arr(r),
        lambda r: np.full_like(_arr(r), 2 * c),
        f"{c}r^2",
    )
    return RadialManifold(n, _flat_phi(), f, math.inf, f"gaussian_soliton(c={c:g})")


def bounded_weight(n: int, b: float = 0.5) -> RadialManifold:
    """Flat space with f = b log(1 + r^2), so |f'| <= b."""
    if b < 0:
        raise ValueError("b must be >= 0")
    f = RadialProfile(
        lambda r: b * np.log1p(_arr(r) ** 2),
        lambda r: 2 * b * _arr(r) / (1 + _arr(r) ** 2),
        lambda r: 2 * b * (1 - _arr(r) ** 2) / (1 + _arr(r) ** 2) ** 2,
        f"{b}log(1+r^2)",
    )
    return RadialManifold(n, _flat_phi(), f, math.inf, f"bounded_weight(b={b:g})")


def perturbed(n: int, eps: float = 0.02) -> RadialManifold:
    """phi = r + eps r^3; for eps < 0 the domain stops where phi' vanishes."""
    phi = RadialProfile(
        lambda r: _arr(r) + eps * _arr(r) ** 3,
        lambda r: 1 + 3 * eps * _arr(r) ** 2,
        lambda r: 6 * eps * _arr(r),
        f"r+{eps}r^3",
    )
    r_max = math.inf if eps >= 0 else 1.0 / math.sqrt(3 * -eps)
    return RadialManifold(n, phi, RadialProfile.zero(), r_max, f"perturbed(eps={eps:g})")


def linear_weight(n: int, s: float = 1.0, delta: float = 0.1) -> RadialManifold:
    """Flat space with f = s r away from the pole, C^2-smoothed on [0, delta].

    On [0, delta], f' = s (2u - u^2) with u = r/delta, so f'(0) = 0 and f'' is
    continuous at delta.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")

    def value(r):
        r = _arr(r)
        u = np.minimum(r / delta, 1.0)
        inner = s * delta * (u**2 - u**3 / 3)
        return np.where(r <= delta, inner, s * r - s * delta / 3)

    def d1(r):
        r = _arr(r)
        u = np.minimum(r / delta, 1.0)
        return s * (2 * u - u**2)

    def d2(r):
        r = _arr(r)
        u = np.minimum(r / delta, 1.0)
        return np.where(r <= delta, s * (2 - 2 * u) / delta, 0.0)

    f = RadialProfile(value, d1, d2, f"{s}r smoothed on [0,{delta}]")
    return RadialManifold(n, _flat_phi(), f, math.inf, f"linear_weight(s={s:g})")


CATALOG: dict[str, tuple[Callable[..., RadialManifold], dict[str, float]]] = {
    "euclidean": (euclidean, {}),
    "hyperbolic": (hyperbolic, {"k": 1.0}),
    "sphere": (sphere, {"k": 1.0}),
    "gaussian_soliton": (gaussian_soliton, {"c": 0.25}),
    "bounded_weight": (bounded_weight, {"b": 0.5}),
    "perturbed": (perturbed, {"eps": 0.02}),
    "linear_weight": (linear_weight, {"s": 1.0, "delta": 0.1}),
}


def make_manifold(name: str, n: int, params: Mapping[str, Any] | None = None) -> RadialManifold:
    if name not in CATALOG:
        raise ValueError(f"unknown catalog manifold {name!r}; known: {sorted(CATALOG)}")
    ctor, defaults = CATALOG[name]
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for {name!r}")
    kwargs = {**defaults, **{k: float(v) for k, v in params.items()}}
    return ctor(int(n), **kwargs)


def parse_manifold_spec(spec: str) -> tuple[str, dict[str, float]]:
    """``"hyperbolic:k=2"`` -> ``("hyperbolic", {"k": 2.0})``."""
    name, _, rest = spec.partition(":")
    params: dict[str, float] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"bad manifold parameter {item!r}, expected key=value")
        params[key.strip()] = float(val)
    return name.strip(), params
