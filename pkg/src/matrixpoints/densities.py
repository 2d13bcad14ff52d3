"""Limiting densities of normalized errors and their interval probabilities."""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError


class DensityKind(str, enum.Enum):
    SEMICIRCLE = "semicircle"
    ARCSINE = "arcsine"
    B1 = "b1"  # original Batman
    B2 = "b2"  # half-Batman
    B3 = "b3"  # flying Batman
    B4 = "b4"  # half-flying Batman

    @property
    def support(self) -> tuple[float, float]:
        return SUPPORT[self]


SUPPORT = {
    DensityKind.SEMICIRCLE: (-2.0, 2.0),
    DensityKind.ARCSINE: (-2.0, 2.0),
    DensityKind.B1: (-3.0, 3.0),
    DensityKind.B2: (-1.0, 3.0),
    DensityKind.B3: (-3.0, 3.0),
    DensityKind.B4: (-1.0, 3.0),
}

# points where a density has an integrable singularity or changes formula
_BREAKS = {
    DensityKind.SEMICIRCLE: (-2.0, 2.0),
    DensityKind.ARCSINE: (-2.0, 2.0),
    DensityKind.B1: (-3.0, -1.0, 1.0, 3.0),
    DensityKind.B2: (-1.0, 3.0),
    DensityKind.B3: (-3.0, -1.0, 1.0, 3.0),
    DensityKind.B4: (-1.0, 3.0),
}


def as_kind(kind) -> DensityKind:
    try:
        return DensityKind(str(kind.value if isinstance(kind, DensityKind) else kind).lower())
    except ValueError:
        names = ", ".join(k.value for k in DensityKind)
        raise DomainError(f"unknown density {kind!r}; expected one of {names}") from None


def _sqrt_pos(x):
    """sqrt of x where x > 0, nan elsewhere (callers mask those points)."""
    return np.sqrt(np.where(x > 0, x, np.nan))


def _semicircle(t):
    return np.where(np.abs(t) <= 2, np.sqrt(np.clip(4 - t * t, 0, None)) / (2 * math.pi), 0.0)


def _arcsine(t):
    return np.where(np.abs(t) < 2, 1 / (math.pi * _sqrt_pos(4 - t * t)), 0.0)


def _b1(t):
    a = np.abs(t)
    inner = (3 + t) / (4 * math.pi * _sqrt_pos(3 - 2 * t - t * t)) + (3 - t) / (
        4 * math.pi * _sqrt_pos(3 + 2 * t - t * t)
    )
    outer = (3 - a) / (4 * math.pi * _sqrt_pos(3 + 2 * a - a * a))
    return np.where(a < 1, inner, np.where(a < 3, outer, 0.0))


def _b2(t):
    return np.where((t > -1) & (t <= 3), _sqrt_pos((3 - t) / (1 + t)) / (2 * math.pi), 0.0)


def _b3(t):
    a = np.abs(t)
    inner = 1 / (2 * math.pi * _sqrt_pos(3 - 2 * t - t * t)) + 1 / (2 * math.pi * _sqrt_pos(3 + 2 * t - t * t))
    outer = 1 / (2 * math.pi * _sqrt_pos(3 + 2 * a - a * a))
    return np.where(a < 1, inner, np.where(a < 3, outer, 0.0))


def _b4(t):
    return np.where((t > -1) & (t < 3), 1 / (math.pi * _sqrt_pos(3 + 2 * t - t * t)), 0.0)


_FUNCS = {
    DensityKind.SEMICIRCLE: _semicircle,
    DensityKind.ARCSINE: _arcsine,
    DensityKind.B1: _b1,
    DensityKind.B2: _b2,
    DensityKind.B3: _b3,
    DensityKind.B4: _b4,
}


def density(kind, t):
    """Pointwise density; 0 outside the support. Accepts scalars or arrays.

    At the boundary points where a formula is singular (arcsine at +-2, B2
    and B4 at -1, B3 at +-3 ...) the value 0 is returned.
    """
    f = _FUNCS[as_kind(kind)]
    arr = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = f(arr)
    out = np.where(np.isfinite(out), out, 0.0)
    return float(out) if out.ndim == 0 else out


def _piece(f, lo: float, hi: float, u: float, v: float) -> float:
    """Integral of f over [u, v] inside a cell [lo, hi] whose ends may carry
    inverse-square-root singularities.

    t = lo + (hi - lo)(1 - cos phi)/2 makes dt vanish like the singularity
    blows up, so the transformed integrand is bounded.
    """
    if v <= u:
        return 0.0
    half = (hi - lo) / 2

    def phi_of(t):
        return math.acos(min(1.0, max(-1.0, 1 - (t - lo) / half)))

    def g(phi):
        t = lo + half * (1 - math.cos(phi))
        return float(density_scalar(f, t)) * half * math.sin(phi)

    val, _ = integrate.quad(g, phi_of(u), phi_of(v), epsabs=1e-11, epsrel=1e-11, limit=200)
    return val


def density_scalar(f, t: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        y = float(f(np.float64(t)))
    return y if math.isfinite(y) else 0.0


def interval_probability(kind, a: float, b: float) -> float:
    """Integral of the density over [a, b]."""
    kind = as_kind(kind)
    if b < a:
        return -interval_probability(kind, b, a)
    f = _FUNCS[kind]
    breaks = _BREAKS[kind]
    total = 0.0
    for lo, hi in zip(breaks, breaks[1:]):
        total += _piece(f, lo, hi, max(a, lo), min(b, hi))
    return total


def cdf(kind, t: float) -> float:
    kind = as_kind(kind)
    lo, _ = kind.support
    return interval_probability(kind, lo, t)


@lru_cache(maxsize=64)
def _cdf_on_grid_cached(kind: DensityKind, grid: tuple[float, ...]) -> np.ndarray:
    lo = kind.support[0]
    cells = [interval_probability(kind, lo, grid[0])]
    cells += [interval_probability(kind, u, v) for u, v in zip(grid, grid[1:])]
    return np.cumsum(cells)


def cdf_on_grid(kind, grid) -> np.ndarray:
    """CDF at each point of an ascending grid, integrated cell by cell."""
    return _cdf_on_grid_cached(as_kind(kind), tuple(float(g) for g in grid)).copy()


def default_grid(kind, points: int = 401) -> np.ndarray:
    lo, hi = as_kind(kind).support
    return np.linspace(lo, hi, points)
