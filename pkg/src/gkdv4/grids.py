"""Uniform 1-D grids, sampled fields, quadrature and finite differences.

Everything downstream (profiles, BVP solves, certificate integrals) runs on a
uniform grid.  Integration is composite trapezoid, which for the smooth,
exponentially decaying integrands of this package converges faster than any
power of h (Euler-Maclaurin: all boundary corrections are exponentially
small).  Differentiation is 4th-order centered, one-sided at the edges; the
outermost EDGE_BAND points are untrusted and excluded from norms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

# Width of the boundary band whose finite-difference values are not trusted.
EDGE_BAND = 3


class DomainTooSmallError(ValueError):
    """Grid does not span the interval an operation requires."""


class GridTooCoarseError(ValueError):
    """Grid has too few points for the requested stencil."""


class TailNotDecayedWarning(UserWarning):
    """Integrand is not negligible at the grid ends."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = x_min + i*h, i = 0..n-1, with h = (x_max-x_min)/(n-1)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"need n >= 16, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("need x_max > x_min")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n)

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid":
        n = int(round((x_max - x_min) / h)) + 1
        return cls(x_min, x_min + (n - 1) * h, n)

    def requires_span(self, lo: float, hi: float) -> None:
        if self.x_min > lo or self.x_max < hi:
            raise DomainTooSmallError(
                f"grid [{self.x_min}, {self.x_max}] does not cover [{lo}, {hi}]"
            )

    def index_of(self, x0: float) -> int:
        """Index of the grid point closest to x0."""
        return int(round((x0 - self.x_min) / self.h))


@dataclass(frozen=True)
class SampledField:
    """Real samples of a function on a grid.  Values are never mutated."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def interior_max_norm(self, x_cut: float | None = None) -> float:
        """Max norm excluding the untrusted edge band, optionally on |x| <= x_cut."""
        v = self.values[EDGE_BAND:-EDGE_BAND]
        if x_cut is not None:
            x = self.x[EDGE_BAND:-EDGE_BAND]
            v = v[np.abs(x) <= x_cut]
        return float(np.max(np.abs(v)))


def integrate(f, h: float | None = None, check_tails: bool = True,
              tail_tol: float = 1e-12) -> float:
    """Composite trapezoid integral of a SampledField or (values, h) pair.

    Warns if the integrand has not decayed below tail_tol (relative to its
    max) at the grid ends, unless check_tails is False.
    """
    if isinstance(f, SampledField):
        v, h = f.values, f.grid.h
    else:
        v = np.asarray(f, dtype=float)
        if h is None:
            raise ValueError("h required when passing raw values")
    if check_tails:
        scale = np.max(np.abs(v))
        if scale > 0 and max(abs(v[0]), abs(v[-1])) > tail_tol * scale:
            warnings.warn(
                f"integrand tails not decayed: |ends| = {abs(v[0]):.2e}, {abs(v[-1]):.2e}",
                TailNotDecayedWarning, stacklevel=2)
    return float(np.trapezoid(v, dx=h))


def inner(fv: np.ndarray, gv: np.ndarray, h: float) -> float:
    """Plain L2 inner product by trapezoid."""
    return float(np.trapezoid(fv * gv, dx=h))


def _check_width(n: int, width: int):
    if n < width:
        raise GridTooCoarseError(f"need at least {width} points, got {n}")


def fd1(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative, 4th-order centered, one-sided at the 2-point edges."""
    v = np.asarray(values, dtype=float)
    _check_width(v.size, 7)
    d = np.empty_like(v)
    d[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    # 4th-order one-sided stencils
    c = np.array([-25, 48, -36, 16, -3], dtype=float) / (12 * h)
    for i in (0, 1):
        d[i] = np.dot(c, v[i:i + 5])
        d[-1 - i] = -np.dot(c, v[-1 - i - 4:v.size - i][::-1])
    return d


def fd2(values: np.ndarray, h: float) -> np.ndarray:
    """Second derivative, 4th-order centered, one-sided at the edges."""
    v = np.asarray(values, dtype=float)
    _check_width(v.size, 7)
    d = np.empty_like(v)
    d[2:-2] = (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)
    c = np.array([45, -154, 214, -156, 61, -10], dtype=float) / (12 * h * h)
    for i in (0, 1):
        d[i] = np.dot(c, v[i:i + 6])
        d[-1 - i] = np.dot(c, v[-1 - i - 5:v.size - i][::-1])
    return d


def fd3(values: np.ndarray, h: float) -> np.ndarray:
    """Third derivative, 4th-order centered (7-point); 2nd-order near edges."""
    v = np.asarray(values, dtype=float)
    _check_width(v.size, 9)
    d = np.empty_like(v)
    d[3:-3] = (v[:-6] - 8 * v[1:-5] + 13 * v[2:-4]
               - 13 * v[4:-2] + 8 * v[5:-1] - v[6:]) / (8 * h ** 3)
    # 2nd-order centered at offsets 2 from each edge
    cc = np.array([-1, 2, 0, -2, 1], dtype=float) / (2 * h ** 3)
    for i in (2, v.size - 3):
        d[i] = np.dot(cc, v[i - 2:i + 3])
    # one-sided 2nd-order at the outermost pairs
    co = np.array([-5, 18, -24, 14, -3], dtype=float) / (2 * h ** 3)
    for i in (0, 1):
        d[i] = np.dot(co, v[i:i + 5])
        d[-1 - i] = -np.dot(co, v[-1 - i - 4:v.size - i][::-1])
    return d


def cumulative_from_zero(grid: Grid, fv: np.ndarray,
                         fpv: np.ndarray | None = None) -> np.ndarray:
    """Cumulative integral x -> int_0^x f, by trapezoid along the grid.

    The grid must contain x = 0 (up to h/1000).  When the closed-form
    derivative f' is supplied, the Euler-Maclaurin endpoint correction
    -(h^2/12)(f'(x) - f'(0)) is applied, upgrading the cumulative rule to
    4th order without changing its parity behaviour.
    """
    grid.requires_span(0.0, 0.0)
    i0 = grid.index_of(0.0)
    if abs(grid.x[i0]) > grid.h / 1000:
        raise DomainTooSmallError("grid must contain x = 0 for the cumulative integral")
    h = grid.h
    steps = 0.5 * h * (fv[1:] + fv[:-1])
    out = np.concatenate(([0.0], np.cumsum(steps)))
    out -= out[i0]
    if fpv is not None:
        out -= (h * h / 12.0) * (fpv - fpv[i0])
    return out


def log_slope(t: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log(y) against t (y must be positive)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("log_slope needs positive values")
    return float(np.polyfit(t, np.log(y), 1)[0])
