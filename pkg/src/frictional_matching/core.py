"""Shared domain types: circular type space, preference densities, surplus.

Agent and firm types live on the unit circle [0, 1).  All densities are
discretized on a uniform periodic grid and integrated with the midpoint
rule (uniform weights 1/n), which is exact for constants and has no
endpoint artifacts on a circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "circular_distance",
    "quadrature",
    "PreferenceDistribution",
    "make_preference",
    "SurplusFunction",
    "FrictionParams",
    "ShareProfile",
]

MASS_TOL = 1e-9


def circular_distance(x, y):
    """Distance on the unit circle: min over k of |x - y + k|, in [0, 1/2].

    Accepts scalars or arrays; inputs outside [0, 1) are wrapped modulo 1.
    """
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) % 1.0
    out = np.minimum(d, 1.0 - d)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of n_points cells on [0, 1).

    Point i sits at i/n and represents the cell of width 1/n centered on it.
    """

    n_points: int

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n_points

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n_points) / self.n_points

    def integrate(self, values) -> float:
        """Midpoint-rule integral over the circle; exact for constants."""
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.n_points:
            raise ValueError("values do not match grid size")
        return float(np.mean(values, axis=-1)) if values.ndim == 1 else np.mean(values, axis=-1)

    def nearest_index(self, x: float) -> int:
        return int(np.round((x % 1.0) * self.n_points)) % self.n_points

    def distance_matrix(self) -> np.ndarray:
        """(n, n) matrix of circular distances between grid points."""
        pts = self.points
        return circular_distance(pts[:, None], pts[None, :])


def quadrature(values, grid: Grid | None = None) -> float:
    """Integral of per-cell values over the circle (uniform weights 1/n)."""
    if grid is not None:
        return grid.integrate(values)
    return float(np.mean(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class PreferenceDistribution:
    """Density ell(x) of agent types on the circle, normalized to mass 1.

    This is also the frictionless firm-size distribution: absent frictions
    every agent matches its favorite firm.
    """

    grid: Grid
    density: np.ndarray

    def __post_init__(self):
        density = np.asarray(self.density, dtype=float)
        if density.shape != (self.grid.n_points,):
            raise ValueError("density does not match grid")
        if np.any(density < 0):
            raise ValueError("density must be nonnegative")
        mass = quadrature(density)
        if mass <= 0:
            raise ValueError("density is identically zero")
        object.__setattr__(self, "density", density / mass)

    @property
    def mass(self) -> float:
        return quadrature(self.density)


def _wrapped_gaussian(points: np.ndarray, center: float, sd: float) -> np.ndarray:
    # 11 wraps is plenty for sd up to ~1
    k = np.arange(-5, 6)
    z = (points[:, None] - center + k[None, :]) / sd
    return np.exp(-0.5 * z**2).sum(axis=1)


def make_preference(kind: str, grid: Grid, **params) -> PreferenceDistribution:
    """Build a normalized preference density on the grid.

    Supported kinds:
      - "uniform"
      - "block": lo, hi, height — indicator height * 1[lo <= x <= hi],
        evaluated at cell centers
      - "wrapped_gaussian": center, sd
      - "skew_gaussian": center, sd_left, sd_right — two-sided Gaussian
        (different widths on each side of the peak; unimodal but skewed,
        so the median and the mode separate)
      - "double_peak": centers, sds, weights (two wrapped Gaussians)
    """
    pts = grid.points
    if kind == "uniform":
        density = np.ones_like(pts)
    elif kind == "block":
        lo, hi = params["lo"], params["hi"]
        height = params.get("height", 1.0)
        if not lo < hi:
            raise ValueError(f"block needs lo < hi, got {lo}, {hi}")
        x = pts % 1.0
        if hi <= 1.0:
            inside = (x >= lo) & (x <= hi)
        else:  # block wrapping past 1
            inside = (x >= lo) | (x <= hi - 1.0)
        density = np.where(inside, float(height), 0.0)
    elif kind == "wrapped_gaussian":
        sd = params["sd"]
        if sd <= 0:
            raise ValueError("sd must be positive")
        density = _wrapped_gaussian(pts, params["center"], sd)
    elif kind == "skew_gaussian":
        sd_left = params["sd_left"]
        sd_right = params["sd_right"]
        if sd_left <= 0 or sd_right <= 0:
            raise ValueError("sd_left and sd_right must be positive")
        delta = (pts - params["center"] + 0.5) % 1.0 - 0.5
        sd = np.where(delta < 0, sd_left, sd_right)
        density = np.exp(-0.5 * (delta / sd) ** 2)
    elif kind == "double_peak":
        centers = params["centers"]
        sds = params["sds"]
        weights = params.get("weights", (0.5, 0.5))
        if len(centers) != 2 or len(sds) != 2 or len(weights) != 2:
            raise ValueError("double_peak needs two centers, sds and weights")
        density = np.zeros_like(pts)
        for c, sd, w in zip(centers, sds, weights):
            if sd <= 0 or w < 0:
                raise ValueError("sds must be positive and weights nonnegative")
            comp = _wrapped_gaussian(pts, c, sd)
            density += w * comp / quadrature(comp)
    else:
        raise ValueError(f"unknown preference kind {kind!r}")
    return PreferenceDistribution(grid, density)


@dataclass(frozen=True)
class SurplusFunction:
    """Match value sigma(x, y) = f(d(x, y)) with f strictly decreasing.

    Heterogeneous rankings come from the circular distance: each agent x
    ranks firms by proximity to x.  Default is the linear form f(d) = 1 - d.
    """

    kind: str = "linear"
    scale: float = 1.0

    def transform(self, d):
        """Apply f to a circular distance (scalar or array)."""
        d = np.asarray(d, dtype=float)
        if self.kind == "linear":
            out = self.scale * (1.0 - d)
        elif self.kind == "exponential":
            out = self.scale * np.exp(-d)
        else:
            raise ValueError(f"unknown surplus kind {self.kind!r}")
        if np.ndim(out) == 0:
            return float(out)
        return out

    def __call__(self, x, y):
        return self.transform(circular_distance(x, y))


def surplus(sf: SurplusFunction, x, y):
    """Match value of an (x, y) pair; equals f(circular_distance(x, y))."""
    return sf(x, y)


@dataclass(frozen=True)
class FrictionParams:
    """Friction primitives: exit rate mu, total meeting intensity lambda_tot,
    unmatched-to-matched rate ratio K, and meeting-rate slope alpha.

    alpha = 0 is constant (random) meeting, alpha = 1 proportional
    (balanced) meeting; r_f = mu / lambda_tot measures friction intensity.
    """

    mu: float
    lambda_tot: float
    K: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.lambda_tot <= 0:
            raise ValueError("lambda_tot must be positive")
        if self.K <= 0:
            raise ValueError("K must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def r_f(self) -> float:
        return self.mu / self.lambda_tot

    @classmethod
    def from_r_f(cls, r_f: float, alpha: float = 0.0, K: float = 1.0,
                 lambda_tot: float = 1.0) -> "FrictionParams":
        """Convenience constructor pinning the intensity ratio directly."""
        return cls(mu=r_f * lambda_tot, lambda_tot=lambda_tot, K=K, alpha=alpha)


@dataclass(frozen=True)
class ShareProfile:
    """Rescaled market-share density s(y) on a grid; integrates to 1.

    s(y) is the continuum analogue of a market share: with N firms the
    true share of firm y is roughly s(y)/N, so s can exceed 1 locally.
    """

    grid: Grid
    shares: np.ndarray
    mass_tol: float = field(default=1e-6, compare=False)

    def __post_init__(self):
        shares = np.asarray(self.shares, dtype=float)
        if shares.shape != (self.grid.n_points,):
            raise ValueError("shares do not match grid")
        if np.any(shares < 0):
            raise ValueError("shares must be nonnegative")
        mass = quadrature(shares)
        if abs(mass - 1.0) > self.mass_tol:
            raise ValueError(f"share mass {mass} deviates from 1 beyond {self.mass_tol}")
        object.__setattr__(self, "shares", shares)
