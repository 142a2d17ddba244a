"""Matching efficiency, individual deviation utility and the Nash slope.

The aggregate objective Eff(alpha) is the surplus-weighted mass of matches
at the equilibrium profile induced by the meeting-rate slope alpha.  An
individual choosing her own slope while the population plays alpha_tilde
maximizes the same integral with the population profile held fixed; the
gap between the Nash slope and the social argmax is the concentration
externality.

Values are reported up to a positive constant (the common rate prefactor
is dropped), so only comparisons within a fixed (ell, r_f, surplus) are
meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrictionParams, PreferenceDistribution, SurplusFunction
from .continuum import (
    ALPHA_CAP,
    SolveOptions,
    meeting_kernel_matrix,
    solve_fixed_point,
)

__all__ = [
    "EfficiencyCurve",
    "StrategicOutcome",
    "default_alpha_grid",
    "efficiency",
    "efficiency_curve",
    "agent_utility",
    "best_response",
    "nash_and_social",
]

_TIE_RTOL = 1e-9


def default_alpha_grid(n: int = 41, cap: float = ALPHA_CAP) -> np.ndarray:
    return np.linspace(0.0, cap, n)


@dataclass(frozen=True)
class EfficiencyCurve:
    alphas: np.ndarray
    values: np.ndarray
    argmax_alpha: float


@dataclass(frozen=True)
class StrategicOutcome:
    alpha_grid: np.ndarray
    best_responses: np.ndarray
    nash_alpha: float | None
    social_alpha: float
    externality_gap: float | None
    cycle: tuple = ()
    degenerate: bool = False


def _surplus_integral(ell: PreferenceDistribution, weights: np.ndarray,
                      r_f: float, sf: SurplusFunction) -> float:
    """Surplus-weighted double integral for a given meeting-weight density."""
    grid = ell.grid
    sigma = sf.transform(grid.distance_matrix())
    kern = meeting_kernel_matrix(weights, r_f)
    return float(np.mean(ell.density[:, None] * weights[None, :] * sigma * kern))


def _solve_profile(alpha: float, ell: PreferenceDistribution, r_f: float,
                   opts: SolveOptions | None) -> np.ndarray:
    frictions = FrictionParams.from_r_f(r_f, alpha=min(alpha, 1.0))
    return solve_fixed_point(ell, frictions, opts=opts).profile.shares


def efficiency(alpha: float, ell: PreferenceDistribution, r_f: float,
               sf: SurplusFunction | None = None,
               opts: SolveOptions | None = None) -> float:
    """Aggregate match surplus at the equilibrium induced by alpha
    (up to a positive scale constant)."""
    sf = sf or SurplusFunction()
    s = _solve_profile(alpha, ell, r_f, opts)
    w = alpha * s + (1.0 - alpha)
    return _surplus_integral(ell, w, r_f, sf)


def agent_utility(alpha: float, alpha_tilde: float, ell: PreferenceDistribution,
                  r_f: float, sf: SurplusFunction | None = None,
                  opts: SolveOptions | None = None,
                  population_shares: np.ndarray | None = None) -> float:
    """Expected surplus of one agent deviating to slope alpha while the
    population plays alpha_tilde.

    The population profile s_{alpha_tilde} is held fixed; the deviator's
    alpha reweights her own meeting distribution.  At alpha = alpha_tilde
    this equals efficiency(alpha_tilde) by construction.
    """
    sf = sf or SurplusFunction()
    if population_shares is None:
        population_shares = _solve_profile(alpha_tilde, ell, r_f, opts)
    w = alpha * population_shares + (1.0 - alpha)
    return _surplus_integral(ell, w, r_f, sf)


def efficiency_curve(ell: PreferenceDistribution, r_f: float,
                     sf: SurplusFunction | None = None,
                     alpha_grid: np.ndarray | None = None,
                     opts: SolveOptions | None = None) -> EfficiencyCurve:
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, float)
    values = np.array([efficiency(a, ell, r_f, sf, opts) for a in alphas])
    return EfficiencyCurve(alphas=alphas, values=values,
                           argmax_alpha=float(alphas[int(values.argmax())]))


def _argmax_smallest(alphas: np.ndarray, values: np.ndarray) -> float:
    """Grid argmax with ties (within relative tolerance) broken toward the
    smallest alpha."""
    vmax = values.max()
    tol = _TIE_RTOL * max(abs(vmax), 1.0)
    return float(alphas[np.nonzero(values >= vmax - tol)[0][0]])


def best_response(alpha_tilde: float, ell: PreferenceDistribution, r_f: float,
                  sf: SurplusFunction | None = None,
                  alpha_grid: np.ndarray | None = None,
                  opts: SolveOptions | None = None) -> float:
    """Grid argmax over alpha of the deviation utility against alpha_tilde."""
    sf = sf or SurplusFunction()
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, float)
    if alphas.size == 0:
        raise ValueError("alpha_grid must be nonempty")
    shares = _solve_profile(alpha_tilde, ell, r_f, opts)
    values = np.array([
        agent_utility(a, alpha_tilde, ell, r_f, sf, population_shares=shares)
        for a in alphas
    ])
    return _argmax_smallest(alphas, values)


def nash_and_social(ell: PreferenceDistribution, r_f: float,
                    sf: SurplusFunction | None = None,
                    alpha_grid: np.ndarray | None = None,
                    opts: SolveOptions | None = None,
                    max_rounds: int = 50) -> StrategicOutcome:
    """Nash slope (fixed point of the grid best response, iterated from
    0.5) and the socially optimal slope (argmax of efficiency).

    Best-response cycles are returned flagged rather than silently
    resolved.  Flat curves (e.g. uniform preferences) are flagged
    degenerate: the gap carries no information there.
    """
    sf = sf or SurplusFunction()
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, float)

    br = np.array([best_response(a, ell, r_f, sf, alphas, opts) for a in alphas])

    curve = efficiency_curve(ell, r_f, sf, alphas, opts)
    social = _argmax_smallest(alphas, curve.values)
    spread = float(curve.values.max() - curve.values.min())
    degenerate = spread <= _TIE_RTOL * max(abs(curve.values.mean()), 1.0)

    # iterate the best response on the grid from the point nearest 0.5
    current = float(alphas[int(np.argmin(np.abs(alphas - 0.5)))])
    seen: list[float] = [current]
    nash: float | None = None
    cycle: tuple = ()
    for _ in range(max_rounds):
        nxt = float(br[int(np.argmin(np.abs(alphas - current)))])
        if nxt == current:
            nash = current
            break
        if nxt in seen:
            cycle = tuple(seen[seen.index(nxt):] + [nxt])
            break
        seen.append(nxt)
        current = nxt

    gap = None if nash is None else nash - social
    return StrategicOutcome(alpha_grid=alphas, best_responses=br,
                            nash_alpha=nash, social_alpha=social,
                            externality_gap=gap, cycle=cycle,
                            degenerate=degenerate)
