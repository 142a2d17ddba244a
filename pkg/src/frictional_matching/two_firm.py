"""Closed-form and root-solved steady states of the two-firm market.

Two firms A and B share a unit mass of agents; a fraction p_a intrinsically
prefers A.  Agents enter and exit at rate mu, meet firm i at rate lambda_i,
and switch only to a strictly preferred firm.  Three meeting-rate modes are
covered: constant rates, rates proportional to market share, and the affine
mix lambda_i = ((1 - alpha)/2 + alpha * s_i) * lambda_tot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import FrictionParams

__all__ = [
    "TwoFirmMarket",
    "TwoFirmSteadyState",
    "steady_state",
    "market_share_from_rates",
    "share_constant_rate",
    "share_proportional",
    "share_affine",
    "select_stable_share",
    "theorem1_threshold",
    "verify_theorem1",
]

_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class TwoFirmMarket:
    p_a: float
    frictions: FrictionParams

    def __post_init__(self):
        if not 0.0 <= self.p_a <= 1.0:
            raise ValueError("p_a must lie in [0, 1]")

    @property
    def p_b(self) -> float:
        return 1.0 - self.p_a


@dataclass(frozen=True)
class TwoFirmSteadyState:
    """Full stock decomposition of the two-firm steady state.

    u_a/u_b are unmatched masses by agent type, h_xY the matched stock of
    type-x agents at firm Y, s_A/s_B market shares among matched agents and
    m the total matched mass.
    """

    u_a: float
    u_b: float
    h_aA: float
    h_aB: float
    h_bA: float
    h_bB: float
    m: float

    @property
    def s_A(self) -> float:
        return (self.h_aA + self.h_bA) / self.m

    @property
    def s_B(self) -> float:
        return (self.h_aB + self.h_bB) / self.m

    @property
    def total_mass(self) -> float:
        return (self.u_a + self.u_b + self.h_aA + self.h_aB
                + self.h_bA + self.h_bB)


def steady_state(market: TwoFirmMarket, lambda_A: float, lambda_B: float) -> TwoFirmSteadyState:
    """Unique steady state of the inflow/outflow balance for given rates.

    Unmatched agents of either type meet A at lambda_A and B at lambda_B;
    matched agents sample the other firm at the same rates and switch only
    when it is their preferred one.
    """
    if lambda_A < 0 or lambda_B < 0:
        raise ValueError("meeting rates must be nonnegative")
    lam_tot = lambda_A + lambda_B
    if lam_tot <= 0:
        raise ValueError("lambda_A + lambda_B must be positive")
    mu = market.frictions.mu
    p_a, p_b = market.p_a, market.p_b

    # unmatched stocks: (lambda_tot + mu) u(i) = mu p_i
    u_a = mu * p_a / (lam_tot + mu)
    u_b = mu * p_b / (lam_tot + mu)

    # type-a agents at their less-preferred firm B drain into A:
    # (mu + lambda_A) h(a,B) = lambda_B u(a)
    h_aB = lambda_B * u_a / (mu + lambda_A)
    # mu h(a,A) = lambda_A (u(a) + h(a,B))
    h_aA = lambda_A * (u_a + h_aB) / mu
    h_bA = lambda_A * u_b / (mu + lambda_B)
    h_bB = lambda_B * (u_b + h_bA) / mu

    m = lam_tot / (mu + lam_tot)
    return TwoFirmSteadyState(u_a=u_a, u_b=u_b, h_aA=h_aA, h_aB=h_aB,
                              h_bA=h_bA, h_bB=h_bB, m=m)


def market_share_from_rates(p_a: float, r_f: float, lam_A: float, lam_B: float) -> float:
    """Market share of firm A among matched agents, for normalized rates.

    lam_A and lam_B are fractions of the total meeting intensity
    (lam_A + lam_B = 1); r_f is the friction intensity mu/lambda_tot.
    """
    return (lam_A / (r_f + lam_B)) * r_f + p_a * (
        lam_A * lam_B * (2.0 * r_f + 1.0) / ((r_f + lam_A) * (r_f + lam_B))
    )


def share_constant_rate(p_a: float, r_f: float) -> float:
    """s_A under equal meeting rates: r_f/(1 + 2 r_f) + p_a/(1 + 2 r_f)."""
    if r_f < 0:
        raise ValueError("r_f must be nonnegative")
    return (r_f + p_a) / (1.0 + 2.0 * r_f)


def share_proportional(p_a: float, r_f: float) -> float:
    """s_A under share-proportional meeting rates (piecewise linear in p_a).

    Zero below p_a = r_f/(2 r_f + 1), one above p_a = (r_f + 1)/(2 r_f + 1),
    and p_a (2 r_f + 1) - r_f in between.
    """
    if r_f < 0:
        raise ValueError("r_f must be nonnegative")
    lo = r_f / (2.0 * r_f + 1.0)
    hi = (r_f + 1.0) / (2.0 * r_f + 1.0)
    if p_a <= lo:
        return 0.0
    if p_a >= hi:
        return 1.0
    return p_a * (2.0 * r_f + 1.0) - r_f


def _affine_weights(s: float, alpha: float) -> tuple[float, float]:
    w_A = (1.0 - alpha) / 2.0 + alpha * s
    w_B = (1.0 - alpha) / 2.0 + alpha * (1.0 - s)
    return w_A, w_B


def _affine_residual(s: float, p_a: float, r_f: float, alpha: float) -> float:
    w_A, w_B = _affine_weights(s, alpha)
    return market_share_from_rates(p_a, r_f, w_A, w_B) - s


def share_affine(p_a: float, r_f: float, alpha: float,
                 n_scan: int = 2000) -> list[tuple[float, bool]]:
    """All equilibrium shares under affine meeting rates, with stability.

    Substitutes lambda_i(s) = ((1 - alpha)/2 + alpha s_i) lambda_tot into
    the steady-state share equation and solves the consistency condition
    g(s) = RHS(s) - s = 0 on [0, 1] by sign bracketing plus Brent's method.
    A root is labelled stable when g crosses from positive to negative
    (forward iteration s <- RHS(s) contracts there).

    At alpha = 1 the boundary outcomes s in {0, 1} are genuine equilibria
    when p_a lies outside the interior branch; g need not change sign
    there, so they are admitted via the winner-takes-all thresholds of the
    proportional-rate formula rather than by bracketing.

    Returns a list of (share, stable) pairs, sorted by share.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if r_f <= 0:
        raise ValueError("r_f must be positive")

    grid = np.linspace(0.0, 1.0, n_scan + 1)
    g = np.array([_affine_residual(s, p_a, r_f, alpha) for s in grid])

    roots: list[float] = []
    for i in range(n_scan):
        a, b = grid[i], grid[i + 1]
        ga, gb = g[i], g[i + 1]
        if ga == 0.0:
            roots.append(a)
        elif ga * gb < 0:
            roots.append(brentq(_affine_residual, a, b,
                                args=(p_a, r_f, alpha), xtol=1e-14))
    if g[-1] == 0.0:
        roots.append(grid[-1])

    # winner-takes-all boundary equilibria (only possible at alpha = 1,
    # where the shrinking firm's meeting rate actually reaches zero)
    if alpha == 1.0:
        lo = r_f / (2.0 * r_f + 1.0)
        hi = (r_f + 1.0) / (2.0 * r_f + 1.0)
        roots = [r for r in roots if _BOUNDARY_EPS < r < 1.0 - _BOUNDARY_EPS]
        if p_a <= lo:
            roots.append(0.0)
        if p_a >= hi:
            roots.append(1.0)

    # dedupe
    roots = sorted(roots)
    unique: list[float] = []
    for r in roots:
        if not unique or r - unique[-1] > 1e-9:
            unique.append(r)

    if not unique:
        raise RuntimeError(
            f"no equilibrium found for p_a={p_a}, r_f={r_f}, alpha={alpha}; "
            "this indicates a solver bug")

    out: list[tuple[float, bool]] = []
    eps = 1e-7
    for r in unique:
        left = _affine_residual(max(r - eps, 0.0), p_a, r_f, alpha)
        right = _affine_residual(min(r + eps, 1.0), p_a, r_f, alpha)
        if r <= eps:
            stable = right < 0
        elif r >= 1.0 - eps:
            stable = left > 0
        else:
            stable = left > 0 and right < 0
        out.append((r, stable))
    return out


def select_stable_share(p_a: float, r_f: float, alpha: float,
                        max_iter: int = 100_000, tol: float = 1e-13) -> float:
    """Equilibrium share selected by forward iteration from s = p_a.

    This is the branch reached from the frictionless allocation; with
    multiple equilibria it picks the economically relevant stable one.
    """
    s = p_a
    for _ in range(max_iter):
        w_A, w_B = _affine_weights(s, alpha)
        s_new = market_share_from_rates(p_a, r_f, w_A, w_B)
        s_new = min(max(s_new, 0.0), 1.0)
        if abs(s_new - s) < tol:
            return s_new
        s = 0.5 * s + 0.5 * s_new
    # fall back to the stable root nearest the iterate
    candidates = [r for r, stable in share_affine(p_a, r_f, alpha) if stable]
    if not candidates:
        candidates = [r for r, _ in share_affine(p_a, r_f, alpha)]
    return min(candidates, key=lambda r: abs(r - s))


def theorem1_threshold(alpha: float) -> float | None:
    """Friction level above which the preferred firm can no longer gain.

    Returns (alpha - 1/2)/(1 - alpha) for alpha >= 1/2; below 1/2 frictions
    homogenize at every intensity, so there is no threshold (None).
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1); the threshold diverges at 1")
    if alpha < 0.5:
        return None
    return (alpha - 0.5) / (1.0 - alpha)


def verify_theorem1(alpha: float, r_f: float,
                    p_a_grid: np.ndarray | None = None,
                    tol: float = 1e-9) -> dict:
    """Check the homogenizing/accentuating prediction at (alpha, r_f).

    Computes max over p_a in [0.5, 1] of (stable s_A - p_a) and compares
    the observed sign with the threshold prediction: the excess should be
    nonpositive exactly when r_f is at or above the threshold.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if r_f <= 0:
        raise ValueError("r_f must be positive")
    if p_a_grid is None:
        # cluster near 1/2 where the excess first changes sign
        p_a_grid = np.concatenate([
            0.5 + np.logspace(-6, np.log10(0.5), 60),
            np.linspace(0.5, 1.0, 41),
        ])
        p_a_grid = np.unique(np.clip(p_a_grid, 0.5, 1.0))

    excess = np.array([
        select_stable_share(p, r_f, alpha) - p for p in p_a_grid
    ])
    max_excess = float(excess.max())
    homogenizing = max_excess <= tol
    threshold = theorem1_threshold(alpha)
    predicted_homogenizing = threshold is None or r_f >= threshold
    return {
        "alpha": alpha,
        "r_f": r_f,
        "threshold": threshold,
        "max_excess": max_excess,
        "argmax_p_a": float(p_a_grid[int(excess.argmax())]),
        "homogenizing": homogenizing,
        "predicted_homogenizing": predicted_homogenizing,
        "consistent": homogenizing == predicted_homogenizing,
    }
