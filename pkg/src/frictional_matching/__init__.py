"""Frictional many-to-one matching markets with heterogeneous preferences.

Agents on a unit circle of types meet firms at rates affine in firm size
(slope alpha between random and proportional meeting), accept the closest
firm met so far, and exit at rate mu.  The package solves the two-firm
and continuum steady states, measures matching efficiency and the
concentration externality, simulates the market event by event, and
estimates alpha from buyer-firm transaction panels.
"""

__version__ = "0.1.0"

from .core import (
    FrictionParams,
    Grid,
    PreferenceDistribution,
    ShareProfile,
    SurplusFunction,
    circular_distance,
    make_preference,
    quadrature,
)
from .two_firm import (
    TwoFirmMarket,
    TwoFirmSteadyState,
    market_share_from_rates,
    select_stable_share,
    share_affine,
    share_constant_rate,
    share_proportional,
    steady_state,
    theorem1_threshold,
    verify_theorem1,
)
from .continuum import (
    ALPHA_CAP,
    FixedPointError,
    MedianDegenerateError,
    SolveOptions,
    SolveResult,
    destruction_rate,
    friction_kernel,
    match_density,
    median_point,
    meeting_kernel_matrix,
    profile_stats,
    solve_constant_rate,
    solve_fixed_point,
    unmatched_profile,
)
from .efficiency import (
    EfficiencyCurve,
    StrategicOutcome,
    agent_utility,
    best_response,
    default_alpha_grid,
    efficiency,
    efficiency_curve,
    nash_and_social,
)
from .simulation import (
    SimConfig,
    SimResult,
    replicate,
    simulate,
    two_firm_preference,
)
from .estimation import (
    AlphaEstimate,
    FlowPanel,
    PanelError,
    adjust_flows,
    alpha_by_year,
    estimate_alpha,
    ingest_transactions,
    synth_panel,
)

__all__ = [
    "__version__",
    # core
    "FrictionParams", "Grid", "PreferenceDistribution", "ShareProfile",
    "SurplusFunction", "circular_distance", "make_preference", "quadrature",
    # two-firm
    "TwoFirmMarket", "TwoFirmSteadyState", "market_share_from_rates",
    "select_stable_share", "share_affine", "share_constant_rate",
    "share_proportional", "steady_state", "theorem1_threshold",
    "verify_theorem1",
    # continuum
    "ALPHA_CAP", "FixedPointError", "MedianDegenerateError", "SolveOptions",
    "SolveResult", "destruction_rate", "friction_kernel", "match_density",
    "median_point", "meeting_kernel_matrix", "profile_stats",
    "solve_constant_rate", "solve_fixed_point", "unmatched_profile",
    # efficiency
    "EfficiencyCurve", "StrategicOutcome", "agent_utility", "best_response",
    "default_alpha_grid", "efficiency", "efficiency_curve", "nash_and_social",
    # simulation
    "SimConfig", "SimResult", "replicate", "simulate", "two_firm_preference",
    # estimation
    "AlphaEstimate", "FlowPanel", "PanelError", "adjust_flows",
    "alpha_by_year", "estimate_alpha", "ingest_transactions", "synth_panel",
]
