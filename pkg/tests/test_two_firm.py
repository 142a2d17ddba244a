"""Two-firm steady states: closed forms, stability and regime thresholds."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frictional_matching.core import FrictionParams
from frictional_matching.two_firm import (
    TwoFirmMarket,
    market_share_from_rates,
    select_stable_share,
    share_affine,
    share_constant_rate,
    share_proportional,
    steady_state,
    theorem1_threshold,
    verify_theorem1,
)


# ---------------------------------------------------------------------------
# closed forms


@given(st.floats(0, 1), st.floats(0, 20))
@settings(max_examples=50)
def test_constant_rate_closed_form(p_a, r_f):
    assert share_constant_rate(p_a, r_f) == pytest.approx(
        (r_f + p_a) / (1 + 2 * r_f), abs=1e-14)


@given(st.floats(0, 1), st.floats(0, 20))
@settings(max_examples=50)
def test_proportional_closed_form(p_a, r_f):
    lo = r_f / (2 * r_f + 1)
    hi = (r_f + 1) / (2 * r_f + 1)
    expected = np.clip(p_a * (2 * r_f + 1) - r_f, 0.0, 1.0)
    got = share_proportional(p_a, r_f)
    if lo < p_a < hi:
        assert got == pytest.approx(expected, abs=1e-14)
    elif p_a <= lo:
        assert got == 0.0
    else:
        assert got == 1.0


def test_constant_rate_frictionless_is_preference():
    assert share_constant_rate(0.3, 0.0) == pytest.approx(0.3)


def test_constant_rate_high_frictions_homogenize():
    assert share_constant_rate(0.9, 1e6) == pytest.approx(0.5, abs=1e-5)


@given(st.floats(0, 1, exclude_min=True, exclude_max=True),
       st.floats(0.01, 10))
@settings(max_examples=40)
def test_symmetry_constant_and_proportional(p_a, r_f):
    assert share_constant_rate(p_a, r_f) == pytest.approx(
        1 - share_constant_rate(1 - p_a, r_f), abs=1e-10)
    assert share_proportional(p_a, r_f) == pytest.approx(
        1 - share_proportional(1 - p_a, r_f), abs=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.6, 0.85])
def test_symmetry_affine_stable_branch(alpha):
    for p_a in (0.55, 0.7, 0.9):
        s = select_stable_share(p_a, 0.8, alpha)
        s_mirror = select_stable_share(1 - p_a, 0.8, alpha)
        assert s == pytest.approx(1 - s_mirror, abs=1e-10)


# ---------------------------------------------------------------------------
# generic steady state


def test_steady_state_stocks_balance():
    market = TwoFirmMarket(p_a=0.6, frictions=FrictionParams.from_r_f(0.5))
    st_ = steady_state(market, lambda_A=0.7, lambda_B=0.3)
    assert st_.u_a >= 0 and st_.u_b >= 0 and st_.m >= 0
    assert st_.s_A + st_.s_B == pytest.approx(1.0, abs=1e-12)
    assert 0 <= st_.s_A <= 1


def test_market_share_from_rates_equal_rates():
    # equal normalized rates reduce to the constant-rate closed form
    for p_a in (0.2, 0.5, 0.8):
        for r_f in (0.1, 1.0, 5.0):
            assert market_share_from_rates(p_a, r_f, 0.5, 0.5) == pytest.approx(
                share_constant_rate(p_a, r_f), abs=1e-12)


def test_share_is_invariant_to_stock_scale():
    # doubling K rescales all stocks but leaves the share unchanged
    for K in (0.5, 1.0, 2.0):
        fr = FrictionParams(mu=0.5, lambda_tot=1.0, K=K, alpha=0.0)
        market = TwoFirmMarket(p_a=0.65, frictions=fr)
        st_ = steady_state(market, lambda_A=0.55, lambda_B=0.45)
        base = steady_state(TwoFirmMarket(p_a=0.65, frictions=FrictionParams(
            mu=0.5, lambda_tot=1.0, K=1.0, alpha=0.0)), 0.55, 0.45)
        assert st_.s_A == pytest.approx(base.s_A, abs=1e-10)


# ---------------------------------------------------------------------------
# affine equilibria and winner-takes-all


def test_affine_alpha_zero_matches_constant():
    roots = share_affine(0.7, 0.9, 0.0)
    assert len(roots) == 1
    s, stable = roots[0]
    assert stable
    assert s == pytest.approx(share_constant_rate(0.7, 0.9), abs=1e-10)


def test_affine_alpha_one_winner_takes_all_boundary():
    # full proportionality locks out the weaker firm beyond p_b/(p_a - p_b)
    for p_a in (0.6, 0.75, 0.9):
        p_b = 1 - p_a
        r_star = p_b / (p_a - p_b)
        assert share_proportional(p_a, r_star) == pytest.approx(1.0)
        assert share_proportional(p_a, r_star * 1.01) == 1.0
        assert share_proportional(p_a, r_star * 0.99) < 1.0


def test_affine_roots_lie_in_unit_interval():
    for alpha in (0.2, 0.5, 0.9, 1.0):
        for p_a in (0.5, 0.65, 0.95):
            for s, _stable in share_affine(p_a, 0.7, alpha):
                assert -1e-12 <= s <= 1 + 1e-12


def test_select_stable_share_is_a_reported_root():
    s = select_stable_share(0.7, 0.6, 0.8)
    roots = [r for r, _ in share_affine(0.7, 0.6, 0.8)]
    assert min(abs(s - r) for r in roots) < 1e-8


# ---------------------------------------------------------------------------
# homogenization threshold


def test_threshold_formula():
    assert theorem1_threshold(0.75) == pytest.approx(1.0)
    assert theorem1_threshold(0.9) == pytest.approx(4.0)
    assert theorem1_threshold(0.5) == 0.0
    assert theorem1_threshold(0.3) is None


def test_threshold_sign_change():
    for alpha in (0.6, 0.8):
        thr = theorem1_threshold(alpha)
        below = verify_theorem1(alpha, thr - 0.02)
        above = verify_theorem1(alpha, thr + 0.02)
        assert below["max_excess"] > 0
        assert above["max_excess"] <= 1e-9
        assert below["consistent"] and above["consistent"]
