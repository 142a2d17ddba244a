"""Grid, distances, preference densities and friction parameters."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frictional_matching.core import (
    FrictionParams,
    Grid,
    PreferenceDistribution,
    ShareProfile,
    SurplusFunction,
    circular_distance,
    make_preference,
    quadrature,
)


# ---------------------------------------------------------------------------
# circular distance


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_circular_distance_symmetric(x, y):
    assert circular_distance(x, y) == pytest.approx(circular_distance(y, x))


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_circular_distance_bounded_by_half(x, y):
    d = circular_distance(x, y)
    assert 0.0 <= d <= 0.5


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True),
       st.floats(0, 1, exclude_max=True))
def test_circular_distance_triangle_inequality(x, y, z):
    dxz = circular_distance(x, z)
    dxy = circular_distance(x, y)
    dyz = circular_distance(y, z)
    assert dxz <= dxy + dyz + 1e-12


def test_circular_distance_wraps():
    assert circular_distance(0.05, 0.95) == pytest.approx(0.1)
    assert circular_distance(0.0, 0.5) == pytest.approx(0.5)


def test_distance_matrix_matches_pointwise():
    grid = Grid(17)
    dm = grid.distance_matrix()
    for i in (0, 5, 13):
        for j in (1, 8, 16):
            assert dm[i, j] == pytest.approx(
                circular_distance(grid.points[i], grid.points[j]))


# ---------------------------------------------------------------------------
# quadrature and densities


def test_quadrature_exact_for_constants():
    grid = Grid(64)
    assert quadrature(np.full(64, 3.7), grid) == pytest.approx(3.7)


@pytest.mark.parametrize("kind,params", [
    ("uniform", {}),
    ("block", dict(lo=0.2, hi=0.6, height=4.0)),
    ("wrapped_gaussian", dict(center=0.3, sd=0.08)),
    ("skew_gaussian", dict(center=0.6, sd_left=0.25, sd_right=0.05)),
    ("double_peak", dict(centers=(0.2, 0.7), sds=(0.05, 0.1),
                         weights=(0.4, 0.6))),
])
def test_preferences_normalized(kind, params):
    ell = make_preference(kind, Grid(128), **params)
    assert quadrature(ell.density) == pytest.approx(1.0, abs=1e-12)
    assert np.all(ell.density >= 0)


def test_block_wrapping_past_one():
    ell = make_preference("block", Grid(100), lo=0.9, hi=1.1)
    inside = ell.density > 0
    pts = Grid(100).points
    assert np.all(inside == ((pts >= 0.9) | (pts <= 0.1)))


def test_skew_gaussian_unimodal_and_skewed():
    grid = Grid(256)
    ell = make_preference("skew_gaussian", grid, center=0.6,
                          sd_left=0.25, sd_right=0.05).density
    local_max = (ell > np.roll(ell, 1)) & (ell >= np.roll(ell, -1))
    assert local_max.sum() == 1
    mode = grid.points[np.argmax(ell)]
    assert mode == pytest.approx(0.6, abs=grid.spacing)
    # heavier left tail: mass below the mode exceeds mass above it
    d = (grid.points - 0.6 + 0.5) % 1.0 - 0.5
    assert ell[d < 0].sum() > ell[d > 0].sum()


def test_unknown_preference_kind_rejected():
    with pytest.raises(ValueError):
        make_preference("triangle", Grid(16))


def test_negative_density_rejected():
    with pytest.raises(ValueError):
        PreferenceDistribution(Grid(4), np.array([1.0, -0.1, 1.0, 1.0]))


def test_share_profile_requires_unit_mass():
    with pytest.raises(ValueError):
        ShareProfile(Grid(4), np.array([1.0, 1.0, 1.0, 2.0]))


# ---------------------------------------------------------------------------
# surplus


def test_surplus_linear_decreasing_in_distance():
    sf = SurplusFunction("linear")
    d = np.array([0.0, 0.2, 0.5])
    out = sf.transform(d)
    assert np.all(np.diff(out) < 0)
    assert out[0] == pytest.approx(1.0)


def test_surplus_exponential_positive():
    sf = SurplusFunction("exponential", scale=0.3)
    out = sf.transform(np.array([0.0, 0.25, 0.5]))
    assert np.all(out > 0)
    assert np.all(np.diff(out) < 0)


# ---------------------------------------------------------------------------
# friction parameters


def test_friction_params_r_f_roundtrip():
    fr = FrictionParams.from_r_f(0.7, alpha=0.5)
    assert fr.r_f == pytest.approx(0.7)
    assert fr.alpha == 0.5


@given(st.floats(0.01, 50), st.floats(0.1, 10))
@settings(max_examples=30)
def test_friction_params_r_f_is_mu_over_lambda(r_f, lambda_tot):
    fr = FrictionParams(mu=r_f * lambda_tot, lambda_tot=lambda_tot, alpha=0.0)
    assert fr.r_f == pytest.approx(r_f)


def test_friction_params_validation():
    with pytest.raises(ValueError):
        FrictionParams(mu=-1.0, lambda_tot=1.0)
    with pytest.raises(ValueError):
        FrictionParams(mu=1.0, lambda_tot=1.0, alpha=1.5)
