"""Event-driven simulator: determinism, steady-state checks, config guards."""

import json

import numpy as np
import pytest

from frictional_matching.core import FrictionParams, Grid, make_preference
from frictional_matching.simulation import (
    SimConfig,
    SimResult,
    replicate,
    simulate,
    two_firm_preference,
)
from frictional_matching.two_firm import share_constant_rate


def _small_config(**overrides):
    base = dict(
        n_agents=2000,
        ell=make_preference("wrapped_gaussian", Grid(8), center=0.5, sd=0.15),
        frictions=FrictionParams.from_r_f(1.0, alpha=0.0),
        horizon=12.0,
        seed=3,
        replications=2,
        init="equilibrium",
    )
    base.update(overrides)
    return SimConfig(**base)


@pytest.fixture(scope="module")
def small_result():
    return simulate(_small_config())


def test_same_seed_same_result(small_result):
    again = simulate(_small_config())
    assert np.array_equal(small_result.share_density, again.share_density)
    assert small_result.unmatched_fraction == again.unmatched_fraction


def test_different_seed_different_result(small_result):
    other = simulate(_small_config(seed=4))
    assert not np.array_equal(small_result.share_density, other.share_density)


def test_share_density_normalized(small_result):
    assert np.mean(small_result.share_density) == pytest.approx(1.0, abs=1e-9)
    assert np.all(small_result.share_density >= 0)
    assert np.all(small_result.share_se >= 0)


def test_unmatched_fraction_matches_flow_balance(small_result):
    fr = _small_config().frictions
    expect = fr.mu / (fr.K * fr.lambda_tot + fr.mu)
    assert small_result.unmatched_fraction == pytest.approx(
        expect, abs=4 * max(small_result.unmatched_se, 1e-3))


def test_two_firm_simulation_matches_closed_form():
    p_a, r_f = 0.6, 1.0
    cfg = SimConfig(
        n_agents=5000,
        ell=two_firm_preference(p_a),
        frictions=FrictionParams.from_r_f(r_f, alpha=0.0),
        horizon=15.0,
        seed=11,
        replications=3,
        init="equilibrium",
    )
    res = simulate(cfg)
    s_a = res.share_density[0] / 2.0  # two half-circle cells
    target = share_constant_rate(p_a, r_f)
    tol = 4 * max(res.share_se[0] / 2.0, 5e-3)
    assert s_a == pytest.approx(target, abs=tol)


def test_two_firm_preference_masses():
    ell = two_firm_preference(0.7)
    assert ell.grid.n_points == 2
    assert ell.density[0] / 2.0 == pytest.approx(0.7)


def test_replicate_requires_two(small_result):
    with pytest.raises(ValueError):
        replicate(_small_config(), 1)


def test_replicate_reports_replications():
    res = replicate(_small_config(horizon=6.0), 3)
    assert res.replications == 3
    assert res.per_replication_shares.shape[0] == 3


def test_config_validation():
    ell = make_preference("uniform", Grid(4))
    fr = FrictionParams.from_r_f(1.0, alpha=0.0)
    with pytest.raises(ValueError):
        SimConfig(n_agents=50, ell=ell, frictions=fr, horizon=5.0)
    with pytest.raises(ValueError):
        SimConfig(n_agents=500, ell=ell, frictions=fr, horizon=5.0,
                  burn_in=6.0)
    with pytest.raises(ValueError):
        SimConfig(n_agents=500, ell=ell, frictions=fr, horizon=5.0,
                  init="warm")
    with pytest.raises(ValueError):
        SimConfig(n_agents=500, ell=ell,
                  frictions=FrictionParams(mu=1e-6, lambda_tot=10.0),
                  horizon=5.0)


def test_result_writers(tmp_path, small_result):
    jpath = tmp_path / "out.json"
    cpath = tmp_path / "out.csv"
    small_result.to_json(jpath)
    small_result.to_csv(cpath)
    payload = json.loads(jpath.read_text())
    assert payload["n_cells"] == 8
    assert len(payload["share_density"]) == 8
    lines = cpath.read_text().strip().splitlines()
    assert lines[0] == "cell_center,share,se"
    assert len(lines) == 9
