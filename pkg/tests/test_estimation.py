"""Panel ingestion, flow adjustment and slope recovery."""

import json

import numpy as np
import pandas as pd
import pytest

from frictional_matching.core import FrictionParams, Grid, make_preference
from frictional_matching.estimation import (
    PanelError,
    adjust_flows,
    alpha_by_year,
    estimate_alpha,
    ingest_transactions,
    synth_panel,
    write_alpha_by_market,
    write_alpha_by_year,
    write_diagnostics,
)


def _rows(entries):
    """entries: (year, market, firm, buyer) tuples; value defaults to 1.0."""
    return pd.DataFrame(
        [dict(year=y, market_id=str(m), firm_id=str(f), buyer_id=str(b),
              value=1.0) for y, m, f, b in entries])


def _proportional_panel():
    """Two-firm markets where yearly arrivals split like the lagged shares
    (6/4 in market 0, 7/3 in market 1), so every scope must recover a
    slope of exactly one."""
    entries = []
    for m, split in ((0, {"A": 6, "B": 4}), (1, {"C": 7, "D": 3})):
        stock = {f: [f"m{m}{f}{i}" for i in range(k)] for f, k in split.items()}
        for t, year in enumerate((2000, 2001, 2002)):
            if t > 0:
                for f, k in split.items():
                    stock[f] += [f"m{m}{f}{t}_{i}" for i in range(k)]
            for firm, buyers in stock.items():
                entries += [(year, m, firm, b) for b in buyers]
    return ingest_transactions(_rows(entries))


# ---------------------------------------------------------------------------
# ingestion


def test_missing_column_rejected():
    df = _rows([(2000, 0, "A", "u1")]).drop(columns="value")
    with pytest.raises(PanelError, match="missing columns"):
        ingest_transactions(df)


def test_nonpositive_value_rejected():
    df = _rows([(2000, 0, "A", "u1"), (2000, 0, "B", "u2")])
    df.loc[1, "value"] = 0.0
    with pytest.raises(PanelError, match="malformed rows"):
        ingest_transactions(df)


def test_buyer_in_two_markets_rejected():
    df = _rows([(2000, 0, "A", "u1"), (2000, 1, "C", "u1"),
                (2000, 0, "B", "u2"), (2000, 1, "D", "u3")])
    with pytest.raises(PanelError, match="several markets"):
        ingest_transactions(df)


def test_multi_supplier_buyers_dropped():
    # u1 buys from both firms in 2000: dropped in 2000 and 2001
    df = _rows([(2000, 0, "A", "u1"), (2000, 0, "B", "u1"),
                (2000, 0, "A", "u2"), (2000, 0, "B", "u3"),
                (2001, 0, "A", "u1"), (2001, 0, "A", "u2"),
                (2001, 0, "B", "u3")])
    panel = ingest_transactions(df)
    assert panel.dropped_multi_supplier == 3
    assert panel.table.groupby("year")["n_buyers"].sum().tolist() == [2, 2]


def test_single_firm_market_years_excluded():
    df = _rows([(2000, 0, "A", "u1"), (2000, 0, "B", "u2"),
                (2000, 1, "C", "u3")])
    panel = ingest_transactions(df)
    assert ("1", 2000) in [tuple(t) for t in panel.excluded_market_years]
    assert set(panel.table["market_id"]) == {"0"}


def test_shares_sum_to_one_per_market_year():
    panel = _proportional_panel()
    sums = panel.table.groupby(["market_id", "year"])["share"].sum()
    assert np.allclose(sums, 1.0)


def test_first_year_inflows_are_nan():
    panel = _proportional_panel()
    first = panel.table[panel.table["year"] == 2000]
    assert first["new_inflow"].isna().all()
    later = panel.table[panel.table["year"] > 2000]
    assert later["new_inflow"].notna().all()


# ---------------------------------------------------------------------------
# flow adjustment


def test_adjust_flows_identity_at_full_coverage():
    panel = adjust_flows(_proportional_panel(), beta1=1.0)
    later = panel.table.dropna(subset=["f_hat"])
    assert np.allclose(later["f_hat"], later["new_inflow"])
    assert panel.clipped_fraction == 0.0


def test_adjust_flows_clips_negative_cells():
    # firm A's only 2001 arrival is poached; partial coverage makes the
    # implied unmatched inflow negative and it must clip to zero
    df = _rows([(2000, 0, "A", "u1"), (2000, 0, "B", "u2"),
                (2000, 0, "B", "u3"),
                (2001, 0, "A", "u1"), (2001, 0, "A", "u2"),
                (2001, 0, "B", "u3"), (2001, 0, "B", "u4")])
    panel = adjust_flows(ingest_transactions(df), beta1=0.5)
    cell = panel.table.query("year == 2001 and firm_id == 'A'")
    assert cell["f_hat"].item() == 0.0
    assert panel.clipped_fraction > 0


def test_adjust_flows_beta1_validation():
    panel = _proportional_panel()
    for bad in (0.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            adjust_flows(panel, bad)


# ---------------------------------------------------------------------------
# slope estimation


@pytest.mark.parametrize("scope", ["per-market", "pooled-FE", "per-year"])
def test_proportional_inflows_recover_unit_slope(scope):
    est = estimate_alpha(_proportional_panel(), scope=scope)
    assert est.alpha_hat == pytest.approx(1.0, abs=1e-10)
    assert est.scope == scope


def test_unknown_scope_rejected():
    with pytest.raises(ValueError):
        estimate_alpha(_proportional_panel(), scope="per-firm")


def test_zero_share_variance_flagged_undefined():
    # both firms always hold exactly half the market
    entries = []
    for t, year in enumerate((2000, 2001, 2002)):
        n = 4 + 2 * t
        entries += [(year, 0, "A", f"a{i}") for i in range(n)]
        entries += [(year, 0, "B", f"b{i}") for i in range(n)]
    est = estimate_alpha(ingest_transactions(_rows(entries)), scope="pooled-FE")
    assert est.undefined
    assert "reason" in est.diagnostics


def test_alpha_by_year_series():
    ests = alpha_by_year(_proportional_panel())
    years = [e.diagnostics["year"] for e in ests]
    assert years == [2001, 2002]
    for e in ests:
        assert e.alpha_hat == pytest.approx(1.0, abs=1e-10)


def test_synthetic_panel_recovers_alpha():
    ell = make_preference("wrapped_gaussian", Grid(12), center=0.5, sd=0.12)
    fr = FrictionParams.from_r_f(0.5, alpha=0.5)
    df = synth_panel(0.5, n_markets=6, years=6, frictions=fr, ell=ell,
                     seed=19, n_agents=8000, year_length=0.05)
    est = estimate_alpha(ingest_transactions(df), scope="pooled-FE")
    assert est.alpha_hat == pytest.approx(0.5, abs=0.1)
    assert est.se < 0.1


# ---------------------------------------------------------------------------
# writers


def test_write_alpha_by_market_schema(tmp_path):
    est = estimate_alpha(_proportional_panel(), scope="per-market")
    path = tmp_path / "alpha_by_market.csv"
    write_alpha_by_market(est, path)
    out = pd.read_csv(path)
    assert list(out.columns) == ["market_id", "alpha_hat", "se", "n"]
    assert len(out) == 2


def test_write_alpha_by_market_needs_per_market(tmp_path):
    est = estimate_alpha(_proportional_panel(), scope="pooled-FE")
    with pytest.raises(ValueError):
        write_alpha_by_market(est, tmp_path / "x.csv")


def test_write_alpha_by_year_schema(tmp_path):
    path = tmp_path / "alpha_by_year.csv"
    write_alpha_by_year(alpha_by_year(_proportional_panel()), path)
    out = pd.read_csv(path)
    assert list(out.columns) == ["year", "alpha_hat", "se", "n"]
    assert out["year"].tolist() == [2001, 2002]


def test_write_diagnostics_json(tmp_path):
    est = estimate_alpha(_proportional_panel(), scope="pooled-FE")
    path = tmp_path / "diag.json"
    write_diagnostics(est, path)
    payload = json.loads(path.read_text())
    assert payload["scope"] == "pooled-FE"
    assert payload["alpha_hat"] == pytest.approx(1.0)
    assert "clipped_fraction" in payload["diagnostics"]
