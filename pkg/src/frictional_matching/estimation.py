"""Recover the meeting-rate slope alpha from buyer-firm transaction panels.

The estimating equation is the linearity of inflow shares in market shares:
among buyers newly arriving from the unmatched pool, the share landing at
firm y is (1 - alpha)/N + alpha * s(y).  With partial panel coverage the
observed "new" inflow mixes genuinely unmatched buyers with buyers poached
from out-of-panel firms; when a fraction beta1 of previously matched
buyers sat at in-panel firms, the unmatched inflow is recovered as

    f_hat(u, y) = observed_new(y) - (1 - beta1)/beta1 * observed_poached(y).

Shares are buyer-count based and buyers linked to two or more firms in a
year (or the year before) are dropped, mirroring the single-supplier
sample restriction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
import statsmodels.api as sm

from .core import FrictionParams, PreferenceDistribution

__all__ = [
    "FlowPanel",
    "AlphaEstimate",
    "PanelError",
    "ingest_transactions",
    "adjust_flows",
    "estimate_alpha",
    "alpha_by_year",
    "synth_panel",
    "write_alpha_by_market",
    "write_alpha_by_year",
    "write_diagnostics",
]

_CSV_COLUMNS = ["year", "market_id", "firm_id", "buyer_id", "value"]


class PanelError(ValueError):
    """Malformed transaction data or a panel unusable for estimation."""


@dataclass(frozen=True)
class FlowPanel:
    """Per (market, year, firm) shares and classified buyer inflows.

    ``table`` columns: market_id, year, firm_id, share, n_buyers,
    new_inflow (buyers absent from the panel the year before),
    poached_inflow (buyers at another in-panel firm the year before),
    n_firms (market-year firm count), and f_hat once flows are adjusted.
    Inflow columns are NaN for each market's first observed year.
    """

    table: pd.DataFrame
    dropped_multi_supplier: int = 0
    excluded_market_years: tuple = ()
    clipped_fraction: float | None = None
    beta1: float | None = None

    @property
    def years(self) -> list:
        return sorted(self.table["year"].unique().tolist())

    @property
    def adjusted(self) -> bool:
        return "f_hat" in self.table.columns


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_hat: float
    se: float
    n_observations: int
    scope: str
    diagnostics: dict = field(default_factory=dict)
    detail: pd.DataFrame | None = field(default=None, repr=False, compare=False)

    @property
    def undefined(self) -> bool:
        return not np.isfinite(self.alpha_hat)


def _read_transactions(source) -> pd.DataFrame:
    if isinstance(source, pd.DataFrame):
        df = source.copy()
    else:
        df = pd.read_csv(source, dtype={"market_id": str, "firm_id": str,
                                        "buyer_id": str})
    missing = [c for c in _CSV_COLUMNS if c not in df.columns]
    if missing:
        raise PanelError(f"missing columns {missing}; expected header "
                         f"{','.join(_CSV_COLUMNS)}")
    df = df[_CSV_COLUMNS]

    bad = df.isna().any(axis=1) | (df["value"] <= 0)
    for col in ("market_id", "firm_id", "buyer_id"):
        if df[col].dtype == object:
            bad |= df[col].astype(str).str.len() == 0
    if bad.any():
        lines = (np.nonzero(bad.to_numpy())[0][:5] + 2).tolist()  # 1-based + header
        raise PanelError(f"malformed rows (empty ids, missing fields or "
                         f"nonpositive value) at lines {lines}")
    df["year"] = df["year"].astype(int)

    markets_per_buyer = df.groupby(["buyer_id", "year"])["market_id"].nunique()
    if (markets_per_buyer > 1).any():
        culprit = markets_per_buyer[markets_per_buyer > 1].index[0]
        raise PanelError(f"buyer {culprit[0]!r} appears in several markets "
                         f"in year {culprit[1]}; one market per buyer-year")
    return df


def ingest_transactions(source) -> FlowPanel:
    """Build a FlowPanel from transaction rows (CSV path/stream or DataFrame).

    Applies the single-supplier filter, computes buyer-count market shares
    and classifies each year-t buyer as new-to-panel or poached based on
    its year t-1 link.  Market-years with fewer than two firms are
    excluded from the table and reported.
    """
    df = _read_transactions(source)
    links = df[["market_id", "year", "firm_id", "buyer_id"]].drop_duplicates()

    # single-supplier filter: drop a buyer-year when the buyer is linked to
    # >= 2 firms in that year or the year before
    firms_per = links.groupby(["market_id", "buyer_id", "year"])["firm_id"].nunique()
    multi = firms_per[firms_per > 1].reset_index()[["market_id", "buyer_id", "year"]]
    drop = pd.concat([multi, multi.assign(year=multi["year"] + 1)]).drop_duplicates()
    before = len(links)
    links = links.merge(drop, on=["market_id", "buyer_id", "year"],
                        how="left", indicator=True)
    links = (links[links["_merge"] == "left_only"]
             .drop(columns="_merge").reset_index(drop=True))
    dropped = before - len(links)

    # lagged link of each remaining buyer (unique firm by construction)
    lag = links.rename(columns={"firm_id": "prev_firm"}).copy()
    lag["year"] += 1
    merged = links.merge(lag, on=["market_id", "buyer_id", "year"], how="left")

    first_year = links.groupby("market_id")["year"].transform("min")
    merged["has_lag_year"] = merged["year"] > first_year.loc[merged.index]
    merged["is_new"] = merged["prev_firm"].isna()
    merged["is_poached"] = (~merged["is_new"]) & (merged["prev_firm"] != merged["firm_id"])

    grp = merged.groupby(["market_id", "year", "firm_id"])
    table = grp.agg(
        n_buyers=("buyer_id", "nunique"),
        new_inflow=("is_new", "sum"),
        poached_inflow=("is_poached", "sum"),
        has_lag=("has_lag_year", "first"),
    ).reset_index()

    totals = table.groupby(["market_id", "year"])["n_buyers"].transform("sum")
    table["share"] = table["n_buyers"] / totals
    table["n_firms"] = table.groupby(["market_id", "year"])["firm_id"].transform("nunique")
    table.loc[~table["has_lag"], ["new_inflow", "poached_inflow"]] = np.nan
    table = table.drop(columns="has_lag")

    few = table["n_firms"] < 2
    excluded = tuple(sorted(
        table.loc[few, ["market_id", "year"]].drop_duplicates().itertuples(index=False)))
    table = table[~few].reset_index(drop=True)

    return FlowPanel(table=table, dropped_multi_supplier=int(dropped),
                     excluded_market_years=excluded)


def adjust_flows(panel: FlowPanel, beta1: float) -> FlowPanel:
    """Estimate the unmatched-pool inflow f_hat(u, y) per cell.

    f_hat = new_inflow - (1 - beta1)/beta1 * poached_inflow, clipped at 0;
    the fraction of clipped cells is recorded on the returned panel.
    """
    if not 0.0 < beta1 <= 1.0:
        raise ValueError("beta1 must lie in (0, 1]")
    table = panel.table.copy()
    raw = table["new_inflow"] - (1.0 - beta1) / beta1 * table["poached_inflow"]
    clipped = (raw < 0).sum()
    valid = raw.notna().sum()
    table["f_hat"] = raw.clip(lower=0.0)
    return replace(panel, table=table,
                   clipped_fraction=float(clipped / valid) if valid else 0.0,
                   beta1=beta1)


def _estimation_frame(panel: FlowPanel, beta1: float) -> pd.DataFrame:
    """Observations for the slope regression.

    The regressor is the share at the start of the inflow year (the
    lagged share): meeting rates during year t depend on the stocks in
    place, and the same-year share mechanically contains the inflow
    being explained, which would bias the slope upward.
    """
    if not panel.adjusted or panel.beta1 != beta1:
        panel = adjust_flows(panel, beta1)
    df = panel.table.dropna(subset=["f_hat"]).copy()
    lag = panel.table[["market_id", "year", "firm_id", "share"]].copy()
    lag["year"] += 1
    df = df.merge(lag.rename(columns={"share": "share_start"}),
                  on=["market_id", "year", "firm_id"], how="left")
    df["share_start"] = df["share_start"].fillna(0.0)  # firm absent last year
    totals = df.groupby(["market_id", "year"])["f_hat"].transform("sum")
    df = df[totals > 0].copy()
    totals = totals[totals > 0]
    df["inflow_share"] = df["f_hat"] / totals
    return df


def _ols_slope(x: np.ndarray, y: np.ndarray, demeaned: bool) -> tuple[float, float, int]:
    """Slope and HC1 standard error; x already demeaned if demeaned=True."""
    if demeaned:
        X = x[:, None]
    else:
        X = sm.add_constant(x)
    fit = sm.OLS(y, X).fit(cov_type="HC1")
    return float(fit.params[-1]), float(fit.bse[-1]), int(len(y))


def estimate_alpha(panel: FlowPanel, scope: str = "pooled-FE",
                   beta1: float = 1.0) -> AlphaEstimate:
    """OLS of inflow shares on market shares.

    Scopes: "per-market" (one slope per market, unweighted average),
    "pooled-FE" (within-market demeaning of both variables), "per-year"
    (pooled within each year; use alpha_by_year for the full series).
    Zero regressor variance yields an undefined (NaN) estimate, flagged
    in diagnostics rather than raised.
    """
    if scope not in ("per-market", "pooled-FE", "per-year"):
        raise ValueError(f"unknown scope {scope!r}")
    df = _estimation_frame(panel, beta1)
    diagnostics = {"clipped_fraction": adjust_flows(panel, beta1).clipped_fraction,
                   "beta1": beta1}
    if df.empty:
        return AlphaEstimate(np.nan, np.nan, 0, scope,
                             {**diagnostics, "reason": "no usable market-years"})

    if scope == "pooled-FE":
        g = df.groupby("market_id")
        x = (df["share_start"] - g["share_start"].transform("mean")).to_numpy()
        y = (df["inflow_share"] - g["inflow_share"].transform("mean")).to_numpy()
        if np.allclose(x, 0.0):
            return AlphaEstimate(np.nan, np.nan, len(df), scope,
                                 {**diagnostics, "reason": "zero share variance"})
        a, se, n = _ols_slope(x, y, demeaned=True)
        return AlphaEstimate(a, se, n, scope, diagnostics)

    if scope == "per-year":
        ests = alpha_by_year(panel, beta1)
        ok = [e for e in ests if not e.undefined]
        if not ok:
            return AlphaEstimate(np.nan, np.nan, 0, scope,
                                 {**diagnostics, "reason": "no estimable years"})
        alphas = np.array([e.alpha_hat for e in ok])
        se = float(alphas.std(ddof=1) / np.sqrt(len(ok))) if len(ok) > 1 else ok[0].se
        detail = pd.DataFrame({"year": [e.diagnostics["year"] for e in ok],
                               "alpha_hat": alphas,
                               "se": [e.se for e in ok],
                               "n": [e.n_observations for e in ok]})
        return AlphaEstimate(float(alphas.mean()), se,
                             int(sum(e.n_observations for e in ok)),
                             scope, diagnostics, detail)

    # per-market
    rows = []
    for mid, sub in df.groupby("market_id"):
        x = sub["share_start"].to_numpy()
        y = sub["inflow_share"].to_numpy()
        buyers = int(sub["n_buyers"].sum())
        if np.ptp(x) == 0.0:
            rows.append((mid, np.nan, np.nan, np.nan, len(sub), buyers))
            continue
        a, se, n = _ols_slope(x, y, demeaned=False)
        # alternative fit with the intercept constrained to (1 - alpha)/N:
        # y - 1/N = alpha (x - 1/N) through the origin
        inv_n = 1.0 / sub["n_firms"].to_numpy()
        xc, yc = x - inv_n, y - inv_n
        a_con = float(xc @ yc / (xc @ xc))
        rows.append((mid, a, se, a_con, n, buyers))
    detail = pd.DataFrame(rows, columns=["market_id", "alpha_hat", "se",
                                         "alpha_hat_constrained", "n", "n_buyers"])
    good = detail.dropna(subset=["alpha_hat"])
    if good.empty:
        return AlphaEstimate(np.nan, np.nan, len(df), scope,
                             {**diagnostics, "reason": "zero share variance"},
                             detail)
    alphas = good["alpha_hat"].to_numpy()
    se = float(alphas.std(ddof=1) / np.sqrt(len(alphas))) if len(alphas) > 1 else \
        float(good["se"].iloc[0])
    w = good["n_buyers"].to_numpy().astype(float)
    diagnostics["alpha_hat_buyer_weighted"] = float((alphas * w).sum() / w.sum())
    diagnostics["alpha_hat_constrained_mean"] = float(
        good["alpha_hat_constrained"].mean())
    return AlphaEstimate(float(alphas.mean()), se, len(df), scope,
                         diagnostics, detail)


def alpha_by_year(panel: FlowPanel, beta1: float = 1.0) -> list[AlphaEstimate]:
    """Per-year slope series (within-market demeaning inside each year)."""
    df = _estimation_frame(panel, beta1)
    out = []
    for year, sub in sorted(df.groupby("year"), key=lambda t: t[0]):
        g = sub.groupby("market_id")
        x = (sub["share_start"] - g["share_start"].transform("mean")).to_numpy()
        y = (sub["inflow_share"] - g["inflow_share"].transform("mean")).to_numpy()
        diagnostics = {"year": int(year), "beta1": beta1}
        if len(sub) < 3 or np.allclose(x, 0.0):
            out.append(AlphaEstimate(np.nan, np.nan, len(sub), "per-year",
                                     {**diagnostics, "reason": "degenerate year"}))
            continue
        a, se, n = _ols_slope(x, y, demeaned=True)
        out.append(AlphaEstimate(a, se, n, "per-year", diagnostics))
    return out


def synth_panel(alpha_true, n_markets: int, years: int,
                frictions: FrictionParams, ell: PreferenceDistribution,
                seed: int, n_agents: int = 50_000, year_length: float | None = None,
                coverage: float = 1.0, min_value: float | None = None,
                start_year: int = 2000) -> pd.DataFrame:
    """Simulate markets and emit annual buyer-firm transaction rows.

    alpha_true is a scalar or a per-year sequence (length `years`).  Links
    are year-end snapshots of the event simulation, with buyer ids stable
    across years within a market.  With coverage < 1 each buyer-firm
    relationship (a spell of consecutive years at the same firm) is
    recorded with independent probability `coverage`, mimicking a panel
    that observes only a subset of suppliers: arrivals poached from an
    unrecorded relationship show up as new-to-panel inflow, and the
    matching adjustment uses beta1 = coverage.  Transaction values are
    lognormal; min_value optionally drops small rows, mimicking
    declaration thresholds.
    """
    from .simulation import SimConfig, _run_single

    alphas = np.broadcast_to(np.asarray(alpha_true, dtype=float), (years,)).copy()
    if year_length is None:
        # short years limit within-year job-ladder moves, which would bias
        # snapshot-classified inflows toward the stock distribution
        year_length = 0.01 / max(frictions.mu, frictions.lambda_tot)
    # stocks start at the analytic equilibrium, so the burn-in only needs to
    # wash out the sampling of the initial condition
    burn_in = 0.5 / frictions.mu
    snap_times = burn_in + year_length * np.arange(years + 1)
    horizon = float(snap_times[-1]) + 1e-9
    alpha_times = np.concatenate([[0.0], snap_times[:-1]])
    alpha_values = np.concatenate([[alphas[0]], alphas])

    base = FrictionParams(mu=frictions.mu, lambda_tot=frictions.lambda_tot,
                          K=frictions.K, alpha=float(alphas[0]))

    frames = []
    for m in range(n_markets):
        config = SimConfig(n_agents=n_agents, ell=ell, frictions=base,
                           horizon=horizon, burn_in=burn_in, seed=seed + m,
                           replications=1, init="equilibrium",
                           batch_dt=min(0.01 / frictions.mu, year_length / 5.0),
                           alpha_schedule=(alpha_times, alpha_values))
        _, snaps = _run_single(config, seed + m, snap_times=snap_times)
        rng = np.random.default_rng(seed * 7919 + m)
        # per-uid spell state for relationship-level coverage
        max_uid = max(int(snaps["uid"][k].max(initial=-1)) for k in range(years + 1))
        last_firm = np.full(max_uid + 1, -2, dtype=np.int64)
        last_year = np.full(max_uid + 1, -2, dtype=np.int64)
        recorded = np.zeros(max_uid + 1, dtype=bool)
        for k in range(years + 1):
            firm = snaps["firm"][k]
            uid = snaps["uid"][k]
            matched = firm >= 0
            f, u = firm[matched], uid[matched]
            if coverage < 1.0:
                # same firm as the previous year = same spell, keep its
                # panel status; otherwise draw afresh
                cont = (last_firm[u] == f) & (last_year[u] == k - 1)
                flags = np.where(cont, recorded[u],
                                 rng.random(u.size) < coverage)
                recorded[u] = flags
                last_firm[u], last_year[u] = f, k
                f, u = f[flags], u[flags]
            value = np.round(rng.lognormal(mean=0.0, sigma=1.0, size=f.size), 4)
            value = np.maximum(value, 1e-4).astype(np.float32)
            frames.append(pd.DataFrame({
                "year": np.full(f.size, start_year + k, dtype=np.int16),
                "market_id": np.full(f.size, m, dtype=np.int16),
                "firm_id": f.astype(np.int16),
                # buyer ids unique across markets
                "buyer_id": m * 10_000_000_000 + u,
                "value": value,
            }))
    df = pd.concat(frames, ignore_index=True)
    if min_value is not None:
        df = df[df["value"] >= min_value].reset_index(drop=True)
    return df


def write_alpha_by_market(estimate: AlphaEstimate, path) -> None:
    """Fixed four-column schema; the constrained-intercept and
    buyer-weighted variants stay in the estimate's detail frame."""
    if estimate.scope != "per-market" or estimate.detail is None:
        raise ValueError("needs a per-market estimate with detail")
    cols = ["market_id", "alpha_hat", "se", "n"]
    estimate.detail[cols].to_csv(path, index=False)


def write_alpha_by_year(estimates: list[AlphaEstimate], path) -> None:
    rows = [{"year": e.diagnostics.get("year"), "alpha_hat": e.alpha_hat,
             "se": e.se, "n": e.n_observations} for e in estimates]
    pd.DataFrame(rows).to_csv(path, index=False)


def write_diagnostics(estimate: AlphaEstimate, path) -> None:
    payload = {
        "alpha_hat": None if estimate.undefined else estimate.alpha_hat,
        "se": None if not np.isfinite(estimate.se) else estimate.se,
        "n_observations": estimate.n_observations,
        "scope": estimate.scope,
        "diagnostics": {k: v for k, v in estimate.diagnostics.items()},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
