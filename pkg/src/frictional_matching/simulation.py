"""Continuous-time Monte Carlo of the matching market with finite agents.

One firm sits in each grid cell; agents enter at a Poisson rate calibrated
to hold the population near its target, exit at rate mu, and meet firms
at rates affine in the firms' current empirical shares.  Matched agents
switch only to strictly closer firms.  The simulator serves as an
independent oracle for the analytic and fixed-point solutions.

Meeting weights are refreshed from the empirical shares at a fixed batch
interval rather than per event; within a batch the event process is an
exact Gillespie draw under frozen rates.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import FrictionParams, Grid, PreferenceDistribution
from .continuum import match_density, solve_fixed_point, SolveOptions, FixedPointError

try:  # pure-python fallback keeps the module importable without numba
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

__all__ = [
    "SimConfig",
    "SimResult",
    "simulate",
    "replicate",
    "two_firm_preference",
    "NUMBA_AVAILABLE",
]

_MEETINGS_PER_LIFETIME_CAP = 1e4


def two_firm_preference(p_a: float) -> PreferenceDistribution:
    """Two-cell circle: firm A at 0 preferred by mass p_a, firm B at 1/2."""
    return PreferenceDistribution(Grid(2), np.array([2.0 * p_a, 2.0 * (1.0 - p_a)]))


@dataclass(frozen=True)
class SimConfig:
    n_agents: int
    ell: PreferenceDistribution
    frictions: FrictionParams
    horizon: float
    burn_in: float | None = None
    seed: int = 0
    replications: int = 4
    batch_dt: float | None = None
    init: str = "empty"  # or "equilibrium"
    alpha_schedule: tuple | None = None  # (times, alphas) overriding frictions.alpha

    def __post_init__(self):
        if self.n_agents < 100:
            raise ValueError("n_agents must be at least 100")
        fr = self.frictions
        per_lifetime = max(fr.K, 1.0) * fr.lambda_tot / fr.mu
        if per_lifetime > _MEETINGS_PER_LIFETIME_CAP:
            raise ValueError(
                f"expected meetings per lifetime {per_lifetime:.3g} exceeds the "
                f"safety cap {_MEETINGS_PER_LIFETIME_CAP:.0g}")
        if self.burn_in is not None and not 0 < self.burn_in < self.horizon:
            raise ValueError("need horizon > burn_in > 0")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.init not in ("empty", "equilibrium"):
            raise ValueError(f"unknown init {self.init!r}")

    @property
    def effective_burn_in(self) -> float:
        if self.burn_in is not None:
            return self.burn_in
        # several expected lifetimes by default; equilibrium starts need less
        factor = 1.0 if self.init == "equilibrium" else 5.0
        return factor / self.frictions.mu

    @property
    def effective_batch_dt(self) -> float:
        return self.batch_dt if self.batch_dt is not None else 0.01 / self.frictions.mu


@dataclass(frozen=True)
class SimResult:
    """Time-averaged post-burn-in statistics, aggregated over replications."""

    grid: Grid
    share_density: np.ndarray  # rescaled shares, comparable to ShareProfile
    share_se: np.ndarray
    unmatched_fraction: float
    unmatched_se: float
    mean_population: float
    event_counts: dict
    replications: int
    per_replication_shares: np.ndarray = field(repr=False, default=None)

    def to_json(self, path) -> None:
        payload = {
            "n_cells": self.grid.n_points,
            "cell_centers": self.grid.points.tolist(),
            "share_density": self.share_density.tolist(),
            "share_se": self.share_se.tolist(),
            "unmatched_fraction": self.unmatched_fraction,
            "unmatched_se": self.unmatched_se,
            "mean_population": self.mean_population,
            "event_counts": self.event_counts,
            "replications": self.replications,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cell_center", "share", "se"])
            for c, s, e in zip(self.grid.points, self.share_density, self.share_se):
                writer.writerow([c, s, e])


@njit(cache=True)
def _circ_dist(a, b):
    d = a - b
    if d < 0.0:
        d = -d
    d = d % 1.0
    if 1.0 - d < d:
        d = 1.0 - d
    return d


@njit(cache=True)
def _run_events(
    n_cells, ell_cum, mu, lam_tot, K, entry_rate,
    alpha_times, alpha_values,
    horizon, burn_in, batch_dt, seed,
    atype, afirm, alive,
    u_ids, u_pos, m_ids, m_pos, u_count, m_count,
    free_ids, free_count, match_count,
    snap_times, snap_uid, snap_firm, agent_uid, next_uid,
):
    np.random.seed(seed)
    cap = atype.shape[0]
    n_snaps = snap_times.shape[0]

    w_cum = np.empty(n_cells)
    share_acc = np.zeros(n_cells)
    cell_last = np.zeros(n_cells)
    u_time = 0.0
    m_time = 0.0
    collect_time = 0.0
    counts = np.zeros(5, dtype=np.int64)  # entry, exit, meet_u, meet_m, overflow

    t = 0.0
    next_batch = batch_dt
    snap_idx = 0
    collecting = burn_in <= 0.0
    alpha_idx = 0
    alpha = alpha_values[0]

    # refresh meeting weights from current empirical shares
    def_w = 1.0 / n_cells
    acc = 0.0
    for j in range(n_cells):
        if m_count > 0:
            wj = alpha * match_count[j] / m_count + (1.0 - alpha) * def_w
        else:
            wj = def_w
        acc += wj
        w_cum[j] = acc
    w_cum[n_cells - 1] = 1.0

    while t < horizon:
        # next forced stop: batch boundary, burn-in end, snapshot or horizon
        cut = next_batch
        kind = 0  # 0 batch, 1 burn-in, 2 snapshot, 3 horizon
        if not collecting and burn_in < cut:
            cut = burn_in
            kind = 1
        if snap_idx < n_snaps and snap_times[snap_idx] < cut:
            cut = snap_times[snap_idx]
            kind = 2
        if horizon < cut:
            cut = horizon
            kind = 3

        U = u_count
        M = m_count
        total = entry_rate + mu * (U + M) + lam_tot * (K * U + M)
        dt = -math.log(np.random.random()) / total

        if t + dt >= cut:
            if collecting:
                u_time += U * (cut - t)
                m_time += M * (cut - t)
                collect_time += cut - t
            t = cut
            if kind == 3:
                break
            if kind == 1:
                collecting = True
                for j in range(n_cells):
                    share_acc[j] = 0.0
                    cell_last[j] = t
                u_time = 0.0
                m_time = 0.0
                collect_time = 0.0
                continue
            if kind == 2:
                for slot in range(cap):
                    if alive[slot] == 1:
                        snap_firm[snap_idx, slot] = afirm[slot]
                        snap_uid[snap_idx, slot] = agent_uid[slot]
                    else:
                        snap_firm[snap_idx, slot] = -2
                        snap_uid[snap_idx, slot] = -1
                snap_idx += 1
                continue
            # batch boundary: refresh alpha and meeting weights
            next_batch += batch_dt
            while alpha_idx + 1 < alpha_times.shape[0] and t >= alpha_times[alpha_idx + 1]:
                alpha_idx += 1
            alpha = alpha_values[alpha_idx]
            acc = 0.0
            for j in range(n_cells):
                if m_count > 0:
                    wj = alpha * match_count[j] / m_count + (1.0 - alpha) * def_w
                else:
                    wj = def_w
                acc += wj
                w_cum[j] = acc
            w_cum[n_cells - 1] = 1.0
            continue

        # ordinary event
        if collecting:
            u_time += U * dt
            m_time += M * dt
            collect_time += dt
        t += dt
        r = np.random.random() * total

        if r < entry_rate:
            counts[0] += 1
            if free_count == 0:
                counts[4] += 1  # capacity overflow; drop the entrant
                continue
            free_count -= 1
            slot = free_ids[free_count]
            c = np.searchsorted(ell_cum, np.random.random())
            if c >= n_cells:
                c = n_cells - 1
            # continuous type uniform within the cell: firms at exactly the
            # boundary distance are then strictly closer half the time, the
            # midpoint-exact measure the analytic solver uses
            atype[slot] = (c + np.random.random() - 0.5) / n_cells
            afirm[slot] = -1
            alive[slot] = 1
            agent_uid[slot] = next_uid
            next_uid += 1
            u_pos[slot] = u_count
            u_ids[u_count] = slot
            u_count += 1
            continue
        r -= entry_rate

        if r < mu * (U + M):
            counts[1] += 1
            v = int(np.random.random() * (U + M))
            if v >= U + M:
                v = U + M - 1
            if v < U:
                slot = u_ids[v]
                u_count -= 1
                last = u_ids[u_count]
                u_ids[v] = last
                u_pos[last] = v
            else:
                idx = v - U
                slot = m_ids[idx]
                j = afirm[slot]
                if collecting:
                    share_acc[j] += match_count[j] * (t - cell_last[j])
                    cell_last[j] = t
                match_count[j] -= 1
                m_count -= 1
                last = m_ids[m_count]
                m_ids[idx] = last
                m_pos[last] = idx
            alive[slot] = 0
            afirm[slot] = -1
            free_ids[free_count] = slot
            free_count += 1
            continue
        r -= mu * (U + M)

        if r < lam_tot * K * U:
            counts[2] += 1
            if U == 0:
                continue
            v = int(np.random.random() * U)
            if v >= U:
                v = U - 1
            slot = u_ids[v]
            j = np.searchsorted(w_cum, np.random.random())
            if j >= n_cells:
                j = n_cells - 1
            # unmatched agents accept the first firm they meet
            u_count -= 1
            last = u_ids[u_count]
            u_ids[v] = last
            u_pos[last] = v
            afirm[slot] = j
            m_pos[slot] = m_count
            m_ids[m_count] = slot
            m_count += 1
            if collecting:
                share_acc[j] += match_count[j] * (t - cell_last[j])
                cell_last[j] = t
            match_count[j] += 1
            continue

        # on-the-job meeting
        counts[3] += 1
        if M == 0:
            continue
        v = int(np.random.random() * M)
        if v >= M:
            v = M - 1
        slot = m_ids[v]
        j = np.searchsorted(w_cum, np.random.random())
        if j >= n_cells:
            j = n_cells - 1
        cur = afirm[slot]
        x = atype[slot]
        if _circ_dist(x, j / n_cells) < _circ_dist(x, cur / n_cells):
            if collecting:
                share_acc[cur] += match_count[cur] * (t - cell_last[cur])
                share_acc[j] += match_count[j] * (t - cell_last[j])
                cell_last[cur] = t
                cell_last[j] = t
            match_count[cur] -= 1
            match_count[j] += 1
            afirm[slot] = j

    # flush per-cell accumulators
    for j in range(n_cells):
        share_acc[j] += match_count[j] * (t - cell_last[j])

    return share_acc, u_time, m_time, collect_time, counts, next_uid


def _equilibrium_profile(ell: PreferenceDistribution, frictions: FrictionParams) -> np.ndarray:
    if frictions.alpha == 0.0:
        from .continuum import solve_constant_rate

        return solve_constant_rate(ell, frictions.r_f).shares
    try:
        from .continuum import ALPHA_CAP

        capped = replace(frictions, alpha=min(frictions.alpha, ALPHA_CAP))
        res = solve_fixed_point(ell, capped, SolveOptions(tol=1e-8))
        return res.profile.shares
    except FixedPointError:
        return np.array(ell.density)


def _two_firm_init(p_a: float, fr: FrictionParams) -> tuple[np.ndarray, np.ndarray]:
    """Steady-state stocks of the two-firm market with K-adjusted meeting
    rates for the unmatched.  Returns (matched probability per type,
    P(firm = own favorite | matched) per type)."""
    from .two_firm import select_stable_share

    s = select_stable_share(p_a, fr.r_f, fr.alpha)
    w = np.array([fr.alpha * s + (1.0 - fr.alpha) / 2.0,
                  fr.alpha * (1.0 - s) + (1.0 - fr.alpha) / 2.0])
    lam = fr.lambda_tot * w
    mu, K = fr.mu, fr.K
    p = np.array([p_a, 1.0 - p_a])
    p_matched = np.empty(2)
    p_fav = np.empty(2)
    for i, j in ((0, 1), (1, 0)):
        u = mu * p[i] / (K * fr.lambda_tot + mu)
        h_other = K * lam[j] * u / (mu + lam[i])
        h_fav = (K * lam[i] * u + lam[i] * h_other) / mu
        p_matched[i] = (h_fav + h_other) / p[i]
        p_fav[i] = h_fav / (h_fav + h_other) if h_fav + h_other > 0 else 1.0
    return p_matched, p_fav


def _init_population(config: SimConfig, rng: np.random.Generator,
                     atype, afirm, alive, agent_uid):
    """Seed the agent arrays; returns (n_seeded, next_uid)."""
    n_cells = config.ell.grid.n_points
    fr = config.frictions
    n = config.n_agents

    cell_probs = config.ell.density / config.ell.density.sum()
    cells = rng.choice(n_cells, size=n, p=cell_probs)
    types = (cells + rng.random(n) - 0.5) / n_cells

    firms = np.full(n, -1, dtype=np.int64)
    if n_cells == 2:
        # exact two-firm stocks (the 2-cell continuum discretization is
        # too coarse and would seed a biased share)
        p_matched, p_fav = _two_firm_init(config.ell.density[0] / 2.0, fr)
        matched = rng.random(n) < p_matched[cells]
        fav = rng.random(n) < p_fav[cells]
        firms[matched] = np.where(fav[matched], cells[matched], 1 - cells[matched])
    else:
        m_star = fr.K * fr.lambda_tot / (fr.K * fr.lambda_tot + fr.mu)
        matched = rng.random(n) < m_star

        shares = _equilibrium_profile(config.ell, fr)
        lam_profile = fr.lambda_tot * (fr.alpha * shares + (1.0 - fr.alpha))
        h = match_density(config.ell, lam_profile, fr)
        h = np.maximum(h, 1e-300)
        row_cum = np.cumsum(h, axis=1)
        row_cum /= row_cum[:, -1:]

        u = rng.random(n)
        for c in range(n_cells):
            mask = matched & (cells == c)
            if mask.any():
                firms[mask] = np.searchsorted(row_cum[c], u[mask])
        firms = np.minimum(firms, n_cells - 1)

    atype[:n] = types
    afirm[:n] = firms
    alive[:n] = 1
    agent_uid[:n] = np.arange(n)
    return n, n


def _run_single(config: SimConfig, seed: int,
                snap_times: np.ndarray | None = None):
    n_cells = config.ell.grid.n_points
    fr = config.frictions
    cap = 2 * config.n_agents + 1024

    atype = np.zeros(cap, dtype=np.float64)
    afirm = np.full(cap, -1, dtype=np.int64)
    alive = np.zeros(cap, dtype=np.int64)
    agent_uid = np.full(cap, -1, dtype=np.int64)
    u_ids = np.zeros(cap, dtype=np.int64)
    u_pos = np.zeros(cap, dtype=np.int64)
    m_ids = np.zeros(cap, dtype=np.int64)
    m_pos = np.zeros(cap, dtype=np.int64)
    free_ids = np.zeros(cap, dtype=np.int64)
    match_count = np.zeros(n_cells, dtype=np.int64)

    next_uid = 0
    n_seeded = 0
    if config.init == "equilibrium":
        rng = np.random.default_rng(seed)
        n_seeded, next_uid = _init_population(config, rng, atype, afirm, alive, agent_uid)

    u_count = 0
    m_count = 0
    for slot in range(n_seeded):
        if afirm[slot] < 0:
            u_ids[u_count] = slot
            u_pos[slot] = u_count
            u_count += 1
        else:
            m_ids[m_count] = slot
            m_pos[slot] = m_count
            m_count += 1
            match_count[afirm[slot]] += 1
    free_n = 0
    for slot in range(cap - 1, n_seeded - 1, -1):
        free_ids[free_n] = slot
        free_n += 1

    cell_mass = config.ell.density / n_cells
    ell_cum = np.cumsum(cell_mass / cell_mass.sum())
    ell_cum[-1] = 1.0

    if config.alpha_schedule is not None:
        alpha_times = np.asarray(config.alpha_schedule[0], dtype=float)
        alpha_values = np.asarray(config.alpha_schedule[1], dtype=float)
    else:
        alpha_times = np.array([0.0])
        alpha_values = np.array([fr.alpha])

    if snap_times is None:
        snap_times = np.empty(0)
    snap_uid = np.full((len(snap_times), cap), -1, dtype=np.int64)
    snap_firm = np.full((len(snap_times), cap), -2, dtype=np.int64)

    share_acc, u_time, m_time, collect_time, counts, next_uid = _run_events(
        n_cells, ell_cum, fr.mu, fr.lambda_tot, fr.K,
        config.n_agents * fr.mu,
        alpha_times, alpha_values,
        config.horizon, config.effective_burn_in, config.effective_batch_dt,
        seed & 0x7FFFFFFF,
        atype, afirm, alive,
        u_ids, u_pos, m_ids, m_pos, u_count, m_count,
        free_ids, free_n, match_count,
        np.asarray(snap_times, dtype=float), snap_uid, snap_firm,
        agent_uid, next_uid,
    )

    shares = share_acc * n_cells / m_time if m_time > 0 else np.zeros(n_cells)
    stats = {
        "shares": shares,
        "unmatched_fraction": u_time / (u_time + m_time),
        "mean_population": (u_time + m_time) / collect_time,
        "counts": counts,
    }
    snapshots = {
        "times": np.asarray(snap_times, dtype=float),
        "uid": snap_uid,
        "firm": snap_firm,
    }
    return stats, snapshots


def simulate(config: SimConfig) -> SimResult:
    """Run config.replications independent replications (seeds seed + i)
    and aggregate; deterministic given (config, seed)."""
    k = config.replications
    all_shares = np.zeros((k, config.ell.grid.n_points))
    unmatched = np.zeros(k)
    pops = np.zeros(k)
    counts = np.zeros(5, dtype=np.int64)
    for i in range(k):
        stats, _ = _run_single(config, config.seed + i)
        all_shares[i] = stats["shares"]
        unmatched[i] = stats["unmatched_fraction"]
        pops[i] = stats["mean_population"]
        counts += stats["counts"]

    if k > 1:
        share_se = all_shares.std(axis=0, ddof=1) / np.sqrt(k)
        unmatched_se = float(unmatched.std(ddof=1) / np.sqrt(k))
    else:
        share_se = np.zeros_like(all_shares[0])
        unmatched_se = 0.0

    return SimResult(
        grid=config.ell.grid,
        share_density=all_shares.mean(axis=0),
        share_se=share_se,
        unmatched_fraction=float(unmatched.mean()),
        unmatched_se=unmatched_se,
        mean_population=float(pops.mean()),
        event_counts={
            "entries": int(counts[0]),
            "exits": int(counts[1]),
            "meetings_unmatched": int(counts[2]),
            "meetings_matched": int(counts[3]),
            "dropped_entries": int(counts[4]),
        },
        replications=k,
        per_replication_shares=all_shares,
    )


def replicate(config: SimConfig, k: int) -> SimResult:
    """Aggregate k replications with per-replication seeds seed + i."""
    if k < 2:
        raise ValueError("need at least 2 replications")
    return simulate(replace(config, replications=k))
