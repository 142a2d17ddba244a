"""Command-line interface: solvers, simulator, estimator and sweeps.

Every subcommand resolves its parameters from (in increasing precedence)
preset, config file and command-line flags, writes its outputs into the
--out directory, and drops a manifest.json with the fully resolved
configuration so any run can be reproduced byte-for-byte from the
manifest alone.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .core import FrictionParams, Grid, SurplusFunction, make_preference
from .two_firm import share_affine, share_constant_rate, share_proportional
from .continuum import (
    FixedPointError,
    SolveOptions,
    median_point,
    profile_stats,
    solve_constant_rate,
    solve_fixed_point,
)
from .efficiency import agent_utility, efficiency_curve, nash_and_social
from .simulation import SimConfig, simulate
from .estimation import (
    PanelError,
    alpha_by_year,
    estimate_alpha,
    ingest_transactions,
    synth_panel,
    write_alpha_by_market,
    write_alpha_by_year,
    write_diagnostics,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3

_BETA1_GRID = (0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0)

# ---------------------------------------------------------------------------
# presets: named parameter bundles reproducing the library's reference runs

PRESETS: dict[str, dict] = {
    # two-firm share curves at moderate frictions, one curve per slope
    "fig3": {"command": "two-firm", "mode": "affine", "r_f": "0.7",
             "alpha": "0,0.5,0.85,1", "p_a": "0:1:101"},
    # niche firm preferred by 10% of agents, share against friction level
    "fig4": {"command": "two-firm", "mode": "affine", "p_a": "0.1",
             "alpha": "0,0.5,0.85,1", "r_f": "0.02:4:100"},
    # constant-rate smoothing of a sharp block preference
    "fig5": {"command": "continuum", "alpha": "0", "ell": "block",
             "lo": "0.4", "hi": "0.6", "height": "5", "n_cells": "256",
             "r_f": "0.1,0.5,1,3"},
    # variance of the constant-rate profile as frictions grow
    "fig6": {"command": "continuum", "alpha": "0", "ell": "block",
             "lo": "0.4", "hi": "0.6", "height": "5", "n_cells": "256",
             "r_f": "0.05,0.1,0.2,0.5,1,2,3,5,8"},
    # size-dependent rates over a wide block: concentration then attenuation
    "fig7a": {"command": "continuum", "alpha": "0.8", "ell": "block",
              "lo": "0.25", "hi": "0.75", "height": "2", "n_cells": "256",
              "r_f": "0.2,1,3,8"},
    # near-proportional rates concentrate the profile on the median type
    "fig7b": {"command": "continuum", "alpha": "0.99", "ell": "block",
              "lo": "0.25", "hi": "0.75", "height": "2", "n_cells": "256",
              "r_f": "0.2,1,3,8"},
    # asymmetric double peak: the mass point is the median, not the mode
    "double-peak": {"command": "continuum", "alpha": "0.95",
                    "ell": "double_peak", "centers": "0.3,0.75",
                    "sds": "0.05,0.12", "weights": "0.45,0.55",
                    "n_cells": "256", "r_f": "0.5,2"},
    # efficiency against the meeting-rate slope, low frictions
    "eff-rf02": {"command": "efficiency", "ell": "wrapped_gaussian",
                 "center": "0.5", "sd": "0.15", "n_cells": "128",
                 "r_f": "0.2"},
    # same at higher frictions: the social argmax shifts
    "eff-rf05": {"command": "efficiency", "ell": "wrapped_gaussian",
                 "center": "0.5", "sd": "0.15", "n_cells": "128",
                 "r_f": "0.5"},
    # deviation utility against a population playing proportional rates
    "eff-tilde1": {"command": "efficiency", "ell": "wrapped_gaussian",
                   "center": "0.5", "sd": "0.15", "n_cells": "128",
                   "r_f": "0.2", "alpha_tilde": "0.999"},
    # low-friction sweep at alpha = 0.75 for two heterogeneity levels
    "appendix-F": {"command": "sweep", "alpha": "0.75",
                   "r_f": "0.05,0.1,0.2,0.3", "n_cells": "128",
                   "sd": "0.25,0.1"},
}


# ---------------------------------------------------------------------------
# config plumbing


def _read_config_file(path: str) -> dict[str, str]:
    """Flat key=value file; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _resolve(args: argparse.Namespace, defaults: dict[str, str],
             known: set[str]) -> dict[str, str]:
    """Merge preset < config file < explicit flags; reject unknown keys."""
    merged = dict(defaults)
    if args.preset:
        preset = PRESETS.get(args.preset)
        if preset is None:
            raise ValueError(f"unknown preset {args.preset!r}; "
                             f"available: {', '.join(sorted(PRESETS))}")
        if preset.get("command") != args.command:
            raise ValueError(f"preset {args.preset!r} belongs to subcommand "
                             f"{preset.get('command')!r}, not {args.command!r}")
        merged.update({k: v for k, v in preset.items() if k != "command"})
    if args.config:
        merged.update(_read_config_file(args.config))
    for key in known:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            merged[key] = str(flag)
    unknown = set(merged) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}; "
                         f"accepted: {sorted(known)}")
    return merged


def _floats(spec: str) -> np.ndarray:
    """Parse '1,2,3' or 'start:stop:count' into an array of floats."""
    if ":" in spec:
        lo, hi, num = spec.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    return np.array([float(v) for v in spec.split(",")])


def _write_manifest(out_dir: Path, command: str, resolved: dict,
                    files: list[str], seed: int | None = None,
                    flags: dict | None = None) -> None:
    payload = {
        "command": command,
        "version": __version__,
        "config": resolved,
        "seed": seed,
        "outputs": files,
    }
    if flags:
        payload.update(flags)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2)


def _make_ell(cfg: dict, grid: Grid):
    kind = cfg["ell"]
    if kind == "uniform":
        return make_preference("uniform", grid)
    if kind == "block":
        return make_preference("block", grid, lo=float(cfg["lo"]),
                               hi=float(cfg["hi"]),
                               height=float(cfg.get("height", 1.0)))
    if kind == "wrapped_gaussian":
        return make_preference("wrapped_gaussian", grid,
                               center=float(cfg["center"]), sd=float(cfg["sd"]))
    if kind == "skew_gaussian":
        return make_preference("skew_gaussian", grid,
                               center=float(cfg["center"]),
                               sd_left=float(cfg["sd_left"]),
                               sd_right=float(cfg["sd_right"]))
    if kind == "double_peak":
        return make_preference(
            "double_peak", grid,
            centers=tuple(_floats(cfg["centers"])),
            sds=tuple(_floats(cfg["sds"])),
            weights=tuple(_floats(cfg.get("weights", "0.5,0.5"))))
    raise ValueError(f"unknown preference kind {kind!r}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_two_firm(args) -> int:
    known = {"mode", "p_a", "r_f", "alpha"}
    cfg = _resolve(args, {"mode": "affine", "p_a": "0:1:51", "r_f": "0.7",
                          "alpha": "0"}, known)
    mode = cfg["mode"]
    if mode not in ("constant", "proportional", "affine"):
        raise ValueError(f"mode must be constant, proportional or affine, "
                         f"got {mode!r}")
    p_as, r_fs, alphas = _floats(cfg["p_a"]), _floats(cfg["r_f"]), _floats(cfg["alpha"])

    rows = []
    for alpha in alphas:
        for r_f in r_fs:
            for p_a in p_as:
                if mode == "constant":
                    rows.append((mode, alpha, r_f, p_a,
                                 share_constant_rate(p_a, r_f), True))
                elif mode == "proportional":
                    rows.append((mode, alpha, r_f, p_a,
                                 share_proportional(p_a, r_f), True))
                else:
                    for s, stable in share_affine(p_a, r_f, alpha):
                        rows.append((mode, alpha, r_f, p_a, s, stable))
    df = pd.DataFrame(rows, columns=["mode", "alpha", "r_f", "p_a",
                                     "share", "stable"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    df.to_csv(out / "two_firm.csv", index=False)
    _write_manifest(out, "two-firm", cfg, ["two_firm.csv"])
    print(f"wrote {len(df)} rows to {out / 'two_firm.csv'}")
    return EXIT_OK


def _cmd_continuum(args) -> int:
    known = {"ell", "lo", "hi", "height", "center", "sd", "sd_left", "sd_right", "centers", "sds",
             "weights", "alpha", "r_f", "n_cells", "tol", "max_iterations",
             "damping"}
    cfg = _resolve(args, {"ell": "wrapped_gaussian", "center": "0.5",
                          "sd": "0.15", "alpha": "0", "r_f": "0.5",
                          "n_cells": "256"}, known)
    grid = Grid(int(cfg["n_cells"]))
    ell = _make_ell(cfg, grid)
    alpha = float(cfg["alpha"])
    r_fs = _floats(cfg["r_f"])
    opts = SolveOptions(
        tol=float(cfg.get("tol", 1e-10)),
        max_iterations=int(cfg.get("max_iterations", 10_000)),
        damping=float(cfg.get("damping", 0.5)))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    prof_rows, stat_rows, failures = [], [], []
    for r_f in r_fs:
        try:
            if alpha == 0.0:
                profile = solve_constant_rate(ell, r_f)
            else:
                profile = solve_fixed_point(
                    ell, FrictionParams.from_r_f(r_f, alpha=alpha),
                    opts=opts).profile
        except FixedPointError as exc:
            failures.append({"r_f": float(r_f), "error": str(exc)})
            continue
        for y, s in zip(grid.points, profile.shares):
            prof_rows.append((alpha, r_f, y, s))
        stat_rows.append({"alpha": alpha, "r_f": float(r_f),
                          **profile_stats(profile)})

    pd.DataFrame(prof_rows, columns=["alpha", "r_f", "y", "share"]).to_csv(
        out / "profiles.csv", index=False)
    pd.DataFrame(stat_rows).to_csv(out / "stats.csv", index=False)
    files = ["profiles.csv", "stats.csv"]
    _write_manifest(out, "continuum", cfg, files,
                    flags={"failed_r_f": failures, "partial": bool(failures)})
    print(f"wrote profiles for {len(stat_rows)}/{len(r_fs)} friction levels "
          f"to {out}")
    if failures:
        for f in failures:
            print(f"no convergence at r_f={f['r_f']}: {f['error']}",
                  file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_efficiency(args) -> int:
    known = {"ell", "lo", "hi", "height", "center", "sd", "sd_left", "sd_right", "centers", "sds",
             "weights", "r_f", "n_cells", "alpha_grid_size", "alpha_tilde",
             "surplus"}
    cfg = _resolve(args, {"ell": "wrapped_gaussian", "center": "0.5",
                          "sd": "0.15", "r_f": "0.2", "n_cells": "128",
                          "alpha_grid_size": "41"}, known)
    grid = Grid(int(cfg["n_cells"]))
    ell = _make_ell(cfg, grid)
    r_f = float(cfg["r_f"])
    sf = SurplusFunction(kind=cfg.get("surplus", "linear"))
    alphas = np.linspace(0.0, 0.999, int(cfg["alpha_grid_size"]))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        curve = efficiency_curve(ell, r_f, sf, alphas)
        outcome = nash_and_social(ell, r_f, sf, alphas)
    except FixedPointError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    pd.DataFrame({"alpha": curve.alphas, "efficiency": curve.values}).to_csv(
        out / "efficiency.csv", index=False)
    files = ["efficiency.csv", "report.json"]

    if cfg.get("alpha_tilde") is not None:
        a_t = float(cfg["alpha_tilde"])
        utils = np.array([agent_utility(a, a_t, ell, r_f, sf) for a in alphas])
        pd.DataFrame({"alpha": alphas, "utility": utils,
                      "alpha_tilde": a_t}).to_csv(out / "utility.csv",
                                                  index=False)
        files.append("utility.csv")

    report = {
        "nash_alpha": outcome.nash_alpha,
        "social_alpha": outcome.social_alpha,
        "externality_gap": outcome.externality_gap,
        "degenerate": outcome.degenerate,
        "cycle": list(outcome.cycle),
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2)
    _write_manifest(out, "efficiency", cfg, files)
    print(f"social optimum alpha = {outcome.social_alpha}, "
          f"nash alpha = {outcome.nash_alpha}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    known = {"ell", "lo", "hi", "height", "center", "sd", "sd_left", "sd_right", "centers", "sds",
             "weights", "n_cells", "n_agents", "mu", "lambda_tot", "K",
             "alpha", "horizon", "burn_in", "replications", "batch_dt",
             "init"}
    cfg = _resolve(args, {"ell": "wrapped_gaussian", "center": "0.5",
                          "sd": "0.15", "n_cells": "16", "n_agents": "20000",
                          "mu": "0.5", "lambda_tot": "1", "K": "1",
                          "alpha": "0", "horizon": "20",
                          "replications": "4", "init": "equilibrium"}, known)
    grid = Grid(int(cfg["n_cells"]))
    ell = _make_ell(cfg, grid)
    frictions = FrictionParams(mu=float(cfg["mu"]),
                               lambda_tot=float(cfg["lambda_tot"]),
                               K=float(cfg["K"]), alpha=float(cfg["alpha"]))
    sim_config = SimConfig(
        n_agents=int(cfg["n_agents"]), ell=ell, frictions=frictions,
        horizon=float(cfg["horizon"]),
        burn_in=float(cfg["burn_in"]) if "burn_in" in cfg else None,
        seed=args.seed, replications=int(cfg["replications"]),
        batch_dt=float(cfg["batch_dt"]) if "batch_dt" in cfg else None,
        init=cfg["init"])
    result = simulate(sim_config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.to_csv(out / "sim_shares.csv")
    result.to_json(out / "sim_summary.json")
    _write_manifest(out, "simulate", cfg,
                    ["sim_shares.csv", "sim_summary.json"], seed=args.seed)
    print(f"unmatched fraction {result.unmatched_fraction:.4f} "
          f"(+-{result.unmatched_se:.4f}), outputs in {out}")
    return EXIT_OK


def _cmd_estimate(args) -> int:
    known = {"input", "beta1", "scope", "min_value"}
    cfg = _resolve(args, {"beta1": "1", "scope": "pooled-FE"}, known)
    if "input" not in cfg:
        raise ValueError("estimate needs input=<transactions.csv> "
                         "(flag --input or config key)")
    beta1 = float(cfg["beta1"])
    scope = cfg["scope"]

    panel = ingest_transactions(cfg["input"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    est = estimate_alpha(panel, scope=scope, beta1=beta1)
    write_diagnostics(est, out / "diagnostics.json")
    files.append("diagnostics.json")

    per_market = estimate_alpha(panel, scope="per-market", beta1=beta1)
    if per_market.detail is not None:
        write_alpha_by_market(per_market, out / "alpha_by_market.csv")
        files.append("alpha_by_market.csv")

    years = alpha_by_year(panel, beta1=beta1)
    write_alpha_by_year(years, out / "alpha_by_year.csv")
    files.append("alpha_by_year.csv")

    # sensitivity of the pooled estimate to the assumed in-panel fraction
    sens = []
    for b in sorted(set(_BETA1_GRID) | {beta1}):
        e = estimate_alpha(panel, scope="pooled-FE", beta1=b)
        sens.append({"beta1": b, "alpha_hat": e.alpha_hat, "se": e.se,
                     "clipped_fraction": e.diagnostics.get("clipped_fraction")})
    pd.DataFrame(sens).to_csv(out / "alpha_vs_beta1.csv", index=False)
    files.append("alpha_vs_beta1.csv")

    _write_manifest(out, "estimate", cfg, files)
    if est.undefined:
        print(f"estimate undefined: {est.diagnostics.get('reason')}",
              file=sys.stderr)
    else:
        print(f"alpha_hat = {est.alpha_hat:.4f} (+-{est.se:.4f}), "
              f"scope {scope}, n = {est.n_observations}")
    return EXIT_OK


def _cmd_synth_panel(args) -> int:
    known = {"alpha_true", "n_markets", "years", "n_cells", "ell", "lo",
             "hi", "height", "center", "sd", "sd_left", "sd_right",
             "centers", "sds", "weights",
             "mu", "lambda_tot", "K", "n_agents", "year_length", "coverage",
             "min_value", "start_year"}
    cfg = _resolve(args, {"alpha_true": "0.75", "n_markets": "4",
                          "years": "6", "n_cells": "20",
                          "ell": "wrapped_gaussian", "center": "0.5",
                          "sd": "0.12", "mu": "0.5", "lambda_tot": "1",
                          "K": "1", "n_agents": "20000",
                          "coverage": "1"}, known)
    grid = Grid(int(cfg["n_cells"]))
    ell = _make_ell(cfg, grid)
    frictions = FrictionParams(mu=float(cfg["mu"]),
                               lambda_tot=float(cfg["lambda_tot"]),
                               K=float(cfg["K"]), alpha=0.0)
    alpha_true = _floats(cfg["alpha_true"])
    if alpha_true.size == 1:
        alpha_true = float(alpha_true[0])

    df = synth_panel(
        alpha_true, n_markets=int(cfg["n_markets"]), years=int(cfg["years"]),
        frictions=frictions, ell=ell, seed=args.seed,
        n_agents=int(cfg["n_agents"]),
        year_length=float(cfg["year_length"]) if "year_length" in cfg else None,
        coverage=float(cfg["coverage"]),
        min_value=float(cfg["min_value"]) if "min_value" in cfg else None,
        start_year=int(cfg.get("start_year", 2000)))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    df.to_csv(out / "panel.csv", index=False)
    _write_manifest(out, "synth-panel", cfg, ["panel.csv"], seed=args.seed)
    print(f"wrote {len(df)} transaction rows to {out / 'panel.csv'}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    known = {"alpha", "r_f", "n_cells", "center", "sd"}
    cfg = _resolve(args, {"alpha": "0.75", "r_f": "0.05,0.1,0.2,0.3",
                          "n_cells": "128", "center": "0.5",
                          "sd": "0.25,0.1"}, known)
    alpha = float(cfg["alpha"])
    r_fs = _floats(cfg["r_f"])
    sds = _floats(cfg["sd"])
    grid = Grid(int(cfg["n_cells"]))
    center = float(cfg["center"])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, failures = [], []
    for sd in sds:
        ell = make_preference("wrapped_gaussian", grid, center=center, sd=sd)
        label = "mild" if sd == sds.max() else "strong"
        for r_f in r_fs:
            try:
                res = solve_fixed_point(
                    ell, FrictionParams.from_r_f(r_f, alpha=alpha))
            except FixedPointError as exc:
                failures.append({"sd": float(sd), "r_f": float(r_f),
                                 "error": str(exc)})
                continue
            stats = profile_stats(res.profile)
            rows.append({"heterogeneity": label, "sd": float(sd),
                         "alpha": alpha, "r_f": float(r_f), **stats,
                         "median_preference": median_point(ell)})
    pd.DataFrame(rows).to_csv(out / "sweep.csv", index=False)
    _write_manifest(out, "sweep", cfg, ["sweep.csv"],
                    flags={"failed": failures, "partial": bool(failures)})
    print(f"wrote {len(rows)} sweep rows to {out / 'sweep.csv'}")
    return EXIT_NO_CONVERGENCE if failures else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--seed", type=int, default=0, help="random seed")
    sub.add_argument("--preset", help="named parameter bundle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frictional-matching",
        description="Solvers, simulator and estimator for frictional "
                    "matching markets with heterogeneous preferences")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("two-firm", help="two-firm steady-state shares")
    _add_common(sub)
    sub.add_argument("--mode", choices=["constant", "proportional", "affine"])
    sub.add_argument("--p-a", dest="p_a")
    sub.add_argument("--r-f", dest="r_f")
    sub.add_argument("--alpha")

    sub = subs.add_parser("continuum", help="equilibrium share profiles")
    _add_common(sub)
    for flag in ("--ell", "--lo", "--hi", "--height", "--center", "--sd",
                 "--sd-left", "--sd-right",
                 "--centers", "--sds", "--weights", "--alpha", "--r-f",
                 "--n-cells", "--tol", "--max-iterations", "--damping"):
        sub.add_argument(flag, dest=flag[2:].replace("-", "_"))

    sub = subs.add_parser("efficiency", help="efficiency and Nash slopes")
    _add_common(sub)
    for flag in ("--ell", "--lo", "--hi", "--height", "--center", "--sd",
                 "--sd-left", "--sd-right",
                 "--centers", "--sds", "--weights", "--r-f", "--n-cells",
                 "--alpha-grid-size", "--alpha-tilde", "--surplus"):
        sub.add_argument(flag, dest=flag[2:].replace("-", "_"))

    sub = subs.add_parser("simulate", help="event-driven Monte Carlo")
    _add_common(sub)
    for flag in ("--ell", "--lo", "--hi", "--height", "--center", "--sd",
                 "--sd-left", "--sd-right",
                 "--centers", "--sds", "--weights", "--n-cells",
                 "--n-agents", "--mu", "--lambda-tot", "--K", "--alpha",
                 "--horizon", "--burn-in", "--replications", "--batch-dt",
                 "--init"):
        sub.add_argument(flag, dest=flag[2:].replace("-", "_"))

    sub = subs.add_parser("estimate", help="alpha from a transaction panel")
    _add_common(sub)
    sub.add_argument("--input")
    sub.add_argument("--beta1")
    sub.add_argument("--scope", choices=["per-market", "pooled-FE", "per-year"])

    sub = subs.add_parser("synth-panel", help="simulate a transaction panel")
    _add_common(sub)
    for flag in ("--alpha-true", "--n-markets", "--years", "--n-cells",
                 "--ell", "--lo", "--hi", "--height", "--center", "--sd",
                 "--sd-left", "--sd-right",
                 "--centers", "--sds", "--weights", "--mu", "--lambda-tot",
                 "--K", "--n-agents", "--year-length", "--coverage",
                 "--min-value", "--start-year"):
        sub.add_argument(flag, dest=flag[2:].replace("-", "_"))

    sub = subs.add_parser("sweep", help="concentration against frictions")
    _add_common(sub)
    for flag in ("--alpha", "--r-f", "--n-cells", "--center", "--sd"):
        sub.add_argument(flag, dest=flag[2:].replace("-", "_"))

    return parser


_DISPATCH = {
    "two-firm": _cmd_two_firm,
    "continuum": _cmd_continuum,
    "efficiency": _cmd_efficiency,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "synth-panel": _cmd_synth_panel,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except FixedPointError as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ValueError, PanelError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
