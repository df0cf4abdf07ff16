"""Command-line entry points.

Every command writes CSV/JSON artifacts (plot data, never figures) into a
run directory named by a digest of the command, its options, and all input
hashes, so re-running a configuration overwrites the same outputs with
identical bytes.  Exit codes: 0 success, 2 configuration error, 3 data
error, 4 numeric error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__, aggregation, demo_data, discounting, engine
from .aggregation import SCHEMES
from .config import Workspace, load_config
from .errors import ConfigError, DataError, NumericError, SccError
from .scenarios import growth_path
from .sensitivity import matrix_frame, run_matrix


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True,
                                     default=_json_default) + "\n")


def run_directory(ws: Workspace, command: str, options: dict) -> tuple[Path, dict]:
    """Digest-named output directory plus its manifest payload."""
    digests = ws.input_digests()
    seed = json.dumps({"command": command, "options": options, "inputs": digests},
                      sort_keys=True, default=_json_default)
    tag = hashlib.sha256(seed.encode()).hexdigest()[:10]
    run_dir = ws.config.output_dir / f"{command}-{tag}"
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"command": command, "options": options, "inputs": digests,
                "version": __version__, "run_tag": tag}
    return run_dir, manifest


def cmd_scc(args) -> int:
    cfg = load_config(args.config, output_dir=args.output_dir, workers=args.workers)
    ws = Workspace(cfg)
    scenario = args.scenario or cfg.base_scenario
    kind = args.damage or cfg.base_damage_kind
    eps = cfg.base_elasticity if args.elasticity is None else args.elasticity
    variant = args.calibration or cfg.base_variant

    options = {"scenario": scenario, "damage": kind, "elasticity": eps,
               "calibration": variant}
    run_dir, manifest = run_directory(ws, "scc", options)

    prefs, load_report = ws.load_preferences()
    calibrated, cal_map, clamp = ws.calibrated(variant)
    scen = ws.scenario(scenario)
    g = growth_path(scen)
    mdp = ws.mdp(scenario, kind, eps)
    results = engine.batch_scc(mdp, calibrated, g, workers=cfg.workers,
                               chunk_size=cfg.chunk_size)

    engine.results_to_csv(results, run_dir / "results.csv")
    country_table = aggregation.make_country_table(results, mdp, g)
    country_table.to_csv(run_dir / "per_country.csv", index=False)

    reports = {}
    for scheme in SCHEMES:
        report = aggregation.aggregate(
            results, ws.country_weights, scheme, mdp, g,
            country_table=country_table,
            welfare_population_scaling=cfg.welfare_population_scaling)
        reports[scheme] = report.to_dict()
    write_json(run_dir / "aggregates.json", reports)

    stats = aggregation.distribution_stats(results, bin_width=cfg.scc_hist_bin_width)
    stats.histogram.to_csv(run_dir / "histogram.csv", index=False)
    for by in ("gender", "age"):
        table = aggregation.slice_by(results, by=by, min_group=cfg.min_group_size)
        table.to_csv(run_dir / f"slice_{by}.csv", index=False)

    write_json(run_dir / "preferences_summary.json", {
        "load": {"n_loaded": load_report.n_loaded,
                 "n_dropped_missing": load_report.n_dropped_missing,
                 "n_malformed": load_report.n_malformed,
                 "warnings": list(load_report.warnings)},
        "calibration": {"variant": cal_map.variant,
                        "slope_rho": cal_map.slope_rho,
                        "intercept_rho": cal_map.intercept_rho,
                        "slope_eta": cal_map.slope_eta,
                        "intercept_eta": cal_map.intercept_eta,
                        "lay_percentiles": cal_map.lay_percentiles,
                        "n_countries": cal_map.n_countries},
        "clamping": {"rho_fraction": clamp.rho_clamped_fraction,
                     "eta_fraction": clamp.eta_clamped_fraction},
        "distribution": {"mean": stats.mean, "median": stats.median,
                         "mode_bin_midpoint": stats.mode_bin_midpoint,
                         "skewness": stats.skewness,
                         "percentile_of_mean": stats.percentile_of_mean},
    })
    write_json(run_dir / "manifest.json", manifest)

    demo = reports["democracy"]
    print(f"run directory: {run_dir}")
    print(f"democracy: ref {demo['ref_scc']:.1f} mean {demo['mean_scc']:.1f} "
          f"premium {demo['premium']:.1f} USD/tC "
          f"(mean percentile {demo['mean_percentile']:.0f})")
    return 0


def cmd_sensitivity(args) -> int:
    cfg = load_config(args.config, output_dir=args.output_dir, workers=args.workers)
    ws = Workspace(cfg)
    axes = {
        "scenarios": args.scenarios.split(",") if args.scenarios else None,
        "damage_kinds": args.damage_kinds.split(",") if args.damage_kinds else None,
        "elasticities": ([float(e) for e in args.elasticities.split(",")]
                         if args.elasticities else None),
        "variants": args.variants.split(",") if args.variants else None,
    }
    run_dir, manifest = run_directory(ws, "sensitivity",
                                      {k: v for k, v in axes.items() if v})
    checkpoint = run_dir / "checkpoint.jsonl" if not args.no_checkpoint else None
    cells = run_matrix(ws, scenarios=axes["scenarios"],
                       damage_kinds=axes["damage_kinds"],
                       elasticities=axes["elasticities"],
                       variants=axes["variants"],
                       checkpoint_path=checkpoint,
                       use_cache=not args.no_cache,
                       workers=cfg.workers)
    frame = matrix_frame(cells)
    frame.to_csv(run_dir / "matrix.csv", index=False)
    write_json(run_dir / "matrix.json", frame.to_dict(orient="records"))
    write_json(run_dir / "manifest.json", manifest)
    n_err = int(frame["error"].notna().sum())
    print(f"run directory: {run_dir}")
    print(f"{len(frame)} cells, {n_err} with errors")
    if n_err:
        return 4
    return 0


def cmd_appendix(args) -> int:
    cfg = load_config(args.config, output_dir=args.output_dir, workers=args.workers)
    ws = Workspace(cfg)
    g_const = args.growth_rate
    n_growth = args.population_growth
    options = {"growth_rate": g_const, "population_growth": n_growth}
    run_dir, manifest = run_directory(ws, "appendix", options)

    calibrated, _, _ = ws.calibrated(cfg.base_variant)
    weights = calibrated.weight
    rates = calibrated.rho + calibrated.eta * g_const  # fraction/yr
    fit = discounting.fit_zig(rates * 100.0, weights, bin_width=cfg.zig_bin_width)
    sensitivity_fits = discounting.binning_sensitivity(rates * 100.0, weights,
                                                       bin_width=cfg.zig_bin_width)

    scen = ws.scenario(cfg.base_scenario)
    g_scen = growth_path(scen)
    span = len(scen) - scen.index_of(cfg.pulse_year)
    t = np.arange(span)

    # Certainty-equivalent factors of the respondent mixture, constant growth.
    w = weights / weights.sum()
    ce = np.zeros(span)
    for lo in range(0, len(rates), cfg.chunk_size):
        hi = min(lo + cfg.chunk_size, len(rates))
        ce += ((1.0 + rates[lo:hi, None]) ** (-t[None, :]) * w[lo:hi, None]).sum(axis=0)
    ce_rate = np.empty(span)
    ce_rate[0] = float(np.dot(w, rates))
    ce_rate[1:] = ce[1:] ** (-1.0 / t[1:]) - 1.0

    rho_bar, eta_bar = engine.weighted_mean_preferences(calibrated)
    k = scen.index_of(cfg.pulse_year)
    ramsey_fwd = rho_bar + eta_bar * g_scen[k:]

    zig_pct = fit.rate(t)
    gamma_pct = discounting.gamma_ce_rate(fit.alpha, fit.beta, t)
    curves = pd.DataFrame({
        "t": t,
        "ce_factor": ce,
        "ce_annualized_rate_pct": ce_rate * 100.0,
        "zig_rate_pct": zig_pct,
        "gamma_rate_pct": gamma_pct,
        "ramsey_mean_forward_rate_pct": ramsey_fwd * 100.0,
    })
    curves.to_csv(run_dir / "discount_curves.csv", index=False)

    # Constant versus declining discounting of the base damage path.
    mdp = ws.mdp(cfg.base_scenario, cfg.base_damage_kind, cfg.base_elasticity)
    delta = mdp.delta_damage[k:]
    r0 = float(fit.rate(0)) / 100.0
    const_sched = discounting.constant_rate_schedule(r0 + n_growth, span - 1)
    decl_sched = discounting.schedule_from_rates(zig_pct / 100.0 + n_growth)
    scc_constant = const_sched.npv(delta) / mdp.pulse_size
    scc_declining = decl_sched.npv(delta) / mdp.pulse_size

    # Two-member illustration: 1% and 7% with equal weights.
    demo_members = [discounting.constant_rate_schedule(0.01, 1000),
                    discounting.constant_rate_schedule(0.07, 1000)]
    curve = discounting.certainty_equivalent_rate(demo_members, [0.5, 0.5])
    pd.DataFrame({"t": np.arange(1001), "factor": curve.factors,
                  "annualized_rate_pct": curve.rates * 100.0}).to_csv(
        run_dir / "two_rate_curve.csv", index=False)

    payload = {
        "growth_rate": g_const,
        "population_growth": n_growth,
        "fit": {"alpha": fit.alpha, "beta": fit.beta, "delta": fit.delta,
                "mu_pct": fit.mu, "sigma2_pct2": fit.sigma2, "mise": fit.mise,
                "bin_width_pct": fit.bin_width, "n_obs": fit.n_obs,
                "units": fit.units},
        "binning_sensitivity": {str(wd): {"alpha": f.alpha, "beta": f.beta}
                                for wd, f in sensitivity_fits.items()},
        "rate_at_0_pct": float(fit.rate(0)),
        "rate_at_100_pct": float(fit.rate(100)),
        "scc_constant_rate": scc_constant,
        "scc_declining_rate": scc_declining,
    }
    write_json(run_dir / "zig_fit.json", payload)
    write_json(run_dir / "manifest.json", manifest)
    print(f"run directory: {run_dir}")
    print(f"zero-inflated gamma: alpha {fit.alpha:.2f} beta {fit.beta:.2f} "
          f"delta {fit.delta:.3f}; rate {payload['rate_at_0_pct']:.2f}%/yr at 0, "
          f"{payload['rate_at_100_pct']:.3f}%/yr at 100")
    print(f"SCC constant {scc_constant:.1f} vs declining {scc_declining:.1f} USD/tC")
    return 0


def cmd_validate(args) -> int:
    cfg = load_config(args.config, output_dir=args.output_dir, workers=args.workers)
    ws = Workspace(cfg)
    policy_path = Path(args.policy_csv)
    if not policy_path.exists():
        raise DataError(f"policy file not found: {policy_path}")
    policy = pd.read_csv(policy_path)

    if args.country_scc:
        scc_path = Path(args.country_scc)
        if not scc_path.exists():
            raise DataError(f"country SCC file not found: {scc_path}")
        country_table = pd.read_csv(scc_path)
    else:
        calibrated, _, _ = ws.calibrated(cfg.base_variant)
        scen = ws.scenario(cfg.base_scenario)
        g = growth_path(scen)
        mdp = ws.mdp(cfg.base_scenario, cfg.base_damage_kind, cfg.base_elasticity)
        results = engine.batch_scc(mdp, calibrated, g, workers=cfg.workers,
                                   chunk_size=cfg.chunk_size)
        country_table = aggregation.make_country_table(results, mdp, g)

    options = {"policy": str(policy_path), "country_scc": args.country_scc or "computed"}
    run_dir, manifest = run_directory(ws, "validate", options)
    table = aggregation.correlate_policy(country_table, policy)
    table.to_csv(run_dir / "policy_correlations.csv", index=False)
    write_json(run_dir / "policy_correlations.json", table.to_dict(orient="records"))
    write_json(run_dir / "manifest.json", manifest)
    print(f"run directory: {run_dir}")
    for row in table.itertuples(index=False):
        print(f"{row.indicator}: pearson {row.pearson_r:+.2f} "
              f"spearman {row.spearman_r:+.2f} (n={row.n})")
    return 0


def cmd_make_demo_data(args) -> int:
    cfg = load_config(args.config, output_dir=args.output_dir, workers=args.workers)
    ws = Workspace(cfg)
    out = Path(args.output_dir) if args.output_dir else cfg.output_dir / "demo_inputs"
    out.mkdir(parents=True, exist_ok=True)
    prefs_path = demo_data.write_demo_extract(out / "preferences.csv",
                                              ws.country_weights, seed=cfg.demo_seed)
    policy_path = demo_data.write_demo_policy(out / "policy.csv",
                                              ws.country_weights, seed=cfg.demo_seed)
    print(f"wrote {prefs_path}")
    print(f"wrote {policy_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sccprem",
        description="Social cost of carbon under heterogeneous preferences")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", default=None, help="YAML config file")
        p.add_argument("-o", "--output-dir", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads for batch valuation")

    p_scc = sub.add_parser("scc", help="base run: respondent SCCs and aggregates")
    common(p_scc)
    p_scc.add_argument("--scenario", default=None)
    p_scc.add_argument("--damage", default=None, help="damage kind label")
    p_scc.add_argument("--elasticity", type=float, default=None)
    p_scc.add_argument("--calibration", default=None,
                       choices=["base", "population_weighted", "geo_restricted"])
    p_scc.set_defaults(func=cmd_scc)

    p_sens = sub.add_parser("sensitivity", help="sweep axes into a matrix CSV")
    common(p_sens)
    p_sens.add_argument("--scenarios", default=None, help="comma-separated labels")
    p_sens.add_argument("--damage-kinds", default=None)
    p_sens.add_argument("--elasticities", default=None)
    p_sens.add_argument("--variants", default=None)
    p_sens.add_argument("--no-cache", action="store_true",
                        help="recompute damage paths per cell")
    p_sens.add_argument("--no-checkpoint", action="store_true")
    p_sens.set_defaults(func=cmd_sensitivity)

    p_app = sub.add_parser("appendix", help="declining discount rate analytics")
    common(p_app)
    p_app.add_argument("--growth-rate", type=float, default=0.017,
                       help="constant per-capita growth for the rate fit (fraction/yr)")
    p_app.add_argument("--population-growth", type=float, default=0.0085,
                       help="population growth added to appendix discount rates")
    p_app.set_defaults(func=cmd_appendix)

    p_val = sub.add_parser("validate", help="correlate country SCCs with policy")
    common(p_val)
    p_val.add_argument("policy_csv", help="CSV with country policy indicators")
    p_val.add_argument("--country-scc", default=None,
                       help="per-country CSV from a previous scc run")
    p_val.set_defaults(func=cmd_validate)

    p_demo = sub.add_parser("make-demo-data", help="write the demo survey extract")
    common(p_demo)
    p_demo.set_defaults(func=cmd_make_demo_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DataError.exit_code
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return NumericError.exit_code
    except SccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return SccError.exit_code


if __name__ == "__main__":
    sys.exit(main())
