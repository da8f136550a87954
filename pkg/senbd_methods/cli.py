# -*- coding: utf-8 -*-
"""Command line front end

    python -m senbd_methods <command> [--config run.yaml] [options]

Commands: simulate, fit, aic-table, impact, network, corr, branching, synth.
Each writes result.json (the resolved configuration, the package version and
the results) plus CSV tables into the output directory. Failures print a
single line `error:<category>: <message>` to stderr and exit nonzero.

Copyright 2018 Aaron Snoswell
"""

import argparse
import logging
import sys

import numpy as np

from .errors import SENBDError, UsageError
from .config import RunConfig
from .estimation import fit, aic_table
from .network import (
    build_s_matrix,
    spectral_radius,
    classify,
    mean_field_equilibrium,
    impact_analysis,
    rank_sectors,
    export_network,
    monte_carlo_impact
)
from .branching import (
    offspring_law_from_spec,
    extinction_probability,
    survival_curve,
    critical_survival_slope,
    branching_total_progeny_mean,
    simulate_branching
)
from .correlation import (
    correlation_spec_from_model,
    autocovariance_closed_form,
    autocovariance_exact,
    covariance_integral_solve,
    empirical_autocovariance
)
from .process import simulate
from .utils.dacadc import discrete_decay_rate
from .io import (
    ingest_csv,
    write_series_csv,
    write_json,
    write_csv_table,
    generate_synthetic
)


logger = logging.getLogger(__name__)

COMMANDS = (
    "simulate",
    "fit",
    "aic-table",
    "impact",
    "network",
    "corr",
    "branching",
    "synth"
)

# Exit code for unexpected exceptions
INTERNAL_EXIT_CODE = 70


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _ArgumentParser(
        prog="senbd_methods",
        description="Simulate, fit and analyse self-exciting NBD and Hawkes "
                    "count processes"
    )
    parser.add_argument("command", choices=COMMANDS, metavar="command",
                        help="One of: " + ", ".join(COMMANDS))
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--threads", type=int, help="Worker threads")
    parser.add_argument("--input", help="Input CSV of counts")
    parser.add_argument("--output", help="Output directory")
    parser.add_argument("--allow-nonstationary", action="store_true",
                        default=None,
                        help="Simulate specs with rho(S) >= 1")
    parser.add_argument("--set", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", dest="overrides",
                        help="Override one config value")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress information, -vv for debug")
    return parser


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s"
    )


def _document(command, config, result):
    from . import __version__
    return {
        "command": command,
        "version": __version__,
        "config": config.to_dict(),
        "result": result
    }


def _series(config, *, seed_command):
    """The input series, or one simulated from the model if none is given"""
    path = config.input_path(required=False)
    if path is not None:
        return ingest_csv(path)
    spec = config.model_spec()
    horizon = config.section(seed_command).get(
        "horizon", config.section("simulate")["horizon"])
    return simulate(
        spec,
        horizon,
        config.require_seed(seed_command),
        allow_nonstationary=bool(config.section("run")[
            "allow_nonstationary"]),
        sector_names=config.sector_names()
    )


def _spec_summary(spec, names):
    s = build_s_matrix(spec)
    rho = spectral_radius(s)
    summary = {
        "spec": spec,
        "sector_names": list(names),
        "reproduction": s.s,
        "spectral_radius": rho,
        "classification": classify(s)
    }
    if rho < 1:
        summary["mean_field"] = mean_field_equilibrium(spec)
    return summary


def cmd_simulate(config, verbose):
    spec = config.model_spec()
    names = config.sector_names()
    series = simulate(
        spec,
        config.section("simulate")["horizon"],
        config.require_seed("simulate"),
        allow_nonstationary=bool(config.section("run")[
            "allow_nonstationary"]),
        sector_names=names,
        verbose=verbose
    )
    out = config.output_dir
    write_series_csv(series, out / "series.csv")
    result = _spec_summary(spec, names)
    result["horizon"] = series.length
    result["empirical_mean"] = series.counts.mean(axis=0) \
        if series.length else [float("nan")] * spec.dimension
    return result


def cmd_synth(config, verbose):
    spec = config.model_spec()
    section = config.section("synth")
    path = config.output_dir / section["filename"]
    series = generate_synthetic(
        spec,
        section["horizon"],
        config.require_seed("synth"),
        path,
        sector_names=config.sector_names(),
        allow_nonstationary=bool(config.section("run")[
            "allow_nonstationary"])
    )
    return {"path": str(path), "horizon": series.length,
            "sector_names": list(series.sector_names)}


def _fit_summary(result, names):
    return {
        "family": result.spec.family,
        "log_likelihood": result.log_likelihood,
        "aic": result.aic,
        "n_params": result.n_params,
        "converged": result.converged,
        "starts_summary": result.starts_summary,
        "active_edges": [[names[j], names[i]]
                         for i, j in sorted(result.active_edges)],
        "spec": result.spec,
        "reproduction": result.reproduction
    }


def cmd_fit(config, verbose):
    series = ingest_csv(config.input_path())
    result = fit(series, config.fit_config(), verbose=verbose)
    names = series.sector_names
    write_csv_table(
        config.output_dir / "edges.csv",
        ["source", "target", "weight"],
        export_network(result.reproduction, names)
    )
    return _fit_summary(result, names)


def cmd_aic_table(config, verbose):
    series = ingest_csv(config.input_path())
    section = config.section("aic-table")
    configs = [
        config.fit_config(family, edge_selection=section["edge_selection"])
        for family in section["families"]
    ]
    rows = aic_table(series, configs, verbose=verbose)
    write_csv_table(
        config.output_dir / "aic_table.csv",
        ["family", "aic", "log_likelihood", "n_params", "status"],
        [
            [row.family.value, row.aic, row.log_likelihood, row.n_params,
             row.error or "ok"]
            for row in rows
        ]
    )
    return {"rows": [
        {
            "family": row.family,
            "aic": row.aic,
            "log_likelihood": row.log_likelihood,
            "n_params": row.n_params,
            "error": row.error
        }
        for row in rows
    ]}


def cmd_impact(config, verbose):
    spec = config.model_spec()
    names = config.sector_names()
    section = config.section("impact")
    impact = impact_analysis(spec, horizon=section["horizon"],
                             sector_names=names)
    out = config.output_dir
    write_csv_table(
        out / "impact.csv",
        ["source"] + list(names) + ["total"],
        [
            [names[i]] + list(impact.per_source[i]) + [impact.totals[i]]
            for i in range(spec.dimension)
        ]
    )
    write_csv_table(
        out / "impact_trajectories.csv",
        ["source", "horizon"] + list(names) + ["total"],
        [
            [names[i], t + 1] + list(v) + [float(np.sum(v))]
            for i in range(spec.dimension)
            for t, v in enumerate(impact.trajectories[i])
        ]
    )
    result = {
        "per_source": impact.per_source,
        "totals": impact.totals,
        "average_total": impact.average_total,
        "ranking": [[names[i], total] for i, total in rank_sectors(impact)]
    }
    n_paths = int(section["monte_carlo_paths"])
    if n_paths > 0:
        seed = config.require_seed("impact")
        estimates = [
            monte_carlo_impact(spec, i, n_paths=n_paths,
                               horizon=section["monte_carlo_horizon"],
                               seed=seed, verbose=verbose)
            for i in range(spec.dimension)
        ]
        result["monte_carlo"] = {
            "mean": [m for m, _ in estimates],
            "stderr": [e for _, e in estimates]
        }
    return result


def cmd_network(config, verbose):
    spec = config.model_spec()
    names = config.sector_names()
    edges = export_network(build_s_matrix(spec), names,
                           threshold=float(config.section("network")[
                               "threshold"]))
    write_csv_table(config.output_dir / "edges.csv",
                    ["source", "target", "weight"], edges)
    result = _spec_summary(spec, names)
    result["edges"] = [list(e) for e in edges]
    return result


def cmd_corr(config, verbose):
    spec = config.model_spec()
    section = config.section("corr")
    line = int(section["line"])
    max_lag = int(section["max_lag"])
    # Validates the line index before the series is indexed by it
    cspec = correlation_spec_from_model(spec, line)
    series = _series(config, seed_command="corr")
    empirical = empirical_autocovariance(series, max_lag)[:, line, line]

    lags = np.arange(max_lag + 1, dtype=float)
    closed = autocovariance_closed_form(cspec, lags)
    exact = autocovariance_exact(cspec, lags)
    grid = covariance_integral_solve(cspec, h=float(section["h"]),
                                     t_max=section["t_max"])
    solved = np.interp(lags, grid.tau, grid.values[:, 0, 0])

    write_csv_table(
        config.output_dir / "corr.csv",
        ["lag", "empirical", "closed_form", "exact", "integral_equation"],
        [[int(lag), e, c, x, s]
         for lag, e, c, x, s in zip(lags, empirical, closed, exact, solved)]
    )
    return {
        "line": line,
        "correlation_spec": {"a": cspec.a, "b": cspec.b,
                             "omega": cspec.omega, "theta0": cspec.theta0,
                             "mean": cspec.mean},
        "discrete_decay_rate": discrete_decay_rate(
            spec.effective_decay[line], spec.excitation[line, line]),
        "integral_iterations": grid.iterations,
        "integral_residual": grid.residual
    }


def cmd_branching(config, verbose):
    spec = config.model_spec()
    section = config.section("branching")
    law = offspring_law_from_spec(spec, int(section["line"]))
    epsilons = [float(e) for e in section["epsilons"]]
    survival = survival_curve(law, epsilons)
    write_csv_table(
        config.output_dir / "survival.csv",
        ["epsilon", "survival"],
        list(zip(epsilons, survival))
    )
    result = {
        "offspring": {"kind": law.kind, "mean": law.mean,
                      "shape": law.shape, "scale": law.scale},
        "extinction_probability": extinction_probability(law),
        "critical_survival_slope": critical_survival_slope(law),
        "survival": survival
    }
    if law.mean < 1:
        result["total_progeny_mean"] = branching_total_progeny_mean(law)
    n_trees = int(section["n_trees"])
    if n_trees > 0:
        descendants, extinct = simulate_branching(
            law,
            n_trees,
            config.require_seed("branching"),
            survival_cap=int(section["survival_cap"]),
            verbose=verbose
        )
        result["simulated"] = {
            "n_trees": n_trees,
            "extinct_fraction": float(np.mean(extinct)),
            "mean_descendants": float(np.mean(descendants))
        }
    return result


HANDLERS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "aic-table": cmd_aic_table,
    "impact": cmd_impact,
    "network": cmd_network,
    "corr": cmd_corr,
    "branching": cmd_branching,
    "synth": cmd_synth
}


def _execute(argv):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    config = RunConfig.load(args.config, overrides=args.overrides)
    config.set("run", "seed", args.seed)
    config.set("run", "threads", args.threads)
    config.set("run", "input", args.input)
    config.set("run", "output", args.output)
    config.set("run", "allow_nonstationary", args.allow_nonstationary)

    result = HANDLERS[args.command](config, args.verbose > 0)
    path = write_json(_document(args.command, config, result),
                      config.output_dir / "result.json")
    logger.info("Wrote %s", path)


def run_command(argv=None):
    """Run one command

    Args:
        argv (list): Arguments without the program name, defaults to
            sys.argv[1:]

    Returns:
        (int): Exit code, 0 on success
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        _execute(argv)
    except SENBDError as e:
        print("error:{}: {}".format(e.category, e), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print("error:internal: {}".format(e), file=sys.stderr)
        return INTERNAL_EXIT_CODE
    return 0


def main():
    sys.exit(run_command())
