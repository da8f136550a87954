# -*- coding: utf-8 -*-
"""Run configuration

A run is configured by a YAML file with a `run` section, a `model` section
and one section per command. Every key has a default in DEFAULTS; command
line flags and `--set section.key=value` overrides are applied on top.

    run:
      seed: 42
      output: results
    model:
      family: MD_SE_NBD
      sectors: [building, leisure]
      baseline_mean: [0.34, 0.29]
      dispersion_shape: [0.41, 0.35]
      reproduction: [[0.21, 0.25], [0.0, 0.20]]
      decay: [0.5, 0.5]
    fit:
      multistart: 8

Copyright 2018 Aaron Snoswell
"""

import copy
import logging
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, SENBDError
from .estimation import FitConfig, DEFAULT_BOUNDS
from .model import Family, ModelSpec, COMPARISON_FAMILIES, sector_network_spec, \
    SECTORS_13, default_sector_names


logger = logging.getLogger(__name__)


DEFAULTS = {
    "run": {
        # Random seed; required by every stochastic command
        "seed": None,
        # Worker threads for multistart fitting
        "threads": 1,
        # Input CSV of counts, for the commands that read data
        "input": None,
        # Output directory
        "output": "results",
        # Simulate specs with rho(S) >= 1
        "allow_nonstationary": False
    },
    "model": {
        # MD_SE_NBD, MD_HAWKES, SE_NBD, HAWKES, NBD or HYBRID
        "family": "SE_NBD",
        # 'sectors13' for the 13-sector fitted network, else None
        "preset": None,
        # Sector names, defaults to line1..lineD
        "sectors": None,
        "baseline_mean": [1.0],
        # 'inf' marks a Poisson (Hawkes) line
        "dispersion_shape": [1.0],
        # Either the L0 matrix ('inf' for no edge) ...
        "interaction_scale": None,
        # ... or the reproduction matrix S, from which L0 is derived
        "reproduction": [[0.5]],
        "decay": [0.5],
        # Explicit Poisson-line flags, HYBRID only
        "poisson_lines": None
    },
    "simulate": {
        "horizon": 1000
    },
    "synth": {
        "horizon": 1000,
        "filename": "series.csv"
    },
    "fit": {
        # Family to fit, defaults to model.family
        "family": None,
        "multistart": 16,
        "tolerance": 1e-8,
        "edge_selection": "greedy_aic",
        "max_iterations": None,
        # Line names or indices fitted as Poisson lines (HYBRID)
        "hawkes_lines": [],
        # Overrides of the uniform prior box, e.g. {decay: [0.0, 0.9]}
        "bounds": {}
    },
    "aic-table": {
        "families": [f.value for f in COMPARISON_FAMILIES],
        "edge_selection": "greedy_aic"
    },
    "impact": {
        # Horizon of the impact trajectories
        "horizon": 50,
        # Paired Monte-Carlo paths per source line, 0 to skip
        "monte_carlo_paths": 0,
        "monte_carlo_horizon": 200
    },
    "network": {
        # Only S entries above this become edges
        "threshold": 0.0
    },
    "corr": {
        "line": 0,
        "max_lag": 20,
        # Grid step and end of the integral-equation solve
        "h": 0.01,
        "t_max": None,
        # Length of the simulated series used when no input is given
        "horizon": 100000
    },
    "branching": {
        "line": 0,
        "epsilons": [0.1, 0.01, 0.001],
        # Simulated trees, 0 to skip
        "n_trees": 0,
        "survival_cap": 1000
    }
}


def load_yaml(path):
    """Load a YAML file as a dictionary"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError("Cannot read config {}: {}".format(path, e))
    except yaml.YAMLError as e:
        raise ConfigError("Invalid YAML in {}: {}".format(path, e))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("Config {} must be a mapping of sections".format(
            path))
    return data


def _merge(base, update, where):
    for section, values in update.items():
        if section not in base:
            raise ConfigError("Unknown config section: {}".format(section))
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError("Config section {} must be a mapping".format(
                section))
        for key, value in values.items():
            if key not in base[section]:
                raise ConfigError("Unknown config key {}.{} in {}".format(
                    section, key, where))
            base[section][key] = value
    return base


def parse_override(text):
    """Split 'section.key=value' into its parts, value parsed as YAML"""
    if "=" not in text:
        raise ConfigError("Override {!r} is not of the form "
                          "section.key=value".format(text))
    name, value = text.split("=", 1)
    if "." not in name:
        raise ConfigError("Override {!r} needs a section.key name".format(
            text))
    section, key = name.strip().split(".", 1)
    try:
        parsed = yaml.safe_load(value) if value.strip() else None
    except yaml.YAMLError as e:
        raise ConfigError("Cannot parse override {!r}: {}".format(text, e))
    return section, key, parsed


class RunConfig:
    """Resolved configuration of one run

    Args:
        data (dict): Sections to lay over DEFAULTS

        overrides (list): 'section.key=value' strings applied last
    """

    def __init__(self, data=None, *, overrides=()):
        self.data = copy.deepcopy(DEFAULTS)
        _merge(self.data, data or {}, "config")
        for text in overrides:
            section, key, value = parse_override(text)
            _merge(self.data, {section: {key: value}}, "override")

    @classmethod
    def load(cls, path=None, *, overrides=()):
        """Read a config file (or only the defaults) and apply overrides"""
        data = load_yaml(path) if path is not None else {}
        return cls(data, overrides=overrides)

    def section(self, name):
        if name not in self.data:
            raise ConfigError("Unknown config section: {}".format(name))
        return self.data[name]

    def set(self, section, key, value):
        """Apply a command-line flag, ignored when value is None"""
        if value is not None:
            _merge(self.data, {section: {key: value}}, "flag")

    def to_dict(self):
        return copy.deepcopy(self.data)

    @property
    def seed(self):
        return self.data["run"]["seed"]

    def require_seed(self, command):
        seed = self.seed
        if seed is None:
            raise ConfigError("Command {} is stochastic and needs a seed "
                              "(--seed or run.seed)".format(command))
        try:
            return int(seed)
        except (TypeError, ValueError):
            raise ConfigError("run.seed must be an integer, got {!r}".format(
                seed))

    def input_path(self, required=True):
        """The validated input path, or None when absent and optional"""
        path = self.data["run"]["input"]
        if path is None:
            if required:
                raise ConfigError("No input file given (--input or "
                                  "run.input)")
            return None
        path = Path(path)
        if not path.is_file():
            raise ConfigError("Input file {} does not exist".format(path))
        return path

    @property
    def output_dir(self):
        return Path(self.data["run"]["output"])

    def sector_names(self):
        section = self.data["model"]
        if section["preset"] == "sectors13" and section["sectors"] is None:
            return SECTORS_13
        if section["sectors"] is not None:
            return tuple(str(s) for s in section["sectors"])
        return default_sector_names(len(section["baseline_mean"]))

    def model_spec(self):
        """Build the ModelSpec described by the model section"""
        section = self.data["model"]
        try:
            if section["preset"] is not None:
                if section["preset"] != "sectors13":
                    raise ConfigError("Unknown model preset: {}".format(
                        section["preset"]))
                decay = section["decay"]
                decay = float(decay[0] if isinstance(decay, list) else decay)
                return sector_network_spec(decay=decay)

            if section["interaction_scale"] is not None:
                spec = ModelSpec(
                    family=section["family"],
                    baseline_mean=section["baseline_mean"],
                    dispersion_shape=section["dispersion_shape"],
                    interaction_scale=_float_matrix(
                        section["interaction_scale"]),
                    decay=section["decay"],
                    poisson_lines=section["poisson_lines"]
                )
            else:
                spec = ModelSpec.from_reproduction(
                    section["family"],
                    section["baseline_mean"],
                    section["dispersion_shape"],
                    _float_matrix(section["reproduction"]),
                    section["decay"],
                    poisson_lines=section["poisson_lines"]
                )
        except ConfigError:
            raise
        except SENBDError as e:
            raise ConfigError("Invalid model section: {}".format(e))
        except (TypeError, ValueError) as e:
            raise ConfigError("Invalid model section: {}".format(e))

        if section["sectors"] is not None \
                and len(section["sectors"]) != spec.dimension:
            raise ConfigError("model.sectors has {} names for {} "
                              "lines".format(len(section["sectors"]),
                                             spec.dimension))
        return spec

    def fit_config(self, family=None, *, edge_selection=None):
        """Build a FitConfig from the fit section"""
        section = self.data["fit"]
        family = family or section["family"] or self.data["model"]["family"]
        bounds = {}
        for name, pair in (section["bounds"] or {}).items():
            if name not in DEFAULT_BOUNDS:
                raise ConfigError("Unknown bound group fit.bounds.{}".format(
                    name))
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError("fit.bounds.{} must be [lower, upper]"
                                  .format(name))
            bounds[name] = (float(pair[0]), None if pair[1] is None
                            else float(pair[1]))
        family = Family.parse(family)
        try:
            return FitConfig(
                family=family,
                bounds=bounds,
                multistart=int(section["multistart"]),
                tolerance=float(section["tolerance"]),
                edge_selection=edge_selection or section["edge_selection"],
                max_iterations=section["max_iterations"],
                seed=self.require_seed("fit"),
                hawkes_lines=frozenset(
                    section["hawkes_lines"] or ()
                ) if family is Family.HYBRID else frozenset(),
                threads=int(self.data["run"]["threads"])
            )
        except ConfigError:
            raise
        except SENBDError as e:
            raise ConfigError("Invalid fit section: {}".format(e))


def _float_matrix(rows):
    """Matrix from nested lists that may contain 'inf' strings"""
    try:
        return np.array([[float(v) for v in row] for row in rows],
                        dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("Expected a matrix of numbers, got {!r}".format(
            rows))
