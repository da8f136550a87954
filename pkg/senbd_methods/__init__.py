# -*- coding: utf-8 -*-
"""__init__.py for the senbd_methods module

Simulation, estimation and analysis of discrete self-exciting negative
binomial (SE-NBD) and Hawkes count processes, single- and multidimensional.

Copyright 2018 Aaron Snoswell
"""

__version__ = "0.1.0"

import senbd_methods.utils

from .errors import (
    SENBDError,
    DomainError,
    StationarityError,
    ConvergenceError,
    SchemaError,
    ConfigError,
    UsageError,
    DataIOError
)
from .model import (
    Family,
    ModelSpec,
    ProcessState,
    EventSeries,
    initial_state,
    sector_network_spec
)
from .process import (
    nbd_pmf,
    poisson_pmf,
    step,
    observe,
    simulate,
    conditional_moments
)
from .estimation import (
    EdgeSelection,
    FitConfig,
    FitResult,
    log_likelihood,
    line_log_likelihood,
    fit,
    select_edges_greedy,
    aic_table
)
from .network import (
    InteractionMatrix,
    ImpactResult,
    build_s_matrix,
    spectral_radius,
    mean_field_equilibrium,
    impact_infinite,
    impact_trajectory,
    impact_analysis,
    rank_sectors,
    export_network,
    to_digraph,
    monte_carlo_impact
)
from .branching import (
    OffspringLaw,
    extinction_probability,
    survival_curve,
    branching_total_progeny_mean,
    simulate_branching
)
from .correlation import (
    CorrelationSpec,
    autocovariance_closed_form,
    autocovariance_exact,
    covariance_integral_solve,
    empirical_autocovariance
)
from .io import ingest_csv, generate_synthetic, write_series_csv


__all__ = [
    "utils",

    "model",
    "process",
    "estimation",
    "network",
    "branching",
    "correlation",
    "io",
    "config",
    "cli",
    "errors"
]
