# -*- coding: utf-8 -*-
"""Default contagion example on the fitted 13-sector network

Simulates quarterly default counts from the fitted MD-SE-NBD sector network,
refits the model to the simulated data and ranks the sectors by the total
impact of one default.

Copyright 2018 Aaron Snoswell
"""

# Get the senbd_methods folder on our PATH
import sys
from os import path
sys.path.append(path.dirname(path.dirname(path.dirname(path.abspath(
    __file__)))))

import logging

import numpy as np

from senbd_methods.model import sector_network_spec, SECTORS_13
from senbd_methods.process import simulate
from senbd_methods.network import (
    build_s_matrix,
    spectral_radius,
    mean_field_equilibrium,
    impact_analysis,
    rank_sectors
)
from senbd_methods.estimation import FitConfig, EdgeSelection, fit
from senbd_methods.utils.rollout import rollout


def main():
    """Simulate, refit and rank the sectors of the fitted default network
    """

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s"
    )

    spec = sector_network_spec()
    rho = spectral_radius(build_s_matrix(spec))
    print("Spectral radius of S: {:.4f}".format(rho))
    if rho >= 1:
        print("The fitted network is not steady; nothing to simulate")
        return

    print("Mean-field quarterly defaults per sector:")
    for name, v in zip(SECTORS_13, mean_field_equilibrium(spec)):
        print("  {:<24s} {:.3f}".format(name, v))

    # A short sample path from the start state
    trajectory = rollout(spec, 8, np.random.default_rng(0))
    print("First 8 quarters: {}".format(
        [int(np.sum(counts)) for _, counts in trajectory[:-1]]
    ))

    # 160 quarters, about the span of the historical default record
    series = simulate(spec, 160, seed=1, sector_names=SECTORS_13)

    result = fit(
        series,
        FitConfig(
            family="MD_SE_NBD",
            multistart=4,
            edge_selection=EdgeSelection.DIAGONAL_ONLY,
            seed=1
        ),
        verbose=True
    )
    print("Diagonal-only refit: log-likelihood {:.2f}, AIC {:.2f}".format(
        result.log_likelihood, result.aic))

    impact = impact_analysis(spec, sector_names=SECTORS_13)
    print("Sectors by total impact of one default (upstream first):")
    for i, total in rank_sectors(impact):
        print("  {:<24s} {:.3f}".format(SECTORS_13[i], total))


if __name__ == "__main__":
    main()
