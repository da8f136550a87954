# -*- coding: utf-8 -*-
"""Roll out a model to generate state and count trajectories

Copyright 2018 Aaron Snoswell
"""

import math

import numpy as np
from tqdm import tqdm

from ..model import initial_state
from ..process import step, _shape_excitation


def rollout(spec, horizon, rng, *, start_state=None, stop=None):
    """Roll out a model to generate a (state, counts) trajectory

    Args:
        spec (ModelSpec): Model to roll out
        horizon (int): Maximum number of periods
        rng (any): A numpy Generator, an int seed, or one Generator per line

        start_state (ProcessState): Starting state, defaults to (M0, K0)
        stop (function): Optional predicate stop(state) -> bool checked after
            every period

    Returns:
        (list): A single trajectory, as list of (state, counts) pairs where
            state is the state the counts were drawn from. The final state
            is appended with counts None.
    """

    state = start_state if start_state is not None else initial_state(spec)
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    horizon = math.inf if horizon is None else horizon

    trajectory = []
    while len(trajectory) < horizon:

        counts, next_state = step(state, spec, rng)
        trajectory.append((state, counts))
        state = next_state

        if stop is not None and stop(state):
            break

    trajectory.append((state, None))
    return trajectory


def paired_rollout(
        spec,
        source,
        n_paths,
        horizon,
        rng,
        *,
        batch_size=20000,
        verbose=False
):
    """Simulate shocked and unshocked paths on common random numbers

    Both paths of a pair start from (M0, K0); the shocked path additionally
    sees one event on the source line at time 0. Conditional on the history
    the shocked state dominates the unshocked one with the same M / K ratio,
    so a shocked count is the unshocked count plus an independent excess:
    Poisson(M' - M) on a Poisson line, and on an NBD line the Poisson count
    of an extra Gamma(K' - K, M0/K0) intensity. Only the excess is drawn
    here, since the unshocked counts cancel from the difference.

    Args:
        spec (ModelSpec): Model
        source (int): Index of the shocked line
        n_paths (int): Number of path pairs
        horizon (int): Number of periods after the shock
        rng (numpy.random.Generator): Random source

        batch_size (int): Path pairs simulated at once
        verbose (bool): Show a progress bar

    Returns:
        (numpy array): n_paths x D array of added events per line
    """

    d = spec.dimension
    r = spec.effective_decay
    excitation = spec.excitation
    shape_excitation = _shape_excitation(spec)
    scale = spec.dispersion_scale
    nbd = ~spec.poisson_lines & (scale > 0)

    added = np.zeros((int(n_paths), d))
    batches = range(0, int(n_paths), int(batch_size))
    for start in tqdm(batches, disable=not verbose, desc="paired rollout"):
        n = min(int(batch_size), int(n_paths) - start)

        # Excess state of the shocked path over the unshocked one
        dm = np.tile(excitation[:, source], (n, 1))
        dk = np.tile(shape_excitation[:, source], (n, 1))
        total = np.zeros((n, d))

        for _ in range(int(horizon)):
            extra = np.where(nbd, 0.0, dm)
            if np.any(nbd):
                extra[:, nbd] = rng.gamma(
                    shape=dk[:, nbd],
                    scale=np.broadcast_to(scale[nbd], dk[:, nbd].shape)
                )
            excess = rng.poisson(np.maximum(extra, 0.0))
            total += excess

            dm = r * dm + excess @ excitation.T
            dk = r * dk + excess @ shape_excitation.T

        added[start:start + n] = total

    return added
