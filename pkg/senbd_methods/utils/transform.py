"""
Utilities for transforming parameter vectors into optimizer coordinates

(c) Aaron Snoswell 2018
"""


import numpy as np


def make_box_transform(lower, upper, log_scale):
    """Build a map between model parameters and search coordinates

    Strictly positive parameters spanning orders of magnitude are searched
    on a log scale, all others as they are. Search coordinates are clipped
    back into the box on the way out, so every parameter the optimizer hands
    back respects its bounds.

    Args:
        lower (numpy array): Lower bound per parameter
        upper (numpy array): Upper bound per parameter
        log_scale (numpy array): Boolean flag per parameter, True to search
            log(parameter). Requires lower > 0 for flagged entries.

    Returns:
        (function): Lambda converting parameters to search coordinates
        (function): Lambda converting search coordinates to parameters
        (list): Bounds in search coordinates, as (low, high) pairs
        (function): Lambda drawing a uniform random point in the search box
            from a numpy Generator
    """

    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    log_scale = np.asarray(log_scale, dtype=bool)

    assert lower.shape == upper.shape == log_scale.shape, \
        "Bounds and flags have mismatched shapes"
    assert np.all(lower[log_scale] > 0), \
        "Log-scaled parameters need a positive lower bound"

    search_lower = np.where(log_scale, np.log(np.where(log_scale, lower, 1.0)),
                            lower)
    search_upper = np.where(log_scale, np.log(np.where(log_scale, upper, 1.0)),
                            upper)

    # Parameters to search coordinates
    to_search = lambda p: np.where(
        log_scale,
        np.log(np.clip(p, np.where(log_scale, lower, 1.0), upper)),
        np.clip(p, lower, upper)
    )

    # Search coordinates to parameters
    from_search = lambda x: np.clip(
        np.where(log_scale, np.exp(np.where(log_scale, x, 0.0)), x),
        lower,
        upper
    )

    # Uniform draw in the search box
    sample = lambda rng: rng.uniform(search_lower, search_upper)

    bounds = list(zip(search_lower.tolist(), search_upper.tolist()))

    return to_search, from_search, bounds, sample
