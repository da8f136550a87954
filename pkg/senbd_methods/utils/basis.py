# -*- coding: utf-8 -*-
"""Memory kernel implementations

Copyright 2018 Aaron Snoswell
"""

import numpy as np

from functools import partial


def geometric(r):
    """Discrete geometric kernel d(s) = r^(s - 1), s = 1, 2, ...

    Args:
        r (float): Decay rate in [0, 1)

    Returns:
        (function): A function d(s) evaluated elementwise on integer lags.
            d(s) is 0 for s < 1. With r = 0 only the next period is excited.
    """

    def _geometric(r, s):
        s = np.asarray(s)
        with np.errstate(invalid="ignore"):
            w = np.power(float(r), np.maximum(s - 1, 0))
        return np.where(s >= 1, w, 0.0)

    return partial(_geometric, r)


def exponential(a, b):
    """Continuous exponential kernel g(x) = a b exp(-b x), x >= 0

    The kernel integrates to a (the branching ratio) and decays at rate b.

    Args:
        a (float): Kernel amplitude / branching ratio
        b (float): Decay rate, > 0

    Returns:
        (function): A function g(x) evaluated elementwise, 0 for x < 0
    """

    def _exponential(a, b, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, a * b * np.exp(-b * np.abs(x)), 0.0)

    return partial(_exponential, a, b)


def exponential_matrix(branching, rates):
    """Matrix of exponential kernels g_kj(x) = w_kj b_k exp(-b_k x)

    Args:
        branching (numpy array): D x D matrix of kernel integrals w_kj
        rates (numpy array): Per-target-line decay rates b_k

    Returns:
        (function): A function G(x) mapping an array of lags of shape (n,)
            to an array of shape (n, D, D)
    """
    branching = np.asarray(branching, dtype=float)
    rates = np.asarray(rates, dtype=float)

    def _exponential_matrix(branching, rates, x):
        x = np.asarray(x, dtype=float)[:, None, None]
        g = branching[None] * rates[None, :, None] \
            * np.exp(-rates[None, :, None] * np.abs(x))
        return np.where(x >= 0, g, 0.0)

    return partial(_exponential_matrix, branching, rates)
