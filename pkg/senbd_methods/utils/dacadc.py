# -*- coding: utf-8 -*-
"""Discrete to continuous-limit parameter conversion

The discrete process excites the following periods with weights
(M0/L0) r^(s - 1); its continuous-time limit has the exponential kernel
g(x) = a b exp(-b x). The two are matched by equating the total excitation
a = S = (M0/L0) / (1 - r) and the per-period decay exp(-b) = r.

Copyright 2018 Aaron Snoswell
"""

import numpy as np

from ..errors import DomainError


def dac(decay, reproduction):
    """Discrete to continuous conversion

    Args:
        decay (numpy array): Discrete decay rates r, in (0, 1)
        reproduction (numpy array): Reproduction numbers S, same shape as
            decay or D x D with rows indexed like decay

    Returns:
        (numpy array): Kernel amplitudes a (equal to S)
        (numpy array): Kernel rates b = -ln r, per period
    """
    r = np.asarray(decay, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise DomainError("Decay rates must lie in (0, 1) for a continuous "
                          "limit, got {}".format(r))
    return np.array(reproduction, dtype=float), -np.log(r)


def discrete_decay_rate(decay, excitation):
    """Per-period decay rate of a single line's autocovariance

    The discrete analogue of b (1 - a): the autocovariance of a single
    geometric-kernel line falls by the factor r + M0/L0 per period.

    Args:
        decay (float): Decay rate r
        excitation (float): One-step excitation factor M0/L0

    Returns:
        (float): -ln(r + M0/L0)
    """
    rate = float(decay) + float(excitation)
    if not 0 < rate < 1:
        raise DomainError("r + M0/L0 must lie in (0, 1), got {}".format(rate))
    return -np.log(rate)
