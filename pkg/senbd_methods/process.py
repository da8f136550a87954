# -*- coding: utf-8 -*-
"""Forward simulation of discrete SE-NBD, Hawkes and hybrid count processes

Given the state (M_t, K_t) after t periods, the counts of period t+1 are
drawn independently per line: an NBD line draws an intensity
lambda ~ Gamma(K_t, M0/K0) and then a Poisson(lambda) count, a Poisson
(Hawkes) line draws Poisson(M_t) directly. The state then moves by the
geometric kernel recursion

    M_{t+1} = M0 + r (M_t - M0) + sum_j (M0 / L0[i, j]) X_{t+1}[j]

and the same with K0 in place of M0 for K, which keeps M_t / K_t = M0 / K0.

Copyright 2018 Aaron Snoswell
"""

import logging

import numpy as np
from scipy import special
from tqdm import tqdm

from .errors import DomainError, StationarityError
from .model import (
    ProcessState,
    EventSeries,
    default_sector_names
)
from .network import build_s_matrix, spectral_radius
from .utils.basis import geometric
from .utils.rng import make_streams, as_line_streams


logger = logging.getLogger(__name__)


def nbd_logpmf(k, shape, scale):
    """Vectorised NBD log-probability

    log[ G(shape + k) / (k! G(shape)) (1 + scale)^-shape
         (scale / (1 + scale))^k ]

    The Gamma-function ratio is evaluated through betaln, which stays
    accurate for very large shapes (the Poisson limit).

    Args:
        k (numpy array): Nonnegative integer counts
        shape (numpy array): Shapes, > 0
        scale (numpy array): Scales, > 0

    Returns:
        (numpy array): Log-probabilities
    """
    k = np.asarray(k, dtype=float)
    shape = np.asarray(shape, dtype=float)
    scale = np.asarray(scale, dtype=float)
    k_safe = np.maximum(k, 1.0)
    coefficient = np.where(
        k > 0,
        -special.betaln(shape, k_safe) - np.log(k_safe),
        0.0
    )
    return coefficient - shape * np.log1p(scale) \
        + special.xlogy(k, scale) - k * np.log1p(scale)


def poisson_logpmf(k, mean):
    """Vectorised Poisson log-probability, -inf for impossible counts"""
    k = np.asarray(k, dtype=float)
    mean = np.asarray(mean, dtype=float)
    with np.errstate(divide="ignore"):
        return special.xlogy(k, mean) - mean - special.gammaln(k + 1)


def _check_count(k):
    if np.any(np.asarray(k) < 0) or np.any(np.asarray(k) != np.floor(k)):
        raise DomainError("Counts must be nonnegative integers, got "
                          "{}".format(k))


def nbd_pmf(k, shape, scale):
    """Negative binomial probability of k events

    This is the Poisson-Gamma mixture with Gamma(shape, scale) intensity,
    so the mean is shape * scale and the variance
    shape * scale * (1 + scale).

    Args:
        k (int): Number of events
        shape (float): Shape K, > 0
        scale (float): Scale M / K, > 0

    Returns:
        (float): The probability
    """
    _check_count(k)
    if not np.all(np.asarray(shape) > 0) or not np.all(np.asarray(scale) > 0):
        raise DomainError("NBD shape and scale must be > 0, got shape={}, "
                          "scale={}".format(shape, scale))
    return np.exp(nbd_logpmf(k, shape, scale))


def poisson_pmf(k, mean):
    """Poisson probability of k events, mean >= 0"""
    _check_count(k)
    if not np.all(np.asarray(mean) >= 0):
        raise DomainError("Poisson mean must be >= 0, got {}".format(mean))
    return np.exp(poisson_logpmf(k, mean))


def _check_state(state, spec):
    d = spec.dimension
    if np.shape(state.m) != (d,) or np.shape(state.k) != (d,) \
            or np.shape(state.last_counts) != (d,):
        raise DomainError("State dimension does not match the {}-line "
                          "spec".format(d))


def _shape_excitation(spec):
    """Matrix K0[i] / L0[i, j], zero on absent edges and Poisson lines"""
    l0 = spec.interaction_scale
    with np.errstate(divide="ignore", invalid="ignore"):
        e = spec.dispersion_shape[:, None] / l0
    keep = np.isfinite(l0) & ~spec.poisson_lines[:, None]
    return np.where(keep, e, 0.0)


def _draw(streams, spec, m, k):
    """Draw one period of counts from conditional state (m, k)"""
    scale = spec.dispersion_scale
    counts = np.empty(spec.dimension, dtype=np.int64)
    for i, stream in enumerate(streams):
        if spec.poisson_lines[i] or scale[i] <= 0:
            counts[i] = stream.poisson(m[i])
        else:
            intensity = stream.gamma(shape=k[i], scale=scale[i])
            counts[i] = stream.poisson(intensity)
    return counts


def _advance(spec, excitation, shape_excitation, m, k, counts):
    """Geometric kernel recursion for (M, K) after observing counts"""
    r = spec.effective_decay
    m0 = spec.baseline_mean
    k0 = spec.dispersion_shape
    m_next = m0 + r * (m - m0) + excitation @ counts
    with np.errstate(invalid="ignore"):
        k_next = k0 + r * (k - k0) + shape_excitation @ counts
    k_next = np.where(spec.poisson_lines, np.inf, k_next)
    return m_next, k_next


def step(state, spec, rng):
    """Draw the next period of counts and advance the state

    Counts of different lines are conditionally independent given the
    history.

    Args:
        state (ProcessState): Current state
        spec (ModelSpec): Model the state belongs to
        rng (any): A numpy Generator, an int seed, or one Generator per line

    Returns:
        (numpy array): The D drawn counts
        (ProcessState): The state after observing them
    """
    _check_state(state, spec)
    streams = as_line_streams(rng, spec.dimension)
    counts = _draw(streams, spec, state.m, state.k)
    m_next, k_next = _advance(
        spec,
        spec.excitation,
        _shape_excitation(spec),
        np.asarray(state.m, dtype=float),
        np.asarray(state.k, dtype=float),
        counts
    )
    return counts, ProcessState(
        t=state.t + 1,
        m=m_next,
        k=k_next,
        last_counts=counts
    )


def observe(state, spec, counts):
    """Advance a state by given (observed) counts instead of drawn ones"""
    _check_state(state, spec)
    counts = np.asarray(counts, dtype=np.int64)
    m_next, k_next = _advance(
        spec,
        spec.excitation,
        _shape_excitation(spec),
        np.asarray(state.m, dtype=float),
        np.asarray(state.k, dtype=float),
        counts
    )
    return ProcessState(t=state.t + 1, m=m_next, k=k_next,
                        last_counts=counts)


def simulate(
        spec,
        horizon,
        seed,
        *,
        allow_nonstationary=False,
        sector_names=None,
        labels=None,
        verbose=False
):
    """Simulate a count series from a model

    Each line draws from its own sub-stream spawned from the seed.

    Args:
        spec (ModelSpec): Model to simulate
        horizon (int): Number of periods T
        seed (int): Random seed

        allow_nonstationary (bool): Simulate even if rho(S) >= 1
        sector_names (list): Line names, defaults to line1..lineD
        labels (list): Optional period labels, one per period
        verbose (bool): Show a progress bar

    Returns:
        (EventSeries): The simulated T x D series
    """

    horizon = int(horizon)
    if horizon < 0:
        raise DomainError("horizon must be >= 0, got {}".format(horizon))

    rho = spectral_radius(build_s_matrix(spec))
    if rho >= 1:
        if not allow_nonstationary:
            raise StationarityError(
                "Spectral radius of S is {:.6g} >= 1; the process has no "
                "steady state".format(rho),
                rho=rho
            )
        logger.warning("Simulating a nonstationary spec, rho(S)=%.6g", rho)

    d = spec.dimension
    streams = make_streams(seed, d)
    excitation = spec.excitation
    shape_excitation = _shape_excitation(spec)
    m = np.array(spec.baseline_mean, dtype=float)
    k = np.array(spec.dispersion_shape, dtype=float)

    counts = np.zeros((horizon, d), dtype=np.int64)
    for t in tqdm(range(horizon), disable=not verbose, desc="simulate"):
        counts[t] = _draw(streams, spec, m, k)
        m, k = _advance(spec, excitation, shape_excitation, m, k, counts[t])

    return EventSeries(
        counts=counts,
        sector_names=sector_names if sector_names is not None
        else default_sector_names(d),
        labels=labels
    )


def conditional_moments(state, spec):
    """Mean and variance of the next period's counts given the state

    Args:
        state (ProcessState): Current state
        spec (ModelSpec): Model

    Returns:
        (numpy array): Conditional means M_t
        (numpy array): Conditional variances, M_t (1 + M0/K0) on NBD lines
            and M_t on Poisson lines
    """
    _check_state(state, spec)
    m = np.asarray(state.m, dtype=float)
    return m, m * (1.0 + spec.dispersion_scale)


def convolution_means(spec, counts):
    """Conditional means by the explicit kernel convolution sum

    M_t[i] = M0[i] + sum_j (M0[i]/L0[i, j]) sum_{s<=t} X_s[j] d_i(t + 1 - s)

    This is O(T^2) and only meant as a reference for the recursion.

    Args:
        spec (ModelSpec): Model
        counts (numpy array): T x D count matrix

    Returns:
        (numpy array): (T + 1) x D matrix of M_0, ..., M_T
    """
    counts = np.asarray(counts, dtype=float)
    horizon, d = counts.shape
    excitation = spec.excitation
    r = spec.effective_decay
    means = np.tile(spec.baseline_mean, (horizon + 1, 1))
    for i in range(d):
        kernel = geometric(r[i])
        for t in range(1, horizon + 1):
            weights = kernel(t + 1 - np.arange(1, t + 1))
            means[t, i] += excitation[i] @ (weights @ counts[:t])
    return means
