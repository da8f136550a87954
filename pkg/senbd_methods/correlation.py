# -*- coding: utf-8 -*-
"""Correlation functions of the continuous-time limit

In the continuous limit line k has intensity
theta_k + sum_j int g_kj(w) dN_j(t - w) with exponential kernels
g_kj(x) = w_kj b_k exp(-b_k x), and the Gamma-mixed (SE-NBD) lines carry
the extra dispersion omega' = M0/K0 of their intensity. The covariance
density C_ik(tau) of lines i and k (tau > 0) then solves

    C_ik(tau) = (omega'_i + 1) v_i g_ki(tau)
                + sum_j int_0^inf g_kj(w) C_ij(tau - w) dw

with C_ij(-tau) = C_ji(tau). For a single line with g(x) = a b exp(-b x)
the solution decays like exp(-b (1 - a) tau), and SE-NBD and Hawkes lines
differ only by the factor omega' + 1.

Copyright 2018 Aaron Snoswell
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft, linalg

from .errors import DomainError, StationarityError
from .model import EventSeries
from .network import spectral_radius
from .utils.basis import exponential_matrix
from .utils.dacadc import dac
from .utils.fixed_point import fixed_point


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrelationSpec:
    """Continuous-limit parameters of one line

    Attributes:
        a (float): Kernel amplitude (branching ratio), in [0, 1)
        b (float): Kernel rate, > 0
        omega (float): Intensity dispersion omega' = M0/K0, 0 for Hawkes
        theta0 (float): Baseline intensity

        mean (float): Equilibrium mean theta0 / (1 - a), derived if omitted
    """

    a: float
    b: float
    omega: float
    theta0: float
    mean: float = None

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError("a must be >= 0, got {}".format(self.a))
        if not self.b > 0:
            raise DomainError("b must be > 0, got {}".format(self.b))
        if not self.omega >= 0:
            raise DomainError("omega must be >= 0, got {}".format(
                self.omega))
        if not self.theta0 >= 0:
            raise DomainError("theta0 must be >= 0, got {}".format(
                self.theta0))
        if self.mean is None and self.a < 1:
            object.__setattr__(self, "mean", self.theta0 / (1.0 - self.a))


@dataclass(frozen=True, eq=False)
class CovarianceGrid:
    """Solution of the covariance integral equation on a grid

    Attributes:
        tau (numpy array): Grid 0, h, 2h, ..., T_max
        values (numpy array): len(tau) x D x D array, [n, i, k] is
            C_ik(tau[n])
        iterations (int): Fixed-point iterations used
        residual (float): Sup-norm change of the last iteration
    """

    tau: np.ndarray
    values: np.ndarray
    iterations: int
    residual: float


def correlation_spec_from_model(spec, line=0):
    """Continuous-limit parameters of one line of a discrete model

    Uses a = S[line, line], b = -ln r, omega' = M0/K0 and theta0 = M0.
    Cross-excitation of the line is ignored.

    Args:
        spec (ModelSpec): Discrete model
        line (int): Line index

    Returns:
        (CorrelationSpec): The matching continuous-limit parameters
    """
    line = int(line)
    if not 0 <= line < spec.dimension:
        raise DomainError("Line {} out of range".format(line))
    r = spec.effective_decay[line]
    excitation = spec.excitation[line]
    if np.any(np.delete(excitation, line) > 0):
        logger.warning("Line %d has cross-excitation, which the single-line "
                       "correlation ignores", line)
    a, b = dac(r, excitation[line] / (1.0 - r))
    return CorrelationSpec(
        a=float(a),
        b=float(b),
        omega=float(spec.dispersion_scale[line]),
        theta0=float(spec.baseline_mean[line])
    )


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    return tau


def _require_subcritical(spec):
    if spec.a >= 1:
        raise StationarityError(
            "Kernel amplitude a = {} >= 1; no stationary covariance".format(
                spec.a),
            rho=spec.a
        )


def autocovariance_closed_form(spec, tau):
    """Laplace-transform form of the single-line autocovariance

    C(tau) = a b (omega' + 1) v / (2 (1 - a)) exp(-b (1 - a) tau)

    Args:
        spec (CorrelationSpec): Line parameters
        tau (any): Lag(s), >= 0

    Returns:
        (any): C(tau), same shape as tau
    """
    _require_subcritical(spec)
    tau = _check_tau(tau)
    amplitude = spec.a * spec.b * (spec.omega + 1.0) * spec.mean \
        / (2.0 * (1.0 - spec.a))
    return amplitude * np.exp(-spec.b * (1.0 - spec.a) * tau)


def autocovariance_exact(spec, tau):
    """Exact stationary solution of the single-line integral equation

    Same decay as autocovariance_closed_form, amplitude larger by the
    factor (2 - a).

    Args:
        spec (CorrelationSpec): Line parameters
        tau (any): Lag(s), >= 0

    Returns:
        (any): C(tau), same shape as tau
    """
    return (2.0 - spec.a) * autocovariance_closed_form(spec, tau)


def covariance_integral_solve(
        specs,
        *,
        branching=None,
        rates=None,
        h=0.01,
        t_max=None,
        tol=1e-8,
        max_iterations=10000
):
    """Solve the covariance integral equation by fixed-point iteration

    The lag axis [0, T_max] is discretised with step h, negative lags are
    folded back with C_ij(-tau) = C_ji(tau), and both integrals use the
    trapezoidal rule, evaluated as FFT convolutions. The kernel tail beyond
    T_max is dropped.

    Args:
        specs (list): CorrelationSpec per line (or a single one). Supplies
            omega' and theta0, and the kernel when branching is None.

        branching (numpy array): D x D kernel integrals w_kj; defaults to
            diag(a)
        rates (numpy array): Kernel rate per target line; defaults to the
            specs' b
        h (float): Grid step
        t_max (float): Grid end, defaults to 20 / (min(b) (1 - rho(w)))
        tol (float): Sup-norm stopping tolerance
        max_iterations (int): Iteration cap

    Returns:
        (CovarianceGrid): The discretised C_ik(tau)
    """
    if isinstance(specs, CorrelationSpec):
        specs = [specs]
    specs = list(specs)
    d = len(specs)
    if branching is None:
        branching = np.diag([s.a for s in specs])
    if rates is None:
        rates = [s.b for s in specs]
    branching = np.atleast_2d(np.array(branching, dtype=float))
    rates = np.atleast_1d(np.array(rates, dtype=float))
    if branching.shape != (d, d) or rates.shape != (d,):
        raise DomainError("Kernel shapes {}, {} do not match {} lines".format(
            branching.shape, rates.shape, d))
    if np.any(branching < 0) or np.any(rates <= 0):
        raise DomainError("Kernel integrals must be >= 0 and rates > 0")

    rho = spectral_radius(branching)
    if rho >= 1:
        raise StationarityError(
            "Kernel branching matrix has spectral radius {:.6g} >= "
            "1".format(rho),
            rho=rho
        )
    if not h > 0:
        raise DomainError("h must be > 0, got {}".format(h))
    if t_max is None:
        t_max = 20.0 / (float(np.min(rates)) * (1.0 - rho))

    n = int(np.ceil(t_max / h))
    tau = h * np.arange(n + 1)
    omega = np.array([s.omega for s in specs])
    theta0 = np.array([s.theta0 for s in specs])
    mean = linalg.solve(np.eye(d) - branching, theta0)

    # g[m, k, j] = g_kj(tau_m)
    g = exponential_matrix(branching, rates)(tau)

    # Source term (omega'_i + 1) v_i g_ki(tau) at [n, i, k]
    source = ((omega + 1.0) * mean)[None, :, None] \
        * np.transpose(g, (0, 2, 1))

    n_fft = fft.next_fast_len(2 * (n + 1))
    g_hat = fft.rfft(g, n_fft, axis=0)
    g_rev_hat = fft.rfft(g[::-1], n_fft, axis=0)
    back = n - np.arange(n + 1)

    def update(c):
        c_hat = fft.rfft(c, n_fft, axis=0)

        # int_0^tau g_kj(w) C_ij(tau - w) dw
        past = fft.irfft(
            np.einsum("fkj,fij->fik", g_hat, c_hat), n_fft, axis=0
        )[:n + 1]
        past -= 0.5 * (np.einsum("kj,nij->nik", g[0], c)
                       + np.einsum("nkj,ij->nik", g, c[0]))

        # int_tau^T_max g_kj(w) C_ji(w - tau) dw
        future = fft.irfft(
            np.einsum("fkj,fji->fik", g_rev_hat, c_hat), n_fft, axis=0
        )[back]
        future -= 0.5 * (np.einsum("nkj,ji->nik", g, c[0])
                         + np.einsum("kj,nji->nik", g[n], c[back]))

        return source + h * (past + future)

    values, iterations = fixed_point(
        update,
        source,
        tol=tol,
        max_iterations=max_iterations,
        name="covariance integral equation"
    )
    residual = float(np.max(np.abs(update(values) - values))) \
        if values.size else 0.0

    return CovarianceGrid(
        tau=tau,
        values=values,
        iterations=iterations,
        residual=residual
    )


def empirical_autocovariance(series, max_lag):
    """Sample lagged covariances of a count series

    Args:
        series (EventSeries): Observed counts, T > 10 max_lag
        max_lag (int): Largest lag

    Returns:
        (numpy array): (max_lag + 1) x D x D array, [tau, i, j] estimates
            Cov[X_t[i], X_{t + tau}[j]]
    """
    counts = series.counts if isinstance(series, EventSeries) \
        else np.asarray(series)
    counts = np.asarray(counts, dtype=float)
    max_lag = int(max_lag)
    if max_lag < 0:
        raise DomainError("max_lag must be >= 0, got {}".format(max_lag))
    length = counts.shape[0]
    if not length > 10 * max_lag or length < 2:
        raise DomainError("Series of length {} is too short for lag {}; "
                          "need more than {} periods".format(
                              length, max_lag, max(10 * max_lag, 1)))
    centred = counts - counts.mean(axis=0)
    return np.array([
        centred[:length - lag].T @ centred[lag:] / (length - lag)
        for lag in range(max_lag + 1)
    ])


def autocovariance_decay_rate(acov, line=0, *, lags=None):
    """Per-period decay rate of an autocovariance by log-linear regression

    Args:
        acov (numpy array): Output of empirical_autocovariance
        line (int): Line whose autocovariance is used

        lags (list): Lags to regress on, defaults to every lag >= 1 with a
            positive autocovariance

    Returns:
        (float): Minus the slope of log C(tau) against tau
    """
    values = np.asarray(acov)[:, line, line]
    if lags is None:
        lags = [lag for lag in range(1, len(values)) if values[lag] > 0]
    lags = np.asarray(lags, dtype=int)
    if len(lags) < 2 or np.any(values[lags] <= 0):
        raise DomainError("Need at least two lags with positive "
                          "autocovariance")
    slope, _ = np.polyfit(lags, np.log(values[lags]), 1)
    return float(-slope)
