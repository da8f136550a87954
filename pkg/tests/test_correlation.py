# -*- coding: utf-8 -*-

import numpy as np
import pytest
from numpy.testing import assert_allclose

from senbd_methods.errors import DomainError, StationarityError
from senbd_methods.model import ModelSpec, EventSeries
from senbd_methods.process import simulate
from senbd_methods.correlation import (
    CorrelationSpec,
    correlation_spec_from_model,
    autocovariance_closed_form,
    autocovariance_exact,
    covariance_integral_solve,
    empirical_autocovariance,
    autocovariance_decay_rate
)
from senbd_methods.utils.dacadc import discrete_decay_rate


BASE = CorrelationSpec(a=0.5, b=1.0, omega=0.0, theta0=1.0)


def test_correlation_spec():
    assert_allclose(BASE.mean, 2.0)
    with pytest.raises(DomainError):
        CorrelationSpec(a=0.5, b=0.0, omega=0.0, theta0=1.0)
    with pytest.raises(DomainError):
        CorrelationSpec(a=0.5, b=1.0, omega=-1.0, theta0=1.0)


def test_correlation_spec_from_model():
    spec = ModelSpec("SE_NBD", [1.0], [0.5], [[4.0]], [0.5])
    cspec = correlation_spec_from_model(spec)
    assert_allclose(cspec.a, 0.5)
    assert_allclose(cspec.b, np.log(2.0))
    assert_allclose(cspec.omega, 2.0)
    assert_allclose(cspec.theta0, 1.0)


def test_closed_form_values():
    assert_allclose(autocovariance_closed_form(BASE, 0.0), 1.0)
    assert_allclose(autocovariance_closed_form(BASE, np.log(4.0) / 0.5),
                    0.25)


def test_closed_form_dispersion_factor():
    dispersed = CorrelationSpec(a=0.5, b=1.0, omega=1.0, theta0=1.0)
    tau = np.linspace(0, 5, 11)
    assert_allclose(autocovariance_closed_form(dispersed, tau),
                    2 * autocovariance_closed_form(BASE, tau))


def test_closed_form_errors():
    with pytest.raises(StationarityError):
        autocovariance_closed_form(
            CorrelationSpec(a=1.0, b=1.0, omega=0.0, theta0=1.0), 0.0)
    with pytest.raises(DomainError):
        autocovariance_closed_form(BASE, -1.0)


def test_exact_amplitude():
    assert_allclose(autocovariance_exact(BASE, 0.0), 1.5)


def test_integral_solve_single_line():
    grid = covariance_integral_solve(BASE, h=0.01, t_max=20.0)
    assert_allclose(grid.tau[-1], 20.0, atol=0.011)
    assert grid.values.shape == (len(grid.tau), 1, 1)
    deviation = np.abs(grid.values[:, 0, 0]
                       - autocovariance_exact(BASE, grid.tau))
    assert deviation.max() < 1e-3
    assert grid.residual < 1e-6


def test_integral_solve_hawkes_and_se_nbd_differ_by_dispersion():
    dispersed = CorrelationSpec(a=0.5, b=1.0, omega=0.5, theta0=1.0)
    plain = covariance_integral_solve(BASE, h=0.05, t_max=20.0)
    mixed = covariance_integral_solve(dispersed, h=0.05, t_max=20.0)
    assert_allclose(mixed.values, 1.5 * plain.values, rtol=1e-6, atol=1e-7)


def test_integral_solve_zero_kernel():
    spec = CorrelationSpec(a=0.0, b=1.0, omega=0.3, theta0=2.0)
    grid = covariance_integral_solve(spec, h=0.1)
    assert np.all(grid.values == 0.0)


def test_integral_solve_symmetric_lines():
    specs = [CorrelationSpec(a=0.3, b=1.0, omega=0.2, theta0=1.0)] * 2
    grid = covariance_integral_solve(
        specs,
        branching=[[0.3, 0.2], [0.2, 0.3]],
        rates=[1.0, 1.0],
        h=0.05,
        t_max=30.0
    )
    assert_allclose(grid.values[:, 0, 1], grid.values[:, 1, 0], atol=1e-10)
    assert_allclose(grid.values[:, 0, 0], grid.values[:, 1, 1], atol=1e-10)


def test_integral_solve_rejects_supercritical_kernel():
    with pytest.raises(StationarityError):
        covariance_integral_solve(
            [BASE, BASE], branching=[[0.5, 0.6], [0.6, 0.5]])


def test_integral_solve_default_grid_end():
    grid = covariance_integral_solve(BASE, h=0.1)
    assert grid.tau[-1] >= 40.0


def test_empirical_autocovariance_iid_poisson():
    counts = np.random.default_rng(1).poisson(2.0, size=(20000, 1))
    acov = empirical_autocovariance(
        EventSeries(counts=counts, sector_names=["a"]), 5)
    assert acov.shape == (6, 1, 1)
    assert abs(acov[0, 0, 0] - 2.0) < 0.1
    assert np.all(np.abs(acov[1:, 0, 0]) < 0.07)


def test_empirical_autocovariance_iid_nbd():
    rng = np.random.default_rng(2)
    counts = rng.poisson(rng.gamma(1.0, 1.0, size=(50000, 1)))
    acov = empirical_autocovariance(counts, 1)
    assert abs(acov[0, 0, 0] - 2.0) < 0.12


def test_empirical_autocovariance_too_short():
    with pytest.raises(DomainError):
        empirical_autocovariance(np.zeros((100, 1)), 10)


def test_decay_rate_of_exact_geometric_decay():
    acov = 0.8 ** np.arange(10)[:, None, None]
    assert_allclose(autocovariance_decay_rate(acov), -np.log(0.8))


@pytest.mark.slow
def test_simulated_autocovariance_decay_rate():
    r, s = 0.5, 0.4
    spec = ModelSpec.from_reproduction("SE_NBD", [1.0], [1.0], [[s]], [r])
    series = simulate(spec, 1000000, seed=12)
    acov = empirical_autocovariance(series, 5)
    rate = autocovariance_decay_rate(acov, lags=[1, 2, 3, 4, 5])
    assert_allclose(rate, discrete_decay_rate(r, s * (1 - r)), rtol=0.15)
