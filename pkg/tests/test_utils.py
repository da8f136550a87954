# -*- coding: utf-8 -*-

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from senbd_methods.errors import DomainError, ConvergenceError
from senbd_methods.model import ModelSpec
from senbd_methods.utils import (
    geometric,
    exponential,
    exponential_matrix,
    dac,
    discrete_decay_rate,
    fixed_point,
    make_streams,
    as_line_streams,
    make_box_transform
)
from senbd_methods.utils.rollout import rollout


def test_geometric_kernel():
    assert_allclose(geometric(0.5)([0, 1, 2, 3]), [0.0, 1.0, 0.5, 0.25])
    assert_allclose(geometric(0.0)([1, 2, 3]), [1.0, 0.0, 0.0])


def test_exponential_kernels():
    g = exponential(0.5, 2.0)
    assert_allclose(g([-1.0, 0.0]), [0.0, 1.0])
    assert_allclose(g(1.0), np.exp(-2.0))

    matrix = exponential_matrix([[0.5, 0.1], [0.0, 0.3]], [1.0, 2.0])
    values = matrix(np.array([0.0, 1.0]))
    assert values.shape == (2, 2, 2)
    assert_allclose(values[0], [[0.5, 0.1], [0.0, 0.6]])
    assert_allclose(values[1, 1, 1], 0.6 * np.exp(-2.0))


def test_dac():
    a, b = dac(0.5, 0.4)
    assert_allclose(a, 0.4)
    assert_allclose(b, np.log(2.0))

    a, b = dac([0.5, 0.25], [[0.4, 0.2], [0.0, 0.4]])
    assert_allclose(a, [[0.4, 0.2], [0.0, 0.4]])
    assert_allclose(b, [np.log(2.0), np.log(4.0)])

    with pytest.raises(DomainError):
        dac(0.0, 0.4)


def test_discrete_decay_rate():
    assert_allclose(discrete_decay_rate(0.5, 0.2), -np.log(0.7))
    with pytest.raises(DomainError):
        discrete_decay_rate(0.5, 0.5)


def test_fixed_point():
    x, iterations = fixed_point(np.cos, 1.0, tol=1e-12)
    assert_allclose(x, 0.7390851332151607, atol=1e-11)
    assert iterations > 1

    with pytest.raises(ConvergenceError) as info:
        fixed_point(np.cos, 1.0, max_iterations=3)
    assert info.value.last_iterate is not None
    assert info.value.residual > 0


def test_make_streams_reproducible():
    a = [s.uniform() for s in make_streams(1, 3)]
    b = [s.uniform() for s in make_streams(1, 3)]
    assert a == b
    assert len(set(a)) == 3

    keyed = make_streams(1, 1, key="energy")[0].uniform()
    assert keyed == make_streams(1, 1, key="energy")[0].uniform()
    assert keyed != make_streams(1, 1, key="utility")[0].uniform()


def test_as_line_streams():
    rng = np.random.default_rng(0)
    assert as_line_streams(rng, 3) == [rng] * 3
    assert len(as_line_streams(5, 4)) == 4
    with pytest.raises(AssertionError):
        as_line_streams(make_streams(0, 2), 3)


def test_box_transform():
    to_search, from_search, bounds, sample = make_box_transform(
        [1e-3, 0.0], [1e3, 0.99], [True, False])
    assert_allclose(bounds, [(np.log(1e-3), np.log(1e3)), (0.0, 0.99)])

    p = np.array([2.5, 0.3])
    assert_allclose(to_search(p), [np.log(2.5), 0.3])
    assert_allclose(from_search(to_search(p)), p)

    # Out-of-box points are clipped back
    assert_allclose(from_search(np.array([20.0, 1.5])), [1e3, 0.99])

    x = sample(np.random.default_rng(1))
    assert all(low <= v <= high for v, (low, high) in zip(x, bounds))


def test_rollout():
    spec = ModelSpec("SE_NBD", [1.0], [1.0], [[4.0]], [0.5])
    trajectory = rollout(spec, 10, np.random.default_rng(2))
    assert len(trajectory) == 11
    assert trajectory[-1][1] is None
    assert [state.t for state, _ in trajectory] == list(range(11))

    again = rollout(spec, 10, np.random.default_rng(2))
    assert_array_equal(
        [c for _, c in trajectory[:-1]],
        [c for _, c in again[:-1]]
    )


def test_rollout_stops_early():
    spec = ModelSpec("SE_NBD", [1.0], [1.0], [[4.0]], [0.5])
    trajectory = rollout(spec, None, 0, stop=lambda state: state.t >= 4)
    assert trajectory[-1][0].t == 4
    assert len(trajectory) == 5
