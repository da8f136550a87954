# -*- coding: utf-8 -*-

import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from senbd_methods.errors import DomainError, StationarityError
from senbd_methods.model import ModelSpec, sector_network_spec, SECTORS_13
from senbd_methods.network import (
    InteractionMatrix,
    ImpactResult,
    build_s_matrix,
    spectral_radius,
    classify,
    mean_field_equilibrium,
    impact_infinite,
    impact_trajectory,
    impact_analysis,
    rank_sectors,
    export_network,
    to_digraph,
    monte_carlo_impact
)


S_2X2 = [[0.2, 0.1], [0.3, 0.2]]


def md_spec(s, m0=None, r=0.5):
    s = np.asarray(s, dtype=float)
    d = s.shape[0]
    m0 = np.ones(d) if m0 is None else m0
    return ModelSpec.from_reproduction("MD_SE_NBD", m0, np.ones(d), s,
                                       np.full(d, r))


def single(excitation=0.25, r=0.5):
    # M0 = 1, so L0 = 1 / excitation
    return ModelSpec("SE_NBD", [1.0], [1.0], [[1.0 / excitation]], [r])


def test_build_s_matrix():
    assert_allclose(build_s_matrix(single()).s, [[0.5]])

    spec = ModelSpec("MD_SE_NBD", [1.0, 1.0], [1.0, 1.0],
                     np.full((2, 2), np.inf), [0.5, 0.5])
    assert_array_equal(build_s_matrix(spec).s, 0.0)


def test_interaction_matrix_validation():
    with pytest.raises(DomainError):
        InteractionMatrix([[0.1, 0.2]])
    with pytest.raises(DomainError):
        InteractionMatrix([[-0.1]])


def test_spectral_radius_examples():
    assert_allclose(spectral_radius(np.diag([0.5, 0.3])), 0.5)
    assert spectral_radius(np.zeros((3, 3))) == 0.0
    assert_allclose(spectral_radius(S_2X2), 0.2 + np.sqrt(0.03), atol=1e-8)


def test_spectral_radius_reducible():
    # Defective (Jordan-type) and nilpotent matrices
    assert_allclose(spectral_radius([[0.5, 1.0], [0.0, 0.5]]), 0.5)
    assert spectral_radius([[0.0, 1.0], [0.0, 0.0]]) == 0.0
    assert_allclose(spectral_radius([[0.3, 0.0, 0.0],
                                     [5.0, 0.1, 0.0],
                                     [0.0, 2.0, 0.7]]), 0.7)


def test_spectral_radius_periodic(caplog):
    with caplog.at_level(logging.WARNING):
        rho = spectral_radius([[0.0, 1.0], [1.0, 0.0]])
    assert_allclose(rho, 1.0, atol=1e-9)
    assert "near-critical" in caplog.text


def test_spectral_radius_random():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.uniform(size=(6, 6)) * (rng.uniform(size=(6, 6)) < 0.4)
        expected = np.max(np.abs(np.linalg.eigvals(a)))
        assert_allclose(spectral_radius(a), expected, atol=1e-6)


def test_classify():
    assert classify(np.diag([0.5, 0.3])) == "steady"
    assert classify([[1.2]]) == "nonsteady"


def test_mean_field_equilibrium():
    spec = ModelSpec("MD_SE_NBD", [1.0, 2.0], [1.0, 1.0],
                     np.full((2, 2), np.inf), [0.5, 0.5])
    assert_allclose(mean_field_equilibrium(spec), [1.0, 2.0])
    assert_allclose(mean_field_equilibrium(single()), [2.0])
    assert_allclose(mean_field_equilibrium(md_spec(S_2X2)),
                    [1.47541, 1.80328], atol=1e-5)


def test_mean_field_requires_steady_state():
    with pytest.raises(StationarityError) as info:
        mean_field_equilibrium(single(excitation=0.6))
    assert_allclose(info.value.rho, 1.2)


def test_impact_infinite():
    assert_allclose(impact_infinite(single(), 0), [1.0])
    assert_allclose(impact_infinite(md_spec(S_2X2), 0),
                    [0.31148, 0.49180], atol=1e-5)

    spec = ModelSpec("MD_SE_NBD", [1.0, 1.0], [1.0, 1.0],
                     np.full((2, 2), np.inf), [0.5, 0.5])
    assert_array_equal(impact_infinite(spec, 1), 0.0)

    with pytest.raises(DomainError):
        impact_infinite(spec, 2)
    with pytest.raises(StationarityError):
        impact_infinite(single(excitation=0.6), 0)


def test_impact_matches_neumann_series():
    rng = np.random.default_rng(4)
    for _ in range(5):
        s = rng.uniform(size=(4, 4)) * (rng.uniform(size=(4, 4)) < 0.5) \
            + 0.1 * np.eye(4)
        s *= 0.8 / spectral_radius(s)
        spec = md_spec(s, m0=rng.uniform(0.5, 2.0, size=4))
        for source in range(4):
            series = np.zeros(4)
            power = s[:, source]
            for _ in range(400):
                series += power
                power = s @ power
            assert_allclose(impact_infinite(spec, source), series,
                            atol=1e-8)


def test_impact_recurrence_matches_closed_form():
    rng = np.random.default_rng(13)
    for _ in range(50):
        r = rng.uniform(0.0, 0.9)
        excitation = rng.uniform(0.01, 0.99 - r)
        spec = ModelSpec("SE_NBD", [1.0], [1.0], [[1.0 / excitation]], [r])
        closed = excitation / (1.0 - r - excitation)
        trajectory = impact_trajectory(spec, 0, 5000)
        assert_allclose(trajectory[-1], [closed], rtol=1e-10)
        assert_allclose(impact_infinite(spec, 0), [closed], rtol=1e-10)


def test_impact_trajectory_with_unequal_decays():
    rng = np.random.default_rng(14)
    for _ in range(100):
        d = int(rng.integers(1, 7))
        s = rng.uniform(size=(d, d)) * (rng.uniform(size=(d, d)) < 0.6) \
            + 0.05 * np.eye(d)
        s *= rng.uniform(0.1, 0.9) / spectral_radius(s)
        spec = ModelSpec.from_reproduction(
            "MD_SE_NBD",
            rng.uniform(0.2, 2.0, size=d),
            np.ones(d),
            s,
            rng.uniform(0.0, 0.8, size=d)
        )
        for source in range(d):
            trajectory = impact_trajectory(spec, source, 3000)
            assert np.max(np.abs(trajectory[-1]
                                 - impact_infinite(spec, source))) < 1e-8


def test_impact_trajectory_first_steps():
    m, r = 0.25, 0.5
    trajectory = impact_trajectory(single(excitation=m, r=r), 0, 2)
    assert_allclose(trajectory[0], [m])
    assert_allclose(trajectory[1] - trajectory[0], [m * (m + r)])


def test_impact_trajectory_converges():
    spec = md_spec(S_2X2)
    trajectory = impact_trajectory(spec, 0, 10000)
    assert trajectory.shape == (10000, 2)
    assert_allclose(trajectory[-1], impact_infinite(spec, 0), atol=1e-8)
    assert np.all(np.diff(trajectory, axis=0) >= 0)


def test_impact_trajectory_diverges_above_criticality():
    trajectory = impact_trajectory(single(excitation=0.6), 0, 100)
    assert trajectory[99, 0] / trajectory[49, 0] > 1
    assert trajectory[99, 0] > 1e3


def test_impact_near_criticality():
    r = 0.5
    for eps in (0.1, 0.01):
        spec = single(excitation=(1 - r) * (1 - eps), r=r)
        assert_allclose(impact_infinite(spec, 0), [(1 - eps) / eps],
                        rtol=1e-10)


def test_impact_analysis():
    impact = impact_analysis(md_spec(S_2X2), horizon=20,
                             sector_names=["a", "b"])
    assert impact.per_source.shape == (2, 2)
    assert impact.trajectories.shape == (2, 20, 2)
    assert_allclose(impact.totals, impact.per_source.sum(axis=1))
    assert_allclose(impact.average_total, np.mean(impact.totals))
    assert impact.sector_names == ("a", "b")


def test_rank_sectors_ties_keep_index_order():
    impact = ImpactResult(per_source=np.eye(3), totals=np.ones(3),
                          average_total=1.0)
    assert [i for i, _ in rank_sectors(impact)] == [0, 1, 2]

    symmetric = impact_analysis(md_spec([[0.2, 0.1], [0.1, 0.2]]))
    assert_allclose(symmetric.totals[0], symmetric.totals[1])


def test_rank_sectors_upstream_first():
    # Only line 1 excites line 2
    impact = impact_analysis(md_spec([[0.0, 0.0], [0.4, 0.0]]))
    ranking = rank_sectors(impact)
    assert ranking[0][0] == 0
    assert_allclose(ranking[0][1], 0.4)
    assert_allclose(ranking[1][1], 0.0)


def test_sector_network_upstream_sectors():
    spec = sector_network_spec()
    rho = spectral_radius(build_s_matrix(spec))
    assert 0.85 < rho < 1

    ranking = rank_sectors(impact_analysis(spec, sector_names=SECTORS_13))
    top = {SECTORS_13[i] for i, _ in ranking[:2]}
    assert top == {"real_estate", "financial_institutions"}


def test_export_network():
    assert export_network(np.zeros((2, 2))) == []
    assert export_network([[0.5]]) == [("line1", "line1", 0.5)]
    assert export_network([[0.0, 0.1], [0.3, 0.0]], ["a", "b"]) == [
        ("a", "b", 0.3),
        ("b", "a", 0.1)
    ]
    assert export_network([[0.0, 0.1], [0.3, 0.0]], threshold=0.2) == [
        ("line1", "line2", 0.3)
    ]
    with pytest.raises(DomainError):
        export_network([[0.5]], ["a", "b"])


def test_to_digraph():
    graph = to_digraph([[0.0, 0.1], [0.3, 0.0]], ["a", "b"])
    assert set(graph.nodes) == {"a", "b"}
    assert graph.number_of_edges() == 2
    assert_allclose(graph["a"]["b"]["weight"], 0.3)


@pytest.mark.slow
def test_monte_carlo_impact_matches_closed_form():
    s = np.array([[0.3, 0.1, 0.0], [0.2, 0.2, 0.1], [0.1, 0.0, 0.3]])
    s *= 0.6 / spectral_radius(s)
    spec = ModelSpec.from_reproduction("MD_SE_NBD", [0.5, 0.8, 0.3],
                                       [1.0, 0.5, 2.0], s, [0.5, 0.3, 0.6])
    assert_allclose(spectral_radius(build_s_matrix(spec)), 0.6)
    for source in range(3):
        mean, stderr = monte_carlo_impact(spec, source, n_paths=100000,
                                          horizon=200, seed=1)
        expected = impact_infinite(spec, source)
        close = (np.abs(mean - expected) < 3 * stderr) | \
            (np.abs(mean - expected) <= 0.05 * expected)
        assert close.all()


def test_monte_carlo_impact_is_reproducible():
    spec = single()
    a, _ = monte_carlo_impact(spec, 0, n_paths=2000, horizon=50, seed=3)
    b, _ = monte_carlo_impact(spec, 0, n_paths=2000, horizon=50, seed=3)
    assert_array_equal(a, b)
