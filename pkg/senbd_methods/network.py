# -*- coding: utf-8 -*-
"""Interaction network analysis

The interaction matrix S has entries S[i, j] = (M0[i] / L0[i, j]) / (1 - r[i]),
the expected number of events on line i directly triggered by one event on
line j. Its spectral radius separates the steady (rho < 1) and non-steady
regimes, the mean-field equilibrium solves (E - S) v = M0, and the impact of
a unit shock on line i is (E - S)^-1 S e_i.

Copyright 2018 Aaron Snoswell
"""

import logging
from dataclasses import dataclass

import numpy as np
import networkx as nx
from scipy import linalg
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, StationarityError, ConvergenceError
from .model import default_sector_names


logger = logging.getLogger(__name__)

# Half-width of the band around rho = 1 reported as near-critical
NEAR_CRITICAL = 1e-9


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Matrix S of effective reproduction numbers

    Attributes:
        s (numpy array): D x D nonnegative matrix, s[i, j] is the influence
            of line j on line i
    """

    s: np.ndarray

    def __post_init__(self):
        s = np.atleast_2d(np.array(self.s, dtype=float))
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise DomainError("S must be a square matrix, got shape "
                              "{}".format(s.shape))
        if not np.all(np.isfinite(s)) or np.any(s < 0):
            raise DomainError("S must be finite and nonnegative")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def dimension(self):
        return self.s.shape[0]


@dataclass(frozen=True, eq=False)
class ImpactResult:
    """Outcome of an impact analysis

    Attributes:
        per_source (numpy array): D x D array, row i is the vector v_inf of
            added events per line after a unit shock on line i
        totals (numpy array): Row sums of per_source, one per source line
        average_total (float): Mean of totals, the response to the average
            shock
        trajectories (numpy array): Optional D x H x D array, entry
            [i, t - 1] is the cumulative response v_t to a shock on line i
        sector_names (tuple): Line names
    """

    per_source: np.ndarray
    totals: np.ndarray
    average_total: float
    trajectories: np.ndarray = None
    sector_names: tuple = None


def build_s_matrix(spec):
    """Interaction matrix of a model

    Args:
        spec (ModelSpec): The model

    Returns:
        (InteractionMatrix): S with S[i, j] = (M0[i]/L0[i, j]) / (1 - r[i])
    """
    r = spec.effective_decay
    if np.any(r >= 1):
        raise DomainError("Decay rates must be < 1 for S to exist, got "
                          "{}".format(r))
    return InteractionMatrix(spec.excitation / (1.0 - r)[:, None])


def _block_spectral_radius(a, tol, max_iterations):
    """Power iteration on an irreducible nonnegative block

    Iterates on A + I, which is primitive, so the iteration cannot cycle;
    rho(A) is the Perron root of A + I minus one.
    """
    n = a.shape[0]
    if n == 1:
        return abs(float(a[0, 0]))
    b = a + np.eye(n)

    x = np.ones(n)
    lam = 0.0
    delta = np.inf
    for _ in range(int(max_iterations)):
        y = b @ x
        lam_new = float(np.max(y))
        x_new = y / lam_new
        delta = abs(lam_new - lam)
        if delta < tol and np.max(np.abs(x_new - x)) < np.sqrt(tol):
            return lam_new - 1.0
        x, lam = x_new, lam_new
    raise ConvergenceError(
        "Power iteration did not converge in {} iterations".format(
            max_iterations),
        last_iterate=lam - 1.0,
        residual=delta
    )


def spectral_radius(s, *, tol=1e-10, max_iterations=100000):
    """Dominant eigenvalue modulus of a nonnegative matrix

    The matrix is split into strongly connected components (the diagonal
    blocks of its Frobenius normal form); rho(S) is the largest block
    radius, each found by power iteration from the all-ones vector.

    Args:
        s (any): InteractionMatrix or square nonnegative array

        tol (float): Stopping tolerance on the eigenvalue estimate
        max_iterations (int): Iteration cap per block

    Returns:
        (float): rho(S)
    """
    a = s.s if isinstance(s, InteractionMatrix) else \
        InteractionMatrix(s).s
    n_blocks, labels = connected_components(
        a > 0,
        directed=True,
        connection="strong"
    )
    rho = 0.0
    for block in range(n_blocks):
        idx = np.flatnonzero(labels == block)
        rho = max(rho, _block_spectral_radius(
            a[np.ix_(idx, idx)], tol, max_iterations))
    if abs(rho - 1.0) <= NEAR_CRITICAL:
        logger.warning("Interaction matrix is near-critical, rho(S)=%.12g",
                       rho)
    return rho


def classify(s):
    """'steady' if rho(S) < 1, else 'nonsteady'"""
    return "steady" if spectral_radius(s) < 1 else "nonsteady"


def _require_steady(s):
    rho = spectral_radius(s)
    if rho >= 1:
        raise StationarityError(
            "Spectral radius of S is {:.6g} >= 1; no equilibrium "
            "exists".format(rho),
            rho=rho
        )
    return rho


def mean_field_equilibrium(spec):
    """Stationary mean count vector v = (E - S)^-1 M0

    The same equation holds for NBD, Poisson and hybrid lines, since the
    dispersion does not enter the mean recursion.

    Args:
        spec (ModelSpec): The model

    Returns:
        (numpy array): Equilibrium means, one per line
    """
    s = build_s_matrix(spec)
    _require_steady(s)
    lu = linalg.lu_factor(np.eye(s.dimension) - s.s)
    return linalg.lu_solve(lu, spec.baseline_mean)


def _check_source(spec, source):
    if not 0 <= int(source) < spec.dimension:
        raise DomainError("Source line {} out of range for a {}-line "
                          "spec".format(source, spec.dimension))
    return int(source)


def impact_infinite(spec, source):
    """Total added events per line after one event on the source line

    Args:
        spec (ModelSpec): The model
        source (int): Index of the shocked line

    Returns:
        (numpy array): v_inf = (E - S)^-1 S e_source
    """
    source = _check_source(spec, source)
    s = build_s_matrix(spec)
    _require_steady(s)
    lu = linalg.lu_factor(np.eye(s.dimension) - s.s)
    return linalg.lu_solve(lu, s.s[:, source])


def impact_trajectory(spec, source, horizon):
    """Cumulative added events per line up to each horizon

    One event on the source line at time 0 raises the expected counts of
    period t by a_t = (T + Shat)^(t-1) Shat e_source, where Shat[i, j] is
    M0[i]/L0[i, j] and T = diag(r). The cumulative response is
    v_t = a_1 + ... + a_t, which tends to (E - S)^-1 S e_source when
    rho(S) < 1 and grows without bound otherwise.

    Args:
        spec (ModelSpec): The model
        source (int): Index of the shocked line
        horizon (int): Number of periods H

    Returns:
        (numpy array): H x D array, row t - 1 is v_t
    """
    source = _check_source(spec, source)
    horizon = int(horizon)
    if horizon < 1:
        raise DomainError("horizon must be >= 1, got {}".format(horizon))
    excitation = spec.excitation
    propagator = np.diag(spec.effective_decay) + excitation

    trajectory = np.empty((horizon, spec.dimension))
    increment = excitation[:, source].copy()
    total = np.zeros(spec.dimension)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(horizon):
            total = total + increment
            trajectory[t] = total
            increment = propagator @ increment
    return trajectory


def impact_analysis(spec, *, horizon=None, sector_names=None):
    """Impact of a unit shock on every line

    Args:
        spec (ModelSpec): The model

        horizon (int): If given, also compute trajectories up to it
        sector_names (list): Line names for reporting

    Returns:
        (ImpactResult): Per-source impact vectors, totals and trajectories
    """
    d = spec.dimension
    per_source = np.array([impact_infinite(spec, i) for i in range(d)])
    totals = per_source.sum(axis=1)
    trajectories = None
    if horizon is not None:
        trajectories = np.array([
            impact_trajectory(spec, i, horizon) for i in range(d)
        ])
    return ImpactResult(
        per_source=per_source,
        totals=totals,
        average_total=float(totals.sum() / d),
        trajectories=trajectories,
        sector_names=tuple(sector_names) if sector_names is not None
        else default_sector_names(d)
    )


def rank_sectors(impact):
    """Order source lines by total impact, upstream first

    Args:
        impact (ImpactResult): Result of impact_analysis

    Returns:
        (list): (line index, total impact) pairs, descending by total; ties
            keep index order
    """
    if impact.per_source is None or impact.totals is None:
        raise DomainError("ImpactResult has no per-source impacts")
    order = sorted(
        range(len(impact.totals)),
        key=lambda i: (-impact.totals[i], i)
    )
    return [(i, float(impact.totals[i])) for i in order]


def export_network(s, names=None, *, threshold=0.0):
    """Directed edge list of the interaction network

    Args:
        s (any): InteractionMatrix or square array
        names (list): Line names, defaults to line1..lineD

        threshold (float): Only entries strictly above this are edges

    Returns:
        (list): Records (source_name, target_name, weight), one per edge
            j -> i with weight S[i, j], ordered by source then target
    """
    a = s.s if isinstance(s, InteractionMatrix) else InteractionMatrix(s).s
    names = list(names) if names is not None \
        else list(default_sector_names(a.shape[0]))
    if len(names) != a.shape[0]:
        raise DomainError("Got {} names for a {}-line network".format(
            len(names), a.shape[0]))
    edges = []
    for j in range(a.shape[1]):
        for i in range(a.shape[0]):
            if a[i, j] > threshold:
                edges.append((names[j], names[i], float(a[i, j])))
    return edges


def to_digraph(s, names=None, *, threshold=0.0):
    """The interaction network as a networkx DiGraph with 'weight' edges"""
    a = s.s if isinstance(s, InteractionMatrix) else InteractionMatrix(s).s
    names = list(names) if names is not None \
        else list(default_sector_names(a.shape[0]))
    graph = nx.DiGraph()
    graph.add_nodes_from(names)
    graph.add_weighted_edges_from(export_network(a, names,
                                                 threshold=threshold))
    return graph


def monte_carlo_impact(
        spec,
        source,
        *,
        n_paths=100000,
        horizon=200,
        seed=0,
        batch_size=20000,
        verbose=False
):
    """Estimate the impact of one event by paired simulation

    Shocked and unshocked paths share their random numbers; see
    senbd_methods.utils.rollout.paired_rollout.

    Args:
        spec (ModelSpec): The model
        source (int): Index of the shocked line

        n_paths (int): Number of path pairs
        horizon (int): Periods simulated after the shock
        seed (int): Random seed
        batch_size (int): Path pairs simulated at once
        verbose (bool): Show progress information

    Returns:
        (numpy array): Mean added events per line
        (numpy array): Monte-Carlo standard errors of those means
    """
    from .utils.rollout import paired_rollout

    source = _check_source(spec, source)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), source]))
    added = paired_rollout(
        spec,
        source,
        n_paths,
        horizon,
        rng,
        batch_size=batch_size,
        verbose=verbose
    )
    mean = added.mean(axis=0)
    stderr = added.std(axis=0, ddof=1) / np.sqrt(max(n_paths, 1))
    return mean, stderr
