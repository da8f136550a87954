# -*- coding: utf-8 -*-
"""Branching-process view of the count process

Every event triggers a random number of direct offspring events. For an NBD
line one event adds K0/L0 r^(s-1) to the Gamma shape of period s, and by
the reproductive property of the NBD the offspring summed over all later
periods are NBD with shape K0 / (L0 (1 - r)) and scale M0/K0, so the mean
offspring number is the reproduction number S. A Poisson line has
Poisson(S) offspring. With r = 0 only the next period is excited and the
offspring law is NBD(K0/L0, M0/K0).

Copyright 2018 Aaron Snoswell
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from .errors import DomainError, StationarityError
from .utils.fixed_point import fixed_point


logger = logging.getLogger(__name__)


class OffspringKind(enum.Enum):
    NBD = "NBD"
    POISSON = "POISSON"


@dataclass(frozen=True)
class OffspringLaw:
    """Distribution of the number of direct offspring of one event

    Attributes:
        kind (OffspringKind): NBD or POISSON
        mean (float): Mean number of offspring, > 0
        shape (float): NBD shape (None for POISSON)
        scale (float): NBD scale (None for POISSON)
    """

    kind: OffspringKind
    mean: float
    shape: float = None
    scale: float = None

    def __post_init__(self):
        kind = self.kind if isinstance(self.kind, OffspringKind) \
            else OffspringKind(str(self.kind).upper())
        object.__setattr__(self, "kind", kind)
        if kind is OffspringKind.NBD:
            if self.shape is None or self.scale is None \
                    or not self.shape > 0 or not self.scale > 0:
                raise DomainError("NBD offspring needs shape > 0 and scale > "
                                  "0, got {}, {}".format(self.shape,
                                                          self.scale))
            mean = float(self.shape) * float(self.scale)
            if self.mean is not None and not np.isclose(self.mean, mean,
                                                        rtol=1e-12):
                raise DomainError("NBD offspring mean {} != shape * scale "
                                  "{}".format(self.mean, mean))
            object.__setattr__(self, "mean", mean)
        elif self.mean is None or not self.mean > 0:
            raise DomainError("Offspring mean must be > 0, got {}".format(
                self.mean))

    @classmethod
    def nbd(cls, shape, scale):
        return cls(OffspringKind.NBD, None, float(shape), float(scale))

    @classmethod
    def poisson(cls, mean):
        return cls(OffspringKind.POISSON, float(mean))

    def with_mean(self, mean):
        """Same family and scale, different mean"""
        if self.kind is OffspringKind.POISSON:
            return OffspringLaw.poisson(mean)
        return OffspringLaw.nbd(mean / self.scale, self.scale)


def offspring_law_from_spec(spec, line=0):
    """Offspring law of one line of a model, ignoring cross-excitation

    Args:
        spec (ModelSpec): The model
        line (int): Line index

    Returns:
        (OffspringLaw): NBD(K0/(L0 (1 - r)), M0/K0) or Poisson(S) offspring
            of line `line` exciting itself
    """
    line = int(line)
    if not 0 <= line < spec.dimension:
        raise DomainError("Line {} out of range".format(line))
    excitation = spec.excitation[line, line]
    if not excitation > 0:
        raise DomainError("Line {} does not excite itself".format(line))
    r = spec.effective_decay[line]
    mean = excitation / (1.0 - r)
    if spec.poisson_lines[line]:
        return OffspringLaw.poisson(mean)
    scale = spec.dispersion_scale[line]
    return OffspringLaw.nbd(mean / scale, scale)


def pgf(law, x):
    """Probability generating function f(x) = E[x^Y] of the offspring law"""
    x = np.asarray(x, dtype=float)
    if law.kind is OffspringKind.POISSON:
        return np.exp(law.mean * (x - 1.0))
    return np.power(1.0 + law.scale * (1.0 - x), -law.shape)


def pgf_derivative(law, x):
    """First derivative f'(x) of the probability generating function"""
    x = np.asarray(x, dtype=float)
    if law.kind is OffspringKind.POISSON:
        return law.mean * np.exp(law.mean * (x - 1.0))
    return law.shape * law.scale * np.power(1.0 + law.scale * (1.0 - x),
                                            -law.shape - 1.0)


def pgf_curvature(law):
    """Second derivative f''(1), the second factorial moment"""
    if law.kind is OffspringKind.POISSON:
        return law.mean ** 2
    return law.shape * (law.shape + 1.0) * law.scale ** 2


def extinction_probability(law, *, tol=1e-12, max_iterations=None):
    """Probability that the offspring of one event eventually die out

    The smallest root of x = f(x) in [0, 1], found by Newton iteration on
    f(x) - x from x = 0. f is convex with f'(x) < 1 below that root, so the
    iterates climb monotonically to it. Subcritical and critical laws
    (mean <= 1) die out with certainty and return exactly 1.

    At mean 1 + epsilon the root is ill-conditioned: rounding leaves an
    absolute error of about 1e-16 / epsilon, so survival probabilities
    below epsilon ~ 1e-7 carry a visible relative error.

    Args:
        law (OffspringLaw): Offspring law

        tol (float): Stop when an iteration changes x by less than this
        max_iterations (int): Iteration cap, None for no cap

    Returns:
        (float): The extinction probability
    """
    if law.mean <= 1.0:
        return 1.0

    def newton(x):
        gap = float(pgf(law, x)) - x
        # Rounding puts f(x) - x <= 0 once x reaches the root
        if gap <= 0:
            return x
        return min(x + gap / (1.0 - float(pgf_derivative(law, x))), 1.0)

    x, _ = fixed_point(
        newton,
        0.0,
        tol=tol,
        max_iterations=max_iterations,
        name="extinction probability"
    )
    return float(x)


def survival_curve(law, epsilons):
    """Survival probabilities of slightly supercritical laws

    For each epsilon the law is moved to mean 1 + epsilon (keeping its
    scale), and 1 - extinction_probability is returned. Near criticality
    survival grows linearly, survival / epsilon -> 2 / f''(1).

    Args:
        law (OffspringLaw): Offspring law setting the family and scale
        epsilons (list): Distances above criticality, >= 0

    Returns:
        (list): Survival probability per epsilon
    """
    curve = []
    for eps in epsilons:
        if eps < 0:
            raise DomainError("epsilon must be >= 0, got {}".format(eps))
        curve.append(1.0 - extinction_probability(law.with_mean(1.0 + eps)))
    return curve


def critical_survival_slope(law):
    """Limit of survival / epsilon at criticality, 2 / f''(1) at mean 1"""
    return 2.0 / pgf_curvature(law.with_mean(1.0))


def branching_total_progeny_mean(law):
    """Expected number of descendants of one event

    Args:
        law (OffspringLaw): Subcritical offspring law

    Returns:
        (float): mean / (1 - mean), the added events of one shock
    """
    if law.mean >= 1.0:
        raise StationarityError(
            "Offspring mean {:.6g} >= 1; the expected progeny is "
            "infinite".format(law.mean),
            rho=law.mean
        )
    return law.mean / (1.0 - law.mean)


def _draw_offspring(law, parents, rng):
    """Total offspring of each tree's current generation"""
    if law.kind is OffspringKind.POISSON:
        return rng.poisson(law.mean * parents)
    # Sums of iid NBD(shape, scale) are NBD(n shape, scale)
    intensity = rng.gamma(shape=np.maximum(law.shape * parents, 0.0),
                          scale=law.scale)
    return rng.poisson(intensity)


def simulate_branching(
        law,
        n_trees,
        seed,
        *,
        max_generations=100000,
        survival_cap=1000,
        verbose=False
):
    """Simulate Galton-Watson trees grown from single events

    All trees grow one generation at a time. A tree whose generation size
    reaches survival_cap is declared surviving and stops growing; for a
    supercritical law its extinction probability from there is
    q^survival_cap.

    Args:
        law (OffspringLaw): Offspring law
        n_trees (int): Number of trees
        seed (int): Random seed

        max_generations (int): Generation cap
        survival_cap (int): Generation size treated as survival
        verbose (bool): Show a progress bar

    Returns:
        (numpy array): Descendants of the root per tree (root excluded),
            counted up to extinction or the cap
        (numpy array): Boolean per tree, True if the tree died out
    """
    rng = np.random.default_rng(seed)
    n_trees = int(n_trees)
    parents = np.ones(n_trees, dtype=np.int64)
    descendants = np.zeros(n_trees, dtype=np.int64)
    alive = np.ones(n_trees, dtype=bool)

    with tqdm(total=n_trees, disable=not verbose,
              desc="branching") as progress:
        for generation in range(int(max_generations)):
            idx = np.flatnonzero(alive)
            if idx.size == 0:
                break
            children = _draw_offspring(law, parents[idx], rng)
            descendants[idx] += children
            parents[idx] = children

            done = (children == 0) | (children >= survival_cap)
            alive[idx[done]] = False
            progress.update(int(np.sum(done)))
        else:
            logger.warning("%d trees still growing after %d generations",
                           int(np.sum(alive)), max_generations)

    extinct = parents == 0
    return descendants, extinct
