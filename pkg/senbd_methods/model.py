# -*- coding: utf-8 -*-
"""Domain types for discrete self-exciting NBD and Hawkes count processes

A model is described by a baseline mean vector M0, a dispersion shape vector
K0 (with an explicit per-line flag for Poisson, i.e. Hawkes, lines), a matrix
of interaction scales L0 and a vector of geometric decay rates r. Line i is
excited by line j through the factor M0[i] / L0[i, j]; an absent edge is an
infinite L0 entry.

Copyright 2018 Aaron Snoswell
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


class Family(enum.Enum):
    """The model families that can be simulated and fitted"""

    MD_SE_NBD = "MD_SE_NBD"
    MD_HAWKES = "MD_HAWKES"
    SE_NBD = "SE_NBD"
    HAWKES = "HAWKES"
    NBD = "NBD"
    HYBRID = "HYBRID"

    @classmethod
    def parse(cls, value):
        """Look up a family from a string like 'md-se-nbd' or 'MD_SE_NBD'"""
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            raise DomainError("Unknown model family: {}".format(value))

    @property
    def is_multidimensional(self):
        return self in (Family.MD_SE_NBD, Family.MD_HAWKES, Family.HYBRID)

    @property
    def is_self_exciting(self):
        return self is not Family.NBD


# Families in the order of the model comparison table
COMPARISON_FAMILIES = (
    Family.MD_SE_NBD,
    Family.MD_HAWKES,
    Family.SE_NBD,
    Family.HAWKES,
    Family.NBD
)

# Marker accepted in place of a K0 value for Poisson (Hawkes) lines
INFINITE = "inf"


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _parse_dispersion(dispersion_shape):
    """Split a K0 vector into finite values and a Poisson-line flag vector"""
    values = []
    poisson = []
    for k in dispersion_shape:
        if k is None or (isinstance(k, str) and k.strip().lower() in
                         ("inf", "infinite", "infinity", "hawkes", "poisson")):
            values.append(np.inf)
            poisson.append(True)
        else:
            k = float(k)
            values.append(k)
            poisson.append(bool(np.isinf(k)))
    return values, poisson


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Full parameterisation of one model

    Attributes:
        family (Family): Model family
        baseline_mean (numpy array): Baseline means M0, shape (D,)
        dispersion_shape (numpy array): Shapes K0, shape (D,). Poisson lines
            hold np.inf here, but are identified by poisson_lines.
        interaction_scale (numpy array): L0, shape (D, D). Entry (i, j)
            scales the influence of line j on line i; np.inf is no edge.
        decay (numpy array): Kernel decay rates r, shape (D,), in [0, 1)
        poisson_lines (numpy array): Boolean flag per line, True where the
            line is Poisson (Hawkes) rather than NBD
    """

    family: Family
    baseline_mean: np.ndarray
    dispersion_shape: np.ndarray
    interaction_scale: np.ndarray
    decay: np.ndarray
    poisson_lines: np.ndarray = field(default=None)

    def __post_init__(self):
        family = Family.parse(self.family)
        object.__setattr__(self, "family", family)

        m0 = np.atleast_1d(np.array(self.baseline_mean, dtype=float))
        d = m0.shape[0]
        if m0.ndim != 1 or d < 1:
            raise DomainError("baseline_mean must be a non-empty vector")

        k0, flagged = _parse_dispersion(np.atleast_1d(
            np.array(self.dispersion_shape, dtype=object)
        ))
        k0 = np.array(k0, dtype=float)
        if self.poisson_lines is not None:
            flagged = np.array(self.poisson_lines, dtype=bool) | flagged
        poisson = np.array(flagged, dtype=bool)

        l0 = np.array(self.interaction_scale, dtype=float)
        if l0.ndim == 0:
            l0 = np.full((d, d), float(l0))
        r = np.atleast_1d(np.array(self.decay, dtype=float))

        if k0.shape != (d,) or poisson.shape != (d,):
            raise DomainError(
                "dispersion_shape has length {}, expected {}".format(
                    k0.shape[0], d))
        if l0.shape != (d, d):
            raise DomainError(
                "interaction_scale has shape {}, expected {}".format(
                    l0.shape, (d, d)))
        if r.shape != (d,):
            raise DomainError(
                "decay has length {}, expected {}".format(r.shape[0], d))

        if np.any(~np.isfinite(m0)) or np.any(m0 < 0):
            raise DomainError(
                "baseline_mean must be finite and >= 0, got {}".format(m0))
        if np.any(k0[~poisson] <= 0) or np.any(np.isnan(k0)):
            raise DomainError(
                "dispersion_shape must be > 0, got {}".format(k0))
        if np.any(np.isnan(l0)) or np.any(l0 <= 0):
            raise DomainError(
                "interaction_scale entries must lie in (0, inf]")
        if np.any(np.isnan(r)) or np.any(r < 0) or np.any(r >= 1):
            raise DomainError(
                "decay rates must lie in [0, 1), got {}".format(r))

        off_diagonal = ~np.eye(d, dtype=bool)
        if family is Family.NBD and np.any(np.isfinite(l0)):
            raise DomainError("Family NBD has no interactions; all L0 "
                              "entries must be inf")
        if family in (Family.SE_NBD, Family.HAWKES) \
                and np.any(np.isfinite(l0[off_diagonal])):
            raise DomainError("Family {} has no cross-line interactions; "
                              "off-diagonal L0 entries must be inf".format(
                                  family.value))
        if family in (Family.HAWKES, Family.MD_HAWKES):
            poisson = np.ones(d, dtype=bool)
        if family in (Family.SE_NBD, Family.MD_SE_NBD, Family.NBD) \
                and np.any(poisson):
            raise DomainError("Family {} has NBD lines only; got an infinite "
                              "K0".format(family.value))
        k0 = np.where(poisson, np.inf, k0)

        object.__setattr__(self, "baseline_mean", _readonly(m0))
        object.__setattr__(self, "dispersion_shape", _readonly(k0))
        object.__setattr__(self, "interaction_scale", _readonly(l0))
        object.__setattr__(self, "decay", _readonly(r))
        object.__setattr__(self, "poisson_lines", _readonly(poisson, bool))

    @property
    def dimension(self):
        return self.baseline_mean.shape[0]

    @property
    def excitation(self):
        """Matrix of one-step excitation factors M0[i] / L0[i, j]

        For family NBD the decay is ignored and this is the zero matrix.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            e = self.baseline_mean[:, None] / self.interaction_scale
        return np.where(np.isfinite(self.interaction_scale), e, 0.0)

    @property
    def effective_decay(self):
        """Decay rates with the NBD family's unused decay zeroed"""
        if self.family is Family.NBD:
            return np.zeros(self.dimension)
        return np.array(self.decay)

    @property
    def dispersion_scale(self):
        """The invariant ratio M0 / K0 (zero on Poisson lines)"""
        with np.errstate(divide="ignore", invalid="ignore"):
            s = self.baseline_mean / self.dispersion_shape
        return np.where(self.poisson_lines, 0.0, s)

    @property
    def active_edges(self):
        """Set of (i, j) with a finite interaction scale"""
        rows, cols = np.nonzero(np.isfinite(self.interaction_scale))
        return frozenset(zip(rows.tolist(), cols.tolist()))

    @classmethod
    def from_reproduction(
            cls,
            family,
            baseline_mean,
            dispersion_shape,
            reproduction,
            decay,
            *,
            poisson_lines=None
    ):
        """Build a spec from the matrix S of effective reproduction numbers

        S[i, j] = (M0[i] / L0[i, j]) / (1 - r[i]), so L0 is recovered as
        M0[i] / (S[i, j] (1 - r[i])). Zero entries of S become absent edges.

        Args:
            family (any): Model family or its name
            baseline_mean (list): Baseline means M0
            dispersion_shape (list): Shapes K0, 'inf' for Poisson lines
            reproduction (numpy array): D x D matrix S
            decay (list): Decay rates r

            poisson_lines (list): Optional explicit Poisson-line flags

        Returns:
            (ModelSpec): The equivalent spec
        """
        m0 = np.atleast_1d(np.array(baseline_mean, dtype=float))
        r = np.atleast_1d(np.array(decay, dtype=float))
        s = np.atleast_2d(np.array(reproduction, dtype=float))
        if s.shape != (m0.shape[0], m0.shape[0]):
            raise DomainError("reproduction matrix has shape {}, expected "
                              "{}".format(s.shape, (m0.shape[0],) * 2))
        if np.any(s < 0) or np.any(~np.isfinite(s)):
            raise DomainError("reproduction numbers must be finite and >= 0")
        if np.any((s > 0) & (m0[:, None] <= 0)):
            raise DomainError("A line with M0 = 0 cannot carry a nonzero "
                              "reproduction number")
        with np.errstate(divide="ignore", invalid="ignore"):
            l0 = m0[:, None] / (s * (1.0 - r)[:, None])
        l0 = np.where(s > 0, l0, np.inf)
        return cls(
            family=family,
            baseline_mean=m0,
            dispersion_shape=dispersion_shape,
            interaction_scale=l0,
            decay=r,
            poisson_lines=poisson_lines
        )

    def to_dict(self):
        """Plain-python representation, 'inf' for infinite entries"""

        def _enc(a):
            return [_enc(x) for x in a] if np.ndim(a) else \
                (INFINITE if np.isinf(a) else float(a))

        return {
            "family": self.family.value,
            "baseline_mean": _enc(self.baseline_mean),
            "dispersion_shape": _enc(self.dispersion_shape),
            "interaction_scale": _enc(self.interaction_scale),
            "decay": _enc(self.decay),
            "poisson_lines": [bool(p) for p in self.poisson_lines]
        }


@dataclass(frozen=True, eq=False)
class ProcessState:
    """Conditional state of a process after t periods

    The geometric kernel makes the process Markov in (M_t, K_t), so the only
    history kept is the most recent count vector.

    Attributes:
        t (int): Number of periods observed so far
        m (numpy array): Conditional means M_t, shape (D,)
        k (numpy array): Conditional shapes K_t, shape (D,), inf on Poisson
            lines
        last_counts (numpy array): Counts of period t, shape (D,)
    """

    t: int
    m: np.ndarray
    k: np.ndarray
    last_counts: np.ndarray


def initial_state(spec):
    """The unconditional starting state (M0, K0) with empty history"""
    return ProcessState(
        t=0,
        m=_readonly(spec.baseline_mean),
        k=_readonly(spec.dispersion_shape),
        last_counts=_readonly(np.zeros(spec.dimension, dtype=np.int64),
                              np.int64)
    )


@dataclass(frozen=True, eq=False)
class EventSeries:
    """A T x D matrix of event counts

    Attributes:
        counts (numpy array): Nonnegative integer counts, shape (T, D)
        sector_names (tuple): One name per line

        labels (tuple): Optional period identifiers, one per row
    """

    counts: np.ndarray
    sector_names: tuple
    labels: tuple = None

    def __post_init__(self):
        raw = np.asarray(self.counts)
        if raw.ndim != 2:
            raise DomainError("counts must be a T x D matrix")
        if raw.size and not np.all(np.isfinite(raw.astype(float))):
            raise DomainError("counts must be finite")
        if raw.size and np.any(raw.astype(float) != np.round(raw.astype(
                float))):
            raise DomainError("counts must be integral")
        counts = raw.astype(np.int64)
        if np.any(counts < 0):
            raise DomainError("counts must be >= 0")
        names = tuple(str(n) for n in self.sector_names)
        if len(names) != counts.shape[1]:
            raise DomainError("Got {} sector names for {} columns".format(
                len(names), counts.shape[1]))
        labels = self.labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != counts.shape[0]:
                raise DomainError("Got {} labels for {} rows".format(
                    len(labels), counts.shape[0]))
        object.__setattr__(self, "counts", _readonly(counts, np.int64))
        object.__setattr__(self, "sector_names", names)
        object.__setattr__(self, "labels", labels)

    @property
    def length(self):
        return self.counts.shape[0]

    @property
    def dimension(self):
        return self.counts.shape[1]

    def permuted(self, order):
        """Reorder the lines of the series"""
        order = list(order)
        return EventSeries(
            counts=self.counts[:, order],
            sector_names=[self.sector_names[i] for i in order],
            labels=self.labels
        )

    def head(self, n):
        """The first n periods"""
        return EventSeries(
            counts=self.counts[:n],
            sector_names=self.sector_names,
            labels=None if self.labels is None else self.labels[:n]
        )


def default_sector_names(d):
    return tuple("line{}".format(i + 1) for i in range(d))


# Sector names of the 13-sector default portfolio
SECTORS_13 = (
    "building",
    "consumer",
    "energy",
    "financial_institutions",
    "health",
    "hitech",
    "insurance",
    "leisure",
    "metal",
    "real_estate",
    "telecommunication",
    "transport",
    "utility"
)

# Fitted MD-SE-NBD point estimates per sector: K0, M0/K0 and the nonzero
# reproduction numbers S[i, j] as {j: value}, sectors numbered from 1
_SECTOR_NETWORK = (
    (0.41, 0.82, {1: 0.21, 8: 0.25}),
    (1.12, 0.78, {2: 0.51, 4: 0.29, 6: 0.77, 7: 0.41}),
    (0.00, 0.00, {3: 0.86, 4: 0.17, 7: 0.51}),
    (0.00, 0.38, {4: 0.53, 1: 0.28, 8: 0.14}),
    (0.48, 0.04, {5: 0.17, 2: 0.10, 8: 0.14}),
    (1.75, 0.05, {6: 0.12, 3: 0.04, 7: 0.29, 10: 0.19, 11: 0.12}),
    (0.30, 0.47, {7: 0.00, 8: 0.11}),
    (0.35, 0.82, {8: 0.20, 4: 0.39, 5: 0.76, 10: 1.38}),
    (0.74, 0.78, {9: 0.30, 5: 0.41, 11: 0.48}),
    (23.84, 0.00, {10: 0.54, 4: 0.08}),
    (0.00, 0.38, {11: 0.44, 8: 0.07, 9: 0.12, 13: 0.39}),
    (4.45, 0.04, {12: 0.25, 2: 0.09, 8: 0.09}),
    (0.02, 0.73, {13: 0.07, 11: 0.22, 12: 0.24}),
)


def sector_network_reproduction():
    """The 13 x 13 reproduction matrix S of the fitted sector network"""
    s = np.zeros((13, 13))
    for i, (_, _, row) in enumerate(_SECTOR_NETWORK):
        for j, value in row.items():
            s[i, j - 1] = value
    return s


def sector_network_spec(*, decay=0.5, floor=0.01):
    """Fitted 13-sector MD-SE-NBD network as synthetic ground truth

    The published point estimates round several K0 and M0/K0 values to 0.00
    and do not report decay rates, so the rounded zeros are replaced by
    `floor` and every line gets the same decay.

    Args:
        decay (float): Decay rate r used for every line
        floor (float): Replacement for K0 and M0/K0 entries reported as zero

    Returns:
        (ModelSpec): A 13-line MD_SE_NBD spec
    """
    k0 = np.array([max(k, floor) for k, _, _ in _SECTOR_NETWORK])
    ratio = np.array([max(q, floor) for _, q, _ in _SECTOR_NETWORK])
    return ModelSpec.from_reproduction(
        Family.MD_SE_NBD,
        k0 * ratio,
        k0,
        sector_network_reproduction(),
        np.full(13, float(decay))
    )
