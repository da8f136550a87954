# -*- coding: utf-8 -*-
"""Bounded maximum likelihood (uniform-prior MAP) fitting and model comparison

The log-likelihood of a series is the sum of one-step conditional
log-probabilities, and it splits into one term per line: line i's term only
involves line i's own parameters (M0, K0, r and the reproduction numbers
S[i, j] of its incoming edges). Every fit is therefore carried out line by
line.

Free parameters counted per line for the AIC:

    M0                      1
    K0                      1 (NBD lines only; not for Poisson/Hawkes lines)
    r                       1 (self-exciting families only)
    S[i, j], (i, j) active  1 each

so a single SE-NBD line has 4, a Hawkes line 3 and a plain NBD line 2.

Copyright 2018 Aaron Snoswell
"""

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal
from tqdm import tqdm

from .errors import DomainError, SENBDError
from .model import Family, ModelSpec, EventSeries
from .process import nbd_logpmf, poisson_logpmf, _shape_excitation
from .utils.rng import make_streams
from .utils.transform import make_box_transform


logger = logging.getLogger(__name__)

# Returned by the objective in place of non-finite negative log-likelihoods
_INVALID = 1e300

# Lower bound on M0 for multidimensional families, standing in for zero
BASELINE_FLOOR = 1e-10

# Default box of the uniform prior. baseline_mean's upper bound is data
# dependent: max(10 * max observed count, 1).
DEFAULT_BOUNDS = {
    "baseline_mean": (1e-6, None),
    "dispersion_shape": (1e-3, 1e7),
    "decay": (0.0, 0.99),
    "self_reproduction": (0.0, 0.999),
    "cross_reproduction": (0.0, 2.0)
}


class EdgeSelection(enum.Enum):
    """How the interaction edges of a multidimensional fit are chosen"""

    DIAGONAL_ONLY = "diagonal_only"
    FULL_MATRIX = "full_matrix"
    GREEDY_AIC = "greedy_aic"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError("Unknown edge selection: {}".format(value))


@dataclass(frozen=True)
class FitConfig:
    """Settings for one fit

    Attributes:
        family (Family): Model family to fit

        bounds (dict): Overrides of DEFAULT_BOUNDS, mapping a parameter group
            name to a (lower, upper) pair
        multistart (int): Number of optimizer starts per line
        tolerance (float): Absolute convergence tolerance on the
            log-likelihood
        edge_selection (EdgeSelection): Edge set of multidimensional fits
        max_iterations (int): Optimizer iteration cap per start, None for
            the optimizer's default
        seed (int): Random seed for the starting points
        hawkes_lines (frozenset): Indices or names of lines fitted as Poisson
            lines; HYBRID family only
        threads (int): Number of worker threads for the starts
        moment_start (bool): Make the first start a moment-based guess
            instead of a random point
    """

    family: Family
    bounds: dict = field(default_factory=dict)
    multistart: int = 16
    tolerance: float = 1e-8
    edge_selection: EdgeSelection = EdgeSelection.GREEDY_AIC
    max_iterations: int = None
    seed: int = 0
    hawkes_lines: frozenset = frozenset()
    threads: int = 1
    moment_start: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "edge_selection",
                           EdgeSelection.parse(self.edge_selection))
        object.__setattr__(self, "hawkes_lines",
                           frozenset(self.hawkes_lines or ()))
        if int(self.multistart) < 1:
            raise DomainError("multistart must be >= 1, got {}".format(
                self.multistart))
        if int(self.threads) < 1:
            raise DomainError("threads must be >= 1, got {}".format(
                self.threads))
        if not self.tolerance > 0:
            raise DomainError("tolerance must be > 0, got {}".format(
                self.tolerance))
        for name, pair in self.bounds.items():
            if name not in DEFAULT_BOUNDS:
                raise DomainError("Unknown bound group: {}".format(name))
            low, high = pair
            if high is not None and not low < high:
                raise DomainError("Bound {} needs lower < upper, got "
                                  "{}".format(name, pair))
        if self.hawkes_lines and self.family is not Family.HYBRID:
            raise DomainError("hawkes_lines is only used by family HYBRID")

    def bound(self, name):
        """(lower, upper) of a parameter group after overrides"""
        return tuple(self.bounds.get(name, DEFAULT_BOUNDS[name]))


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a fit

    Attributes:
        spec (ModelSpec): Estimated model
        log_likelihood (float): Maximised log-likelihood
        aic (float): 2 n_params - 2 log_likelihood
        n_params (int): Number of free parameters
        converged (bool): False if no start improved on its initial point
        starts_summary (tuple): Final log-likelihood of every start, summed
            over lines
        active_edges (frozenset): Selected (i, j) edges, 0-based
        reproduction (numpy array): Estimated D x D matrix S
    """

    spec: ModelSpec
    log_likelihood: float
    aic: float
    n_params: int
    converged: bool
    starts_summary: tuple
    active_edges: frozenset
    reproduction: np.ndarray = None


@dataclass(frozen=True, eq=False)
class AICRow:
    """One row of a model comparison table

    A row whose fit raised carries the error message and NaN scores.
    """

    family: Family
    aic: float
    log_likelihood: float
    n_params: int
    result: FitResult = None
    error: str = None

    @property
    def failed(self):
        return self.error is not None


def _as_counts(series, d=None):
    counts = series.counts if isinstance(series, EventSeries) \
        else np.asarray(series)
    if counts.ndim != 2:
        raise DomainError("counts must be a T x D matrix")
    if d is not None and counts.shape[1] != d:
        raise DomainError("Series has {} lines, spec has {}".format(
            counts.shape[1], d))
    return np.asarray(counts, dtype=float)


def _lagged_filter(inputs, decay):
    """Geometric filter of the inputs, lagged by one period

    Returns y with y[0] = 0 and y[t] = decay * y[t - 1] + inputs[t - 1], the
    excitation accumulated from periods before t.
    """
    y = np.zeros_like(inputs)
    if inputs.shape[0] > 1:
        y[1:] = signal.lfilter([1.0], [1.0, -float(decay)], inputs[:-1])
    return y


def _line_terms(x, m0, k0, decay, inputs, shape_inputs, poisson):
    """Per-period log-probabilities of one line"""
    means = m0 + _lagged_filter(inputs, decay)
    with np.errstate(divide="ignore", invalid="ignore"):
        if poisson:
            return poisson_logpmf(x, means)
        shapes = k0 + _lagged_filter(shape_inputs, decay)
        return nbd_logpmf(x, shapes, m0 / k0)


def line_log_likelihood(series, spec, line):
    """Log-likelihood term of a single line

    Args:
        series (EventSeries): Observed counts
        spec (ModelSpec): Model
        line (int): Line index

    Returns:
        (float): Sum over periods of log P(X_t[line] | history), -inf if an
            observed count is impossible
    """
    counts = _as_counts(series, spec.dimension)
    line = int(line)
    if not 0 <= line < spec.dimension:
        raise DomainError("Line {} out of range".format(line))
    if counts.shape[0] == 0:
        return 0.0
    terms = _line_terms(
        counts[:, line],
        spec.baseline_mean[line],
        spec.dispersion_shape[line],
        spec.effective_decay[line],
        counts @ spec.excitation[line],
        counts @ _shape_excitation(spec)[line],
        bool(spec.poisson_lines[line])
    )
    total = float(np.sum(terms))
    return total if not np.isnan(total) else -np.inf


def log_likelihood(series, spec):
    """Log-likelihood of a series under a model

    The first observation is scored against (M0, K0); later ones against the
    state left by the observed history. Impossible observations give -inf.

    Args:
        series (EventSeries): Observed counts
        spec (ModelSpec): Model

    Returns:
        (float): The log-likelihood
    """
    _as_counts(series, spec.dimension)
    return float(sum(
        line_log_likelihood(series, spec, i) for i in range(spec.dimension)
    ))


def count_parameters(family, edges, poisson_lines):
    """Number of free parameters of a fit

    Args:
        family (Family): Model family
        edges (iterable): Active (i, j) edges
        poisson_lines (numpy array): Poisson-line flag per line

    Returns:
        (int): Parameter count used by the AIC
    """
    family = Family.parse(family)
    poisson_lines = np.asarray(poisson_lines, dtype=bool)
    d = len(poisson_lines)
    n = d + int(np.sum(~poisson_lines))
    if family.is_self_exciting:
        n += d + len(set(edges))
    return n


class _LineProblem:
    """Negative log-likelihood of one line over search coordinates

    Search vector layout: [log M0, (log K0), (r), S[i, sources]...], where
    K0 is absent on Poisson lines and r and S are absent for family NBD.
    """

    def __init__(self, counts, line, sources, family, poisson, config):
        self.x = counts[:, line]
        self.sources = list(sources)
        self.inputs = counts[:, self.sources]
        self.poisson = bool(poisson)
        self.self_exciting = family.is_self_exciting

        m_low, m_high = config.bound("baseline_mean")
        if family.is_multidimensional and "baseline_mean" not in \
                config.bounds:
            m_low = BASELINE_FLOOR
        if m_high is None:
            m_high = max(10.0 * float(np.max(self.x, initial=0.0)), 1.0)

        lower, upper, log_scale = [m_low], [m_high], [True]
        if not self.poisson:
            low, high = config.bound("dispersion_shape")
            lower.append(low)
            upper.append(high)
            log_scale.append(True)
        if self.self_exciting:
            low, high = config.bound("decay")
            lower.append(low)
            upper.append(high)
            log_scale.append(False)
            for j in self.sources:
                low, high = config.bound(
                    "self_reproduction" if j == line else "cross_reproduction"
                )
                lower.append(low)
                upper.append(high)
                log_scale.append(False)

        self.lower = np.array(lower, dtype=float)
        self.upper = np.array(upper, dtype=float)
        self.to_search, self.from_search, self.bounds, self.sample = \
            make_box_transform(self.lower, self.upper, log_scale)

    def unpack(self, params):
        """Model parameters (M0, K0, r, S row) from a parameter vector"""
        i = 0
        m0 = params[i]
        i += 1
        k0 = np.inf
        if not self.poisson:
            k0 = params[i]
            i += 1
        decay = 0.0
        s = np.zeros(len(self.sources))
        if self.self_exciting:
            decay = params[i]
            s = np.asarray(params[i + 1:])
        return m0, k0, decay, s

    def moment_guess(self, line):
        """Rough starting point from the sample mean and variance"""
        mean = float(np.mean(self.x)) if self.x.size else 0.0
        var = float(np.var(self.x)) if self.x.size else 0.0
        s = np.array([0.2 if j == line else 0.05 for j in self.sources])
        if not self.self_exciting:
            s = np.zeros(0)
        m0 = max(mean * (1.0 - float(np.sum(s))), self.lower[0])
        params = [m0]
        if not self.poisson:
            scale = max(var / mean - 1.0, 0.05) if mean > 0 else 1.0
            params.append(m0 / scale)
        if self.self_exciting:
            params.append(0.5)
            params.extend(s.tolist())
        return self.to_search(np.array(params))

    def line_log_likelihood(self, theta):
        m0, k0, decay, s = self.unpack(self.from_search(theta))
        if self.x.size == 0:
            return 0.0
        excitation = s * (1.0 - decay)
        inputs = self.inputs @ excitation if self.sources \
            else np.zeros_like(self.x)
        shape_inputs = inputs * (k0 / m0) if not self.poisson else None
        total = float(np.sum(_line_terms(
            self.x, m0, k0, decay, inputs, shape_inputs, self.poisson
        )))
        return total if np.isfinite(total) else -np.inf

    def __call__(self, theta):
        value = -self.line_log_likelihood(theta)
        return value if np.isfinite(value) else _INVALID


def _run_start(problem, x0, options):
    """One local optimisation; returns (initial ll, final ll, x)"""
    initial = problem.line_log_likelihood(x0)
    res = optimize.minimize(
        problem,
        x0,
        method="Nelder-Mead",
        bounds=problem.bounds,
        options=options
    )
    final = problem.line_log_likelihood(res.x)
    if final < initial or not np.isfinite(final):
        return initial, initial, np.array(x0)
    return initial, final, res.x


def _extend_params(base, base_sources, sources, poisson, self_exciting):
    """Parameter vector for `sources` from a fit on `base_sources`

    Reproduction numbers of sources absent from the base fit start at 0.
    """
    m0, k0, decay, row = base
    params = [m0]
    if not poisson:
        params.append(k0)
    if self_exciting:
        fitted = dict(zip(base_sources, row))
        params.append(decay)
        params.extend(float(fitted.get(j, 0.0)) for j in sources)
    return np.array(params, dtype=float)


def _fit_line(counts, line, sources, family, poisson, config, name, *,
              warm_start=None):
    """Fit one line from every start; returns the best and all start lls

    Args:
        warm_start (tuple): Optional (parameters, sources) of an earlier fit
            of this line. It replaces the last start, extended with zero
            reproduction numbers for the new sources, so the result is never
            worse than that fit.
    """
    problem = _LineProblem(counts, line, sources, family, poisson, config)

    # Starting points are drawn before any optimisation runs so they do not
    # depend on the number of threads
    rng = make_streams(config.seed, 1, key=name)[0]
    starts = [problem.sample(rng) for _ in range(int(config.multistart))]
    if config.moment_start:
        starts[0] = problem.moment_guess(line)
    if warm_start is not None:
        base, base_sources = warm_start
        starts[-1] = problem.to_search(_extend_params(
            base, base_sources, problem.sources, problem.poisson,
            problem.self_exciting
        ))

    options = {
        "xatol": 1e-6,
        "fatol": float(config.tolerance),
        "maxiter": config.max_iterations
    }

    if int(config.threads) > 1:
        with ThreadPoolExecutor(max_workers=int(config.threads)) as pool:
            runs = list(pool.map(
                lambda x0: _run_start(problem, x0, options),
                starts
            ))
    else:
        runs = [_run_start(problem, x0, options) for x0 in starts]

    finals = np.array([final for _, final, _ in runs])
    best = int(np.argmax(np.where(np.isnan(finals), -np.inf, finals)))
    improved = any(final > initial for initial, final, _ in runs)

    params = problem.unpack(problem.from_search(runs[best][2]))

    # The likelihood of equidispersed data keeps rising in K0, so move a fit
    # that stalled on the flat tail onto the upper bound
    if not problem.poisson:
        at_bound = _extend_params(params, problem.sources, problem.sources,
                                  False, problem.self_exciting)
        at_bound[1] = problem.upper[1]
        ll = problem.line_log_likelihood(problem.to_search(at_bound))
        if ll >= finals[best]:
            finals[best] = ll
            params = problem.unpack(at_bound)
    return params, finals, improved


def _resolve_poisson_lines(series, config):
    d = series.dimension
    family = config.family
    if family in (Family.HAWKES, Family.MD_HAWKES):
        return np.ones(d, dtype=bool)
    poisson = np.zeros(d, dtype=bool)
    for line in config.hawkes_lines:
        if isinstance(line, str) and not line.isdigit():
            if line not in series.sector_names:
                raise DomainError("Unknown hawkes line: {}".format(line))
            poisson[series.sector_names.index(line)] = True
        else:
            if not 0 <= int(line) < d:
                raise DomainError("hawkes line {} out of range".format(line))
            poisson[int(line)] = True
    return poisson


def _default_edges(family, d, edge_selection):
    if not family.is_self_exciting:
        return frozenset()
    if family.is_multidimensional \
            and edge_selection is EdgeSelection.FULL_MATRIX:
        return frozenset((i, j) for i in range(d) for j in range(d))
    return frozenset((i, i) for i in range(d))


def _sources(edges, line):
    return sorted(j for i, j in edges if i == line)


def _assemble(series, config, poisson, edges, line_fits):
    """Build the FitResult from per-line fits"""
    d = series.dimension
    family = config.family
    m0 = np.zeros(d)
    k0 = np.full(d, np.inf)
    decay = np.zeros(d)
    s = np.zeros((d, d))
    start_totals = np.zeros(int(config.multistart))
    improved = False
    for line, ((m, k, r, row), finals, line_improved) in enumerate(line_fits):
        m0[line] = m
        k0[line] = k
        decay[line] = r
        s[line, _sources(edges, line)] = row
        start_totals += finals
        improved = improved or line_improved

    spec = ModelSpec.from_reproduction(
        family,
        m0,
        [("inf" if p else k) for p, k in zip(poisson, k0)],
        s,
        decay,
        poisson_lines=poisson if family is Family.HYBRID else None
    )
    ll = log_likelihood(series, spec)
    n_params = count_parameters(family, edges, poisson)
    if not improved:
        logger.warning("No start improved on its initial point for the %s "
                       "fit", family.value)
    return FitResult(
        spec=spec,
        log_likelihood=ll,
        aic=2 * n_params - 2 * ll,
        n_params=n_params,
        converged=bool(improved),
        starts_summary=tuple(float(v) for v in start_totals),
        active_edges=frozenset(edges),
        reproduction=s
    )


def _check_fit_inputs(series, config):
    if not isinstance(series, EventSeries):
        raise DomainError("fit expects an EventSeries")
    if not isinstance(config, FitConfig):
        raise DomainError("fit expects a FitConfig")


def _warn_short(series, n_params):
    if series.length < 10 * n_params:
        logger.warning("Series has %d periods for %d parameters; estimates "
                       "may be unreliable", series.length, n_params)


def fit(series, config, *, verbose=False):
    """Fit a model family to a series

    Each line is fitted by a bounded Nelder-Mead search from
    config.multistart starting points, the first a moment-based guess and
    the rest drawn uniformly in the (log-scaled where positive) box. Line
    i's starting points come from a stream keyed by its sector name, so
    relabeling the lines relabels the fit.

    Args:
        series (EventSeries): Observed counts
        config (FitConfig): Fit settings

        verbose (bool): Show progress information

    Returns:
        (FitResult): The best fit found
    """
    _check_fit_inputs(series, config)
    family = config.family
    if family.is_multidimensional and \
            config.edge_selection is EdgeSelection.GREEDY_AIC:
        return select_edges_greedy(series, config, verbose=verbose)

    d = series.dimension
    poisson = _resolve_poisson_lines(series, config)
    edges = _default_edges(family, d, config.edge_selection)
    _warn_short(series, count_parameters(family, edges, poisson))

    counts = _as_counts(series)
    line_fits = []
    for line in tqdm(range(d), disable=not verbose, desc="fit"):
        line_fits.append(_fit_line(
            counts,
            line,
            _sources(edges, line),
            family,
            poisson[line],
            config,
            series.sector_names[line]
        ))
        if verbose:
            logger.info("Line %s: log-likelihood %.6f",
                        series.sector_names[line], np.max(line_fits[-1][1]))

    return _assemble(series, config, poisson, edges, line_fits)


def select_edges_greedy(series, config, *, verbose=False):
    """Fit with interaction edges chosen by forward AIC selection

    Starting from the diagonal-only fit, repeatedly add the single
    off-diagonal edge whose inclusion lowers the AIC the most, until no edge
    lowers it. Since the likelihood splits by line, a candidate edge (i, j)
    only needs line i refitted, and after an edge is accepted only the
    candidates of its target line change. Ties go to the smallest (i, j).

    Args:
        series (EventSeries): Observed counts
        config (FitConfig): Fit settings; the family must be
            multidimensional

        verbose (bool): Show progress information

    Returns:
        (FitResult): Fit with the selected edge set
    """
    _check_fit_inputs(series, config)
    family = config.family
    if not family.is_multidimensional:
        raise DomainError("Greedy edge selection needs a multidimensional "
                          "family, got {}".format(family.value))

    d = series.dimension
    counts = _as_counts(series)
    poisson = _resolve_poisson_lines(series, config)
    names = series.sector_names
    edges = set((i, i) for i in range(d))

    def fit_line(line, line_edges, base=None):
        warm_start = None
        if base is not None:
            warm_start = (base, _sources(edges, line))
        return _fit_line(counts, line, _sources(line_edges, line), family,
                         poisson[line], config, names[line],
                         warm_start=warm_start)

    line_fits = [fit_line(i, edges) for i in range(d)]
    line_ll = [float(np.max(f[1])) for f in line_fits]

    # candidates[(i, j)] = (line fit with edge added, its log-likelihood)
    candidates = {}

    def refresh(line):
        for key in [k for k in candidates if k[0] == line]:
            del candidates[key]
        for j in range(d):
            if (line, j) in edges:
                continue
            # Warm start from the accepted fit of the line
            trial = fit_line(line, edges | {(line, j)}, line_fits[line][0])
            candidates[(line, j)] = (trial, float(np.max(trial[1])))

    for line in range(d):
        refresh(line)

    while candidates:
        # Adding one edge adds one parameter
        gains = {
            key: 2.0 - 2.0 * (ll - line_ll[key[0]])
            for key, (_, ll) in candidates.items()
        }
        best = min(gains, key=lambda key: (gains[key], key))
        if not gains[best] < 0:
            break

        i, j = best
        edges.add(best)
        line_fits[i], line_ll[i] = candidates[best]
        if verbose:
            logger.info("Added edge %s -> %s, AIC change %.4f", names[j],
                        names[i], gains[best])
        refresh(i)

    _warn_short(series, count_parameters(family, edges, poisson))
    return _assemble(series, config, poisson, frozenset(edges), line_fits)


def aic_table(series, configs, *, verbose=False):
    """Fit several families and rank them by AIC

    Args:
        series (EventSeries): Observed counts
        configs (list): FitConfig per family

        verbose (bool): Show progress information

    Returns:
        (list): AICRow per config, ascending by AIC, ties broken by fewer
            parameters. Failed fits are listed last with NaN scores.
    """
    rows = []
    for config in tqdm(configs, disable=not verbose, desc="aic table"):
        try:
            result = fit(series, config, verbose=verbose)
            rows.append(AICRow(
                family=config.family,
                aic=float(result.aic),
                log_likelihood=float(result.log_likelihood),
                n_params=int(result.n_params),
                result=result
            ))
        except SENBDError as e:
            logger.warning("Fit of %s failed: %s", config.family.value, e)
            rows.append(AICRow(
                family=config.family,
                aic=float("nan"),
                log_likelihood=float("nan"),
                n_params=0,
                error="{}: {}".format(e.category, e)
            ))

    order = sorted(
        range(len(rows)),
        key=lambda k: (rows[k].failed, rows[k].aic if not rows[k].failed
                       else 0.0, rows[k].n_params, k)
    )
    return [rows[k] for k in order]
