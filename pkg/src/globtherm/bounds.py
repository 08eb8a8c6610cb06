"""Global and local precision bounds of spin-gas thermometry."""
import concurrent.futures
import functools
import logging
import math
from typing import Iterable, List, Sequence

import attr
import numpy as np
import numpy.typing as npt
from scipy import stats
from scipy.special import logsumexp

from . import exceptions
from .grid import LogGrid, Support, build_grid, integrate
from .inference import DEFAULT_NODE_COUNT
from .models import ThermalModel, fisher_information
from .models.spingas import SpinGasModel
from .types import FloatArray, OutcomeKind

logger = logging.getLogger(__name__)

#: Leading coefficient and correction of the spin-gas optimum on [0.1, 10].
REFERENCE_C1 = 51.7
REFERENCE_C2 = 143.0
REFERENCE_Q = -1.25

DEFAULT_MAX_OUTCOMES = 100_001
#: Number of outcomes processed at once.
CHUNK_SIZE = 256
#: Outcomes less probable than this are dropped from sums.
TINY_PROBABILITY = 1e-300
MAX_DROPPED_MASS = 1e-12
IDENTITY_TOLERANCE = 1e-8
MIN_FIT_POINTS = 5


@attr.s(auto_attribs=True, frozen=True, slots=True)
class OptimalRisk:
    """Minimal mean logarithmic error with its decomposition."""

    eps_opt: float
    eps_p: float
    info_gain: float
    eps_snr: float


@attr.s(auto_attribs=True, frozen=True, slots=True)
class BoundPoint:
    """Precision quantifiers of a spin gas with 'n' spins."""

    n: int
    eps_opt: float
    eps_cr: float
    eps_p: float
    info_gain: float
    eps_flat: float
    eps_snr: float = math.nan


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class AsymptoticFit:
    """Least-squares line log(eps_cr - eps_opt) = q log(n) + log(b)."""

    q: float
    log_b: float
    stderr_q: float
    stderr_log_b: float
    n_values: FloatArray
    residuals: FloatArray

    @property
    def b(self) -> float:
        return math.exp(self.log_b)

    def gap(self, n: npt.ArrayLike) -> FloatArray:
        """Fitted difference eps_cr - eps_opt at 'n'."""
        return self.b * np.asarray(n, dtype=np.float64) ** self.q  # type: ignore[no-any-return]


def _outcome_statistics(
    model: ThermalModel, grid: LogGrid, max_outcomes: int
) -> FloatArray:
    """Return, for every enumerated outcome r, rows of
    (log p(r), posterior mean of u, posterior variance of u,
    posterior mean of (exp(mean - u) - 1)**2).
    """
    if model.outcome_kind != OutcomeKind.discrete:
        raise exceptions.UnsupportedError(
            f"bounds require an enumerable outcome space, {model.name} model has none"
        )
    outcomes = model.outcomes()
    if outcomes.size > max_outcomes:
        raise exceptions.EnumerationTooLarge(outcomes.size, max_outcomes)
    u = grid.u_nodes
    y = grid.y_nodes
    chunks = [
        outcomes[start : start + CHUNK_SIZE]
        for start in range(0, outcomes.size, CHUNK_SIZE)
    ]
    # per-node log normalizer of the likelihood, removing its rounding drift
    log_norm = np.full(y.size, -np.inf)
    for r in chunks:
        loglik = model.log_likelihood(r[:, np.newaxis], y[np.newaxis, :])
        log_norm = np.logaddexp(log_norm, logsumexp(loglik, axis=0))
    log_w = np.log(grid.weights) + grid.log_prior - log_norm
    result = np.empty((outcomes.size, 4))
    start = 0
    for r in chunks:
        joint = model.log_likelihood(r[:, np.newaxis], y[np.newaxis, :]) + log_w
        log_pr = logsumexp(joint, axis=1)
        weights = np.exp(joint - log_pr[:, np.newaxis])
        mean = weights @ u
        dev = u[np.newaxis, :] - mean[:, np.newaxis]
        rows = result[start : start + r.size]
        rows[:, 0] = log_pr
        rows[:, 1] = mean
        rows[:, 2] = np.einsum("ij,ij->i", weights, dev**2)
        rows[:, 3] = np.einsum("ij,ij->i", weights, np.expm1(-dev) ** 2)
        start += r.size
    if not np.all(np.isfinite(result)):
        raise exceptions.QuadratureError(
            f"non-finite outcome statistics for {model.name} model on {grid.support}"
        )
    return result


def _kept_outcomes(statistics: FloatArray) -> FloatArray:
    log_pr = statistics[:, 0]
    dropped = log_pr < math.log(TINY_PROBABILITY)
    if np.any(dropped):
        dropped_mass = float(np.exp(logsumexp(log_pr[dropped])))
        if dropped_mass >= MAX_DROPPED_MASS:
            raise exceptions.QuadratureError(
                f"dropped outcomes carry probability {dropped_mass:.3g}"
            )
        logger.debug(
            "dropped %d outcomes with total probability %.3g",
            int(dropped.sum()),
            dropped_mass,
        )
    kept = statistics[~dropped]
    total = math.fsum(np.exp(kept[:, 0]))
    if abs(total - 1) > 1e-10:
        raise exceptions.QuadratureError(
            f"outcome probabilities sum to {total!r} instead of 1"
        )
    return kept


def optimal_risk(
    model: ThermalModel,
    support: Support,
    node_count: int = DEFAULT_NODE_COUNT,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> OptimalRisk:
    """Minimal mean logarithmic error over all estimators, summed exactly over
    outcomes, with prior risk, information gain and noise-to-signal ratio.

    The decomposition eps_opt = eps_p - K is checked against two other
    evaluations of eps_opt.
    """
    grid = build_grid(support, node_count)
    kept = _kept_outcomes(_outcome_statistics(model, grid, max_outcomes))
    pr = np.exp(kept[:, 0])
    mean, var, snr = kept[:, 1], kept[:, 2], kept[:, 3]
    u = grid.u_nodes
    prior = np.exp(np.full(grid.node_count, grid.log_prior))
    prior_mean = integrate(grid, u * prior)
    eps_p = integrate(grid, (u - prior_mean) ** 2 * prior)
    eps_opt = math.fsum(pr * var)
    info_gain = math.fsum(pr * (mean - prior_mean) ** 2)
    direct = integrate(grid, u**2 * prior) - math.fsum(pr * mean**2)
    for label, value in (("eps_p - K", eps_p - info_gain), ("direct sum", direct)):
        if abs(eps_opt - value) > IDENTITY_TOLERANCE * eps_opt:
            raise exceptions.QuadratureError(
                f"optimal risk {eps_opt!r} differs from its {label} evaluation {value!r}"
            )
    return OptimalRisk(
        eps_opt=eps_opt,
        eps_p=eps_p,
        info_gain=info_gain,
        eps_snr=math.fsum(pr * snr),
    )


def eps_opt(
    model: ThermalModel,
    support: Support,
    node_count: int = DEFAULT_NODE_COUNT,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> OptimalRisk:
    """Return (eps_opt, eps_p, K) fields of the optimal global risk."""
    return optimal_risk(model, support, node_count, max_outcomes)


def bayes_snr(
    model: ThermalModel,
    support: Support,
    node_count: int = DEFAULT_NODE_COUNT,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> float:
    """Prior-averaged (estimate/y - 1)**2 of the optimal estimator."""
    return optimal_risk(model, support, node_count, max_outcomes).eps_snr


def _inverse_fisher(model: ThermalModel, grid: LogGrid) -> FloatArray:
    info = np.asarray(fisher_information(model, grid.y_nodes), dtype=np.float64)
    if np.any(np.isnan(info)) or np.any(info < 0):
        raise exceptions.QuadratureError(
            f"invalid Fisher information of {model.name} model on {grid.support}"
        )
    with np.errstate(divide="ignore"):
        return 1 / info  # type: ignore[no-any-return]


def _prior_average(grid: LogGrid, values: FloatArray) -> float:
    if np.any(np.isinf(values)):
        logger.debug("Fisher information vanishes on %s", grid.support)
        return math.inf
    return integrate(grid, values) / grid.support.log_width


def eps_cr(
    model: ThermalModel, support: Support, node_count: int = DEFAULT_NODE_COUNT
) -> float:
    """Prior average of 1/(y**2 F(y)), the Cramer-Rao-like bound."""
    grid = build_grid(support, node_count)
    y = grid.y_nodes
    return _prior_average(grid, _inverse_fisher(model, grid) / y**2)


def eps_flat(
    model: ThermalModel, support: Support, node_count: int = DEFAULT_NODE_COUNT
) -> float:
    """Prior average of 1/F(y); not scale invariant."""
    grid = build_grid(support, node_count)
    return _prior_average(grid, _inverse_fisher(model, grid))


def bound_point(
    model: SpinGasModel,
    support: Support,
    node_count: int = DEFAULT_NODE_COUNT,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
) -> BoundPoint:
    """All precision quantifiers of spin-gas 'model'."""
    if not isinstance(model, SpinGasModel):
        raise exceptions.UnsupportedError(
            f"bound points are only computed for the spin gas, got {model.name}"
        )
    risk = optimal_risk(model, support, node_count, max_outcomes)
    point = BoundPoint(
        n=model.n,
        eps_opt=risk.eps_opt,
        eps_cr=eps_cr(model, support, node_count),
        eps_p=risk.eps_p,
        info_gain=risk.info_gain,
        eps_flat=eps_flat(model, support, node_count),
        eps_snr=risk.eps_snr,
    )
    logger.debug("bounds for n=%d: %s", model.n, point)
    return point


def _spin_gas_point(
    n: int, support: Support, node_count: int, max_outcomes: int, gap: float
) -> BoundPoint:
    return bound_point(SpinGasModel(n, gap=gap), support, node_count, max_outcomes)


def sweep(
    n_values: Iterable[int],
    support: Support,
    node_count: int = DEFAULT_NODE_COUNT,
    max_outcomes: int = DEFAULT_MAX_OUTCOMES,
    jobs: int = 1,
    gap: float = 1.0,
) -> List[BoundPoint]:
    """Bound points for every spin count in 'n_values', in order, possibly
    computed by 'jobs' worker processes.
    """
    n_values = list(n_values)
    if not n_values:
        raise exceptions.InvalidParameter("empty sweep of spin counts")
    compute = functools.partial(
        _spin_gas_point,
        support=support,
        node_count=node_count,
        max_outcomes=max_outcomes,
        gap=gap,
    )
    if jobs <= 1 or len(n_values) == 1:
        return [compute(n) for n in n_values]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(compute, n_values))


def fit_asymptotic(points: Sequence[BoundPoint]) -> AsymptoticFit:
    """Fit q and b of eps_cr - eps_opt ~ b n**q by ordinary least squares in
    log-log space.

    >>> n = np.array([1e2, 1e3, 1e4, 1e5, 1e6])
    >>> pts = [BoundPoint(int(v), 1 / v, 1 / v + 143 * v**-1.25, 1, 1, 1) for v in n]
    >>> fit = fit_asymptotic(pts)
    >>> round(fit.q, 10), round(fit.b, 8)
    (-1.25, 143.0)
    """
    if len(points) < MIN_FIT_POINTS:
        raise exceptions.InvalidParameter(
            f"at least {MIN_FIT_POINTS} bound points are needed, got {len(points)}"
        )
    n = np.array([p.n for p in points], dtype=np.float64)
    diff = np.array([p.eps_cr - p.eps_opt for p in points])
    bad = [p.n for p in points if not (p.eps_cr > p.eps_opt > 0)]
    if bad:
        raise exceptions.FitError(
            f"eps_cr - eps_opt is not positive for n={', '.join(map(str, bad))}, "
            "quadrature noise probably dominates"
        )
    x, y = np.log(n), np.log(diff)
    result = stats.linregress(x, y)
    residuals = y - (result.intercept + result.slope * x)
    return AsymptoticFit(
        q=float(result.slope),
        log_b=float(result.intercept),
        stderr_q=float(result.stderr),
        stderr_log_b=float(result.intercept_stderr),
        n_values=n,
        residuals=residuals,
    )


def tolerance_spins(tau: float, c1: float, c2: float, q: float) -> float:
    """Spin count above which the local bound approximates the global
    optimum c1/n - c2 n**q within relative tolerance 'tau'.

    >>> round(tolerance_spins(0.05, 51.7, 143, -1.25) / 1e7, 2)
    1.14
    >>> round(tolerance_spins(1 - 1e-12, 1, 1, -1.25), 6)
    16.0
    """
    if not 0 < tau < 1:
        raise exceptions.InvalidParameter(f"tolerance must lie in (0, 1), got {tau}")
    if not (c1 > 0 and c2 > 0):
        raise exceptions.InvalidParameter(
            f"coefficients must be positive, got c1={c1}, c2={c2}"
        )
    if not q < -1:
        raise exceptions.InvalidParameter(f"exponent must be below -1, got {q}")
    return float(((c2 / c1) * (1 + 1 / tau)) ** (1 / (-1 - q)))


def reference_asymptote(n: npt.ArrayLike) -> FloatArray:
    """Asymptotic optimum c1/n - c2/n**(5/4) of the spin gas on [0.1, 10].

    >>> round(float(reference_asymptote(1e4)), 6)
    0.00374
    """
    n = np.asarray(n, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return REFERENCE_C1 / n - REFERENCE_C2 * n**REFERENCE_Q  # type: ignore[no-any-return]
