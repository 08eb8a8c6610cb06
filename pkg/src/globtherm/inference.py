"""Posterior construction and the optimal global temperature estimator.

All densities are expressed in u = log y, where the scale-invariant prior
is uniform.
"""
import logging
import math
from typing import Any, Optional, Tuple

import attr
import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp

from . import exceptions
from .grid import LogGrid, Support, build_grid, integrate
from .models import ThermalModel
from .types import FloatArray

logger = logging.getLogger(__name__)

DEFAULT_NODE_COUNT = 2001


def _positive(instance: Any, attribute: "attr.Attribute[float]", value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise exceptions.InvalidParameter(
            f"{attribute.name} must be finite and positive, got {value}"
        )


@attr.s(auto_attribs=True, frozen=True, slots=True)
class DeviationParams:
    """Parameters of the log-deviation |alpha log(estimate/y)|**k.

    Defaults select the mean logarithmic error.
    """

    alpha: float = attr.ib(default=1.0, converter=float, validator=_positive)
    k: float = attr.ib(default=2.0, converter=float, validator=_positive)


def _readonly(value: npt.ArrayLike) -> FloatArray:
    array = np.array(value, dtype=np.float64)
    array.setflags(write=False)
    return array


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class Posterior:
    """Normalized posterior density in u over a grid."""

    grid: LogGrid
    log_density: FloatArray = attr.ib(converter=_readonly)

    @property
    def density(self) -> FloatArray:
        return np.exp(self.log_density)  # type: ignore[no-any-return]

    def mass(self) -> float:
        return integrate(self.grid, self.density)

    def edge_masses(self, cells: int) -> Tuple[float, float]:
        """Posterior mass within 'cells' grid cells of the lower and upper
        support edges.
        """
        mass = self.grid.weights * self.density
        width = min(cells + 1, self.grid.node_count)
        return float(mass[:width].sum()), float(mass[-width:].sum())


@attr.s(auto_attribs=True, frozen=True, slots=True)
class GlobalEstimate:
    """Optimal estimate with its outcome-conditioned risk and error bar."""

    theta_hat: float
    eps_mle: float
    error_bar: float
    clipped: bool = False

    @classmethod
    def from_risk(
        cls, theta_hat: float, eps_mle: float, clipped: bool = False
    ) -> "GlobalEstimate":
        """Build from estimate and risk, deriving the error bar.

        >>> GlobalEstimate.from_risk(2.0, 0.25)
        GlobalEstimate(theta_hat=2.0, eps_mle=0.25, error_bar=1.0, clipped=False)
        """
        return cls(theta_hat, eps_mle, theta_hat * math.sqrt(eps_mle), clipped)


def normalize(grid: LogGrid, log_values: npt.ArrayLike) -> Posterior:
    """Normalize unnormalized log-density values at grid nodes."""
    log_values = np.asarray(log_values, dtype=np.float64)
    if np.any(np.isnan(log_values)) or np.any(log_values == np.inf):
        raise exceptions.QuadratureError("invalid log-density values")
    shift = log_values.max()
    log_norm = -np.inf
    if np.isfinite(shift):
        log_values = log_values - shift
        with np.errstate(divide="ignore"):
            log_norm = logsumexp(log_values, b=grid.weights)
    if not np.isfinite(log_norm):
        raise exceptions.PosteriorUnderflow(
            f"posterior density vanishes on support {grid.support}"
        )
    return Posterior(grid=grid, log_density=log_values - log_norm)


def prior_posterior(
    support: Support, node_count: int = DEFAULT_NODE_COUNT
) -> Posterior:
    """Posterior given no outcome: the scale-invariant prior."""
    grid = build_grid(support, node_count)
    return normalize(grid, np.zeros(grid.node_count))


def posterior(
    model: ThermalModel,
    support: Support,
    record: npt.ArrayLike,
    node_count: int = DEFAULT_NODE_COUNT,
) -> Posterior:
    """Posterior density of log-temperature given outcome 'record'."""
    record = np.asarray(record)
    if record.size == 0:
        raise exceptions.InvalidInput("cannot build a posterior from an empty record")
    grid = build_grid(support, node_count)
    loglik = model.record_log_likelihood(record, grid.y_nodes)
    return normalize(grid, loglik)


def optimal_estimate(post: Posterior, eps0: float = 1.0) -> float:
    """Exponentiated posterior mean of log(y/eps0), times eps0.

    The result does not depend on the reference energy 'eps0'.

    >>> round(optimal_estimate(prior_posterior(Support(0.1, 10), 101)), 12)
    1.0
    """
    if not (math.isfinite(eps0) and eps0 > 0):
        raise exceptions.InvalidParameter(f"invalid reference energy {eps0}")
    offset = math.log(eps0)
    mean = integrate(post.grid, (post.grid.u_nodes - offset) * post.density)
    support = post.grid.support
    return min(max(eps0 * math.exp(mean), support.y_min), support.y_max)


def conditional_risk(
    post: Posterior, theta_tilde: float, dev: Optional[DeviationParams] = None
) -> float:
    """Posterior-averaged deviation of estimate 'theta_tilde'.

    With default deviation parameters, this is the mean logarithmic error.

    >>> post = prior_posterior(Support(0.1, 10))
    >>> round(conditional_risk(post, 1.0), 4)
    1.7673
    """
    if dev is None:
        dev = DeviationParams()
    if not (math.isfinite(theta_tilde) and theta_tilde > 0):
        raise exceptions.InvalidParameter(
            f"estimate must be finite and positive, got {theta_tilde}"
        )
    deviation = np.abs(dev.alpha * (math.log(theta_tilde) - post.grid.u_nodes))
    return integrate(post.grid, post.density * deviation**dev.k)


def relative_square_risk(post: Posterior, theta_tilde: float) -> float:
    """Posterior-averaged (theta_tilde/y - 1)**2."""
    if not (math.isfinite(theta_tilde) and theta_tilde > 0):
        raise exceptions.InvalidParameter(
            f"estimate must be finite and positive, got {theta_tilde}"
        )
    ratio = np.exp(math.log(theta_tilde) - post.grid.u_nodes)
    return integrate(post.grid, post.density * (ratio - 1) ** 2)


def estimate(
    post: Posterior,
    dev: Optional[DeviationParams] = None,
    edge_cells: int = 3,
    edge_mass: float = 0.5,
) -> GlobalEstimate:
    """Optimal estimate and error bar from a posterior."""
    theta_hat = optimal_estimate(post)
    eps_mle = conditional_risk(post, theta_hat, dev)
    lower, upper = post.edge_masses(edge_cells)
    clipped = max(lower, upper) > edge_mass
    if clipped:
        logger.warning(
            "posterior mass %.3g lies at the %s edge of support %s, "
            "the support probably clips the true temperature",
            max(lower, upper),
            "lower" if lower >= upper else "upper",
            post.grid.support,
        )
    return GlobalEstimate.from_risk(theta_hat, eps_mle, clipped)


def global_estimate(
    model: ThermalModel,
    support: Support,
    record: npt.ArrayLike,
    node_count: int = DEFAULT_NODE_COUNT,
    dev: Optional[DeviationParams] = None,
    edge_cells: int = 3,
    edge_mass: float = 0.5,
) -> GlobalEstimate:
    """Optimal global estimate of temperature given outcome 'record'."""
    post = posterior(model, support, record, node_count)
    return estimate(post, dev, edge_cells=edge_cells, edge_mass=edge_mass)


def prior_estimate(support: Support) -> Tuple[float, float]:
    """Optimal estimate and mean logarithmic error before any measurement.

    >>> theta_p, eps_p = prior_estimate(Support(0.1, 10))
    >>> round(theta_p, 12), round(eps_p, 4)
    (1.0, 1.7673)
    """
    if not isinstance(support, Support):
        raise exceptions.InvalidSupport(f"expecting a Support, got {support!r}")
    return math.sqrt(support.y_min * support.y_max), support.log_width**2 / 12
