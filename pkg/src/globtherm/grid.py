"""Bounded temperature supports and their log-space quadrature."""
import logging
import math
from typing import Any

import attr
import numpy as np
import numpy.typing as npt

from . import exceptions
from .types import FloatArray

logger = logging.getLogger(__name__)

#: Boundary weights of the end-corrected trapezoid rule (Gregory, third order).
GREGORY_WEIGHTS = (3 / 8, 7 / 6, 23 / 24)


@attr.s(auto_attribs=True, frozen=True, slots=True)
class Support:
    """Dimensionless temperature window [y_min, y_max].

    >>> s = Support(0.1, 10)
    >>> round(s.log_width, 5)
    4.60517
    >>> Support(1, 1)
    Traceback (most recent call last):
        ...
    globtherm.exceptions.InvalidSupport: invalid support [1.0, 1.0], expecting 0 < y_min < y_max
    """

    y_min: float = attr.ib(converter=float)
    y_max: float = attr.ib(converter=float)

    def __attrs_post_init__(self) -> None:
        if not (
            math.isfinite(self.y_min)
            and math.isfinite(self.y_max)
            and 0 < self.y_min < self.y_max
        ):
            raise exceptions.InvalidSupport(
                f"invalid support [{self.y_min}, {self.y_max}], expecting 0 < y_min < y_max"
            )

    def __str__(self) -> str:
        return f"[{self.y_min:g}, {self.y_max:g}]"

    @property
    def log_width(self) -> float:
        """Width log(y_max/y_min) of the support in log-temperature."""
        return math.log(self.y_max / self.y_min)

    @property
    def normalization(self) -> float:
        """Normalization constant of the scale-invariant prior p(y) = c/y."""
        return 1 / self.log_width

    def scaled(self, gamma: float) -> "Support":
        """Return the support with both bounds multiplied by 'gamma'.

        >>> Support(0.1, 10).scaled(2)
        Support(y_min=0.2, y_max=20.0)
        """
        return self.__class__(self.y_min * gamma, self.y_max * gamma)


def _readonly(value: Any) -> FloatArray:
    array = np.array(value, dtype=np.float64)
    array.setflags(write=False)
    return array


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class LogGrid:
    """Quadrature nodes and weights in u = log y over a support."""

    support: Support
    node_count: int
    u_nodes: FloatArray = attr.ib(converter=_readonly)
    weights: FloatArray = attr.ib(converter=_readonly)

    @property
    def step(self) -> float:
        return float(self.u_nodes[1] - self.u_nodes[0])

    @property
    def y_nodes(self) -> FloatArray:
        """Temperatures at grid nodes."""
        return np.exp(self.u_nodes)  # type: ignore[no-any-return]

    @property
    def log_prior(self) -> float:
        """Log-density of the (uniform in u) prior."""
        return -math.log(self.support.log_width)


def quadrature_weights(node_count: int, step: float) -> FloatArray:
    """Return end-corrected trapezoid weights for 'node_count' uniformly
    spaced nodes (plain trapezoid below 7 nodes).

    >>> quadrature_weights(3, 1.0).tolist()
    [0.5, 1.0, 0.5]
    >>> w = quadrature_weights(9, 1.0)
    >>> w.tolist()[:4]
    [0.375, 1.1666666666666667, 0.9583333333333334, 1.0]
    >>> round(float(w.sum()), 12)
    8.0
    """
    weights = np.full(node_count, step)
    if node_count >= 2 * len(GREGORY_WEIGHTS) + 1:
        for idx, coef in enumerate(GREGORY_WEIGHTS):
            weights[idx] = weights[-1 - idx] = coef * step
    else:
        weights[0] = weights[-1] = step / 2
    return weights


def build_grid(support: Support, node_count: int) -> LogGrid:
    """Build the log-space grid with 'node_count' nodes over 'support'.

    >>> g = build_grid(Support(0.1, 10), 3)
    >>> np.exp(g.u_nodes).round(12).tolist()
    [0.1, 1.0, 10.0]
    """
    if not isinstance(support, Support):
        raise exceptions.InvalidSupport(f"expecting a Support, got {support!r}")
    if int(node_count) != node_count or node_count < 2:
        raise exceptions.InvalidParameter(
            f"invalid node count {node_count}, expecting an integer >= 2"
        )
    node_count = int(node_count)
    lo, hi = math.log(support.y_min), math.log(support.y_max)
    u_nodes = np.linspace(lo, hi, node_count)
    step = (hi - lo) / (node_count - 1)
    return LogGrid(
        support=support,
        node_count=node_count,
        u_nodes=u_nodes,
        weights=quadrature_weights(node_count, step),
    )


def integrate(grid: LogGrid, values: npt.ArrayLike) -> float:
    """Integrate 'values' sampled at grid nodes over u.

    >>> g = build_grid(Support(0.1, 10), 11)
    >>> round(integrate(g, np.ones(11)), 10)
    4.605170186
    >>> abs(integrate(g, g.u_nodes)) < 1e-12
    True
    """
    array = np.asarray(values, dtype=np.float64)
    if array.shape != (grid.node_count,):
        raise exceptions.InvalidParameter(
            f"expecting {grid.node_count} values at grid nodes, got shape {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise exceptions.QuadratureError("non-finite values in integrand")
    return float(grid.weights @ array)
