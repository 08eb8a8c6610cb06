"""Seeded generation of measurement records."""
import functools
import logging
import math
from typing import Any, Dict

import attr
import numpy as np
import numpy.typing as npt

from . import exceptions
from .models import ThermalModel, check_temperature
from .models.oscillator import OscillatorModel
from .models.spingas import SpinGasModel
from .types import FloatArray, IntArray

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


def check_seed(seed: Any) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise exceptions.InvalidParameter(
            f"seed must be an unsigned 64-bit integer, got {seed!r}"
        )
    return int(seed)


def check_count(mu: Any) -> int:
    if isinstance(mu, bool) or int(mu) != mu or mu < 1:
        raise exceptions.InvalidParameter(
            f"number of outcomes must be a positive integer, got {mu!r}"
        )
    return int(mu)


class RngStream:
    """Uniform and Gaussian variates from a Philox counter-based generator.

    >>> a, b = RngStream(7), RngStream(7)
    >>> bool(np.array_equal(a.uniform(5), b.uniform(5)))
    True
    >>> u = RngStream(1).uniform(1000)
    >>> bool(np.all((u > 0) & (u <= 1)))
    True
    """

    def __init__(self, seed: int) -> None:
        self.seed = check_seed(seed)
        self._generator = np.random.Generator(np.random.Philox(self.seed))

    def __repr__(self) -> str:
        return f"<RngStream seed={self.seed}>"

    def spawn(self, index: int) -> "RngStream":
        """Return an independent stream for task 'index'.

        >>> RngStream(10).spawn(3)
        <RngStream seed=13>
        """
        return self.__class__((self.seed + index) % (MAX_SEED + 1))

    def uniform(self, size: int) -> FloatArray:
        """Draw 'size' uniform variates in (0, 1]."""
        return 1.0 - self._generator.random(size)  # type: ignore[no-any-return]

    def normal(self, size: int) -> FloatArray:
        """Draw 'size' standard normal variates with the polar method."""
        out = np.empty(size)
        filled = 0
        while filled < size:
            missing = size - filled
            pairs = math.ceil(missing / 2 / (math.pi / 4)) + 8
            v = 2 * self._generator.random((pairs, 2)) - 1
            s = np.einsum("ij,ij->i", v, v)
            accepted = (s > 0) & (s < 1)
            v, s = v[accepted], s[accepted]
            z = (v * np.sqrt(-2 * np.log(s) / s)[:, np.newaxis]).ravel()
            taken = min(z.size, missing)
            out[filled : filled + taken] = z[:taken]
            filled += taken
        return out


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class Trace:
    """Simulated outcome record of a thermal model at temperature 'true_y'."""

    model: str
    params: Dict[str, Any]
    true_y: float
    outcomes: npt.NDArray[Any]
    seed: int

    @property
    def mu(self) -> int:
        return int(self.outcomes.size)

    def metadata(self) -> Dict[str, Any]:
        """JSON-serializable description of the trace, outcomes excluded."""
        return {
            "model": self.model,
            "params": dict(self.params),
            "true_y": self.true_y,
            "mu": self.mu,
            "seed": self.seed,
        }


def invert_cdf(cdf: npt.ArrayLike, u: npt.ArrayLike) -> IntArray:
    """Return the smallest r with cdf[r] >= u, for every u.

    >>> invert_cdf([0.25, 0.75, 1.0], [1e-15, 0.25, 0.5, 0.75, 1.0])
    array([0, 0, 1, 1, 2])
    """
    cdf = np.asarray(cdf, dtype=np.float64)
    r = np.searchsorted(cdf, np.asarray(u, dtype=np.float64), side="left")
    return np.minimum(r, cdf.size - 1).astype(np.int64)  # type: ignore[no-any-return]


def sample_spin_gas(
    model: SpinGasModel, true_y: float, mu: int, rng: RngStream
) -> Trace:
    """Draw 'mu' spin-gas outcomes by inversion of the outcome CDF."""
    true_y = float(check_temperature(true_y))
    mu = check_count(mu)
    cdf = model.outcome_cdf(true_y)
    outcomes = invert_cdf(cdf, rng.uniform(mu))
    logger.debug("sampled %d spin-gas outcomes at y=%g", mu, true_y)
    return Trace(model.name, model.parameters(), true_y, outcomes, rng.seed)


def sample_oscillator(
    model: OscillatorModel, true_y: float, mu: int, rng: RngStream
) -> Trace:
    """Draw 'mu' zero-mean Gaussian positions with variance sigma^2(true_y)."""
    true_y = float(check_temperature(true_y))
    mu = check_count(mu)
    sigma = math.sqrt(float(model.variance(true_y)))
    outcomes = sigma * rng.normal(mu)
    logger.debug("sampled %d oscillator positions at y=%g", mu, true_y)
    return Trace(model.name, model.parameters(), true_y, outcomes, rng.seed)


@functools.singledispatch
def sample(model: ThermalModel, true_y: float, mu: int, rng: RngStream) -> Trace:
    """Draw an outcome record of 'model'."""
    raise exceptions.UnsupportedError(f"cannot sample outcomes of {model.name} model")


sample.register(SpinGasModel, sample_spin_gas)
sample.register(OscillatorModel, sample_oscillator)
