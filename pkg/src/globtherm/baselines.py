"""Comparison estimators: local Cramer-Rao estimation and Gaussian
histogram fitting.
"""
import logging
import math
from typing import Optional, Tuple

import attr
import numpy as np
import numpy.typing as npt
import scipy.linalg

from . import exceptions
from .models import check_temperature
from .models.spingas import SpinGasModel
from .simulate import Trace
from .types import FloatArray, IntArray, ModelName

logger = logging.getLogger(__name__)

MIN_HISTOGRAM_OUTCOMES = 10
MIN_BIN_COUNT = 5


@attr.s(auto_attribs=True, frozen=True, slots=True)
class LocalEstimate:
    """One-step estimate linearized around seed temperature 'theta0'."""

    theta0: float
    theta_L: float
    delta_L: float


def local_estimate(
    model: SpinGasModel, record: npt.ArrayLike, theta0: float
) -> LocalEstimate:
    """Locally unbiased spin-gas estimate around 'theta0'.

    A record whose mean equals the expected outcome at 'theta0' leaves the
    estimate at 'theta0':

    >>> theta0 = 1 / math.log(3)  # one spin in four excited on average
    >>> est = local_estimate(SpinGasModel(4), [1], theta0)
    >>> round(est.theta_L / theta0, 12)
    1.0
    """
    if not isinstance(model, SpinGasModel):
        raise exceptions.UnsupportedError(
            f"local estimates are only available for the spin gas, got {model.name}"
        )
    if model.n == 0:
        raise exceptions.InvalidParameter("local estimate requires at least one spin")
    theta0 = float(check_temperature(theta0))
    r = model.validate_outcomes(record).ravel()
    if r.size == 0:
        raise exceptions.InvalidInput("cannot estimate from an empty record")
    mu = r.size
    mean = int(r.sum()) / mu
    beta = float(model.beta(theta0))
    e = math.exp(-beta)
    # 4 cosh^2(beta/2) = 1 / (q (1 - q)), q being the excitation probability
    cosh2 = (1 + e) ** 2 / e
    theta_l = theta0 * (1 + (cosh2 * mean / model.n - e - 1) / beta)
    info = float(model.fisher_information(theta0))
    return LocalEstimate(
        theta0=theta0, theta_L=theta_l, delta_L=1 / math.sqrt(mu * info)
    )


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class Histogram:
    """Normalized histogram of continuous outcomes."""

    bin_edges: FloatArray
    counts: IntArray

    @property
    def width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])

    @property
    def centers(self) -> FloatArray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2  # type: ignore[no-any-return]

    @property
    def density(self) -> FloatArray:
        return self.counts / (self.counts.sum() * self.width)  # type: ignore[no-any-return]


def histogram(outcomes: npt.ArrayLike, bin_count: Optional[int] = None) -> Histogram:
    """Histogram of 'outcomes' with 'bin_count' bins (square-root rule by
    default) spanning one bin width beyond the extreme outcomes.

    >>> h = histogram(np.arange(10.0), 11)
    >>> h.width, float(h.bin_edges[0]), int(h.counts.sum())
    (1.0, -1.0, 10)
    """
    x = np.asarray(outcomes, dtype=np.float64).ravel()
    if x.size < MIN_HISTOGRAM_OUTCOMES:
        raise exceptions.InvalidParameter(
            f"histogram fit needs at least {MIN_HISTOGRAM_OUTCOMES} outcomes, got {x.size}"
        )
    if bin_count is None:
        bin_count = math.ceil(math.sqrt(x.size))
    if bin_count < MIN_BIN_COUNT:
        raise exceptions.InvalidParameter(
            f"bin count must be at least {MIN_BIN_COUNT}, got {bin_count}"
        )
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise exceptions.FitError("cannot bin identical outcomes")
    width = (hi - lo) / (bin_count - 2)
    edges = lo - width + width * np.arange(bin_count + 1)
    counts, __ = np.histogram(x, edges)
    return Histogram(bin_edges=edges, counts=counts.astype(np.int64))


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class GaussianProfile:
    """Fitted profile A exp(-x^2 / (2 sigma^2)) with parameter covariance."""

    amplitude: float
    sigma: float
    covariance: FloatArray
    iterations: int

    @property
    def stderr_amplitude(self) -> float:
        return math.sqrt(self.covariance[0, 0])

    @property
    def stderr_sigma(self) -> float:
        return math.sqrt(self.covariance[1, 1])

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        return _profile(np.asarray(x, dtype=np.float64), self.amplitude, self.sigma)

    def band(self, x: npt.ArrayLike) -> Tuple[FloatArray, FloatArray]:
        """Lower and upper one standard error bands of the profile at 'x'."""
        x = np.asarray(x, dtype=np.float64)
        jac = _jacobian(x, self.amplitude, self.sigma)
        spread = np.sqrt(np.einsum("ij,jk,ik->i", jac, self.covariance, jac))
        value = self(x)
        return value - spread, value + spread


def _profile(x: FloatArray, amplitude: float, sigma: float) -> FloatArray:
    return amplitude * np.exp(-(x**2) / (2 * sigma**2))  # type: ignore[no-any-return]


def _jacobian(x: FloatArray, amplitude: float, sigma: float) -> FloatArray:
    g = np.exp(-(x**2) / (2 * sigma**2))
    return np.column_stack([g, amplitude * g * x**2 / sigma**3])


def fit_gaussian_profile(
    x: npt.ArrayLike,
    density: npt.ArrayLike,
    sigma0: Optional[float] = None,
    max_iterations: int = 100,
    step_tolerance: float = 1e-10,
) -> GaussianProfile:
    """Least-squares fit of a zero-centered Gaussian profile to 'density'
    sampled at 'x', by Gauss-Newton iterations.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(density, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise exceptions.InvalidParameter(
            "expecting matching one-dimensional abscissa and density arrays of size >= 3"
        )
    amplitude = float(y.max())
    if sigma0 is None:
        sigma0 = math.sqrt(float(np.sum(y * x**2) / np.sum(y)))
    sigma = float(sigma0)
    if not (amplitude > 0 and sigma > 0):
        raise exceptions.FitError("cannot initialize Gaussian fit from empty data")
    for iteration in range(1, max_iterations + 1):
        jac = _jacobian(x, amplitude, sigma)
        residuals = y - _profile(x, amplitude, sigma)
        step, *__ = scipy.linalg.lstsq(jac, residuals)
        amplitude += step[0]
        sigma += step[1]
        if not (math.isfinite(amplitude) and math.isfinite(sigma) and sigma > 0):
            raise exceptions.FitError(
                f"Gaussian fit diverged at iteration {iteration}"
            )
        logger.debug(
            "Gauss-Newton iteration %d: A=%.17g, sigma=%.17g", iteration, amplitude, sigma
        )
        if abs(step[0]) <= step_tolerance * abs(amplitude) and abs(
            step[1]
        ) <= step_tolerance * abs(sigma):
            break
    else:
        raise exceptions.FitError(
            f"Gaussian fit did not converge in {max_iterations} iterations"
        )
    jac = _jacobian(x, amplitude, sigma)
    residuals = y - _profile(x, amplitude, sigma)
    dof = max(x.size - 2, 1)
    variance = float(residuals @ residuals) / dof
    covariance = variance * scipy.linalg.pinvh(jac.T @ jac)
    return GaussianProfile(amplitude, sigma, covariance, iteration)


def invert_sigma(
    sigma: float, stderr_sigma: float = 0.0, gap: float = 1.0
) -> Tuple[float, float]:
    """Temperature whose oscillator position spread is 'sigma', with the
    first-order propagated uncertainty.

    >>> theta, __ = invert_sigma(math.sqrt(0.5 / math.tanh(1 / 12)))
    >>> round(theta, 10)
    6.0
    """
    z = 2 * sigma**2
    # rounding of sigma**2 alone may lift z above 1
    if not z - 1 > 4 * np.finfo(np.float64).eps:
        raise exceptions.InversionError(
            f"fitted variance {sigma ** 2:.6g} does not exceed the ground-state variance 1/2"
        )
    log_ratio = math.log1p(2 / (z - 1))
    theta = gap / log_ratio
    slope = gap * 8 * sigma / ((z**2 - 1) * log_ratio**2)
    return theta, abs(slope) * stderr_sigma


@attr.s(auto_attribs=True, frozen=True, slots=True, eq=False)
class HistogramFit:
    """Temperature estimate from a Gaussian fit to an outcome histogram."""

    histogram: Histogram
    profile: GaussianProfile
    theta_F: float
    delta_F: float

    @property
    def bin_edges(self) -> FloatArray:
        return self.histogram.bin_edges

    @property
    def counts(self) -> IntArray:
        return self.histogram.counts

    @property
    def amplitude(self) -> float:
        return self.profile.amplitude

    @property
    def sigma(self) -> float:
        return self.profile.sigma


def fit_histogram(
    outcomes: npt.ArrayLike,
    bin_count: Optional[int] = None,
    max_iterations: int = 100,
    step_tolerance: float = 1e-10,
) -> Tuple[Histogram, GaussianProfile]:
    """Build the histogram of position 'outcomes' and fit its profile."""
    hist = histogram(outcomes, bin_count)
    profile = fit_gaussian_profile(
        hist.centers,
        hist.density,
        sigma0=float(np.std(np.asarray(outcomes, dtype=np.float64))),
        max_iterations=max_iterations,
        step_tolerance=step_tolerance,
    )
    return hist, profile


def histogram_fit_estimate(
    trace: Trace,
    bin_count: Optional[int] = None,
    max_iterations: int = 100,
    step_tolerance: float = 1e-10,
) -> HistogramFit:
    """Temperature estimate of an oscillator trace by histogram fitting."""
    if trace.model != str(ModelName.oscillator):
        raise exceptions.InvalidInput(
            f"histogram fits apply to oscillator traces, got a {trace.model} trace"
        )
    hist, profile = fit_histogram(
        trace.outcomes, bin_count, max_iterations, step_tolerance
    )
    theta, delta = invert_sigma(
        profile.sigma, profile.stderr_sigma, float(trace.params.get("gap", 1.0))
    )
    return HistogramFit(
        histogram=hist, profile=profile, theta_F=theta, delta_F=delta
    )
