"""Gas of n non-interacting two-level systems.

The outcome is the number r of excited spins, with likelihood
C(n, r) exp(-r gap/y) / Z and partition function
Z = (1 + exp(-gap/y))**n.
"""
import math
from typing import Any, Dict, Type

import attr
import numpy as np
import numpy.typing as npt
from scipy.special import expit, gammaln

from .. import exceptions, hookimpl
from ..types import FloatArray, IntArray, ModelName, OutcomeKind
from . import ThermalModel, check_gap


#: Coefficients of the Stirling series of log(k!) beyond its leading terms.
_STIRLING_SERIES = (1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _stirling_error(k: npt.ArrayLike) -> FloatArray:
    """log(k!) - (k + 1/2) log(k) + k - log(2 pi)/2, exact for k <= 15 and
    from the asymptotic series above.
    """
    k = np.asarray(k, dtype=np.float64)
    s0, s1, s2, s3, s4 = _STIRLING_SERIES
    with np.errstate(divide="ignore", invalid="ignore"):
        small = gammaln(k + 1) - (k + 0.5) * np.log(k) + k - _HALF_LOG_2PI
        k2 = k * k
        large = (s0 - (s1 - (s2 - (s3 - s4 / k2) / k2) / k2) / k2) / k
    return np.where(k <= 15, small, large)  # type: ignore[no-any-return]


def _deviance_term(x: FloatArray, m: FloatArray) -> FloatArray:
    """x log(x/m) + m - x, without cancellation when x is close to m."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d = (x - m) / m
        near = m * ((1 + d) * np.log1p(d) - d)
        far = x * np.log(x / m) + m - x
    return np.where(  # type: ignore[no-any-return]
        x == 0, m, np.where(np.abs(x - m) < 0.5 * (x + m), near, far)
    )


def _check_count(instance: Any, attribute: "attr.Attribute[int]", value: int) -> None:
    if value < 0:
        raise exceptions.InvalidParameter(
            f"spin count must be a non-negative integer, got {value}"
        )


def _to_count(value: Any) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise exceptions.InvalidParameter(
            f"spin count must be a non-negative integer, got {value!r}"
        )
    return int(value)


@attr.s(auto_attribs=True, frozen=True, slots=True)
class SpinGasModel(ThermalModel):
    """Spin gas with 'n' spins of energy splitting 'gap'.

    >>> m = SpinGasModel(1)
    >>> round(float(m.log_likelihood(1, 1.0)), 10) == round(-math.log(math.e + 1), 10)
    True
    >>> SpinGasModel(-1)
    Traceback (most recent call last):
        ...
    globtherm.exceptions.InvalidParameter: spin count must be a non-negative integer, got -1
    """

    name = str(ModelName.spin_gas)
    outcome_kind = OutcomeKind.discrete

    n: int = attr.ib(converter=_to_count, validator=_check_count)
    gap: float = attr.ib(default=1.0, converter=check_gap)

    def parameters(self) -> Dict[str, Any]:
        return {"n": self.n, "gap": self.gap}

    def outcomes(self) -> IntArray:
        return np.arange(self.n + 1, dtype=np.int64)

    def validate_outcomes(self, outcomes: npt.ArrayLike) -> IntArray:
        array = np.asarray(outcomes)
        if array.dtype.kind not in "iuf" or (
            array.dtype.kind == "f" and not np.all(np.isfinite(array))
        ):
            raise exceptions.InvalidOutcome(
                f"spin-gas outcomes must be integers, got {array.dtype} values"
            )
        as_int = array.astype(np.int64)
        if np.any(as_int != array):
            raise exceptions.InvalidOutcome("spin-gas outcomes must be integers")
        bad = as_int[(as_int < 0) | (as_int > self.n)]
        if bad.size:
            raise exceptions.InvalidOutcome(
                f"outcome {bad.ravel()[0]} out of range [0, {self.n}]"
            )
        return as_int

    def log_binomial(self, r: npt.ArrayLike) -> FloatArray:
        """log C(n, r), via log-gamma."""
        r = np.asarray(r, dtype=np.float64)
        return gammaln(self.n + 1) - gammaln(r + 1) - gammaln(self.n - r + 1)  # type: ignore[no-any-return]

    def log_partition(self, y: npt.ArrayLike) -> FloatArray:
        """log Z = n log(1 + exp(-gap/y)).

        >>> lz = SpinGasModel(150).log_partition(4.0)
        >>> bool(np.isclose(lz, 150 * math.log(1 + math.exp(-0.25)), rtol=1e-14))
        True
        """
        return self.n * np.log1p(np.exp(-self.beta(y)))  # type: ignore[no-any-return]

    def log_likelihood(self, outcome: npt.ArrayLike, y: npt.ArrayLike) -> FloatArray:
        """Binomial log-probability of r excited spins, in saddle-point form.

        Its absolute error stays near machine precision for large 'n', where
        log C(n, r) - r gap/y - log Z loses about n eps to cancellation.

        >>> m = SpinGasModel(100_000)
        >>> r = m.outcomes()
        >>> total = np.exp(m.log_likelihood(r, 4.0)).sum()
        >>> bool(abs(total - 1) < 1e-12)
        True
        """
        r = self.validate_outcomes(outcome).astype(np.float64)
        n = self.n
        beta = self.beta(y)
        log_q = -np.log1p(np.exp(-beta))
        log_p = log_q - beta
        rest = n - r
        with np.errstate(divide="ignore", invalid="ignore"):
            interior = (
                _stirling_error(n)
                - _stirling_error(r)
                - _stirling_error(rest)
                - _deviance_term(r, n * expit(-beta))
                - _deviance_term(rest, n * expit(beta))
                + 0.5 * np.log(n / (2 * math.pi * r * rest))
            )
        return np.where(  # type: ignore[no-any-return]
            r == 0, n * log_q, np.where(rest == 0, n * log_p, interior)
        )

    def record_log_likelihood(
        self, record: npt.ArrayLike, y: npt.ArrayLike
    ) -> FloatArray:
        r = self.validate_outcomes(record).ravel()
        mu = r.size
        total = int(r.sum())
        log_binomials = math.fsum(self.log_binomial(r))
        beta = self.beta(y)
        return log_binomials - total * beta - mu * self.n * np.log1p(np.exp(-beta))  # type: ignore[no-any-return]

    def occupation(self, y: npt.ArrayLike) -> FloatArray:
        """Probability 1/(exp(gap/y) + 1) for one spin to be excited."""
        return expit(-self.beta(y))  # type: ignore[no-any-return]

    def mean_outcome(self, y: npt.ArrayLike) -> FloatArray:
        """Expected number of excited spins n/(exp(gap/y) + 1)."""
        return self.n * self.occupation(y)

    def outcome_variance(self, y: npt.ArrayLike) -> FloatArray:
        """Variance of the number of excited spins."""
        q = self.occupation(y)
        return self.n * q * (1 - q)  # type: ignore[no-any-return]

    def fisher_information(self, y: npt.ArrayLike) -> FloatArray:
        """n / (4 y'^4 cosh^2(1/(2y'))) / gap^2 with y' = y/gap.

        >>> round(float(SpinGasModel(1).fisher_information(1.0)), 5)
        0.19661
        """
        beta = self.beta(y)
        e = np.exp(-beta)
        return self.n * e * beta**4 / (self.gap**2 * (1 + e) ** 2)  # type: ignore[no-any-return]

    def outcome_cdf(self, y: float) -> FloatArray:
        """Cumulative probabilities f(r) = P(R <= r), r = 0..n.

        >>> SpinGasModel(1).outcome_cdf(1e6).round(6).tolist()
        [0.5, 1.0]
        """
        log_cdf = np.logaddexp.accumulate(self.log_likelihood(self.outcomes(), y))
        return np.exp(log_cdf - log_cdf[-1])  # type: ignore[no-any-return]


@hookimpl
def thermal_model() -> Type[ThermalModel]:
    return SpinGasModel
