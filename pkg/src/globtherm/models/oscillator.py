"""Position measurement of a thermal harmonic oscillator."""
import math
from typing import Type

import attr
import numpy as np
import numpy.typing as npt

from .. import exceptions, hookimpl
from ..types import FloatArray, ModelName, OutcomeKind
from . import ThermalModel, check_gap


@attr.s(auto_attribs=True, frozen=True, slots=True)
class OscillatorModel(ThermalModel):
    """Gaussian position distribution with variance sigma^2(y) = coth(gap/(2y))/2.

    >>> round(float(OscillatorModel().variance(6.0)), 4)
    6.0139
    """

    name = str(ModelName.oscillator)
    outcome_kind = OutcomeKind.continuous

    gap: float = attr.ib(default=1.0, converter=check_gap)

    def validate_outcomes(self, outcomes: npt.ArrayLike) -> FloatArray:
        try:
            array = np.asarray(outcomes, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise exceptions.InvalidOutcome(f"invalid position outcomes: {e}") from e
        if not np.all(np.isfinite(array)):
            raise exceptions.InvalidOutcome("position outcomes must be finite")
        return array

    def variance(self, y: npt.ArrayLike) -> FloatArray:
        """Position variance coth(gap/(2y))/2."""
        beta = self.beta(y)
        return 0.5 * (1 + np.exp(-beta)) / -np.expm1(-beta)  # type: ignore[no-any-return]

    def log_likelihood(self, outcome: npt.ArrayLike, y: npt.ArrayLike) -> FloatArray:
        x = self.validate_outcomes(outcome)
        var = self.variance(y)
        return -(x**2) / (2 * var) - 0.5 * np.log(2 * np.pi * var)  # type: ignore[no-any-return]

    def record_log_likelihood(
        self, record: npt.ArrayLike, y: npt.ArrayLike
    ) -> FloatArray:
        x = self.validate_outcomes(record).ravel()
        mu = x.size
        sum_squares = math.fsum(x * x)
        var = self.variance(y)
        return -sum_squares / (2 * var) - 0.5 * mu * np.log(2 * np.pi * var)  # type: ignore[no-any-return]

    def fisher_information(self, y: npt.ArrayLike) -> FloatArray:
        """1 / (2 y'^4 sinh^2(1/y')) / gap^2 with y' = y/gap."""
        beta = self.beta(y)
        return (  # type: ignore[no-any-return]
            2 * np.exp(-2 * beta) * beta**4 / (self.gap**2 * np.expm1(-2 * beta) ** 2)
        )


@hookimpl
def thermal_model() -> Type[ThermalModel]:
    return OscillatorModel
