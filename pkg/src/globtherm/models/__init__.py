"""Thermal likelihood models.

Every model depends on temperature only through the ratio y/gap, `gap`
being the energy scale of the thermometer in units of the reference energy.
"""
import abc
import logging
import math
from typing import Any, ClassVar, Dict, Union

import numpy as np
import numpy.typing as npt

from .. import exceptions
from ..types import FloatArray, OutcomeKind

logger = logging.getLogger(__name__)

#: Relative step of the finite-difference score.
FISHER_STEP = 1e-5


def check_temperature(y: npt.ArrayLike) -> FloatArray:
    """Return 'y' as a float array, checking values are finite and positive.

    >>> check_temperature([1, 2.5]).tolist()
    [1.0, 2.5]
    >>> check_temperature(0)
    Traceback (most recent call last):
        ...
    globtherm.exceptions.InvalidParameter: temperature must be finite and positive, got 0.0
    """
    array = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(array) & (array > 0)):
        bad = array[~(np.isfinite(array) & (array > 0))].ravel()
        raise exceptions.InvalidParameter(
            f"temperature must be finite and positive, got {bad[0]}"
        )
    return array


def check_gap(gap: float) -> float:
    if not (math.isfinite(gap) and gap > 0):
        raise exceptions.InvalidParameter(
            f"energy gap must be finite and positive, got {gap}"
        )
    return float(gap)


class ThermalModel(abc.ABC):
    """Likelihood provider p(outcome|y)."""

    name: ClassVar[str]
    outcome_kind: ClassVar[OutcomeKind]

    gap: float

    def beta(self, y: npt.ArrayLike) -> FloatArray:
        """Dimensionless inverse temperature gap/y."""
        return self.gap / check_temperature(y)  # type: ignore[no-any-return]

    def parameters(self) -> Dict[str, Any]:
        """Model parameters, as keyword arguments of the model class."""
        return {"gap": self.gap}

    @abc.abstractmethod
    def validate_outcomes(self, outcomes: npt.ArrayLike) -> npt.NDArray[Any]:
        """Return 'outcomes' as an array, raising InvalidOutcome if any
        value is not in the outcome space.
        """

    @abc.abstractmethod
    def log_likelihood(self, outcome: npt.ArrayLike, y: npt.ArrayLike) -> FloatArray:
        """log p(outcome|y), broadcasting 'outcome' against 'y'."""

    @abc.abstractmethod
    def record_log_likelihood(
        self, record: npt.ArrayLike, y: npt.ArrayLike
    ) -> FloatArray:
        """Total log-likelihood of i.i.d. 'record' at every value of 'y'."""

    def fisher_information(self, y: npt.ArrayLike) -> FloatArray:
        """Closed-form Fisher information, in units of y."""
        raise NotImplementedError

    def outcomes(self) -> npt.NDArray[Any]:
        """Enumerate the outcome space."""
        raise exceptions.UnsupportedError(
            f"outcomes of {self.name} model cannot be enumerated"
        )


def log_likelihood(
    model: ThermalModel, outcome: npt.ArrayLike, y: npt.ArrayLike
) -> Union[float, FloatArray]:
    """Return log p(outcome|y) for 'model'."""
    value = model.log_likelihood(outcome, y)
    if np.ndim(value) == 0:
        return float(value)
    return value


def numerical_fisher_information(model: ThermalModel, y: float) -> float:
    """Fisher information of a discrete 'model' at 'y' from a central finite
    difference of the score, summed over all outcomes.
    """
    if model.outcome_kind != OutcomeKind.discrete:
        raise exceptions.UnsupportedError(
            f"no numerical Fisher information rule for {model.outcome_kind} outcomes"
        )
    y = float(check_temperature(y))
    h = FISHER_STEP * y
    outcomes = model.outcomes()
    logp = model.log_likelihood(outcomes, y)
    score = (
        model.log_likelihood(outcomes, y + h) - model.log_likelihood(outcomes, y - h)
    ) / (2 * h)
    return math.fsum(np.exp(logp) * score**2)


def fisher_information(
    model: ThermalModel, y: npt.ArrayLike
) -> Union[float, FloatArray]:
    """Fisher information of 'model' at 'y', in units of y.

    Use the model's closed form when available, a numerical evaluation for
    discrete models otherwise.
    """
    try:
        value = model.fisher_information(y)
    except NotImplementedError:
        if model.outcome_kind != OutcomeKind.discrete:
            raise exceptions.UnsupportedError(
                f"Fisher information is not available for {model.name} model"
            ) from None
        logger.debug("using numerical Fisher information for %s model", model.name)
        value = np.vectorize(
            lambda v: numerical_fisher_information(model, v), otypes=[float]
        )(check_temperature(y))
    if np.ndim(value) == 0:
        return float(value)
    return value
