import enum
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from ._compat import TypeAlias

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]


class StrEnum(str, enum.Enum):
    def __str__(self) -> str:
        assert isinstance(self.value, str)
        return self.value


@enum.unique
class AutoStrEnum(StrEnum):
    """Enum base class with automatic values set to member name.

    >>> class Kind(AutoStrEnum):
    ...     discrete = enum.auto()
    ...     continuous = enum.auto()
    >>> Kind.discrete
    <Kind.discrete: 'discrete'>
    >>> str(Kind.continuous)
    'continuous'
    """

    def _generate_next_value_(name, *args: Any) -> str:  # type: ignore[override]
        return name


class OutcomeKind(AutoStrEnum):
    """Nature of a thermal model's outcome space."""

    discrete = enum.auto()
    """enumerable integers 0..r_max"""
    continuous = enum.auto()
    """real line"""


class ModelName(StrEnum):
    """Identifiers of the shipped thermal models."""

    spin_gas = "spin-gas"
    oscillator = "oscillator"


class Manifest(BaseModel):
    """Base class for manifest data classes."""

    class Config:
        allow_mutation = False
        extra = "forbid"
        validate_always = True
        validate_assignment = True
