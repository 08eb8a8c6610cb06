"""Experiment manifests."""
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import Field, root_validator, validator

from .grid import Support
from .simulate import MAX_SEED
from .types import Manifest, ModelName


def log_spaced(lo: float, hi: float, count: int) -> List[int]:
    """Return 'count' distinct integers spaced logarithmically in [lo, hi].

    >>> log_spaced(10, 1e5, 5)
    [10, 100, 1000, 10000, 100000]
    """
    values = np.unique(np.rint(np.logspace(math.log10(lo), math.log10(hi), count)))
    return [int(v) for v in values]


def parse_int_list(value: Union[str, int, List[Any]]) -> List[int]:
    """Parse a comma-separated list of integers.

    >>> parse_int_list("10, 100,1e3")
    [10, 100, 1000]
    >>> parse_int_list(5)
    [5]
    """
    if isinstance(value, str):
        items: List[Any] = [v for v in value.split(",") if v.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [value]
    result = []
    for item in items:
        number = float(item)
        if number != int(number):
            raise ValueError(f"expecting an integer, got {item!r}")
        result.append(int(number))
    return result


class ExperimentConfig(Manifest):
    """Parameters of an experiment run.

    Fields left unset take per-command defaults, see `COMMAND_DEFAULTS`.
    """

    model: ModelName = Field(
        default=ModelName.spin_gas, description="Thermal model identifier."
    )
    n: int = Field(default=150, ge=0, description="Number of spins of the spin gas.")
    gap: float = Field(default=1.0, gt=0, description="Energy scale of the thermometer.")
    y_min: float = Field(default=0.1, gt=0, description="Lower support bound.")
    y_max: float = Field(default=10.0, gt=0, description="Upper support bound.")
    nodes: Optional[int] = Field(
        default=None, ge=2, description="Number of log-temperature grid nodes."
    )
    true_y: Optional[float] = Field(
        default=None, gt=0, description="True temperature of simulated records."
    )
    mu: Optional[int] = Field(
        default=None, ge=1, description="Number of simulated outcomes."
    )
    seed: int = Field(default=1, ge=0, le=MAX_SEED, description="Random seed.")
    theta0: float = Field(
        default=3.0, gt=0, description="Seed temperature of the local estimator."
    )
    n_sweep: Optional[List[int]] = Field(
        default=None, description="Spin counts of bound sweeps."
    )
    histogram_prefixes: List[int] = Field(
        default=[50, 100, 200],
        description="Record lengths at which oscillator histograms are fitted.",
    )
    bins: Optional[int] = Field(
        default=None, ge=5, description="Number of histogram bins."
    )
    tau: float = Field(
        default=0.05, gt=0, lt=1, description="Relative tolerance of n(tau)."
    )
    jobs: Optional[int] = Field(
        default=None, ge=1, description="Number of worker processes."
    )
    bounds: Optional[Path] = Field(
        default=None, description="Bounds CSV file to fit."
    )
    trace: Optional[Path] = Field(
        default=None, description="Trace CSV file to estimate from."
    )
    out: Optional[Path] = Field(default=None, description="Output CSV file.")

    @validator("n_sweep", "histogram_prefixes", pre=True)
    def __parse_int_list(cls, value: Any) -> Any:
        if value is None:
            return value
        return parse_int_list(value)

    @validator("n_sweep")
    def __validate_n_sweep(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None:
            if not value:
                raise ValueError("spin count sweep must not be empty")
            if min(value) < 0:
                raise ValueError("spin counts must be non-negative")
        return value

    @validator("histogram_prefixes")
    def __validate_histogram_prefixes(cls, value: List[int]) -> List[int]:
        if any(v < 10 for v in value):
            raise ValueError("histograms need at least 10 outcomes")
        return sorted(set(value))

    @root_validator(skip_on_failure=True)
    def __validate_support(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if not values["y_min"] < values["y_max"]:
            raise ValueError(
                f"y_min ({values['y_min']}) must be smaller than y_max ({values['y_max']})"
            )
        return values

    @property
    def support(self) -> Support:
        return Support(self.y_min, self.y_max)

    def model_params(self) -> Dict[str, Any]:
        """Keyword arguments of the configured model class."""
        if self.model == ModelName.spin_gas:
            return {"n": self.n, "gap": self.gap}
        return {"gap": self.gap}


#: Default values of unset fields per command.
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "bounds": {"n_sweep": log_spaced(10, 1e5, 12)},
    "sequential": {"n": 150, "true_y": 4.0, "mu": 500, "theta0": 3.0},
    "oscillator": {"model": ModelName.oscillator, "true_y": 6.0, "mu": 200},
    "fit": {"n_sweep": log_spaced(1e2, 1e5, 12)},
    "simulate": {"true_y": 4.0, "mu": 500},
    "estimate": {},
}


def for_command(command: str, **values: Any) -> ExperimentConfig:
    """Build the configuration of 'command' from 'values', unset ones taking
    the command defaults.

    >>> for_command("sequential").mu
    500
    >>> for_command("oscillator", mu=50).model
    <ModelName.oscillator: 'oscillator'>
    """
    values = {k: v for k, v in values.items() if v is not None}
    return ExperimentConfig.parse_obj({**COMMAND_DEFAULTS[command], **values})
