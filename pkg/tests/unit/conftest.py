from typing import List

import numpy as np
import pytest

from globtherm.models.oscillator import OscillatorModel
from globtherm.models.spingas import SpinGasModel
from globtherm.simulate import RngStream, sample


@pytest.fixture
def spin_gas() -> SpinGasModel:
    return SpinGasModel(150)


@pytest.fixture
def oscillator() -> OscillatorModel:
    return OscillatorModel()


@pytest.fixture
def spin_record(spin_gas: SpinGasModel) -> List[int]:
    trace = sample(spin_gas, 4.0, 60, RngStream(1))
    return [int(r) for r in trace.outcomes]


@pytest.fixture
def positions(oscillator: OscillatorModel) -> np.ndarray:
    return sample(oscillator, 6.0, 80, RngStream(3)).outcomes
