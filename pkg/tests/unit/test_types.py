import pydantic
import pytest

from globtherm.types import Manifest, ModelName, OutcomeKind, StrEnum


class Point(Manifest):
    x: float
    y: float


def test_forbid_extra() -> None:
    with pytest.raises(pydantic.ValidationError, match="extra fields not permitted"):
        Point(x=0, y=1, z=2)  # type: ignore[call-arg]


def test_strenum() -> None:
    class Pets(StrEnum):
        cat = "cat"

    assert str(Pets.cat) == "cat"
    assert str(ModelName.spin_gas) == "spin-gas"
    assert ModelName("oscillator") is ModelName.oscillator
    assert str(OutcomeKind.discrete) == "discrete"
