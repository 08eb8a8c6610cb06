import pathlib

import pytest

from globtherm import exceptions


def test_error() -> None:
    err = exceptions.Error("oups")
    assert str(err) == "oups"


def test_notfound() -> None:
    err = exceptions.ModelNotFound("ising")
    assert str(err) == "thermal model 'ising' not found"


def test_configurationerror() -> None:
    err = exceptions.ConfigurationError(
        pathlib.Path("/etc/globtherm/settings.yaml"), "expecting an object"
    )
    assert str(err) == "expecting an object (path: /etc/globtherm/settings.yaml)"


def test_enumeration_too_large() -> None:
    err = exceptions.EnumerationTooLarge(1_000_001, 100_001)
    assert err.size == 1_000_001 and err.cap == 100_001
    assert str(err) == "cannot enumerate 1000001 outcomes (configured cap is 100001)"
    assert isinstance(err, exceptions.InvalidInput)


@pytest.mark.parametrize(
    "cls, base",
    [
        (exceptions.InvalidSupport, ValueError),
        (exceptions.InvalidOutcome, ValueError),
        (exceptions.InvalidParameter, ValueError),
        (exceptions.PosteriorUnderflow, ArithmeticError),
        (exceptions.QuadratureError, ArithmeticError),
        (exceptions.FitError, exceptions.NumericalError),
        (exceptions.InversionError, exceptions.NumericalError),
        (exceptions.UnsupportedError, RuntimeError),
    ],
)
def test_hierarchy(cls: type, base: type) -> None:
    assert issubclass(cls, base)
    assert issubclass(cls, exceptions.Error)
