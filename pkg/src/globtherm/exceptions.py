import abc
from pathlib import Path


class Error(Exception, metaclass=abc.ABCMeta):
    """Base class for operational error."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class InvalidInput(Error, ValueError):
    """Input value rejected by an operation's preconditions."""


class InvalidSupport(InvalidInput):
    """Temperature support is not a finite, strictly positive interval."""


class InvalidOutcome(InvalidInput):
    """Measurement outcome outside the model's outcome space."""


class InvalidParameter(InvalidInput):
    """Numeric parameter out of its admissible range."""


class EnumerationTooLarge(InvalidInput):
    """Outcome space too large to be enumerated."""

    def __init__(self, size: int, cap: int) -> None:
        self.size = size
        self.cap = cap
        super().__init__(
            f"cannot enumerate {size} outcomes (configured cap is {cap})"
        )


class NotFound(Error, metaclass=abc.ABCMeta):
    """Base class for errors when an object with `name` is not found."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(name)

    @abc.abstractproperty
    def object_type(self) -> str:
        """Type of object that's not found."""
        raise NotImplementedError

    def __str__(self) -> str:
        return f"{self.object_type} '{self.name}' not found"


class ModelNotFound(NotFound):
    """No thermal model registered under this identifier."""

    object_type = "thermal model"


class UnsupportedError(Error, RuntimeError):
    """Operation is unsupported."""


class NumericalError(Error, ArithmeticError):
    """A numerical procedure failed or produced unusable values."""


class PosteriorUnderflow(NumericalError):
    """Posterior density vanished on the whole support."""


class QuadratureError(NumericalError):
    """Quadrature produced non-finite values or violated an identity."""


class FitError(NumericalError):
    """Least-squares fit refused or did not converge."""


class InversionError(NumericalError):
    """Fitted spread cannot be mapped back to a temperature."""


class ConfigurationError(Error, LookupError):
    """A configuration entry is missing or invalid."""

    def __init__(self, path: Path, message: str) -> None:
        self.path = path  #: configuration file path
        super().__init__(message)

    def __str__(self) -> str:
        return f"{super().__str__()} (path: {self.path})"
