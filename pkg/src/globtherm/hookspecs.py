from typing import TYPE_CHECKING, Type

import pluggy

from . import __name__ as pkgname

if TYPE_CHECKING:
    from .models import ThermalModel

hookspec = pluggy.HookspecMarker(pkgname)


@hookspec
def thermal_model() -> "Type[ThermalModel]":
    """Return the thermal model class provided by a plugin."""
    raise NotImplementedError
