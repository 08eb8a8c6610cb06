import logging
from typing import Any, Dict, Type

from . import exceptions, plugin_manager
from .models import ThermalModel
from .settings import Settings

logger = logging.getLogger(__name__)


class Context:
    """Execution context, holding settings and registered thermal models."""

    def __init__(self, *, settings: Settings) -> None:
        self.settings = settings
        self.pm = plugin_manager()
        self.hook = self.pm.hook

    def models(self) -> Dict[str, Type[ThermalModel]]:
        """Return registered thermal model classes by identifier."""
        return {cls.name: cls for cls in self.hook.thermal_model()}

    def model(self, name: str, **params: Any) -> ThermalModel:
        """Instantiate thermal model registered as 'name' with 'params'.

        :raises ~globtherm.exceptions.ModelNotFound: if no model is registered
            under 'name'.
        """
        try:
            cls = self.models()[str(name)]
        except KeyError:
            raise exceptions.ModelNotFound(str(name)) from None
        logger.debug("using %s model with %s", name, params)
        return cls(**params)
