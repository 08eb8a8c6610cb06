import json
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Type, TypeVar

import yaml
from pydantic import BaseSettings, Field, validator

from . import __name__ as pkgname
from . import exceptions, util

try:
    from pydantic.env_settings import SettingsSourceCallable
except ImportError:
    SettingsSourceCallable = Callable[[BaseSettings], Dict[str, Any]]  # type: ignore[misc]


T = TypeVar("T", bound=BaseSettings)


def frozen(cls: Type[T]) -> Type[T]:
    cls.Config.frozen = True
    return cls


def default_logpath() -> Path:
    """Return the default directory for kept command logs.

    >>> default_logpath()  # doctest: +ELLIPSIS
    PosixPath('.../globtherm/log')
    """
    return util.xdg_data_home() / pkgname / "log"


@frozen
class QuadratureSettings(BaseSettings):
    """Settings for log-space quadrature and outcome enumeration."""

    class Config:
        env_prefix = "globtherm_quadrature_"

    node_count: int = Field(
        default=2001,
        ge=2,
        description="Number of log-temperature nodes of posterior grids.",
    )

    max_outcomes: int = Field(
        default=100_001,
        ge=1,
        description="Maximum number of enumerated outcomes in bound computations.",
    )

    edge_cells: int = Field(
        default=3,
        ge=0,
        description="Number of grid cells next to a support edge checked for clipping.",
    )

    edge_mass: float = Field(
        default=0.5,
        gt=0,
        le=1,
        description="Posterior mass near a support edge above which an estimate is flagged.",
    )


@frozen
class HistogramSettings(BaseSettings):
    """Settings for the Gaussian histogram fit."""

    class Config:
        env_prefix = "globtherm_histogram_"

    max_iterations: int = Field(
        default=100, ge=1, description="Maximum number of Gauss-Newton iterations."
    )

    step_tolerance: float = Field(
        default=1e-10,
        gt=0,
        description="Relative parameter step below which the fit is converged.",
    )


def yaml_settings_source(settings: BaseSettings) -> Dict[str, Any]:
    """Load settings values 'settings.yaml' file if found in user or system
    config directory directory.
    """
    assert isinstance(settings, SiteSettings)
    fpath = settings.site_settings()
    if fpath is None:
        return {}
    with fpath.open() as f:
        values = yaml.safe_load(f)
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise exceptions.ConfigurationError(
            fpath, "failed to load site settings, expecting an object"
        )
    return values


def json_config_settings_source(settings: BaseSettings) -> Dict[str, Any]:
    """Load settings values from 'SETTINGS' environment variable.

    If this variable has a value starting with @, it is interpreted as a path
    to a JSON file. Otherwise, a JSON serialization is expected.
    """
    env_settings = os.getenv("SETTINGS")
    if not env_settings:
        return {}
    if env_settings.startswith("@"):
        config = Path(env_settings[1:])
        encoding = settings.__config__.env_file_encoding
        # May raise FileNotFoundError, which is okay here.
        env_settings = config.read_text(encoding)
    return json.loads(env_settings)  # type: ignore[no-any-return]


@frozen
class Settings(BaseSettings):
    class Config:
        env_prefix = "globtherm_"

    quadrature: QuadratureSettings = QuadratureSettings()
    histogram: HistogramSettings = HistogramSettings()

    float_format: str = Field(
        default="%.17g",
        description="printf-style format of floating point values in CSV output.",
    )

    jobs: int = Field(
        default=1,
        ge=1,
        description="Number of worker processes used by bound sweeps.",
    )

    logpath: Path = Field(
        default_factory=default_logpath,
        description="Directory where log files of failed command executions will be kept",
        title="CLI log directory",
    )

    @validator("float_format")
    def __validate_float_format(cls, value: str) -> str:
        """Validate that 'float_format' formats a float."""
        try:
            formatted = value % 0.5
        except (TypeError, ValueError):
            formatted = ""
        if "5" not in formatted:
            raise ValueError(f"expecting a floating point format, got {value!r}")
        return value


@frozen
class SiteSettings(Settings):
    """Settings loaded from site-sources.

    Load user or site settings from:
    - 'settings.yaml' if found in user or system configuration directory, and,
    - SETTINGS environment variable.
    """

    @staticmethod
    def site_settings() -> Optional[Path]:
        """Return path to 'settings.yaml' if found in site configuration
        directories.
        """
        for hdlr in (util.xdg_config, util.etc_config):
            fpath = hdlr("settings.yaml")
            if fpath is not None:
                return fpath
        return None

    class Config:
        @classmethod
        def customise_sources(
            cls,
            init_settings: SettingsSourceCallable,
            env_settings: SettingsSourceCallable,
            file_secret_settings: SettingsSourceCallable,
        ) -> Tuple[SettingsSourceCallable, ...]:
            return (
                init_settings,
                env_settings,
                yaml_settings_source,
                json_config_settings_source,
            )
