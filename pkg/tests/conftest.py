import pathlib
from typing import Iterator
from unittest.mock import patch

import pytest

from globtherm.ctx import Context
from globtherm.grid import Support
from globtherm.settings import Settings


@pytest.fixture(scope="session", autouse=True)
def site_config() -> Iterator[None]:
    """Avoid looking up for configuration files in site directories."""
    with patch("globtherm.util.xdg_config", return_value=None), patch(
        "globtherm.util.etc_config", return_value=None
    ):
        yield None


@pytest.fixture
def settings(tmp_path: pathlib.Path) -> Settings:
    return Settings.parse_obj({"logpath": str(tmp_path / "log")})


@pytest.fixture
def ctx(settings: Settings) -> Context:
    return Context(settings=settings)


@pytest.fixture
def support() -> Support:
    return Support(0.1, 10)
