from pathlib import Path
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from globtherm import exceptions
from globtherm.settings import Settings, SiteSettings


def test_json_config_settings_source(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    settings = tmp_path / "settings.json"
    settings.write_text('{"quadrature": {"node_count": 401}}')
    with monkeypatch.context() as m:
        m.setenv("SETTINGS", f"@{settings}")
        s = SiteSettings()
    assert s.quadrature.node_count == 401
    with monkeypatch.context() as m:
        m.setenv("SETTINGS", '{"jobs": 4, "histogram": {"max_iterations": 20}}')
        s = SiteSettings()
    assert s.jobs == 4
    assert s.histogram.max_iterations == 20
    with monkeypatch.context() as m:
        m.setenv("SETTINGS", f"@{tmp_path / 'notfound'}")
        with pytest.raises(FileNotFoundError):
            SiteSettings()


def test_yaml_settings(tmp_path: Path) -> None:
    configdir = tmp_path / "globtherm"
    configdir.mkdir()
    settings_fpath = configdir / "settings.yaml"
    settings_fpath.write_text("float_format: '%.6e'\nquadrature:\n  edge_cells: 5\n")
    with patch(
        "globtherm.util.xdg_config", return_value=settings_fpath
    ) as xdg_config, patch("globtherm.util.etc_config") as etc_config:
        s = SiteSettings()
    assert s.float_format == "%.6e"
    assert s.quadrature.edge_cells == 5
    xdg_config.assert_called_once_with("settings.yaml")
    assert not etc_config.called

    settings_fpath.write_text("hello")
    with patch(
        "globtherm.util.xdg_config", return_value=settings_fpath
    ) as xdg_config, patch("globtherm.util.etc_config") as etc_config:
        with pytest.raises(exceptions.ConfigurationError, match="expecting an object"):
            SiteSettings()
    xdg_config.assert_called_once_with("settings.yaml")
    assert not etc_config.called


def test_env_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    with monkeypatch.context() as m:
        m.setenv("globtherm_jobs", "3")
        s = Settings()
    assert s.jobs == 3


def test_settings(tmp_path: Path) -> None:
    s = Settings(logpath=tmp_path)
    assert s.quadrature.node_count == 2001
    assert s.quadrature.max_outcomes == 100_001
    assert s.quadrature.edge_cells == 3
    assert s.quadrature.edge_mass == 0.5
    assert s.histogram.max_iterations == 100
    assert s.histogram.step_tolerance == 1e-10
    assert s.float_format == "%.17g"
    assert s.jobs == 1
    assert s.logpath == tmp_path

    with pytest.raises(TypeError, match="immutable"):
        s.jobs = 2  # type: ignore[misc]


@pytest.mark.parametrize(
    "values",
    [
        {"float_format": "%d"},
        {"float_format": "%s%s"},
        {"float_format": "g"},
        {"jobs": 0},
        {"quadrature": {"node_count": 1}},
        {"quadrature": {"edge_mass": 1.5}},
        {"histogram": {"step_tolerance": 0}},
    ],
    ids=str,
)
def test_settings_invalid(values: dict) -> None:
    with pytest.raises(ValidationError):
        Settings.parse_obj(values)
