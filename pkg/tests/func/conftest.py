from pathlib import Path
from typing import Any, List

import pytest

from globtherm.bounds import BoundPoint, sweep
from globtherm.grid import Support
from globtherm.interface import log_spaced


def pytest_addoption(parser: Any) -> None:
    parser.addoption(
        "--seeds",
        type=int,
        default=200,
        help="Number of seeded runs of Monte Carlo acceptance tests (default: %(default)s)",
    )
    parser.addoption(
        "--jobs",
        type=int,
        default=1,
        help="Number of worker processes of bound sweeps (default: %(default)s)",
    )


def pytest_collection_modifyitems(items: List[pytest.Item]) -> None:
    here = str(Path(__file__).parent)
    for item in items:
        if str(item.fspath).startswith(here):
            item.add_marker(pytest.mark.slow)


@pytest.fixture(scope="session")
def seeds(request: Any) -> int:
    value = request.config.getoption("--seeds")
    assert isinstance(value, int)
    return value


@pytest.fixture(scope="session")
def jobs(request: Any) -> int:
    value = request.config.getoption("--jobs")
    assert isinstance(value, int)
    return value


@pytest.fixture(scope="session")
def default_support() -> Support:
    return Support(0.1, 10)


@pytest.fixture(scope="session")
def bound_sweep(default_support: Support, jobs: int) -> List[BoundPoint]:
    """Bounds over 12 log-spaced spin counts from 10 to 10**5."""
    return sweep(log_spaced(10, 1e5, 12), default_support, jobs=jobs)


@pytest.fixture(scope="session")
def fit_sweep(default_support: Support, jobs: int) -> List[BoundPoint]:
    """Bounds over 12 log-spaced spin counts from 10**2 to 10**5."""
    return sweep(log_spaced(1e2, 1e5, 12), default_support, jobs=jobs)
