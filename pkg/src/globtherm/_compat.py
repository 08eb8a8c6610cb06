import sys
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _version
from typing import Protocol

pyversion = sys.version_info[:2]

if pyversion >= (3, 10):
    from typing import TypeAlias  # type: ignore[attr-defined]
else:
    from typing_extensions import TypeAlias


def version(distribution: str) -> str:
    """Return installed version of 'distribution', or "0+unknown" when
    running from a source tree.
    """
    try:
        return _version(distribution)
    except PackageNotFoundError:
        return "0+unknown"


__all__ = [
    "Protocol",
    "TypeAlias",
    "version",
]
