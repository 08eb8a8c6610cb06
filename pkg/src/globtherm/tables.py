"""CSV tables with provenance header lines."""
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from . import __name__ as pkgname
from . import exceptions, util, version
from .simulate import Trace
from .task import task

logger = logging.getLogger(__name__)

TRACE_PREFIX = "# trace: "


def header(config_digest: str, seed: Optional[int]) -> str:
    """Provenance comment line of CSV outputs.

    >>> header("abc123", 7)  # doctest: +ELLIPSIS
    '# globtherm version=... config=abc123 seed=7'
    """
    return f"# {pkgname} version={version()} config={config_digest} seed={seed}"


def to_csv(
    frame: pd.DataFrame, headers: List[str], float_format: str = "%.17g"
) -> str:
    """Serialize 'frame' as CSV text, preceded by comment 'headers'."""
    content = frame.to_csv(index=False, float_format=float_format)
    return util.with_header(content, "\n".join(headers))


def read_csv(path: Path) -> Tuple[List[str], pd.DataFrame]:
    """Read a CSV file written by `to_csv`, returning comment lines and
    data.
    """
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise exceptions.InvalidInput(f"file not found: {path}") from None
    comments = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        comments.append(line)
    try:
        frame = pd.read_csv(
            io.StringIO(text), comment="#", float_precision="round_trip"
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise exceptions.InvalidInput(f"malformed CSV file {path}: {e}") from None
    return comments, frame


def trace_frame(trace: Trace) -> pd.DataFrame:
    return pd.DataFrame(
        {"i": np.arange(1, trace.mu + 1), "outcome": trace.outcomes}
    )


def trace_csv(trace: Trace, headers: List[str], float_format: str = "%.17g") -> str:
    """CSV text of 'trace', its metadata stored as a comment line."""
    metadata = TRACE_PREFIX + json.dumps(trace.metadata(), sort_keys=True)
    return to_csv(trace_frame(trace), headers + [metadata], float_format)


def read_trace(path: Path) -> Trace:
    """Load a trace written by `trace_csv`."""
    comments, frame = read_csv(path)
    metadata: Optional[Dict[str, Any]] = None
    for line in comments:
        if line.startswith(TRACE_PREFIX):
            metadata = json.loads(line[len(TRACE_PREFIX) :])
    if metadata is None:
        raise exceptions.InvalidInput(f"no trace metadata found in {path}")
    if "outcome" not in frame.columns:
        raise exceptions.InvalidInput(f"no 'outcome' column in {path}")
    try:
        outcomes = frame["outcome"].to_numpy()
        trace = Trace(
            model=str(metadata["model"]),
            params=dict(metadata["params"]),
            true_y=float(metadata["true_y"]),
            outcomes=outcomes,
            seed=int(metadata["seed"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise exceptions.InvalidInput(f"invalid trace metadata in {path}: {e}") from None
    if trace.mu != int(metadata.get("mu", trace.mu)):
        raise exceptions.InvalidInput(
            f"trace {path} holds {trace.mu} outcomes, expecting {metadata['mu']}"
        )
    return trace


@task("writing {path}")
def write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content)


@write.revert("removing {path}")
def revert_write(path: Path, content: str) -> None:
    path.unlink(missing_ok=True)
