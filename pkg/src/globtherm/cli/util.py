import json
import logging
import os
import pathlib
import tempfile
import time
from contextlib import contextmanager
from functools import singledispatch, wraps
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Tuple,
    TypeVar,
    cast,
)

import click
import pydantic
import pydantic.json
import rich
import yaml
from rich.console import RenderableType
from rich.table import Table

from .. import __name__ as pkgname
from .. import exceptions, interface, task
from ..ctx import Context
from ..tables import write

logger = logging.getLogger(pkgname)


class NumericalFailure(click.ClickException):
    """Failure of a numerical procedure."""

    exit_code = 2


@singledispatch
def prettify(value: Any) -> str:
    """Prettify a value

    The prettification will depend on value type.

    >>> prettify([None, 1, "foo"])
    'None, 1, foo'
    >>> prettify(None)
    ''
    >>> prettify(0.1 + 0.2)
    '0.3'
    """
    return str(value)


@prettify.register(float)
def _(value: float) -> str:
    """Prettify a float value, with 6 significant digits."""
    return f"{value:.6g}"


@prettify.register(list)
def _(value: List[Any]) -> str:
    """Prettify a List value"""
    return ", ".join((str(x) for x in value))


@prettify.register(type(None))
def _(value: None) -> str:
    """Prettify a None value"""
    return ""


def print_table_for(
    items: Iterable[Mapping[str, Any]],
    title: Optional[str] = None,
    *,
    display: Callable[[RenderableType], None] = rich.print,
    **kwargs: Any,
) -> None:
    """Render a list of items as a table.

    >>> items = [{"quantity": "q", "value": -1.25, "stderr": 0.01},
    ...          {"quantity": "c1", "value": 51.7, "stderr": None}]
    >>> print_table_for(items, title="fit")  # doctest: +NORMALIZE_WHITESPACE
                  fit
    ┏━━━━━━━━━━┳━━━━━━━┳━━━━━━━━┓
    ┃ quantity ┃ value ┃ stderr ┃
    ┡━━━━━━━━━━╇━━━━━━━╇━━━━━━━━┩
    │ q        │ -1.25 │ 0.01   │
    │ c1       │ 51.7  │        │
    └──────────┴───────┴────────┘
    """
    table = None
    headers: List[str] = []
    rows = []
    for item in items:
        row = []
        hdr = []
        for k, v in list(item.items()):
            hdr.append(k)
            row.append(prettify(v))
        if not headers:
            headers = hdr[:]
        rows.append(row)
    if not rows:
        return
    table = Table(*headers, title=title, **kwargs)
    for row in rows:
        table.add_row(*row)
    display(table)


def print_json_for(
    data: Any, *, display: Callable[[str], None] = rich.print_json
) -> None:
    """Render `data` as JSON.

    >>> print_json_for([{"quantity": "q", "value": -1.25}], display=rich.print)
    [{"quantity": "q", "value": -1.25}]
    """
    display(json.dumps(data, default=pydantic.json.pydantic_encoder))


C = TypeVar("C", bound=Callable[..., Any])


def pass_ctx(f: C) -> C:
    """Command decorator passing 'Context' bound to click.Context's object."""

    @wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        context = click.get_current_context()
        ctx = context.obj.ctx
        assert isinstance(ctx, Context), ctx
        return context.invoke(f, ctx, *args, **kwargs)

    return cast(C, wrapper)


def load_config(
    command: str, config_file: Optional[pathlib.Path], **flags: Any
) -> interface.ExperimentConfig:
    """Build the experiment configuration of 'command' from an optional YAML
    file of flat key-value pairs and from command-line flags, flags taking
    precedence.
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        try:
            with config_file.open() as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise exceptions.ConfigurationError(config_file, f"invalid YAML: {e}")
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise exceptions.ConfigurationError(
                config_file, "expecting a mapping of parameters"
            )
        values = {str(k).replace("-", "_"): v for k, v in data.items()}
        logger.debug("loaded configuration %s from %s", values, config_file)
    values.update({k: v for k, v in flags.items() if v is not None})
    return interface.for_command(command, **values)


def emit(content: str, out: Optional[pathlib.Path]) -> None:
    """Write 'content' to file 'out', or to stdout."""
    if out is None:
        click.echo(content, nl=False)
    else:
        write(out, content)


@contextmanager
def command_logging(logdir: pathlib.Path) -> Iterator[None]:
    logdir_exists = logdir.exists()
    if not logdir_exists:
        logdir.mkdir(parents=True)
    logfilename = f"{time.time()}.log"
    logfile = logdir / logfilename
    try:
        handler = logging.FileHandler(logfile)
    except OSError:
        # Might be, e.g. PermissionError, if log file path is not writable.
        logfile = pathlib.Path(
            tempfile.NamedTemporaryFile(prefix=pkgname, suffix=logfilename).name
        )
        handler = logging.FileHandler(logfile)
    formatter = logging.Formatter(
        fmt="%(levelname)-8s - %(asctime)s - %(name)s:%(filename)s:%(lineno)d - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    keep_logfile = False
    try:
        yield None
    except (click.Abort, click.ClickException, click.exceptions.Exit):
        raise
    except Exception:
        keep_logfile = True
        logger.exception("an unexpected error occurred")
        raise click.ClickException(
            "an unexpected error occurred, this is probably a bug; "
            f"details can be found at {logfile}"
        )
    finally:
        logger.removeHandler(handler)
        handler.close()
        if not keep_logfile:
            os.unlink(logfile)
            if not logdir_exists and next(logdir.iterdir(), None) is None:
                logdir.rmdir()


@contextmanager
def usage_errors_as_invalid_input() -> Iterator[None]:
    """Exit with status 1 on invalid command-line input, status 2 being
    reserved to numerical failures.
    """
    try:
        yield
    except click.UsageError as e:
        e.exit_code = 1
        raise


class Command(click.Command):
    def make_context(
        self,
        info_name: Optional[str],
        args: List[str],
        parent: Optional[click.Context] = None,
        **extra: Any,
    ) -> click.Context:
        with usage_errors_as_invalid_input():
            return super().make_context(info_name, args, parent=parent, **extra)

    def invoke(self, context: click.Context) -> Any:
        ctx = context.obj.ctx
        displayer = context.obj.displayer
        logger = logging.getLogger(pkgname)
        with command_logging(ctx.settings.logpath):
            try:
                with task.displayer_installed(displayer):
                    return super().invoke(context)
            except exceptions.NumericalError as e:
                logger.debug("a numerical error occurred", exc_info=True)
                raise NumericalFailure(str(e))
            except exceptions.Error as e:
                logger.debug("an internal error occurred", exc_info=True)
                raise click.ClickException(str(e))
            except pydantic.ValidationError as e:
                logger.debug("a validation error occurred", exc_info=True)
                raise click.ClickException(str(e))


class Group(click.Group):
    command_class = Command
    group_class = type

    def make_context(
        self,
        info_name: Optional[str],
        args: List[str],
        parent: Optional[click.Context] = None,
        **extra: Any,
    ) -> click.Context:
        with usage_errors_as_invalid_input():
            return super().make_context(info_name, args, parent=parent, **extra)

    def resolve_command(
        self, ctx: click.Context, args: List[str]
    ) -> Tuple[Optional[str], Optional[click.Command], List[str]]:
        with usage_errors_as_invalid_input():
            return super().resolve_command(ctx, args)


config_option = click.option(
    "--config",
    "config_file",
    type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
    metavar="FILE",
    help="YAML file of experiment parameters; command-line flags take precedence.",
)
out_option = click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=pathlib.Path),
    metavar="CSV",
    help="Output CSV file (default to stdout).",
)
model_option = click.option(
    "--model",
    type=click.Choice(["spin-gas", "oscillator"]),
    help="Thermal model.",
)
n_option = click.option("--n", "n", type=int, help="Number of spins of the spin gas.")
gap_option = click.option("--gap", type=float, help="Energy scale of the thermometer.")
ymin_option = click.option("--ymin", "y_min", type=float, help="Lower support bound.")
ymax_option = click.option("--ymax", "y_max", type=float, help="Upper support bound.")
nodes_option = click.option(
    "--nodes", type=int, help="Number of log-temperature grid nodes."
)
true_y_option = click.option(
    "--true-y", type=float, help="True temperature of simulated outcomes."
)
mu_option = click.option("--mu", type=int, help="Number of simulated outcomes.")
seed_option = click.option("--seed", type=int, help="Random seed.")
theta0_option = click.option(
    "--theta0", type=float, help="Seed temperature of the local estimator."
)
n_sweep_option = click.option(
    "--n-sweep", metavar="N1,N2,...", help="Comma-separated spin counts."
)
jobs_option = click.option(
    "--jobs", type=int, help="Number of worker processes of bound sweeps."
)
bins_option = click.option("--bins", type=int, help="Number of histogram bins.")
tau_option = click.option("--tau", type=float, help="Relative tolerance of n(tau).")


def support_options(f: C) -> C:
    for option in (nodes_option, ymax_option, ymin_option):
        f = option(f)
    return f


def simulation_options(f: C) -> C:
    for option in (seed_option, mu_option, true_y_option):
        f = option(f)
    return f
