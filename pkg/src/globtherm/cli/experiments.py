import pathlib
from typing import List, Optional

import click
import humanize
import pandas as pd
from rich.console import Console

from .. import experiments, tables
from .. import task as taskmod
from ..ctx import Context
from ..interface import ExperimentConfig
from .util import (
    Command,
    bins_option,
    config_option,
    emit,
    gap_option,
    jobs_option,
    load_config,
    model_option,
    n_option,
    n_sweep_option,
    out_option,
    pass_ctx,
    print_json_for,
    print_table_for,
    simulation_options,
    support_options,
    tau_option,
    theta0_option,
)


def _headers(command: str, config: ExperimentConfig) -> List[str]:
    return [tables.header(experiments.config_digest(command, config), config.seed)]


def bins_path(out: pathlib.Path) -> pathlib.Path:
    """Path of the histogram table written next to 'out'.

    >>> bins_path(pathlib.Path("/tmp/osc.csv"))
    PosixPath('/tmp/osc-bins.csv')
    """
    return out.with_name(f"{out.stem}-bins{out.suffix}")


@click.command("bounds", cls=Command)
@config_option
@n_sweep_option
@gap_option
@support_options
@jobs_option
@out_option
@pass_ctx
def bounds(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    **flags: object,
) -> None:
    """Compute global and local precision bounds of the spin gas."""
    config = load_config("bounds", config_file, out=out, **flags)
    frame = experiments.run_bounds(ctx, config)
    content = tables.to_csv(
        frame, _headers("bounds", config), ctx.settings.float_format
    )
    with taskmod.transaction():
        emit(content, config.out)


@click.command("sequential", cls=Command)
@config_option
@model_option
@n_option
@gap_option
@support_options
@simulation_options
@theta0_option
@out_option
@pass_ctx
def sequential(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    **flags: object,
) -> None:
    """Estimate temperature along one simulated record, globally and
    locally.
    """
    config = load_config("sequential", config_file, out=out, **flags)
    frame = experiments.run_sequential(ctx, config)
    content = tables.to_csv(
        frame, _headers("sequential", config), ctx.settings.float_format
    )
    with taskmod.transaction():
        emit(content, config.out)


@click.command("oscillator", cls=Command)
@config_option
@gap_option
@support_options
@simulation_options
@bins_option
@out_option
@pass_ctx
def oscillator(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    **flags: object,
) -> None:
    """Compare global estimation with histogram fitting on oscillator
    positions.

    Histograms are written to a '-bins' suffixed file next to the output.
    """
    config = load_config("oscillator", config_file, out=out, **flags)
    frame, bins = experiments.run_oscillator(ctx, config)
    headers = _headers("oscillator", config)
    float_format = ctx.settings.float_format
    content = tables.to_csv(frame, headers, float_format)
    bins_content = tables.to_csv(bins, headers, float_format)
    with taskmod.transaction():
        if config.out is None:
            emit(content, None)
            click.echo()
            emit(bins_content, None)
        else:
            emit(content, config.out)
            emit(bins_content, bins_path(config.out))


@click.command("fit", cls=Command)
@config_option
@click.option(
    "--bounds",
    type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
    metavar="CSV",
    help="Bounds CSV file to fit (default to computing the sweep).",
)
@n_sweep_option
@support_options
@jobs_option
@tau_option
@out_option
@click.option("--json", "as_json", is_flag=True, help="Print as JSON")
@pass_ctx
def fit(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    as_json: bool,
    **flags: object,
) -> None:
    """Fit the asymptotic precision of the spin gas and derive n(tau)."""
    config = load_config("fit", config_file, out=out, **flags)
    report = experiments.run_fit(ctx, config)
    rows = report.rows()
    if config.out is not None:
        content = tables.to_csv(
            pd.DataFrame(rows), _headers("fit", config), ctx.settings.float_format
        )
        with taskmod.transaction():
            emit(content, config.out)
    if as_json:
        print_json_for(rows)
        return
    print_table_for(rows, title="asymptotic fit", display=Console().print)
    if report.n_tau is not None:
        click.echo(
            f"about {humanize.intword(round(report.n_tau))} spins are needed for "
            f"the local bound to lie within {report.tau:.0%} of the global optimum"
        )
