import pathlib
from typing import Optional

import click

from .. import exceptions, experiments, tables
from .. import task as taskmod
from ..ctx import Context
from .util import (
    Command,
    bins_option,
    config_option,
    emit,
    gap_option,
    load_config,
    model_option,
    n_option,
    out_option,
    pass_ctx,
    simulation_options,
    support_options,
    theta0_option,
)


@click.command("simulate", cls=Command)
@config_option
@model_option
@n_option
@gap_option
@simulation_options
@out_option
@pass_ctx
def simulate(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    **flags: object,
) -> None:
    """Simulate a record of outcomes and export it as a trace CSV."""
    config = load_config("simulate", config_file, out=out, **flags)
    trace = experiments.run_simulate(ctx, config)
    headers = [
        tables.header(experiments.config_digest("simulate", config), config.seed)
    ]
    content = tables.trace_csv(trace, headers, ctx.settings.float_format)
    with taskmod.transaction():
        emit(content, config.out)


@click.command("estimate", cls=Command)
@config_option
@click.option(
    "--trace",
    type=click.Path(exists=True, dir_okay=False, path_type=pathlib.Path),
    metavar="CSV",
    help="Trace CSV file, as exported by 'simulate'.",
)
@support_options
@theta0_option
@bins_option
@out_option
@pass_ctx
def estimate(
    ctx: Context,
    config_file: Optional[pathlib.Path],
    out: Optional[pathlib.Path],
    **flags: object,
) -> None:
    """Estimate temperature from a recorded trace."""
    config = load_config("estimate", config_file, out=out, **flags)
    if config.trace is None:
        raise exceptions.InvalidInput(
            "a trace file is required (--trace option or 'trace' parameter)"
        )
    trace = tables.read_trace(config.trace)
    frame = experiments.run_estimate(ctx, config, trace)
    headers = [
        tables.header(experiments.config_digest("estimate", config), trace.seed)
    ]
    content = tables.to_csv(frame, headers, ctx.settings.float_format)
    with taskmod.transaction():
        emit(content, config.out)
