"""Experiment runners producing plot-ready tables."""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import attr
import numpy as np
import pandas as pd

from . import baselines, bounds, exceptions, inference, simulate, tables, util
from .ctx import Context
from .interface import ExperimentConfig
from .models import ThermalModel
from .models.oscillator import OscillatorModel
from .models.spingas import SpinGasModel
from .task import task
from .types import FloatArray, ModelName

logger = logging.getLogger(__name__)

BOUNDS_COLUMNS = ["n", "eps_opt", "eps_cr", "eps_p", "K", "eps_flat", "asymptote", "eps_snr"]
SEQUENTIAL_COLUMNS = ["m", "theta_global", "error_bar", "theta_local", "delta_local"]
OSCILLATOR_COLUMNS = [
    "m",
    "theta_global",
    "error_bar",
    "theta_hist",
    "delta_hist",
    "hist_status",
]
BINS_COLUMNS = [
    "mu",
    "bin_left",
    "bin_right",
    "center",
    "count",
    "density",
    "fitted",
    "band_low",
    "band_high",
]
ESTIMATE_COLUMNS = ["method", "theta", "uncertainty", "eps_mle", "flag"]
#: Smallest spin count entering the asymptotic fit.
MIN_FIT_SPINS = 100


def config_digest(command: str, config: ExperimentConfig) -> str:
    """Digest of the run parameters, output path excluded."""
    return util.digest({"command": command, **config.dict(exclude={"out"})})


def node_count(ctx: Context, config: ExperimentConfig) -> int:
    return config.nodes or ctx.settings.quadrature.node_count


def _model(ctx: Context, config: ExperimentConfig) -> ThermalModel:
    return ctx.model(config.model, **config.model_params())


def _required(config: ExperimentConfig, name: str) -> Any:
    value = getattr(config, name)
    if value is None:
        raise exceptions.InvalidInput(f"missing '{name}' parameter")
    return value


def _estimate(
    ctx: Context, config: ExperimentConfig, model: ThermalModel, record: Any
) -> inference.GlobalEstimate:
    quadrature = ctx.settings.quadrature
    return inference.global_estimate(
        model,
        config.support,
        record,
        node_count(ctx, config),
        edge_cells=quadrature.edge_cells,
        edge_mass=quadrature.edge_mass,
    )


def _sample(ctx: Context, config: ExperimentConfig) -> simulate.Trace:
    model = _model(ctx, config)
    rng = simulate.RngStream(config.seed)
    return simulate.sample(
        model, _required(config, "true_y"), _required(config, "mu"), rng
    )


@task("computing precision bounds for {config.model} model")
def run_bounds(ctx: Context, config: ExperimentConfig) -> pd.DataFrame:
    """Bound quantifiers for every spin count of the sweep."""
    if config.model != ModelName.spin_gas:
        raise exceptions.UnsupportedError(
            f"precision bounds are computed for the spin gas only, got {config.model}"
        )
    n_values = _required(config, "n_sweep")
    points = bounds.sweep(
        n_values,
        config.support,
        node_count(ctx, config),
        max_outcomes=ctx.settings.quadrature.max_outcomes,
        jobs=config.jobs or ctx.settings.jobs,
        gap=config.gap,
    )
    frame = pd.DataFrame(
        {
            "n": [p.n for p in points],
            "eps_opt": [p.eps_opt for p in points],
            "eps_cr": [p.eps_cr for p in points],
            "eps_p": [p.eps_p for p in points],
            "K": [p.info_gain for p in points],
            "eps_flat": [p.eps_flat for p in points],
            "asymptote": bounds.reference_asymptote([p.n for p in points]),
            "eps_snr": [p.eps_snr for p in points],
        },
        columns=BOUNDS_COLUMNS,
    )
    return frame


def _global_trace(
    ctx: Context, config: ExperimentConfig, model: ThermalModel, outcomes: Any
) -> Tuple[FloatArray, FloatArray]:
    theta = np.empty(outcomes.size)
    error_bar = np.empty(outcomes.size)
    for m in range(1, outcomes.size + 1):
        est = _estimate(ctx, config, model, outcomes[:m])
        theta[m - 1], error_bar[m - 1] = est.theta_hat, est.error_bar
    return theta, error_bar


@task("estimating temperature along a simulated {config.model} record")
def run_sequential(ctx: Context, config: ExperimentConfig) -> pd.DataFrame:
    """Global and local estimates for every prefix of one simulated record."""
    trace = _sample(ctx, config)
    model = _model(ctx, config)
    outcomes = trace.outcomes
    theta, error_bar = _global_trace(ctx, config, model, outcomes)
    theta_local = np.full(trace.mu, math.nan)
    delta_local = np.full(trace.mu, math.nan)
    if isinstance(model, SpinGasModel) and model.n > 0:
        for m in range(1, trace.mu + 1):
            local = baselines.local_estimate(model, outcomes[:m], config.theta0)
            theta_local[m - 1], delta_local[m - 1] = local.theta_L, local.delta_L
    else:
        logger.info("no local estimate available for %s", model)
    return pd.DataFrame(
        {
            "m": np.arange(1, trace.mu + 1),
            "theta_global": theta,
            "error_bar": error_bar,
            "theta_local": theta_local,
            "delta_local": delta_local,
        },
        columns=SEQUENTIAL_COLUMNS,
    )


def _bins_rows(
    prefix: int, hist: baselines.Histogram, profile: baselines.GaussianProfile
) -> pd.DataFrame:
    centers = hist.centers
    low, high = profile.band(centers)
    return pd.DataFrame(
        {
            "mu": prefix,
            "bin_left": hist.bin_edges[:-1],
            "bin_right": hist.bin_edges[1:],
            "center": centers,
            "count": hist.counts,
            "density": hist.density,
            "fitted": profile(centers),
            "band_low": low,
            "band_high": high,
        },
        columns=BINS_COLUMNS,
    )


@task("comparing global estimation and histogram fits on oscillator positions")
def run_oscillator(
    ctx: Context, config: ExperimentConfig
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Global estimates along a simulated position record, and histogram fit
    estimates at configured record lengths.

    Return the estimates table and the histograms table.
    """
    model = _model(ctx, config)
    if not isinstance(model, OscillatorModel):
        raise exceptions.InvalidInput(
            f"oscillator comparison requires the oscillator model, got {config.model}"
        )
    mu = _required(config, "mu")
    if mu < baselines.MIN_HISTOGRAM_OUTCOMES:
        raise exceptions.InvalidParameter(
            f"oscillator comparison needs at least {baselines.MIN_HISTOGRAM_OUTCOMES} outcomes, got {mu}"
        )
    trace = _sample(ctx, config)
    theta, error_bar = _global_trace(ctx, config, model, trace.outcomes)
    frame = pd.DataFrame(
        {
            "m": np.arange(1, trace.mu + 1),
            "theta_global": theta,
            "error_bar": error_bar,
            "theta_hist": math.nan,
            "delta_hist": math.nan,
            "hist_status": "",
        },
        columns=OSCILLATOR_COLUMNS,
    )
    histogram_settings = ctx.settings.histogram
    bins: List[pd.DataFrame] = []
    for prefix in config.histogram_prefixes:
        if prefix > mu:
            logger.info("skipping histogram of %d outcomes, record has %d", prefix, mu)
            continue
        row = prefix - 1
        try:
            hist, profile = baselines.fit_histogram(
                trace.outcomes[:prefix],
                config.bins,
                histogram_settings.max_iterations,
                histogram_settings.step_tolerance,
            )
        except exceptions.FitError as e:
            logger.warning("histogram fit of %d outcomes failed: %s", prefix, e)
            frame.loc[row, "hist_status"] = "fit-failed"
            continue
        bins.append(_bins_rows(prefix, hist, profile))
        try:
            theta_f, delta_f = baselines.invert_sigma(
                profile.sigma, profile.stderr_sigma, model.gap
            )
        except exceptions.InversionError as e:
            logger.warning("histogram estimate of %d outcomes failed: %s", prefix, e)
            frame.loc[row, "hist_status"] = "inversion-failed"
            continue
        frame.loc[row, ["theta_hist", "delta_hist", "hist_status"]] = [
            theta_f,
            delta_f,
            "ok",
        ]
    bins_frame = (
        pd.concat(bins, ignore_index=True)
        if bins
        else pd.DataFrame(columns=BINS_COLUMNS)
    )
    return frame, bins_frame


@attr.s(auto_attribs=True, frozen=True, slots=True)
class FitReport:
    """Asymptotic fit with the implied tolerance spin count."""

    fit: bounds.AsymptoticFit
    c1: float
    tau: float
    n_tau: Optional[float]
    reference_n_tau: float

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"quantity": "q", "value": self.fit.q, "stderr": self.fit.stderr_q},
            {"quantity": "log b", "value": self.fit.log_b, "stderr": self.fit.stderr_log_b},
            {"quantity": "b", "value": self.fit.b, "stderr": self.fit.b * self.fit.stderr_log_b},
            {"quantity": "c1", "value": self.c1, "stderr": None},
            {"quantity": f"n(tau={self.tau:g})", "value": self.n_tau, "stderr": None},
            {
                "quantity": f"reference n(tau={self.tau:g})",
                "value": self.reference_n_tau,
                "stderr": None,
            },
        ]


def _points_from_csv(config: ExperimentConfig) -> List[bounds.BoundPoint]:
    comments, frame = tables.read_csv(_required(config, "bounds"))
    missing = {"n", "eps_opt", "eps_cr"} - set(frame.columns)
    if missing:
        raise exceptions.InvalidInput(
            f"bounds file {config.bounds} lacks columns {', '.join(sorted(missing))}"
        )

    def column(name: str) -> Sequence[float]:
        if name in frame.columns:
            return frame[name].astype(float).tolist()
        return [math.nan] * len(frame)

    return [
        bounds.BoundPoint(int(n), eps_opt, eps_cr, eps_p, k, eps_flat)
        for n, eps_opt, eps_cr, eps_p, k, eps_flat in zip(
            frame["n"].tolist(),
            column("eps_opt"),
            column("eps_cr"),
            column("eps_p"),
            column("K"),
            column("eps_flat"),
        )
    ]


@task("fitting the asymptotic precision of the spin gas")
def run_fit(ctx: Context, config: ExperimentConfig) -> FitReport:
    """Fit of eps_cr - eps_opt ~ b n**q over bound points read from a CSV
    file, or computed from the configured sweep.
    """
    if config.bounds is not None:
        points = _points_from_csv(config)
    else:
        points = bounds.sweep(
            _required(config, "n_sweep"),
            config.support,
            node_count(ctx, config),
            max_outcomes=ctx.settings.quadrature.max_outcomes,
            jobs=config.jobs or ctx.settings.jobs,
            gap=config.gap,
        )
    kept = [p for p in points if p.n >= MIN_FIT_SPINS]
    if len(kept) < len(points):
        logger.info(
            "ignoring %d bound points with n < %d", len(points) - len(kept), MIN_FIT_SPINS
        )
    fit = bounds.fit_asymptotic(kept)
    c1 = float(np.median([p.n * p.eps_cr for p in kept]))
    n_tau: Optional[float] = None
    try:
        n_tau = bounds.tolerance_spins(config.tau, c1, fit.b, fit.q)
    except exceptions.InvalidParameter as e:
        logger.warning("cannot derive tolerance spin count from fit: %s", e)
    return FitReport(
        fit=fit,
        c1=c1,
        tau=config.tau,
        n_tau=n_tau,
        reference_n_tau=bounds.tolerance_spins(
            config.tau, bounds.REFERENCE_C1, bounds.REFERENCE_C2, bounds.REFERENCE_Q
        ),
    )


@task("simulating {config.mu} outcomes of {config.model} model at y={config.true_y}")
def run_simulate(ctx: Context, config: ExperimentConfig) -> simulate.Trace:
    """Simulate an outcome record."""
    return _sample(ctx, config)


@task("estimating temperature from {trace.mu} {trace.model} outcomes")
def run_estimate(
    ctx: Context, config: ExperimentConfig, trace: simulate.Trace
) -> pd.DataFrame:
    """Global estimate of a recorded trace, alongside the applicable
    baseline estimates.
    """
    model = ctx.model(trace.model, **trace.params)
    rows: List[Dict[str, Any]] = []
    est = _estimate(ctx, config, model, trace.outcomes)
    rows.append(
        {
            "method": "global",
            "theta": est.theta_hat,
            "uncertainty": est.error_bar,
            "eps_mle": est.eps_mle,
            "flag": "clipped" if est.clipped else "",
        }
    )
    if isinstance(model, SpinGasModel) and model.n > 0:
        local = baselines.local_estimate(model, trace.outcomes, config.theta0)
        rows.append(
            {
                "method": "local",
                "theta": local.theta_L,
                "uncertainty": local.delta_L,
                "eps_mle": math.nan,
                "flag": "",
            }
        )
    elif isinstance(model, OscillatorModel):
        histogram_settings = ctx.settings.histogram
        row: Dict[str, Any] = {
            "method": "histogram",
            "theta": math.nan,
            "uncertainty": math.nan,
        }
        try:
            hist = baselines.histogram_fit_estimate(
                trace,
                config.bins,
                histogram_settings.max_iterations,
                histogram_settings.step_tolerance,
            )
        except (exceptions.InvalidParameter, exceptions.NumericalError) as e:
            logger.warning("histogram estimate failed: %s", e)
            row["flag"] = "failed"
        else:
            row.update(theta=hist.theta_F, uncertainty=hist.delta_F, flag="")
        rows.append(dict(row, eps_mle=math.nan))
    return pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)
