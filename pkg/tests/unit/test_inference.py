import logging
import math
from typing import List

import numpy as np
import pytest

from globtherm import exceptions
from globtherm.grid import Support, build_grid, integrate
from globtherm.inference import (
    DeviationParams,
    GlobalEstimate,
    conditional_risk,
    estimate,
    global_estimate,
    normalize,
    optimal_estimate,
    posterior,
    prior_estimate,
    prior_posterior,
    relative_square_risk,
)
from globtherm.models.oscillator import OscillatorModel
from globtherm.models.spingas import SpinGasModel


def test_deviation_params() -> None:
    assert DeviationParams() == DeviationParams(alpha=1, k=2)
    with pytest.raises(exceptions.InvalidParameter, match="alpha must be"):
        DeviationParams(alpha=0)
    with pytest.raises(exceptions.InvalidParameter, match="k must be"):
        DeviationParams(k=math.inf)


def test_prior_estimate(support: Support) -> None:
    theta_p, eps_p = prior_estimate(support)
    assert theta_p == pytest.approx(1.0, rel=1e-15)
    assert eps_p == pytest.approx(math.log(100) ** 2 / 12, rel=1e-15)
    assert eps_p == pytest.approx(1.7673, abs=1e-4)
    with pytest.raises(exceptions.InvalidSupport):
        prior_estimate((0.1, 10))  # type: ignore[arg-type]


def test_prior_posterior(support: Support) -> None:
    post = prior_posterior(support)
    assert post.mass() == pytest.approx(1, abs=1e-12)
    theta_p, eps_p = prior_estimate(support)
    assert optimal_estimate(post) == pytest.approx(theta_p, rel=1e-10)
    assert conditional_risk(post, theta_p) == pytest.approx(eps_p, rel=1e-8)


def test_posterior_normalized(
    support: Support, spin_gas: SpinGasModel, spin_record: List[int]
) -> None:
    post = posterior(spin_gas, support, spin_record)
    assert post.mass() == pytest.approx(1, abs=1e-12)
    assert post.density.shape == (2001,)
    with pytest.raises(ValueError):
        post.log_density[0] = 0.0


def test_posterior_single_outcome_closed_form(support: Support) -> None:
    model = SpinGasModel(1)
    post = posterior(model, support, [1], node_count=4001)
    grid = post.grid
    unnormalized = np.exp(-1 / grid.y_nodes) / (1 + np.exp(-1 / grid.y_nodes))
    expected = unnormalized / integrate(grid, unnormalized)
    assert np.allclose(post.density, expected, rtol=1e-12, atol=0)


def test_posterior_empty_record(support: Support, spin_gas: SpinGasModel) -> None:
    with pytest.raises(exceptions.InvalidInput, match="empty record"):
        posterior(spin_gas, support, [])


def test_posterior_invalid_outcome(support: Support, spin_gas: SpinGasModel) -> None:
    with pytest.raises(exceptions.InvalidOutcome):
        posterior(spin_gas, support, [3, 200])


def test_normalize_underflow(support: Support) -> None:
    grid = build_grid(support, 11)
    with pytest.raises(exceptions.PosteriorUnderflow):
        normalize(grid, np.full(11, -np.inf))
    with pytest.raises(exceptions.QuadratureError):
        normalize(grid, np.full(11, np.nan))


def test_normalize_large_values(support: Support) -> None:
    grid = build_grid(support, 11)
    post = normalize(grid, np.full(11, -1e5))
    assert post.mass() == pytest.approx(1, abs=1e-12)
    post = normalize(grid, np.linspace(-1e5, -1e5 + 3, 11))
    assert post.mass() == pytest.approx(1, abs=1e-12)
    assert post.log_density.max() < 3


def test_optimal_estimate_minimizes_risk(
    support: Support, spin_gas: SpinGasModel, spin_record: List[int]
) -> None:
    post = posterior(spin_gas, support, spin_record)
    theta_hat = optimal_estimate(post)
    best = conditional_risk(post, theta_hat)
    for factor in (0.9, 0.99, 0.999, 1.001, 1.01, 1.1):
        assert conditional_risk(post, theta_hat * factor) > best


def test_optimal_estimate_reference_energy(
    support: Support, spin_gas: SpinGasModel, spin_record: List[int]
) -> None:
    post = posterior(spin_gas, support, spin_record)
    theta_hat = optimal_estimate(post)
    for eps0 in (0.01, 3.0, 1e4):
        assert optimal_estimate(post, eps0=eps0) == pytest.approx(theta_hat, rel=1e-10)
    with pytest.raises(exceptions.InvalidParameter):
        optimal_estimate(post, eps0=0)


def test_optimal_estimate_within_support(support: Support) -> None:
    # all outcomes excited: the posterior piles up at the upper edge
    post = posterior(SpinGasModel(10), support, [10] * 50)
    theta_hat = optimal_estimate(post)
    assert support.y_min <= theta_hat <= support.y_max


def test_conditional_risk_invalid(support: Support) -> None:
    post = prior_posterior(support, 11)
    for value in (0, -1, math.nan):
        with pytest.raises(exceptions.InvalidParameter):
            conditional_risk(post, value)
        with pytest.raises(exceptions.InvalidParameter):
            relative_square_risk(post, value)


def test_conditional_risk_deviation(support: Support) -> None:
    post = prior_posterior(support)
    mle = conditional_risk(post, 1.0)
    assert conditional_risk(post, 1.0, DeviationParams(alpha=2)) == pytest.approx(
        4 * mle, rel=1e-12
    )
    # mean absolute log deviation of a uniform law on [-L/2, L/2]
    assert conditional_risk(post, 1.0, DeviationParams(k=1)) == pytest.approx(
        math.log(100) / 4, rel=1e-6
    )


def test_relative_square_risk(support: Support) -> None:
    post = prior_posterior(support)
    # E[(1/y - 1)^2] under p(y) = c/y on [0.1, 10]
    c = 1 / math.log(100)
    expected = c * (0.5 * (1 / 0.01 - 1 / 100) - 2 * (1 / 0.1 - 1 / 10) + math.log(100))
    assert relative_square_risk(post, 1.0) == pytest.approx(expected, rel=1e-6)


def test_estimate_error_bar(
    support: Support, spin_gas: SpinGasModel, spin_record: List[int]
) -> None:
    result = global_estimate(spin_gas, support, spin_record)
    assert isinstance(result, GlobalEstimate)
    assert result.error_bar == pytest.approx(
        result.theta_hat * math.sqrt(result.eps_mle), rel=1e-15
    )
    assert not result.clipped
    assert 2 < result.theta_hat < 8
    assert 0 < result.eps_mle < prior_estimate(support)[1]


def test_estimate_oscillator(
    support: Support, oscillator: OscillatorModel, positions: np.ndarray
) -> None:
    result = global_estimate(oscillator, support, positions)
    assert 2.5 < result.theta_hat <= support.y_max
    assert result.eps_mle > 0


def test_estimate_clipped(
    support: Support, caplog: pytest.LogCaptureFixture
) -> None:
    post = posterior(SpinGasModel(10_000), support, [5000] * 200)
    with caplog.at_level(logging.WARNING, logger="globtherm.inference"):
        result = estimate(post)
    assert result.clipped
    assert "upper edge of support [0.1, 10]" in caplog.text


def test_scale_invariance(spin_record: List[int]) -> None:
    support = Support(0.1, 10)
    gamma = 2.0
    a = global_estimate(SpinGasModel(150), support, spin_record)
    b = global_estimate(
        SpinGasModel(150, gap=gamma), support.scaled(gamma), spin_record
    )
    assert b.theta_hat == pytest.approx(gamma * a.theta_hat, rel=1e-10)
    assert b.eps_mle == pytest.approx(a.eps_mle, rel=1e-10)


def test_grid_refinement(
    support: Support, spin_gas: SpinGasModel, spin_record: List[int]
) -> None:
    for record in (spin_record, spin_record[:1]):
        coarse = posterior(spin_gas, support, record)
        fine = posterior(spin_gas, support, record, node_count=4001)
        theta_hat = optimal_estimate(coarse)
        assert optimal_estimate(fine) == pytest.approx(theta_hat, rel=1e-8)
        assert conditional_risk(fine, theta_hat) == pytest.approx(
            conditional_risk(coarse, theta_hat), rel=1e-8
        )
    fine_prior = prior_posterior(support, 4001)
    assert conditional_risk(fine_prior, 1.0) == pytest.approx(
        math.log(100) ** 2 / 12, rel=1e-12
    )
    assert conditional_risk(fine_prior, 2.0) == pytest.approx(
        conditional_risk(prior_posterior(support), 2.0), rel=1e-8
    )
