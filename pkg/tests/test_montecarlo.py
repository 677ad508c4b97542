"""Test montecarlo."""

import numpy as np
import pytest

from adjustable_auction import solver
from adjustable_auction.errors import DomainError
from adjustable_auction.model import AuctionScenario, EstimationMethod
from adjustable_auction.montecarlo import (
    SimulationConfig,
    draw_intrinsic_profiles,
    estimate_payoffs,
    estimate_winner_expectation,
    run_auction_once,
    winner_expectation_estimate,
)
from adjustable_auction.strategies import BidStrategyKind
from adjustable_auction.utils_random import ReplicationStream


def test_run_auction_once_forced_draws():
    """Test a hand-traced replication without control."""
    scenario = AuctionScenario.uniform(beta=0)

    result = run_auction_once(scenario, ReplicationStream(seed=0, replication=0), forced_intrinsic=[0.8, 0.4])

    assert result.outcome.winner == 0
    assert result.bids == pytest.approx((0.4, 0.2))
    assert result.seller_revenue == pytest.approx(0.4)
    assert result.utilities == pytest.approx((0.4, 0.0))
    assert result.utilities[1] == 0


def test_run_auction_once_tie(optimal_scenario):
    """Test that ties go to the first bidder and the control cost is charged."""
    result = run_auction_once(optimal_scenario, ReplicationStream(seed=0, replication=0), forced_intrinsic=[0.6, 0.6])

    assert result.outcome.winner == 0
    assert result.bids[0] == pytest.approx(0.5)
    assert result.seller_revenue == pytest.approx(0.5 - 1 / 9)
    assert result.utilities[1] == 0


def test_run_auction_once_matches_batch_draws(optimal_scenario):
    """Test that single replications use the same draws as the vectorized engine."""
    stream = ReplicationStream(seed=13, replication=5000)

    result = run_auction_once(optimal_scenario, stream)
    intrinsic = draw_intrinsic_profiles(optimal_scenario, 13, 5000, 5001)[0]

    assert result.adjusted_types == pytest.approx(tuple(intrinsic * optimal_scenario.scale))
    assert result == run_auction_once(optimal_scenario, stream)
    with pytest.raises(DomainError):
        run_auction_once(optimal_scenario, stream, forced_intrinsic=[0.1])


def test_draw_intrinsic_profiles():
    """Test profile shape and support."""
    scenario = AuctionScenario.uniform(beta=1, n_bidders=4)

    result = draw_intrinsic_profiles(scenario, 3, 10, 5000)

    assert result.shape == (4990, 4)
    assert np.all((result >= 0) & (result < 1))


@pytest.mark.parametrize(('control', 'seller', 'bidder'), [(0, 1 / 3, 1 / 6), (1 / 9, 4 / 9, 5 / 18)])
def test_estimate_payoffs(control, seller, bidder):
    """Test Monte Carlo estimates against the closed forms."""
    config = SimulationConfig(scenario=AuctionScenario.uniform(beta=2, control_value=control), replications=200_000,
                              seed=7)

    result = estimate_payoffs(config)

    assert result.method is EstimationMethod.MONTE_CARLO
    assert abs(result.seller_payoff.value - seller) < 4 * result.seller_payoff.stderr
    assert abs(result.seller_payoff.value - seller) < 0.01
    for estimate in result.bidder_payoffs:
        assert abs(estimate.value - bidder) < 4 * estimate.stderr
    assert result.seller_payoff.value == result.mean_winning_bid.value - control


def test_estimate_payoffs_three_bidders():
    """Test the n-bidder engine: the seller receives (n - 1) / (n + 1)."""
    config = SimulationConfig(scenario=AuctionScenario.uniform(beta=0, n_bidders=3), replications=50_000, seed=1)

    result = estimate_payoffs(config)

    assert result.seller_payoff.value == pytest.approx(0.5, abs=0.01)
    assert len(result.bidder_payoffs) == 3


def test_estimate_payoffs_worker_invariance(optimal_scenario):
    """Test that results are bit-identical for every worker count."""
    reports = [
        estimate_payoffs(SimulationConfig(scenario=optimal_scenario, replications=10_000, seed=3, workers=workers))
        for workers in [1, 2, 4]
    ]

    assert reports[0] == reports[1] == reports[2]


def test_estimate_payoffs_grid_strategy(optimal_scenario):
    """Test simulation with a computed bid grid."""
    grid = solver.best_response_iteration(optimal_scenario)
    config = SimulationConfig(scenario=optimal_scenario, replications=20_000, seed=2,
                              bid_strategy=BidStrategyKind.GRID_FUNCTION, bid_grid=grid)

    result = estimate_payoffs(config)
    analytic = estimate_payoffs(SimulationConfig(scenario=optimal_scenario, replications=20_000, seed=2))

    assert result.seller_payoff.value == pytest.approx(analytic.seller_payoff.value, abs=1e-3)


def test_estimate_payoffs_single_replication(optimal_scenario):
    """Test that one replication reports a zero standard error."""
    result = estimate_payoffs(SimulationConfig(scenario=optimal_scenario, replications=1))

    assert result.seller_payoff.stderr == 0


def test_simulation_config_errors(optimal_scenario):
    """Test sampling-parameter validation."""
    with pytest.raises(DomainError):
        SimulationConfig(scenario=optimal_scenario, replications=0)
    with pytest.raises(DomainError):
        SimulationConfig(scenario=optimal_scenario, replications=10, workers=0)
    with pytest.raises(DomainError):
        SimulationConfig(scenario=optimal_scenario, replications=10, bid_strategy=BidStrategyKind.GRID_FUNCTION)


def test_winner_expectation():
    """Test the expected maximum of two uniform draws."""
    result = winner_expectation_estimate(100_000, seed=1)

    assert result.value == pytest.approx(2 / 3, abs=0.005)
    assert abs(result.value - 2 / 3) < 4 * result.stderr
    assert estimate_winner_expectation(100_000, seed=1) == result.value
    assert 0 <= estimate_winner_expectation(1, seed=9) <= 1
    with pytest.raises(DomainError):
        estimate_winner_expectation(0, seed=1)


def test_winner_expectation_seeds_agree():
    """Test that independent seeds give nearby estimates."""
    first = estimate_winner_expectation(1_000_000, seed=1)
    second = estimate_winner_expectation(1_000_000, seed=2)

    assert abs(first - second) < 0.002


@pytest.mark.parametrize(('control', 'quantity', 'expected'), [
    (0, 'seller', 1 / 3),
    (1 / 9, 'seller', 4 / 9),
    (1 / 9, 'bidder', 5 / 18),
])
def test_estimate_payoffs_cover_closed_form_across_seeds(control, quantity, expected):
    """Test that four standard errors cover the closed form in at least 95 of 100 independent seeds."""
    scenario = AuctionScenario.uniform(beta=2, control_value=control)
    covered = 0
    for seed in range(100):
        report = estimate_payoffs(SimulationConfig(scenario=scenario, replications=2_000, seed=seed))
        estimate = report.seller_payoff if quantity == 'seller' else report.bidder_payoffs[0]
        covered += abs(estimate.value - expected) < 4 * estimate.stderr

    assert covered >= 95


def test_winner_expectation_covers_two_thirds_across_seeds():
    """Test that four standard errors cover 2/3 in at least 95 of 100 independent seeds."""
    estimates = [winner_expectation_estimate(2_000, seed=seed) for seed in range(100)]

    result = sum(abs(estimate.value - 2 / 3) < 4 * estimate.stderr for estimate in estimates)

    assert result >= 95
