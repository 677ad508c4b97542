"""Test solver."""

import math

import numpy as np
import pytest

from adjustable_auction import analytic, solver
from adjustable_auction.errors import ConvergenceError, DomainError, NumericError
from adjustable_auction.model import AuctionScenario, ValuationDistribution
from adjustable_auction.strategies import AnalyticEquilibriumStrategy, GridStrategy, TruthfulStrategy


def _seller_payoff(beta):
    return lambda control: analytic.seller_expected_payoff(beta, control)


def test_default_control_bracket():
    """Test the search interval."""
    assert solver.default_control_bracket(0) == (0.0, 1.0)
    assert solver.default_control_bracket(3) == (0.0, 9)


@pytest.mark.parametrize('beta', [0.5, 1, 2, 4, 6])
def test_maximize_control(beta):
    """Test golden-section search against the closed-form optimum."""
    result, value = solver.maximize_control(_seller_payoff(beta), solver.default_control_bracket(beta))

    assert result == pytest.approx(beta ** 2 / 36, abs=1e-7)
    assert value == pytest.approx(analytic.seller_payoff_at_optimum(beta), abs=1e-10)


def test_maximize_control_fixed_bracket():
    """Test the bracketed examples, including the boundary optimum."""
    result, _value = solver.maximize_control(_seller_payoff(2), bracket=(0, 4))
    boundary, boundary_value = solver.maximize_control(_seller_payoff(0), bracket=(0, 1))
    six, six_value = solver.maximize_control(_seller_payoff(6), bracket=(0, 4))

    assert result == pytest.approx(1 / 9, abs=1e-7)
    assert boundary == 0
    assert boundary_value == pytest.approx(1 / 3)
    assert six == pytest.approx(1, abs=1e-7)
    assert six_value == pytest.approx(4 / 3, abs=1e-12)


def test_golden_section_brackets():
    """Test that every bracket is nested and narrower by the golden ratio."""
    result = list(solver.golden_section_brackets(_seller_payoff(2), 0, 4, 1e-6))
    widths = np.array([hi - lo for lo, hi in result])

    assert result[0] == (0, 4)
    assert widths[-1] < 1e-6
    assert np.allclose(widths[1:] / widths[:-1], solver.INV_PHI)
    assert all(lo <= inner_lo and inner_hi <= hi for (lo, hi), (inner_lo, inner_hi) in zip(result, result[1:]))


def test_golden_section_errors():
    """Test invalid brackets and non-finite payoffs."""
    with pytest.raises(DomainError):
        list(solver.golden_section_brackets(_seller_payoff(2), 1, 1, 1e-8))
    with pytest.raises(DomainError):
        list(solver.golden_section_brackets(_seller_payoff(2), 0, 1, 0))
    with pytest.raises(NumericError) as exc_info:
        solver.maximize_control(lambda control: math.nan)

    assert exc_info.value.argument is not None


def test_check_concavity():
    """Test concave, linear and convex payoffs."""
    interior = solver.check_concavity(_seller_payoff(2), 1e-4, 1)
    boundary = solver.check_concavity(_seller_payoff(0), 0, 1)
    convex = solver.check_concavity(lambda control: control ** 2, 0, 1)

    assert interior.satisfied
    assert interior.regime is solver.OptimumRegime.INTERIOR
    assert boundary.satisfied
    assert boundary.regime is solver.OptimumRegime.BOUNDARY
    assert boundary.initial_slope == pytest.approx(-1, abs=1e-3)
    assert not convex.satisfied
    assert convex.violation_at is not None
    assert solver.check_concavity(_seller_payoff(0.1), 0, 1).regime is solver.OptimumRegime.INTERIOR
    with pytest.raises(DomainError):
        solver.check_concavity(_seller_payoff(2), 0, 1, n_points=4)


@pytest.mark.parametrize(('beta', 'control'), [(0, 0), (3, 0), (2, 1 / 9), (4, 4 / 9)])
def test_best_response_iteration(beta, control):
    """Test that best responses recover the analytic equilibrium."""
    scenario = AuctionScenario.uniform(beta=beta, control_value=control)

    result = solver.best_response_iteration(scenario, grid_size=512, tol=1e-6)

    assert result.grid_points[-1] == pytest.approx(scenario.scale)
    assert result.distance_to(lambda types: types / 2) < 2e-3
    assert solver.deviation_scan(scenario, result, np.linspace(0, scenario.scale, 20)) <= 10 * result.spacing


def test_best_response_three_bidders():
    """Test the n-bidder equilibrium shading."""
    scenario = AuctionScenario.uniform(beta=0, n_bidders=3)

    result = solver.best_response_iteration(scenario, grid_size=512)

    assert result.distance_to(lambda types: 2 * types / 3) < 5e-3
    assert solver.deviation_scan(scenario, result, np.linspace(0.05, 1, 10)) <= 10 * result.spacing


@pytest.mark.parametrize(('beta', 'control', 'n_bidders'), [(2, 1 / 9, 3), (4, 4 / 9, 2)])
def test_best_response_stays_at_equilibrium(beta, control, n_bidders):
    """Test that a tight tolerance keeps the iterates on the equilibrium instead of drifting into pooled bids."""
    scenario = AuctionScenario.uniform(beta=beta, control_value=control, n_bidders=n_bidders)

    result = solver.best_response_iteration(scenario, tol=1e-7, max_iters=200)

    def equilibrium(types):
        return AnalyticEquilibriumStrategy().bids(types, scenario)

    assert result.distance_to(equilibrium) < 1e-4
    assert np.all(np.diff(result.bids) > 0)
    assert result.bids[-1] == pytest.approx((n_bidders - 1) / n_bidders * scenario.scale, rel=1e-4)


def test_best_response_scales_with_control():
    """Test that the equilibrium at control c is the c = 0 equilibrium scaled by the type scale."""
    base = solver.best_response_iteration(AuctionScenario.uniform(beta=2))
    scenario = AuctionScenario.uniform(beta=2, control_value=1 / 9)

    result = solver.best_response_iteration(scenario)
    scaled = base.scaled(scenario.scale)

    assert np.allclose(result.grid_points, scaled.grid_points)
    assert np.max(np.abs(result.bids - scaled.bids)) < 2 * result.spacing


def test_best_response_errors():
    """Test the grid-size check and non-convergence reporting."""
    scenario = AuctionScenario.uniform(beta=1)

    with pytest.raises(DomainError):
        solver.best_response_iteration(scenario, grid_size=32)
    with pytest.raises(ConvergenceError) as exc_info:
        solver.best_response_iteration(scenario, max_iters=1)

    assert exc_info.value.iterations == 1
    assert exc_info.value.residual == pytest.approx(0.25, abs=1e-6)
    with pytest.raises(DomainError):
        solver.best_response_iteration(scenario, damping=0)
    with pytest.raises(DomainError):
        solver.best_response_iteration(scenario, degree=0)


def test_deviation_scan_detects_overbidding():
    """Test that a non-equilibrium grid admits a profitable deviation."""
    scenario = AuctionScenario.uniform(beta=0)
    grid = solver.BidGrid(grid_points=np.linspace(0, 1, 101), bids=np.linspace(0, 1, 101))

    result = solver.deviation_scan(scenario, grid, [0.4, 0.8])

    assert result > 0.1


@pytest.mark.parametrize('beta', [0, 1, 2, 4])
def test_ic_regret_search(beta):
    """Test that truthful reporting is optimal in the direct mechanism."""
    for control in [0, beta ** 2 / 36, 1]:
        result = solver.ic_regret_search(AuctionScenario.uniform(beta=beta, control_value=control))

        assert result.max_regret <= 1e-12
        assert result.grid_resolution == 101


def test_ic_regret_search_full_payment():
    """Test that charging the full report makes shading profitable."""
    result = solver.ic_regret_search(AuctionScenario.uniform(beta=2, control_value=1 / 9), payment_share=1.0)

    assert result.max_regret > 0
    assert result.argmax_deviation < result.argmax_truth


def test_ic_regret_search_requires_closed_form():
    """Test that other bidder counts are refused."""
    with pytest.raises(DomainError):
        solver.ic_regret_search(AuctionScenario.uniform(beta=2, n_bidders=3))


def test_revelation_consistency(optimal_scenario):
    """Test that equilibrium bidding reproduces the social choice function."""
    profiles = [(0.3, 0.7), (0.9, 0.1), (0.5, 0.5)]

    assert solver.revelation_consistency(optimal_scenario, profiles)
    assert solver.revelation_consistency(AuctionScenario.uniform(beta=2), [(1, 0)])
    assert solver.revelation_consistency(AuctionScenario.uniform(beta=1, n_bidders=3), [(0.2, 0.9, 0.4)])
    assert not solver.revelation_consistency(optimal_scenario, profiles, strategy=TruthfulStrategy())
    assert solver.revelation_consistency(
        optimal_scenario, profiles, strategy=AnalyticEquilibriumStrategy(), tolerance=1e-15)


def test_revelation_consistency_grid_strategy(optimal_scenario):
    """Test the check with a computed bid grid."""
    grid = solver.best_response_iteration(optimal_scenario)
    profiles = np.random.default_rng(5).random((200, 2))

    result = solver.revelation_consistency(optimal_scenario, profiles, strategy=GridStrategy(grid))

    assert result


def test_revelation_consistency_errors(optimal_scenario):
    """Test profile-shape and support checks."""
    shifted = AuctionScenario(distribution=ValuationDistribution(lower=0.5, upper=1.5))

    with pytest.raises(DomainError):
        solver.revelation_consistency(shifted, [(0.6, 0.7)])
    with pytest.raises(DomainError):
        solver.revelation_consistency(optimal_scenario, [(0.1, 0.2, 0.3)])
