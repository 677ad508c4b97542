"""Property tests for the mechanism, the closed forms and the random streams."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from adjustable_auction import analytic, equations, solver
from adjustable_auction.model import AuctionScenario, TypeFunction, first_price_outcome, scf_outcome
from adjustable_auction.montecarlo import run_auction_once
from adjustable_auction.utils_random import ReplicationStream, draw_uniforms

betas = st.floats(min_value=0, max_value=10)
controls = st.floats(min_value=0, max_value=100)
unit = st.floats(min_value=0, max_value=1)
grid_unit = st.integers(min_value=0, max_value=10 ** 6).map(lambda step: step / 10 ** 6)
profiles = st.lists(st.floats(min_value=0, max_value=100), min_size=1, max_size=8)


@given(types=profiles, share=unit)
@settings(max_examples=200, deadline=None)
def test_scf_outcome_invariants(types, share):
    """One winner with the highest type, ties to the lowest index, balanced transfers."""
    result = scf_outcome(types, payment_share=share)

    winner = result.winner
    assert sum(result.allocation) == 1
    assert types[winner] == max(types)
    assert all(value < types[winner] for value in types[:winner])
    assert math.isclose(result.seller_transfer, -math.fsum(result.transfers), abs_tol=1e-12)
    assert result.transfers[winner] == -share * types[winner]


@given(bids=profiles)
@settings(max_examples=200, deadline=None)
def test_first_price_winner_pays_bid(bids):
    """The highest bid wins and pays exactly its bid."""
    result = first_price_outcome(bids)

    assert result.seller_transfer == max(bids)


@given(beta=betas, control=controls)
@settings(max_examples=200, deadline=None)
def test_optimal_control_dominates(beta, control):
    """No control value beats the closed-form optimum."""
    best = analytic.seller_expected_payoff(beta, analytic.optimal_control(beta))

    assert best >= analytic.seller_expected_payoff(beta, control) - 1e-12


@given(beta=betas)
@settings(max_examples=200, deadline=None)
def test_payoffs_at_optimum_compose(beta):
    """Payoffs at the optimum equal the payoff formulas evaluated at the optimal control."""
    control = analytic.optimal_control(beta)

    assert math.isclose(analytic.seller_payoff_at_optimum(beta), analytic.seller_expected_payoff(beta, control),
                        abs_tol=1e-12)
    assert math.isclose(analytic.bidder_payoff_at_optimum(beta), analytic.bidder_expected_payoff(beta, control),
                        abs_tol=1e-12)


@given(beta=betas, theta0=unit, low=controls, high=controls)
@settings(max_examples=200, deadline=None)
def test_control_never_hurts_types_or_bidders(beta, theta0, low, high):
    """Adjusted types and bidder payoffs are nondecreasing in the control value."""
    low, high = sorted([low, high])
    type_function = TypeFunction(beta=beta)

    assert type_function.evaluate(theta0, low) <= type_function.evaluate(theta0, high)
    assert analytic.bidder_expected_payoff(beta, low) <= analytic.bidder_expected_payoff(beta, high)


@given(theta0=unit, report=unit, scale=st.floats(min_value=1, max_value=50))
@settings(max_examples=200, deadline=None)
def test_truthful_report_is_optimal(theta0, report, scale):
    """No report beats the truth against a truthful opponent."""
    truthful = equations.interim_payoff(theta0, theta0, scale)

    assert equations.interim_payoff(theta0, report, scale) <= truthful + 1e-12


@given(theta_a=grid_unit, theta_b=grid_unit, beta=st.floats(min_value=0, max_value=5), control=unit)
@settings(max_examples=100, deadline=None)
def test_equilibrium_play(theta_a, theta_b, beta, control):
    """Winners never lose money and equilibrium play reproduces the social choice function."""
    scenario = AuctionScenario.uniform(beta=beta, control_value=control)

    result = run_auction_once(scenario, ReplicationStream(seed=0, replication=0), forced_intrinsic=[theta_a, theta_b])

    assert min(result.utilities) >= 0
    assert solver.revelation_consistency(scenario, [(theta_a, theta_b)])


@given(
    seed=st.integers(min_value=-2 ** 63, max_value=2 ** 64),
    bidder=st.integers(min_value=0, max_value=3),
    start=st.integers(min_value=0, max_value=9000),
    length=st.integers(min_value=0, max_value=500),
)
@settings(max_examples=100, deadline=None)
def test_draws_depend_only_on_their_key(seed, bidder, start, length):
    """Any slice of a bidder's stream equals the same slice of a longer draw."""
    full = draw_uniforms(seed, bidder, 0, start + length)

    result = draw_uniforms(seed, bidder, start, start + length)

    assert np.array_equal(result, full[start:])


@given(peak=unit)
@settings(max_examples=100, deadline=None)
def test_golden_section_finds_peak(peak):
    """Golden-section search locates the peak of a concave quadratic, boundary peaks included."""
    result, _value = solver.maximize_control(lambda control: -(control - peak) ** 2, bracket=(0, 1))

    assert abs(result - peak) < 1e-7


@given(reserve=unit)
@settings(max_examples=100, deadline=None)
def test_reserve_payment_matches_quadrature(reserve):
    """Test the closed-form payment with a reserve against adaptive quadrature."""
    result = analytic.myerson_expected_payment(reserve)

    assert math.isclose(result, analytic.myerson_payment_quadrature(reserve), rel_tol=0, abs_tol=1e-12)
