"""Numerical machinery: control optimization, concavity, best responses and incentive checks."""

import enum
import math
from typing import Callable, Iterator, Optional, Sequence, Tuple

import attr
import numpy as np
from attrs_strict import type_validator
from loguru import logger
from numpy.polynomial import Polynomial

from . import equations
from .errors import ConvergenceError, DomainError, NumericError
from .model import AuctionScenario, ValuationDistribution, first_price_outcome, scf_outcome
from .strategies import AnalyticEquilibriumStrategy, BidGrid, BidStrategyInterface, GridStrategy

__all__ = [
    'BidGrid',
    'ConcavityVerdict',
    'OptimumRegime',
    'RegretReport',
    'best_response_iteration',
    'check_concavity',
    'default_control_bracket',
    'deviation_scan',
    'golden_section_brackets',
    'ic_regret_search',
    'maximize_control',
    'revelation_consistency',
]

INV_PHI = (math.sqrt(5) - 1) / 2
"""Bracket shrink factor per golden-section iteration (`1 / phi`)."""

INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2
"""Relative position of the lower interior probe (`1 / phi^2`)."""

CONCAVITY_TOLERANCE = 1e-9
"""Largest second difference still accepted as concave (absorbs roundoff on linear payoffs)."""

SLOPE_STEP = 1e-12
"""Relative step of the one-sided difference that classifies the optimum regime."""

BEST_RESPONSE_DAMPING = 0.5
"""Weight of the new best response in each damped update."""

BEST_RESPONSE_DEGREE = 4
"""Polynomial degree that smooths each best response before it is blended in."""

Payoff = Callable[[float], float]

# ----------------------------------------------------------------------------------------------------------------------
# Control Optimization


def _evaluate(payoff: Payoff, control: float) -> float:
    value = float(payoff(control))
    if not math.isfinite(value):
        raise NumericError(f'Payoff is not finite at c={control}: {value}', argument=control)
    return value


def default_control_bracket(beta: float) -> Tuple[float, float]:
    """Return the search bracket `[0, max(1, beta^2)]`, which contains `beta^2 / 36` for every beta.

    Args:
        beta: impact coefficient

    Returns:
        tuple: `(lo, hi)`

    """
    return 0.0, max(1.0, beta ** 2)


def golden_section_brackets(payoff: Payoff, lo: float, hi: float, tol: float) -> Iterator[Tuple[float, float]]:
    """Yield the successive brackets of a golden-section search for the maximum of a unimodal payoff.

    The first bracket is `(lo, hi)`; each following bracket is narrower by `INV_PHI`. Iteration stops once the
    width is below `tol`.

    Args:
        payoff: function of the control value
        lo: lower end of the search interval
        hi: upper end of the search interval
        tol: target bracket width

    Yields:
        tuple: `(lo, hi)` bracket

    Raises:
        DomainError: if `lo >= hi` or `tol` is not positive

    """
    if not lo < hi:
        raise DomainError(f'Expected lo < hi, but received [{lo}, {hi}]')
    if not tol > 0:
        raise DomainError(f'Tolerance must be positive, but received `{tol}`')

    width = hi - lo
    probe_lo = lo + INV_PHI_SQUARE * width
    probe_hi = lo + INV_PHI * width
    value_lo = _evaluate(payoff, probe_lo)
    value_hi = _evaluate(payoff, probe_hi)
    yield lo, hi
    while hi - lo >= tol:
        width *= INV_PHI
        if value_lo >= value_hi:
            hi, probe_hi, value_hi = probe_hi, probe_lo, value_lo
            probe_lo = lo + INV_PHI_SQUARE * width
            value_lo = _evaluate(payoff, probe_lo)
        else:
            lo, probe_lo, value_lo = probe_lo, probe_hi, value_hi
            probe_hi = lo + INV_PHI * width
            value_hi = _evaluate(payoff, probe_hi)
        yield lo, hi


def maximize_control(
    payoff: Payoff, bracket: Tuple[float, float] = (0.0, 1.0), tol: float = 1e-8,
) -> Tuple[float, float]:
    """Find the control value maximizing a unimodal payoff with golden-section search.

    The end points of the original bracket are compared against the converged interior point so that a maximum on
    the boundary (such as `c* = 0` when control is pure cost) is returned exactly.

    Args:
        payoff: function of the control value, unimodal on the bracket
        bracket: `(lo, hi)` search interval. Default is `(0, 1)`
        tol: target bracket width. Default is `1e-8`

    Returns:
        tuple: `(c_star, payoff(c_star))`

    """
    lo, hi = bracket
    iterations = -1
    for iterations, (final_lo, final_hi) in enumerate(golden_section_brackets(payoff, lo, hi, tol)):
        logger.debug('Golden section {idx}: [{lo}, {hi}]', idx=iterations, lo=final_lo, hi=final_hi)
    interior = (final_lo + final_hi) / 2
    candidates = [(interior, _evaluate(payoff, interior)), (lo, _evaluate(payoff, lo)), (hi, _evaluate(payoff, hi))]
    c_star, value = max(candidates, key=lambda pair: pair[1])
    logger.info('Optimal control c*={c_star} after {count} iterations', c_star=c_star, count=iterations)
    return c_star, value


# ----------------------------------------------------------------------------------------------------------------------
# Concavity


class OptimumRegime(enum.Enum):
    """Where the optimal control value lies, judged from the slope at the lower end."""

    BOUNDARY = 'c*=0'
    INTERIOR = 'c*>0'


@attr.s(frozen=True)
class ConcavityVerdict:  # noqa: H601
    """Result of `check_concavity`."""

    satisfied: bool = attr.ib(validator=type_validator())
    violation_at: Optional[float] = attr.ib(validator=type_validator())
    max_second_difference: float = attr.ib(validator=type_validator())
    initial_slope: float = attr.ib(validator=type_validator())
    regime: OptimumRegime = attr.ib(validator=type_validator())


def check_concavity(payoff: Payoff, lo: float, hi: float, n_points: int = 101) -> ConcavityVerdict:
    """Check concavity of a payoff on a uniform grid and classify the optimum regime.

    Central second differences at interior grid points must all be below `CONCAVITY_TOLERANCE`. A one-sided first
    difference over a tiny step at `lo` classifies the optimum: positive means `c* > 0`, otherwise `c* = 0`.

    Args:
        payoff: function of the control value
        lo: lower end of the grid, non-negative
        hi: upper end of the grid
        n_points: number of grid points, at least 5. Default is 101

    Returns:
        ConcavityVerdict: verdict, worst second difference, initial slope and regime

    Raises:
        DomainError: if the grid is invalid

    """
    if n_points < 5 or lo < 0 or not lo < hi:
        raise DomainError(f'Expected n_points >= 5 and 0 <= lo < hi, but received {n_points} on [{lo}, {hi}]')
    grid = np.linspace(lo, hi, n_points)
    values = np.array([_evaluate(payoff, float(control)) for control in grid])
    second = values[2:] - 2 * values[1:-1] + values[:-2]
    worst = int(np.argmax(second))
    satisfied = bool(second[worst] < CONCAVITY_TOLERANCE)
    step = (hi - lo) * SLOPE_STEP
    slope = (_evaluate(payoff, lo + step) - values[0]) / step
    return ConcavityVerdict(
        satisfied=satisfied,
        violation_at=None if satisfied else float(grid[worst + 1]),
        max_second_difference=float(second[worst]),
        initial_slope=slope,
        regime=OptimumRegime.INTERIOR if slope > 0 else OptimumRegime.BOUNDARY,
    )


# ----------------------------------------------------------------------------------------------------------------------
# Best Response


def _inverse_bid(points: np.ndarray, bids: np.ndarray, candidate: np.ndarray, side: str) -> np.ndarray:
    """Invert a nondecreasing piecewise-linear bid function.

    `side='left'` returns `inf{theta: b(theta) >= x}` and `side='right'` returns `sup{theta: b(theta) <= x}`.

    Args:
        points: ascending grid of types
        bids: nondecreasing bids on the grid
        candidate: bids to invert
        side: `left` or `right`, passed to `np.searchsorted`

    Returns:
        array: types, clamped to the grid

    """
    idx = np.searchsorted(bids, candidate, side=side)
    inner = np.clip(idx, 1, bids.size - 1)
    bid_lo, bid_hi = bids[inner - 1], bids[inner]
    step = np.where(bid_hi > bid_lo, bid_hi - bid_lo, 1.0)
    fraction = np.clip((candidate - bid_lo) / step, 0.0, 1.0)
    theta = points[inner - 1] + fraction * (points[inner] - points[inner - 1])
    return np.where(idx == 0, points[0], np.where(idx == bids.size, points[-1], theta))


def _win_probability(
    candidate: np.ndarray, points: np.ndarray, bids: np.ndarray, distribution: ValuationDistribution, opponents: int,
) -> np.ndarray:
    """Probability that `candidate` beats every opponent bidding on the grid, ties worth half a win."""
    below = distribution.cdf(_inverse_bid(points, bids, candidate, side='left'))
    at_or_below = distribution.cdf(_inverse_bid(points, bids, candidate, side='right'))
    return np.power(below + 0.5 * (at_or_below - below), opponents)


def _golden_section_argmax(objective: Callable, lo: np.ndarray, hi: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized golden-section search: one independent bracket per element."""
    width = hi - lo
    probe_lo = lo + INV_PHI_SQUARE * width
    probe_hi = lo + INV_PHI * width
    value_lo = objective(probe_lo)
    value_hi = objective(probe_hi)
    widest = float(np.max(width)) if width.size else 0.0
    n_steps = math.ceil(math.log(tol / widest) / math.log(INV_PHI)) if widest > tol else 0
    for _ in range(n_steps):
        left = value_lo >= value_hi
        hi = np.where(left, probe_hi, hi)
        lo = np.where(left, lo, probe_lo)
        width = width * INV_PHI
        next_lo = np.where(left, lo + INV_PHI_SQUARE * width, probe_hi)
        next_hi = np.where(left, probe_lo, lo + INV_PHI * width)
        fresh = objective(np.where(left, next_lo, next_hi))
        value_lo, value_hi = np.where(left, fresh, value_hi), np.where(left, value_lo, fresh)
        probe_lo, probe_hi = next_lo, next_hi
    return (lo + hi) / 2


def _best_responses(
    points: np.ndarray, bids: np.ndarray, distribution: ValuationDistribution, opponents: int, degree: int,
) -> np.ndarray:
    """Best response of every grid type, projected onto polynomials of `degree` by least squares."""
    def objective(candidate: np.ndarray) -> np.ndarray:
        return (points - candidate) * _win_probability(candidate, points, bids, distribution, opponents)

    tol = 1e-10 * max(1.0, float(points[-1]))
    responses = _golden_section_argmax(objective, np.zeros_like(points), points.copy(), tol)
    smooth = Polynomial.fit(points, np.clip(responses, 0.0, points), degree)
    return np.clip(smooth(points), 0.0, points)


def best_response_iteration(
    scenario: AuctionScenario, grid_size: int = 512, tol: float = 1e-6, max_iters: int = 200,
    damping: float = BEST_RESPONSE_DAMPING, degree: int = BEST_RESPONSE_DEGREE,
) -> BidGrid:
    """Compute the symmetric equilibrium bid function by iterating damped best responses on a grid.

    Starting from truthful bidding, each grid type's best response against the opponents' current grid strategy is
    found by golden-section search on `(theta - b) * P(win | b)`. The win probability inverts the opponents' bid
    function under the adjusted type distribution, with ties worth half a win. The responses are projected onto
    polynomials of `degree` and blended into the current bids as `b <- (1 - damping) b + damping BR(b)`.

    The raw best-response map amplifies grid-scale wiggles through the slope of the opponents' bids, so the
    projection keeps every iterate smooth. Near the equilibrium a perturbation of the form `theta^p` then shrinks by
    `1 - damping + damping (1 - p) / n` per iteration.

    Args:
        scenario: symmetric AuctionScenario
        grid_size: number of grid points, at least 64. Default is 512
        tol: sup-norm distance between successive grids, relative to the width of the adjusted type support, that
            ends the iteration. Default is `1e-6`
        max_iters: iteration limit. Default is 200
        damping: weight of the new best response, in `(0, 1]`. Default is `BEST_RESPONSE_DAMPING`
        degree: polynomial degree of the smoothed best response, at least 1. Default is `BEST_RESPONSE_DEGREE`

    Returns:
        BidGrid: converged bid function

    Raises:
        DomainError: if `grid_size < 64`, `damping` is outside `(0, 1]` or `degree < 1`
        ConvergenceError: if the residual is still above the tolerance after `max_iters` iterations

    """
    if grid_size < 64:
        raise DomainError(f'grid_size must be at least 64, but received `{grid_size}`')
    if not 0 < damping <= 1 or degree < 1:
        raise DomainError(f'Expected 0 < damping <= 1 and degree >= 1, but received {damping} and {degree}')
    distribution = scenario.adjusted_distribution
    points = np.linspace(distribution.lower, distribution.upper, grid_size)
    threshold = tol * distribution.width
    bids = points.copy()
    residual = math.inf
    for iteration in range(1, max_iters + 1):
        response = _best_responses(points, bids, distribution, scenario.n_bidders - 1, degree)
        updated = (1 - damping) * bids + damping * response
        residual = float(np.max(np.abs(updated - bids)))
        bids = updated
        logger.debug('Best response {iteration}: residual={residual}', iteration=iteration, residual=residual)
        if residual < threshold:
            logger.info('Best response converged after {iteration} iterations', iteration=iteration)
            return BidGrid(grid_points=points, bids=np.maximum.accumulate(np.clip(bids, 0.0, points)))
    raise ConvergenceError(
        f'Best response did not converge in {max_iters} iterations (residual={residual})',
        residual=residual, iterations=max_iters,
    )


def deviation_scan(
    scenario: AuctionScenario, bid_grid: BidGrid, sample_types: Sequence[float], n_candidates: int = 401,
) -> float:
    """Return the largest interim gain any candidate bid achieves over the grid strategy at the sampled types.

    Opponents bid according to `bid_grid`. A non-positive result means no sampled type has a profitable deviation.

    Args:
        scenario: AuctionScenario the grid was computed for
        bid_grid: candidate equilibrium
        sample_types: adjusted types to test
        n_candidates: number of candidate bids in `[0, theta]` per type. Default is 401

    Returns:
        float: maximum of `best candidate payoff - grid payoff`

    """
    distribution = scenario.adjusted_distribution
    opponents = scenario.n_bidders - 1
    points, bids = bid_grid.grid_points, bid_grid.bids
    gains = []
    for theta in np.asarray(sample_types, dtype=float):
        candidates = np.linspace(0.0, theta, n_candidates)
        deviation = (theta - candidates) * _win_probability(candidates, points, bids, distribution, opponents)
        on_grid = np.array([bid_grid(theta)])
        baseline = (theta - on_grid) * _win_probability(on_grid, points, bids, distribution, opponents)
        gains.append(float(np.max(deviation) - baseline[0]))
    return max(gains)


# ----------------------------------------------------------------------------------------------------------------------
# Incentive Compatibility


@attr.s(frozen=True)
class RegretReport:  # noqa: H601
    """Largest gain from misreporting over a grid of true and reported intrinsic factors."""

    max_regret: float = attr.ib(validator=type_validator())
    argmax_truth: float = attr.ib(validator=type_validator())
    argmax_deviation: float = attr.ib(validator=type_validator())
    grid_resolution: int = attr.ib(validator=type_validator())


def ic_regret_search(
    scenario: AuctionScenario, truth_grid: int = 101, deviation_grid: int = 101, payment_share: float = 0.5,
) -> RegretReport:
    """Search for profitable misreports in the direct mechanism using the exact interim payoff.

    Reporting `r` against a truthful opponent yields `(1 + beta * sqrt(c)) * (theta0 - payment_share * r) * r`.
    With the default payment share of one half, truth-telling is exactly optimal.

    Args:
        scenario: two-bidder uniform `[0, 1]` AuctionScenario
        truth_grid: number of true intrinsic factors on `[0, 1]`. Default is 101
        deviation_grid: number of reported factors on `[0, 1]`. Default is 101
        payment_share: fraction of the winning report paid. Default is one half (the social choice function)

    Returns:
        RegretReport: maximum of `deviation payoff - truthful payoff` and its location

    """
    scenario.require_closed_form('ic_regret_search')
    truths = np.linspace(0.0, 1.0, truth_grid)
    reports = np.linspace(0.0, 1.0, deviation_grid)
    truthful = equations.interim_payoff(truths, truths, scenario.scale, payment_share)
    deviating = equations.interim_payoff(truths[:, np.newaxis], reports[np.newaxis, :], scenario.scale, payment_share)
    regret = deviating - truthful[:, np.newaxis]
    row, col = np.unravel_index(int(np.argmax(regret)), regret.shape)
    report = RegretReport(
        max_regret=float(regret[row, col]),
        argmax_truth=float(truths[row]),
        argmax_deviation=float(reports[col]),
        grid_resolution=max(truth_grid, deviation_grid),
    )
    logger.debug('Regret search: {report}', report=report)
    return report


def revelation_consistency(
    scenario: AuctionScenario,
    sample_types: Sequence[Sequence[float]],
    strategy: Optional[BidStrategyInterface] = None,
    tolerance: Optional[float] = None,
) -> bool:
    """Check that equilibrium play in the first-price auction reproduces the direct mechanism's outcome.

    For each intrinsic profile, the indirect outcome (equilibrium bids, highest bid wins and pays its bid) is compared
    with the social choice function applied to the adjusted types. The direct mechanism charges the winner
    `(n - 1) / n` of its adjusted type, which is one half for two bidders.

    Args:
        scenario: AuctionScenario with intrinsic factors starting at zero
        sample_types: intrinsic profiles, one row per profile and one column per bidder
        strategy: bid strategy. Default is the analytic equilibrium
        tolerance: largest accepted transfer difference. Default is `1e-12`, or the grid spacing for a GridStrategy

    Returns:
        bool: True if every profile has the same winner and matching transfers

    Raises:
        DomainError: if profiles do not match the bidder count or the support does not start at zero

    """
    if scenario.distribution.lower != 0:
        raise DomainError('revelation_consistency requires intrinsic factors supported on [0, upper]')
    profiles = np.atleast_2d(np.asarray(sample_types, dtype=float))
    if profiles.shape[1] != scenario.n_bidders:
        raise DomainError(f'Expected {scenario.n_bidders} types per profile, but received {profiles.shape[1]}')
    strategy = strategy or AnalyticEquilibriumStrategy()
    if tolerance is None:
        tolerance = strategy.bid_grid.spacing if isinstance(strategy, GridStrategy) else 1e-12
    share = (scenario.n_bidders - 1) / scenario.n_bidders
    adjusted = np.asarray(scenario.type_function.evaluate(profiles, scenario.control_value), dtype=float)
    bids = strategy.bids(adjusted, scenario)
    for types, profile_bids in zip(adjusted, bids):
        direct = scf_outcome(types, payment_share=share)
        indirect = first_price_outcome(profile_bids)
        same_winner = direct.winner == indirect.winner
        if not (same_winner and np.allclose(direct.transfers, indirect.transfers, rtol=0, atol=tolerance)):
            logger.debug('Outcomes differ for {types}: {direct} vs {indirect}', types=types, direct=direct,
                         indirect=indirect)
            return False
    return True
