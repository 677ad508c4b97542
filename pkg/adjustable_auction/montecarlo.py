"""Seeded, reproducible simulation of the type-adjustable first-price auction.

Each replication runs the four steps of the mechanism: the seller commits to the control value, every bidder draws an
intrinsic factor and adjusts it with the type function, bidders submit bids, and the highest bid wins and pays its
bid. Replications are grouped into chunks of `utils_random.CHUNK_SIZE`; chunks may run on any number of workers and
are concatenated in replication order before any reduction, so results are bit-identical for every worker count.

"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import attr
import numpy as np
from attrs_strict import type_validator
from loguru import logger
from tqdm import tqdm

from .errors import DomainError
from .model import (
    AuctionScenario,
    Estimate,
    EstimationMethod,
    PayoffReport,
    SocialChoiceOutcome,
    first_price_outcome,
    sample_intrinsic,
)
from .strategies import (
    AnalyticEquilibriumStrategy,
    BidGrid,
    BidStrategyInterface,
    BidStrategyKind,
    GridStrategy,
)
from .utils_random import ReplicationStream, draw_uniforms, iter_chunks

# ----------------------------------------------------------------------------------------------------------------------
# Configuration


@attr.s(frozen=True)
class SimulationConfig:  # noqa: H601
    """Scenario plus the sampling parameters of one Monte Carlo experiment."""

    scenario: AuctionScenario = attr.ib(validator=type_validator())
    replications: int = attr.ib(validator=type_validator())
    seed: int = attr.ib(default=0, validator=type_validator())
    bid_strategy: BidStrategyKind = attr.ib(default=BidStrategyKind.ANALYTIC_EQUILIBRIUM, validator=type_validator())
    bid_grid: Optional[BidGrid] = attr.ib(default=None)
    workers: int = attr.ib(default=1, validator=type_validator())
    show_progress: bool = attr.ib(default=False, validator=type_validator())

    def __attrs_post_init__(self) -> None:
        """Check sampling parameters.

        Raises:
            DomainError: for zero replications, zero workers, or a grid strategy without a grid

        """
        if self.replications < 1:
            raise DomainError(f'replications must be at least 1, but received `{self.replications}`')
        if self.workers < 1:
            raise DomainError(f'workers must be at least 1, but received `{self.workers}`')
        if self.bid_strategy is BidStrategyKind.GRID_FUNCTION and self.bid_grid is None:
            raise DomainError('The grid_function strategy requires a bid_grid')

    def strategy(self) -> BidStrategyInterface:
        """Build the configured bid strategy.

        Returns:
            BidStrategyInterface: strategy instance

        """
        if self.bid_strategy is BidStrategyKind.GRID_FUNCTION:
            return GridStrategy(self.bid_grid)
        return AnalyticEquilibriumStrategy()


@attr.s(frozen=True)
class AuctionRound:  # noqa: H601
    """Everything realized in one replication."""

    outcome: SocialChoiceOutcome = attr.ib()
    adjusted_types: Tuple[float, ...] = attr.ib(converter=tuple)
    bids: Tuple[float, ...] = attr.ib(converter=tuple)
    utilities: Tuple[float, ...] = attr.ib(converter=tuple)
    seller_revenue: float = attr.ib(converter=float)


# ----------------------------------------------------------------------------------------------------------------------
# Single Replication


def run_auction_once(
    scenario: AuctionScenario,
    stream: ReplicationStream,
    strategy: Optional[BidStrategyInterface] = None,
    forced_intrinsic: Optional[Sequence[float]] = None,
) -> AuctionRound:
    """Run one replication of the auction.

    Args:
        scenario: AuctionScenario
        stream: random stream of this replication
        strategy: bid strategy. Default is the analytic equilibrium
        forced_intrinsic: optional intrinsic factors replacing the random draws

    Returns:
        AuctionRound: outcome, realized utilities and seller revenue net of the control cost

    Raises:
        DomainError: if the forced draws do not match the bidder count

    """
    strategy = strategy or AnalyticEquilibriumStrategy()
    if forced_intrinsic is None:
        intrinsic = [sample_intrinsic(scenario.distribution, stream.bidder(idx)) for idx in range(scenario.n_bidders)]
    else:
        intrinsic = [float(value) for value in forced_intrinsic]
        if len(intrinsic) != scenario.n_bidders:
            raise DomainError(f'Expected {scenario.n_bidders} forced draws, but received {intrinsic}')
    adjusted = np.asarray(scenario.type_function.evaluate(np.array(intrinsic), scenario.control_value), dtype=float)
    bids = np.asarray(strategy.bids(adjusted, scenario), dtype=float)
    outcome = first_price_outcome(bids)
    winner = outcome.winner
    utilities = np.zeros_like(adjusted)
    utilities[winner] = adjusted[winner] - bids[winner]
    return AuctionRound(
        outcome=outcome,
        adjusted_types=adjusted.tolist(),
        bids=bids.tolist(),
        utilities=utilities.tolist(),
        seller_revenue=bids[winner] - scenario.control_value,
    )


# ----------------------------------------------------------------------------------------------------------------------
# Batches


def draw_intrinsic_profiles(scenario: AuctionScenario, seed: int, start: int, stop: int) -> np.ndarray:
    """Return the intrinsic factors of replications `[start, stop)`, one column per bidder.

    Args:
        scenario: AuctionScenario
        seed: master seed
        start: first replication index
        stop: one past the last replication index

    Returns:
        array: shape `(stop - start, n_bidders)`

    """
    columns = [draw_uniforms(seed, bidder, start, stop) for bidder in range(scenario.n_bidders)]
    return np.asarray(scenario.distribution.quantile(np.column_stack(columns)), dtype=float)


def _simulate_span(
    scenario: AuctionScenario, strategy: BidStrategyInterface, seed: int, span: Tuple[int, int, int],
) -> Tuple[np.ndarray, np.ndarray]:
    """Return winning bids and per-bidder utilities for one chunk of replications."""
    _chunk, start, stop = span
    intrinsic = draw_intrinsic_profiles(scenario, seed, start, stop)
    adjusted = np.asarray(scenario.type_function.evaluate(intrinsic, scenario.control_value), dtype=float)
    bids = np.asarray(strategy.bids(adjusted, scenario), dtype=float)
    rows = np.arange(stop - start)
    winners = np.argmax(bids, axis=1)
    winning_bids = bids[rows, winners]
    utilities = np.zeros_like(adjusted)
    utilities[rows, winners] = adjusted[rows, winners] - winning_bids
    return winning_bids, utilities


def _estimate(samples: np.ndarray) -> Estimate:
    """Sample mean and its standard error `std / sqrt(N)`."""
    count = samples.size
    stderr = float(np.std(samples, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return Estimate(value=float(np.mean(samples)), stderr=stderr)


def estimate_payoffs(config: SimulationConfig) -> PayoffReport:
    """Estimate the seller's and every bidder's expected payoff by simulation.

    The seller's payoff is the mean winning bid minus the control value.

    Args:
        config: SimulationConfig

    Returns:
        PayoffReport: Monte Carlo estimates with standard errors

    """
    scenario = config.scenario
    strategy = config.strategy()
    spans = list(iter_chunks(0, config.replications))
    logger.debug('Simulating {count} chunks on {workers} worker(s)', count=len(spans), workers=config.workers)

    def run(span: Tuple[int, int, int]) -> Tuple[np.ndarray, np.ndarray]:
        return _simulate_span(scenario, strategy, config.seed, span)

    progress = {'total': len(spans), 'disable': not config.show_progress, 'desc': 'chunks'}
    if config.workers == 1:
        results = list(tqdm(map(run, spans), **progress))
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(tqdm(pool.map(run, spans), **progress))

    winning_bids = np.concatenate([winning for winning, _utilities in results])
    utilities = np.concatenate([chunk_utilities for _winning, chunk_utilities in results], axis=0)
    mean_bid = _estimate(winning_bids)
    report = PayoffReport(
        control_value=scenario.control_value,
        seller_payoff=Estimate(value=mean_bid.value - scenario.control_value, stderr=mean_bid.stderr),
        bidder_payoffs=tuple(_estimate(utilities[:, idx]) for idx in range(scenario.n_bidders)),
        replications=config.replications,
        seed=config.seed,
        method=EstimationMethod.MONTE_CARLO,
        mean_winning_bid=mean_bid,
    )
    logger.info('Seller payoff {value} +/- {stderr}', value=report.seller_payoff.value,
                stderr=report.seller_payoff.stderr)
    return report


def winner_expectation_estimate(n_reps: int, seed: int) -> Estimate:
    """Estimate the expected maximum of two independent uniform [0, 1] draws with its standard error.

    Args:
        n_reps: number of replications, at least 1
        seed: master seed

    Returns:
        Estimate: sample mean and standard error

    Raises:
        DomainError: if `n_reps < 1`

    """
    if n_reps < 1:
        raise DomainError(f'n_reps must be at least 1, but received `{n_reps}`')
    maxima = np.maximum(draw_uniforms(seed, 0, 0, n_reps), draw_uniforms(seed, 1, 0, n_reps))
    return _estimate(maxima)


def estimate_winner_expectation(n_reps: int, seed: int) -> float:
    """Return the sample mean of the maximum of two independent uniform [0, 1] draws.

    Args:
        n_reps: number of replications, at least 1
        seed: master seed

    Returns:
        float: estimate of 2/3

    """
    return winner_expectation_estimate(n_reps, seed).value
