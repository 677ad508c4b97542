"""Bid functions mapping adjusted types to bids."""

import enum

import attr
import numpy as np
from implements import Interface, implements

from .errors import DomainError
from .model import AuctionScenario


class BidStrategyKind(enum.Enum):
    """Bid strategies available to the Monte Carlo engine."""

    ANALYTIC_EQUILIBRIUM = 'analytic_equilibrium'
    GRID_FUNCTION = 'grid_function'


def _float_array(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@attr.s(frozen=True, eq=False)
class BidGrid:  # noqa: H601
    """Discretized monotone bid function on ascending adjusted-type grid points."""

    grid_points: np.ndarray = attr.ib(converter=_float_array)
    bids: np.ndarray = attr.ib(converter=_float_array)

    def __attrs_post_init__(self) -> None:
        """Check shape, ordering and the no-overbidding bound.

        Raises:
            DomainError: if any invariant does not hold

        """
        if self.grid_points.ndim != 1 or self.grid_points.shape != self.bids.shape or self.grid_points.size < 2:
            raise DomainError(f'Expected matching 1-D arrays, but received {self.grid_points.shape} and {self.bids.shape}')
        if np.any(np.diff(self.grid_points) <= 0):
            raise DomainError('Grid points must be strictly ascending')
        if np.any(np.diff(self.bids) < 0):
            raise DomainError('Bids must be nondecreasing along the grid')
        if np.any(self.bids < 0) or np.any(self.bids > self.grid_points + 1e-12):
            raise DomainError('Bids must lie between zero and the corresponding type')

    @property
    def spacing(self) -> float:
        """Largest distance between neighboring grid points.

        Returns:
            float: grid spacing

        """
        return float(np.max(np.diff(self.grid_points)))

    def __call__(self, adjusted_types):
        """Interpolate the bid function linearly, clamping outside the grid.

        Args:
            adjusted_types: scalar or array

        Returns:
            bids: as array or single number

        """
        return np.interp(adjusted_types, self.grid_points, self.bids)

    def distance_to(self, bid_function) -> float:
        """Sup-norm distance to another bid function on this grid.

        Args:
            bid_function: callable accepting an array of adjusted types

        Returns:
            float: `max |self.bids - bid_function(self.grid_points)|`

        """
        return float(np.max(np.abs(self.bids - bid_function(self.grid_points))))

    def scaled(self, factor: float) -> 'BidGrid':
        """Return the bid function of types scaled by `factor`, scaling both coordinates.

        Args:
            factor: positive multiplier

        Returns:
            BidGrid: new instance

        """
        return BidGrid(grid_points=self.grid_points * factor, bids=self.bids * factor)


class BidStrategyInterface(Interface):  # noqa: H601
    """Strategy shared by all symmetric bidders."""

    def bids(self, adjusted_types: np.ndarray, scenario: AuctionScenario) -> np.ndarray:  # noqa: D102
        ...


@implements(BidStrategyInterface)
class AnalyticEquilibriumStrategy:  # noqa: H601
    """Symmetric equilibrium for uniform types: shade by `1 / n` toward the lowest adjusted type."""

    def bids(self, adjusted_types: np.ndarray, scenario: AuctionScenario) -> np.ndarray:
        """Return `lower + (n - 1) / n * (theta - lower)`; for two bidders on `[0, 1]` this is `theta / 2`.

        Args:
            adjusted_types: array of any shape
            scenario: AuctionScenario the bids are made in

        Returns:
            array: bids

        """
        lower = scenario.adjusted_distribution.lower
        shading = (scenario.n_bidders - 1) / scenario.n_bidders
        return np.add(lower, np.multiply(shading, np.subtract(adjusted_types, lower)))


@implements(BidStrategyInterface)
class GridStrategy:  # noqa: H601
    """Bid according to a computed `BidGrid`."""

    def __init__(self, bid_grid: BidGrid) -> None:
        """Store the grid.

        Args:
            bid_grid: BidGrid from the best-response solver

        """
        self.bid_grid = bid_grid

    def bids(self, adjusted_types: np.ndarray, scenario: AuctionScenario) -> np.ndarray:
        """Interpolate the stored grid.

        Args:
            adjusted_types: array of any shape
            scenario: AuctionScenario the bids are made in (unused, the grid already encodes it)

        Returns:
            array: bids

        """
        return np.asarray(self.bid_grid(adjusted_types), dtype=float)


@implements(BidStrategyInterface)
class TruthfulStrategy:  # noqa: H601
    """Bid the adjusted type itself. Not an equilibrium of the first-price auction."""

    def bids(self, adjusted_types: np.ndarray, scenario: AuctionScenario) -> np.ndarray:
        """Return the adjusted types unchanged.

        Args:
            adjusted_types: array of any shape
            scenario: AuctionScenario the bids are made in (unused)

        Returns:
            array: bids

        """
        return np.asarray(adjusted_types, dtype=float)
