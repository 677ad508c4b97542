"""Domain types and the deterministic mechanics shared by every other module."""

import enum
import math
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np
from attrs_strict import type_validator

from .errors import DomainError
from .utils_random import IntrinsicStream

# ----------------------------------------------------------------------------------------------------------------------
# Converters and Validators


def _float_tuple(values: Sequence[float]) -> Tuple[float, ...]:
    return tuple(float(value) for value in values)


def _int_tuple(values: Sequence[int]) -> Tuple[int, ...]:
    return tuple(int(value) for value in values)


def _tuple_of(member_type: type):
    return attr.validators.deep_iterable(
        member_validator=attr.validators.instance_of(member_type),
        iterable_validator=attr.validators.instance_of(tuple),
    )


def _require_non_negative_control(control: float) -> None:
    if not control >= 0:
        raise DomainError(f'Control value must be non-negative, but received `{control}`')


# ----------------------------------------------------------------------------------------------------------------------
# Distributions


class DistributionKind(enum.Enum):
    """Families of intrinsic-factor distributions."""

    UNIFORM = 'uniform'


@attr.s(frozen=True)
class ValuationDistribution:  # noqa: H601
    """Distribution of each bidder's intrinsic factor on `[lower, upper]`."""

    lower: float = attr.ib(default=0.0, converter=float, validator=type_validator())
    upper: float = attr.ib(default=1.0, converter=float, validator=type_validator())
    kind: DistributionKind = attr.ib(default=DistributionKind.UNIFORM, validator=type_validator())

    def __attrs_post_init__(self) -> None:
        """Check that the support is a finite, non-empty interval.

        Raises:
            DomainError: if `lower >= upper` or either bound is not finite

        """
        if not (math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower < self.upper):
            raise DomainError(f'Expected finite lower < upper, but received [{self.lower}, {self.upper}]')

    @property
    def width(self) -> float:
        """Length of the support.

        Returns:
            float: `upper - lower`

        """
        return self.upper - self.lower

    @property
    def mean(self) -> float:
        """Expected intrinsic factor.

        Returns:
            float: midpoint of the support

        """
        return (self.lower + self.upper) / 2

    def cdf(self, value):
        """Return `F(value)`, clipped to `[0, 1]` outside the support.

        Args:
            value: scalar or array

        Returns:
            probability: as array or single number

        """
        return np.clip(np.divide(np.subtract(value, self.lower), self.width), 0.0, 1.0)

    def pdf(self, value):
        """Return the density, zero outside the support.

        Args:
            value: scalar or array

        Returns:
            density: as array or single number

        """
        inside = np.logical_and(np.greater_equal(value, self.lower), np.less_equal(value, self.upper))
        return np.where(inside, 1.0 / self.width, 0.0)

    def quantile(self, probability):
        """Return the inverse of `cdf` on the support.

        Args:
            probability: scalar or array in `[0, 1]`

        Returns:
            value: as array or single number

        """
        return np.add(self.lower, np.multiply(np.clip(probability, 0.0, 1.0), self.width))

    def scaled(self, factor: float) -> 'ValuationDistribution':
        """Return the distribution of `factor * X`.

        Args:
            factor: positive multiplier

        Returns:
            ValuationDistribution: with both bounds multiplied by `factor`

        Raises:
            DomainError: if `factor` is not positive

        """
        if not factor > 0:
            raise DomainError(f'Scale factor must be positive, but received `{factor}`')
        return attr.evolve(self, lower=self.lower * factor, upper=self.upper * factor)


# ----------------------------------------------------------------------------------------------------------------------
# Type Function


@attr.s(frozen=True)
class TypeFunction:  # noqa: H601
    """Square-root type function `theta_c = (1 + beta * sqrt(c)) * theta0`."""

    beta: float = attr.ib(default=0.0, converter=float, validator=type_validator())

    def __attrs_post_init__(self) -> None:
        """Check the impact coefficient.

        Raises:
            DomainError: if `beta` is negative or not finite

        """
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DomainError(f'Impact coefficient must be finite and non-negative, but received `{self.beta}`')

    def scale(self, control: float) -> float:
        """Return the factor `1 + beta * sqrt(c)`.

        Args:
            control: control value `c`

        Returns:
            float: multiplier applied to every intrinsic factor

        """
        _require_non_negative_control(control)
        return 1.0 + self.beta * math.sqrt(control)

    def evaluate(self, theta0, control: float):
        """Return the adjusted type(s).

        Args:
            theta0: intrinsic factor as scalar or array
            control: control value `c`

        Returns:
            adjusted type: as array or single number

        """
        if control == 0:
            return theta0
        return np.multiply(self.scale(control), theta0)


# ----------------------------------------------------------------------------------------------------------------------
# Scenario


@attr.s(frozen=True)
class AuctionScenario:  # noqa: H601
    """Complete experiment description: bidders, distribution, type function and control value."""

    n_bidders: int = attr.ib(default=2, validator=type_validator())
    distribution: ValuationDistribution = attr.ib(factory=ValuationDistribution, validator=type_validator())
    type_function: TypeFunction = attr.ib(factory=TypeFunction, validator=type_validator())
    control_value: float = attr.ib(default=0.0, converter=float, validator=type_validator())

    def __attrs_post_init__(self) -> None:
        """Check bidder count and control value.

        Raises:
            DomainError: if fewer than two bidders or a negative control value

        """
        if self.n_bidders < 2:
            raise DomainError(f'An auction needs at least two bidders, but received `{self.n_bidders}`')
        _require_non_negative_control(self.control_value)

    @classmethod
    def uniform(cls, beta: float, control_value: float = 0.0, n_bidders: int = 2) -> 'AuctionScenario':
        """Build a scenario with uniform `[0, 1]` intrinsic factors.

        Args:
            beta: impact coefficient of the type function
            control_value: control value `c`. Default is 0
            n_bidders: number of bidders. Default is 2

        Returns:
            AuctionScenario: new instance

        """
        return cls(n_bidders=n_bidders, type_function=TypeFunction(beta=beta), control_value=control_value)

    @property
    def beta(self) -> float:
        """Impact coefficient of the type function.

        Returns:
            float: `beta`

        """
        return self.type_function.beta

    @property
    def scale(self) -> float:
        """Factor applied to every intrinsic factor at this scenario's control value.

        Returns:
            float: `1 + beta * sqrt(c)`

        """
        return self.type_function.scale(self.control_value)

    @property
    def adjusted_distribution(self) -> ValuationDistribution:
        """Distribution of the adjusted types after the control is applied.

        Returns:
            ValuationDistribution: intrinsic distribution scaled by `self.scale`

        """
        return self.distribution.scaled(self.scale)

    @property
    def is_closed_form(self) -> bool:
        """True when the two-bidder uniform `[0, 1]` closed forms apply.

        Returns:
            bool: True for two bidders with uniform `[0, 1]` intrinsic factors

        """
        return self.n_bidders == 2 and self.distribution == ValuationDistribution()

    def require_closed_form(self, operation: str) -> None:
        """Refuse scenarios outside the two-bidder uniform `[0, 1]` setting.

        Args:
            operation: name of the calling operation for the error message

        Raises:
            DomainError: if `self.is_closed_form` is False

        """
        if not self.is_closed_form:
            raise DomainError(
                f'{operation} has a closed form only for two uniform [0, 1] bidders. Received {self.n_bidders} bidders'
                f' on {self.distribution}',
            )

    def with_control(self, control_value: float) -> 'AuctionScenario':
        """Return a copy at another control value.

        Args:
            control_value: new control value `c`

        Returns:
            AuctionScenario: new instance

        """
        return attr.evolve(self, control_value=control_value)


# ----------------------------------------------------------------------------------------------------------------------
# Outcomes and Reports


@attr.s(frozen=True)
class SocialChoiceOutcome:  # noqa: H601
    """Allocation indicators and transfers for one type profile. Negative transfers are payments to the seller."""

    allocation: Tuple[int, ...] = attr.ib(converter=_int_tuple, validator=_tuple_of(int))
    seller_allocation: int = attr.ib(validator=type_validator())
    transfers: Tuple[float, ...] = attr.ib(converter=_float_tuple, validator=_tuple_of(float))
    seller_transfer: float = attr.ib(converter=float, validator=type_validator())

    def __attrs_post_init__(self) -> None:
        """Check the single-object and budget-balance invariants.

        Raises:
            DomainError: if the invariants do not hold

        """
        if len(self.allocation) != len(self.transfers):
            raise DomainError(f'Expected one transfer per bidder: {self.allocation} vs {self.transfers}')
        indicators = [*self.allocation, self.seller_allocation]
        if any(flag not in {0, 1} for flag in indicators) or sum(indicators) != 1:
            raise DomainError(f'Exactly one party must hold the object: {indicators}')
        if not math.isclose(self.seller_transfer, -math.fsum(self.transfers), abs_tol=1e-12):
            raise DomainError(f'Transfers are not budget balanced: {self.seller_transfer} vs {self.transfers}')

    @property
    def winner(self) -> Optional[int]:
        """Zero-based index of the bidder receiving the object.

        Returns:
            int: winner index or None when the seller keeps the object

        """
        return self.allocation.index(1) if 1 in self.allocation else None


class EstimationMethod(enum.Enum):
    """How a `PayoffReport` was produced."""

    ANALYTIC = 'analytic'
    MONTE_CARLO = 'monte_carlo'


@attr.s(frozen=True)
class Estimate:  # noqa: H601
    """Point estimate with its standard error."""

    value: float = attr.ib(converter=float, validator=type_validator())
    stderr: float = attr.ib(default=0.0, converter=float, validator=type_validator())


@attr.s(frozen=True)
class PayoffReport:  # noqa: H601
    """Seller and per-bidder expected payoffs with estimation metadata."""

    control_value: float = attr.ib(converter=float, validator=type_validator())
    seller_payoff: Estimate = attr.ib(validator=type_validator())
    bidder_payoffs: Tuple[Estimate, ...] = attr.ib(converter=tuple, validator=_tuple_of(Estimate))
    replications: int = attr.ib(validator=type_validator())
    seed: int = attr.ib(validator=type_validator())
    method: EstimationMethod = attr.ib(validator=type_validator())
    mean_winning_bid: Optional[Estimate] = attr.ib(default=None)

    def __attrs_post_init__(self) -> None:
        """Check that analytic reports carry no sampling metadata.

        Raises:
            DomainError: if an analytic report has a standard error or replications

        """
        if self.method is EstimationMethod.ANALYTIC:
            estimates = [self.seller_payoff, *self.bidder_payoffs]
            if self.replications != 0 or any(estimate.stderr != 0 for estimate in estimates):
                raise DomainError('Analytic reports must have zero standard error and zero replications')

    def quantities(self) -> List[dict]:
        """Flatten the report into rows of `(name, estimate, stderr, replications, seed)`.

        Returns:
            list: of dictionaries in a stable order

        """
        named = [('control_value', Estimate(self.control_value)), ('seller_payoff', self.seller_payoff)]
        if self.mean_winning_bid is not None:
            named.append(('mean_winning_bid', self.mean_winning_bid))
        named.extend((f'bidder_{idx + 1}_payoff', estimate) for idx, estimate in enumerate(self.bidder_payoffs))
        return [
            {
                'name': name,
                'estimate': estimate.value,
                'stderr': estimate.stderr,
                'replications': self.replications,
                'seed': self.seed,
            }
            for name, estimate in named
        ]


# ----------------------------------------------------------------------------------------------------------------------
# Operations


def apply_type_function(type_function: TypeFunction, theta0: float, control: float) -> float:
    """Return the adjusted type `(1 + beta * sqrt(c)) * theta0`.

    Args:
        type_function: TypeFunction instance
        theta0: intrinsic factor
        control: control value `c`

    Returns:
        float: adjusted type

    """
    return float(type_function.evaluate(theta0, control))


def scf_outcome(adjusted_types: Sequence[float], payment_share: float = 0.5) -> SocialChoiceOutcome:
    """Apply the social choice function to a profile of adjusted types.

    The highest type receives the object (ties go to the lowest index) and pays `payment_share` of its type.

    Args:
        adjusted_types: one non-negative adjusted type per bidder
        payment_share: fraction of the winning type paid to the seller. Default is one half

    Returns:
        SocialChoiceOutcome: allocation and transfers

    Raises:
        DomainError: if the profile is empty or contains negative types

    """
    types = np.asarray(adjusted_types, dtype=float)
    if types.size == 0:
        raise DomainError('Cannot allocate with an empty type profile')
    if np.any(types < 0):
        raise DomainError(f'Adjusted types must be non-negative, but received {types.tolist()}')
    winner = int(np.argmax(types))
    payment = payment_share * float(types[winner])
    allocation = [0] * types.size
    allocation[winner] = 1
    transfers = [0.0] * types.size
    transfers[winner] = -payment
    return SocialChoiceOutcome(
        allocation=allocation, seller_allocation=0, transfers=transfers, seller_transfer=payment,
    )


def first_price_outcome(bids: Sequence[float]) -> SocialChoiceOutcome:
    """Allocate to the highest bid (ties to the lowest index) and charge the winner its bid.

    Args:
        bids: one non-negative bid per bidder

    Returns:
        SocialChoiceOutcome: allocation and transfers

    """
    return scf_outcome(bids, payment_share=1.0)


def sample_intrinsic(distribution: ValuationDistribution, stream: IntrinsicStream) -> float:
    """Draw one intrinsic factor.

    Args:
        distribution: ValuationDistribution
        stream: handle keyed by `(seed, replication, bidder)`

    Returns:
        float: value within the support

    """
    return float(distribution.quantile(stream.uniform()))
