"""Exceptions raised by adjustable_auction."""

from typing import Optional


class AuctionError(RuntimeError):
    """Base class for all package errors."""


class DomainError(AuctionError, ValueError):
    """Argument outside the domain of an operation (caller bug, not a model state)."""


class NumericError(AuctionError, ArithmeticError):
    """Numeric evaluation failed, such as a non-finite payoff."""

    def __init__(self, message: str, argument: Optional[float] = None) -> None:
        """Store the offending argument alongside the message.

        Args:
            message: description of the failure
            argument: value of the argument that produced the failure, if known

        """
        super().__init__(message)
        self.argument = argument


class ConvergenceError(NumericError):
    """Iteration stopped before reaching the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int) -> None:
        """Store the last residual and the iteration count.

        Args:
            message: description of the failure
            residual: sup-norm distance between the last two iterates
            iterations: number of completed iterations

        """
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ConfigError(AuctionError):
    """Invalid scenario file or unusable output location."""

    def __init__(self, message: str, key: Optional[str] = None) -> None:
        """Store the offending key.

        Args:
            message: description of the failure
            key: name of the scenario key at fault, if any

        """
        super().__init__(message)
        self.key = key


class CheckFailure(AuctionError):
    """A named verification check did not pass."""

    def __init__(self, message: str, check: str) -> None:
        """Store the name of the failing check.

        Args:
            message: description of the failure
            check: name of the check

        """
        super().__init__(message)
        self.check = check
