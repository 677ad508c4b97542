"""Helpers for type checking and command line parsing."""

import argparse
import time
from typing import NoReturn, Optional

from beartype import BeartypeConf, beartype
from loguru import logger

typechecked = beartype(conf=BeartypeConf(is_pep484_tower=True))
"""`beartype` decorator that accepts `int` wherever `float` is annotated."""

# ----------------------------------------------------------------------------------------------------------------------
# General Debug


def debug_time(message: str, last: Optional[float] = None) -> float:
    """Log slow sections of a command.

    Args:
        message: string message to log
        last: last timestamp from `time.time()`

    Returns:
        timestamp: the current timestamp to calculate the next delta

    """
    now = time.time()
    delta = now - (now if last is None else last)
    if delta > 0.5:
        logger.info('{message} took {delta:.2f}s', message=message, delta=delta)
    return now


# ----------------------------------------------------------------------------------------------------------------------
# CLI Helpers


class UsageError(RuntimeError):
    """Malformed command line."""


class StrictArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises `UsageError` instead of exiting so callers control the exit status."""

    def error(self, message: str) -> NoReturn:
        """Raise instead of printing usage and calling `sys.exit(2)`.

        Args:
            message: argparse error message

        Raises:
            UsageError: always

        """
        raise UsageError(f'{self.prog}: {message}')


def parse_beta_list(raw: str) -> list:
    """Parse a comma-separated list of non-negative impact coefficients.

    Args:
        raw: string such as `1,2,4`

    Returns:
        list: of floats

    Raises:
        UsageError: if the list is empty or any entry is malformed or negative

    """
    tokens = [token.strip() for token in raw.split(',') if token.strip()]
    if not tokens:
        raise UsageError(f'Expected at least one beta value, but received `{raw}`')
    return [non_negative_float(token) for token in tokens]


def non_negative_float(raw: str) -> float:
    """Convert a command line token to a finite, non-negative float.

    Args:
        raw: string token

    Returns:
        float: parsed value

    Raises:
        UsageError: if the token is not a finite number greater than or equal to zero

    """
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f'Expected a number, but received `{raw}`') from None
    if not (value >= 0 and value != float('inf')):
        raise UsageError(f'Expected a finite non-negative number, but received `{raw}`')
    return value
