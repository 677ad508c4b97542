"""Counter-keyed random substreams.

The uniform draw for `(seed, replication, bidder)` is element `replication % CHUNK_SIZE` of the block generated from
`SeedSequence([seed, bidder, replication // CHUNK_SIZE])`. A draw therefore depends only on its own key: adding
bidders, reordering replications, or changing the number of workers never perturbs any other draw.

"""

from typing import Iterator, Tuple

import attr
import numpy as np
from attrs_strict import type_validator

CHUNK_SIZE = 4096
"""Number of replications sharing one generated block. Also the unit of work handed to Monte Carlo workers."""

SEED_MASK = (1 << 64) - 1
"""Seeds are reduced to unsigned 64-bit integers before seeding."""


def chunk_uniforms(seed: int, bidder: int, chunk: int) -> np.ndarray:
    """Return the full block of uniform `[0, 1)` draws for one bidder and chunk.

    Args:
        seed: master seed (any integer, reduced modulo 2**64)
        bidder: zero-based bidder index
        chunk: zero-based chunk index (`replication // CHUNK_SIZE`)

    Returns:
        array: `CHUNK_SIZE` floats

    """
    sequence = np.random.SeedSequence([seed & SEED_MASK, bidder, chunk])
    return np.random.default_rng(sequence).random(CHUNK_SIZE)


def iter_chunks(start: int, stop: int) -> Iterator[Tuple[int, int, int]]:
    """Yield `(chunk, lo, hi)` slices covering replications `[start, stop)`.

    Args:
        start: first replication index
        stop: one past the last replication index

    Yields:
        tuple: chunk index and the replication range within that chunk

    """
    replication = start
    while replication < stop:
        chunk = replication // CHUNK_SIZE
        hi = min(stop, (chunk + 1) * CHUNK_SIZE)
        yield chunk, replication, hi
        replication = hi


def draw_uniforms(seed: int, bidder: int, start: int, stop: int) -> np.ndarray:
    """Return the uniform draws of one bidder for replications `[start, stop)`.

    Args:
        seed: master seed
        bidder: zero-based bidder index
        start: first replication index
        stop: one past the last replication index

    Returns:
        array: `stop - start` floats in `[0, 1)`

    """
    blocks = [
        chunk_uniforms(seed, bidder, chunk)[lo - chunk * CHUNK_SIZE:hi - chunk * CHUNK_SIZE]
        for chunk, lo, hi in iter_chunks(start, stop)
    ]
    return np.concatenate(blocks) if blocks else np.empty(0)


@attr.s(frozen=True)
class IntrinsicStream:  # noqa: H601
    """Handle on the single draw keyed by `(seed, replication, bidder)`."""

    seed: int = attr.ib(validator=type_validator())
    replication: int = attr.ib(validator=type_validator())
    bidder: int = attr.ib(validator=type_validator())

    def uniform(self) -> float:
        """Return this key's uniform `[0, 1)` draw.

        Returns:
            float: identical on every call and every process

        """
        return float(draw_uniforms(self.seed, self.bidder, self.replication, self.replication + 1)[0])


@attr.s(frozen=True)
class ReplicationStream:  # noqa: H601
    """Handle on all bidders' draws for one replication."""

    seed: int = attr.ib(validator=type_validator())
    replication: int = attr.ib(validator=type_validator())

    def bidder(self, index: int) -> IntrinsicStream:
        """Return the stream of one bidder.

        Args:
            index: zero-based bidder index

        Returns:
            IntrinsicStream: keyed by `(seed, replication, index)`

        """
        return IntrinsicStream(seed=self.seed, replication=self.replication, bidder=index)
