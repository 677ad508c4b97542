"""Test utils_random."""

import numpy as np

from adjustable_auction.utils_random import (
    CHUNK_SIZE,
    IntrinsicStream,
    ReplicationStream,
    chunk_uniforms,
    draw_uniforms,
    iter_chunks,
)


def test_iter_chunks():
    """Test chunk slicing across block boundaries."""
    result = list(iter_chunks(4000, 8200))

    assert result == [(0, 4000, 4096), (1, 4096, 8192), (2, 8192, 8200)]
    assert list(iter_chunks(5, 5)) == []


def test_draw_uniforms_matches_single_draws():
    """Test that batch draws and keyed single draws agree exactly."""
    seed, bidder = 42, 1
    batch = draw_uniforms(seed, bidder, 0, 2 * CHUNK_SIZE + 10)

    for replication in [0, CHUNK_SIZE - 1, CHUNK_SIZE, 2 * CHUNK_SIZE + 9]:
        stream = IntrinsicStream(seed=seed, replication=replication, bidder=bidder)

        assert stream.uniform() == batch[replication]

    assert np.array_equal(batch[:CHUNK_SIZE], chunk_uniforms(seed, bidder, 0))
    assert np.all((batch >= 0) & (batch < 1))


def test_streams_are_independent_keys():
    """Test that bidders and seeds select different substreams."""
    first = draw_uniforms(3, 0, 0, 100)

    assert not np.array_equal(first, draw_uniforms(3, 1, 0, 100))
    assert not np.array_equal(first, draw_uniforms(4, 0, 0, 100))
    assert np.array_equal(first, draw_uniforms(3, 0, 0, 100))
    assert draw_uniforms(3, 0, 7, 7).size == 0


def test_negative_seed_is_masked():
    """Test that negative seeds are reduced to 64 bits instead of failing."""
    result = draw_uniforms(-1, 0, 0, 3)

    assert np.array_equal(result, draw_uniforms(2 ** 64 - 1, 0, 0, 3))


def test_replication_stream():
    """Test the per-replication handle."""
    stream = ReplicationStream(seed=9, replication=12)

    result = stream.bidder(2)

    assert result == IntrinsicStream(seed=9, replication=12, bidder=2)
