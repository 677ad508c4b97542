"""Test equations."""

import numpy as np

from adjustable_auction import equations


def test_type_scale():
    """Test type_scale and adjusted_type."""
    controls = [0, 1 / 9, 1, 4]
    expected = [1, 5 / 3, 3, 5]

    result = equations.type_scale(2, controls)

    assert np.allclose(result, expected)
    assert np.allclose(equations.adjusted_type([0.3, 0.6], 2, 1 / 9), [0.5, 1.0])
    assert equations.type_scale(0, 0.7) == 1


def test_seller_payoff():
    """Test seller_payoff at the no-control point and at the optimum."""
    result = equations.seller_payoff([0, 2, 6], [0, 1 / 9, 1])

    assert np.allclose(result, [1 / 3, 4 / 9, 4 / 3])


def test_bidder_payoff():
    """Test bidder_payoff."""
    result = equations.bidder_payoff([0, 2], [0, 1 / 9])

    assert np.allclose(result, [1 / 6, 5 / 18])


def test_reserve_payment():
    """Test reserve_payment and its slope."""
    reserves = [0, 0.5, 1]

    result = equations.reserve_payment(reserves)

    assert np.allclose(result, [1 / 6, 5 / 24, 0])
    assert abs(equations.reserve_payment_slope(0.5)) < 1e-15
    assert equations.reserve_payment_slope(0.25) > 0 > equations.reserve_payment_slope(0.75)


def test_interim_payoff():
    """Test interim_payoff for truthful and shaded reports."""
    truthful = equations.interim_payoff(0.6, 0.6, 1.0)
    shaded = equations.interim_payoff(0.6, 0.3, 1.0)
    full_payment = equations.interim_payoff(0.6, 0.3, 1.0, payment_share=1.0)

    assert np.isclose(truthful, 0.18)
    assert np.isclose(shaded, 0.135)
    assert np.isclose(full_payment, 0.09)
    assert np.isclose(equations.interim_payoff(0.6, 0.6, 5 / 3), 0.3)
