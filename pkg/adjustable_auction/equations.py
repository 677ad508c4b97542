"""Closed-form equations of the two-bidder uniform auction with a square-root type function.

Every function accepts scalars or numpy arrays and broadcasts like the numpy ufuncs it is built from.

"""

import numpy as np


def type_scale(beta, control):
    """Return the multiplicative factor applied to every intrinsic factor.

    `s = 1 + beta * sqrt(c)`

    Args:
        beta: impact coefficient of the control factor
        control: control value(s) `c`, non-negative

    Returns:
        scale: as array or single number

    """
    return np.add(1.0, np.multiply(beta, np.sqrt(control)))


def adjusted_type(theta0, beta, control):
    """Return the adjusted type `(1 + beta * sqrt(c)) * theta0`.

    Args:
        theta0: intrinsic factor(s)
        beta: impact coefficient of the control factor
        control: control value(s) `c`, non-negative

    Returns:
        theta_c: as array or single number

    """
    return np.multiply(type_scale(beta, control), theta0)


def seller_payoff(beta, control):
    """Return the seller's expected payoff net of the control cost.

    `u_d = (1 + beta * sqrt(c)) / 3 - c`

    Args:
        beta: impact coefficient of the control factor
        control: control value(s) `c`, non-negative

    Returns:
        u_d: as array or single number

    """
    return np.subtract(np.divide(type_scale(beta, control), 3.0), control)


def bidder_payoff(beta, control):
    """Return each bidder's ex ante expected payoff.

    `u_i = (1 + beta * sqrt(c)) / 6`, half of the winner's expected surplus

    Args:
        beta: impact coefficient of the control factor
        control: control value(s) `c`, non-negative

    Returns:
        u_i: as array or single number

    """
    return np.divide(type_scale(beta, control), 6.0)


def payment_integrand(valuation):
    """Return `y * (1 - F(y)) * g(y)` for the uniform distribution on `[0, 1]`.

    Args:
        valuation: valuation(s) `y`

    Returns:
        integrand: as array or single number

    """
    return np.multiply(valuation, np.subtract(1.0, valuation))


def reserve_payment(reserve):
    """Return a bidder's expected payment in the optimal auction with reserve `r` for uniform `[0, 1]` values.

    `r^2 * (1 - r) + [y^2 / 2 - y^3 / 3]` evaluated from `r` to `1`

    Args:
        reserve: reserve price(s) in `[0, 1]`

    Returns:
        payment: as array or single number

    """
    reserve = np.asarray(reserve, dtype=float)
    antiderivative = np.subtract(np.divide(np.square(reserve), 2.0), np.divide(np.power(reserve, 3), 3.0))
    tail = np.subtract(1.0 / 2.0 - 1.0 / 3.0, antiderivative)
    return np.add(np.multiply(np.square(reserve), np.subtract(1.0, reserve)), tail)


def interim_payoff(theta0, report, scale, payment_share=0.5):
    """Return a bidder's interim payoff for reporting `report` against a truthful opponent.

    The winner pays `payment_share` of the reported adjusted type. With uniform `[0, 1]` intrinsic factors the report
    wins with probability `report`, so `u = scale * (theta0 - payment_share * report) * report`.

    Args:
        theta0: true intrinsic factor(s)
        report: reported intrinsic factor(s) in `[0, 1]`
        scale: type scale `1 + beta * sqrt(c)`
        payment_share: fraction of the winning report paid to the seller. Default is one half

    Returns:
        payoff: as array or single number

    """
    surplus = np.subtract(theta0, np.multiply(payment_share, report))
    return np.multiply(scale, np.multiply(surplus, report))


def reserve_payment_slope(reserve):
    """Return the derivative of `reserve_payment` with respect to the reserve.

    `d/dr [r^2 * (1 - r)] - r * (1 - r) = r - 2 * r^2`

    Args:
        reserve: reserve price(s) in `[0, 1]`

    Returns:
        slope: as array or single number

    """
    reserve = np.asarray(reserve, dtype=float)
    head = np.subtract(np.multiply(2.0, reserve), np.multiply(3.0, np.square(reserve)))
    return np.subtract(head, payment_integrand(reserve))
