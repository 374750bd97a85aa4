"""Scalar special functions needed by the distribution-fitting code.

``math.lgamma`` and ``math.erf`` come from the C library. The regularized
lower incomplete gamma function uses the classic series / continued-fraction
pair (series for x < a + 1, Lentz's method otherwise), and digamma /
trigamma use upward recurrence into their asymptotic expansions. All are
plain-float scalar routines; callers vectorize where it matters.
"""

from __future__ import annotations

import math

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 50000


def _gamma_p_series(a: float, x: float) -> float:
    # sum_{n>=0} x^n / (a (a+1) ... (a+n)), scaled by exp(-x + a ln x - lgamma(a))
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _gamma_q_contfrac(a: float, x: float) -> float:
    # Continued fraction for the upper tail Q(a, x), modified Lentz method.
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError(f"incomplete gamma continued fraction failed to converge (a={a}, x={x})")


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(a, x)."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x)."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def erf(x: float) -> float:
    return math.erf(x)


def log_gamma(x: float) -> float:
    return math.lgamma(x)


# Asymptotic tail coefficients: Bernoulli numbers B_2k / (2k) for digamma.
_DIGAMMA_SHIFT = 10.0


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, for x > 0."""
    if x <= 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    result = 0.0
    while x < _DIGAMMA_SHIFT:
        result -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # psi(x) ~ ln x - 1/(2x) - sum B_2k / (2k x^{2k})
    tail = inv2 * (
        1.0 / 12.0
        - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0)))
    )
    return result + math.log(x) - 0.5 * inv - tail


def trigamma(x: float) -> float:
    """Second derivative of log-gamma, for x > 0."""
    if x <= 0.0:
        raise ValueError(f"trigamma requires x > 0, got {x}")
    result = 0.0
    while x < _DIGAMMA_SHIFT:
        result += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # psi'(x) ~ 1/x + 1/(2x^2) + sum B_2k / x^{2k+1}
    tail = inv * inv2 * (
        1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * 5.0 / 66.0)))
    )
    return result + inv + 0.5 * inv2 + tail
