"""Closed-form Gaussian moment integrals used by the analytic engine.

Three families:

* half-line even moments     int_0^inf x^(2n) exp(-p x^2) dx
* half-line odd moments      int_0^inf x^(2n+1) exp(-p x^2) dx
* full-line tilted moments   int_-inf^inf x^n exp(-p x^2 + 2 q x) dx

Everything is evaluated in log domain; the tilted family carries the
exp(q^2/p) factor separately so ratios of tilted moments can cancel it
analytically (q^2/p can exceed 1e4 for macroscopic atom numbers).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp

_LOG_SQRT_PI = 0.5 * math.log(math.pi)

# exact integer factorials below this, log-gamma beyond
_EXACT_FACTORIAL_MAX = 20


def log_factorial(n: int) -> float:
    """log(n!), exact integer arithmetic for small n, log-gamma beyond."""
    if n < 0:
        raise ValueError(f"factorial of negative {n}")
    if n <= _EXACT_FACTORIAL_MAX:
        return math.log(math.factorial(n))
    return float(gammaln(n + 1))


def log_double_factorial_odd(k: int) -> float:
    """log((2n-1)!!) given the odd argument k = 2n-1; (-1)!! = 1.

    Uses (2n-1)!! = (2n)! / (2^n n!).
    """
    if k == -1:
        return 0.0
    if k < -1 or k % 2 == 0:
        raise ValueError(f"expected an odd argument >= -1, got {k}")
    n = (k + 1) // 2
    return log_factorial(2 * n) - n * math.log(2.0) - log_factorial(n)


def log_gauss_even_moment(n: int, p: float) -> float:
    """log of int_0^inf x^(2n) exp(-p x^2) dx = (2n-1)!!/(2 (2p)^n) sqrt(pi/p)."""
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got n={n}")
    if p <= 0:
        raise ValueError(f"decay coefficient must be positive, got p={p}")
    return (
        log_double_factorial_odd(2 * n - 1)
        - math.log(2.0)
        - n * math.log(2.0 * p)
        + _LOG_SQRT_PI
        - 0.5 * math.log(p)
    )


def gauss_even_moment(n: int, p: float) -> float:
    return math.exp(log_gauss_even_moment(n, p))


def log_gauss_odd_moment(n: int, p: float) -> float:
    """log of int_0^inf x^(2n+1) exp(-p x^2) dx = n! / (2 p^(n+1))."""
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got n={n}")
    if p <= 0:
        raise ValueError(f"decay coefficient must be positive, got p={p}")
    return log_factorial(n) - math.log(2.0) - (n + 1) * math.log(p)


def gauss_odd_moment(n: int, p: float) -> float:
    return math.exp(log_gauss_odd_moment(n, p))


def log_tilted_sum(n: int, p: float, q: float) -> float:
    """log of the finite sum sum_{k=0}^{floor(n/2)} (p/(4q^2))^k / ((n-2k)! k!).

    All terms are positive, so a log-sum-exp is exact in spirit and stable
    for any magnitude of p/(4q^2).
    """
    if q == 0.0:
        raise ValueError("tilted sum undefined at q = 0; use the even/odd moments")
    ks = np.arange(n // 2 + 1)
    log_ratio = math.log(p / (4.0 * q * q))
    terms = ks * log_ratio
    terms -= np.array([log_factorial(int(n - 2 * k)) for k in ks])
    terms -= np.array([log_factorial(int(k)) for k in ks])
    return float(logsumexp(terms))


def log_tilted_gauss_moment(n: int, p: float, q: float) -> tuple[float, int]:
    """Tilted full-line moment int x^n exp(-p x^2 + 2 q x) dx, log form.

    Returns ``(log of |integral| without the exp(q^2/p) factor, sign)``;
    the true integral is ``sign * exp(log + q^2/p)``.  The closed form is

        n! exp(q^2/p) sqrt(pi/p) (q/p)^n sum_k (p/(4q^2))^k / ((n-2k)! k!).

    For q = 0 the expression degenerates to the plain even/odd moments
    (odd moments vanish by symmetry).
    """
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got n={n}")
    if p <= 0:
        raise ValueError(f"decay coefficient must be positive, got p={p}")
    if q == 0.0:
        if n % 2 == 1:
            return -math.inf, 0
        # full line = twice the half line for even powers
        return log_gauss_even_moment(n // 2, p) + math.log(2.0), 1
    sign = -1 if (q < 0 and n % 2 == 1) else 1
    log_val = (
        log_factorial(n)
        + _LOG_SQRT_PI
        - 0.5 * math.log(p)
        + n * math.log(abs(q) / p)
        + log_tilted_sum(n, p, q)
    )
    return log_val, sign


def tilted_gauss_moment(n: int, p: float, q: float) -> float:
    """Linear-domain tilted moment; may overflow when q^2/p is large.

    Ratios should go through :func:`log_tilted_gauss_moment`, where the
    exp(q^2/p) factor cancels before exponentiation.
    """
    log_val, sign = log_tilted_gauss_moment(n, p, q)
    if sign == 0:
        return 0.0
    return sign * math.exp(log_val + q * q / p)
