"""Independent reference implementations used to validate the closed forms.

Every function here recomputes a quantity through a route that shares no
code with the implementation it checks: adaptive quadrature instead of
moment identities, direct series summation instead of closed-form
overlaps, ODE integration instead of algebraic steady states, exhaustive
enumeration instead of binomial formulas, and rational arithmetic instead
of floating-point log sums.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.special import logsumexp

from .model import CavityParams


# ----------------------------------------------------------------------
# adaptive quadrature of the conditional-moment integrals
# ----------------------------------------------------------------------

def _log_half_line_integral(n: int, p: float, q: float) -> float:
    """log of int_0^inf z^n exp(-p z^2 + 2 q z) dz by adaptive quadrature.

    The integrand spans hundreds of orders of magnitude, so it is
    evaluated relative to its peak value and the peak log is added back.
    """
    if p <= 0:
        raise ValueError(f"need p > 0, got {p}")

    def h(z):
        if z <= 0.0:
            return -math.inf if n > 0 else (2.0 * q * z - p * z * z)
        return n * math.log(z) - p * z * z + 2.0 * q * z

    if n > 0:
        zstar = (q + math.sqrt(q * q + 2.0 * n * p)) / (2.0 * p)
        width = 1.0 / math.sqrt(n / zstar**2 + 2.0 * p)
    else:
        zstar = max(q / p, 0.0)
        width = 1.0 / math.sqrt(2.0 * p)
    h0 = h(zstar) if zstar > 0 else h(1e-300) if n == 0 else 0.0
    if zstar == 0.0 and n == 0:
        h0 = 0.0
    lo = max(0.0, zstar - 60.0 * width)
    hi = zstar + 60.0 * width

    def f(z):
        hz = h(z)
        return math.exp(hz - h0) if hz > -math.inf else 0.0

    val, _ = quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=500,
                  points=[zstar] if lo < zstar < hi else None)
    if val <= 0.0:
        return -math.inf
    return h0 + math.log(val)


def log_weighted_integral_quadrature(
    n: int, p: float, q: float, half_line: bool = False
) -> tuple[float, int]:
    """log |I| and sign of I = int z^n exp(-p z^2 + 2 q z) dz by quadrature.

    Full line by default; ``half_line=True`` restricts to z >= 0 (used to
    quantify the half-line/full-line difference for shifted weights).
    """
    log_pos = _log_half_line_integral(n, p, q)
    if half_line:
        return log_pos, 1
    log_neg = _log_half_line_integral(n, p, -q)  # mirror z -> -z
    sign_neg = (-1) ** n
    vals = np.array([log_pos, log_neg])
    signs = np.array([1.0, float(sign_neg)])
    log_abs, sign = logsumexp(vals, b=signs, return_sign=True)
    return float(log_abs), int(sign)


def conditional_moment_quadrature(
    m: int,
    tau: float,
    sigma: float,
    z0: float = 0.0,
    order: int = 2,
    half_line: bool = False,
) -> float:
    """<z^order> of p(z) ~ z^(2m) exp(-z^2 tau - (z - z0)^2 / (2 sigma^2)).

    Pure quadrature; knows nothing about factorial identities.
    """
    p = tau + 1.0 / (2.0 * sigma**2)
    q = z0 / (2.0 * sigma**2)
    log_num, sign_num = log_weighted_integral_quadrature(
        2 * m + order, p, q, half_line
    )
    log_den, sign_den = log_weighted_integral_quadrature(2 * m, p, q, half_line)
    return sign_num * sign_den * math.exp(log_num - log_den)


def next_count_prob_quadrature(
    m: int,
    tau: float,
    sigma: float,
    z0: float,
    dtau: float,
    half_line: bool = False,
) -> float:
    """Quadrature value of the next-count probability <z^2>_c dtau."""
    return conditional_moment_quadrature(m, tau, sigma, z0, 2, half_line) * dtau


# ----------------------------------------------------------------------
# coherent-state overlap by direct Fock-series summation
# ----------------------------------------------------------------------

def coherent_overlap_series(alpha_abs: float, phi: float, n_terms: int = 201,
                            digits: int = 60) -> complex:
    """Partial sum of sum_n |alpha|^(2n)/n! e^(-|alpha|^2) e^(-2 i n phi).

    The terms are O(1) while the sum can be as small as e^(-2 |alpha|^2),
    so the cancellation is performed in ``digits``-digit arithmetic and
    only the final value is rounded to a complex double.
    """
    if alpha_abs == 0.0:
        return 1.0 + 0.0j
    import mpmath

    with mpmath.workdps(digits):
        a2 = mpmath.mpf(alpha_abs) ** 2
        rot = mpmath.exp(mpmath.mpc(0, -2.0 * phi))
        total = mpmath.mpc(0)
        term = mpmath.mpc(mpmath.exp(-a2))  # n = 0
        for n in range(1, n_terms):
            total += term
            term = term * a2 * rot / n
        total += term
        return complex(total)


# ----------------------------------------------------------------------
# driven damped cavity: steady state by ODE integration
# ----------------------------------------------------------------------

def cavity_steady_state_ode(
    params: CavityParams,
    D10: complex = 1.0,
    D11: complex = 0.0,
    horizon_kappas: float = 60.0,
) -> complex:
    """Relax d(alpha)/dt = (i(delta_p - U11 D11) - kappa) alpha + drive to
    its fixed point by explicit time integration from vacuum.

    The drive is eta - i U10 a0 D10.  Independent check of the algebraic
    Lorentzian amplitude.
    """
    lam = 1j * (params.delta_p - params.U11 * D11) - params.kappa
    drive = params.eta - 1j * params.U10 * params.a0 * D10

    def rhs(t, y):
        a = y[0] + 1j * y[1]
        da = lam * a + drive
        return [da.real, da.imag]

    t_end = horizon_kappas / params.kappa
    sol = solve_ivp(rhs, (0.0, t_end), [0.0, 0.0], rtol=1e-12, atol=1e-14,
                    dense_output=False)
    a = sol.y[0, -1] + 1j * sol.y[1, -1]
    return complex(a)


# ----------------------------------------------------------------------
# brute-force configuration sums
# ----------------------------------------------------------------------

def site_sum_coupling(q, u0, u1, l: int, m: int, K: int) -> complex:
    """Plain per-site loop for the coupling sum (no vectorization)."""
    ul = (u0, u1)[l]
    um = (u0, u1)[m]
    total = 0.0 + 0.0j
    for j in range(K):
        total += complex(ul[j]).conjugate() * complex(um[j]) * int(q[j])
    return total


def _compositions(N: int, M: int):
    if M == 1:
        yield (N,)
        return
    for k in range(N + 1):
        for rest in _compositions(N - k, M - 1):
            yield (k,) + rest


def brute_force_region_marginal(N: int, M: int, K: int) -> dict[int, Fraction]:
    """Exact marginal of the atom number on sites 1..K for N atoms spread
    uniformly (each atom independently on any of the M sites).

    Returns exact rational probabilities via multinomial enumeration.
    """
    probs: dict[int, Fraction] = {}
    denom = Fraction(M) ** N
    for q in _compositions(N, M):
        weight = Fraction(math.factorial(N))
        for qj in q:
            weight /= math.factorial(qj)
        z = sum(q[:K])
        probs[z] = probs.get(z, Fraction(0)) + weight / denom
    return probs


def brute_force_difference_marginal(N: int, M: int) -> dict[int, Fraction]:
    """Exact marginal of (even-site minus odd-site) atom number, all sites lit."""
    probs: dict[int, Fraction] = {}
    denom = Fraction(M) ** N
    signs = [(-1) ** j for j in range(1, M + 1)]
    for q in _compositions(N, M):
        weight = Fraction(math.factorial(N))
        for qj in q:
            weight /= math.factorial(qj)
        z = sum(s * qj for s, qj in zip(signs, q))
        probs[z] = probs.get(z, Fraction(0)) + weight / denom
    return probs


# ----------------------------------------------------------------------
# rational-arithmetic evaluation of the shifted-case sums
# ----------------------------------------------------------------------

def shifted_sum_rational(m: int, b: float) -> Fraction:
    """S(m, b) = sum_k b^k / ((2m-2k)! k!) evaluated in exact rationals.

    The float b is converted exactly, so this is the infinitely precise
    value of the same finite sum the engine evaluates in log domain.
    """
    bf = Fraction(b)
    total = Fraction(0)
    for k in range(m + 1):
        total += bf**k / (math.factorial(2 * m - 2 * k) * math.factorial(k))
    return total


def shifted_count_ratio_rational(m: int, b: float) -> float:
    """S(m+1, b) / S(m, b) as a float computed from exact rationals."""
    return float(shifted_sum_rational(m + 1, b) / shifted_sum_rational(m, b))


# ----------------------------------------------------------------------
# spectral purity
# ----------------------------------------------------------------------

def purity_by_eigenvalues(rho: np.ndarray) -> float:
    """Tr(rho^2) as the sum of squared eigenvalues (diagonalization route)."""
    eig = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    return float(np.sum(eig**2))
