import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavitybec.integrals import (
    gauss_even_moment,
    gauss_odd_moment,
    log_double_factorial_odd,
    log_factorial,
    log_tilted_gauss_moment,
    tilted_gauss_moment,
)
from cavitybec.oracles import _log_half_line_integral, log_weighted_integral_quadrature


class TestLogFactorials:
    def test_small_values_exact(self):
        assert log_factorial(0) == 0.0
        assert log_factorial(5) == pytest.approx(math.log(120))

    def test_double_factorial_base_cases(self):
        assert log_double_factorial_odd(-1) == 0.0
        assert log_double_factorial_odd(1) == pytest.approx(0.0)
        assert log_double_factorial_odd(5) == pytest.approx(math.log(15))

    def test_double_factorial_rejects_even(self):
        with pytest.raises(ValueError):
            log_double_factorial_odd(4)


class TestEvenMoments:
    def test_plain_gaussian_integral(self):
        assert gauss_even_moment(0, 1.0) == pytest.approx(math.sqrt(math.pi) / 2)

    def test_first_even_moment(self):
        assert gauss_even_moment(1, 1.0) == pytest.approx(math.sqrt(math.pi) / 4)

    def test_high_order_against_quadrature(self):
        closed = gauss_even_moment(25, 0.37)
        ref = math.exp(_log_half_line_integral(50, 0.37, 0.0))
        assert closed == pytest.approx(ref, rel=1e-10)

    def test_rejects_nonpositive_p(self):
        with pytest.raises(ValueError):
            gauss_even_moment(2, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(0, 30), p=st.floats(0.05, 20.0))
    def test_recurrence(self, n, p):
        # int x^(2n+2) e^(-p x^2) = (2n+1)/(2p) * int x^(2n) e^(-p x^2)
        lhs = gauss_even_moment(n + 1, p)
        rhs = (2 * n + 1) / (2 * p) * gauss_even_moment(n, p)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestOddMoments:
    def test_base_case(self):
        assert gauss_odd_moment(0, 1.0) == pytest.approx(0.5)

    def test_first_odd_moment(self):
        assert gauss_odd_moment(1, 2.0) == pytest.approx(1.0 / 8.0)

    def test_high_order_against_quadrature(self):
        closed = gauss_odd_moment(20, 0.9)
        ref = math.exp(_log_half_line_integral(41, 0.9, 0.0))
        assert closed == pytest.approx(ref, rel=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(0, 30), p=st.floats(0.05, 20.0))
    def test_recurrence(self, n, p):
        lhs = gauss_odd_moment(n + 1, p)
        rhs = (n + 1) / p * gauss_odd_moment(n, p)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestTiltedMoments:
    def test_completed_square(self):
        p, q = 1.3, 0.7
        assert tilted_gauss_moment(0, p, q) == pytest.approx(
            math.sqrt(math.pi / p) * math.exp(q * q / p)
        )

    def test_single_term_sum(self):
        assert tilted_gauss_moment(1, 1.0, 1.0) == pytest.approx(
            math.sqrt(math.pi) * math.e
        )

    def test_against_full_line_quadrature(self):
        for n, p, q in ((12, 0.8, 3.1), (7, 0.5, -2.0), (4, 2.0, 0.3)):
            closed = tilted_gauss_moment(n, p, q)
            log_ref, sign = log_weighted_integral_quadrature(n, p, q)
            assert closed == pytest.approx(sign * math.exp(log_ref), rel=1e-9)

    def test_zero_tilt_falls_back_to_even_moments(self):
        assert tilted_gauss_moment(4, 1.5, 0.0) == pytest.approx(
            2 * gauss_even_moment(2, 1.5)
        )
        assert tilted_gauss_moment(3, 1.5, 0.0) == 0.0

    def test_negative_tilt_odd_order_sign(self):
        assert tilted_gauss_moment(1, 1.0, -1.0) < 0

    def test_log_form_carries_exponent_separately(self):
        # the log form omits exp(q^2/p) so ratios cancel it analytically
        n, p, q = 6, 0.4, 80.0  # q^2/p = 16000, far beyond float range
        log_val, sign = log_tilted_gauss_moment(n, p, q)
        assert sign == 1 and math.isfinite(log_val)

    def test_rejects_nonpositive_p(self):
        with pytest.raises(ValueError):
            tilted_gauss_moment(2, -1.0, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        n=st.integers(0, 20),
        p=st.floats(0.1, 5.0),
        q=st.floats(-4.0, 4.0).filter(lambda q: abs(q) > 1e-3),
    )
    def test_consistent_with_quadrature_property(self, n, p, q):
        closed = tilted_gauss_moment(n, p, q)
        log_ref, sign = log_weighted_integral_quadrature(n, p, q)
        ref = sign * math.exp(log_ref)
        assert closed == pytest.approx(ref, rel=1e-8, abs=1e-12)
