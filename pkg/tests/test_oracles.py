import cmath
import math
from fractions import Fraction

import pytest

from cavitybec.oracles import (
    brute_force_difference_marginal,
    brute_force_region_marginal,
    coherent_overlap_series,
    log_weighted_integral_quadrature,
    shifted_count_ratio_rational,
    shifted_sum_rational,
)


class TestQuadrature:
    def test_plain_gaussian_second_moment(self):
        log_val, sign = log_weighted_integral_quadrature(2, 1.0, 0.0)
        assert sign == 1
        assert math.exp(log_val) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-11)

    def test_odd_moment_of_symmetric_weight_vanishes(self):
        log_val, sign = log_weighted_integral_quadrature(3, 1.0, 0.0)
        assert sign == 0 or log_val < -60

    def test_shift_moves_the_first_moment(self):
        # int z e^(-z^2 + 2qz) = q sqrt(pi) e^(q^2) for p = 1
        q = 0.8
        log_val, sign = log_weighted_integral_quadrature(1, 1.0, q)
        assert sign == 1
        assert math.exp(log_val) == pytest.approx(
            q * math.sqrt(math.pi) * math.exp(q * q), rel=1e-10
        )

    def test_negative_shift_flips_odd_sign(self):
        _, sign = log_weighted_integral_quadrature(1, 1.0, -0.8)
        assert sign == -1


class TestOverlapSeries:
    def test_against_naive_sum_where_stable(self):
        alpha, phi = 0.6, 0.9
        naive = sum(
            alpha ** (2 * n) / math.factorial(n) * cmath.exp(-2j * n * phi)
            for n in range(40)
        ) * math.exp(-(alpha**2))
        got = coherent_overlap_series(alpha, phi, 40)
        assert abs(got - naive) < 1e-14

    def test_zero_amplitude(self):
        assert coherent_overlap_series(0.0, 1.0) == 1.0


class TestEnumeration:
    def test_region_marginal_sums_to_one(self):
        probs = brute_force_region_marginal(5, 3, 2)
        assert sum(probs.values()) == Fraction(1)

    def test_difference_marginal_sums_to_one(self):
        probs = brute_force_difference_marginal(4, 4)
        assert sum(probs.values()) == Fraction(1)

    def test_tiny_case_by_hand(self):
        # one atom on two sites: region {site 1} holds it with prob 1/2
        probs = brute_force_region_marginal(1, 2, 1)
        assert probs == {0: Fraction(1, 2), 1: Fraction(1, 2)}


class TestRationalSums:
    def test_small_case_by_hand(self):
        # S(1, b) = 1/2! + b
        assert shifted_sum_rational(1, 0.25) == Fraction(1, 2) + Fraction(0.25)

    def test_ratio_matches_direct_fraction_division(self):
        got = shifted_count_ratio_rational(2, 0.5)
        s2 = Fraction(1, 24) + Fraction(0.5) / 2 + Fraction(0.5) ** 2 / 2
        s3 = (
            Fraction(1, 720)
            + Fraction(0.5) / 24
            + Fraction(0.5) ** 2 / 4
            + Fraction(0.5) ** 3 / 6
        )
        assert got == pytest.approx(float(s3 / s2), rel=1e-15)
