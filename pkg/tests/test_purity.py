import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavitybec.oracles import coherent_overlap_series, purity_by_eigenvalues
from cavitybec.purity import (
    CatState,
    cat_density_matrix,
    coherent_overlap_factor,
    distinguishability_ok,
    purity,
    purity_general,
    purity_sweep,
    threshold_purity,
)


class TestOverlapFactor:
    def test_identical_states(self):
        assert coherent_overlap_factor(2.3, 0.0) == pytest.approx(1.0)

    def test_vacuum(self):
        assert coherent_overlap_factor(0.0, 1.2) == pytest.approx(1.0)

    def test_series_convergence(self):
        got = coherent_overlap_factor(2.0, 0.7)
        ref = coherent_overlap_series(2.0, 0.7, 201)
        assert abs(got - ref) / abs(got) < 1e-10

    @settings(max_examples=60, deadline=None)
    @given(alpha=st.floats(0.0, 4.0), phi=st.floats(0.0, math.pi))
    def test_modulus_formula_and_bound(self, alpha, phi):
        ov = coherent_overlap_factor(alpha, phi)
        expected = math.exp(-2.0 * alpha**2 * math.sin(phi) ** 2)
        assert abs(ov) == pytest.approx(expected, rel=1e-12)
        assert abs(ov) <= 1.0 + 1e-12


class TestCatDensityMatrix:
    def test_pure_equal_superposition(self):
        rho = cat_density_matrix(CatState(0, 1, 1.5, 0.0, 0.0))
        np.testing.assert_allclose(rho, 0.5 * np.ones((2, 2)), atol=1e-15)

    def test_decohered_limit(self):
        rho = cat_density_matrix(CatState(0, 1, 50.0, math.pi / 2, 0.3))
        np.testing.assert_allclose(rho, 0.5 * np.eye(2), atol=1e-15)

    def test_valid_density_matrix_and_eigenvalues(self):
        cat = CatState(2, 9, 1.1, 0.8, 0.25)
        rho = cat_density_matrix(cat)
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
        ov = abs(coherent_overlap_factor(cat.alpha_abs, cat.phi))
        np.testing.assert_allclose(
            np.sort(np.linalg.eigvalsh(rho)),
            [0.5 * (1 - ov), 0.5 * (1 + ov)],
            rtol=1e-12,
        )


class TestPurity:
    def test_aligned_branches_pure(self):
        assert purity(CatState(0, 1, 3.0, 0.0)) == 1.0

    def test_threshold_headline_value(self):
        cat = CatState(0, 1, 1.0, math.asin(0.25))
        assert purity(cat) == pytest.approx(0.5 * (1 + math.exp(-0.25)), rel=1e-12)
        assert purity(cat) == pytest.approx(0.889, abs=1e-3)
        assert threshold_purity() == pytest.approx(0.8894003915357025)

    def test_matches_matrix_trace(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            cat = CatState(
                int(rng.integers(0, 10)),
                int(rng.integers(10, 20)),
                float(rng.uniform(0, 3)),
                float(rng.uniform(0, math.pi)),
                float(rng.uniform(0, 2 * math.pi)),
            )
            rho = cat_density_matrix(cat)
            assert purity(cat) == pytest.approx(float(np.sum(np.abs(rho) ** 2)),
                                                rel=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(
        alpha=st.floats(0.0, 5.0),
        phi=st.floats(0.0, math.pi),
        gamma=st.floats(0.0, 2 * math.pi),
        z1=st.integers(0, 50),
        z2=st.integers(51, 100),
    )
    def test_bounds_and_branch_independence(self, alpha, phi, gamma, z1, z2):
        p = purity(CatState(z1, z2, alpha, phi, gamma))
        assert 0.5 <= p <= 1.0
        assert p == purity(CatState(0, 1, alpha, phi, 0.0))

    def test_monotone_in_decoherence_exponent(self):
        values = [purity(CatState(0, 1, a, 0.4)) for a in np.linspace(0, 4, 30)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))


class TestDistinguishability:
    def test_orthogonal_phases(self):
        assert distinguishability_ok(CatState(0, 1, 1.0, math.pi / 2))

    def test_aligned_phases(self):
        assert not distinguishability_ok(CatState(0, 1, 1.0, 0.0))

    def test_boundary_is_strict(self):
        phi = math.asin(0.25)
        assert not distinguishability_ok(CatState(0, 1, 1.0, phi))

    def test_phase_convention_free(self):
        assert distinguishability_ok(CatState(0, 1, 1.0, math.pi - 0.4))


class TestPurityGeneral:
    def test_pure_projector(self):
        v = np.array([0.6, 0.8j])
        rho = np.outer(v, v.conj())
        assert purity_general(rho) == pytest.approx(1.0)

    def test_maximally_mixed_two_level(self):
        assert purity_general(0.5 * np.eye(2)) == pytest.approx(0.5)

    def test_maximally_mixed_floor_scales_with_dimension(self):
        assert purity_general(np.eye(5) / 5) == pytest.approx(0.2)

    def test_matches_eigenvalue_route(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        assert purity_general(rho) == pytest.approx(purity_by_eigenvalues(rho),
                                                    rel=1e-12)

    def test_rejects_invalid_inputs(self):
        with pytest.raises(ValueError, match="Hermitian"):
            purity_general(np.array([[0.5, 0.2], [0.1, 0.5]]))
        with pytest.raises(ValueError, match="trace"):
            purity_general(np.eye(2))


class TestSweep:
    def test_contains_threshold_row(self):
        rows = purity_sweep([0.5, 1.0], np.linspace(0, math.pi / 2, 5))
        hits = [
            r for r in rows if abs(r[0] * math.sin(r[1]) - 0.25) < 1e-12
        ]
        assert hits
        for _, _, p in hits:
            assert p == pytest.approx(threshold_purity(), rel=1e-12)
