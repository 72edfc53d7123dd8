import math

import numpy as np
import pytest

from cavitybec.distributions import MODE_MAXIMUM, MODE_MINIMUM, binomial_maximum, moment
from cavitybec.errors import CountContradictionError
from cavitybec.exact_engine import ExactEngineState, apply_count, apply_no_count
from cavitybec.full_engine import (
    ConfigurationBasis,
    ConditionalSuperposition,
    alpha_of,
    count_configurations,
    enumerate_configurations,
    phi_of,
    superfluid_amplitudes,
)
from cavitybec.model import (
    CavityParams,
    LatticeGeometry,
    ModeFunctions,
    ScatteringScales,
    derive_C,
)
from cavitybec.oracles import cavity_steady_state_ode
from cavitybec.purity import CatState, cat_density_matrix


def default_params(**kw):
    base = dict(g0=1.0, g1=1.0, delta_a=1000.0, delta_p=0.0, kappa=1.0, eta=0.0, a0=1.0)
    base.update(kw)
    return CavityParams(**base)


def superfluid_state(N, M, K, params=None, mode=MODE_MAXIMUM, u11=None):
    params = params or default_params()
    modes = (
        ModeFunctions.diffraction_maximum(M)
        if mode == MODE_MAXIMUM
        else ModeFunctions.diffraction_minimum(M)
    )
    basis = ConfigurationBasis.build(N, M)
    return ConditionalSuperposition.superfluid(basis, params, modes, K, u11=u11)


class TestEnumeration:
    def test_counts(self):
        assert count_configurations(4, 2) == 5
        assert count_configurations(3, 3) == 10

    def test_complete_and_unique(self):
        configs = enumerate_configurations(3, 3)
        assert len(configs) == 10
        assert len({tuple(c) for c in configs}) == 10
        assert all(c.sum() == 3 for c in configs)

    def test_cap_enforced(self):
        with pytest.raises(ValueError, match="cap"):
            enumerate_configurations(100, 6, cap=1000)


class TestSuperfluidAmplitudes:
    def test_normalized(self):
        basis = ConfigurationBasis.build(5, 3)
        c = superfluid_amplitudes(basis)
        assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0)

    def test_region_marginal_is_binomial(self):
        state = superfluid_state(2, 2, K=1)
        reduced = state.reduce_to_z(MODE_MAXIMUM)
        np.testing.assert_allclose(reduced.probabilities, [0.25, 0.5, 0.25], rtol=1e-12)


class TestAlphaOf:
    def test_in_phase_amplitude_proportional_to_region_count(self):
        params = default_params()
        modes = ModeFunctions.diffraction_maximum(2)
        C = derive_C(params)
        for q in ((0, 4), (1, 3), (4, 0)):
            alpha = alpha_of(q, params, modes, K=1, u11=0.0)
            assert alpha == pytest.approx(C * q[0], abs=1e-18)

    def test_mirror_drive_only_is_configuration_blind(self):
        params = default_params(eta=0.7, a0=0.0)
        modes = ModeFunctions.diffraction_maximum(3)
        for q in ((3, 0, 0), (1, 1, 1)):
            assert alpha_of(q, params, modes, K=3, u11=0.0) == pytest.approx(0.7)

    def test_matches_relaxed_cavity_ode(self):
        params = default_params(eta=0.4, delta_p=0.8, delta_a=15.0, g0=0.9, g1=1.2)
        modes = ModeFunctions.diffraction_maximum(2)
        q = (2, 1)
        got = alpha_of(q, params, modes, K=2)
        ref = cavity_steady_state_ode(params, D10=3.0, D11=3.0)
        assert got == pytest.approx(ref, rel=1e-8)


class TestPhiOf:
    def test_zero_time(self):
        params = default_params()
        modes = ModeFunctions.diffraction_maximum(2)
        assert phi_of((1, 1), 0.3 + 0.1j, params, modes, 2, 0.0) == 0

    def test_undriven_vacuum(self):
        params = default_params(a0=0.0, eta=0.0)
        modes = ModeFunctions.diffraction_maximum(2)
        assert phi_of((1, 1), 0.0j, params, modes, 2, 1.7) == 0

    def test_decay_part_reproduces_diagonal_filter(self):
        """With eta = 0 the relative weights after a no-count interval are
        exp(-z^2 tau): the drive part of the exponent is purely imaginary."""
        params = default_params()
        modes = ModeFunctions.diffraction_maximum(2)
        C = derive_C(params)
        t = 4.0e4
        tau = 2 * abs(C) ** 2 * params.kappa * t
        for q in ((0, 3), (2, 1), (3, 0)):
            alpha = alpha_of(q, params, modes, K=1, u11=0.0)
            phi = phi_of(q, alpha, params, modes, 1, t)
            z = q[0]
            assert 2 * phi.real == pytest.approx(-(z**2) * tau, rel=1e-12, abs=1e-300)


class TestJumpAndEvolution:
    def test_single_branch_invariant(self):
        basis = ConfigurationBasis.build(2, 2)
        c0 = np.zeros(len(basis), dtype=complex)
        c0[1] = 1.0
        alpha = np.full(len(basis), 0.5 + 0.2j)
        state = ConditionalSuperposition(basis=basis, c0=c0, alpha=alpha,
                                         K=1, modes=ModeFunctions.diffraction_maximum(2))
        out = state.apply_jump()
        np.testing.assert_allclose(out.probabilities(), state.probabilities(), atol=1e-15)
        # a lone configuration reduces to a point distribution
        reduced = out.reduce_to_z(MODE_MAXIMUM)
        peak = reduced.probabilities.argmax()
        assert reduced.probabilities[peak] == pytest.approx(1.0)
        assert reduced.support[peak] == basis.configs[1, 0]

    def test_two_branches_reweighted_by_amplitude_ratio(self):
        basis = ConfigurationBasis.build(1, 2)
        c0 = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
        alpha = np.array([2.0, 1.0], dtype=complex)
        state = ConditionalSuperposition(basis=basis, c0=c0, alpha=alpha)
        out = state.apply_jump()
        np.testing.assert_allclose(out.probabilities(), [0.8, 0.2], rtol=1e-14)

    def test_jump_on_dark_state_contradicts(self):
        basis = ConfigurationBasis.build(1, 2)
        state = ConditionalSuperposition(
            basis=basis,
            c0=np.array([1.0, 0.0], dtype=complex),
            alpha=np.array([0.0, 1.0], dtype=complex),
        )
        with pytest.raises(CountContradictionError):
            state.apply_jump()

    def test_jump_marginal_matches_exact_engine(self):
        full = superfluid_state(2, 2, K=1, u11=0.0).apply_jump()
        exact = apply_count(
            ExactEngineState(dist=binomial_maximum(LatticeGeometry(N=2, M=2, K=1)))
        )
        reduced = full.reduce_to_z(MODE_MAXIMUM)
        ref = dict(zip(exact.dist.support.tolist(), exact.dist.probabilities))
        for z, p in zip(reduced.support, reduced.probabilities):
            assert p == pytest.approx(ref[int(z)], rel=1e-13, abs=1e-300)

    def test_evolution_identity_and_semigroup(self):
        state = superfluid_state(3, 2, K=1, u11=0.0)
        out0 = state.evolve_no_count(0.0)
        np.testing.assert_allclose(out0.probabilities(), state.probabilities())
        a = state.evolve_no_count(0.4).evolve_no_count(1.1)
        b = state.evolve_no_count(1.5)
        np.testing.assert_allclose(a.probabilities(), b.probabilities(), rtol=1e-13)

    def test_full_history_marginal_matches_diagonal_filter(self):
        params = default_params()
        scales = ScatteringScales.from_params(params)
        full = superfluid_state(4, 2, K=1, params=params, u11=0.0)
        exact = ExactEngineState(
            dist=binomial_maximum(LatticeGeometry(N=4, M=2, K=1)), C=scales.C
        )
        for kind, amount in (("w", 0.25), ("c", None), ("w", 0.6), ("c", None),
                             ("w", 0.15)):
            if kind == "w":
                full = full.evolve_no_count(amount / scales.tau_rate)
                exact = apply_no_count(exact, amount)
            else:
                full = full.apply_jump()
                exact = apply_count(exact)
        reduced = full.reduce_to_z(MODE_MAXIMUM)
        ref = dict(zip(exact.dist.support.tolist(), exact.dist.probabilities))
        for z, p in zip(reduced.support, reduced.probabilities):
            if p > 1e-290 or ref.get(int(z), 0.0) > 1e-290:
                assert p == pytest.approx(ref[int(z)], rel=1e-12)

    def test_difference_mode_marginal(self):
        state = superfluid_state(2, 2, K=2, mode=MODE_MINIMUM, u11=0.0)
        reduced = state.reduce_to_z(MODE_MINIMUM)
        np.testing.assert_array_equal(reduced.support, [-2, 0, 2])
        np.testing.assert_allclose(reduced.probabilities, [0.25, 0.5, 0.25], rtol=1e-12)

    def test_degenerate_couplings_stay_degenerate(self):
        """Branches sharing the coupling sums keep their amplitude ratio."""
        state = superfluid_state(3, 3, K=2, u11=0.0)
        configs = [tuple(int(x) for x in q) for q in state.basis.configs]
        i = configs.index((2, 0, 1))
        j = configs.index((0, 2, 1))  # same region total, same shift
        p0 = state.probabilities()
        ratio0 = p0[i] / p0[j]
        evolved = state.evolve_no_count(3.0e4).apply_jump().evolve_no_count(2.0e4)
        p1 = evolved.probabilities()
        assert p1[i] / p1[j] == pytest.approx(ratio0, rel=1e-12)


class TestPhotonExpectation:
    def test_uniform_amplitudes(self):
        basis = ConfigurationBasis.build(2, 2)
        n = len(basis)
        state = ConditionalSuperposition(
            basis=basis,
            c0=np.full(n, 1 / math.sqrt(n), dtype=complex),
            alpha=np.full(n, 0.3 - 0.4j),
        )
        assert state.photon_expectation() == pytest.approx(0.25)

    def test_vacuum_drive(self):
        state = superfluid_state(2, 2, K=1, params=default_params(a0=0.0, eta=0.0))
        assert state.photon_expectation() == 0.0

    def test_equals_region_second_moment(self):
        params = default_params()
        state = superfluid_state(5, 2, K=1, params=params, u11=0.0)
        C = derive_C(params)
        reduced = state.reduce_to_z(MODE_MAXIMUM)
        assert state.photon_expectation() == pytest.approx(
            abs(C) ** 2 * moment(reduced, 2), rel=1e-12
        )

    def test_invariant_under_alpha_preserving_relabeling(self):
        basis = ConfigurationBasis.build(1, 2)
        alpha = np.array([0.5, 0.5], dtype=complex)
        a = ConditionalSuperposition(
            basis=basis, c0=np.array([0.8, 0.6], dtype=complex), alpha=alpha
        )
        b = ConditionalSuperposition(
            basis=basis, c0=np.array([0.6, 0.8], dtype=complex), alpha=alpha
        )
        assert a.photon_expectation() == pytest.approx(b.photon_expectation())


class TestDensityMatrix:
    def test_identical_amplitudes_leave_state_pure(self):
        basis = ConfigurationBasis.build(2, 2)
        n = len(basis)
        c0 = np.array([0.5, 0.5j, math.sqrt(0.5)], dtype=complex)
        state = ConditionalSuperposition(
            basis=basis, c0=c0, alpha=np.full(n, 1.3 + 0.4j)
        )
        rho = state.atomic_density_matrix()
        c = state.amplitudes()
        np.testing.assert_allclose(rho, np.outer(c, np.conj(c)), atol=1e-14)
        assert np.sum(np.abs(rho) ** 2) == pytest.approx(1.0)

    def test_two_branch_state_reproduces_cat_matrix(self):
        alpha_abs, phi, gamma = 1.7, 0.6, 0.35
        basis = ConfigurationBasis.build(4, 2)
        configs = [tuple(int(x) for x in q) for q in basis.configs]
        c0 = np.zeros(len(basis), dtype=complex)
        alpha = np.zeros(len(basis), dtype=complex)
        i1, i2 = configs.index((1, 3)), configs.index((3, 1))
        c0[i1] = np.exp(1j * gamma) / math.sqrt(2)
        c0[i2] = np.exp(-1j * gamma) / math.sqrt(2)
        alpha[i1] = alpha_abs * np.exp(1j * phi)
        alpha[i2] = alpha_abs * np.exp(-1j * phi)
        state = ConditionalSuperposition(basis=basis, c0=c0, alpha=alpha)
        rho = state.atomic_density_matrix()
        sub = rho[np.ix_([i1, i2], [i1, i2])]
        ref = cat_density_matrix(CatState(1, 3, alpha_abs, phi, gamma))
        np.testing.assert_allclose(sub, ref, atol=1e-12)

    def test_random_state_is_valid_density_matrix(self):
        rng = np.random.default_rng(17)
        basis = ConfigurationBasis.build(2, 2)
        c0 = rng.normal(size=3) + 1j * rng.normal(size=3)
        alpha = rng.normal(size=3) + 1j * rng.normal(size=3)
        state = ConditionalSuperposition(basis=basis, c0=c0, alpha=alpha)
        rho = state.atomic_density_matrix()
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(rho).min() > -1e-12

    def test_json_roundtrip(self, tmp_path):
        from cavitybec.full_engine import (
            density_matrix_from_json,
            density_matrix_to_json,
        )

        state = superfluid_state(2, 2, K=1, u11=0.0)
        rho = state.atomic_density_matrix()
        path = tmp_path / "rho.json"
        density_matrix_to_json(rho, path, labels=state.basis.configs)
        back = density_matrix_from_json(path)
        np.testing.assert_allclose(back, rho, atol=0, rtol=0)
