"""Tests for the Gaussian-state core: states, symplectics, moments."""

import numpy as np
import pytest

from sqnn.errors import ConfigError
from sqnn.gaussian import (
    GaussianState,
    SqueezingSpec,
    Symplectic,
    apply_symplectic,
    beam_splitter_5050,
    crystal_symplectic,
    homodyne_moments,
    moment_count,
    moment_labels,
    partial_trace,
    random_passive,
    squeezed_input_state,
    squeezing_db,
    squeezing_spectrum,
    symplectic_form,
    tensor,
    vacuum,
)


def gauss_hermite_moments(sigma, powers, nodes=12):
    """Quadrature oracle: E[prod_i x_i^powers_i] for a zero-mean Gaussian.

    Integrates the density directly on a tensor Gauss-Hermite grid; exact for
    polynomial integrands of this degree. Independent of the moment identities
    used by homodyne_moments.
    """
    dim = sigma.shape[0]
    chol = np.linalg.cholesky(sigma)
    t, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    u = np.sqrt(2.0) * np.stack([g.ravel() for g in grids])  # dim x nodes^dim
    x = chol @ u
    weight = np.ones(u.shape[1])
    for g in np.meshgrid(*([w] * dim), indexing="ij"):
        weight = weight * g.ravel()
    weight /= np.pi ** (dim / 2.0)
    val = np.ones(u.shape[1])
    for i, p in enumerate(powers):
        val = val * x[i] ** p
    return float(np.sum(val * weight))


def oracle_moment_vector(sigma):
    """All homodyne moments of an x-x covariance block via the quadrature oracle."""
    n = sigma.shape[0]
    out = []
    for i in range(n):
        for j in range(i, n):
            p = np.zeros(n, dtype=int)
            p[i] += 1
            p[j] += 1
            out.append(gauss_hermite_moments(sigma, p))
    for i in range(n):
        for j in range(i, n):
            p = np.zeros(n, dtype=int)
            p[i] += 2
            p[j] += 2
            out.append(gauss_hermite_moments(sigma, p))
    for i in range(n):
        for j in range(n):
            if i != j:
                p = np.zeros(n, dtype=int)
                p[i] += 3
                p[j] += 1
                out.append(gauss_hermite_moments(sigma, p))
    return np.array(out)


def random_state(n_modes, rng, max_xi=1.0):
    """A random pure N-mode Gaussian state: squeezed vacua through a random passive."""
    state = tensor(*[
        squeezed_input_state(1, SqueezingSpec(rng.uniform(0, max_xi), rng.uniform(0, 2 * np.pi)))
        for _ in range(n_modes)
    ])
    return apply_symplectic(state, random_passive(n_modes, rng))


class TestVacuum:
    def test_single_mode(self):
        np.testing.assert_allclose(vacuum(1).cov, 0.5 * np.eye(2))

    def test_two_modes_diagonal(self):
        np.testing.assert_allclose(vacuum(2).cov, 0.5 * np.eye(4))

    def test_purity_one(self):
        assert vacuum(12).purity == pytest.approx(1.0, abs=1e-12)

    def test_zero_modes_rejected(self):
        with pytest.raises(ConfigError):
            vacuum(0)


class TestSqueezedInput:
    def test_zero_strength_is_vacuum(self):
        for phi in (0.0, 1.0, np.pi):
            st = squeezed_input_state(3, SqueezingSpec(0.0, phi))
            np.testing.assert_allclose(st.cov, vacuum(3).cov, atol=1e-15)

    def test_phi_zero_diagonal(self):
        # cosh xi +- sinh xi = exp(+-xi)
        st = squeezed_input_state(1, SqueezingSpec(0.75, 0.0))
        np.testing.assert_allclose(
            st.cov, 0.5 * np.diag([np.exp(0.75), np.exp(-0.75)]), atol=1e-14)
        assert np.linalg.eigvalsh(st.cov).min() == pytest.approx(0.5 * np.exp(-0.75))
        assert 0.5 * np.exp(-0.75) == pytest.approx(0.2362, abs=5e-5)

    def test_phi_half_pi_off_diagonal(self):
        st = squeezed_input_state(1, SqueezingSpec(0.75, np.pi / 2))
        assert st.cov[0, 1] == pytest.approx(0.5 * np.sinh(0.75))
        assert st.cov[0, 0] == pytest.approx(0.5 * np.cosh(0.75))
        assert st.cov[1, 1] == pytest.approx(0.5 * np.cosh(0.75))
        np.testing.assert_allclose(
            np.sort(np.linalg.eigvalsh(st.cov)),
            [0.5 * np.exp(-0.75), 0.5 * np.exp(0.75)], atol=1e-14)

    def test_minimum_variance_every_phase(self):
        # extremal variance exp(-xi)/2: below vacuum exactly when xi > 0
        rng = np.random.default_rng(11)
        for _ in range(25):
            xi, phi = rng.uniform(0.01, 2.0), rng.uniform(0, 2 * np.pi)
            st = squeezed_input_state(1, SqueezingSpec(xi, phi))
            assert np.linalg.eigvalsh(st.cov).min() == pytest.approx(
                0.5 * np.exp(-xi), rel=1e-12)

    def test_purity(self):
        st = squeezed_input_state(4, SqueezingSpec(1.2, 0.3))
        assert st.purity == pytest.approx(1.0, abs=1e-10)

    def test_negative_strength_rejected(self):
        with pytest.raises(ConfigError):
            SqueezingSpec(-0.1, 0.0)


class TestDecibels:
    def test_input_anchor(self):
        assert squeezing_db(0.75) == pytest.approx(-3.257, abs=5e-3)

    def test_cavity_anchor(self):
        assert squeezing_db(1.5) == pytest.approx(-6.514, abs=5e-3)

    def test_zero(self):
        assert squeezing_db(0.0) == 0.0


class TestBeamSplitter:
    def test_symplectic_and_orthogonal(self):
        s = beam_splitter_5050(3).matrix
        omega = symplectic_form(6)
        assert np.max(np.abs(s @ omega @ s.T - omega)) < 1e-12
        np.testing.assert_allclose(s @ s.T, np.eye(12), atol=1e-12)

    def test_vacuum_invariant(self):
        st = apply_symplectic(vacuum(4), beam_splitter_5050(2))
        np.testing.assert_allclose(st.cov, vacuum(4).cov, atol=1e-14)

    def test_squeezed_loop_vacuum_input_mixing(self):
        loop = squeezed_input_state(1, SqueezingSpec(0.75, 0.0))
        st = apply_symplectic(tensor(loop, vacuum(1)), beam_splitter_5050(1))
        vx_sq = 0.5 * np.exp(0.75)
        expect_var = (vx_sq + 0.5) / 2.0
        expect_cross = (vx_sq - 0.5) / 2.0
        assert st.cov[0, 0] == pytest.approx(expect_var, rel=1e-12)
        assert st.cov[2, 2] == pytest.approx(expect_var, rel=1e-12)
        assert st.cov[0, 2] == pytest.approx(expect_cross, rel=1e-12)


class TestCrystal:
    def test_passive_when_unsqueezed(self):
        s = crystal_symplectic(4, 0.0, seed=5)
        np.testing.assert_allclose(s.matrix @ s.matrix.T, np.eye(8), atol=1e-12)
        st = apply_symplectic(vacuum(4), s)
        np.testing.assert_allclose(st.cov, vacuum(4).cov, atol=1e-12)

    def test_bloch_messiah_roundtrip(self):
        for xi_c in (0.4, 1.5):
            s = crystal_symplectic(5, xi_c, seed=9)
            np.testing.assert_allclose(
                squeezing_spectrum(s), np.full(5, xi_c), atol=1e-8)

    def test_deterministic(self):
        a = crystal_symplectic(3, 0.8, seed=1).matrix
        b = crystal_symplectic(3, 0.8, seed=1).matrix
        np.testing.assert_array_equal(a, b)

    def test_stability_margin_honored(self):
        s = crystal_symplectic(6, 1.5, seed=3, min_loop_contraction=0.97)
        radius = np.max(np.abs(np.linalg.eigvals(s.matrix / np.sqrt(2.0))))
        assert radius <= 0.97


class TestApplySymplectic:
    def test_identity(self):
        st = squeezed_input_state(2, SqueezingSpec(0.5, 1.0))
        out = apply_symplectic(st, Symplectic(np.eye(4)))
        np.testing.assert_allclose(out.cov, st.cov)

    def test_inverse_roundtrip(self):
        rng = np.random.default_rng(2)
        st = random_state(3, rng)
        s = crystal_symplectic(3, 0.9, seed=7)
        back = apply_symplectic(apply_symplectic(st, s), s.inverse())
        np.testing.assert_allclose(back.cov, st.cov, atol=1e-10)

    def test_purity_invariant(self):
        rng = np.random.default_rng(3)
        st = random_state(2, rng)
        s = crystal_symplectic(2, 1.1, seed=4)
        assert apply_symplectic(st, s).purity == pytest.approx(st.purity, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            apply_symplectic(vacuum(2), Symplectic(np.eye(2)))


class TestPartialTrace:
    def test_keep_all_identity(self):
        rng = np.random.default_rng(4)
        st = random_state(3, rng)
        np.testing.assert_allclose(partial_trace(st, range(3)).cov, st.cov)

    def test_product_state_factor(self):
        a = squeezed_input_state(1, SqueezingSpec(0.6, 0.2))
        b = squeezed_input_state(1, SqueezingSpec(1.1, 2.0))
        joint = tensor(a, b)
        np.testing.assert_allclose(partial_trace(joint, [1]).cov, b.cov)

    def test_mixed_output_arm(self):
        # one arm of squeezed x vacuum through a 50:50 splitter is thermal-like
        loop = squeezed_input_state(1, SqueezingSpec(0.75, 0.0))
        mixed = apply_symplectic(tensor(loop, vacuum(1)), beam_splitter_5050(1))
        arm = partial_trace(mixed, [0])
        np.testing.assert_allclose(
            arm.cov, 0.5 * (loop.cov + vacuum(1).cov), atol=1e-12)
        assert arm.purity < 1.0

    def test_empty_keep_rejected(self):
        with pytest.raises(ConfigError):
            partial_trace(vacuum(2), [])


class TestHomodyneMoments:
    def test_vacuum_two_modes(self):
        vals = dict(zip(moment_labels(2), homodyne_moments(vacuum(2))))
        assert vals["x0x0"] == pytest.approx(0.5)
        assert vals["x0x1"] == 0.0
        assert vals["x0^2x0^2"] == pytest.approx(0.75)  # 3 sigma^2
        assert vals["x0^3x1"] == 0.0

    def test_single_mode_squeezed(self):
        st = squeezed_input_state(1, SqueezingSpec(0.75, 0.0))
        m = homodyne_moments(st)
        assert m[0] == pytest.approx(np.exp(0.75) / 2, rel=1e-12)
        assert m[1] == pytest.approx(3 * (np.exp(0.75) / 2) ** 2, rel=1e-12)

    def test_against_quadrature_oracle(self):
        rng = np.random.default_rng(5)
        for n in (2, 3):
            for _ in range(6):
                st = random_state(n, rng)
                got = homodyne_moments(st)
                want = oracle_moment_vector(st.cov[0::2, 0::2])
                np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-9)

    def test_vector_length(self):
        for n in (1, 2, 5):
            st = vacuum(n)
            assert homodyne_moments(st).size == moment_count(n)
            assert len(moment_labels(n)) == moment_count(n)

    def test_nonzero_mean_rejected(self):
        st = GaussianState(0.5 * np.eye(2), mean=[1.0, 0.0])
        with pytest.raises(ConfigError):
            homodyne_moments(st)


class TestInvariantProperties:
    def test_random_compositions(self):
        rng = np.random.default_rng(6)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            st = random_state(n, rng)
            omega = symplectic_form(n)
            s = crystal_symplectic(n, rng.uniform(0, 1.2), seed=int(rng.integers(1e6)))
            assert np.max(np.abs(s.matrix @ omega @ s.matrix.T - omega)) < 1e-10
            out = apply_symplectic(st, s)
            assert np.max(np.abs(out.cov - out.cov.T)) < 1e-12
            heisen = out.cov + 0.5j * omega
            assert np.linalg.eigvalsh(heisen).min() > -1e-10

    def test_passive_photon_conservation(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            st = random_state(n, rng)
            passive = crystal_symplectic(n, 0.0, seed=int(rng.integers(1e6)))
            out = apply_symplectic(st, passive)
            assert out.mean_photons == pytest.approx(st.mean_photons, abs=1e-10)

    def test_unphysical_covariance_rejected(self):
        with pytest.raises(ConfigError):
            GaussianState(0.1 * np.eye(2))  # below the uncertainty bound
        with pytest.raises(ConfigError):
            GaussianState(np.array([[0.5, 0.1], [0.0, 0.5]]))  # asymmetric
