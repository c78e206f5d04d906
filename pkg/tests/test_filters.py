import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import momentmap as mm
from momentmap.filters import hermitize, quadrature

from conftest import C0, random_symmetric


def random_hermitian_samples(rng, N, m, psd=False):
    X = rng.standard_normal((N, m, m)) + 1j * rng.standard_normal((N, m, m))
    if psd:
        return X @ np.conj(np.swapaxes(X, 1, 2))
    return hermitize(X)


def trig_poly_samples(grid, M0, M1):
    """Phi(theta) = M0 + M1 e^{i theta} + M1^* e^{-i theta}."""
    z = grid.points[:, None, None]
    return M0 + z * M1 + np.conj(z) * np.conj(M1.T)


class TestRationalFilter:
    def test_shift_filter_shape(self, filt):
        assert (filt.n, filt.m) == (4, 2)
        assert filt.is_real

    def test_rejects_unstable(self):
        with pytest.raises(mm.UnstableFilterError):
            mm.RationalFilter(np.eye(2) * 1.5, np.eye(2))

    def test_rejects_rank_deficient_B(self):
        with pytest.raises(ValueError, match="column rank"):
            mm.RationalFilter(np.zeros((2, 2)), np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_rejects_unreachable(self):
        with pytest.raises(ValueError, match="reachable"):
            mm.RationalFilter(np.zeros((2, 2)), np.array([[1.0], [0.0]]))


class TestEvalFilter:
    def test_at_one(self, filt):
        np.testing.assert_allclose(mm.eval_filter(filt, 1.0), np.vstack([np.eye(2), np.eye(2)]),
                                   atol=1e-15)

    def test_at_i(self, filt):
        expected = np.vstack([-np.eye(2), -1j * np.eye(2)])
        np.testing.assert_allclose(mm.eval_filter(filt, 1j), expected, atol=1e-15)

    def test_identity_case(self):
        f = mm.RationalFilter(np.zeros((3, 3)), np.eye(3))
        z = np.exp(0.7j)
        np.testing.assert_allclose(mm.eval_filter(f, z), np.eye(3) / z, atol=1e-15)

    def test_matches_closed_form_on_grid(self, filt, grid):
        G = mm.sample_filter(filt, grid)
        z = grid.points[:, None, None]
        expected = np.concatenate([np.eye(2) / z**2, np.eye(2) / z], axis=1)
        np.testing.assert_allclose(G, expected, atol=1e-14)


class TestGrid:
    def test_quarter_step(self):
        g = mm.make_grid(np.pi / 2)
        assert len(g) == 4
        np.testing.assert_allclose(g.angles, [-np.pi / 2, 0.0, np.pi / 2, np.pi], atol=1e-15)

    def test_default_size(self):
        assert len(mm.make_grid(1e-4)) == 62832

    def test_single_node(self):
        g = mm.make_grid(2 * np.pi)
        assert len(g) == 1 and g.angles[0] == pytest.approx(np.pi)

    @pytest.mark.parametrize("bad", [0.0, -1e-3, 7.0, np.inf])
    def test_rejects_bad_step(self, bad):
        with pytest.raises(ValueError):
            mm.make_grid(bad)

    def test_equidistant_ending_at_pi(self, grid):
        np.testing.assert_allclose(np.diff(grid.angles), grid.step, rtol=1e-9)
        assert grid.angles[-1] == np.pi


class TestIntegrate:
    def test_constant(self, grid):
        M = np.array([[2.0, 1.0], [1.0, 3.0]])
        samples = mm.MatrixSamples(np.broadcast_to(M, (len(grid), 2, 2)), hermitian=True)
        np.testing.assert_allclose(mm.integrate(samples, grid), M, atol=1e-12)

    def test_roots_of_unity_cancel(self):
        g = mm.make_grid(np.pi / 2)
        vals = g.points[:, None, None] * np.eye(2)
        np.testing.assert_allclose(mm.integrate(vals, g), np.zeros((2, 2)), atol=1e-15)

    def test_gramian_is_identity(self, filt, grid):
        G = mm.sample_filter(filt, grid)
        GG = mm.MatrixSamples(hermitize(G @ np.conj(np.swapaxes(G, 1, 2))), hermitian=True)
        np.testing.assert_allclose(mm.integrate(GG, grid), np.eye(4), atol=1e-10)

    def test_length_mismatch(self, grid):
        with pytest.raises(ValueError, match="samples"):
            mm.integrate(np.zeros((3, 2, 2)), grid)

    def test_hermitian_flag_checked(self):
        with pytest.raises(ValueError, match="Hermitian"):
            mm.MatrixSamples(np.array([[[0.0, 1.0], [0.0, 0.0]]]), hermitian=True)

    def test_sequential_is_ascending_sum(self):
        rng = np.random.default_rng(3)
        g = mm.make_grid(2 * np.pi / 50)
        vals = rng.standard_normal((50, 2, 2))
        acc = np.zeros((2, 2))
        for v in vals:
            acc = acc + v
        assert np.array_equal(quadrature(vals, g), g.weight * acc)

    def test_pairwise_mode_agrees(self, grid):
        rng = np.random.default_rng(4)
        vals = rng.standard_normal((len(grid), 3, 3))
        np.testing.assert_allclose(quadrature(vals, grid, "pairwise"), quadrature(vals, grid),
                                   rtol=1e-12, atol=1e-15)


class TestGamma:
    def test_identity_density(self, filt, grid):
        phi = np.broadcast_to(np.eye(2, dtype=complex), (len(grid), 2, 2))
        np.testing.assert_allclose(mm.gamma_apply(filt, phi, grid), np.eye(4), atol=1e-12)

    def test_constant_density_is_block_diagonal(self, filt, grid):
        M = np.array([[1.5, -0.3], [-0.3, 0.7]])
        out = mm.gamma_apply(filt, np.broadcast_to(M, (len(grid), 2, 2)), grid)
        expected = np.zeros((4, 4))
        expected[:2, :2] = expected[2:, 2:] = M
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_gamma_of_adjoint_on_block_toeplitz(self, filt, grid, lam0):
        # G^* L G = 2 L00 + z L01 + z^-1 L10 for block-Toeplitz L, so Gamma
        # doubles the diagonal blocks and passes the lag-1 block through.
        phi = mm.gamma_adjoint(filt, lam0.matrix, grid.points)
        expected = lam0.matrix.copy()
        expected[:2, :2] *= 2
        expected[2:, 2:] *= 2
        np.testing.assert_allclose(mm.gamma_apply(filt, phi, grid).real, expected, atol=1e-10)

    def test_gamma_matches_pointwise_loop(self, filt, lam0):
        g = mm.make_grid(2 * np.pi / 40)
        phi = mm.gamma_adjoint(filt, lam0.matrix, g.points)
        acc = np.zeros((4, 4), dtype=complex)
        for theta in g.angles:
            Gk = mm.eval_filter(filt, np.exp(1j * theta))
            acc += Gk @ (np.conj(Gk.T) @ lam0.matrix @ Gk) @ np.conj(Gk.T)
        np.testing.assert_allclose(mm.gamma_apply(filt, phi, g), acc / len(g), atol=1e-10)

    def test_dimension_mismatch(self, filt, grid):
        with pytest.raises(ValueError):
            mm.gamma_apply(filt, np.zeros((len(grid), 3, 3)), grid)
        with pytest.raises(ValueError):
            mm.gamma_adjoint(filt, np.eye(3), 1.0)

    def test_adjoint_of_identity(self, filt):
        for z in np.exp(1j * np.array([-2.0, 0.1, 3.0])):
            np.testing.assert_allclose(mm.gamma_adjoint(filt, np.eye(4), z), 2 * np.eye(2),
                                       atol=1e-14)

    def test_adjoint_of_zero(self, filt):
        assert not np.any(mm.gamma_adjoint(filt, np.zeros((4, 4)), 1j))

    def test_adjoint_is_hermitian(self, filt):
        X = random_symmetric(np.random.default_rng(0))
        Y = mm.gamma_adjoint(filt, X, np.exp(0.4j))
        np.testing.assert_allclose(Y, np.conj(Y.T), atol=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_adjoint_duality(self, filt, grid, seed):
        rng = np.random.default_rng(seed)
        X = random_symmetric(rng)
        phi = random_hermitian_samples(rng, len(grid), 2)
        lhs = np.trace(X @ mm.gamma_apply(filt, phi, grid))
        adj = mm.gamma_adjoint(filt, X, grid.points)
        rhs = quadrature(np.einsum("nij,nji->n", adj, phi), grid)
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)

    @pytest.mark.parametrize("seed", range(3))
    def test_positivity(self, filt, grid, seed):
        phi = random_hermitian_samples(np.random.default_rng(seed), len(grid), 2, psd=True)
        assert np.linalg.eigvalsh(mm.gamma_apply(filt, phi, grid)).min() >= -1e-12

    def test_quadrature_convergence(self, filt):
        rng = np.random.default_rng(11)
        M1 = rng.standard_normal((2, 2))
        M0 = 5 * np.eye(2)
        coarse, fine = mm.make_grid(1e-3), mm.make_grid(5e-4)
        a = mm.gamma_apply(filt, trig_poly_samples(coarse, M0, M1), coarse)
        b = mm.gamma_apply(filt, trig_poly_samples(fine, M0, M1), fine)
        assert np.linalg.norm(a - b) < 1e-8


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(-3, 3), beta=st.floats(-3, 3), seed=st.integers(0, 2**16))
def test_gamma_linearity(alpha, beta, seed):
    filt = mm.shift_filter(2, 1)
    grid = mm.make_grid(2 * np.pi / 64)
    rng = np.random.default_rng(seed)
    p1 = random_hermitian_samples(rng, len(grid), 2)
    p2 = random_hermitian_samples(rng, len(grid), 2)
    lhs = mm.gamma_apply(filt, alpha * p1 + beta * p2, grid)
    rhs = alpha * mm.gamma_apply(filt, p1, grid) + beta * mm.gamma_apply(filt, p2, grid)
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1.0)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * scale
