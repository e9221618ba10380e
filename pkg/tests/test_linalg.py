import numpy as np
import pytest

from prepblock.linalg import (
    ConvergenceError,
    as_symmetric,
    eigen_sym,
    jacobi_eigh,
    pinv,
    quad_form,
    trace,
    trace_product,
)


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank))
    return g @ g.T


def laplacian(rng, n):
    """Graph Laplacian of a random connected graph: psd, rank n-1."""
    a = (rng.random((n, n)) < 0.4).astype(float)
    a = np.triu(a, 1)
    for i in range(1, n):
        a[rng.integers(0, i), i] = 1.0
    a = a + a.T
    return np.diag(a.sum(1)) - a


class TestJacobi:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 31, 50])
    def test_matches_lapack(self, rng, n):
        g = rng.standard_normal((n, n))
        m = as_symmetric(g + g.T)
        w, v = jacobi_eigh(m)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(m), atol=1e-10 * max(1, abs(w).max()))
        np.testing.assert_allclose(v @ np.diag(w) @ v.T, m, atol=1e-10)
        np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-10)

    def test_repeated_eigenvalues(self):
        m = np.kron(np.eye(3), np.ones((4, 4)))
        w, _ = jacobi_eigh(m)
        np.testing.assert_allclose(w, [0.0] * 9 + [4.0] * 3, atol=1e-12)

    def test_wide_dynamic_range(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((12, 12)))
        lam = np.logspace(-8, 8, 12)
        w, _ = jacobi_eigh(q @ np.diag(lam) @ q.T)
        np.testing.assert_allclose(w, lam, rtol=1e-6, atol=1e-7)

    def test_sweep_budget(self, rng):
        m = random_psd(rng, 30)
        with pytest.raises(ConvergenceError):
            jacobi_eigh(m, max_sweeps=1)


class TestEigenSym:
    def test_descending(self, rng):
        m = random_psd(rng, 9)
        for method in ("lapack", "jacobi"):
            w, _ = eigen_sym(m, method=method)
            assert np.all(np.diff(w) <= 1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            eigen_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            eigen_sym(np.ones((2, 3)))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            eigen_sym(np.eye(2), method="qr")


class TestPinv:
    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    @pytest.mark.parametrize("n", [2, 5, 13, 29, 50])
    def test_moore_penrose_axioms(self, rng, method, n):
        m = laplacian(rng, n)
        p = pinv(m, method=method)
        np.testing.assert_allclose(m @ p @ m, m, atol=1e-9 * n)
        np.testing.assert_allclose(p @ m @ p, p, atol=1e-9 * n)
        np.testing.assert_allclose(m @ p, (m @ p).T, atol=1e-9)
        np.testing.assert_allclose(p @ m, (p @ m).T, atol=1e-9)

    def test_matches_numpy(self, rng):
        m = random_psd(rng, 20, rank=14)
        np.testing.assert_allclose(pinv(m), np.linalg.pinv(m, hermitian=True), atol=1e-9)

    def test_involution(self, rng):
        m = laplacian(rng, 17)
        np.testing.assert_allclose(pinv(pinv(m)), m, atol=1e-8)

    def test_laplacian_projector(self, rng):
        n = 11
        m = laplacian(rng, n)
        np.testing.assert_allclose(m @ pinv(m), np.eye(n) - np.ones((n, n)) / n, atol=1e-10)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pinv(np.zeros((4, 4))), np.zeros((4, 4)))

    def test_methods_agree(self, rng):
        m = laplacian(rng, 25)
        np.testing.assert_allclose(pinv(m, method="jacobi"), pinv(m), atol=1e-10)


class TestHelpers:
    def test_trace_of_sum(self, rng):
        a, b = random_psd(rng, 6), random_psd(rng, 6)
        assert trace(a + b) == pytest.approx(trace(a) + trace(b))

    def test_trace_product(self, rng):
        a, b = random_psd(rng, 6), random_psd(rng, 6)
        assert trace_product(a, b) == pytest.approx(np.trace(a @ b))

    def test_quad_form(self, rng):
        a = random_psd(rng, 5)
        x = rng.standard_normal(5)
        assert quad_form(a, x) == pytest.approx(x @ a @ x)

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            quad_form(np.eye(3), np.ones(2))
        with pytest.raises(ValueError):
            trace_product(np.eye(3), np.eye(2))
        with pytest.raises(ValueError):
            trace(np.ones((2, 3)))
