import numpy as np
import pytest

from hybridsim.numerics import logdet_eval, solve_hpd, svd


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def gauss_solve(a, b):
    """Reference solver: partial-pivot Gaussian elimination, no numpy.linalg."""
    a = np.array(a, dtype=complex)
    b = np.array(b, dtype=complex)
    n = a.shape[0]
    if b.ndim == 1:
        b = b[:, None]
    for col in range(n):
        piv = col + np.argmax(np.abs(a[col:, col]))
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            m = a[row, col] / a[col, col]
            a[row, col:] -= m * a[col, col:]
            b[row] -= m * b[col]
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def random_hpd(rng, n):
    m = crandn(rng, n, n)
    return m @ m.conj().T + n * np.eye(n)


class TestSvd:
    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(0)
        for m, n in [(6, 4), (4, 6), (5, 5), (8, 2)]:
            a = crandn(rng, m, n)
            u, s, v = svd(a)
            k = min(m, n)
            assert u.shape == (m, k) and v.shape == (n, k)
            assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - a) < 1e-12 * s[0]
            assert np.linalg.norm(u.conj().T @ u - np.eye(k)) < 1e-12
            assert np.linalg.norm(v.conj().T @ v - np.eye(k)) < 1e-12

    def test_singular_values_sorted_nonnegative(self):
        rng = np.random.default_rng(1)
        a = crandn(rng, 7, 3)
        _, s, _ = svd(a)
        assert np.all(s >= 0)
        assert np.all(np.diff(s) <= 0)

    def test_known_factors_recovered(self):
        # build A from chosen singular values and unitaries, recover them
        rng = np.random.default_rng(2)
        u0, _ = np.linalg.qr(crandn(rng, 6, 3))
        v0, _ = np.linalg.qr(crandn(rng, 4, 3))
        a = u0 @ np.diag([5.0, 2.0, 0.5]) @ v0.conj().T
        _, s, _ = svd(a)
        assert np.allclose(s[:3], [5.0, 2.0, 0.5], atol=1e-12)
        assert s[3] < 1e-12  # rank 3 by construction

    def test_nonfinite_rejected(self):
        a = np.eye(3, dtype=complex)
        a[1, 1] = np.nan
        with pytest.raises(ValueError):
            svd(a)


class TestSolveHpd:
    def test_matches_gaussian_elimination(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 5, 6):
            a = random_hpd(rng, n)
            b = crandn(rng, n, 3)
            x = solve_hpd(a, b)
            x_ref = gauss_solve(a, b)
            assert np.linalg.norm(x - x_ref) < 1e-10 * np.linalg.norm(x_ref)

    def test_residual(self):
        rng = np.random.default_rng(4)
        a = random_hpd(rng, 8)
        b = crandn(rng, 8, 2)
        x = solve_hpd(a, b)
        assert np.linalg.norm(a @ x - b) < 1e-10 * np.linalg.norm(b)

    def test_rank_deficient_gram_raises(self):
        rng = np.random.default_rng(5)
        col = crandn(rng, 6, 1)
        f = np.hstack([col, col])  # two identical columns
        gram = f.conj().T @ f
        with pytest.raises(np.linalg.LinAlgError):
            solve_hpd(gram, np.ones((2, 1), dtype=complex))

    def test_indefinite_raises(self):
        a = np.diag([1.0, -1.0]).astype(complex)
        with pytest.raises(np.linalg.LinAlgError):
            solve_hpd(a, np.ones((2, 1)))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            solve_hpd(np.ones((2, 3)), np.ones((2, 1)))
        with pytest.raises(ValueError):
            solve_hpd(np.eye(3), np.ones((2, 1)))

    def test_nonfinite_rejected(self):
        a = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            solve_hpd(a, np.array([[np.inf], [0.0]]))


class TestLogdet:
    def test_diagonal_hand_case(self):
        a = np.diag([1.0, 2.0, 4.0]).astype(complex)
        assert abs(logdet_eval(a) - 3.0) < 1e-13

    def test_scaled_identity(self):
        for c, n in [(0.5, 4), (3.0, 7), (1e-3, 2)]:
            val = logdet_eval(c * np.eye(n, dtype=complex))
            assert abs(val - n * np.log2(c)) < 1e-11

    def test_matches_eigenvalue_route(self):
        rng = np.random.default_rng(6)
        for n in (2, 4, 9):
            a = random_hpd(rng, n)
            ref = float(np.sum(np.log2(np.linalg.eigvalsh(a))))
            assert abs(logdet_eval(a) - ref) < 1e-10 * max(1.0, abs(ref))

    def test_block_additivity(self):
        rng = np.random.default_rng(7)
        a = random_hpd(rng, 3)
        b = random_hpd(rng, 4)
        blk = np.zeros((7, 7), dtype=complex)
        blk[:3, :3] = a
        blk[3:, 3:] = b
        assert abs(logdet_eval(blk) - logdet_eval(a) - logdet_eval(b)) < 1e-10

    def test_non_hermitian_raises(self):
        a = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
        with pytest.raises(np.linalg.LinAlgError):
            logdet_eval(a)

    def test_indefinite_raises(self):
        with pytest.raises(np.linalg.LinAlgError):
            logdet_eval(np.diag([2.0, -3.0]).astype(complex))
