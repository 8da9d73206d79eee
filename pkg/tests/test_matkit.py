import numpy as np
import pytest

from gausskey import matkit
from gausskey.errors import EvaluationError, InvalidInput, NotPSD


def char_poly_roots(h):
    """Oracle: eigenvalues as roots of the explicitly expanded characteristic
    polynomial, coefficients from the Faddeev-LeVerrier trace recursion."""
    n = h.shape[0]
    coeffs = [1.0 + 0.0j]
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    return np.roots(np.array(coeffs))


def gauss_elim_inverse(m):
    """Oracle: matrix inverse by Gauss-Jordan elimination with partial
    pivoting, no numpy.linalg involved."""
    n = m.shape[0]
    aug = np.hstack([m.astype(float).copy(), np.eye(n)])
    for col in range(n):
        piv = col + np.argmax(np.abs(aug[col:, col]))
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:]


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


class TestEigh:
    def test_identity(self):
        w, v = matkit.eigh(np.eye(4))
        assert np.allclose(w, 1.0)
        assert np.allclose(v @ v.conj().T, np.eye(4))

    def test_pauli_x(self):
        w, _ = matkit.eigh(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(w, [-1.0, 1.0])

    def test_char_poly_oracle_dim4(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            h = random_hermitian(rng, 4)
            w, _ = matkit.eigh(h)
            roots = np.sort(char_poly_roots(h).real)
            assert np.abs(w - roots).max() < 1e-8

    def test_reconstruction_random(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            dim = int(rng.integers(2, 17))
            h = random_hermitian(rng, dim)
            w, v = matkit.eigh(h)
            resid = np.abs(h - (v * w) @ v.conj().T).max()
            assert resid <= 1e-9 * (1.0 + np.abs(h).max())
            assert np.abs(v.conj().T @ v - np.eye(dim)).max() < 1e-10

    def test_eigenvalues_ascending(self):
        rng = np.random.default_rng(3)
        w, _ = matkit.eigh(random_hermitian(rng, 8))
        assert np.all(np.diff(w) >= 0)

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInput):
            matkit.eigh(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_nonhermitian(self):
        with pytest.raises(InvalidInput):
            matkit.eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_symmetrizes_rounding_noise(self):
        h = np.array([[1.0, 0.5 + 1e-13], [0.5, 2.0]])
        w, _ = matkit.eigh(h)
        ref, _ = matkit.eigh(np.array([[1.0, 0.5], [0.5, 2.0]]))
        assert np.abs(w - ref).max() < 1e-12


class TestPseudoInverse:
    def test_identity(self):
        assert np.allclose(matkit.pseudo_inverse(np.eye(3)), np.eye(3))

    def test_rank_deficient_diagonal(self):
        out = matkit.pseudo_inverse(np.diag([2.0, 0.0]))
        assert np.allclose(out, np.diag([0.5, 0.0]))

    def test_full_rank_matches_gauss_elimination(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            m = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
            plus = matkit.pseudo_inverse(m)
            assert np.abs(plus - gauss_elim_inverse(m)).max() < 1e-9
            assert np.abs(m @ plus - np.eye(3)).max() < 1e-9

    def test_moore_penrose_identities_rank_deficient(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            rank = int(rng.integers(1, 4))
            m = rng.standard_normal((4, rank)) @ rng.standard_normal((rank, 5))
            plus = matkit.pseudo_inverse(m)
            assert np.abs(m @ plus @ m - m).max() < 1e-9
            assert np.abs(plus @ m @ plus - plus).max() < 1e-9
            assert np.abs((m @ plus) - (m @ plus).T).max() < 1e-9
            assert np.abs((plus @ m) - (plus @ m).T).max() < 1e-9

    def test_rejects_bad_tol(self):
        with pytest.raises(InvalidInput):
            matkit.pseudo_inverse(np.eye(2), tol=0.0)


class TestMinimizeScalar:
    def test_quadratic(self):
        x, fx = matkit.minimize_scalar(lambda x: (x - 1.0) ** 2, 0.0, 3.0, tol=1e-8)
        assert abs(x - 1.0) < 1e-6
        assert fx < 1e-12

    def test_kink(self):
        x, _ = matkit.minimize_scalar(lambda x: abs(x - 0.3), 0.0, 1.0, tol=1e-8)
        assert abs(x - 0.3) < 1e-6

    def test_rate_bound_dense_grid_oracle(self):
        from gausskey.gaussian import SymmetricStateParams
        from gausskey.security import rate_lower_bound

        p = SymmetricStateParams(1.2, 0.55, 0.55)
        f = lambda x0: -rate_lower_bound(p, x0)
        x, fx = matkit.minimize_scalar(f, 1e-6, 5.0, tol=1e-6)
        grid = np.linspace(1e-6, 5.0, 10_000)
        vals = np.array([f(g) for g in grid])
        k = int(np.argmin(vals))
        spacing = grid[1] - grid[0]
        assert abs(x - grid[k]) <= spacing
        assert fx <= vals[k] + 1e-12

    def test_non_finite_objective(self):
        with pytest.raises(EvaluationError):
            matkit.minimize_scalar(lambda x: np.nan, 0.0, 1.0)

    def test_bad_bracket(self):
        with pytest.raises(InvalidInput):
            matkit.minimize_scalar(lambda x: x, 1.0, 0.0)


class TestSampleMvn:
    def test_identity_covariance_statistics(self):
        rng = matkit.Rng(123)
        xs = matkit.sample_mvn(np.eye(2), 100_000, rng)
        emp = xs.T @ xs / len(xs)
        assert np.abs(emp - np.eye(2)).max() < 0.02
        # mean converges at 1/sqrt(n); 5 sigma bound
        assert np.abs(xs.mean(axis=0)).max() < 5.0 / np.sqrt(len(xs))

    def test_general_covariance_statistics(self):
        cov = np.array([[0.75, 0.5], [0.5, 0.75]])
        xs = matkit.sample_mvn(cov, 200_000, matkit.Rng(77))
        emp = xs.T @ xs / len(xs)
        # entrywise 5 sigma with var ~ (cov_ii cov_jj + cov_ij^2)/n
        bound = 5.0 * np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / len(xs))
        assert np.all(np.abs(emp - cov) < bound)

    def test_deterministic(self):
        a = matkit.sample_mvn(np.eye(3), 100, matkit.Rng(5))
        b = matkit.sample_mvn(np.eye(3), 100, matkit.Rng(5))
        assert np.array_equal(a, b)

    def test_zero_covariance(self):
        xs = matkit.sample_mvn(np.zeros((2, 2)), 10, matkit.Rng(0))
        assert np.array_equal(xs, np.zeros((10, 2)))

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            matkit.sample_mvn(np.diag([1.0, -1.0]), 10, matkit.Rng(0))


class TestBinaryEntropy:
    def test_maximum(self):
        assert matkit.binary_entropy(0.5) == 1.0

    def test_limits(self):
        assert matkit.binary_entropy(0.0) == 0.0
        assert matkit.binary_entropy(1.0) == 0.0

    def test_value(self):
        assert abs(matkit.binary_entropy(0.11) - 0.49992) < 1e-5

    def test_concavity_grid(self):
        ps = np.linspace(0.0, 1.0, 41)
        for p in ps:
            for q in ps:
                mid = matkit.binary_entropy((p + q) / 2.0)
                avg = 0.5 * (matkit.binary_entropy(p) + matkit.binary_entropy(q))
                assert mid >= avg - 1e-12

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            matkit.binary_entropy(1.5)
        with pytest.raises(InvalidInput):
            matkit.binary_entropy(-0.1)


class TestEntropyBits:
    def test_pure(self):
        assert matkit.entropy_bits([1.0, 0.0, 0.0]) == 0.0

    def test_uniform(self):
        assert abs(matkit.entropy_bits([0.25] * 4) - 2.0) < 1e-12

    def test_small_negative_clipped(self):
        assert matkit.entropy_bits([1.0, -1e-12]) == 0.0

    def test_rejects_large_negative(self):
        with pytest.raises(InvalidInput):
            matkit.entropy_bits([0.5, -0.5])


class TestRng:
    def test_same_seed_same_stream(self):
        a = matkit.Rng(42).standard_normal(16)
        b = matkit.Rng(42).standard_normal(16)
        assert np.array_equal(a, b)

    def test_substreams_disjoint_and_reproducible(self):
        base = matkit.Rng(42)
        s0 = base.substream(0).standard_normal(64)
        s1 = base.substream(1).standard_normal(64)
        again = matkit.Rng(42).substream(0).standard_normal(64)
        assert np.array_equal(s0, again)
        assert not np.array_equal(s0, s1)

    def test_substream_independent_of_parent_draws(self):
        base = matkit.Rng(42)
        base.standard_normal(1000)
        assert np.array_equal(
            base.substream(3).standard_normal(8),
            matkit.Rng(42).substream(3).standard_normal(8),
        )

    def test_rejects_bad_seed(self):
        with pytest.raises(InvalidInput):
            matkit.Rng(-1)
        with pytest.raises(InvalidInput):
            matkit.Rng(2**64)
