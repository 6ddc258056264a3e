import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dominant_eig
from relaysim.errors import DimensionMismatch, NotHermitian, NotPositiveDefinite
from relaysim.numerics import (
    canonical_phase,
    check_hermitian,
    cholesky,
    ensure_hermitian,
    hadamard,
    principal_eigenpair,
    principal_generalized_eigenpair,
    solve_hermitian,
)


def random_pd(rng, n, shift=0.1):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A @ A.conj().T + shift * np.eye(n)


def random_psd(rng, n, rank):
    A = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return A @ A.conj().T


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(cholesky([[4, 0], [0, 9]]), [[2, 0], [0, 3]])

    def test_reconstructs_random(self):
        rng = np.random.default_rng(0)
        M = random_pd(rng, 4)
        L = cholesky(M)
        assert np.allclose(np.triu(L, 1), 0)
        assert np.linalg.norm(L @ L.conj().T - M) / np.linalg.norm(M) < 1e-10

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky([[1, 2], [2, 1]])

    def test_non_hermitian_raises(self):
        with pytest.raises(NotHermitian):
            cholesky([[2, 1], [0, 2]])

    def test_non_square_raises(self):
        with pytest.raises(DimensionMismatch):
            cholesky(np.ones((2, 3)))


class TestSolve:
    def test_identity(self):
        b = np.array([1 + 2j, -3, 0.5j])
        np.testing.assert_allclose(solve_hermitian(np.eye(3), b), b)

    def test_diagonal(self):
        np.testing.assert_allclose(solve_hermitian([[2, 0], [0, 4]], [2, 4]), [1, 1])

    def test_residual_random(self):
        rng = np.random.default_rng(1)
        M = random_pd(rng, 5)
        b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        x = solve_hermitian(M, b)
        assert np.linalg.norm(M @ x - b) / np.linalg.norm(b) < 1e-10

    def test_matrix_rhs(self):
        rng = np.random.default_rng(2)
        M = random_pd(rng, 3)
        X = solve_hermitian(M, np.eye(3))
        np.testing.assert_allclose(M @ X, np.eye(3), atol=1e-10)

    def test_rhs_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_hermitian(np.eye(3), [1, 2])

    def test_singular_raises(self):
        with pytest.raises(NotPositiveDefinite):
            solve_hermitian([[1, 1], [1, 1]], [1, 0])


class TestHermitianCheck:
    def test_report(self):
        r = check_hermitian([[2, 1j], [-1j, 2]])
        assert r.is_hermitian and r.is_positive_definite and r.max_asymmetry == 0

    def test_not_pd(self):
        r = check_hermitian([[0, 1], [1, 0]])
        assert r.is_hermitian and not r.is_positive_definite

    def test_asymmetric(self):
        r = check_hermitian([[1, 1], [0, 1]])
        assert not r.is_hermitian and r.max_asymmetry == 1

    def test_ensure_symmetrizes_roundoff(self):
        M = np.array([[1, 0.5 + 1e-14], [0.5, 1]])
        H = ensure_hermitian(M)
        np.testing.assert_array_equal(H, H.conj().T)


class TestEigenpair:
    def test_diagonal(self):
        lam, v = principal_eigenpair(np.diag([1.0, 2.0, 5.0]))
        assert lam == pytest.approx(5.0)
        np.testing.assert_allclose(v, [0, 0, 1], atol=1e-12)

    def test_rank_one(self):
        u = np.array([1 + 1j, 2, -0.5j])
        lam, v = principal_eigenpair(np.outer(u, u.conj()))
        assert lam == pytest.approx(np.vdot(u, u).real, rel=1e-12)
        # same direction as u, up to a unit phase
        assert abs(abs(np.vdot(u, v)) - np.linalg.norm(u)) < 1e-10

    def test_zero_matrix(self):
        lam, v = principal_eigenpair(np.zeros((3, 3)))
        assert lam == 0 and np.linalg.norm(v) == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_eigensolve(self, seed):
        rng = np.random.default_rng(seed)
        M = random_psd(rng, 6, 6)
        lam, v = principal_eigenpair(M)
        ref_lam, ref_v = dominant_eig(M)
        assert abs(lam - ref_lam) / ref_lam < 1e-8
        assert abs(abs(np.vdot(ref_v, v)) - 1) < 1e-8
        assert np.linalg.norm(M @ v - lam * v) <= 1e-8 * lam

    def test_canonical_phase_of_result(self):
        rng = np.random.default_rng(7)
        _, v = principal_eigenpair(random_psd(rng, 4, 2))
        k = np.argmax(np.abs(v))
        assert v[k].imag == pytest.approx(0, abs=1e-15) and v[k].real > 0

    def test_generalized(self):
        rng = np.random.default_rng(8)
        A = random_pd(rng, 4)
        B = random_psd(rng, 4, 2)
        lam, x = principal_generalized_eigenpair(A, B)
        ref = np.max(np.linalg.eigvals(np.linalg.solve(A, B)).real)
        assert lam == pytest.approx(ref, rel=1e-9)
        np.testing.assert_allclose(B @ x, lam * (A @ x), atol=1e-9 * lam * np.linalg.norm(x))


class TestHadamardAndPhase:
    def test_vectors(self):
        np.testing.assert_array_equal(hadamard([1, 2], [3, 4]), [3, 8])

    def test_mask_with_identity(self):
        M = np.arange(9.0).reshape(3, 3)
        np.testing.assert_array_equal(hadamard(M, np.eye(3)), np.diag(np.diag(M)))

    def test_example_channels(self):
        np.testing.assert_array_equal(hadamard([1, 6], [4, -3]), [4, -18])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hadamard([1, 2], [1, 2, 3])

    def test_canonical_phase(self):
        v = canonical_phase([1j, -3j, 2])
        # rotation by conj(-3j)/3 = j
        np.testing.assert_allclose(v, [-1, 3, 2j], atol=1e-15)

    def test_canonical_phase_zero(self):
        np.testing.assert_array_equal(canonical_phase(np.zeros(2)), np.zeros(2))


complex_entries = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(complex_entries, min_size=n * n, max_size=n * n)))
def test_solve_residual_property(entries):
    n = int(round(len(entries) ** 0.5))
    A = np.array(entries, dtype=complex).reshape(n, n)
    M = A @ A.conj().T + np.eye(n)
    b = np.arange(1, n + 1, dtype=complex)
    x = solve_hermitian(M, b)
    assert np.linalg.norm(M @ x - b) <= 1e-8 * np.linalg.norm(M) * np.linalg.norm(x) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(complex_entries, min_size=1, max_size=6))
def test_canonical_phase_property(entries):
    v = np.array(entries, dtype=complex)
    w = canonical_phase(v)
    np.testing.assert_allclose(np.abs(w), np.abs(v), atol=1e-12)
    if np.any(v):
        k = np.argmax(np.abs(w))
        assert w[k].real >= 0 and abs(w[k].imag) <= 1e-12 * abs(w[k])
        np.testing.assert_allclose(canonical_phase(w), w, atol=1e-12)
