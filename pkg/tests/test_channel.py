import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import interference_cov_sum
from relaysim.channel import (
    InterferenceEnv,
    RngStream,
    iid_equivalent_covariance,
    interference_covariance,
    sample_cn01_matrix,
    sample_cn01_vector,
)
from relaysim.errors import DimensionMismatch


class TestSampling:
    def test_moments(self):
        z = sample_cn01_vector(1_000_000, RngStream(123))
        for part in (z.real, z.imag):
            # each real component carries half the unit variance
            assert abs(part.mean()) < 0.01
        assert abs(z.mean()) < 0.01
        assert 0.99 <= np.mean(np.abs(z) ** 2) <= 1.01
        assert 0.99 <= 2 * z.real.var() <= 1.01 and 0.99 <= 2 * z.imag.var() <= 1.01
        # circular symmetry: E[z^2] = 0
        assert abs(np.mean(z * z)) < 0.01

    def test_stream_determinism(self):
        a = sample_cn01_vector(5, RngStream(9, 3))
        b = sample_cn01_vector(5, RngStream(9, 3))
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = sample_cn01_vector(5, RngStream(9, 3))
        assert not np.array_equal(a, sample_cn01_vector(5, RngStream(9, 4)))
        assert not np.array_equal(a, sample_cn01_vector(5, RngStream(10, 3)))
        assert not np.array_equal(a, sample_cn01_vector(5, RngStream(9, 3, attempt=1)))

    def test_generator_advances(self):
        gen = RngStream(1).generator()
        assert not np.array_equal(sample_cn01_vector(3, gen), sample_cn01_vector(3, gen))

    def test_matrix_shape(self):
        assert sample_cn01_matrix(4, 3, RngStream(0)).shape == (4, 3)

    @pytest.mark.parametrize("bad", [-1, 2**64])
    def test_seed_range(self, bad):
        with pytest.raises(ValueError):
            RngStream(bad)

    def test_max_seed_ok(self):
        sample_cn01_vector(2, RngStream(2**64 - 1, 2**64 - 1))

    def test_n_positive(self):
        with pytest.raises(ValueError):
            sample_cn01_vector(0, RngStream(0))


class TestCovariance:
    def test_no_interference(self):
        np.testing.assert_array_equal(interference_covariance(InterferenceEnv(), 1.0, n=3), np.eye(3))

    def test_single_interferer(self):
        env = InterferenceEnv(([1, 0],), (3,))
        np.testing.assert_array_equal(interference_covariance(env), [[4, 0], [0, 1]])

    def test_matches_elementwise_sum(self):
        gen = RngStream(5).generator()
        hs = sample_cn01_matrix(2, 4, gen)
        powers = (2.5, 7.0)
        K = interference_covariance(InterferenceEnv(tuple(hs), powers), 0.3)
        ref = interference_cov_sum(hs, powers, 4, 0.3)
        np.testing.assert_allclose(K, ref, atol=1e-12, rtol=0)
        np.testing.assert_array_equal(K, K.conj().T)

    def test_equal_split(self):
        env = InterferenceEnv.equal_split([[1, 0], [0, 1], [1, 1]], 9.0)
        assert env.interferer_powers == (3.0, 3.0, 3.0)
        assert env.total_power == 9.0 and env.num_interferers == 3

    def test_equal_split_empty(self):
        assert InterferenceEnv.equal_split([], 5.0).num_interferers == 0

    def test_mismatched_lengths(self):
        with pytest.raises(DimensionMismatch):
            InterferenceEnv(([1, 0],), (1.0, 2.0))
        with pytest.raises(DimensionMismatch):
            interference_covariance(InterferenceEnv(([1, 0], [1, 0, 0]), (1, 1)))
        with pytest.raises(DimensionMismatch):
            interference_covariance(InterferenceEnv(([1, 0],), (1,)), n=3)

    def test_needs_size_without_interferers(self):
        with pytest.raises(DimensionMismatch):
            interference_covariance(InterferenceEnv())

    def test_negative_power(self):
        with pytest.raises(ValueError):
            InterferenceEnv(([1],), (-1,))

    def test_bad_noise_var(self):
        with pytest.raises(ValueError):
            interference_covariance(InterferenceEnv(), 0.0, n=2)


class TestIidEquivalent:
    def test_identity(self):
        np.testing.assert_array_equal(iid_equivalent_covariance(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_array_equal(iid_equivalent_covariance([[4, 0], [0, 1]]), [[2.5, 0], [0, 2.5]])

    def test_trace_preserved(self):
        gen = RngStream(8).generator()
        A = sample_cn01_matrix(5, 5, gen)
        K = A @ A.conj().T + np.eye(5)
        out = iid_equivalent_covariance(K)
        assert abs(np.trace(out) - np.trace(K)) < 1e-12
        np.testing.assert_array_equal(out, np.diag(np.diag(out)))


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 5),
    st.lists(st.floats(0, 100, allow_nan=False), min_size=0, max_size=4),
    st.integers(0, 2**32),
)
def test_covariance_is_hermitian_pd(n, powers, seed):
    hs = sample_cn01_matrix(len(powers), n, RngStream(seed))
    K = interference_covariance(InterferenceEnv(tuple(hs), tuple(powers)), 1.0, n=n)
    np.testing.assert_allclose(K, K.conj().T, atol=0)
    assert np.linalg.eigvalsh(K).min() >= 1 - 1e-9 * max(1.0, sum(powers))
    assert abs(np.trace(iid_equivalent_covariance(K)) - np.trace(K)) <= 1e-12 * abs(np.trace(K))
