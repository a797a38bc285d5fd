from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics.pairwise import polynomial_kernel, rbf_kernel

from qkbench import featuremaps as fm
from qkbench import kernels as kn
from qkbench.errors import ConfigurationError
from qkbench.simulator import inner_product, run_circuit

TWO_PI = 2 * np.pi


def random_spec(rng, feature_map, n_qubits, param):
    spec = fm.EmbeddingSpec(feature_map, n_qubits, param)
    return spec.with_theta(rng.uniform(-np.pi, np.pi, spec.n_params))


# --------------------------------------------------------------------------- embedding


def test_embed_single_origin_point():
    (psi,) = kn.embed_all(fm.EmbeddingSpec(fm.COVARIANT, 1), [[0.0, 0.0]])
    np.testing.assert_allclose(psi.amplitudes, [1, 0], atol=1e-15)


def test_embed_all_length_and_width(rng):
    states = kn.embed_all(fm.EmbeddingSpec(fm.ZZ, 2), rng.uniform(0, TWO_PI, (200, 2)))
    assert len(states) == 200
    assert all(s.amplitudes.shape == (4,) for s in states)


def test_embed_all_matches_run_circuit(rng):
    spec = random_spec(rng, fm.ZZ, 3, fm.DEDICATED)
    X = rng.uniform(0, TWO_PI, (4, 3))
    for psi, x in zip(kn.embed_all(spec, X), X):
        np.testing.assert_allclose(psi.amplitudes, run_circuit(fm.build_embedding(spec, x)).amplitudes,
                                   atol=1e-12)


# --------------------------------------------------------------------------- fidelity Gram


def test_fidelity_entries_are_squared_overlaps(rng):
    spec = random_spec(rng, fm.COVARIANT, 2, fm.SHARED)
    A = kn.embed_all(spec, rng.uniform(0, TWO_PI, (3, 4)))
    B = kn.embed_all(spec, rng.uniform(0, TWO_PI, (5, 4)))
    K = kn.fidelity_gram(A, B).values
    assert K.shape == (3, 5)
    for i in range(3):
        for j in range(5):
            assert K[i, j] == pytest.approx(abs(inner_product(B[j], A[i])) ** 2, abs=1e-12)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        kn.fidelity_gram(np.ones((2, 4)), np.ones((2, 8)))


@settings(max_examples=40)
@given(st.sampled_from([(fm.ZZ, 2), (fm.ZZ, 3), (fm.COVARIANT, 1), (fm.COVARIANT, 2),
                        (fm.COVARIANT, 3), (fm.COVARIANT, 7)]),
       st.sampled_from([fm.SHARED, fm.DEDICATED]),
       st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_self_gram_invariants(layout, param, m, seed):
    rng = np.random.default_rng(seed)
    feature_map, n = layout
    spec = random_spec(rng, feature_map, n, param)
    X = rng.uniform(0, TWO_PI, (m, spec.feature_dim))
    K = kn.quantum_gram(spec, X).values
    np.testing.assert_allclose(K, K.T, atol=1e-10)
    np.testing.assert_allclose(np.diag(K), 1.0, atol=1e-10)
    assert K.min() >= 0 and K.max() <= 1 + 1e-10
    assert kn.is_psd(K)


def test_single_qubit_covariant_closed_form(rng):
    spec = fm.EmbeddingSpec(fm.COVARIANT, 1)
    X = rng.uniform(0, TWO_PI, (1000, 2))
    Z = rng.uniform(0, TWO_PI, (1000, 2))
    got = np.abs(np.sum(kn.embed_amplitudes(spec, X) * kn.embed_amplitudes(spec, Z).conj(), axis=1)) ** 2
    np.testing.assert_allclose(got, np.cos((X[:, 0] - Z[:, 0]) / 2) ** 2, atol=1e-10)


def test_single_qubit_covariant_orthogonal_pair():
    K = kn.quantum_gram(fm.EmbeddingSpec(fm.COVARIANT, 1), [[np.pi, 0.0]], [[0.0, 0.0]])
    assert K.values[0, 0] == pytest.approx(0.0, abs=1e-15)


def zz_state_bruteforce(x):
    """exp(i sum_S phi_S Z_S) H^{(x)2}, twice, from |00>, with explicit 4x4 matrices."""
    z = np.array([[1, 1], [-1, 1], [1, -1], [-1, -1]])  # (z_q0, z_q1) for index 0..3
    phase = x[0] * z[:, 0] + x[1] * z[:, 1] + (np.pi - x[0]) * (np.pi - x[1]) * z[:, 0] * z[:, 1]
    had = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    layer = np.diag(np.exp(1j * phase)) @ np.kron(had, had)
    return layer @ layer @ np.eye(4)[0]


def test_zz_two_qubit_bruteforce(rng):
    X = rng.uniform(0, TWO_PI, (20, 2))
    states = np.array([zz_state_bruteforce(x) for x in X])
    expected = np.abs(states @ states.conj().T) ** 2
    np.testing.assert_allclose(kn.quantum_gram(fm.EmbeddingSpec(fm.ZZ, 2), X).values, expected,
                               atol=1e-10)


def test_cached_gram_is_bitwise_equal(rng):
    spec = random_spec(rng, fm.ZZ, 3, fm.DEDICATED)
    X = rng.uniform(0, TWO_PI, (7, 3))
    cache = kn.EmbeddingCache(spec, X)
    np.testing.assert_array_equal(kn.cached_gram(cache, spec.theta).values,
                                  kn.quantum_gram(spec, X).values)


def test_kernel_matrix_is_read_only():
    K = kn.fidelity_gram(np.eye(2, dtype=complex))
    with pytest.raises(ValueError):
        K.values[0, 0] = 3.0
    assert K.kind == kn.QUANTUM_FIDELITY


# --------------------------------------------------------------------------- classical


def test_classical_kernels_match_sklearn(rng):
    A, B = rng.normal(size=(6, 3)), rng.normal(size=(4, 3))
    params = kn.ClassicalKernelParams(degree=4, gamma=0.3, coef0=0.5)
    np.testing.assert_allclose(kn.classical_gram(kn.LINEAR, params, A, B).values, A @ B.T)
    np.testing.assert_allclose(kn.classical_gram(kn.POLYNOMIAL, params, A, B).values,
                               polynomial_kernel(A, B, degree=4, gamma=0.3, coef0=0.5))
    np.testing.assert_allclose(kn.classical_gram(kn.RBF, params, A, B).values,
                               rbf_kernel(A, B, gamma=0.3), atol=1e-14)


def test_classical_kernel_validation():
    with pytest.raises(ConfigurationError):
        kn.ClassicalKernelParams(degree=0)
    with pytest.raises(ConfigurationError):
        kn.ClassicalKernelParams(gamma=0)
    with pytest.raises(ConfigurationError):
        kn.classical_gram("sigmoid", kn.ClassicalKernelParams(), np.ones((2, 2)))
    with pytest.raises(ValueError):
        kn.classical_gram(kn.LINEAR, kn.ClassicalKernelParams(), np.ones((2, 2)), np.ones((2, 3)))


def test_gamma_scale_examples():
    X2 = np.array([[0.0, 0.0], [np.sqrt(2), np.sqrt(2)]])  # entry variance 0.5
    assert kn.gamma_scale(X2) == pytest.approx(1.0)
    X4 = np.array([[1.0, 1, 1, 1], [-1, -1, -1, -1]])
    assert kn.gamma_scale(X4) == pytest.approx(0.25)
    with pytest.raises(ConfigurationError):
        kn.gamma_scale(np.full((3, 2), 1.5))


@pytest.mark.parametrize("dim, degree", [(2, 4), (4, 7), (8, 11), (14, 17)])
def test_degree_rule_table_values(dim, degree):
    assert kn.degree_rule(dim) == degree


@pytest.mark.parametrize("dim", range(1, 21))
def test_degree_rule_minimality(dim):
    k = kn.degree_rule(dim)
    # the literal bound C(n, k) <= 4**n holds for every k >= n and is not what picks k
    assert comb(dim, k) <= 4**dim
    assert comb(dim + k, k - 1) >= 4**dim
    assert k == 1 or comb(dim + k - 1, k - 2) < 4**dim
    assert kn.degree_rule(dim + 1) >= k


# --------------------------------------------------------------------------- PSD and CSV


def test_psd_check():
    assert kn.is_psd(np.eye(3))
    assert not kn.is_psd(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert kn.is_psd(np.array([[1.0, 1.0], [1.0, 1.0 - 1e-12]]))


def test_kernel_csv_round_trip(tmp_path, rng):
    K = rng.random((5, 3)) / 7
    kn.write_kernel_csv(kn.KernelMatrix(K, kn.LINEAR), tmp_path / "k.csv")
    np.testing.assert_array_equal(kn.read_kernel_csv(tmp_path / "k.csv"), K)
