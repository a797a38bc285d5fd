"""Fidelity (quantum) and classical kernel matrices."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .featuremaps import EmbeddingSpec, data_map_batch, fiducial_batch
from .simulator import StateVector, compile_batch, run_batch, run_compiled

QUANTUM_FIDELITY = "quantum_fidelity"
LINEAR = "linear"
POLYNOMIAL = "polynomial"
RBF = "rbf"


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class ClassicalKernelParams:
    degree: int = 3
    gamma: float = 1.0
    coef0: float = 0.0

    def __post_init__(self):
        if self.degree < 1:
            raise ConfigurationError(f"degree must be >= 1, got {self.degree}")
        if not self.gamma > 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")


def _amplitudes(states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        return np.atleast_2d(states)
    return np.stack([np.asarray(s.amplitudes) for s in states])


class EmbeddingCache:
    """Data-map circuits for a fixed feature matrix, compiled once.

    The fiducial layer is the only theta-dependent part of an embedding and it
    acts on ``|0...0>`` first, so each evaluation prepares that one product
    state and pushes it through the precompiled data circuits.
    """

    def __init__(self, spec: EmbeddingSpec, X):
        self.spec = spec
        self.compiled = compile_batch(data_map_batch(spec, X))

    def fiducial_state(self, theta) -> np.ndarray:
        return run_batch(fiducial_batch(self.spec.with_theta(theta), 1))[0]

    def amplitudes(self, theta=None) -> np.ndarray:
        theta = self.spec.theta if theta is None else theta
        return run_compiled(self.compiled, self.fiducial_state(theta))


def embed_amplitudes(spec: EmbeddingSpec, X) -> np.ndarray:
    """Amplitude matrix ``(m, 2**n)`` of the embedded rows of ``X``."""
    return EmbeddingCache(spec, X).amplitudes()


def embed_all(spec: EmbeddingSpec, X) -> list[StateVector]:
    amps = embed_amplitudes(spec, X)
    return [StateVector(spec.n_qubits, row) for row in amps]


def fidelity_gram(states_a, states_b=None, meta: dict | None = None) -> KernelMatrix:
    """``values[i, j] = |<b_j|a_i>|**2``.

    Accepts lists of :class:`StateVector` or ``(m, 2**n)`` amplitude arrays.
    With ``states_b`` omitted the symmetrized self-Gram matrix is returned.
    """
    A = _amplitudes(states_a)
    B = A if states_b is None else _amplitudes(states_b)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]} amplitudes")
    values = np.abs(A @ B.conj().T) ** 2
    if states_b is None:
        values = 0.5 * (values + values.T)
    return KernelMatrix(values, QUANTUM_FIDELITY, dict(meta or {}))


def _gram_meta(spec: EmbeddingSpec, theta) -> dict:
    return {"feature_map": spec.feature_map, "parameterization": spec.parameterization,
            "theta": [float(t) for t in theta]}


def quantum_gram(spec: EmbeddingSpec, X, Z=None) -> KernelMatrix:
    """Fidelity Gram matrix between the rows of ``X`` (and ``Z``, if given)."""
    A = embed_amplitudes(spec, X)
    B = None if Z is None else embed_amplitudes(spec, Z)
    return fidelity_gram(A, B, _gram_meta(spec, spec.theta))


def cached_gram(cache: EmbeddingCache, theta) -> KernelMatrix:
    """Self-Gram of the cached rows at ``theta``; agrees bitwise with :func:`quantum_gram`."""
    return fidelity_gram(cache.amplitudes(theta), None, _gram_meta(cache.spec, theta))


def gamma_scale(X) -> float:
    """``1 / (n_features * X.var())``, the usual 'scale' heuristic."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    var = X.var()
    if not var > 0:
        raise ConfigurationError("gamma_scale needs feature values with nonzero variance")
    return 1.0 / (X.shape[1] * var)


def classical_gram(kind: str, params: ClassicalKernelParams, A, B=None) -> KernelMatrix:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = A if B is None else np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"feature dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    dot = A @ B.T
    if kind == LINEAR:
        values = dot
    elif kind == POLYNOMIAL:
        values = (params.gamma * dot + params.coef0) ** params.degree
    elif kind == RBF:
        sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2 * dot
        values = np.exp(-params.gamma * np.maximum(sq, 0.0))
    else:
        raise ConfigurationError(f"unknown classical kernel {kind!r}")
    return KernelMatrix(values, kind, {"degree": params.degree, "gamma": params.gamma,
                                       "coef0": params.coef0})


def degree_rule(feature_dim: int) -> int:
    """Polynomial degree whose feature space roughly matches a 2**(2n) density-matrix space.

    Returns the smallest ``k`` with ``C(n + k, k - 1) >= 4**n``. This reproduces
    the degrees used in the benchmark tables (2 -> 4, 4 -> 7, 8 -> 11, 14 -> 17).
    """
    if feature_dim < 1:
        raise ConfigurationError(f"feature_dim must be >= 1, got {feature_dim}")
    target = 4**feature_dim
    k = 1
    while comb(feature_dim + k, k - 1) < target:
        k += 1
    return k


def min_eigenvalue(gram) -> float:
    return float(np.linalg.eigvalsh(np.asarray(gram, dtype=float)).min())


def is_psd(gram, tol: float = 1e-8) -> bool:
    return min_eigenvalue(gram) >= -tol


def write_kernel_csv(gram, path) -> None:
    """Dump a kernel matrix as CSV with round-trip exact (17 significant digit) values."""
    values = np.asarray(gram, dtype=float)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in values:
            writer.writerow([f"{v:.17g}" for v in row])


def read_kernel_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
