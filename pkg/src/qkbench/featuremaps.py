"""ZZ and covariant feature-map circuits with trainable fiducial layers.

Every builder has a batched form operating on a feature matrix ``X`` of shape
``(m, d)`` that returns a :class:`~qkbench.simulator.CircuitBatch`; the
single-point builders are row 0 of the batched ones, so both paths share the
same gate layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConfigurationError
from .simulator import CircuitBatch, CircuitSpec

ZZ = "zz"
COVARIANT = "covariant"
FEATURE_MAPS = (ZZ, COVARIANT)

SHARED = "shared"
DEDICATED = "dedicated"
PARAMETERIZATIONS = (SHARED, DEDICATED)

ZZ_REPS = 2


def n_qubits_for(feature_map: str, feature_dim: int) -> int:
    """Circuit width needed to encode ``feature_dim`` features."""
    if feature_map == ZZ:
        return feature_dim
    if feature_map == COVARIANT:
        if feature_dim % 2:
            raise ConfigurationError(
                f"covariant map needs an even feature dimension, got {feature_dim}"
            )
        return feature_dim // 2
    raise ConfigurationError(f"unknown feature map {feature_map!r}")


def n_parameters(parameterization: str, n_qubits: int) -> int:
    if parameterization == SHARED:
        return 3
    if parameterization == DEDICATED:
        return 3 * n_qubits
    raise ConfigurationError(f"unknown parameterization {parameterization!r}")


@dataclass(frozen=True)
class EmbeddingSpec:
    """Data map plus fiducial layer; ``theta`` defaults to all zeros."""

    feature_map: str
    n_qubits: int
    parameterization: str = SHARED
    theta: tuple[float, ...] = field(default=None)

    def __post_init__(self):
        if self.feature_map not in FEATURE_MAPS:
            raise ConfigurationError(f"unknown feature map {self.feature_map!r}")
        n_params = n_parameters(self.parameterization, self.n_qubits)
        if self.theta is None:
            theta = (0.0,) * n_params
        else:
            theta = tuple(float(t) for t in np.ravel(self.theta))
        if len(theta) != n_params:
            raise ConfigurationError(
                f"{self.parameterization} parameterization on {self.n_qubits} qubits "
                f"takes {n_params} angles, got {len(theta)}"
            )
        object.__setattr__(self, "theta", theta)

    @classmethod
    def for_features(cls, feature_map: str, feature_dim: int, parameterization: str = SHARED, theta=None):
        return cls(feature_map, n_qubits_for(feature_map, feature_dim), parameterization, theta)

    @property
    def n_params(self) -> int:
        return len(self.theta)

    @property
    def feature_dim(self) -> int:
        return self.n_qubits if self.feature_map == ZZ else 2 * self.n_qubits

    def with_theta(self, theta) -> "EmbeddingSpec":
        return EmbeddingSpec(self.feature_map, self.n_qubits, self.parameterization, theta)


def _as_matrix(X, width: int, what: str) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != width:
        raise ConfigurationError(f"{what} expects {width} features per point, got {X.shape[1]}")
    return X


# --------------------------------------------------------------------------- batched builders


def fiducial_batch(spec: EmbeddingSpec, m: int) -> CircuitBatch:
    batch = CircuitBatch(spec.n_qubits, m)
    theta = spec.theta
    for q in range(spec.n_qubits):
        angles = theta[:3] if spec.parameterization == SHARED else theta[3 * q: 3 * q + 3]
        batch.add("RXYZ", (q,), angles)
    return batch


def zz_batch(X, n_qubits: int) -> CircuitBatch:
    if n_qubits < 2:
        raise ConfigurationError("the ZZ map needs at least 2 qubits")
    X = _as_matrix(X, n_qubits, "ZZ map")
    batch = CircuitBatch(n_qubits, X.shape[0])
    pairs = list(combinations(range(n_qubits), 2))
    for _ in range(ZZ_REPS):
        for q in range(n_qubits):
            batch.add("H", (q,))
        # exp(i phi Z) == RZ(-2 phi)
        for q in range(n_qubits):
            batch.add("RZ", (q,), (-2.0 * X[:, q],))
        for j, k in pairs:
            batch.add("RZZ", (j, k), (-2.0 * (np.pi - X[:, j]) * (np.pi - X[:, k]),))
    return batch


def covariant_batch(X, n_qubits: int) -> CircuitBatch:
    X = _as_matrix(X, 2 * n_qubits, "covariant map")
    batch = CircuitBatch(n_qubits, X.shape[0])
    for k in range(n_qubits - 1):
        batch.add("CZ", (k, k + 1))
    for q in range(n_qubits):
        # operator product RX(x_odd) RZ(x_even): RZ acts first
        batch.add("RZ", (q,), (X[:, 2 * q + 1],))
        batch.add("RX", (q,), (X[:, 2 * q],))
    return batch


def data_map_batch(spec: EmbeddingSpec, X) -> CircuitBatch:
    if spec.feature_map == ZZ:
        return zz_batch(X, spec.n_qubits)
    return covariant_batch(X, spec.n_qubits)


def embedding_batch(spec: EmbeddingSpec, X) -> CircuitBatch:
    """Fiducial layer first, then the data map, for every row of ``X``."""
    data = data_map_batch(spec, X)
    batch = fiducial_batch(spec, data.m)
    batch.extend(data)
    return batch


# --------------------------------------------------------------------------- single point


def build_fiducial(spec: EmbeddingSpec) -> CircuitSpec:
    return fiducial_batch(spec, 1).circuit(0)


def build_zz_map(x, n_qubits: int) -> CircuitSpec:
    return zz_batch(np.reshape(x, (1, -1)), n_qubits).circuit(0)


def build_covariant_map(x, n_qubits: int) -> CircuitSpec:
    return covariant_batch(np.reshape(x, (1, -1)), n_qubits).circuit(0)


def build_embedding(spec: EmbeddingSpec, x) -> CircuitSpec:
    return embedding_batch(spec, np.reshape(x, (1, -1))).circuit(0)
