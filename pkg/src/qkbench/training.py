"""Kernel-target alignment, the SVC loss, and quantum kernel training by 2-SPSA."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .classifiers import solve_svm_dual
from .errors import ConfigurationError
from .featuremaps import EmbeddingSpec
from .kernels import EmbeddingCache, cached_gram

log = logging.getLogger(__name__)


def target_alignment(gram, labels) -> float:
    """Cosine similarity between ``gram`` and the ideal kernel ``y y^T``."""
    K = np.asarray(gram, dtype=float)
    y = np.asarray(labels, dtype=float)
    m = len(y)
    if K.shape != (m, m):
        raise ValueError(f"gram shape {K.shape} does not match {m} labels")
    norm = np.sqrt(np.sum(K**2)) * m  # <yy', yy'> = m**2 for +-1 labels
    if norm == 0:
        raise ConfigurationError("alignment of an all-zero kernel matrix is undefined")
    return float(y @ K @ y / norm)


@dataclass(frozen=True, eq=False)
class SvcLoss:
    value: float
    alphas: np.ndarray


def svc_loss(gram, labels, C: float = 1.0) -> SvcLoss:
    """Optimal SVM dual objective for a fixed kernel (the weighted alignment loss)."""
    model = solve_svm_dual(gram, labels, C)
    return SvcLoss(model.objective, model.alphas)


@dataclass
class SpsaConfig:
    max_iterations: int = 400
    alpha_exp: float = 0.602
    gamma_exp: float = 0.101
    stability_A: float | None = None  # None -> 0.1 * max_iterations
    learning_rate: float | None = None  # None -> calibrated
    perturbation: float | None = None  # None -> 0.2
    second_order: bool = True
    hessian_regularization: float = 0.01
    calibration_steps: int = 25
    target_magnitude: float = 2 * np.pi / 10
    max_condition: float = 1e8
    seed: int = 0
    budget_seconds: float | None = None

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be >= 0")
        if self.alpha_exp <= 0 or self.gamma_exp <= 0:
            raise ConfigurationError("gain exponents must be positive")


@dataclass
class QktReport:
    loss_trace: list[float]
    theta_trace: list[list[float]]
    best_theta: list[float]
    best_loss: float
    evaluations: int
    seed: int
    learning_rate: float | None = None
    perturbation: float | None = None
    stopped_early: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "QktReport":
        return cls(**data)


def bernoulli(seed: int, stream: int, iteration: int, draw: int, size: int) -> np.ndarray:
    """Symmetric +-1 perturbation from a counter-based stream keyed by the call site."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(stream, iteration, draw))
    rng = np.random.Generator(np.random.Philox(seq))
    return rng.choice((-1.0, 1.0), size=size)


_CALIBRATION, _ITERATION = 0, 1


def _make_spd(hessian: np.ndarray, reg: float) -> np.ndarray:
    """``sqrt(H @ H) + reg * I`` via the eigenvalues of the symmetric ``H``."""
    w, v = np.linalg.eigh(hessian)
    return (v * np.abs(w)) @ v.T + reg * np.eye(len(w))


def spsa_minimize(objective: Callable[[np.ndarray], float], theta0, config: SpsaConfig | None = None,
                  callback: Callable | None = None) -> QktReport:
    """Minimize ``objective`` with (second-order) SPSA; keep the best point seen.

    Each iteration estimates the gradient from two evaluations at
    ``theta +- c_k * delta``; the second-order variant adds two more to estimate
    the Hessian, averages the estimates over iterations, and preconditions the
    step with ``|H| + reg * I``. Gains follow ``a / (k + 1 + A)**0.602`` and
    ``c / (k + 1)**0.101``; with ``learning_rate=None`` ``a`` is calibrated from
    25 perturbation pairs at ``theta0`` so that the first step has length
    ``target_magnitude``.
    """
    config = config or SpsaConfig()
    theta = np.array(theta0, dtype=float).ravel()
    if not np.all(np.isfinite(theta)):
        raise ConfigurationError("theta0 must be finite")
    dim = theta.size
    n_eval = 0
    start = time.monotonic()

    def f(point):
        nonlocal n_eval
        n_eval += 1
        value = float(objective(point))
        if not np.isfinite(value):
            raise FloatingPointError(f"objective returned {value} at theta={point.tolist()}")
        return value

    loss0 = f(theta)
    losses, thetas = [loss0], [theta.tolist()]
    best_loss, best_theta = loss0, theta.copy()
    report = QktReport(losses, thetas, best_theta.tolist(), best_loss, n_eval, config.seed)
    if config.max_iterations == 0:
        return report

    c = 0.2 if config.perturbation is None else config.perturbation
    A = 0.1 * config.max_iterations if config.stability_A is None else config.stability_A
    a = config.learning_rate
    if a is None:
        magnitudes = []
        for s in range(config.calibration_steps):
            delta = bernoulli(config.seed, _CALIBRATION, 0, s, dim)
            magnitudes.append(abs(f(theta + c * delta) - f(theta - c * delta)) / (2 * c))
        avg = float(np.mean(magnitudes))
        a = config.target_magnitude if avg < 1e-10 else config.target_magnitude / avg
        a *= (A + 1) ** config.alpha_exp
    report.learning_rate, report.perturbation = a, c

    hessian = np.zeros((dim, dim))
    for k in range(config.max_iterations):
        if config.budget_seconds is not None and time.monotonic() - start > config.budget_seconds:
            log.info("SPSA budget of %.1fs exhausted after %d iterations", config.budget_seconds, k)
            report.stopped_early = True
            break
        ak = a / (k + 1 + A) ** config.alpha_exp
        ck = c / (k + 1) ** config.gamma_exp
        d1 = bernoulli(config.seed, _ITERATION, k, 0, dim)
        plus, minus = f(theta + ck * d1), f(theta - ck * d1)
        grad = (plus - minus) / (2 * ck) * d1
        step = grad
        if config.second_order:
            d2 = bernoulli(config.seed, _ITERATION, k, 1, dim)
            plus2 = f(theta + ck * (d1 + d2))
            minus2 = f(theta + ck * (-d1 + d2))
            curvature = ((plus2 - plus) - (minus2 - minus)) / (2 * ck**2)
            outer = np.outer(d1, d2)
            estimate = curvature * (outer + outer.T) / 2
            hessian = k / (k + 1) * hessian + estimate / (k + 1)
            spd = _make_spd(hessian, config.hessian_regularization)
            if np.linalg.cond(spd) <= config.max_condition:
                step = np.linalg.solve(spd, grad)
        theta = theta - ak * step
        loss = f(theta)
        losses.append(loss)
        thetas.append(theta.tolist())
        if loss < best_loss:
            best_loss, best_theta = loss, theta.copy()
        if callback is not None:
            callback(k, theta, loss)

    report.best_loss = best_loss
    report.best_theta = best_theta.tolist()
    report.evaluations = n_eval
    return report


def kernel_loss_objective(spec: EmbeddingSpec, X_train, labels, C: float = 1.0):
    """``theta -> svc_loss`` of the fidelity Gram matrix at ``theta``."""
    cache = EmbeddingCache(spec, np.asarray(X_train, dtype=float))

    def objective(theta):
        return svc_loss(cached_gram(cache, theta), labels, C).value

    return objective


def train_quantum_kernel(spec: EmbeddingSpec, X_train, labels, C: float = 1.0,
                         config: SpsaConfig | None = None) -> QktReport:
    """Quantum kernel training from ``theta = 0``."""
    objective = kernel_loss_objective(spec, X_train, labels, C)
    return spsa_minimize(objective, np.zeros(spec.n_params), config)
