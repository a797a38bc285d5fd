"""Kernel SVM on precomputed Gram matrices, and a logistic-regression baseline."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

log = logging.getLogger(__name__)

# curvature floor for degenerate pairs (identical points): the step then runs to a box bound
TAU = 1e-12


@dataclass(frozen=True, eq=False)
class SvmModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    C: float
    objective: float
    n_iter: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    @property
    def dual_coef(self) -> np.ndarray:
        return self.alphas * self.labels


@dataclass(frozen=True, eq=False)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    l2_strength: float
    n_iter: int = 0

    def decision(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.weights + self.intercept

    def predict(self, X) -> np.ndarray:
        return sign_labels(self.decision(X))


@dataclass(frozen=True, eq=False)
class EvalResult:
    accuracy: float
    predictions: np.ndarray


def _check_labels(labels) -> np.ndarray:
    y = np.asarray(labels, dtype=float).ravel()
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ConfigurationError("labels must be -1/+1")
    if np.all(y == y[0]):
        raise ConfigurationError("both classes must be present")
    return y


def sign_labels(values) -> np.ndarray:
    """Sign with ties broken towards +1."""
    return np.where(np.asarray(values) >= 0, 1, -1)


def dual_objective(alphas, gram, labels) -> float:
    """``sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij``."""
    ay = np.asarray(alphas) * np.asarray(labels)
    return float(np.sum(alphas) - 0.5 * ay @ np.asarray(gram, dtype=float) @ ay)


def solve_svm_dual(gram, labels, C: float = 1.0, tol: float = 1e-3, max_iter: int | None = None,
                   psd_tol: float = 1e-8, second_order: bool = True) -> SvmModel:
    """Solve the soft-margin SVM dual by SMO with maximal-violating-pair selection.

    Parameters
    ----------
    gram : (m, m) array_like
        Symmetric PSD kernel matrix of the training points.
    labels : (m,) array_like of -1/+1
    C : float
        Box constraint.
    tol : float
        Stop once the maximal KKT violation drops below ``tol``.
    max_iter : int, optional
        Cap on pair updates; defaults to ``10 * m**2``.
    """
    K = np.asarray(gram, dtype=float)
    y = _check_labels(labels)
    m = len(y)
    if K.shape != (m, m):
        raise ValueError(f"gram shape {K.shape} does not match {m} labels")
    if not C > 0:
        raise ConfigurationError(f"C must be positive, got {C}")
    if m <= 200:
        min_eig = np.linalg.eigvalsh(0.5 * (K + K.T)).min()
        if min_eig < -psd_tol:
            warnings.warn(f"Gram matrix is not PSD (min eigenvalue {min_eig:.3g})", RuntimeWarning)
    if max_iter is None:
        max_iter = 10 * m * m

    diag = np.diag(K).copy()
    alpha = np.zeros(m)
    grad = -np.ones(m)  # gradient of 1/2 a'Qa - e'a, with Q = yy' * K
    pos = y > 0
    n_iter = 0
    while n_iter < max_iter:
        score = -y * grad
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        if not up.any() or not low.any():
            break
        i = np.flatnonzero(up)[np.argmax(score[up])]
        if score[i] - score[low].min() < tol:
            break
        if second_order:
            # partner maximizing the guaranteed objective gain gap**2 / curvature
            cand = np.flatnonzero(low & (score < score[i]))
            gaps = score[i] - score[cand]
            curvs = np.maximum(diag[i] + diag[cand] - 2.0 * K[i, cand], TAU)
            j = cand[np.argmax(gaps * gaps / curvs)]
        else:
            j = np.flatnonzero(low)[np.argmin(score[low])]
        gap = score[i] - score[j]
        curv = diag[i] + diag[j] - 2.0 * K[i, j]
        step = gap / max(curv, TAU)
        # alpha_i += y_i * step, alpha_j -= y_j * step
        bound_i = C - alpha[i] if pos[i] else alpha[i]
        bound_j = alpha[j] if pos[j] else C - alpha[j]
        step = min(step, bound_i, bound_j)
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for t, hit in ((i, step == bound_i), (j, step == bound_j)):
            if hit or alpha[t] < 0 or alpha[t] > C:
                alpha[t] = 0.0 if abs(alpha[t]) <= abs(alpha[t] - C) else C
        grad += step * y * (K[:, i] - K[:, j])
        n_iter += 1
    else:
        log.warning("SMO hit the iteration cap (%d) before reaching tol=%g", max_iter, tol)

    bias = _bias(alpha, grad, y, C)
    return SvmModel(alpha, bias, y.astype(int), float(C), dual_objective(alpha, K, y), n_iter)


def _bias(alpha, grad, y, C) -> float:
    score = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(score[free].mean())
    pos = y > 0
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    lower = score[up & ~low].max() if (up & ~low).any() else score.min()
    upper = score[low & ~up].min() if (low & ~up).any() else score.max()
    return float(0.5 * (lower + upper))


def svm_decision(model: SvmModel, cross_gram) -> np.ndarray:
    """Decision values for evaluation points; ``cross_gram[i, t] = K(x_i, z_t)``."""
    K = np.asarray(cross_gram, dtype=float)
    if K.ndim != 2 or K.shape[0] != len(model.alphas):
        raise ValueError(
            f"cross gram must have shape (n_train={len(model.alphas)}, n_eval), got {K.shape}"
        )
    return model.dual_coef @ K + model.bias


def svm_predict(model: SvmModel, cross_gram) -> np.ndarray:
    return sign_labels(svm_decision(model, cross_gram))


def _logistic_loss(w, b, X, y, lam):
    margins = y * (X @ w + b)
    loss = np.logaddexp(0.0, -margins).sum() + 0.5 * lam * w @ w
    # d/dm log(1 + e^-m) = -sigmoid(-m)
    s = -y * np.exp(-np.logaddexp(0.0, margins))
    return loss, X.T @ s + lam * w, s.sum()


def fit_logistic(X, labels, l2_strength: float = 1.0, gtol: float = 1e-6,
                 max_iter: int = 1000) -> LogisticModel:
    """L2-regularized logistic regression by gradient descent with backtracking.

    Minimizes ``sum log(1 + exp(-y (Xw + b))) + l2_strength/2 * |w|^2``; the
    intercept is not penalized. Trial steps start from the Barzilai-Borwein
    length and are halved until the Armijo condition holds.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = _check_labels(labels)
    w, b = np.zeros(X.shape[1]), 0.0
    loss, gw, gb = _logistic_loss(w, b, X, y, l2_strength)
    step = 1.0 / (0.25 * (np.linalg.norm(X, 2) ** 2 + len(y)) + l2_strength)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        g = np.append(gw, gb)
        if np.max(np.abs(g)) < gtol:
            break
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            new_loss, new_gw, new_gb = _logistic_loss(w_new, b_new, X, y, l2_strength)
            if new_loss <= loss - 1e-4 * step * (g @ g) or step < 1e-16:
                break
            step *= 0.5
        s = np.append(w_new - w, b_new - b)
        d = np.append(new_gw, new_gb) - g
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        sd = s @ d
        step = (s @ s) / sd if sd > 0 else 2 * step
    return LogisticModel(w, float(b), float(l2_strength), n_iter)


def evaluate(predictions, truth) -> EvalResult:
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape:
        raise ValueError(f"length mismatch: {predictions.shape} vs {truth.shape}")
    return EvalResult(float(np.mean(predictions == truth)), predictions)
