"""Ridge and logistic regression on random features, plus an exact-kernel
ridge baseline and evaluation metrics (accuracy, R-squared, expected
calibration error).

Solvers are dense direct methods at desk scale. Multiclass classification is
handled with one-hot columns for ridge and softmax cross-entropy for
logistic regression.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .features import FeatureMatrix, FeatureOperator, featurize
from .kernels import KernelSpec, kernel_matrix

__all__ = [
    "LinearModel",
    "ExactKernelModel",
    "LogisticOptions",
    "fit_krr_exact",
    "fit_ridge_features",
    "fit_logistic_features",
    "one_hot",
    "clip_renormalize",
    "softmax",
    "expected_calibration_error",
    "r_squared",
    "evaluate",
]

DESK_SCALE_CAP = 20_000


def one_hot(labels: np.ndarray, n_classes: int | None = None) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.dtype.kind not in "iu":
        raise ValueError("labels must be integers")
    n_classes = int(labels.max()) + 1 if n_classes is None else n_classes
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError("labels out of range")
    out = np.zeros((labels.shape[0], n_classes))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def clip_renormalize(scores: np.ndarray) -> np.ndarray:
    """Map raw one-hot regression outputs to probabilities.

    Clip to [0, 1] and renormalize rows; rows that clip to zero fall back to
    the uniform distribution.
    """
    p = np.clip(scores, 0.0, 1.0)
    s = p.sum(axis=1, keepdims=True)
    uniform = np.full_like(p, 1.0 / p.shape[1])
    return np.where(s > 0.0, p / np.where(s > 0.0, s, 1.0), uniform)


@dataclass
class LinearModel:
    """Feature-space linear model; one weight column per output."""

    theta: np.ndarray           # (2p, n_outputs)
    lam: float
    operator: FeatureOperator | None = None
    link: str = "identity"      # "identity" (ridge) | "softmax" (logistic)
    converged: bool = True
    grad_norm: float = 0.0

    def decision_function(self, data: FeatureMatrix | np.ndarray) -> np.ndarray:
        phi = self._phi(data)
        return phi @ self.theta

    def predict_proba(self, data) -> np.ndarray:
        scores = self.decision_function(data)
        if self.link == "softmax":
            return softmax(scores)
        return clip_renormalize(scores)

    def predict_labels(self, data) -> np.ndarray:
        return self.decision_function(data).argmax(axis=1)

    def _phi(self, data) -> np.ndarray:
        if isinstance(data, FeatureMatrix):
            return data.phi
        if self.operator is None:
            raise ValueError("raw inputs require the model to carry its operator")
        return featurize(self.operator, data).phi


@dataclass
class ExactKernelModel:
    """Kernel machine sum_i alpha_i K(x, x_i) with coefficient columns per output."""

    alphas: np.ndarray          # (n_train, n_outputs)
    X_train: np.ndarray
    spec: KernelSpec
    lam: float

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return kernel_matrix(self.spec, np.asarray(X, dtype=float), self.X_train) @ self.alphas

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return clip_renormalize(self.decision_function(X))

    def predict_labels(self, X: np.ndarray) -> np.ndarray:
        return self.decision_function(X).argmax(axis=1)


def _as_targets(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    return Y[:, None] if Y.ndim == 1 else Y


def fit_krr_exact(spec: KernelSpec, X: np.ndarray, Y: np.ndarray,
                  lam: float) -> ExactKernelModel:
    """Solve (K + lam I) A = Y by Cholesky factorization.

    Y may be real targets (regression) or an n x C one-hot matrix.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] > DESK_SCALE_CAP:
        raise ValueError(f"n={X.shape[0]} exceeds the desk-scale cap {DESK_SCALE_CAP}")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    Y = _as_targets(Y)
    K = kernel_matrix(spec, X)
    A = K + lam * np.eye(K.shape[0])
    try:
        factor = cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"K + lambda*I is numerically singular ({exc}); use lambda > 0") from exc
    alphas = cho_solve(factor, Y)
    return ExactKernelModel(alphas=alphas, X_train=X, spec=spec, lam=lam)


def fit_ridge_features(phi: FeatureMatrix, Y: np.ndarray, lam: float,
                       operator: FeatureOperator | None = None) -> LinearModel:
    """Ridge regression in feature space: theta = (Phi^T Phi + lam I)^{-1} Phi^T Y.

    When the feature dimension exceeds n the algebraically equivalent dual
    form theta = Phi^T (Phi Phi^T + lam I)^{-1} Y is solved instead, which is
    both cheaper and avoids materializing the 2p x 2p normal matrix.
    """
    P = phi.phi
    Y = _as_targets(Y)
    n, m = P.shape
    try:
        if m <= n or lam == 0.0:
            A = P.T @ P + lam * np.eye(m)
            theta = cho_solve(cho_factor(A, lower=True), P.T @ Y)
        else:
            A = P @ P.T + lam * np.eye(n)
            theta = P.T @ cho_solve(cho_factor(A, lower=True), Y)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"normal equations are singular ({exc}); use lambda > 0") from exc
    return LinearModel(theta=theta, lam=lam, operator=operator, link="identity")


@dataclass
class LogisticOptions:
    tol: float = 1e-6
    max_iter: int = 5000
    init_step: float = 1.0
    backtrack: float = 0.5
    armijo: float = 1e-4


def _logistic_objective(theta: np.ndarray, P: np.ndarray, Yoh: np.ndarray,
                        lam: float) -> tuple[float, np.ndarray]:
    n = P.shape[0]
    scores = P @ theta
    scores -= scores.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(scores).sum(axis=1))
    ce = (log_z - (scores * Yoh).sum(axis=1)).mean()
    obj = ce + 0.5 * lam * float((theta * theta).sum())
    probs = softmax(scores)
    grad = P.T @ (probs - Yoh) / n + lam * theta
    return obj, grad


def fit_logistic_features(phi: FeatureMatrix, labels: np.ndarray, lam: float,
                          opts: LogisticOptions | None = None,
                          operator: FeatureOperator | None = None) -> LinearModel:
    """Softmax cross-entropy + (lam/2)||theta||^2 by gradient descent with
    backtracking line search.

    Stops when the gradient norm drops below ``opts.tol`` or after
    ``opts.max_iter`` iterations (the latter issues a warning and marks the
    model as not converged).
    """
    opts = opts or LogisticOptions()
    P = phi.phi
    labels = np.asarray(labels)
    Yoh = one_hot(labels)
    theta = np.zeros((P.shape[1], Yoh.shape[1]))
    obj, grad = _logistic_objective(theta, P, Yoh, lam)
    step = opts.init_step
    converged = False
    for _ in range(opts.max_iter):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < opts.tol:
            converged = True
            break
        # backtracking with a mildly optimistic restart between iterations
        step = min(step * 2.0, 1e6)
        gsq = gnorm * gnorm
        while True:
            cand = theta - step * grad
            cand_obj, cand_grad = _logistic_objective(cand, P, Yoh, lam)
            if cand_obj <= obj - opts.armijo * step * gsq or step < 1e-16:
                break
            step *= opts.backtrack
        theta, obj, grad = cand, cand_obj, cand_grad
    gnorm = float(np.linalg.norm(grad))
    if not converged and gnorm >= opts.tol:
        warnings.warn(
            f"logistic fit stopped at max_iter={opts.max_iter} with gradient "
            f"norm {gnorm:.3e}", RuntimeWarning)
    return LinearModel(theta=theta, lam=lam, operator=operator, link="softmax",
                       converged=converged or gnorm < opts.tol, grad_norm=gnorm)


def expected_calibration_error(probs: np.ndarray, labels: np.ndarray,
                               n_bins: int = 15) -> float:
    """Binned ECE on the max-class probability with equal-width bins."""
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels)
    conf = probs.max(axis=1)
    pred = probs.argmax(axis=1)
    correct = (pred == labels).astype(float)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    idx = np.clip(np.digitize(conf, edges[1:-1]), 0, n_bins - 1)
    n = conf.shape[0]
    ece = 0.0
    for b in range(n_bins):
        mask = idx == b
        cnt = int(mask.sum())
        if cnt == 0:
            continue
        ece += (cnt / n) * abs(correct[mask].mean() - conf[mask].mean())
    return float(ece)


def r_squared(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    sst = float(((y_true - y_true.mean()) ** 2).sum())
    if sst == 0.0:
        raise ValueError("R^2 is undefined for constant targets")
    sse = float(((y_true - y_pred) ** 2).sum())
    return 1.0 - sse / sst


def evaluate(model, inputs, y_test: np.ndarray, task: str,
             n_bins: int = 15) -> dict:
    """Metrics record: accuracy + ECE for classification, R^2 for regression.

    ``inputs`` is whatever the model consumes: a FeatureMatrix (or raw X if
    the model carries its operator) for feature models, raw X for exact
    kernel models.
    """
    y_test = np.asarray(y_test)
    if task == "classification":
        pred = model.predict_labels(inputs)
        probs = model.predict_proba(inputs)
        return {
            "accuracy": float((pred == y_test).mean()),
            "ece": expected_calibration_error(probs, y_test, n_bins=n_bins),
        }
    if task == "regression":
        scores = model.decision_function(inputs)
        return {"r2": r_squared(y_test, scores[:, 0] if scores.ndim == 2 else scores)}
    raise ValueError(f"unknown task {task!r}")
