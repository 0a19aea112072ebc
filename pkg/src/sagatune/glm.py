"""Losses and gradients for quadratically regularized GLMs.

The objective is f(w) = (1/n) sum_i phi_i(a_i^T w) + (lam/2) ||w||^2 with
phi_i(z) = (z - y_i)^2 / 2 for ridge regression and
phi_i(z) = log(1 + exp(-y_i z)) for logistic regression.  The regularizer
is folded into every f_i, so per-sample gradients carry the lam*w term.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DimensionError, ValidationError

LOSSES = ("ridge", "logistic")


@dataclass(eq=False)
class GLMProblem:
    """A dataset together with a loss kind and regularization strength."""

    dataset: Dataset
    loss: str
    lam: float = 0.0

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValidationError("unknown loss %r" % (self.loss,))
        if self.lam < 0:
            raise ValidationError("lambda must be nonnegative")
        if self.loss == "logistic":
            labels = self.dataset.labels
            if not np.all(np.abs(labels) == 1.0):
                raise ValidationError("logistic loss requires labels in {-1, +1}")

    @property
    def n(self):
        return self.dataset.n

    @property
    def d(self):
        return self.dataset.d


def log1pexp(t):
    """log(1 + exp(t)) computed as max(t, 0) + log1p(exp(-|t|))."""
    t = np.asarray(t, dtype=float)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def margins(problem, w):
    """All inner products a_i^T w as a length-n vector."""
    w = np.asarray(w, dtype=float)
    if w.shape != (problem.d,):
        raise DimensionError(
            "w has shape %s, expected (%d,)" % (w.shape, problem.d)
        )
    return np.asarray(problem.dataset.features.T @ w).ravel()


def phi_values(problem, z):
    y = problem.dataset.labels
    if problem.loss == "ridge":
        return 0.5 * (z - y) ** 2
    return log1pexp(-y * z)


def phi_prime(problem, z, indices=None):
    """phi_i'(z_i) per sample: z - y for ridge, -y*sigmoid(-y*z) for logistic.

    ``indices`` restricts the label vector to a batch (z must align).
    """
    y = problem.dataset.labels
    if indices is not None:
        y = y[indices]
    if problem.loss == "ridge":
        return z - y
    # -y / (1 + exp(y z)), evaluated without overflow
    t = y * z
    return -y * np.exp(-log1pexp(t))


def loss_value(problem, w):
    """f(w) = (1/n) sum_i phi_i(a_i^T w) + (lam/2) ||w||^2."""
    w = np.asarray(w, dtype=float)
    z = margins(problem, w)
    return float(np.mean(phi_values(problem, z)) + 0.5 * problem.lam * (w @ w))


def sample_gradient(problem, i, w):
    """Gradient of f_i: phi_i'(a_i^T w) a_i + lam w."""
    if not 0 <= i < problem.n:
        raise DimensionError("sample index %d out of range [0, %d)" % (i, problem.n))
    w = np.asarray(w, dtype=float)
    a = problem.dataset.column(i)
    if w.shape != a.shape:
        raise DimensionError("w has shape %s, expected (%d,)" % (w.shape, problem.d))
    z = float(a @ w)
    y = problem.dataset.labels[i : i + 1]
    if problem.loss == "ridge":
        slope = z - y[0]
    else:
        slope = float(-y[0] * np.exp(-log1pexp(y[0] * z)))
    return slope * a + problem.lam * w


def full_gradient(problem, w):
    """(1/n) sum_i grad f_i(w), accumulated in one matrix product."""
    w = np.asarray(w, dtype=float)
    z = margins(problem, w)
    slopes = phi_prime(problem, z)
    grad = np.asarray(problem.dataset.features @ slopes).ravel() / problem.n
    return grad + problem.lam * w


def curvature_bound(loss):
    """Uniform bound U on phi'' over the real line: 1 for ridge, 1/4 for logistic."""
    if loss == "ridge":
        return 1.0
    if loss == "logistic":
        return 0.25
    raise ValidationError("unknown loss %r" % (loss,))
