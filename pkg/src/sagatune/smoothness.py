"""Smoothness profile of a regularized GLM: L_i, L_max, Lbar, L, mu.

All constants derive from the Gram spectrum of the feature matrix:
L_i = U ||a_i||^2, L = (U/n) lambda_max(A A^T), and for ridge regression
mu = (U/n) lambda_min(A A^T) + lam.  Extreme Gram eigenvalues are computed
by a deterministic power iteration that never forms the Gram matrix.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, NumericalError, ValidationError
from .glm import curvature_bound

POWER_TOL = 1e-10
POWER_MAX_ITER = 50_000
_START_SEED = 20_240_101  # fixed start vector makes every run reproducible


@dataclass(eq=False)
class SmoothnessProfile:
    """Per-sample and aggregate smoothness constants for one problem."""

    L_list: np.ndarray
    L_max: float
    L_bar: float
    L_big: float
    mu: float
    U: float
    lam: float
    n: int
    d: int

    def csv_row(self):
        values = (self.L_max, self.L_bar, self.L_big, self.mu, self.U, self.lam)
        return "%d,%d," % (self.n, self.d) + ",".join("%.17g" % v for v in values)


def _power_iteration(matvec, size, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Dominant eigenvalue of a PSD operator given by ``matvec``.

    Converged when the residual ||Mx - lam*x|| drops below tol * lam; for a
    symmetric operator the eigenvalue error is at most the residual norm.
    Spectra whose leading eigenvalues nearly tie can exhaust the iteration
    budget, which raises with the last Rayleigh quotient attached.
    """
    rng = np.random.default_rng(_START_SEED)
    x = rng.standard_normal(size)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = matvec(x)
        lam = float(x @ y)
        if np.linalg.norm(y - lam * x) <= tol * max(abs(lam), np.finfo(float).tiny):
            return lam
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            # x is annihilated by a PSD operator, so it sits in the nullspace
            # and the Rayleigh quotient 0 is exact.
            return 0.0
        x = y / norm_y
    raise NumericalError(
        "power iteration did not reach tolerance %g in %d iterations"
        % (tol, max_iter),
        estimate=lam,
    )


def lambda_extreme_gram(A, which):
    """Largest or smallest eigenvalue of A A^T.

    ``max`` runs the power iteration on whichever Gram side is smaller
    (the nonzero spectra of A A^T and A^T A coincide); ``min`` always works
    on A A^T, through the shifted operator c*I - A A^T with c = trace(A A^T).
    """
    if which not in ("max", "min"):
        raise ValidationError("which must be 'max' or 'min'")
    d, n = A.shape
    sparse = sp.issparse(A)

    def gram_d(x):  # x in R^d
        return np.asarray(A @ np.asarray(A.T @ x).ravel()).ravel()

    def gram_n(x):  # x in R^n
        return np.asarray(A.T @ np.asarray(A @ x).ravel()).ravel()

    if which == "max":
        if d <= n:
            return _power_iteration(gram_d, d)
        return _power_iteration(gram_n, n)

    trace = float((A.multiply(A)).sum()) if sparse else float(np.sum(A * A))
    if trace == 0.0:
        return 0.0
    # Shift by lambda_max rather than the trace: the dominant eigenvalue of
    # c*I - A A^T is then c - lambda_min with the best possible separation,
    # where the trace shift stalls whenever the small eigenvalues cluster
    # far below the trace.
    top = _power_iteration(gram_d, d) if d <= n else _power_iteration(gram_n, n)
    if top == 0.0:
        return 0.0
    shifted = _power_iteration(lambda x: top * x - gram_d(x), d)
    return max(top - shifted, 0.0)


def compute_profile(problem):
    """Smoothness profile (L_i, L_max, Lbar, L, mu) of a GLM problem.

    For logistic regression mu is set to lam, the only strong-convexity
    constant available without further assumptions; lam = 0 is rejected.
    """
    features = problem.dataset.features
    n, d = problem.n, problem.d
    U = curvature_bound(problem.loss)
    if sp.issparse(features):
        sq_norms = np.asarray(features.multiply(features).sum(axis=0)).ravel()
    else:
        sq_norms = np.sum(features * features, axis=0)
    L_list = U * sq_norms
    L_max = float(np.max(L_list))
    L_bar = float(np.mean(L_list))
    L_big = (U / n) * lambda_extreme_gram(features, "max")
    if problem.loss == "ridge":
        mu = (U / n) * lambda_extreme_gram(features, "min") + problem.lam
    else:
        if problem.lam == 0.0:
            raise ValidationError(
                "strong convexity unavailable: logistic loss needs lambda > 0"
            )
        mu = problem.lam
    return SmoothnessProfile(
        L_list=L_list,
        L_max=L_max,
        L_bar=L_bar,
        L_big=float(L_big),
        mu=float(mu),
        U=U,
        lam=problem.lam,
        n=n,
        d=d,
    )


def subset_smoothness(problem, batch):
    """Smoothness constant L_B = (U/|B|) lambda_max(A_B A_B^T) of one batch."""
    batch = np.asarray(batch, dtype=np.int64).ravel()
    if batch.size == 0:
        raise DimensionError("batch must be nonempty")
    if np.any(batch < 0) or np.any(batch >= problem.n):
        raise DimensionError("batch indices out of range [0, %d)" % problem.n)
    if np.unique(batch).size != batch.size:
        raise DimensionError("batch contains duplicate indices")
    U = curvature_bound(problem.loss)
    columns = problem.dataset.features[:, batch]
    return (U / batch.size) * lambda_extreme_gram(columns, "max")
