"""Monte-Carlo validation of the matrix Bernstein bound for sampling
without replacement.

For a finite set of centered symmetric matrices with lambda_max(X) <= L,
the expected largest eigenvalue of a sum of m draws without replacement is
bounded by sqrt(2 v log d) + (1/3) L log d, where v is m times the largest
eigenvalue of the mean squared member.  ``bernstein_check`` estimates the
left side empirically and compares.

The module also holds a cyclic Jacobi eigensolver for small symmetric
matrices, used as the independent oracle for the power-iteration and
LAPACK paths elsewhere.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

JACOBI_TOL = 1e-12
_TRIAL_CHUNK = 2048


def jacobi_eigenvalues(matrix, tol=JACOBI_TOL, max_sweeps=100):
    """All eigenvalues of a small symmetric matrix, ascending, via cyclic Jacobi.

    Sweeps rotate every off-diagonal pair to zero until the off-diagonal
    Frobenius mass falls below ``tol`` times the matrix norm.  Intended for
    d <= 16; larger matrices work but LAPACK is the better tool there.
    """
    A = np.array(matrix, dtype=float, copy=True)
    d = A.shape[0]
    if A.shape != (d, d):
        raise ValidationError("matrix must be square")
    if d == 1:
        return A.ravel().copy()
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= tol * scale:
            return np.sort(np.diag(A))
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) <= tol * scale / (d * d):
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (
                    abs(tau) + math.sqrt(1.0 + tau * tau)
                )
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = A[p, p], A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                rows = np.ones(d, dtype=bool)
                rows[[p, q]] = False
                akp = A[rows, p].copy()
                akq = A[rows, q].copy()
                A[rows, p] = A[p, rows] = c * akp - s * akq
                A[rows, q] = A[q, rows] = s * akp + c * akq
    raise NumericalError(
        "Jacobi iteration did not reach tolerance %g in %d sweeps"
        % (tol, max_sweeps),
        estimate=np.sort(np.diag(A)),
    )


def jacobi_lambda_max(matrix, tol=JACOBI_TOL):
    return float(jacobi_eigenvalues(matrix, tol=tol)[-1])


def _lambda_max_one(matrix):
    # Jacobi at desk scale, LAPACK beyond its comfort zone
    if matrix.shape[0] <= 16:
        return jacobi_lambda_max(matrix)
    return float(np.linalg.eigvalsh(matrix)[-1])


@dataclass(eq=False)
class MatrixEnsemble:
    """Finite set of symmetric d x d matrices, usually centered."""

    members: np.ndarray  # shape (m, d, d)
    centered: bool
    L_cap: float

    @property
    def size(self):
        return self.members.shape[0]

    @property
    def dim(self):
        return self.members.shape[1]


def center_ensemble(matrices, symmetry_tol=1e-12):
    """Subtract the set mean from every member and record the new L cap.

    Input matrices must be symmetric to within ``symmetry_tol`` (absolute).
    An input whose members already sum to floating-point zero stays exactly
    centered, which the full-draw identity S_Y = 0 relies on.
    """
    members = np.array(matrices, dtype=float)
    if members.ndim != 3 or members.shape[1] != members.shape[2]:
        raise ValidationError("expected a list of square matrices of equal size")
    if members.shape[0] == 0:
        raise ValidationError("ensemble must be nonempty")
    skew = np.max(np.abs(members - members.transpose(0, 2, 1)))
    if skew > symmetry_tol:
        raise ValidationError(
            "members must be symmetric (max asymmetry %.3g)" % skew
        )
    members = 0.5 * (members + members.transpose(0, 2, 1))
    members -= members.mean(axis=0)
    L_cap = max(_lambda_max_one(member) for member in members)
    return MatrixEnsemble(members=members, centered=True, L_cap=float(L_cap))


def variance_statistic(ensemble, m_draws):
    """m_draws * lambda_max of the average squared member."""
    if not ensemble.centered:
        raise ValidationError("ensemble must be centered")
    if m_draws < 1:
        raise ValidationError("m_draws must be at least 1")
    squares = np.einsum("kij,kjl->kil", ensemble.members, ensemble.members)
    mean_square = squares.mean(axis=0)
    return m_draws * max(_lambda_max_one(mean_square), 0.0)


@dataclass(eq=False)
class BernsteinReport:
    dim: int
    set_size: int
    m_draws: int
    trials: int
    empirical: float
    bound: float
    passed: bool
    std_error: float

    def csv_row(self):
        return "%d,%d,%d,%d,%.17g,%.17g,%s" % (
            self.dim,
            self.set_size,
            self.m_draws,
            self.trials,
            self.empirical,
            self.bound,
            "true" if self.passed else "false",
        )


def bernstein_check(ensemble, m_draws, trials, seed):
    """Monte-Carlo check of the without-replacement Bernstein bound.

    Draws ``m_draws`` members without replacement per trial, averages the
    largest eigenvalue of each sum, and compares against
    sqrt(2 v log d) + (1/3) L log d.  The pass margin allows three standard
    errors of Monte-Carlo noise.
    """
    if not ensemble.centered:
        raise ValidationError("ensemble must be centered")
    m = ensemble.size
    if not 1 <= m_draws <= m:
        raise ValidationError("m_draws must lie in [1, %d]" % m)
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    d = ensemble.dim
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lam_max = np.empty(trials)
    done = 0
    while done < trials:
        chunk = min(_TRIAL_CHUNK, trials - done)
        # uniform subsets without replacement: first m_draws of a random order
        keys = rng.random((chunk, m))
        indices = np.argsort(keys, axis=1)[:, :m_draws]
        sums = ensemble.members[indices].sum(axis=1)
        lam_max[done : done + chunk] = np.linalg.eigvalsh(sums)[:, -1]
        done += chunk
    empirical = float(np.mean(lam_max))
    std = float(np.std(lam_max, ddof=1)) if trials > 1 else 0.0
    std_error = std / math.sqrt(trials)
    v = variance_statistic(ensemble, m_draws)
    log_d = math.log(d)
    bound = math.sqrt(2.0 * v * log_d) + ensemble.L_cap * log_d / 3.0
    return BernsteinReport(
        dim=d,
        set_size=m,
        m_draws=m_draws,
        trials=trials,
        empirical=empirical,
        bound=bound,
        passed=empirical <= bound + 3.0 * std_error,
        std_error=std_error,
    )
