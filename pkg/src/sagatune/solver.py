"""Mini-batch SAGA with b-nice sampling.

Each iteration draws a uniform size-b subset, forms the variance-reduced
gradient estimate g = u + (1/b) sum_{i in B} (grad f_i(w) - J_:i), refreshes
the touched Jacobian columns, updates the running average u, and steps
w <- w - gamma g.

For GLMs the Jacobian column of sample i is phi_i'(a_i^T w_snap) * a_i plus
the regularizer term.  The regularizer gradient lam*w is deterministic, so
both storage modes track only the phi part (one scalar per sample) and add
lam*w to g analytically; ``dense`` mode additionally materializes the phi
Jacobian matrix so the column-mean consistency of u can be verified.  The
two modes therefore produce identical iterates.
"""

import math
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import expsmooth, tuning
from .errors import (
    DimensionError,
    IntractableError,
    NumericalError,
    ValidationError,
)
from .glm import full_gradient, loss_value, phi_prime, sample_gradient
from .smoothness import compute_profile

GAMMA_POLICIES = ("practical", "simple", "bernstein", "exact", "defazio", "hofmann")
JACOBIAN_MODES = ("compact", "dense")
STATUS_CONVERGED = "converged"
STATUS_EPOCH_BUDGET = "epoch_budget"
STATUS_DIVERGED = "diverged"

DIVERGENCE_FACTOR = 1e12
CONSISTENCY_RTOL = 1e-8
REFERENCE_TOL = 1e-12
REFERENCE_MAX_ITER = 1_000_000


def run_rng(seed, run_id=0):
    """Independent PCG64 stream for run ``run_id`` of a seeded experiment."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(run_id,))
    )


def bnice_sample(rng, n, b):
    """Uniform size-b subset of range(n) by partial Fisher-Yates, sorted."""
    if not 1 <= b <= n:
        raise DimensionError("batch size %d out of range [1, %d]" % (b, n))
    pool = np.arange(n)
    swaps = rng.integers(np.arange(b), n)
    for k in range(b):
        j = swaps[k]
        pool[k], pool[j] = pool[j], pool[k]
    return np.sort(pool[:b])


@dataclass(eq=False)
class SolverConfig:
    b: int = 1
    gamma: object = "practical"  # policy name or a fixed positive float
    max_epochs: int = 500
    tol: float = 1e-4
    seed: int = 0
    jacobian_mode: str = "compact"
    eval_period: int = 1
    exact_cap: int = expsmooth.ENUMERATION_CAP

    def __post_init__(self):
        if self.b < 1:
            raise ValidationError("batch size must be positive")
        if isinstance(self.gamma, str):
            if self.gamma not in GAMMA_POLICIES:
                raise ValidationError("unknown step size policy %r" % self.gamma)
        elif not self.gamma > 0:
            raise ValidationError("fixed step size must be positive")
        if not 0.0 < self.tol < 1.0:
            raise ValidationError("tol must lie in (0, 1)")
        if self.jacobian_mode not in JACOBIAN_MODES:
            raise ValidationError("jacobian_mode must be 'compact' or 'dense'")
        if self.eval_period < 1:
            raise ValidationError("eval_period must be at least 1")


@dataclass(eq=False)
class SolverState:
    w: np.ndarray
    phi_scalars: np.ndarray  # phi_i'(a_i^T w_snap_i), one per sample
    u: np.ndarray  # running column mean of the phi Jacobian
    J: object = None  # dense (d, n) phi Jacobian, or None in compact mode
    k: int = 0
    grad_evals: int = 0
    diverged: bool = False

    def copy(self):
        return SolverState(
            w=self.w.copy(),
            phi_scalars=self.phi_scalars.copy(),
            u=self.u.copy(),
            J=None if self.J is None else self.J.copy(),
            k=self.k,
            grad_evals=self.grad_evals,
            diverged=self.diverged,
        )

    def gradient_estimate_mean(self, problem):
        """Column mean of the (implied) phi Jacobian."""
        if self.J is not None:
            return self.J.mean(axis=1)
        return (
            np.asarray(problem.dataset.features @ self.phi_scalars).ravel()
            / problem.n
        )

    def consistency_error(self, problem):
        """Relative deviation between u and the Jacobian column mean."""
        mean = self.gradient_estimate_mean(problem)
        scale = max(float(np.max(np.abs(mean))), 1.0)
        return float(np.max(np.abs(self.u - mean))) / scale


def initial_state(problem, jacobian_mode="compact"):
    """Zero iterate, zero Jacobian estimate (hence zero running average)."""
    d, n = problem.d, problem.n
    J = np.zeros((d, n)) if jacobian_mode == "dense" else None
    return SolverState(w=np.zeros(d), phi_scalars=np.zeros(n), u=np.zeros(d), J=J)


def saga_step(problem, state, batch, gamma):
    """One SAGA update for the given batch; mutates and returns ``state``."""
    batch = np.asarray(batch, dtype=np.int64)
    b = batch.size
    features = problem.dataset.features
    cols = features[:, batch]
    z = np.asarray(cols.T @ state.w).ravel()
    slopes = phi_prime(problem, z, indices=batch)
    aux = np.asarray(cols @ (slopes - state.phi_scalars[batch])).ravel()
    g = state.u + aux / b + problem.lam * state.w
    if not np.all(np.isfinite(g)):
        state.diverged = True
        return state
    state.u = state.u + aux / problem.n
    state.phi_scalars[batch] = slopes
    if state.J is not None:
        dense_cols = cols.toarray() if hasattr(cols, "toarray") else cols
        state.J[:, batch] = dense_cols * slopes
    state.w = state.w - gamma * g
    state.k += 1
    state.grad_evals += b
    return state


@dataclass(eq=False)
class TraceRecord:
    epoch: int
    rel_subopt: float
    grad_evals: int
    seconds: float


@dataclass(eq=False)
class Trace:
    records: list = field(default_factory=list)
    status: str = STATUS_EPOCH_BUDGET
    b: int = 0
    gamma: float = 0.0
    grad_evals: int = 0
    final_rel_subopt: float = math.inf
    final_w: object = None

    def csv_rows(self):
        return [
            "%d,%.17g,%d,%.17g" % (r.epoch, r.rel_subopt, r.grad_evals, r.seconds)
            for r in self.records
        ]


def resolve_step_size(problem, cfg, profile=None):
    """Turn a step size policy into a number for batch size ``cfg.b``."""
    if not isinstance(cfg.gamma, str):
        return float(cfg.gamma)
    if profile is None:
        profile = compute_profile(problem)
    b = cfg.b
    policy = cfg.gamma
    if policy == "practical":
        return tuning.step_size(expsmooth.practical_estimate(profile, b), profile, b)
    if policy == "simple":
        return tuning.step_size(expsmooth.simple_bound(profile, b), profile, b)
    if policy == "bernstein":
        return tuning.step_size(expsmooth.bernstein_bound(profile, b), profile, b)
    if policy == "exact":
        cl = expsmooth.exact_expected_smoothness(problem, b, cap=cfg.exact_cap)
        return tuning.step_size(cl, profile, b)
    if policy == "defazio":
        return tuning.defazio_step_size(profile)
    if policy == "hofmann":
        return tuning.hofmann_step_size(profile, b)
    raise ValidationError("unknown step size policy %r" % policy)


def run_saga(problem, cfg, ref, run_id=0, profile=None):
    """Run SAGA until the relative suboptimality target or a budget is hit.

    ``ref`` is (w_star, f_star) or a ReferenceSolution; suboptimality is
    measured as (f(w) - f_star) / (f(w0) - f_star) at epoch boundaries,
    one epoch being ceil(n/b) iterations.
    """
    n = problem.n
    if cfg.b > n:
        raise DimensionError("batch size %d exceeds n=%d" % (cfg.b, n))
    f_star = ref.f_value if isinstance(ref, ReferenceSolution) else float(ref[1])
    gamma = resolve_step_size(problem, cfg, profile=profile)
    rng = run_rng(cfg.seed, run_id)
    state = initial_state(problem, cfg.jacobian_mode)

    f0 = loss_value(problem, state.w)
    gap0 = f0 - f_star
    start = time.perf_counter()
    trace = Trace(b=cfg.b, gamma=gamma)
    trace.records.append(TraceRecord(0, 1.0, 0, 0.0))
    if gap0 <= 0.0:
        trace.status = STATUS_CONVERGED
        trace.final_rel_subopt = 0.0
        return trace

    iters_per_epoch = -(-n // cfg.b)
    status = STATUS_EPOCH_BUDGET
    rel = 1.0
    for epoch in range(1, cfg.max_epochs + 1):
        for _ in range(iters_per_epoch):
            batch = bnice_sample(rng, n, cfg.b)
            saga_step(problem, state, batch, gamma)
            if state.diverged:
                break
        if state.diverged:
            status = STATUS_DIVERGED
            break
        if epoch % cfg.eval_period == 0 or epoch == cfg.max_epochs:
            f = loss_value(problem, state.w)
            rel = (f - f_star) / gap0
            trace.records.append(
                TraceRecord(
                    epoch, rel, state.grad_evals, time.perf_counter() - start
                )
            )
            error = state.consistency_error(problem)
            if error > CONSISTENCY_RTOL:
                raise NumericalError(
                    "running average drifted from the Jacobian mean "
                    "(relative error %.3g)" % error,
                    estimate=error,
                )
            if not math.isfinite(f) or f > DIVERGENCE_FACTOR * max(f0, 1e-300):
                status = STATUS_DIVERGED
                break
            if rel <= cfg.tol:
                status = STATUS_CONVERGED
                break
    trace.status = status
    trace.grad_evals = state.grad_evals
    trace.final_rel_subopt = rel
    trace.final_w = state.w
    return trace


@dataclass(eq=False)
class ReferenceSolution:
    w: np.ndarray
    f_value: float
    grad_inf_norm: float
    iterations: int
    converged: bool


def compute_reference_solution(problem, tol=REFERENCE_TOL, max_iter=REFERENCE_MAX_ITER):
    """High-precision minimizer by full gradient descent with step 1/(L+lam).

    Stops once the gradient sup-norm falls below ``tol``; if the iteration
    budget runs out first the best iterate is still returned, flagged
    unconverged.
    """
    profile = compute_profile(problem)
    step = 1.0 / (profile.L_big + problem.lam)
    w = np.zeros(problem.d)
    grad = full_gradient(problem, w)
    iterations = 0
    while np.max(np.abs(grad)) > tol and iterations < max_iter:
        w = w - step * grad
        grad = full_gradient(problem, w)
        iterations += 1
    grad_norm = float(np.max(np.abs(grad)))
    return ReferenceSolution(
        w=w,
        f_value=loss_value(problem, w),
        grad_inf_norm=grad_norm,
        iterations=iterations,
        converged=grad_norm <= tol,
    )


def unbiasedness_check(problem, w, J, b, cap=10_000):
    """Sup-norm gap between the batch-averaged estimate and the true gradient.

    Enumerates every size-b batch, forms g = u + (1/b) sum (grad f_i - J_:i)
    with u the column mean of J, and averages uniformly.  The result should
    vanish to rounding for any Jacobian estimate J.
    """
    n = problem.n
    if not 1 <= b <= n:
        raise DimensionError("batch size %d out of range [1, %d]" % (b, n))
    total = math.comb(n, b)
    if total > cap:
        raise IntractableError(
            "C(%d, %d) = %d batches exceed the cap %d" % (n, b, total, cap)
        )
    J = np.asarray(J, dtype=float)
    if J.shape != (problem.d, n):
        raise DimensionError("J must have shape (%d, %d)" % (problem.d, n))
    gradients = np.column_stack(
        [sample_gradient(problem, i, w) for i in range(n)]
    )
    corrections = gradients - J
    u = J.mean(axis=1)
    accumulator = np.zeros(problem.d)
    for batch in combinations(range(n), b):
        accumulator += u + corrections[:, batch].mean(axis=1)
    mean_estimate = accumulator / total
    return float(np.max(np.abs(mean_estimate - full_gradient(problem, w))))
