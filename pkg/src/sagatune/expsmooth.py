"""Expected smoothness constant of b-nice sampling: exact value and estimates.

The exact constant requires a sum of subset smoothness constants L_B over
every batch containing a given sample, which is only tractable for small
C(n, b); three closed-form curves (simple and Bernstein upper bounds, plus
the practical interpolation) cover the general case.
"""

import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .errors import DimensionError, IntractableError
from .glm import curvature_bound

ENUMERATION_CAP = 1_000_000
_CHUNK = 2048

CURVE_KINDS = ("exact", "simple", "bernstein", "practical")


@dataclass(eq=False)
class SmoothnessCurve:
    """Map b -> expected-smoothness value for one estimator kind."""

    kind: str
    values: dict  # b (int, 1-based batch size) -> float

    def batch_sizes(self):
        return sorted(self.values)


def _check_b(b, n):
    if not 1 <= b <= n:
        raise DimensionError("batch size %d out of range [1, %d]" % (b, n))


def _subset_lambda_max(features, index_chunk):
    """lambda_max of the column Gram for each index row, batched."""
    d = features.shape[0]
    b = index_chunk.shape[1]
    cols = features[:, index_chunk.ravel()].reshape(d, len(index_chunk), b)
    cols = np.ascontiguousarray(cols.transpose(1, 0, 2))  # (chunk, d, b)
    if b <= d:
        grams = np.einsum("cdi,cdj->cij", cols, cols)
    else:
        grams = np.einsum("cdi,cei->cde", cols, cols)
    return np.linalg.eigvalsh(grams)[:, -1]


def exact_expected_smoothness(problem, b, cap=ENUMERATION_CAP):
    """Exact expected smoothness of b-nice sampling by full enumeration.

    Evaluates max_i of the sum of L_B over all batches B of size b that
    contain sample i, divided by C(n-1, b-1).  Raises IntractableError when
    C(n, b) exceeds ``cap``.
    """
    n = problem.n
    _check_b(b, n)
    total = math.comb(n, b)
    if total > cap:
        raise IntractableError(
            "C(%d, %d) = %d subsets exceed the cap %d; "
            "use the simple/Bernstein bounds or the practical estimate"
            % (n, b, total, cap)
        )
    features = problem.dataset.dense_features()
    U = curvature_bound(problem.loss)
    sums = np.zeros(n)
    iterator = combinations(range(n), b)
    while True:
        chunk = np.array(list(islice(iterator, _CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            break
        lam_max = _subset_lambda_max(features, chunk)
        batch_constants = (U / b) * lam_max
        np.add.at(sums, chunk.ravel(), np.repeat(batch_constants, b))
    return float(np.max(sums) / math.comb(n - 1, b - 1))


def simple_bound(profile, b):
    """(n/b)((b-1)/(n-1)) Lbar + (1/b)((n-b)/(n-1)) L_max."""
    n = profile.n
    _check_b(b, n)
    if n == 1:
        return profile.L_max
    return (n / b) * ((b - 1) / (n - 1)) * profile.L_bar + (1.0 / b) * (
        (n - b) / (n - 1)
    ) * profile.L_max


def bernstein_bound(profile, b):
    """2((b-1)/b)(n/(n-1)) L + (1/b)((n-b)/(n-1) + (4/3) log d) L_max."""
    n, d = profile.n, profile.d
    _check_b(b, n)
    if n == 1:
        return (4.0 / 3.0) * math.log(d) * profile.L_max
    return 2.0 * ((b - 1) / b) * (n / (n - 1)) * profile.L_big + (1.0 / b) * (
        (n - b) / (n - 1) + (4.0 / 3.0) * math.log(d)
    ) * profile.L_max


def practical_estimate(profile, b):
    """(n/b)((b-1)/(n-1)) L + (1/b)((n-b)/(n-1)) L_max; tight but not proven."""
    n = profile.n
    _check_b(b, n)
    if n == 1:
        return profile.L_max
    return (n / b) * ((b - 1) / (n - 1)) * profile.L_big + (1.0 / b) * (
        (n - b) / (n - 1)
    ) * profile.L_max


def closed_form_curve(profile, kind, batch_sizes=None):
    """Evaluate one of the closed-form estimators on a grid of batch sizes."""
    if kind == "simple":
        fn = simple_bound
    elif kind == "bernstein":
        fn = bernstein_bound
    elif kind == "practical":
        fn = practical_estimate
    else:
        raise ValueError("kind must be simple, bernstein, or practical")
    if batch_sizes is None:
        batch_sizes = range(1, profile.n + 1)
    return SmoothnessCurve(kind, {int(b): fn(profile, int(b)) for b in batch_sizes})


def exact_curve(problem, batch_sizes=None, cap=ENUMERATION_CAP, skip_intractable=False):
    """Exact curve over a grid of batch sizes.

    With ``skip_intractable=True``, batch sizes whose enumeration exceeds
    the cap are silently omitted instead of raising.
    """
    if batch_sizes is None:
        batch_sizes = range(1, problem.n + 1)
    values = {}
    for b in batch_sizes:
        try:
            values[int(b)] = exact_expected_smoothness(problem, int(b), cap=cap)
        except IntractableError:
            if not skip_intractable:
                raise
    return SmoothnessCurve("exact", values)
