"""Step sizes, iteration/total complexity, and optimal mini-batch sizes.

Everything here is closed-form arithmetic on a smoothness profile.  The
default precision target is epsilon = e^-1 so that log(1/epsilon) = 1 and
complexity values equal the bracketed max term.
"""

import math

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_EPSILON = math.exp(-1.0)


def _check_b(b, n):
    if not 1 <= b <= n:
        raise DimensionError("batch size %d out of range [1, %d]" % (b, n))


def _residual_fraction(n, b):
    # (n - b)/(n - 1), with the removable singularity at n = 1 set to 0
    return (n - b) / (n - 1) if n > 1 else 0.0


def step_size(cl, profile, b):
    """Safe step size for a given expected-smoothness value ``cl``.

    gamma = (1/4) / max{cl + lam,
                        (1/b)((n-b)/(n-1))(L_max + lam) + (mu/4)(n/b)}.
    """
    if cl <= 0:
        raise ValidationError("expected smoothness value must be positive")
    n = profile.n
    _check_b(b, n)
    second = (1.0 / b) * _residual_fraction(n, b) * (
        profile.L_max + profile.lam
    ) + 0.25 * profile.mu * n / b
    return 0.25 / max(cl + profile.lam, second)


def hofmann_step_size(profile, b):
    """gamma = K / (2 L_max (1 + K + sqrt(1 + K^2))) with K = 4 b L_max/(n mu)."""
    _check_b(b, profile.n)
    K = 4.0 * b * profile.L_max / (profile.n * profile.mu)
    return K / (2.0 * profile.L_max * (1.0 + K + math.sqrt(1.0 + K * K)))


def defazio_step_size(profile):
    """Single-sample SAGA step size 1 / (3 (n mu + L_max))."""
    return 1.0 / (3.0 * (profile.n * profile.mu + profile.L_max))


def complexity(cl, profile, b, epsilon=DEFAULT_EPSILON):
    """Iteration and total complexity for a given expected-smoothness value.

    K_iter = max{4(cl + lam)/mu, n/b + ((n-b)/(n-1)) 4(L_max + lam)/(b mu)}
             * log(1/epsilon), and K_total = b * K_iter.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("epsilon must lie in (0, 1)")
    n = profile.n
    _check_b(b, n)
    first = 4.0 * (cl + profile.lam) / profile.mu
    second = n / b + _residual_fraction(n, b) * 4.0 * (
        profile.L_max + profile.lam
    ) / (b * profile.mu)
    k_iter = max(first, second) * math.log(1.0 / epsilon)
    return k_iter, b * k_iter


def complexity_components(profile, b, which):
    """The affine pieces (g, h) whose max bounds the total complexity.

    ``g`` carries the estimator-specific branch (``simple`` or
    ``bernstein``); ``h`` is shared and decreases linearly from
    n + 4(L_max + lam)/mu at b = 1 down to n at b = n.
    """
    n, d = profile.n, profile.d
    _check_b(b, n)
    mu, lam = profile.mu, profile.lam
    L_max, L_bar, L_big = profile.L_max, profile.L_bar, profile.L_big
    denom = mu * max(n - 1, 1)
    if which == "simple":
        g = (4.0 * (n * L_bar - L_max + (n - 1) * lam) / denom) * b + 4.0 * n * (
            L_max - L_bar
        ) / denom
    elif which == "bernstein":
        g = (
            (4.0 * (2.0 * n * L_big - L_max + (n - 1) * lam) / denom) * b
            + 4.0 * n * (L_max - 2.0 * L_big) / denom
            + (16.0 / (3.0 * mu)) * math.log(d) * L_max
        )
    else:
        raise ValueError("which must be 'simple' or 'bernstein'")
    h = -(4.0 * (L_max + lam) / denom) * b + n * (
        1.0 + 4.0 * (L_max + lam) / denom
    )
    return g, h


def _clamp_batch(value, n):
    return int(min(max(math.floor(value), 1), n))


def optimal_b_simple(profile):
    """floor(1 + mu(n-1)/(4(Lbar + lam))), clamped to [1, n]."""
    n = profile.n
    value = 1.0 + profile.mu * (n - 1) / (4.0 * (profile.L_bar + profile.lam))
    return _clamp_batch(value, n)


def optimal_b_practical(profile):
    """floor(1 + mu(n-1)/(4(L + lam))), clamped to [1, n]."""
    n = profile.n
    value = 1.0 + profile.mu * (n - 1) / (4.0 * (profile.L_big + profile.lam))
    return _clamp_batch(value, n)


def optimal_b_bernstein(profile):
    """Optimal batch size under the Bernstein bound.

    Well-conditioned problems, those with (4/3)(4 L_max/mu) log d <= n, get
    floor(1 + mu(n-1)/(4(2L + lam)) - (4/3)(log d)((n-1)/n) L_max/(2L + lam));
    all others get 1.
    """
    n, d = profile.n, profile.d
    log_d = math.log(d)
    if (4.0 / 3.0) * (4.0 * profile.L_max / profile.mu) * log_d > n:
        return 1
    two_l = 2.0 * profile.L_big + profile.lam
    value = (
        1.0
        + profile.mu * (n - 1) / (4.0 * two_l)
        - (4.0 / 3.0) * log_d * ((n - 1) / n) * profile.L_max / two_l
    )
    return _clamp_batch(value, n)


def brute_force_optimal_b(curve, profile, epsilon=DEFAULT_EPSILON):
    """argmin over the curve's batch sizes of the total complexity.

    Ties are broken by the smallest batch size.
    """
    batch_sizes = curve.batch_sizes()
    if not batch_sizes:
        raise ValidationError("curve has no batch sizes")
    totals = np.array(
        [complexity(curve.values[b], profile, b, epsilon)[1] for b in batch_sizes]
    )
    return batch_sizes[int(np.argmin(totals))]
