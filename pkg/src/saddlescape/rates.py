"""Per-iteration divergence rates along negative-curvature directions.

For a coordinate with Hessian eigenvalue ``lambda < 0``, the accelerated
framework's iterates satisfy the product form

    x^{k+1} = x^0 * prod_{m=0..k} (1 + b_m)

where ``b_0 = 0`` and

    b_k = (beta_k + gamma_k * alpha*|lambda|) * (1 - 1/(1 + b_{k-1})) + alpha*|lambda|.

For nondecreasing schedules the sequence is nondecreasing and converges to a
limit characterized by a quadratic fixed-point equation; the limit is the
asymptotic per-iteration growth factor of the escaping coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schedules import MomentumSchedule, params_array

__all__ = [
    "RateSequence",
    "RateLimit",
    "rate_sequence",
    "rate_limit",
    "product_reconstruction",
    "escape_bounds",
    "predicted_escape_iters",
]


@dataclass(frozen=True)
class RateSequence:
    """Growth factors ``b_0..b_K`` for one negative eigenvalue and schedule."""

    lam: float
    alpha: float
    schedule: MomentumSchedule
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def final(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class RateLimit:
    """Nonnegative root of the limiting fixed-point quadratic.

    ``value`` solves ``b^2 - (beta - 1 + alpha*|lambda|*(1 + gamma)) b
    - alpha*|lambda| = 0``, equivalently the growth-factor balance
    ``a + (1 + a + beta + gamma*a) b = 2b + b^2`` with ``a = alpha*|lambda|``.
    """

    value: float
    lam: float
    alpha: float
    beta_limit: float
    gamma_limit: float

    def fixed_point_residual(self) -> float:
        a = self.alpha * abs(self.lam)
        b = self.value
        lhs = a + (1.0 + a + self.beta_limit + self.gamma_limit * a) * b
        return abs(lhs - (2.0 * b + b * b))


def rate_sequence(lam: float, alpha: float, schedule: MomentumSchedule, count: int) -> RateSequence:
    """Iterate the growth recurrence for ``count`` steps (``b_0`` through ``b_count``)."""
    if lam >= 0:
        raise ValueError(f"lambda must be negative, got {lam!r}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count!r}")
    a = alpha * abs(lam)
    betas, gammas = params_array(schedule, count)
    values = np.empty(count + 1)
    values[0] = 0.0
    b = 0.0
    for k in range(1, count + 1):
        b = (betas[k] + gammas[k] * a) * (1.0 - 1.0 / (1.0 + b)) + a
        values[k] = b
    return RateSequence(lam=float(lam), alpha=float(alpha), schedule=schedule, values=values)


def product_reconstruction(x0_i: float, rate: RateSequence, k: int) -> float:
    """Coordinate value after ``k`` steps, ``x0_i * prod_{m=0..k} (1 + b_m)``."""
    if not 0 <= k <= rate.values.size - 1:
        raise ValueError(f"k must lie in [0, {rate.values.size - 1}], got {k!r}")
    return float(x0_i * np.prod(1.0 + rate.values[: k + 1]))


def rate_limit(lam: float, alpha: float, beta_limit: float, gamma_limit: float) -> RateLimit:
    """Limiting growth factor for schedule limits ``(beta_limit, gamma_limit)``.

    Notable special cases: limits (1, 1) give
    ``a + sqrt(a)*sqrt(1 + a)``; heavy-ball tuning ``(1 - a, 0)`` gives
    ``sqrt(a)``; and (0, 0) recovers the gradient-descent factor ``a``,
    always with ``a = alpha*|lambda|``.
    """
    if lam >= 0:
        raise ValueError(f"lambda must be negative, got {lam!r}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not 0.0 <= beta_limit <= 1.0 or not 0.0 <= gamma_limit <= 1.0:
        raise ValueError("schedule limits must lie in [0, 1]")
    a = alpha * abs(lam)
    half_trace = beta_limit - 1.0 + a * (1.0 + gamma_limit)
    value = 0.5 * half_trace + 0.5 * math.sqrt(half_trace * half_trace + 4.0 * a)
    return RateLimit(
        value=value,
        lam=float(lam),
        alpha=float(alpha),
        beta_limit=float(beta_limit),
        gamma_limit=float(gamma_limit),
    )


def escape_bounds(delta: float, alpha: float, epsilon: float) -> dict:
    """Closed-form iteration bounds for escaping the 2-D toy saddle.

    ``gd_bound`` is ``ceil(|log eps| / (delta*alpha))`` for gradient descent;
    ``hb_bound`` is the smallest integer ``k`` with
    ``k + 1 >= log(2/eps) / sqrt(3*delta)``, the heavy-ball bound stated for
    ``alpha = 3`` and ``beta = 1 - 3*delta``.  Both come from linearizing
    ``log(1 + g) ~ g``, so they are first-order estimates of the true escape
    time rather than exact counts.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    gd = math.ceil(abs(math.log(epsilon)) / (delta * alpha))
    hb = math.ceil(math.log(2.0 / epsilon) / math.sqrt(3.0 * delta) - 1.0)
    return {"gd_bound": int(gd), "hb_bound": int(max(hb, 0))}


def predicted_escape_iters(bar_b: float, initial_projection: float, threshold: float) -> int:
    """Smallest ``k`` with ``initial_projection * (1 + bar_b)^k >= threshold``."""
    if bar_b <= 0:
        raise ValueError(f"bar_b must be positive, got {bar_b!r}")
    if initial_projection <= 0:
        raise ValueError(f"initial_projection must be positive, got {initial_projection!r}")
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold!r}")
    if initial_projection >= threshold:
        return 0
    growth = math.log1p(bar_b)
    k = max(0, math.ceil(math.log(threshold / initial_projection) / growth))
    # polish the rounding so the returned k is exactly the first crossing
    while k > 0 and initial_projection * (1.0 + bar_b) ** (k - 1) >= threshold:
        k -= 1
    while initial_projection * (1.0 + bar_b) ** k < threshold:
        k += 1
    return int(k)
