"""Per-iteration momentum parameter rules for the accelerated framework.

A schedule produces the pair ``(beta_k, gamma_k)`` used at iteration ``k``:
``gamma_k`` shifts the gradient evaluation point and ``beta_k`` weights the
momentum step.  All schedules must emit values in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ScheduleError",
    "ConstantSchedule",
    "PolyakSchedule",
    "NesterovSchedule",
    "AttouchSchedule",
    "ToySchedule",
    "MomentumSchedule",
    "TkSequence",
    "nesterov_t",
    "schedule_params",
    "params_array",
    "limit_params",
    "polyak_params",
    "TkPropertyReport",
    "verify_tk_properties",
    "schedule_to_json_dict",
    "schedule_from_json_dict",
]


class ScheduleError(ValueError):
    """A schedule was configured with, or emitted, parameters outside [0, 1]."""


def _unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ScheduleError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ConstantSchedule:
    """Fixed ``(beta, gamma)`` at every iteration.

    ``ConstantSchedule(0, 0)`` reduces the framework to gradient descent and
    ``ConstantSchedule(beta, 0)`` to the heavy-ball method.
    """

    beta: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", _unit_interval("beta", self.beta))
        object.__setattr__(self, "gamma", _unit_interval("gamma", self.gamma))


@dataclass(frozen=True)
class PolyakSchedule:
    """Classical heavy-ball momentum for a strongly convex spectrum in [m, L]."""

    m: float
    L: float

    def __post_init__(self) -> None:
        if not 0.0 < self.m <= self.L:
            raise ValueError(f"need 0 < m <= L, got m={self.m!r}, L={self.L!r}")

    @property
    def beta(self) -> float:
        return (math.sqrt(self.L) - math.sqrt(self.m)) / (math.sqrt(self.L) + math.sqrt(self.m))


@dataclass(frozen=True)
class NesterovSchedule:
    """``beta_k = gamma_k = (t_{k-1} - 1) / t_k`` driven by the t-sequence."""


@dataclass(frozen=True)
class AttouchSchedule:
    """``beta_k = gamma_k = (k - 1) / (k + eta + 1)`` for a fixed ``eta >= 0``."""

    eta: float

    def __post_init__(self) -> None:
        if self.eta < 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta!r}")


@dataclass(frozen=True)
class ToySchedule:
    """Heavy-ball momentum tuned to a known negative-curvature magnitude.

    Emits ``gamma_k = 0`` and ``beta_k = 1 - alpha*delta - gamma_hat``; the
    slack ``gamma_hat`` trades momentum for stability margin.
    """

    alpha: float
    delta: float
    gamma_hat: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.gamma_hat < 0:
            raise ValueError(f"gamma_hat must be nonnegative, got {self.gamma_hat!r}")
        _unit_interval("beta = 1 - alpha*delta - gamma_hat", self.beta)

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha * self.delta - self.gamma_hat


MomentumSchedule = Union[
    ConstantSchedule, PolyakSchedule, NesterovSchedule, AttouchSchedule, ToySchedule
]


@dataclass(frozen=True)
class TkSequence:
    """Values ``t_0..t_K`` of ``t_0 = 1``, ``t_k = (sqrt(4 t_{k-1}^2 + 1) + 1)/2``."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    def ratios(self) -> np.ndarray:
        """The momentum weights ``(t_{k-1} - 1) / t_k`` for ``k = 1..K``."""
        return (self.values[:-1] - 1.0) / self.values[1:]


def nesterov_t(count: int) -> TkSequence:
    """First ``count + 1`` terms of the t-sequence (``t_0`` through ``t_count``)."""
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count!r}")
    t = np.empty(count + 1)
    t[0] = 1.0
    prev = 1.0
    for k in range(1, count + 1):
        prev = (math.sqrt(4.0 * prev * prev + 1.0) + 1.0) / 2.0
        t[k] = prev
    return TkSequence(t)


def schedule_params(schedule: MomentumSchedule, k: int) -> tuple[float, float]:
    """The pair ``(beta_k, gamma_k)`` emitted at iteration ``k >= 1``."""
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k!r}")
    if isinstance(schedule, ConstantSchedule):
        return schedule.beta, schedule.gamma
    if isinstance(schedule, PolyakSchedule):
        return schedule.beta, 0.0
    if isinstance(schedule, ToySchedule):
        return schedule.beta, 0.0
    if isinstance(schedule, AttouchSchedule):
        value = _unit_interval("beta", (k - 1) / (k + schedule.eta + 1))
        return value, value
    if isinstance(schedule, NesterovSchedule):
        t = nesterov_t(k).values
        value = _unit_interval("beta", (t[k - 1] - 1.0) / t[k])
        return value, value
    raise TypeError(f"unknown schedule {schedule!r}")


def params_array(schedule: MomentumSchedule, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``betas, gammas`` indexed by iteration ``1..count`` (index 0 unused).

    Much faster than calling :func:`schedule_params` in a loop for the
    t-sequence variant, whose per-``k`` evaluation costs O(k).
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count!r}")
    if isinstance(schedule, ConstantSchedule):
        betas = np.full(count + 1, schedule.beta)
        gammas = np.full(count + 1, schedule.gamma)
    elif isinstance(schedule, (PolyakSchedule, ToySchedule)):
        betas = np.full(count + 1, schedule.beta)
        gammas = np.zeros(count + 1)
    elif isinstance(schedule, AttouchSchedule):
        k = np.arange(count + 1, dtype=float)
        betas = (k - 1.0) / (k + schedule.eta + 1.0)
        gammas = betas
    elif isinstance(schedule, NesterovSchedule):
        t = nesterov_t(count).values
        betas = np.empty(count + 1)
        betas[1:] = (t[:-1] - 1.0) / t[1:]
        gammas = betas
    else:
        raise TypeError(f"unknown schedule {schedule!r}")
    betas[0] = 0.0
    gammas = gammas.copy() if gammas is betas else gammas
    gammas[0] = 0.0
    body = betas[1:]
    if count and (body.min() < 0.0 or body.max() > 1.0):
        raise ScheduleError("schedule emitted parameters outside [0, 1]")
    return betas, gammas


def limit_params(schedule: MomentumSchedule) -> tuple[float, float]:
    """Limits ``(beta, gamma)`` of the emitted sequences as ``k`` grows."""
    if isinstance(schedule, ConstantSchedule):
        return schedule.beta, schedule.gamma
    if isinstance(schedule, (PolyakSchedule, ToySchedule)):
        return schedule.beta, 0.0
    if isinstance(schedule, (AttouchSchedule, NesterovSchedule)):
        return 1.0, 1.0
    raise TypeError(f"unknown schedule {schedule!r}")


def polyak_params(m: float, L: float) -> tuple[float, float]:
    """Classical heavy-ball tuning for eigenvalues in ``[m, L]``, ``0 < m <= L``.

    Returns ``alpha = 4 / (sqrt(L) + sqrt(m))^2`` and
    ``beta = (sqrt(L) - sqrt(m)) / (sqrt(L) + sqrt(m))``.
    """
    if m <= 0 or L < m:
        raise ValueError(f"need 0 < m <= L, got m={m!r}, L={L!r}")
    sl, sm = math.sqrt(L), math.sqrt(m)
    return 4.0 / (sl + sm) ** 2, (sl - sm) / (sl + sm)


@dataclass(frozen=True)
class TkPropertyReport:
    """Outcome of numerically checking the t-sequence identities and bounds.

    ``identity_max_err`` is the worst relative error of
    ``t_k^2 - t_k = t_{k-1}^2`` (relative because the terms grow like k^2);
    ``bound_ok`` confirms ``t_k >= (k + 1)/2``; ``ratio_monotone`` confirms
    the momentum ratios are nonnegative and nondecreasing; ``ratio_gap`` is
    the largest violation of ``1 - 2/(t_{k-1} + 1) <= ratio <= 1`` (zero when
    every ratio respects its bounds).
    """

    count: int
    identity_max_err: float
    bound_ok: bool
    ratio_monotone: bool
    ratio_gap: float
    final_ratio: float

    @property
    def passed(self) -> bool:
        return (
            self.identity_max_err <= 1e-9
            and self.bound_ok
            and self.ratio_monotone
            and self.ratio_gap <= 1e-12
        )

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "identity_max_err": self.identity_max_err,
            "bound_ok": self.bound_ok,
            "ratio_monotone": self.ratio_monotone,
            "ratio_gap": self.ratio_gap,
            "final_ratio": self.final_ratio,
            "passed": self.passed,
        }


def verify_tk_properties(count: int) -> TkPropertyReport:
    """Check the t-sequence properties numerically up to ``t_count``.

    Violations are reported, not raised, so callers can surface them as a
    structured result.
    """
    if count < 2:
        raise ValueError(f"count must be at least 2, got {count!r}")
    t = nesterov_t(count).values
    identity_err = np.abs(t[1:] * t[1:] - t[1:] - t[:-1] * t[:-1]) / (t[1:] * t[1:])
    k = np.arange(count + 1, dtype=float)
    bound_ok = bool(np.all(t >= (k + 1.0) / 2.0))
    ratios = (t[:-1] - 1.0) / t[1:]
    monotone = bool(np.all(np.diff(ratios) >= 0.0)) and bool(np.all(ratios >= 0.0))
    lower = 1.0 - 2.0 / (t[:-1] + 1.0)
    gap = max(float(np.max(lower - ratios)), float(np.max(ratios - 1.0)), 0.0)
    return TkPropertyReport(
        count=int(count),
        identity_max_err=float(identity_err.max()),
        bound_ok=bound_ok,
        ratio_monotone=monotone,
        ratio_gap=gap,
        final_ratio=float(ratios[-1]),
    )


def schedule_to_json_dict(schedule: MomentumSchedule) -> dict:
    if isinstance(schedule, NesterovSchedule):
        return {"kind": "nesterov"}
    if isinstance(schedule, AttouchSchedule):
        return {"kind": "attouch", "eta": schedule.eta}
    if isinstance(schedule, ConstantSchedule):
        return {"kind": "constant", "beta": schedule.beta, "gamma": schedule.gamma}
    if isinstance(schedule, PolyakSchedule):
        return {"kind": "polyak", "m": schedule.m, "L": schedule.L}
    if isinstance(schedule, ToySchedule):
        return {
            "kind": "toy",
            "alpha": schedule.alpha,
            "delta": schedule.delta,
            "gamma_hat": schedule.gamma_hat,
        }
    raise TypeError(f"unknown schedule {schedule!r}")


def schedule_from_json_dict(data: dict) -> MomentumSchedule:
    kind = data.get("kind")
    if kind == "nesterov":
        return NesterovSchedule()
    if kind == "attouch":
        return AttouchSchedule(eta=float(data["eta"]))
    if kind == "constant":
        return ConstantSchedule(beta=float(data["beta"]), gamma=float(data.get("gamma", 0.0)))
    if kind == "polyak":
        return PolyakSchedule(m=float(data["m"]), L=float(data["L"]))
    if kind == "toy":
        return ToySchedule(
            alpha=float(data["alpha"]),
            delta=float(data["delta"]),
            gamma_hat=float(data.get("gamma_hat", 0.0)),
        )
    raise ValueError(f"unknown schedule kind {kind!r}")
