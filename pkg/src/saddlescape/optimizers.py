"""Gradient descent, heavy-ball, and the general accelerated framework.

All three methods run the same two-term recurrence

    y^k     = x^k + gamma_k (x^k - x^{k-1})
    x^{k+1} = x^k - alpha * grad f(y^k) + beta_k (x^k - x^{k-1})

with gradient descent as (beta, gamma) = (0, 0) and heavy-ball as
(beta, 0).  Traces index iterates by the number of update steps applied:
``points[0]`` is the starting point and ``points[k]`` the k-th iterate.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import IO

import numpy as np

from .problems import GradientOracle
from .schedules import ConstantSchedule, MomentumSchedule, params_array
from .seeding import rng_from

__all__ = [
    "DIVERGENCE_CUTOFF",
    "EqualStart",
    "PerturbedStart",
    "StartPolicy",
    "IterationTrace",
    "RunConfig",
    "run",
    "run_gradient_descent",
    "run_heavy_ball",
    "run_accelerated",
    "escape_time",
    "write_trace_csv",
]

# The objectives of interest are unbounded below, so runaway iterates are an
# expected, well-defined outcome rather than an error: a run stops and is
# flagged as diverged once any coordinate magnitude passes this cutoff.
DIVERGENCE_CUTOFF = 1e100


@dataclass(frozen=True)
class EqualStart:
    """Use the starting point itself as the momentum predecessor."""

    def resolve(self, x0: np.ndarray) -> np.ndarray:
        return np.array(x0, dtype=float)


@dataclass(frozen=True)
class PerturbedStart:
    """Momentum predecessor ``x0 + epsilon * y`` with ``y`` i.i.d. standard normal."""

    epsilon: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")

    def resolve(self, x0: np.ndarray) -> np.ndarray:
        x0 = np.asarray(x0, dtype=float)
        noise = rng_from(self.seed, 1).standard_normal(x0.size)
        return x0 + self.epsilon * noise


StartPolicy = EqualStart | PerturbedStart


@dataclass(frozen=True)
class IterationTrace:
    """History of one optimizer run.

    ``points[k]`` is the iterate after ``k`` update steps (``points[0]`` is
    the start).  On a diagonal quadratic, column ``i`` of ``points`` is the
    per-coordinate series for eigenvalue ``i``.  ``predecessor`` records the
    momentum predecessor used for the first step.  ``diverged`` is set when
    the run stopped early at the divergence cutoff, in which case the arrays
    are truncated at the offending iterate.
    """

    points: np.ndarray
    predecessor: np.ndarray
    function_values: np.ndarray
    gradient_norms: np.ndarray
    diverged: bool

    @property
    def steps(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]

    def coordinate(self, i: int) -> np.ndarray:
        return self.points[:, i]

    def projection_norms(self, projector: np.ndarray) -> np.ndarray:
        projector = np.atleast_2d(np.asarray(projector, dtype=float))
        return np.linalg.norm(self.points @ projector.T, axis=1)


def _gradient_fn(oracle: GradientOracle):
    grad = getattr(oracle, "gradient", None)
    if callable(grad):
        return grad
    return lambda x: oracle.evaluate(x)[1]


def _iterate(
    oracle: GradientOracle,
    alpha: float,
    betas: np.ndarray,
    gammas: np.ndarray,
    x0: np.ndarray,
    x_prev: np.ndarray,
    iterations: int,
) -> IterationTrace:
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.size != oracle.dimension:
        raise ValueError(f"starting point must have dimension {oracle.dimension}")
    x_prev = np.asarray(x_prev, dtype=float)
    if x_prev.shape != x0.shape:
        raise ValueError("momentum predecessor must match the starting point's shape")
    gradient = _gradient_fn(oracle)
    points = np.empty((iterations + 1, x0.size))
    points[0] = x0
    x = x0.copy()
    xp = x_prev.copy()
    diverged = False
    last = iterations
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, iterations + 1):
            d = x - xp
            y = x + gammas[k] * d
            g = gradient(y)
            xn = x - alpha * g + betas[k] * d
            points[k] = xn
            xp, x = x, xn
            if not np.isfinite(xn).all() or np.abs(xn).max() > DIVERGENCE_CUTOFF:
                diverged = True
                last = k
                break
        points = points[: last + 1]
        values, grads = oracle.evaluate(points)
    return IterationTrace(
        points=points,
        predecessor=x_prev,
        function_values=np.asarray(values, dtype=float),
        gradient_norms=np.linalg.norm(np.atleast_2d(grads), axis=-1),
        diverged=diverged,
    )


def run_gradient_descent(
    oracle: GradientOracle, alpha: float, x0: np.ndarray, iterations: int
) -> IterationTrace:
    """Run ``x^{k+1} = x^k - alpha * grad f(x^k)`` for ``iterations`` steps.

    On a diagonal quadratic, coordinate ``i`` of ``points[k]`` equals
    ``(1 - alpha * lambda_i)^k`` times its starting value.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    zeros = np.zeros(iterations + 1)
    x0 = np.asarray(x0, dtype=float)
    return _iterate(oracle, float(alpha), zeros, zeros, x0, x0, iterations)


def run_heavy_ball(
    oracle: GradientOracle,
    alpha: float,
    beta: float,
    x0: np.ndarray,
    start_policy: StartPolicy = EqualStart(),
    iterations: int = 100,
) -> IterationTrace:
    """Run the heavy-ball method ``x^{k+1} = x^k - alpha*grad f(x^k) + beta*(x^k - x^{k-1})``."""
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta!r}")
    return run_accelerated(oracle, alpha, ConstantSchedule(beta, 0.0), x0, start_policy, iterations)


def run_accelerated(
    oracle: GradientOracle,
    alpha: float,
    schedule: MomentumSchedule,
    x0: np.ndarray,
    start_policy: StartPolicy = EqualStart(),
    iterations: int = 100,
) -> IterationTrace:
    """Run the general accelerated framework under the given momentum schedule."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    betas, gammas = params_array(schedule, iterations)
    x0 = np.asarray(x0, dtype=float)
    return _iterate(oracle, float(alpha), betas, gammas, x0, start_policy.resolve(x0), iterations)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one optimizer run."""

    alpha: float
    schedule: MomentumSchedule
    x0: np.ndarray
    start_policy: StartPolicy = EqualStart()
    iterations: int = 100


def run(oracle: GradientOracle, config: RunConfig) -> IterationTrace:
    return run_accelerated(
        oracle, config.alpha, config.schedule, config.x0, config.start_policy, config.iterations
    )


def escape_time(trace: IterationTrace, subspace_projector: np.ndarray, threshold: float) -> int | None:
    """First step index ``k`` with ``||P x^k|| >= threshold``, or None if never reached."""
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold!r}")
    norms = trace.projection_norms(subspace_projector)
    hits = np.nonzero(norms >= threshold)[0]
    return int(hits[0]) if hits.size else None


def write_trace_csv(
    trace: IterationTrace,
    file: IO[str] | str,
    thin: int = 1,
    projector: np.ndarray | None = None,
) -> None:
    """Write a trace as CSV rows ``iter, coordinates..., f, grad_norm``.

    ``thin=m`` keeps every m-th iterate (always including the start).  With a
    ``projector``, a single ``proj_norm`` column replaces the coordinates.
    """
    if thin < 1:
        raise ValueError("thin must be at least 1")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if projector is None:
        header = ["iter"] + [f"x{i + 1}" for i in range(trace.dimension)] + ["f", "grad_norm"]
        columns = trace.points
    else:
        header = ["iter", "proj_norm", "f", "grad_norm"]
        columns = trace.projection_norms(projector)[:, None]
    writer.writerow(header)
    for k in range(0, trace.steps + 1, thin):
        row = [str(k)]
        row += [f"{v:.12g}" for v in np.atleast_1d(columns[k])]
        row += [f"{trace.function_values[k]:.12g}", f"{trace.gradient_norms[k]:.12g}"]
        writer.writerow(row)
    text = buffer.getvalue()
    if isinstance(file, str):
        with open(file, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        file.write(text)
