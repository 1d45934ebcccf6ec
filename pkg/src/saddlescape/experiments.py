"""Desk-scale escape experiments: toy trajectories, eigenspace growth, divergence table.

Three reproducible experiment drivers:

* :func:`toy_figure` traces gradient descent and heavy-ball on the 2-D toy
  saddle from a shared start, thinned for plotting.
* :func:`negspace_experiment` runs gradient descent, heavy-ball, accelerated
  gradient, and the limiting-rate predictor on a random quadratic with a
  known negative eigenvalue, recording the negative-eigenspace projection
  norm per iteration.
* :func:`divergence_table` measures, over seeded random trials, how many
  iterations each method needs before that projection norm exceeds the
  problem dimension.

Every result is a deterministic function of the master seed; each trial owns
an independent counter-based random stream, so trials may run in any order.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import IO

import numpy as np

from .optimizers import EqualStart, StartPolicy, escape_time, run_accelerated, run_gradient_descent, run_heavy_ball
from .problems import QuadraticProblem, random_problem, sample_unit_ball
from .rates import predicted_escape_iters, rate_limit
from .schedules import MomentumSchedule, NesterovSchedule, params_array
from .seeding import rng_from

__all__ = [
    "ToyFigure",
    "toy_figure",
    "NegspaceSeries",
    "negspace_experiment",
    "TableRow",
    "TrialRecord",
    "TableResult",
    "divergence_table",
    "TABLE_METHODS",
]

TABLE_METHODS = ("steepest_descent", "accelerated_gradient", "rate_predictor")


def _csv_text(write_rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    write_rows(writer)
    return buffer.getvalue()


def _write(text: str, file: IO[str] | str) -> None:
    if isinstance(file, str):
        with open(file, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        file.write(text)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


@dataclass(frozen=True)
class ToyFigure:
    """Thinned (x1, x2) trajectories of both methods on the toy saddle."""

    descent: np.ndarray
    heavy_ball: np.ndarray
    thin: int
    descent_escape: int | None
    heavy_ball_escape: int | None

    def to_csv(self, file: IO[str] | str) -> None:
        def rows(writer):
            writer.writerow(["method", "iter", "x1", "x2"])
            for name, block in (("steepest_descent", self.descent), ("heavy_ball", self.heavy_ball)):
                for j, point in enumerate(block):
                    writer.writerow([name, str(j * self.thin), _fmt(point[0]), _fmt(point[1])])

        _write(_csv_text(rows), file)

    def to_json_dict(self) -> dict:
        return {
            "thin": self.thin,
            "descent": [[float(a), float(b)] for a, b in self.descent],
            "heavy_ball": [[float(a), float(b)] for a, b in self.heavy_ball],
            "descent_escape": self.descent_escape,
            "heavy_ball_escape": self.heavy_ball_escape,
        }


def toy_figure(
    delta: float,
    alpha: float,
    beta: float,
    x0,
    iterations: int,
    thin: int = 1,
    threshold: float = 1.0,
) -> ToyFigure:
    """Trace gradient descent and heavy-ball on the toy saddle from ``x0``.

    Both methods share the start; every ``thin``-th iterate is kept.  Escape
    is the first step whose ``|x2|`` reaches ``threshold``.
    """
    from .problems import toy_problem

    if thin < 1:
        raise ValueError("thin must be at least 1")
    problem = toy_problem(delta)
    x0 = np.asarray(x0, dtype=float)
    descent = run_gradient_descent(problem, alpha, x0, iterations)
    heavy = run_heavy_ball(problem, alpha, beta, x0, EqualStart(), iterations)
    projector = problem.negative_projector()
    return ToyFigure(
        descent=descent.points[::thin].copy(),
        heavy_ball=heavy.points[::thin].copy(),
        thin=int(thin),
        descent_escape=escape_time(descent, projector, threshold),
        heavy_ball_escape=escape_time(heavy, projector, threshold),
    )


@dataclass(frozen=True)
class NegspaceSeries:
    """Per-iteration negative-eigenspace projection norms for four series.

    Series may be shorter than ``iterations + 1`` when a run stopped at the
    divergence cutoff.  ``params`` records the resolved configuration
    (stepsizes, momentum, limiting rate, seed) for reproducibility.
    """

    descent: np.ndarray
    heavy_ball: np.ndarray
    accelerated: np.ndarray
    predicted: np.ndarray
    params: dict

    def _blocks(self):
        return (
            ("steepest_descent", self.descent),
            ("heavy_ball", self.heavy_ball),
            ("accelerated", self.accelerated),
            ("predicted", self.predicted),
        )

    def to_csv(self, file: IO[str] | str) -> None:
        names = [name for name, _ in self._blocks()]
        series = [block for _, block in self._blocks()]
        length = max(block.size for block in series)

        def rows(writer):
            writer.writerow(["iter"] + names)
            for k in range(length):
                row = [str(k)]
                row += [_fmt(block[k]) if k < block.size else "" for block in series]
                writer.writerow(row)

        _write(_csv_text(rows), file)

    def to_json_dict(self) -> dict:
        out = {name: [float(v) for v in block] for name, block in self._blocks()}
        out["params"] = self.params
        return out


def negspace_experiment(
    n: int = 100,
    p: int = 1,
    delta: float = 1e-2,
    seed: int = 0,
    iterations: int = 2000,
    start_policy: StartPolicy = EqualStart(),
) -> NegspaceSeries:
    """Compare escape speeds along the negative eigenspace of a random quadratic.

    The problem is diagonal with ``n - p`` nonnegative eigenvalues i.i.d.
    uniform on [0, 1]; with ``p = 1`` the negative eigenvalue is exactly
    ``-delta``, otherwise the ``p`` negative ones are uniform on
    ``[-2*delta, -delta]``.  The start is uniform on the unit ball.  Gradient
    descent and heavy-ball use ``alpha = 1/L`` with the heavy-ball momentum
    tuned to the most negative eigenvalue (``beta = 1 - alpha*|lambda_n|``);
    accelerated gradient uses ``alpha = 0.99/L`` with the t-sequence
    schedule.  The predictor series grows the starting projection by the
    limiting rate at every step.
    """
    rng = rng_from(seed, 0)
    nonneg = rng.uniform(0.0, 1.0, size=n - p)
    if nonneg.max() < delta:
        nonneg[np.argmax(nonneg)] = delta
    if p == 1:
        negative = np.array([-float(delta)])
    else:
        negative = rng.uniform(-2.0 * delta, -delta, size=p)
    eigenvalues = np.sort(np.concatenate([nonneg, negative]))[::-1]
    problem = QuadraticProblem(eigenvalues)
    x0 = sample_unit_ball(n, rng)

    lipschitz = problem.lipschitz
    alpha = 1.0 / lipschitz
    lam_n = float(eigenvalues[-1])
    beta_hb = 1.0 - alpha * abs(lam_n)
    alpha_ag = 0.99 / lipschitz
    mask = eigenvalues < 0

    descent = run_gradient_descent(problem, alpha, x0, iterations)
    heavy = run_heavy_ball(problem, alpha, beta_hb, x0, start_policy, iterations)
    accel = run_accelerated(problem, alpha_ag, NesterovSchedule(), x0, start_policy, iterations)

    def proj_norms(trace):
        return np.linalg.norm(trace.points[:, mask], axis=1)

    limit = rate_limit(lam_n, alpha_ag, 1.0, 1.0)
    start_norm = float(np.linalg.norm(x0[mask]))
    with np.errstate(over="ignore"):
        predicted = start_norm * (1.0 + limit.value) ** np.arange(iterations + 1, dtype=float)

    return NegspaceSeries(
        descent=proj_norms(descent),
        heavy_ball=proj_norms(heavy),
        accelerated=proj_norms(accel),
        predicted=predicted,
        params={
            "n": int(n),
            "p": int(p),
            "delta": float(delta),
            "seed": int(seed),
            "iterations": int(iterations),
            "lipschitz": lipschitz,
            "lambda_n": lam_n,
            "alpha": alpha,
            "beta_heavy_ball": beta_hb,
            "alpha_accelerated": alpha_ag,
            "rate_limit": limit.value,
            "start_projection": start_norm,
        },
    )


# ---------------------------------------------------------------------------
# Divergence table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    """Summary of one (n, delta, method) cell of the divergence table."""

    n: int
    delta: float
    method: str
    avg_iters: float
    max_iters: int
    censored: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.avg_iters) or self.avg_iters > self.max_iters:
            raise ValueError("summary requires finite avg_iters <= max_iters")


@dataclass(frozen=True)
class TrialRecord:
    """Escape iteration counts for one seeded trial."""

    n: int
    delta: float
    trial: int
    steepest_descent: int
    accelerated_gradient: int
    rate_predictor: int
    censored: tuple[str, ...] = ()


@dataclass(frozen=True)
class TableResult:
    """Per-trial records plus per-cell summaries of the divergence table."""

    rows: tuple[TableRow, ...]
    trials: tuple[TrialRecord, ...]
    seed: int
    trials_per_cell: int
    iteration_cap: int

    def row(self, n: int, delta: float, method: str) -> TableRow:
        for row in self.rows:
            if row.n == n and row.delta == delta and row.method == method:
                return row
        raise KeyError(f"no table row for n={n}, delta={delta}, method={method}")

    def to_csv(self, file: IO[str] | str) -> None:
        def rows(writer):
            writer.writerow(["n", "delta", "row_type", "trial_or_method", *TABLE_METHODS])
            for rec in self.trials:
                writer.writerow(
                    [
                        rec.n,
                        _fmt(rec.delta),
                        "trial",
                        rec.trial,
                        rec.steepest_descent,
                        rec.accelerated_gradient,
                        rec.rate_predictor,
                    ]
                )
            cells = sorted({(row.n, row.delta) for row in self.rows})
            for n, delta in cells:
                by_method = {m: self.row(n, delta, m) for m in TABLE_METHODS}
                writer.writerow(
                    [n, _fmt(delta), "average", "", *(_fmt(by_method[m].avg_iters) for m in TABLE_METHODS)]
                )
                writer.writerow(
                    [n, _fmt(delta), "max", "", *(by_method[m].max_iters for m in TABLE_METHODS)]
                )

        _write(_csv_text(rows), file)

    def to_json_dict(self) -> dict:
        cells = []
        for n, delta in sorted({(row.n, row.delta) for row in self.rows}):
            methods = {}
            for method in TABLE_METHODS:
                row = self.row(n, delta, method)
                methods[method] = {
                    "avg_iters": row.avg_iters,
                    "max_iters": row.max_iters,
                    "censored": row.censored,
                }
            cells.append({"n": n, "delta": delta, "methods": methods})
        return {
            "seed": self.seed,
            "trials": self.trials_per_cell,
            "iteration_cap": self.iteration_cap,
            "cells": cells,
        }


def _steepest_escape_steps(neg_values, neg_start, alpha, threshold, cap):
    # On a diagonal quadratic the coordinates decouple, so only the
    # negative-eigenvalue block can drive the projection norm; iterating just
    # that block reproduces the full run's escape count exactly.
    x = neg_start.copy()
    factors = 1.0 - alpha * neg_values
    for k in range(1, cap + 1):
        x *= factors
        if math.sqrt(float(x @ x)) >= threshold:
            return k, False
    return cap, True


def _accelerated_escape_steps(neg_values, neg_start, alpha, schedule, threshold, cap):
    x = neg_start.copy()
    xp = neg_start.copy()
    horizon = min(cap, 1024)
    betas, gammas = params_array(schedule, horizon)
    k = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while k < cap:
            if k + 1 > horizon:
                horizon = min(cap, 2 * horizon)
                betas, gammas = params_array(schedule, horizon)
            k += 1
            d = x - xp
            y = x + gammas[k] * d
            xn = x - alpha * (neg_values * y) + betas[k] * d
            xp, x = x, xn
            if math.sqrt(float(x @ x)) >= threshold:
                return k, False
    return cap, True


def divergence_table(
    ns=(100,),
    deltas=(1e-2, 1e-3),
    trials: int = 100,
    seed: int = 0,
    iteration_cap: int = 10**6,
    threshold: float | None = None,
    schedule: MomentumSchedule = NesterovSchedule(),
) -> TableResult:
    """Average/max iterations until the negative-space projection exceeds ``n``.

    For each ``(n, delta)`` cell and trial, a random diagonal quadratic is
    drawn with 5 negative eigenvalues uniform on ``[-2*delta, -delta]`` and a
    start uniform on the unit ball; steepest descent (``alpha = 1/L``) and
    accelerated gradient (``alpha = 0.99/L``, t-sequence schedule) run until
    the projection norm reaches the threshold (``n`` by default).  The
    rate-predictor column converts the limiting growth rate of the most
    negative eigenvalue and the realized starting projection into a predicted
    count.  Trials that hit ``iteration_cap`` are recorded at the cap and
    counted as censored, with a warning.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rows: list[TableRow] = []
    records: list[TrialRecord] = []
    for cell_index, (n, delta) in enumerate((int(n), float(d)) for n in ns for d in deltas):
        cell_threshold = float(n) if threshold is None else float(threshold)
        if cell_threshold <= 0:
            raise ValueError("threshold must be positive")
        counts = {method: [] for method in TABLE_METHODS}
        censored_counts = dict.fromkeys(TABLE_METHODS, 0)
        for trial in range(trials):
            rng = rng_from(seed, cell_index, trial)
            problem = random_problem(n, 5, delta, rng)
            x0 = sample_unit_ball(n, rng)
            ev = problem.eigenvalues
            mask = ev < 0
            neg_values = ev[mask]
            neg_start = x0[mask]
            alpha = 1.0 / problem.lipschitz
            alpha_ag = 0.99 / problem.lipschitz

            sd_iters, sd_cens = _steepest_escape_steps(
                neg_values, neg_start, alpha, cell_threshold, iteration_cap
            )
            ag_iters, ag_cens = _accelerated_escape_steps(
                neg_values, neg_start, alpha_ag, schedule, cell_threshold, iteration_cap
            )
            limit = rate_limit(float(ev[-1]), alpha_ag, 1.0, 1.0)
            start_norm = float(np.linalg.norm(neg_start))
            if start_norm > 0:
                predicted = predicted_escape_iters(limit.value, start_norm, cell_threshold)
                pred_cens = predicted > iteration_cap
                predicted = min(predicted, iteration_cap)
            else:
                predicted, pred_cens = iteration_cap, True

            censored = []
            for method, hit in zip(TABLE_METHODS, (sd_cens, ag_cens, pred_cens)):
                if hit:
                    censored.append(method)
                    censored_counts[method] += 1
                    warnings.warn(
                        f"trial {trial} (n={n}, delta={delta:g}) hit the iteration cap for {method}",
                        RuntimeWarning,
                        stacklevel=2,
                    )
            counts["steepest_descent"].append(sd_iters)
            counts["accelerated_gradient"].append(ag_iters)
            counts["rate_predictor"].append(predicted)
            records.append(
                TrialRecord(
                    n=n,
                    delta=delta,
                    trial=trial,
                    steepest_descent=sd_iters,
                    accelerated_gradient=ag_iters,
                    rate_predictor=predicted,
                    censored=tuple(censored),
                )
            )
        for method in TABLE_METHODS:
            values = counts[method]
            rows.append(
                TableRow(
                    n=n,
                    delta=delta,
                    method=method,
                    avg_iters=float(np.mean(values)),
                    max_iters=int(max(values)),
                    censored=censored_counts[method],
                )
            )
    return TableResult(
        rows=tuple(rows),
        trials=tuple(records),
        seed=int(seed),
        trials_per_cell=int(trials),
        iteration_cap=int(iteration_cap),
    )
