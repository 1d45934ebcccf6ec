"""Spectral analysis of the heavy-ball iteration map at a critical point.

The method's iterate pairs evolve under the map

    T(z1, z2) = (z1 - alpha * grad f(z1) + beta * (z1 - z2), z1)

whose fixed points are exactly the pairs ``(x*, x*)`` at critical points of
``f``.  On a quadratic, its Jacobian splits into one 2x2 block per Hessian
eigenvalue ``lambda``, and the block's eigenvalues are the roots of

    mu^2 - (1 + beta - alpha*lambda) mu + beta = 0.

Positive ``lambda`` gives two roots of magnitude below one, ``lambda = 0``
gives {1, beta}, and negative ``lambda`` gives one root in (0, 1) and one
above 1, so the unstable dimension equals the number of negative Hessian
eigenvalues.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .problems import QuadraticProblem

__all__ = [
    "ConditionError",
    "EigenPair",
    "ParamCheck",
    "SpectrumClassification",
    "block_eigenvalues",
    "param_conditions",
    "classify_saddle_map",
    "apply_iteration_map",
    "invert_iteration_map",
    "unstable_eigenvector",
]


class ConditionError(ValueError):
    """The step size / momentum parameters violate the classification conditions."""


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues of one 2x2 block of the linearized iteration map.

    ``mu_hi`` is the root of larger magnitude; for complex pairs (equal
    magnitudes) it is the one with nonnegative imaginary part, which keeps
    the output deterministic.  The roots always satisfy
    ``mu_hi + mu_lo = 1 + beta - alpha*lambda`` and ``mu_hi * mu_lo = beta``.
    """

    mu_hi: complex
    mu_lo: complex
    is_real: bool
    lam: float
    alpha: float
    beta: float


def block_eigenvalues(lam: float, alpha: float, beta: float) -> EigenPair:
    """Roots of ``mu^2 - (1 + beta - alpha*lambda) mu + beta = 0``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta!r}")
    lam, alpha, beta = float(lam), float(alpha), float(beta)
    s = 1.0 + beta - alpha * lam
    # Expanded so lambda = 0 yields exactly (1 - beta)^2 instead of the
    # cancellation-prone (1 + beta)^2 - 4*beta.
    disc = (1.0 - beta) ** 2 + alpha * lam * (alpha * lam - 2.0 * (1.0 + beta))
    if disc >= 0.0:
        root = math.sqrt(disc)
        plus = 0.5 * (s + root)
        minus = 0.5 * (s - root)
        if abs(plus) >= abs(minus):
            hi, lo = plus, minus
        else:
            hi, lo = minus, plus
        return EigenPair(complex(hi), complex(lo), True, lam, alpha, beta)
    imag = 0.5 * math.sqrt(-disc)
    return EigenPair(complex(0.5 * s, imag), complex(0.5 * s, -imag), False, lam, alpha, beta)


@dataclass(frozen=True)
class ParamCheck:
    """Result of checking the classification conditions, with diagnostics."""

    ok: bool
    failures: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def param_conditions(alpha: float, beta: float, lambda1: float) -> ParamCheck:
    """Check ``0 < alpha < 4/lambda1`` and ``beta in (max(alpha*lambda1/2 - 1, 0), 1)``.

    ``lambda1`` is the largest (positive) Hessian eigenvalue.  Both intervals
    are open.  Returns a diagnostic result rather than raising.
    """
    if lambda1 <= 0:
        raise ValueError(f"lambda1 must be positive, got {lambda1!r}")
    failures = []
    if not 0.0 < alpha < 4.0 / lambda1:
        failures.append(f"alpha must satisfy 0 < alpha < 4/lambda1 = {4.0 / lambda1:.6g}")
    lower = max(alpha * lambda1 / 2.0 - 1.0, 0.0)
    if not lower < beta < 1.0:
        failures.append(f"beta must lie in the open interval ({lower:.6g}, 1)")
    return ParamCheck(ok=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class SpectrumClassification:
    """Block-by-block spectrum of the linearized iteration map.

    ``stable_dim`` counts eigenvalues of magnitude at most one and
    ``unstable_dim`` those beyond one; they sum to twice the problem
    dimension, and ``unstable_dim`` equals the number of negative Hessian
    eigenvalues.  ``unstable_eigenvectors`` holds one row ``(v, v / mu_hi)``
    per negative eigenvalue; the rows are mutually orthogonal.
    """

    pairs: tuple[EigenPair, ...]
    labels: tuple[str, ...]
    stable_dim: int
    unstable_dim: int
    unstable_eigenvectors: np.ndarray

    def to_json_dict(self) -> dict:
        blocks = []
        for pair, label in zip(self.pairs, self.labels):
            blocks.append(
                {
                    "lambda": pair.lam,
                    "mu_hi": {"re": pair.mu_hi.real, "im": pair.mu_hi.imag},
                    "mu_lo": {"re": pair.mu_lo.real, "im": pair.mu_lo.imag},
                    "class": label,
                }
            )
        return {
            "stable_dim": self.stable_dim,
            "unstable_dim": self.unstable_dim,
            "blocks": blocks,
        }


def classify_saddle_map(problem: QuadraticProblem, alpha: float, beta: float) -> SpectrumClassification:
    """Classify the full 2n-dimensional spectrum of the map at the critical point.

    Requires the parameter conditions for the problem's largest eigenvalue;
    a violation raises :class:`ConditionError` naming the failed inequality.
    """
    lambda1 = float(problem.eigenvalues[0])
    if lambda1 <= 0:
        raise ConditionError("classification requires a positive largest eigenvalue")
    check = param_conditions(alpha, beta, lambda1)
    if not check:
        raise ConditionError("; ".join(check.failures))
    pairs = []
    labels = []
    stable = 0
    vectors = []
    basis = problem.basis
    for i, lam in enumerate(problem.eigenvalues):
        pair = block_eigenvalues(lam, alpha, beta)
        pairs.append(pair)
        if lam > 0:
            labels.append("stable")
            stable += 2
        elif lam == 0:
            # beta < 1 keeps the roots {1, beta} distinct, so the block is
            # diagonalizable; guard the assumption at runtime.
            if pair.mu_hi == pair.mu_lo:
                raise ArithmeticError("zero-eigenvalue block produced a repeated root")
            labels.append("unit")
            stable += 2
        else:
            labels.append("unstable")
            stable += 1
            direction = basis[:, i] if basis is not None else np.eye(problem.n)[i]
            vectors.append(unstable_eigenvector(lam, alpha, beta, direction))
    unstable = 2 * problem.n - stable
    eigvecs = np.array(vectors) if vectors else np.empty((0, 2 * problem.n))
    return SpectrumClassification(
        pairs=tuple(pairs),
        labels=tuple(labels),
        stable_dim=stable,
        unstable_dim=unstable,
        unstable_eigenvectors=eigvecs,
    )


def _check_pair(problem: QuadraticProblem, z1: np.ndarray, z2: np.ndarray):
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.shape != (problem.n,) or z2.shape != (problem.n,):
        raise ValueError(f"both points must have dimension {problem.n}")
    return z1, z2


def apply_iteration_map(
    problem: QuadraticProblem, alpha: float, beta: float, z1: np.ndarray, z2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One application of the pair map: ``(z1 - alpha*grad f(z1) + beta*(z1 - z2), z1)``.

    On a quadratic the map is linear, so a heavy-ball step from the pair
    ``(x^k, x^{k-1})`` coincides with it exactly.
    """
    z1, z2 = _check_pair(problem, z1, z2)
    first = z1 - alpha * problem.gradient(z1) + beta * (z1 - z2)
    return first, z1.copy()


def invert_iteration_map(
    problem: QuadraticProblem, alpha: float, beta: float, y1: np.ndarray, y2: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Explicit inverse of the pair map; requires ``beta > 0``.

    Returns ``(y2, (y2 - y1 - alpha*grad f(y2))/beta + y2)``, so composing
    with :func:`apply_iteration_map` gives the identity.
    """
    if beta == 0:
        raise ValueError("the pair map is not invertible for beta = 0")
    y1, y2 = _check_pair(problem, y1, y2)
    second = (y2 - y1 - alpha * problem.gradient(y2)) / beta + y2
    return y2.copy(), second


def unstable_eigenvector(lam: float, alpha: float, beta: float, v: np.ndarray) -> np.ndarray:
    """Eigenvector ``(v, v / mu_hi)`` of the linearized map for ``lambda < 0``.

    ``v`` must be the (unit) Hessian eigenvector for ``lambda``; the returned
    2n-vector is repelled from the fixed point at rate ``mu_hi > 1``.
    """
    if lam >= 0:
        raise ValueError(f"lambda must be negative, got {lam!r}")
    v = np.asarray(v, dtype=float)
    pair = block_eigenvalues(lam, alpha, beta)
    mu_hi = pair.mu_hi.real
    return np.concatenate([v, v / mu_hi])
