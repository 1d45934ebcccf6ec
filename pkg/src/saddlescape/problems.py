"""Quadratic test problems with known spectra and a gradient-oracle interface."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, runtime_checkable

import numpy as np

from .seeding import rng_from

__all__ = [
    "BASIS_TOLERANCE",
    "GradientOracle",
    "FunctionOracle",
    "QuadraticProblem",
    "toy_problem",
    "random_problem",
    "gradient",
    "random_orthogonal",
    "sample_unit_ball",
]

BASIS_TOLERANCE = 1e-10


@runtime_checkable
class GradientOracle(Protocol):
    """A smooth objective exposing function values and gradients.

    ``evaluate`` accepts points of shape ``(..., dimension)`` and returns the
    value(s) and gradient(s) with matching leading axes, so whole iterate
    histories can be evaluated in one call.
    """

    dimension: int

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class FunctionOracle:
    """Wrap a callable ``x -> (value, gradient)`` as a gradient oracle."""

    dimension: int
    func: Callable[[np.ndarray], tuple[float, np.ndarray]]

    def evaluate(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        return self.func(np.asarray(x, dtype=float))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x)[1]


@dataclass(frozen=True)
class QuadraticProblem:
    """The quadratic objective ``f(x) = x^T V diag(eigenvalues) V^T x / 2``.

    ``eigenvalues`` must be sorted nonincreasing.  ``basis`` is an optional
    orthogonal matrix whose columns are the eigenvectors; when absent the
    Hessian is diagonal.  Instances are immutable after construction and safe
    to share across threads.

    Attributes
    ----------
    eigenvalues : ndarray
        Hessian spectrum, nonincreasing.
    basis : ndarray or None
        Orthogonal eigenvector matrix, identity when None.
    seed, basis_seed : int or None
        Provenance of randomly generated spectra/bases; kept so problems
        serialize compactly and rebuild bit-for-bit.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray | None = None
    seed: int | None = None
    basis_seed: int | None = None

    def __post_init__(self) -> None:
        ev = np.array(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise ValueError("eigenvalues must be a nonempty 1-D array")
        if np.any(np.diff(ev) > 0):
            raise ValueError("eigenvalues must be sorted nonincreasing")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        if self.basis is not None:
            v = np.array(self.basis, dtype=float)
            if v.shape != (ev.size, ev.size):
                raise ValueError(f"basis must be {ev.size}x{ev.size}, got {v.shape}")
            err = np.abs(v.T @ v - np.eye(ev.size)).max()
            if err > BASIS_TOLERANCE:
                raise ValueError(f"basis is not orthogonal (max |V'V - I| = {err:.3e})")
            v.setflags(write=False)
            object.__setattr__(self, "basis", v)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    # alias so problems satisfy the GradientOracle protocol
    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def negative_count(self) -> int:
        """Number of strictly negative Hessian eigenvalues."""
        return int(np.count_nonzero(self.eigenvalues < 0))

    @property
    def lipschitz(self) -> float:
        """Gradient Lipschitz constant, ``max(largest, -smallest)`` eigenvalue."""
        return float(max(self.eigenvalues[0], -self.eigenvalues[-1]))

    def hessian(self) -> np.ndarray:
        if self.basis is None:
            return np.diag(self.eigenvalues)
        return (self.basis * self.eigenvalues) @ self.basis.T

    def _coords(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise ValueError(f"point has dimension {x.shape[-1] if x.ndim else 0}, expected {self.n}")
        return x

    def value(self, x: np.ndarray) -> np.ndarray:
        x = self._coords(x)
        z = x if self.basis is None else x @ self.basis
        return 0.5 * np.sum(self.eigenvalues * z * z, axis=-1)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = self._coords(x)
        if self.basis is None:
            return self.eigenvalues * x
        return (self.eigenvalues * (x @ self.basis)) @ self.basis.T

    def evaluate(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = self._coords(x)
        z = x if self.basis is None else x @ self.basis
        value = 0.5 * np.sum(self.eigenvalues * z * z, axis=-1)
        grad = self.eigenvalues * z if self.basis is None else (self.eigenvalues * z) @ self.basis.T
        return value, grad

    def rotated(self, basis_seed: int) -> "QuadraticProblem":
        """Same spectrum expressed in a seeded random orthogonal basis."""
        return QuadraticProblem(
            self.eigenvalues,
            basis=random_orthogonal(self.n, basis_seed),
            seed=self.seed,
            basis_seed=int(basis_seed),
        )

    def negative_projector(self) -> np.ndarray:
        """Orthogonal projector onto the span of negative-eigenvalue eigenvectors."""
        mask = self.eigenvalues < 0
        if self.basis is None:
            return np.diag(mask.astype(float))
        vneg = self.basis[:, mask]
        return vneg @ vneg.T

    def to_json_dict(self) -> dict:
        if self.basis is not None and self.basis_seed is None:
            raise ValueError("only problems with seeded bases can be serialized")
        out: dict = {"n": self.n, "eigenvalues": [float(v) for v in self.eigenvalues]}
        if self.seed is not None:
            out["seed"] = int(self.seed)
        if self.basis_seed is not None:
            out["basis_seed"] = int(self.basis_seed)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "QuadraticProblem":
        ev = np.asarray(data["eigenvalues"], dtype=float)
        if int(data["n"]) != ev.size:
            raise ValueError("field 'n' disagrees with the eigenvalue count")
        basis_seed = data.get("basis_seed")
        basis = None if basis_seed is None else random_orthogonal(ev.size, basis_seed)
        return cls(ev, basis=basis, seed=data.get("seed"), basis_seed=basis_seed)


def toy_problem(delta: float) -> QuadraticProblem:
    """Two-dimensional saddle ``f(x) = (x1^2 - delta*x2^2)/2`` with ``0 < delta < 1``.

    The origin is a strict saddle point; the gradient Lipschitz constant is 1.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    return QuadraticProblem(np.array([1.0, -float(delta)]))


def random_problem(
    n: int,
    p: int,
    delta: float,
    seed: int | np.random.Generator,
) -> QuadraticProblem:
    """Random diagonal quadratic with ``p`` negative eigenvalues.

    The ``n - p`` nonnegative eigenvalues are i.i.d. uniform on [0, 1] (the
    largest is bumped up to ``delta`` in the measure-zero event that every
    draw lands below it, so the Lipschitz constant comes from the positive
    side); the ``p`` negative eigenvalues are i.i.d. uniform on
    ``[-2*delta, -delta]``.  Deterministic given the seed.  ``seed`` may also
    be a Generator when the caller manages its own streams.
    """
    if not 1 <= p < n:
        raise ValueError(f"p must satisfy 1 <= p < n, got p={p}, n={n}")
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    if isinstance(seed, np.random.Generator):
        rng, recorded = seed, None
    else:
        rng, recorded = rng_from(seed), int(seed)
    nonneg = rng.uniform(0.0, 1.0, size=n - p)
    if nonneg.max() < delta:
        nonneg[np.argmax(nonneg)] = delta
    negative = rng.uniform(-2.0 * delta, -delta, size=p)
    ev = np.sort(np.concatenate([nonneg, negative]))[::-1]
    return QuadraticProblem(ev, seed=recorded)


def gradient(problem: QuadraticProblem, x: np.ndarray) -> np.ndarray:
    """Gradient ``V diag(eigenvalues) V^T x`` of the quadratic at ``x``."""
    return problem.gradient(x)


def random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Seeded random orthogonal matrix (QR of a Gaussian matrix, signs fixed)."""
    a = rng_from(seed).standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def sample_unit_ball(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the unit ball: normalized Gaussian scaled by U^(1/n)."""
    g = rng.standard_normal(n)
    radius = rng.random() ** (1.0 / n)
    return radius * g / np.linalg.norm(g)
