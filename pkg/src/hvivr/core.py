"""Block vectors, finite-sum operators and the Tikhonov-combined operator.

A point ``z = (x, y)`` is stored as one contiguous float array of length
``n + m``; :class:`BlockSplit` records where ``x`` ends.  Operators are
finite sums of components indexed by a label set, and every built-in
instance is *coordinate separable*: each component is a fixed column scaled
by one coordinate of ``z`` (plus, possibly, one constant component).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration, dimension mismatch or out-of-range argument."""


class DomainError(ValueError):
    """A point lies outside the domain of a geometric primitive."""


class NumericalError(ArithmeticError):
    """Non-finite values or degenerate normalisations during a computation."""


@dataclass(frozen=True)
class BlockSplit:
    """Split point of a block vector ``z = (x, y)`` with ``len(x) = n``."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError(f"block sizes must be >= 1, got n={self.n}, m={self.m}")

    @property
    def size(self) -> int:
        return self.n + self.m

    def x(self, z: np.ndarray) -> np.ndarray:
        return z[..., : self.n]

    def y(self, z: np.ndarray) -> np.ndarray:
        return z[..., self.n :]

    def join(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape[-1] != self.n or y.shape[-1] != self.m:
            raise ConfigError(f"blocks of sizes {x.shape[-1]}, {y.shape[-1]} do not match ({self.n}, {self.m})")
        return np.concatenate([x, y], axis=-1)

    def check(self, z) -> np.ndarray:
        """Return ``z`` as a float array, raising if the length is wrong."""
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.shape[0] != self.size:
            raise ConfigError(f"expected a vector of length {self.size}, got shape {z.shape}")
        return z

    def uniform(self) -> np.ndarray:
        return self.join(np.full(self.n, 1.0 / self.n), np.full(self.m, 1.0 / self.m))

    def random_feasible(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Draw points uniformly from the simplex product (Dirichlet(1) per block)."""
        shape = () if size is None else (size,)
        x = rng.dirichlet(np.ones(self.n), size=shape or None)
        y = rng.dirichlet(np.ones(self.m), size=shape or None)
        return self.join(x, y)

    def is_feasible(self, z, tol: float = 1e-10) -> bool:
        z = np.asarray(z, dtype=float)
        x, y = self.x(z), self.y(z)
        return bool(
            np.all(z >= -tol) and abs(x.sum() - 1.0) <= tol and abs(y.sum() - 1.0) <= tol
        )


def ensure_finite(z: np.ndarray, what: str = "vector") -> np.ndarray:
    if not np.all(np.isfinite(z)):
        raise NumericalError(f"non-finite entries in {what}")
    return z


def block_norms(z, split: BlockSplit, kind: str = "l2") -> float:
    """Norms on ``(x, y)``: ``l2``, ``l1_block`` and its dual ``linf_block``."""
    z = np.asarray(z, dtype=float)
    if kind == "l2":
        return float(np.linalg.norm(z))
    x, y = split.x(z), split.y(z)
    if kind == "l1_block":
        return float(np.hypot(np.abs(x).sum(), np.abs(y).sum()))
    if kind == "linf_block":
        return float(np.hypot(np.abs(x).max(), np.abs(y).max()))
    raise ConfigError(f"unknown norm kind {kind!r}")


class FiniteSumOperator:
    """``F = sum_a F^a`` over a finite label set.

    ``component(a, z)`` evaluates one summand; ``full(z)`` defaults to the
    left-to-right sum over ``labels`` so results are reproducible bit for bit.
    """

    def __init__(self, split: BlockSplit, labels: Sequence, component: Callable, name: str = ""):
        self.split = split
        self.labels = tuple(labels)
        self._component = component
        self.name = name

    def component(self, label, z) -> np.ndarray:
        return np.asarray(self._component(label, z), dtype=float)

    def full(self, z) -> np.ndarray:
        out = np.zeros(self.split.size)
        for a in self.labels:
            out = out + self.component(a, z)
        return out

    def sum_components(self, z) -> np.ndarray:
        """Brute-force sum of all components, independent of any fast path."""
        out = np.zeros(self.split.size)
        for a in self.labels:
            out = out + self.component(a, z)
        return out


class SeparableOperator(FiniteSumOperator):
    """Affine operator ``z -> sum_k col_k * z_k + offset``.

    Column ``k`` is returned by ``column(k)`` as a pair ``(indices, values)``
    (sparse) so no dense matrix is needed; ``apply`` is a fast matrix-free
    evaluation of the linear part.  Labels are ``0..n+m-1`` plus the string
    ``"const"`` when a nonzero offset is present.
    """

    def __init__(
        self,
        split: BlockSplit,
        column: Callable[[int], tuple],
        apply: Callable[[np.ndarray], np.ndarray],
        offset: Optional[np.ndarray] = None,
        name: str = "",
        lipschitz: Optional[float] = None,
    ):
        self.split = split
        self._column = column
        self._apply = apply
        self.offset = None if offset is None or not np.any(offset) else np.asarray(offset, dtype=float)
        labels = list(range(split.size))
        if self.offset is not None:
            labels.append("const")
        self.labels = tuple(labels)
        self.name = name
        self.lipschitz = lipschitz
        self._columns = [tuple(np.asarray(a) for a in column(k)) for k in range(split.size)]
        self.column_sqnorms = np.array([float(np.dot(v, v)) for _, v in self._columns])
        self.column_maxabs = np.array([float(np.abs(v).max()) if v.size else 0.0 for _, v in self._columns])

    def column(self, k: int):
        return self._columns[k]

    def component(self, label, z) -> np.ndarray:
        out = np.zeros(self.split.size)
        if label == "const":
            out += self.offset
            return out
        idx, val = self._columns[label]
        out[idx] += val * z[label]
        return out

    def full(self, z) -> np.ndarray:
        out = np.asarray(self._apply(z), dtype=float)
        if self.offset is not None:
            out = out + self.offset
        return out

    def add_scaled_column(self, out: np.ndarray, k: int, scale: float) -> None:
        """In place ``out += scale * col_k`` (the linear part only)."""
        idx, val = self._columns[k]
        out[idx] += scale * val


def eval_full(op: FiniteSumOperator, z) -> np.ndarray:
    z = op.split.check(z)
    return op.full(z)


@dataclass
class HierarchicalProblem:
    """Upper-level data ``(F1, g1)`` and lower-level data ``(F2, g2)``.

    ``g1``/``g2`` return a float, possibly ``inf`` outside their domain.
    ``prox(beta, tau, point)`` computes ``prox_{tau (beta g1 + g2)}``.
    """

    split: BlockSplit
    F1: FiniteSumOperator
    F2: FiniteSumOperator
    g1: Callable[[np.ndarray], float]
    g2: Callable[[np.ndarray], float]
    prox: Callable[[float, float, np.ndarray], np.ndarray]
    L_F1: float
    L_F2: float
    kind: str = "custom"
    solution: Optional[np.ndarray] = None
    simplex_domain: bool = True
    extras: dict = field(default_factory=dict)

    def G(self, beta: float, z) -> float:
        g2 = self.g2(z)
        if not np.isfinite(g2):
            return float("inf")
        return beta * self.g1(z) + g2 if beta else g2


def eval_combined(beta: float, problem: HierarchicalProblem, z) -> np.ndarray:
    """``V(z) = beta * F1(z) + F2(z)``."""
    if beta < 0:
        raise ConfigError(f"regularisation weight must be >= 0, got {beta}")
    z = problem.split.check(z)
    return beta * eval_full(problem.F1, z) + eval_full(problem.F2, z)


def combined_component(beta: float, problem: HierarchicalProblem, label, z) -> np.ndarray:
    """Component ``V^a = beta F1^a + F2^a``; a label missing from one operator counts as zero."""
    out = np.zeros(problem.split.size)
    if label in problem.F1.labels:
        out += beta * problem.F1.component(label, z)
    if label in problem.F2.labels:
        out += problem.F2.component(label, z)
    return out


def combined_labels(problem: HierarchicalProblem) -> tuple:
    seen = list(problem.F1.labels)
    seen += [a for a in problem.F2.labels if a not in problem.F1.labels]
    return tuple(seen)
