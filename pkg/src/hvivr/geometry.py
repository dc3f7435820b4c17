"""Euclidean and entropic geometry on a product of two simplices.

Both geometries expose the same small surface used by the solvers:
``divergence``, ``grad`` (a selection of the gradient of the
distance-generating function), ``three_point`` (the prox map with two
anchor points) and ``mirror_average``.
"""
from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .core import BlockSplit, ConfigError, DomainError, NumericalError, block_norms

_TINY = np.finfo(float).tiny


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex.

    Sort-and-threshold: with ``u`` sorted decreasingly, the threshold is
    ``(cumsum(u)[r] - 1) / (r + 1)`` for the largest ``r`` keeping
    ``u[r]`` above it.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ConfigError("project_simplex needs a non-empty 1-d vector")
    if not np.all(np.isfinite(v)):
        raise NumericalError("project_simplex received non-finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / ks > 0)[0][-1]
    return np.maximum(v - css[r] / (r + 1), 0.0)


def prox_simplex_pair(z, split: BlockSplit) -> np.ndarray:
    """Blockwise projection onto ``Delta_n x Delta_m``."""
    z = split.check(z)
    return np.concatenate([project_simplex(split.x(z)), project_simplex(split.y(z))])


def _blocks(split: BlockSplit):
    return (slice(0, split.n), slice(split.n, split.size))


class EuclideanGeometry:
    """``d(z) = 0.5 ||z||^2``; three-point maps go through a Euclidean prox."""

    name = "euclidean"
    norm_kind = "l2"
    dual_norm_kind = "l2"

    def __init__(self, split: BlockSplit, prox: Optional[Callable] = None):
        self.split = split
        # prox(beta, tau, point); the default ignores beta/tau (indicator of the simplices)
        self.prox = prox or (lambda beta, tau, p: prox_simplex_pair(p, split))

    def dgf(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * float(np.dot(x, x))

    def grad(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float).copy()

    def divergence(self, x, z) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
        return 0.5 * float(np.dot(d, d))

    def three_point(self, u, v, w, alpha: float, beta: float = 0.0, tau: float = 1.0) -> np.ndarray:
        return euclid_three_point(u, v, w, alpha, self.prox, beta, tau)

    def mirror_average(self, points: Sequence[np.ndarray]) -> np.ndarray:
        if len(points) == 0:
            raise ConfigError("mirror_average needs at least one point")
        return np.mean(np.asarray(points, dtype=float), axis=0)

    def norm(self, z) -> float:
        return block_norms(z, self.split, self.norm_kind)

    def dual_norm(self, z) -> float:
        return block_norms(z, self.split, self.dual_norm_kind)


class EntropicGeometry:
    """Sum of negative entropies of the two blocks.

    The divergence is the generalised KL divergence
    ``sum x log(x/z) - x + z``, which reduces to the blockwise KL divergence
    on normalised blocks and keeps the three-point identity valid for any
    positive triple.
    """

    name = "entropic"
    norm_kind = "l1_block"
    dual_norm_kind = "linf_block"

    def __init__(self, split: BlockSplit):
        self.split = split

    @staticmethod
    def _check_positive(z, what):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0) or not np.all(np.isfinite(z)):
            raise DomainError(f"{what} must be strictly positive under the entropic geometry")
        return z

    def dgf(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("negative entry under the entropic geometry")
        pos = x > 0
        return float(np.sum(x[pos] * np.log(x[pos])))

    def grad(self, x) -> np.ndarray:
        x = self._check_positive(x, "gradient point")
        return np.log(x) + 1.0

    def divergence(self, x, z) -> float:
        z = self._check_positive(z, "reference point")
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("negative entry under the entropic geometry")
        pos = x > 0
        return float(np.sum(x[pos] * np.log(x[pos] / z[pos])) - x.sum() + z.sum())

    def three_point(self, u, v, w, alpha: float, beta: float = 0.0, tau: float = 1.0) -> np.ndarray:
        return entropic_three_point(u, v, w, alpha, self.split)

    def mirror_average(self, points: Sequence[np.ndarray]) -> np.ndarray:
        if len(points) == 0:
            raise ConfigError("mirror_average needs at least one point")
        logs = np.log(np.asarray([self._check_positive(p, "averaged point") for p in points]))
        return _normalise_logs(logs.mean(axis=0), self.split)

    def norm(self, z) -> float:
        return block_norms(z, self.split, self.norm_kind)

    def dual_norm(self, z) -> float:
        return block_norms(z, self.split, self.dual_norm_kind)


def make_geometry(kind: str, split: BlockSplit, prox: Optional[Callable] = None):
    if kind in ("euclidean", "l2"):
        return EuclideanGeometry(split, prox)
    if kind in ("entropic", "l1"):
        return EntropicGeometry(split)
    raise ConfigError(f"unknown geometry {kind!r}")


def bregman_divergence(geom, x, z) -> float:
    return geom.divergence(x, z)


def _normalise_logs(logz: np.ndarray, split: BlockSplit) -> np.ndarray:
    out = np.empty_like(logz)
    for blk in _blocks(split):
        t = logz[blk] - logz[blk].max()
        e = np.maximum(np.exp(t), _TINY)
        s = e.sum()
        if not np.isfinite(s) or s <= 0:
            raise NumericalError("block vanished during entropic normalisation")
        out[blk] = e / s
    return out


def entropic_three_point(u, v, w, alpha: float, split: BlockSplit) -> np.ndarray:
    """``argmin <u,z> + alpha KL(z,v) + (1-alpha) KL(z,w)`` over ``Delta_n x Delta_m``.

    Closed form ``z_i ~ v_i^alpha w_i^(1-alpha) exp(-u_i)``, evaluated in the
    log domain with a per-block max shift.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    u = split.check(u)
    v = EntropicGeometry._check_positive(split.check(v), "anchor v")
    w = EntropicGeometry._check_positive(split.check(w), "anchor w")
    logz = -u
    if alpha > 0:
        logz = logz + alpha * np.log(v)
    if alpha < 1:
        logz = logz + (1.0 - alpha) * np.log(w)
    return _normalise_logs(logz, split)


def euclid_three_point(u, v, w, alpha: float, combined_prox: Callable, beta: float, tau: float) -> np.ndarray:
    """``prox_{tau G}(alpha v + (1-alpha) w - u)``: the Euclidean three-point map."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    point = alpha * np.asarray(v, dtype=float) + (1.0 - alpha) * np.asarray(w, dtype=float) - np.asarray(u, dtype=float)
    return combined_prox(beta, tau, point)


def mirror_average(geom, points: Sequence[np.ndarray]) -> np.ndarray:
    return geom.mirror_average(points)
