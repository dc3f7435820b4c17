"""Matching-pennies benchmark instances and their gap metrics.

The game matrix is ``M = I_nu (x) U`` with ``U = [[1, -1], [-1, 1]]``.  It
is never stored densely: rows and columns are 2-sparse and obtained by index
arithmetic, and products with ``M`` act on consecutive coordinate pairs.
"""
from __future__ import annotations

import warnings

import numpy as np

from .core import BlockSplit, ConfigError, HierarchicalProblem, SeparableOperator
from .geometry import project_simplex, prox_simplex_pair

_U = np.array([[1.0, -1.0], [-1.0, 1.0]])


class MatchingPenniesGame:
    """Block-diagonal Kronecker game ``M = I_nu (x) U`` of size ``2nu x 2nu``."""

    def __init__(self, nu: int):
        if int(nu) != nu or nu < 1:
            raise ConfigError(f"nu must be a positive integer, got {nu}")
        self.nu = int(nu)
        self.n = self.m = 2 * self.nu
        self.fro2 = 4.0 * self.nu
        self.max_abs = 1.0
        self.spectral = 2.0
        self.row_sqnorms = np.full(self.n, 2.0)
        self.col_sqnorms = np.full(self.m, 2.0)

    def matvec(self, y) -> np.ndarray:
        """``M @ y``."""
        p = np.asarray(y, dtype=float).reshape(self.nu, 2)
        d = p[:, 0] - p[:, 1]
        return np.stack([d, -d], axis=1).ravel()

    def rmatvec(self, x) -> np.ndarray:
        """``M.T @ x`` (``U`` is symmetric, so this equals ``M @ x``)."""
        return self.matvec(x)

    def row(self, i: int):
        """Nonzeros of row ``i`` as ``(column indices, values)``."""
        if not 0 <= i < self.n:
            raise ConfigError(f"row index {i} out of range [0, {self.n})")
        s = i // 2
        return np.array([2 * s, 2 * s + 1]), _U[i % 2].copy()

    def col(self, j: int):
        """Nonzeros of column ``j`` as ``(row indices, values)``."""
        if not 0 <= j < self.m:
            raise ConfigError(f"column index {j} out of range [0, {self.m})")
        s = j // 2
        return np.array([2 * s, 2 * s + 1]), _U[:, j % 2].copy()

    def dense(self) -> np.ndarray:
        return np.kron(np.eye(self.nu), _U)


def build_matching_pennies(nu: int) -> MatchingPenniesGame:
    return MatchingPenniesGame(nu)


def game_operator(game: MatchingPenniesGame) -> SeparableOperator:
    """``z -> (M y, -M^T x)`` with one component per coordinate of ``z``."""
    split = BlockSplit(game.n, game.m)
    n = game.n

    def column(k):
        if k < n:
            idx, val = game.row(k)  # x_k enters the y-slot through -M_k
            return idx + n, -val
        return game.col(k - n)

    def apply(z):
        return np.concatenate([game.matvec(z[n:]), -game.rmatvec(z[:n])])

    return SeparableOperator(split, column, apply, name="game", lipschitz=game.spectral)


def game_operator_components(game: MatchingPenniesGame, ij, z):
    """Pair of components indexed by ``(i, j)``: ``(M^j y_j, 0)`` and ``(0, -M_i x_i)``."""
    i, j = ij
    if not (0 <= i < game.n and 0 <= j < game.m):
        raise ConfigError(f"index {ij} out of range")
    z = np.asarray(z, dtype=float)
    n = game.n
    col_part = np.zeros(n + game.m)
    ridx, rval = game.col(j)
    col_part[ridx] = rval * z[n + j]
    row_part = np.zeros(n + game.m)
    cidx, cval = game.row(i)
    row_part[n + cidx] = -cval * z[i]
    return col_part, row_part


def _indicator(split: BlockSplit, tol: float = 1e-9):
    def g2(z):
        return 0.0 if split.is_feasible(z, tol) else float("inf")

    return g2


def _zero(z):
    return 0.0


class EquilibriumSelection(HierarchicalProblem):
    """Select the minimum-norm Nash equilibrium: ``F1(z) = z``, ``F2`` = game operator."""

    def __init__(self, nu: int):
        game = build_matching_pennies(nu)
        split = BlockSplit(game.n, game.m)

        identity = SeparableOperator(
            split, lambda k: (np.array([k]), np.array([1.0])), lambda z: np.array(z, dtype=float),
            name="identity", lipschitz=1.0,
        )
        super().__init__(
            split=split,
            F1=identity,
            F2=game_operator(game),
            g1=_zero,
            g2=_indicator(split),
            prox=lambda beta, tau, p: prox_simplex_pair(p, split),
            L_F1=1.0,
            L_F2=game.spectral,
            kind="eq_selection",
            solution=split.uniform(),
        )
        self.game = game
        self.nu = game.nu

    def gaps(self, z) -> dict:
        return {
            "feas": feas_gap_game(self.game, z),
            "opt": None,
            "dist": dist_to_opt_selection(z, self.split),
        }


class LinearlyConstrained(HierarchicalProblem):
    """Nash equilibrium subject to ``Bx + Cy = d``; ``F1`` = game, ``F2 = P(Bx + Cy - d)``."""

    def __init__(self, nu: int):
        game = build_matching_pennies(nu)
        split = BlockSplit(game.n, game.m)
        nu = game.nu
        sel = np.kron(np.eye(nu), np.array([[1.0, 0.0]]))
        B, C = sel.copy(), sel.copy()
        d = np.full(nu, 1.0 / nu)
        P = np.vstack([B.T, C.T])
        PB, PC = P @ B, P @ C
        offset = -P @ d
        n = game.n

        def column(k):
            vec = PB[:, k] if k < n else PC[:, k - n]
            idx = np.nonzero(vec)[0]
            return idx, vec[idx]

        def apply(z):
            return PB @ z[:n] + PC @ z[n:]

        L2 = float(np.linalg.norm(P, 2) ** 2)
        F2 = SeparableOperator(split, column, apply, offset=offset, name="constraint", lipschitz=L2)
        super().__init__(
            split=split,
            F1=game_operator(game),
            F2=F2,
            g1=_zero,
            g2=_indicator(split),
            prox=lambda beta, tau, p: prox_simplex_pair(p, split),
            L_F1=game.spectral,
            L_F2=L2,
            kind="lin_constrained",
        )
        self.game = game
        self.nu = nu
        self.B, self.C, self.d, self.P = B, C, d, P
        self.PB, self.PC = PB, PC

    def residual(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return self.B @ self.split.x(z) + self.C @ self.split.y(z) - self.d

    def penalty(self, z) -> float:
        """``0.5 ||Bx + Cy - d||^2``, whose gradient is ``F2``."""
        r = self.residual(z)
        return 0.5 * float(r @ r)

    def gaps(self, z) -> dict:
        opt, feas = gaps_linear(self, z)
        return {"feas": feas, "opt": opt, "dist": None}


PROBLEMS = {
    "eq_selection": EquilibriumSelection,
    "lin_constrained": LinearlyConstrained,
}


def make_problem(kind: str, nu: int) -> HierarchicalProblem:
    try:
        cls = PROBLEMS[kind]
    except KeyError:
        raise ConfigError(f"unknown problem kind {kind!r}; choose from {sorted(PROBLEMS)}") from None
    return cls(nu)


def feas_gap_game(game: MatchingPenniesGame, z, tol: float = 1e-8) -> float:
    """Duality gap ``max_j (M^T x)_j - min_i (M y)_i`` of the matrix game."""
    z = np.asarray(z, dtype=float)
    split = BlockSplit(game.n, game.m)
    if not split.is_feasible(z, tol):
        warnings.warn("gap evaluated at a point outside the simplex product", RuntimeWarning, stacklevel=2)
    x, y = split.x(z), split.y(z)
    return float(game.rmatvec(x).max() - game.matvec(y).min())


def dist_to_opt_selection(z, split: BlockSplit) -> float:
    """Squared distance to the unique selected equilibrium (the uniform point)."""
    diff = np.asarray(z, dtype=float) - split.uniform()
    return float(diff @ diff)


def nash_projection(game: MatchingPenniesGame, z) -> np.ndarray:
    """Nearest point of the Nash set ``{(mu (x) (1,1)/2, eta (x) (1,1)/2)}``.

    For one block the squared distance is ``0.5 ||2 xbar - mu||^2 + const``
    with ``xbar`` the pair averages, so ``mu`` is the simplex projection of
    ``2 xbar``.
    """
    z = np.asarray(z, dtype=float)
    out = []
    for blk in (z[: game.n], z[game.n :]):
        pair_mean = blk.reshape(game.nu, 2).mean(axis=1)
        mu = project_simplex(2.0 * pair_mean)
        out.append(np.repeat(0.5 * mu, 2))
    return np.concatenate(out)


def dist_to_S2_selection(game: MatchingPenniesGame, z) -> float:
    """Euclidean distance from ``z`` to the set of Nash equilibria."""
    z = np.asarray(z, dtype=float)
    return float(np.linalg.norm(z - nash_projection(game, z)))


def gaps_linear(instance: LinearlyConstrained, z):
    """``(opt_gap, feas_gap)`` = (game duality gap, ``||Bx + Cy - d||^2``)."""
    opt = feas_gap_game(instance.game, z)
    r = instance.residual(z)
    return opt, float(r @ r)


def gap_bifunction(F, g, x, y) -> float:
    """``H(x, y) = <F(y), x - y> + g(x) - g(y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(F.full(y) @ (x - y)) + g(x) - g(y)


def weak_sharpness_probe(problem: HierarchicalProblem, z, z_star, rho: float, dist=None):
    """Diagnostic ``(H(z, z*), H / dist(z, S2)^rho)`` for the lower level.

    ``dist`` defaults to the Nash-set distance of the matching-pennies game.
    The ratio is ``nan`` when ``z`` already lies in the solution set.
    """
    h = gap_bifunction(problem.F2, problem.g2, z, z_star)
    if dist is None:
        dist = dist_to_S2_selection(problem.game, z)
    ratio = h / dist**rho if dist > 0 else float("nan")
    return h, ratio
