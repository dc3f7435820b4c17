"""Variance-reduced extragradient / mirror prox and the deterministic baseline.

Each method keeps its state in a small dataclass and advances it with a
step function that mutates and returns the state.  The snapshot operator
values ``F1(w)`` and ``F2(w)`` are cached separately so the Tikhonov weight
can change between iterations without a new full evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .core import ConfigError, HierarchicalProblem, NumericalError, ensure_finite, eval_full
from .geometry import make_geometry
from .oracles import (
    OracleSample,
    SamplingScheme,
    default_formula,
    lipschitz_bound,
    oracle_difference,
    sample_index,
)
from .schedules import ScheduleParams, beta_bregman, beta_euclid, tau_bregman, tau_euclid


@dataclass
class SolverParams:
    """Schedule constants plus optional overrides.

    ``lipschitz(beta)`` gives the oracle bound used in the step rule;
    ``beta_rule(k)`` and ``tau_rule(k, beta)`` replace the default
    sequences entirely (``k`` is the epoch counter ``s`` for Algorithm 2).
    """

    schedule: ScheduleParams = field(default_factory=ScheduleParams)
    lipschitz: Optional[Callable[[float], float]] = None
    beta_rule: Optional[Callable[[int], float]] = None
    tau_rule: Optional[Callable[[int, float], float]] = None
    record_trace: bool = False

    @property
    def alpha(self) -> float:
        return self.schedule.alpha


def _ergodic(total, weight):
    if weight <= 0:
        raise ConfigError("no step taken yet; the ergodic average is undefined")
    return total / weight


def _refresh(problem, w):
    return eval_full(problem.F1, w), eval_full(problem.F2, w)


def _check_feasible(problem, z, what):
    ensure_finite(z, what)
    if problem.simplex_domain and not problem.split.is_feasible(z, 1e-9):
        raise NumericalError(f"{what} left the feasible set")
    return z


# ---------------------------------------------------------------- Algorithm 1


@dataclass
class EuclidTrace:
    k: int
    x: np.ndarray
    w: np.ndarray
    z: np.ndarray
    y: np.ndarray
    x_next: np.ndarray
    sample: OracleSample
    tau: float
    beta: float
    A: np.ndarray
    diff: np.ndarray  # V^xi(y) - V^xi(w)
    refreshed: bool


@dataclass
class EuclidState:
    x: np.ndarray
    w: np.ndarray
    F1w: np.ndarray
    F2w: np.ndarray
    rng: np.random.Generator
    k: int = 0
    erg_sum: Optional[np.ndarray] = None
    erg_weight: float = 0.0
    refreshed: bool = True
    trace: Optional[EuclidTrace] = None
    history: List[EuclidTrace] = field(default_factory=list)


def init_euclid(problem: HierarchicalProblem, x0, seed=None, rng=None) -> EuclidState:
    x0 = problem.split.check(x0).copy()
    F1w, F2w = _refresh(problem, x0)
    rng = rng if rng is not None else np.random.default_rng(seed)
    return EuclidState(x=x0, w=x0.copy(), F1w=F1w, F2w=F2w, rng=rng, erg_sum=np.zeros_like(x0))


def euclid_params(problem, scheme: SamplingScheme, schedule: ScheduleParams, **kw) -> SolverParams:
    """Default Algorithm-1 parameters: ``beta_k = a/(k+b)^delta``, ``tau_k = gamma sqrt(theta) / L_k``."""
    if scheme.adaptive:
        raise ConfigError("Algorithm 1 needs iteration-independent sampling; adaptive schemes are rejected")
    if "lipschitz" not in kw and problem.kind == "eq_selection":
        kw["lipschitz"] = lambda beta: lipschitz_bound("euclid_eq_selection", beta, problem, scheme).value
    return SolverParams(schedule=schedule, **kw)


def _euclid_beta_tau(state, params: SolverParams):
    sch = params.schedule
    beta = params.beta_rule(state.k) if params.beta_rule else beta_euclid(state.k, sch.a, sch.b, sch.delta)
    if params.tau_rule:
        tau = params.tau_rule(state.k, beta)
    else:
        if params.lipschitz is None:
            raise ConfigError("no Lipschitz bound configured for the step rule")
        tau = tau_euclid(params.lipschitz(beta), sch.theta, sch.gamma)
    return beta, tau


def euclid_step(state: EuclidState, problem: HierarchicalProblem, scheme: SamplingScheme,
                params: SolverParams) -> EuclidState:
    """One iteration of hierarchical extragradient with variance reduction."""
    if scheme.adaptive:
        raise ConfigError("Algorithm 1 needs iteration-independent sampling; adaptive schemes are rejected")
    sch = params.schedule
    alpha = sch.alpha
    beta, tau = _euclid_beta_tau(state, params)
    x, w = state.x, state.w

    z = alpha * x + (1.0 - alpha) * w
    Vw = beta * state.F1w + state.F2w
    y = _check_feasible(problem, problem.prox(beta, tau, z - tau * Vw), "y")
    sample = sample_index(scheme, state.rng, problem.split)
    diff = oracle_difference(problem, beta, sample, y, w)
    A = Vw + diff
    x_next = _check_feasible(problem, problem.prox(beta, tau, z - tau * A), "x")

    refreshed = bool(state.rng.random() < sch.theta)
    if refreshed:
        state.w = x_next.copy()
        state.F1w, state.F2w = _refresh(problem, state.w)

    state.erg_sum = state.erg_sum + tau * y
    state.erg_weight += tau
    if params.record_trace:
        state.trace = EuclidTrace(state.k, x, w, z, y, x_next, sample, tau, beta, A, diff, refreshed)
        state.history.append(state.trace)
    state.x = x_next
    state.refreshed = refreshed
    state.k += 1
    return state


# --------------------------------------------------------- deterministic EG


@dataclass
class EGState:
    x: np.ndarray
    k: int = 0
    erg_sum: Optional[np.ndarray] = None
    erg_weight: float = 0.0
    last_y: Optional[np.ndarray] = None
    history: list = field(default_factory=list)


def init_eg(problem: HierarchicalProblem, x0) -> EGState:
    x0 = problem.split.check(x0).copy()
    return EGState(x=x0, erg_sum=np.zeros_like(x0))


def eg_step_size(problem: HierarchicalProblem, beta: float, gamma: float = 0.5) -> float:
    return gamma / (beta * problem.L_F1 + problem.L_F2)


def deterministic_eg_step(state: EGState, problem: HierarchicalProblem, params: SolverParams) -> EGState:
    sch = params.schedule
    beta = params.beta_rule(state.k) if params.beta_rule else beta_euclid(state.k, sch.a, sch.b, sch.delta)
    tau = params.tau_rule(state.k, beta) if params.tau_rule else eg_step_size(problem, beta, sch.gamma)
    x = state.x
    Vx = beta * eval_full(problem.F1, x) + eval_full(problem.F2, x)
    y = _check_feasible(problem, problem.prox(beta, tau, x - tau * Vx), "y")
    Vy = beta * eval_full(problem.F1, y) + eval_full(problem.F2, y)
    state.x = _check_feasible(problem, problem.prox(beta, tau, x - tau * Vy), "x")
    state.erg_sum = state.erg_sum + tau * y
    state.erg_weight += tau
    state.last_y = y
    if params.record_trace:
        state.history.append((tau, y))
    state.k += 1
    return state


# ---------------------------------------------------------------- Algorithm 2


@dataclass
class BregmanTrace:
    s: int
    k: int
    x: np.ndarray
    y: np.ndarray
    x_next: np.ndarray
    w: np.ndarray
    wbar: np.ndarray
    sample: OracleSample
    tau: float
    beta: float
    Vw: np.ndarray
    A: np.ndarray


@dataclass
class BregmanState:
    x0: np.ndarray
    prev: List[np.ndarray]
    w: np.ndarray
    wbar: np.ndarray
    F1w: np.ndarray
    F2w: np.ndarray
    rng: np.random.Generator
    geometry: object
    s: int = 0
    erg_sum: Optional[np.ndarray] = None
    erg_weight: float = 0.0  # sum of tau_s; the average divides by K times this
    K: int = 1
    trace: List[BregmanTrace] = field(default_factory=list)
    history: List[BregmanTrace] = field(default_factory=list)


def init_bregman(problem: HierarchicalProblem, x0, geometry, K: int, seed=None, rng=None) -> BregmanState:
    """``x_j^{-1} = x_0^0 = w^0`` for all ``j``."""
    if K < 1:
        raise ConfigError("K must be >= 1")
    if isinstance(geometry, str):
        geometry = make_geometry(geometry, problem.split, problem.prox)
    x0 = problem.split.check(x0).copy()
    F1w, F2w = _refresh(problem, x0)
    rng = rng if rng is not None else np.random.default_rng(seed)
    return BregmanState(
        x0=x0, prev=[x0.copy() for _ in range(K)], w=x0.copy(),
        wbar=geometry.mirror_average([x0] * K), F1w=F1w, F2w=F2w, rng=rng,
        geometry=geometry, erg_sum=np.zeros_like(x0), K=K,
    )


def bregman_params(problem, geometry: str, schedule: ScheduleParams, **kw) -> SolverParams:
    """Default Algorithm-2 parameters with the instance's closed-form ``L_s``."""
    if "lipschitz" not in kw and problem.kind in ("eq_selection", "lin_constrained"):
        formula = default_formula(problem.kind, "alg2_l1" if geometry in ("entropic", "l1") else "alg2_l2")
        kw["lipschitz"] = lambda beta: lipschitz_bound(formula, beta, problem).value
    return SolverParams(schedule=schedule, **kw)


def _bregman_beta_tau(state, params: SolverParams):
    sch = params.schedule
    beta = params.beta_rule(state.s) if params.beta_rule else beta_bregman(state.s, state.K, sch.delta)
    if params.tau_rule:
        tau = params.tau_rule(state.s, beta)
    else:
        if params.lipschitz is None:
            raise ConfigError("no Lipschitz bound configured for the step rule")
        tau = tau_bregman(params.lipschitz(beta), sch.alpha)
    return beta, tau


def bregman_epoch(state: BregmanState, problem: HierarchicalProblem, scheme: SamplingScheme,
                  params: SolverParams) -> BregmanState:
    """One outer iteration (``K`` inner steps) of hierarchical mirror prox with variance reduction."""
    geom = state.geometry
    alpha = params.alpha
    beta, tau = _bregman_beta_tau(state, params)
    Vw = beta * state.F1w + state.F2w
    w, wbar = state.w, state.wbar
    u_y = tau * Vw

    x = state.x0
    xs, ys = [], []
    traces = []
    for k in range(state.K):
        y = _check_feasible(problem, geom.three_point(u_y, x, wbar, alpha, beta, tau), "y")
        sample = sample_index(scheme, state.rng, problem.split, context=(y, w))
        A = Vw + oracle_difference(problem, beta, sample, y, w)
        x_next = _check_feasible(problem, geom.three_point(tau * A, x, wbar, alpha, beta, tau), "x")
        if params.record_trace:
            traces.append(BregmanTrace(state.s, k, x, y, x_next, w, wbar, sample, tau, beta, Vw, A))
        xs.append(x_next)
        ys.append(y)
        x = x_next

    state.w = np.mean(np.asarray(xs), axis=0)
    state.wbar = geom.mirror_average(xs)
    state.x0 = xs[-1]
    state.prev = xs
    state.F1w, state.F2w = _refresh(problem, state.w)
    state.erg_sum = state.erg_sum + tau * np.sum(np.asarray(ys), axis=0)
    state.erg_weight += tau
    state.trace = traces
    if params.record_trace:
        state.history.extend(traces)
    state.s += 1
    return state


def ergodic_point(state) -> np.ndarray:
    """Step-size weighted average of the ``y`` iterates."""
    if isinstance(state, BregmanState):
        return _ergodic(state.erg_sum, state.K * state.erg_weight)
    return _ergodic(state.erg_sum, state.erg_weight)


# ------------------------------------------------------------ energy checks


@dataclass
class EnergyReport:
    iteration: int
    residual: float
    status: str = "ok"  # "ok" | "rejected"
    terms: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.status == "ok" and self.residual >= -1e-9


def _sq(v):
    return float(np.dot(v, v))


def check_energy_euclid(trace: EuclidTrace, probe, problem: HierarchicalProblem, alpha: float) -> EnergyReport:
    """Residual ``RHS - LHS`` of the pathwise one-step inequality of Algorithm 1.

    Uses the sampled quantities stored in ``trace``; non-negative means the
    inequality holds at ``probe``.
    """
    probe = np.asarray(probe, dtype=float)
    G_x = problem.G(trace.beta, probe)
    if not np.isfinite(G_x):
        return EnergyReport(trace.k, float("nan"), "rejected")
    t = trace
    G_y = problem.G(t.beta, t.y)
    terms = {
        "anchor": alpha * _sq(t.x - probe) + (1 - alpha) * _sq(t.w - probe),
        "pull": -alpha * _sq(t.y - t.x) - (1 - alpha) * _sq(t.y - t.w),
        "noise": 2 * t.tau * float(np.dot(-t.diff, t.x_next - t.y)),
        "g": 2 * t.tau * (G_x - G_y),
        "operator": 2 * t.tau * float(np.dot(t.A, probe - t.y)),
        "gap": -_sq(t.x_next - t.y),
    }
    lhs = _sq(t.x_next - probe)
    return EnergyReport(t.k, sum(terms.values()) - lhs, "ok", terms)


def check_energy_bregman(trace: BregmanTrace, probe, problem: HierarchicalProblem, geometry,
                         alpha: float) -> EnergyReport:
    """Residual ``LHS - RHS`` of the summed prox inequalities of one inner step of Algorithm 2."""
    probe = np.asarray(probe, dtype=float)
    G_x = problem.G(trace.beta, probe)
    if not np.isfinite(G_x) or np.any(probe < 0):
        return EnergyReport(trace.k, float("nan"), "rejected")
    t = trace
    D = geometry.divergence
    lhs = t.tau * (G_x - problem.G(t.beta, t.y) + float(np.dot(t.A, probe - t.x_next))
                   + float(np.dot(t.Vw, t.x_next - t.y)))
    terms = {
        "probe": D(probe, t.x_next),
        "step": D(t.x_next, t.y),
        "anchor": alpha * (D(t.y, t.x) - D(probe, t.x)),
        "mirror": (1 - alpha) * (D(t.y, t.wbar) - D(probe, t.wbar)),
    }
    return EnergyReport(t.k, lhs - sum(terms.values()), "ok", terms)
