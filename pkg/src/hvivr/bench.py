"""Run orchestration: solver loop, epoch accounting and metric logging.

Costs are counted in epochs, one epoch being one full evaluation of the
combined operator.  Gap evaluations and the initial snapshot are free.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .core import ConfigError, NumericalError
from .oracles import SamplingScheme
from .problems import make_problem
from .solvers import (
    SolverParams,
    bregman_epoch,
    bregman_params,
    check_energy_bregman,
    check_energy_euclid,
    deterministic_eg_step,
    ergodic_point,
    euclid_params,
    euclid_step,
    init_bregman,
    init_eg,
    init_euclid,
)

COLUMNS = ("epochs", "iter_s", "iter_k", "feas_erg", "opt_erg", "dist_erg", "feas_w", "opt_w", "dist_w", "wall_s")
EPOCH_MODELS = ("paper", "component")
EVENTS = ("det_eg", "alg1_full", "alg1_partial", "alg2_outer")


def component_ratio(problem) -> float:
    """Cost of one sampled component pair relative to a full evaluation."""
    n, m = problem.split.n, problem.split.m
    if problem.kind == "eq_selection":
        return (n + m) / (2.0 * n * m)
    if problem.kind == "lin_constrained":
        nu = problem.nu
        return 2.0 * (n + m) / (2.0 * m * n + 2.0 * nu * (n + m))
    raise ConfigError(f"no component-cost ratio for problem kind {problem.kind!r}")


def epoch_cost(event: str, model: str, problem, params=None) -> float:
    """Epochs charged for one solver event.

    ``params`` supplies ``K`` for mirror-prox epochs (a :class:`ScheduleParams`
    or anything with a ``K`` attribute).
    """
    if model not in EPOCH_MODELS:
        raise ConfigError(f"unknown epoch cost model {model!r}; choose from {EPOCH_MODELS}")
    if event == "det_eg":
        return 1.0
    c = component_ratio(problem)
    if event == "alg1_full":
        return 1.0 + 2.0 * c
    if event == "alg1_partial":
        return 2.0 * c
    if event == "alg2_outer":
        K = params.K
        return 2.0 * K + 1.0 if model == "paper" else 1.0 + 2.0 * K * c
    raise ConfigError(f"unknown event {event!r}")


@dataclass
class RunResult:
    config: RunConfig
    rows: list = field(default_factory=list)
    events: list = field(default_factory=list)  # (event, cost) in execution order
    epochs: float = 0.0
    energy_checked: int = 0
    energy_violations: int = 0
    energy_min_residual: float = math.inf
    error: str = ""

    @property
    def final(self) -> dict:
        return self.rows[-1] if self.rows else {}

    def summary(self) -> str:
        f = self.final
        parts = [f"{self.config.name}: epochs={self.epochs:.6g}"]
        for key in ("feas_erg", "opt_erg", "dist_erg"):
            if f.get(key) is not None:
                parts.append(f"{key}={f[key]:.6g}")
        if self.energy_checked:
            parts.append(f"energy_violations={self.energy_violations}/{self.energy_checked}")
        if self.error:
            parts.append(f"error={self.error}")
        return " ".join(parts)


class RunFailed(RuntimeError):
    def __init__(self, result: RunResult, cause: Exception):
        super().__init__(str(cause))
        self.result = result


def start_point(problem, how: str, rng: np.random.Generator) -> np.ndarray:
    split = problem.split
    if how == "uniform":
        return split.uniform()
    if how == "vertex":
        z = np.zeros(split.size)
        z[0] = z[split.n] = 1.0
        return z
    if how == "random":
        return split.random_feasible(rng)
    raise ConfigError(f"unknown start {how!r}")


class _Runner:
    """Adapter giving every method the same step/metrics interface."""

    def __init__(self, cfg: RunConfig, problem, x0, rng):
        self.cfg, self.problem = cfg, problem
        kind = cfg.algorithm
        sch = cfg.schedule
        trace = cfg.energy_checks and kind != "det_eg"
        if kind == "det_eg":
            self.state = init_eg(problem, x0)
            self.params = SolverParams(schedule=sch)
        elif kind == "alg1":
            if cfg.sampling == "static":
                self.scheme = SamplingScheme.static_importance(problem)
            else:
                self.scheme = SamplingScheme("uniform")
            self.state = init_euclid(problem, x0, rng=rng)
            self.params = euclid_params(problem, self.scheme, sch, record_trace=trace)
        else:
            geom = "entropic" if kind == "alg2_l1" else "euclidean"
            self.scheme = SamplingScheme("adaptive_l1" if kind == "alg2_l1" else "adaptive_l2")
            self.state = init_bregman(problem, x0, geom, sch.K, rng=rng)
            self.params = bregman_params(problem, geom, sch, record_trace=trace)

    def step(self):
        """Advance one solver event; returns ``(event, traces)``."""
        kind, st = self.cfg.algorithm, self.state
        if kind == "det_eg":
            deterministic_eg_step(st, self.problem, self.params)
            return "det_eg", []
        if kind == "alg1":
            euclid_step(st, self.problem, self.scheme, self.params)
            traces = [st.trace] if self.params.record_trace else []
            st.history.clear()
            return ("alg1_full" if st.refreshed else "alg1_partial"), traces
        bregman_epoch(st, self.problem, self.scheme, self.params)
        traces = list(st.trace) if self.params.record_trace else []
        st.history.clear()
        return "alg2_outer", traces

    def counters(self):
        st = self.state
        if self.cfg.algorithm.startswith("alg2"):
            return st.s, st.s * st.K
        return None, st.k

    def snapshot_point(self):
        st = self.state
        return st.x if self.cfg.algorithm == "det_eg" else st.w

    def ergodic(self, x0):
        return x0 if self.state.erg_weight == 0 else ergodic_point(self.state)

    def energy(self, traces, probes):
        out = []
        alpha = self.cfg.schedule.alpha
        for t in traces:
            for p in probes:
                if self.cfg.algorithm == "alg1":
                    rep = check_energy_euclid(t, p, self.problem, alpha)
                else:
                    rep = check_energy_bregman(t, p, self.problem, self.state.geometry, alpha)
                if rep.status == "ok":
                    out.append(rep.residual)
        return out


def _metrics(problem, z, suffix):
    g = problem.gaps(z)
    return {f"feas_{suffix}": g["feas"], f"opt_{suffix}": g["opt"], f"dist_{suffix}": g["dist"]}


def run(cfg: RunConfig) -> RunResult:
    """Execute one configured benchmark run in memory.

    Raises :class:`RunFailed` (carrying the partial result) on a numerical
    failure; rows recorded up to that point stay valid.
    """
    problem = make_problem(cfg.problem_kind, cfg.nu)
    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    x0 = start_point(problem, cfg.start, np.random.default_rng(seeds[0]))
    runner = _Runner(cfg, problem, x0, np.random.default_rng(seeds[1]))
    probe_rng = np.random.default_rng(seeds[2])
    res = RunResult(config=cfg)
    t0 = time.perf_counter()

    def record():
        s, k = runner.counters()
        row = {"epochs": res.epochs, "iter_s": s, "iter_k": k}
        row.update(_metrics(problem, runner.ergodic(x0), "erg"))
        row.update(_metrics(problem, runner.snapshot_point(), "w"))
        row["wall_s"] = time.perf_counter() - t0 if cfg.wallclock else None
        res.rows.append(row)

    record()
    every = cfg.eval_every_epochs
    next_eval = every
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            while res.epochs < cfg.epoch_budget:
                event, traces = runner.step()
                cost = epoch_cost(event, cfg.epoch_model, problem, cfg.schedule)
                res.events.append((event, cost))
                res.epochs += cost
                if traces:
                    probes = problem.split.random_feasible(probe_rng, size=cfg.probes)
                    resid = runner.energy(traces, probes)
                    res.energy_checked += len(resid)
                    res.energy_violations += sum(r < -1e-9 for r in resid)
                    res.energy_min_residual = min([res.energy_min_residual, *resid])
                if res.epochs >= next_eval:
                    record()
                    next_eval = (math.floor(res.epochs / every) + 1) * every
            if res.rows[-1]["epochs"] != res.epochs:
                record()
    except (NumericalError, FloatingPointError) as exc:
        res.error = f"{type(exc).__name__}: {exc}"
        raise RunFailed(res, exc) from exc
    return res


# ------------------------------------------------------------------ CSV I/O


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in COLUMNS])
    return buf.getvalue()


def write_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path) -> dict:
    """Column name -> list of floats (``None`` for empty fields)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV") from None
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}")
        cols = {h: [] for h in header}
        for line in reader:
            if len(line) != len(header):
                raise ConfigError(f"{path}: ragged row {line}")
            for h, v in zip(header, line):
                cols[h].append(float(v) if v != "" else None)
    return cols


def write_events(path, events) -> None:
    """JSON lines ``{"event", "cost"}``; summing ``cost`` reproduces the epoch total."""
    with open(path, "w", encoding="utf-8") as fh:
        for ev, cost in events:
            fh.write(json.dumps({"event": ev, "cost": cost}) + "\n")


def read_events(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [(d["event"], d["cost"]) for d in map(json.loads, fh)]


def recompute_epochs(events, model: str, problem, params) -> float:
    """Re-derive the epoch total from event names alone."""
    return math.fsum(epoch_cost(ev, model, problem, params) for ev, _ in events)


# -------------------------------------------------------------- file driver


def _resolve(path, out_dir, default):
    path = path or default
    if out_dir and not os.path.isabs(path):
        path = os.path.join(out_dir, path)
    return path


def execute(cfg: RunConfig, out_dir=None):
    """Run ``cfg`` and write its outputs; returns ``(exit_code, summary, csv_path)``."""
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    csv_path = _resolve(cfg.csv_path, out_dir, f"{cfg.name}.csv")
    code = 0
    try:
        res = run(cfg)
    except RunFailed as exc:
        res, code = exc.result, 3
    write_csv(csv_path, res.rows)
    if cfg.events_path:
        write_events(_resolve(cfg.events_path, out_dir, None), res.events)
    if cfg.svg_path:
        from .plotting import emit_svg

        emit_svg([csv_path], _resolve(cfg.svg_path, out_dir, None), labels=[cfg.name])
    return code, res.summary(), csv_path


def _execute_star(args):
    return execute(*args)


def execute_many(configs, out_dir=None, jobs: int = 1):
    """Independent runs, optionally in parallel worker processes."""
    paths = [c.csv_path or f"{c.name}.csv" for c in configs]
    if len(set(paths)) != len(paths):
        raise ConfigError("configs would write the same CSV file; give each a distinct name or csv_path")
    if jobs <= 1 or len(configs) <= 1:
        return [execute(c, out_dir) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_execute_star, [(c, out_dir) for c in configs]))
