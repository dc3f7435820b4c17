import numpy as np
import pytest

from hvivr.core import ConfigError, eval_combined
from hvivr.geometry import EntropicGeometry, prox_simplex_pair
from hvivr.oracles import SamplingScheme
from hvivr.problems import EquilibriumSelection, LinearlyConstrained, feas_gap_game
from hvivr.schedules import ScheduleParams
from hvivr.solvers import (
    SolverParams,
    bregman_epoch,
    bregman_params,
    check_energy_bregman,
    check_energy_euclid,
    deterministic_eg_step,
    eg_step_size,
    ergodic_point,
    euclid_params,
    euclid_step,
    init_bregman,
    init_eg,
    init_euclid,
)

SCH = ScheduleParams(theta=0.1, alpha=0.9, delta=0.1, K=5)


def _equilibrium(rng, nu):
    mu, eta = rng.dirichlet(np.ones(nu)), rng.dirichlet(np.ones(nu))
    return np.r_[np.repeat(mu / 2, 2), np.repeat(eta / 2, 2)]


def _alg1(nu=2, seed=0, sch=SCH, **kw):
    p = EquilibriumSelection(nu)
    sc = SamplingScheme.static_importance(p)
    x0 = p.split.random_feasible(np.random.default_rng(seed + 1000))
    return p, sc, init_euclid(p, x0, seed=seed), euclid_params(p, sc, sch, **kw)


def test_alg1_rejects_adaptive():
    p = EquilibriumSelection(1)
    with pytest.raises(ConfigError):
        euclid_params(p, SamplingScheme("adaptive_l2"), SCH)
    st = init_euclid(p, p.split.uniform(), seed=0)
    with pytest.raises(ConfigError):
        euclid_step(st, p, SamplingScheme("adaptive_l1"), SolverParams(schedule=SCH, lipschitz=lambda b: 1.0))


def test_alg1_fixed_point_at_equilibrium(rng):
    p = EquilibriumSelection(3)
    z = _equilibrium(rng, 3)
    sc = SamplingScheme.static_importance(p)
    st = init_euclid(p, z, seed=1)
    prm = euclid_params(p, sc, SCH, beta_rule=lambda k: 0.0)
    for _ in range(50):
        euclid_step(st, p, sc, prm)
    np.testing.assert_allclose(st.x, z, atol=1e-12)


def test_alg1_reduces_to_eg(rng):
    p = EquilibriumSelection(1)
    x0 = p.split.random_feasible(rng)
    sch = ScheduleParams(theta=1.0, alpha=0.0, delta=0.1)
    tau = lambda k, b: eg_step_size(p, b)
    a = init_euclid(p, x0, seed=3)
    e = init_eg(p, x0)
    pa = SolverParams(schedule=sch, tau_rule=tau)
    for _ in range(10):
        euclid_step(a, p, SamplingScheme("full"), pa)
        deterministic_eg_step(e, p, pa)
        np.testing.assert_allclose(a.x, e.x, atol=1e-12)
        np.testing.assert_allclose(a.w, e.x, atol=1e-12)
    np.testing.assert_allclose(ergodic_point(a), ergodic_point(e), atol=1e-12)


def test_alg1_deterministic():
    runs = []
    for _ in range(2):
        p, sc, st, prm = _alg1(nu=1, seed=42)
        for _ in range(100):
            euclid_step(st, p, sc, prm)
        runs.append((st.x.copy(), st.w.copy(), ergodic_point(st)))
    for a, b in zip(*runs):
        assert np.array_equal(a, b)


def test_alg1_refresh_follows_bernoulli():
    p, sc, st, prm = _alg1(nu=1, seed=42, record_trace=True)
    shadow = np.random.default_rng(42)
    for _ in range(200):
        shadow.random(2)  # index draw
        expect = shadow.random() < SCH.theta
        euclid_step(st, p, sc, prm)
        assert st.refreshed == expect
        if expect:
            np.testing.assert_array_equal(st.w, st.x)


def test_alg1_caches_and_feasibility():
    p, sc, st, prm = _alg1(nu=3, seed=5)
    for _ in range(300):
        euclid_step(st, p, sc, prm)
        assert p.split.is_feasible(st.x, 1e-10) and p.split.is_feasible(st.w, 1e-10)
        beta = 0.37
        np.testing.assert_allclose(beta * st.F1w + st.F2w, eval_combined(beta, p, st.w), atol=1e-12)


def test_alg1_needs_lipschitz_for_constrained():
    p = LinearlyConstrained(1)
    sc = SamplingScheme("uniform")
    prm = euclid_params(p, sc, SCH)
    st = init_euclid(p, p.split.uniform(), seed=0)
    with pytest.raises(ConfigError):
        euclid_step(st, p, sc, prm)


def test_ergodic_average_recomputed_from_trace():
    p, sc, st, prm = _alg1(nu=2, seed=9, record_trace=True)
    for _ in range(200):
        euclid_step(st, p, sc, prm)
    num = sum(t.tau * t.y for t in st.history)
    den = sum(t.tau for t in st.history)
    np.testing.assert_allclose(ergodic_point(st), num / den, atol=1e-12)


def test_ergodic_examples():
    p = EquilibriumSelection(1)
    st = init_eg(p, p.split.uniform())
    with pytest.raises(ConfigError):
        ergodic_point(st)
    st.erg_sum = np.array([1.0, 0.0, 0.5, 0.5]) + np.array([0.0, 1.0, 0.5, 0.5])
    st.erg_weight = 2.0
    np.testing.assert_array_equal(ergodic_point(st)[:2], [0.5, 0.5])


def test_eg_hand_step():
    p = EquilibriumSelection(1)
    st = init_eg(p, [1.0, 0.0, 1.0, 0.0])
    prm = SolverParams(schedule=SCH, beta_rule=lambda k: 0.0, tau_rule=lambda k, b: 0.25)
    deterministic_eg_step(st, p, prm)
    np.testing.assert_allclose(st.last_y, [0.75, 0.25, 1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(st.x, [0.75, 0.25, 1.0, 0.0], atol=1e-15)


def test_eg_fixed_when_operator_vanishes(rng):
    p = EquilibriumSelection(2)
    z = _equilibrium(rng, 2)
    st = init_eg(p, z)
    prm = SolverParams(schedule=SCH, beta_rule=lambda k: 0.0)
    for _ in range(50):
        deterministic_eg_step(st, p, prm)
    np.testing.assert_allclose(st.x, z, atol=1e-12)


def test_eg_step_size():
    p = EquilibriumSelection(1)
    assert eg_step_size(p, 1.0) == pytest.approx(0.5 / 3)
    q = LinearlyConstrained(2)
    assert eg_step_size(q, 0.0) == pytest.approx(0.5 / 2)


def test_eg_gap_trend():
    p = EquilibriumSelection(10)
    st = init_eg(p, p.split.random_feasible(np.random.default_rng(0)))
    prm = SolverParams(schedule=SCH)
    gaps = {}
    for k in range(1, 1001):
        deterministic_eg_step(st, p, prm)
        if k in (10, 1000):
            gaps[k] = feas_gap_game(p.game, ergodic_point(st))
    assert gaps[1000] < gaps[10]


def _alg2(p, geom, K=5, seed=0, sch=None, **kw):
    sch = sch or ScheduleParams(theta=0.2, alpha=0.8, delta=0.1, K=K)
    x0 = p.split.random_feasible(np.random.default_rng(seed + 1000))
    sc = SamplingScheme("adaptive_l1" if geom == "entropic" else "adaptive_l2")
    return sc, init_bregman(p, x0, geom, K, seed=seed), bregman_params(p, geom, sch, **kw)


def test_bregman_init():
    p = EquilibriumSelection(2)
    x0 = p.split.random_feasible(np.random.default_rng(0))
    st = init_bregman(p, x0, "entropic", 4)
    assert len(st.prev) == 4
    for z in (*st.prev, st.x0, st.w):
        np.testing.assert_array_equal(z, x0)
    np.testing.assert_allclose(st.wbar, x0, atol=1e-15)
    with pytest.raises(ConfigError):
        init_bregman(p, x0, "entropic", 0)


def test_bregman_k1_matches_reference_step(rng):
    p = EquilibriumSelection(1)
    x0 = p.split.random_feasible(rng)
    sch = ScheduleParams(alpha=0.6, delta=0.1, K=1)
    st = init_bregman(p, x0, "euclidean", 1)
    prm = SolverParams(schedule=sch, tau_rule=lambda s, b: 0.2)
    bregman_epoch(st, p, SamplingScheme("full"), prm)
    beta = 1.0
    proj = lambda q: prox_simplex_pair(q, p.split)
    anchor = 0.6 * x0 + 0.4 * x0
    y = proj(anchor - 0.2 * eval_combined(beta, p, x0))
    x1 = proj(anchor - 0.2 * eval_combined(beta, p, y))
    np.testing.assert_allclose(st.x0, x1, atol=1e-15)
    np.testing.assert_allclose(st.w, x1, atol=1e-15)
    np.testing.assert_allclose(ergodic_point(st), y, atol=1e-15)


@pytest.mark.parametrize("geom", ["euclidean", "entropic"])
def test_bregman_fixed_point(geom, rng):
    p = EquilibriumSelection(2)
    z = _equilibrium(rng, 2)
    sc = SamplingScheme("adaptive_l1")
    st = init_bregman(p, z, geom, 3, seed=0)
    prm = bregman_params(p, geom, SCH, beta_rule=lambda s: 0.0)
    for _ in range(50):
        bregman_epoch(st, p, sc, prm)
    np.testing.assert_allclose(st.x0, z, atol=1e-12)
    np.testing.assert_allclose(st.w, z, atol=1e-12)


@pytest.mark.parametrize("geom", ["euclidean", "entropic"])
@pytest.mark.parametrize("kind", ["eq_selection", "lin_constrained"])
def test_bregman_invariants(geom, kind):
    p = EquilibriumSelection(2) if kind == "eq_selection" else LinearlyConstrained(2)
    sc, st, prm = _alg2(p, geom)
    for _ in range(30):
        bregman_epoch(st, p, sc, prm)
        for z in (st.w, st.wbar, st.x0, *st.prev):
            assert p.split.is_feasible(z, 1e-10)
            if geom == "entropic":
                assert np.all(z > 0)
        gap = st.geometry.grad(st.wbar) - np.mean([st.geometry.grad(x) for x in st.prev], axis=0)
        for blk in (gap[: p.split.n], gap[p.split.n:]):
            assert np.ptp(blk) <= 1e-10
            if geom == "euclidean":
                assert np.abs(blk).max() <= 1e-10
        np.testing.assert_allclose(0.5 * st.F1w + st.F2w, eval_combined(0.5, p, st.w), atol=1e-12)


def test_bregman_deterministic():
    p = LinearlyConstrained(2)
    out = []
    for _ in range(2):
        sc, st, prm = _alg2(p, "entropic", seed=7)
        for _ in range(20):
            bregman_epoch(st, p, sc, prm)
        out.append(ergodic_point(st))
    assert np.array_equal(*out)


def test_bregman_ergodic_recomputed():
    p = EquilibriumSelection(2)
    sc, st, prm = _alg2(p, "euclidean", record_trace=True)
    for _ in range(10):
        bregman_epoch(st, p, sc, prm)
    num = sum(t.tau * t.y for t in st.history)
    den = sum(t.tau for t in st.history)
    np.testing.assert_allclose(ergodic_point(st), num / den, atol=1e-12)


def test_energy_euclid_holds():
    p, sc, st, prm = _alg1(nu=2, seed=11, record_trace=True)
    probe_rng = np.random.default_rng(0)
    for _ in range(150):
        euclid_step(st, p, sc, prm)
        t = st.trace
        for z in (*p.split.random_feasible(probe_rng, size=5), t.y, t.x_next):
            rep = check_energy_euclid(t, z, p, SCH.alpha)
            assert rep.satisfied, rep
            assert rep.residual == pytest.approx(sum(rep.terms.values()) - np.sum((t.x_next - z) ** 2))
    rep = check_energy_euclid(st.trace, np.full(p.split.size, 2.0), p, SCH.alpha)
    assert rep.status == "rejected" and not rep.satisfied


@pytest.mark.parametrize("geom", ["euclidean", "entropic"])
def test_energy_bregman_holds(geom):
    p = LinearlyConstrained(2)
    sc, st, prm = _alg2(p, geom, record_trace=True)
    probe_rng = np.random.default_rng(0)
    for _ in range(20):
        bregman_epoch(st, p, sc, prm)
        for t in st.trace:
            for z in (*p.split.random_feasible(probe_rng, size=5), t.x_next):
                rep = check_energy_bregman(t, z, p, st.geometry, prm.alpha)
                assert rep.satisfied, rep
    bad = np.r_[-0.5, 1.5, np.full(p.split.size - 2, 0.0)]
    rep = check_energy_bregman(st.trace[0], bad, p, st.geometry, prm.alpha)
    assert rep.status == "rejected"


def test_energy_bregman_alpha_one():
    p = EquilibriumSelection(2)
    sch = ScheduleParams(alpha=1.0, delta=0.1, K=3)
    sc, st, prm = _alg2(p, "entropic", K=3, sch=sch, record_trace=True, tau_rule=lambda s, b: 0.05)
    probe_rng = np.random.default_rng(1)
    for _ in range(10):
        bregman_epoch(st, p, sc, prm)
        for t in st.trace:
            for z in p.split.random_feasible(probe_rng, size=5):
                assert check_energy_bregman(t, z, p, st.geometry, 1.0).satisfied
