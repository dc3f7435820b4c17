import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hvivr.core import (
    BlockSplit,
    ConfigError,
    FiniteSumOperator,
    NumericalError,
    block_norms,
    combined_component,
    combined_labels,
    ensure_finite,
    eval_combined,
    eval_full,
)
from hvivr.problems import EquilibriumSelection, LinearlyConstrained, build_matching_pennies, game_operator

from conftest import instances


def test_blocksplit_rejects_empty_blocks():
    with pytest.raises(ConfigError):
        BlockSplit(0, 2)


def test_blocksplit_join_and_views():
    s = BlockSplit(2, 3)
    z = s.join([1, 2], [3, 4, 5])
    assert s.size == 5
    np.testing.assert_array_equal(s.x(z), [1, 2])
    np.testing.assert_array_equal(s.y(z), [3, 4, 5])
    with pytest.raises(ConfigError):
        s.join([1], [3, 4, 5])


def test_random_feasible_is_feasible(rng):
    s = BlockSplit(4, 6)
    pts = s.random_feasible(rng, size=50)
    assert pts.shape == (50, 10)
    assert all(s.is_feasible(p) for p in pts)


def test_ensure_finite():
    with pytest.raises(NumericalError):
        ensure_finite(np.array([1.0, np.nan]))


def test_game_operator_at_uniform_is_zero():
    op = game_operator(build_matching_pennies(1))
    np.testing.assert_array_equal(eval_full(op, [0.5, 0.5, 0.5, 0.5]), np.zeros(4))


def test_game_operator_at_pure_strategies():
    op = game_operator(build_matching_pennies(1))
    np.testing.assert_array_equal(eval_full(op, [1.0, 0.0, 1.0, 0.0]), [1.0, -1.0, -1.0, 1.0])


def test_eval_full_dimension_mismatch():
    op = game_operator(build_matching_pennies(1))
    with pytest.raises(ConfigError):
        eval_full(op, np.ones(5))


def test_eval_combined_beta_zero_is_lower_level(rng):
    p = LinearlyConstrained(2)
    z = p.split.random_feasible(rng)
    np.testing.assert_array_equal(eval_combined(0.0, p, z), eval_full(p.F2, z))


def test_eval_combined_same_operators_doubles(rng):
    p = EquilibriumSelection(2)
    p.F1 = p.F2
    z = p.split.random_feasible(rng)
    np.testing.assert_allclose(eval_combined(1.0, p, z), 2 * eval_full(p.F2, z), rtol=0, atol=1e-15)


def test_eval_combined_uniform_selection_gives_identity():
    p = EquilibriumSelection(100)
    z = p.split.uniform()
    np.testing.assert_allclose(eval_combined(1.0, p, z), z, atol=1e-15)


def test_eval_combined_negative_beta():
    p = EquilibriumSelection(1)
    with pytest.raises(ConfigError):
        eval_combined(-0.1, p, p.split.uniform())


def test_block_norm_examples():
    s = BlockSplit(2, 2)
    z = np.array([1.0, 0.0, 0.0, 1.0])
    assert block_norms(z, s, "l1_block") == pytest.approx(np.sqrt(2), abs=1e-15)
    assert block_norms(z, s, "linf_block") == pytest.approx(np.sqrt(2), abs=1e-15)
    assert block_norms([3.0, 4.0, 0.0, 0.0], s, "l2") == 5.0
    with pytest.raises(ConfigError):
        block_norms(z, s, "l7")


@pytest.mark.parametrize("problem", instances((1, 2, 4)), ids=lambda p: f"{p.kind}-{p.nu}")
def test_full_equals_component_sum(problem, rng):
    for _ in range(5):
        z = problem.split.random_feasible(rng)
        for op in (problem.F1, problem.F2):
            np.testing.assert_allclose(op.full(z), op.sum_components(z), rtol=0, atol=1e-12)


@pytest.mark.parametrize("problem", instances((1, 3)), ids=lambda p: f"{p.kind}-{p.nu}")
def test_combined_components_sum_to_combined(problem, rng):
    z = problem.split.random_feasible(rng)
    beta = 0.7
    total = sum(combined_component(beta, problem, a, z) for a in combined_labels(problem))
    np.testing.assert_allclose(total, eval_combined(beta, problem, z), atol=1e-12)


def test_constrained_labels_include_constant():
    p = LinearlyConstrained(2)
    assert "const" in p.F2.labels
    assert "const" not in p.F1.labels


def test_generic_finite_sum_operator():
    s = BlockSplit(1, 1)
    op = FiniteSumOperator(s, ["a", "b"], lambda lab, z: z if lab == "a" else 2 * z)
    np.testing.assert_array_equal(op.full(np.array([1.0, 2.0])), [3.0, 6.0])


@pytest.mark.parametrize("problem", instances((1, 2, 5)), ids=lambda p: f"{p.kind}-{p.nu}")
def test_monotone_spot_check(problem, rng):
    for _ in range(1000 // 6):
        z, zp = problem.split.random_feasible(rng), problem.split.random_feasible(rng)
        d = eval_combined(0.5, problem, z) - eval_combined(0.5, problem, zp)
        assert float(d @ (z - zp)) >= -1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.floats(0, 3), st.integers(0, 2**32 - 1))
def test_linearity(nu, beta, seed):
    rng = np.random.default_rng(seed)
    for p in (EquilibriumSelection(nu), LinearlyConstrained(nu)):
        z, w = rng.normal(size=(2, p.split.size))
        # the constrained F2 is affine; linearity holds for the homogeneous part
        shift = eval_combined(beta, p, np.zeros(p.split.size))
        lhs = eval_combined(beta, p, z + w) - shift
        rhs = (eval_combined(beta, p, z) - shift) + (eval_combined(beta, p, w) - shift)
        scale = max(1.0, np.abs(lhs).max())
        assert np.abs(lhs - rhs).max() <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_norm_duality(n, m, seed):
    rng = np.random.default_rng(seed)
    s = BlockSplit(n, m)
    u, z = rng.normal(size=(2, n + m))
    assert abs(u @ z) <= block_norms(u, s, "linf_block") * block_norms(z, s, "l1_block") * (1 + 1e-12)
