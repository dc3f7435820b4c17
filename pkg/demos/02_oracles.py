"""Stochastic oracles: unbiasedness by enumeration and the Lipschitz bounds."""
import numpy as np

from hvivr import (
    EquilibriumSelection,
    LinearlyConstrained,
    SamplingScheme,
    empirical_lipschitz_check,
    eval_combined,
    exhaustive_expectation,
    lipschitz_bound,
    sample_index,
)

rng = np.random.default_rng(1)
p = EquilibriumSelection(2)
z = p.split.random_feasible(rng)
ctx = (p.split.random_feasible(rng), p.split.random_feasible(rng))

# every scheme averages back to the exact combined operator
for sc in (SamplingScheme("uniform"), SamplingScheme.static_importance(p), SamplingScheme("adaptive_l2")):
    err = np.abs(exhaustive_expectation(sc, p, 0.5, z, ctx) - eval_combined(0.5, p, z)).max()
    print(sc.kind, err)

# one draw: the pair (i, j) and its probability
s = sample_index(SamplingScheme("adaptive_l1"), rng, p.split, ctx)
print(s)

# closed-form bound vs the exact expectation over all index pairs
q = LinearlyConstrained(3)
for formula, scheme, norm in (("l1_constrained", "adaptive_l1", "l1_block"), ("l2_constrained", "adaptive_l2", "l2")):
    L = lipschitz_bound(formula, 0.8, q).value
    rep = empirical_lipschitz_check(SamplingScheme(scheme), q, 0.8, L, 50, rng, mode="mean_square", norm=norm)
    print(formula, round(L, 4), rep)
