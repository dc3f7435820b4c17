"""Nash equilibrium under linear constraints, solved with mirror prox.

The Euclidean method is not available here because static importance
sampling would need nonzero columns everywhere; the adaptive schemes of
the mirror-prox method handle it.
"""
import numpy as np

from hvivr import LinearlyConstrained, SamplingScheme, ScheduleParams
from hvivr.solvers import bregman_epoch, bregman_params, ergodic_point, init_bregman

p = LinearlyConstrained(5)
sch = ScheduleParams(theta=0.1, alpha=0.9, delta=0.1, K=10)
x0 = p.split.random_feasible(np.random.default_rng(0))
for geom, scheme in (("entropic", "adaptive_l1"), ("euclidean", "adaptive_l2")):
    st = init_bregman(p, x0, geom, sch.K, seed=0)
    prm = bregman_params(p, geom, sch)
    sc = SamplingScheme(scheme)
    for s in range(1, 401):
        bregman_epoch(st, p, sc, prm)
        if s in (1, 10, 100, 400):
            g = p.gaps(ergodic_point(st))
            print(f"{geom:9s} s={s:4d} feas={g['feas']:.3e} opt={g['opt']:.3e}")
