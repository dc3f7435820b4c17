"""Simplex projection, Bregman divergences and the two three-point maps."""
import numpy as np

from hvivr import (
    BlockSplit,
    EntropicGeometry,
    EuclideanGeometry,
    entropic_three_point,
    project_simplex,
    prox_simplex_pair,
)

print(project_simplex([2.0, 0.0]))            # [1. 0.]
print(project_simplex([0.6, 0.6, 0.6]))       # all 1/3

split = BlockSplit(2, 2)
print(prox_simplex_pair([2.0, 0.0, 0.5, 0.5], split))

# KL from a vertex to the centre of the 2-simplex is log 2
ent = EntropicGeometry(split)
print(ent.divergence([1.0, 0.0, 0.5, 0.5], [0.5, 0.5, 0.5, 0.5]), np.log(2))

# closed-form entropic step: x-block tilts away from the penalised coordinate
half = np.full(4, 0.5)
print(entropic_three_point([np.log(2), 0, 0, 0], half, half, 0.5, split))

# three-point identity on a random interior triple
rng = np.random.default_rng(0)
for geom in (EuclideanGeometry(split), ent):
    x, y, z = split.random_feasible(rng, size=3)
    lhs = (geom.grad(x) - geom.grad(y)) @ (z - x)
    rhs = geom.divergence(z, y) - geom.divergence(z, x) - geom.divergence(x, y)
    print(type(geom).__name__, lhs - rhs)

# mirror averaging: geometric mean per block for the entropic case
pts = [np.array([0.25, 0.75, 0.5, 0.5]), np.array([0.75, 0.25, 0.5, 0.5])]
print(ent.mirror_average(pts))
