"""Selecting the minimum-norm equilibrium of a matching-pennies game.

Runs the deterministic extragradient baseline, the Euclidean
variance-reduced method and both mirror-prox variants on nu = 10 for a
fixed epoch budget, then plots the gaps.
"""
import os

from hvivr.bench import execute
from hvivr.config import load_config
from hvivr.plotting import emit_svg

here = os.path.dirname(os.path.abspath(__file__))
out = os.path.join(here, "out")
paths = []
for name in ("eg", "alg1", "alg2_l1", "alg2_l2"):
    cfg = load_config(os.path.join(here, "configs", f"selection_{name}.json"))
    code, summary, path = execute(cfg, out)
    print(summary)
    paths.append(path)

emit_svg(paths, os.path.join(out, "selection.svg"), metrics=["feas", "dist"])
print("wrote", os.path.join(out, "selection.svg"))
