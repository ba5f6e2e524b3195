"""TF classes of weights on A2, read off the exhaustive F_2 test set.

Weights are grouped by the (Tbar, Fbar) flag pattern; each group should
match exactly one Ind set.
"""

from collections import defaultdict

from semitorsion.algebra import builtin
from semitorsion.stability import build_testset, ind_set, membership, weight_grid

alg = builtin("a2")
ts = build_testset(alg, (3, 3), exhaustive=True, q=2)
classes = defaultdict(list)
for w in weight_grid(2, 2):
    key = tuple((membership(m.small, w).in_Tbar, membership(m.small, w).in_Fbar) for m in ts)
    classes[key].append(w)

print(f"{len(ts)} test modules, {len(classes)} TF classes on the grid")
for ws in classes.values():
    inds = {ind_set(alg, w).weights for w in ws}
    print(f"{len(ws):2d} weights  Ind {sorted(inds)}  e.g. {ws[:4]}")
