"""Tropical F-values against generic hom/e for the (1,1) regular Kronecker module.

Prints, for each scaled weight n*delta, the four numbers the stabilization
check compares.
"""

import numpy as np

from semitorsion.algebra import builtin
from semitorsion.rep import Representation, lift
from semitorsion.tropical import stabilization_n

K2 = builtin("k2")
M = Representation(K2.with_field(3), (1, 1), (np.array([[1]]), np.array([[2]])))
for delta in [(1, -1), (2, -1), (-1, 1), (1, -2)]:
    r = stabilization_n(K2, M, delta, n_max=4, large=lift(M, K2))
    print(f"delta {delta}: n = {r.n_found} ({r.wildness_note})")
    for n, (f, h, fd, e) in sorted(r.values.items()):
        print(f"   n={n}: f={f} hom={h}   f_dual={fd} e={e}")
