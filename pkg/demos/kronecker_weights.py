"""Walk through weights of the Kronecker quiver and its 3-arrow cousin.

For each weight: the generic cokernel, the canonical decomposition and the
real/tame/wild tag of each summand.
"""

from semitorsion.algebra import builtin
from semitorsion.candecomp import canonical_decomposition, classify_weight
from semitorsion.present import cokernel, sample_presentation


def show(name, weights):
    alg = builtin(name)
    print(f"== {name}")
    for w in weights:
        M = cokernel(sample_presentation(alg, w, seed=1))
        dec = canonical_decomposition(alg, w)
        tags = [classify_weight(alg, s).tag for s in sorted(set(dec.summands))]
        print(f"{str(w):>9}  coker dims {M.dims}  summands {list(dec.summands)}  {tags}")


if __name__ == "__main__":
    show("k2", [(1, -1), (2, -2), (3, -2), (2, -3), (1, 1), (-1, 2)])
    show("k3", [(1, -1), (1, -2), (2, -3)])
