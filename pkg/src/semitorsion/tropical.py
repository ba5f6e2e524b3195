"""Tropical F-polynomials and the stabilization check against hom/e.

``f_M`` needs the submodule lattice, so it is evaluated on a small-field
module; hom and e are evaluated on a copy over the algebra's own field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import Algebra
from .present import HomEPair, e_generic_pair, hom_e_generic
from .rep import Representation, lift, submodule_dimvectors

__all__ = ["NotFound", "StabilizationReport", "trop_f", "trop_f_dual", "wildness", "stabilization_n"]

NotFound = None


def trop_f(M: Representation, delta: Sequence[int]) -> int:
    """``max (dim L) . delta`` over submodules ``L`` of ``M``."""
    d = np.asarray(delta, dtype=np.int64)
    return max(int(np.dot(v, d)) for v in submodule_dimvectors(M))


def trop_f_dual(M: Representation, delta: Sequence[int]) -> int:
    """``max (dim N) . delta`` over quotients ``N`` of ``M``."""
    d = np.asarray(delta, dtype=np.int64)
    top = np.asarray(M.dims, dtype=np.int64)
    return max(int(np.dot(top - np.asarray(v), d)) for v in submodule_dimvectors(M))


@lru_cache(maxsize=4096)
def _wildness(alg: Algebra, delta: tuple, samples: int, seed: int) -> str:
    if not any(delta):
        return "zero"
    return "wild" if e_generic_pair(alg, delta, delta, samples, seed) > 0 else "non-wild"


def wildness(alg: Algebra, delta, samples: int = 16, seed: int = 0) -> str:
    """``wild`` when generic ``e(delta, delta) > 0``, else ``non-wild`` (or ``zero``).

    For decomposable weights this is the self-e reading of tameness.
    """
    return _wildness(alg, tuple(int(x) for x in delta), samples, seed)


@dataclass(frozen=True)
class StabilizationReport:
    n_found: int | None
    checked_multiples: tuple[tuple[int, bool], ...]
    wildness_note: str
    values: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return self.n_found is not None and all(b for _, b in self.checked_multiples)


def stabilization_n(
    alg: Algebra,
    M: Representation,
    delta,
    n_max: int = 8,
    samples: int = 16,
    seed: int = 0,
    large: Representation | None = None,
    hom_e: Callable[[tuple], HomEPair] | None = None,
) -> StabilizationReport:
    """Least ``n <= n_max`` with ``f_M(n delta) = hom`` and ``f^_M(-n delta) = e``.

    ``M`` is the small-field module; ``large`` (default: a lift of ``M``)
    is its counterpart over ``alg``.  ``hom_e`` may supply cached generic
    values keyed by the scaled weight.
    """
    delta = tuple(int(x) for x in delta)
    if large is None:
        large = M if M.alg.p == alg.p else lift(M, alg)
    if hom_e is None:
        def hom_e(w):
            return hom_e_generic(alg, w, large, samples, seed)

    values = {}

    def agrees(n: int) -> bool:
        if n not in values:
            w = tuple(n * x for x in delta)
            he = hom_e(w)
            tf, tfd = trop_f(M, w), trop_f_dual(M, tuple(-x for x in w))
            values[n] = (tf, he.hom, tfd, he.e)
        tf, h, tfd, e = values[n]
        return tf == h and tfd == e

    found = next((n for n in range(1, n_max + 1) if agrees(n)), NotFound)
    multiples = ()
    if found is not None:
        multiples = tuple((k, agrees(k)) for k in range(found, n_max + 1, found))
    return StabilizationReport(found, multiples, wildness(alg, delta, samples, seed), values)
