"""Torsion classes attached to a weight, test sets and TF equivalence.

Two routes to the same classes are implemented.  ``membership`` reads the
sign conditions off the submodule lattice of a small-field module;
``limit_membership`` uses generic hom and e of scaled weights over the
algebra's own field.  Test modules carry both a small-field version and a
large-field version so the routes can be compared.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._seeds import derive_seed, rng_for
from .algebra import Algebra, rep_projective
from .candecomp import canonical_decomposition
from .present import HomEPair, cokernel, e_generic_pair, hom_e_generic, sample_presentation
from .rep import (
    EnumerationCapExceeded,
    Representation,
    all_representations,
    direct_sum,
    dual,
    ext1,
    extension_middle,
    hom_dim,
    iso_test,
    lift,
    rep_simple,
    rep_zero,
    submodule_dimvectors,
)
from .tropical import trop_f, trop_f_dual

log = logging.getLogger(__name__)

__all__ = [
    "MembershipFlags",
    "LimitFlags",
    "TestModule",
    "TestSet",
    "IndSet",
    "membership",
    "limit_membership",
    "build_testset",
    "tf_equivalent",
    "ind_set",
    "cone_sample",
    "e_tame_scan",
    "run_harness",
]

FLAG_NAMES = ("in_T", "in_Tbar", "in_Fbar", "in_F", "in_W")


@dataclass(frozen=True)
class MembershipFlags:
    in_T: bool
    in_Tbar: bool
    in_Fbar: bool
    in_F: bool
    in_W: bool

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in FLAG_NAMES}


def membership(M: Representation, delta) -> MembershipFlags:
    """Flags for the four classes of ``delta`` and the semistable class."""
    d = np.asarray(delta, dtype=np.int64)
    top = np.asarray(M.dims, dtype=np.int64)
    subs = [np.asarray(v, dtype=np.int64) for v in submodule_dimvectors(M)]
    in_fbar = trop_f(M, delta) == 0
    in_tbar = trop_f_dual(M, -d) == 0
    in_f = all(int(v @ d) < 0 for v in subs if v.any())
    in_t = all(int((top - v) @ d) > 0 for v in subs if (v != top).any())
    return MembershipFlags(in_t, in_tbar, in_fbar, in_f, in_tbar and in_fbar)


@dataclass(frozen=True)
class LimitFlags:
    """``in_F_limit``: some ``hom(n delta, M) = 0``; ``in_Tcheck_limit``: some ``e(n delta, M) = 0``.

    Witnesses are the least such ``n``, or ``None``.
    """

    in_F_limit: bool
    in_Tcheck_limit: bool
    witness_F: int | None
    witness_T: int | None


def limit_membership(
    alg: Algebra,
    M: Representation,
    delta,
    n_max: int = 8,
    samples: int = 16,
    seed: int = 0,
    hom_e: Callable[[tuple], HomEPair] | None = None,
) -> LimitFlags:
    if M.alg.p != alg.p:
        M = lift(M, alg)
    if hom_e is None:
        def hom_e(w):
            return hom_e_generic(alg, w, M, samples, seed)

    wf = wt = None
    for n in range(1, n_max + 1):
        he = hom_e(tuple(n * int(x) for x in delta))
        if wf is None and he.hom == 0:
            wf = n
        if wt is None and he.e == 0:
            wt = n
        if wf is not None and wt is not None:
            break
    return LimitFlags(wf is not None, wt is not None, wf, wt)


# -- test sets ------------------------------------------------------------------


@dataclass(eq=False)
class TestModule:
    name: str
    tag: str  # simple | projective | injective-dual | sampled-cokernel | extension | exhaustive | zero
    small: Representation
    large: Representation

    @property
    def dims(self) -> tuple[int, ...]:
        return self.small.dims


@dataclass(eq=False)
class TestSet:
    alg: Algebra
    small_alg: Algebra
    modules: list[TestModule]
    dim_cap: tuple[int, ...]
    exhaustive: bool
    anomalies: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.modules)

    def __iter__(self):
        return iter(self.modules)

    @property
    def provenance(self) -> dict:
        out: dict = {}
        for m in self.modules:
            out[m.tag] = out.get(m.tag, 0) + 1
        return {
            "small_field": self.small_alg.p,
            "dim_cap": list(self.dim_cap),
            "exhaustive": self.exhaustive,
            "tags": dict(sorted(out.items())),
        }


def _rebase(M: Representation, alg: Algebra) -> Representation:
    return Representation(alg, M.dims, M.maps)


def _invariants(M: Representation) -> tuple:
    """Cheap isomorphism invariants used to bucket candidates."""
    p = M.p
    from . import exactlin as el

    ranks = tuple(el.rank(M.path_matrix(k), p) if M.path_matrix(k).size else 0 for k in range(M.alg.dim))
    simples = [rep_simple(M.alg, i) for i in range(M.alg.n)]
    soc = tuple(hom_dim(S, M) for S in simples)
    top = tuple(hom_dim(M, S) for S in simples)
    return (M.dims, ranks, soc, top, hom_dim(M, M))


def _faithful(small: Representation, large: Representation, probes) -> bool:
    """Structure checks that should agree between the two fields."""
    from . import exactlin as el

    for k in range(small.alg.dim):
        a, b = small.path_matrix(k), large.path_matrix(k)
        if a.size and el.rank(a, small.p) != el.rank(b, large.p):
            return False
    if hom_dim(small, small) != hom_dim(large, large):
        return False
    for ps, pl in probes:
        if hom_dim(ps, small) != hom_dim(pl, large) or hom_dim(small, ps) != hom_dim(large, pl):
            return False
    return True


def _iso_classes(mods: list[Representation], seed: int) -> list[list[Representation]]:
    buckets: dict = {}
    for M in mods:
        classes = buckets.setdefault(_invariants(M), [])
        for cl in classes:
            if iso_test(cl[0], M, seed):
                cl.append(M)
                break
        else:
            classes.append([M])
    return [cl for key in sorted(buckets, key=repr) for cl in buckets[key]]


def _sparse_order(M: Representation):
    return (M.nonzeros(), [tuple(m.ravel()) for m in M.maps])


def build_testset(
    alg: Algebra,
    dim_cap: Sequence[int],
    count: int = 0,
    seed: int = 0,
    exhaustive: bool = False,
    q: int = 2,
    extensions: int | None = None,
) -> TestSet:
    """Simples, projectives, injective duals, sampled cokernels and extensions.

    With ``exhaustive`` every module with dims ``<= dim_cap`` over ``F_q`` is
    added up to isomorphism.  Each module also gets a large-field version
    over ``alg``: the sparsest member of its class whose lift passes a
    structure comparison (path ranks, hom dimensions against simples and
    projectives); failures are recorded as anomalies.
    """
    dim_cap = tuple(int(x) for x in dim_cap)
    if len(dim_cap) != alg.n:
        raise ValueError("dim_cap needs one entry per vertex")
    small_alg = alg.with_field(q) if alg.p != q else alg
    anomalies: list[str] = []
    probes = []
    for i in range(alg.n):
        probes.append((rep_simple(small_alg, i), rep_simple(alg, i)))
        probes.append((rep_projective(small_alg, i), rep_projective(alg, i)))

    def large_of(cands: list[Representation], name: str, extra: Sequence[Representation] = ()) -> Representation | None:
        for c in sorted(cands, key=_sparse_order)[:6]:
            try:
                L = lift(c, alg)
            except ValueError:
                continue
            if _faithful(c, L, probes):
                return L
        for L in extra:
            if _faithful(cands[0], L, probes):
                return L
        anomalies.append(f"{name}: no faithful lift to F_{alg.p} among class representatives")
        return None

    modules: list[TestModule] = []
    for i in range(alg.n):
        modules.append(TestModule(f"S{i + 1}", "simple", rep_simple(small_alg, i), rep_simple(alg, i)))
    for i in range(alg.n):
        modules.append(TestModule(f"P{i + 1}", "projective", rep_projective(small_alg, i), rep_projective(alg, i)))
    for i in range(alg.n):
        Is = _rebase(dual(rep_projective(small_alg.opposite, i)), small_alg)
        Il = _rebase(dual(rep_projective(alg.opposite, i)), alg)
        modules.append(TestModule(f"I{i + 1}", "injective-dual", Is, Il))

    rng = rng_for(seed, "testset", dim_cap, count)
    made = attempts = 0
    while made < count and attempts < 50 * (count + 1):
        attempts += 1
        w = tuple(int(x) for x in rng.integers(-2, 3, size=alg.n))
        if not any(x > 0 for x in w):
            continue
        s = derive_seed(seed, "testset-coker", attempts)
        Qs = cokernel(sample_presentation(small_alg, w, s))
        if any(a > b for a, b in zip(Qs.dims, dim_cap)) or Qs.total_dim == 0:
            continue
        Ql = cokernel(sample_presentation(alg, w, s))
        L = large_of([Qs], f"coker:{list(w)}:{s}", extra=[Ql] if Ql.dims == Qs.dims else [])
        if Ql.dims != Qs.dims:
            anomalies.append(f"coker:{list(w)}:{s}: small-field cokernel dims {Qs.dims} differ from large-field {Ql.dims}")
        if L is not None:
            modules.append(TestModule(f"coker:{','.join(map(str, w))}:{s}", "sampled-cokernel", Qs, L))
            made += 1

    n_ext = count if extensions is None else extensions
    base = list(modules)
    pairs = [(a, b) for a in base for b in base]
    order = rng.permutation(len(pairs)) if pairs else []
    made = 0
    for k in order:
        if made >= n_ext:
            break
        a, b = pairs[int(k)]
        if any(x + y > c for x, y, c in zip(a.dims, b.dims, dim_cap)) or ext1(a.small, b.small) == 0:
            continue
        E = extension_middle(a.small, b.small, seed=derive_seed(seed, "testset-ext", int(k)))
        L = large_of([E], f"ext({a.name},{b.name})")
        if L is not None:
            modules.append(TestModule(f"ext({a.name},{b.name})", "extension", E, L))
            made += 1

    if exhaustive:
        cands: list[Representation] = []
        for dims in itertools.product(*[range(c + 1) for c in dim_cap]):
            cands.extend(all_representations(small_alg, dims))
        for cl in _iso_classes(cands, seed):
            M = cl[0]
            if M.total_dim == 0:
                modules.append(TestModule("0", "zero", _rebase(rep_zero(small_alg), small_alg), rep_zero(alg)))
                continue
            rep = sorted(cl, key=_sparse_order)[0]
            L = large_of(cl, f"class {M.dims}")
            if L is not None:
                name = "X" + str(len([m for m in modules if m.tag == "exhaustive"]) + 1)
                modules.append(TestModule(name, "exhaustive", rep, L))
    return TestSet(alg, small_alg, modules, dim_cap, exhaustive, anomalies)


def exhaustive_classes(ts: TestSet) -> list[TestModule]:
    return [m for m in ts.modules if m.tag in ("exhaustive", "zero")]


# -- TF equivalence, Ind sets, cones ----------------------------------------------------


def tf_equivalent(theta, eta, testset) -> tuple[bool, tuple | None]:
    """Compare the closed classes of ``theta`` and ``eta`` on every test module.

    ``testset`` is a ``TestSet`` or a list of small-field modules.  Returns
    ``(True, None)`` or ``(False, (module, flag))`` for the first
    disagreement.
    """
    mods = [m.small for m in testset] if isinstance(testset, TestSet) else list(testset)
    if not mods:
        raise ValueError("empty test set")
    names = [m.name for m in testset] if isinstance(testset, TestSet) else None
    for k, M in enumerate(mods):
        for flag, fn in (("in_Tbar", _tbar), ("in_Fbar", _fbar)):
            if fn(M, theta) != fn(M, eta):
                return False, (names[k] if names else M, flag)
    return True, None


def _fbar(M, delta) -> bool:
    return trop_f(M, delta) == 0


def _tbar(M, delta) -> bool:
    return trop_f_dual(M, tuple(-int(x) for x in delta)) == 0


@dataclass(frozen=True)
class IndSet:
    weights: tuple[tuple[int, ...], ...]


def ind_set(alg: Algebra, theta, samples: int = 16, seed: int = 0, trials: int = 24) -> IndSet:
    theta = tuple(int(x) for x in theta)
    if not any(theta):
        raise ValueError("Ind is defined for nonzero weights")
    dec = canonical_decomposition(alg, theta, samples, seed, trials)
    return IndSet(tuple(sorted(set(dec.summands))))


def cone_sample(ind: IndSet, k: int, seed: int = 0) -> list[tuple[int, ...]]:
    """``k`` points ``sum p_i theta_i`` with each ``p_i`` in ``{1..5}``."""
    ws = ind.weights if isinstance(ind, IndSet) else tuple(tuple(w) for w in ind)
    if not ws:
        raise ValueError("empty Ind set")
    rng = rng_for(seed, "cone", [list(w) for w in ws], k)
    basis = np.asarray(ws, dtype=np.int64)
    out = []
    for _ in range(k):
        coef = rng.integers(1, 6, size=len(ws))
        out.append(tuple(int(x) for x in coef @ basis))
    return out


def weight_grid(n: int, bound: int, zero: bool = False) -> list[tuple[int, ...]]:
    return [w for w in itertools.product(range(-bound, bound + 1), repeat=n) if zero or any(w)]


def e_tame_scan(alg: Algebra, bound: int, samples: int = 16, seed: int = 0) -> list[tuple[int, ...]]:
    """Weights with ``||theta|| <= bound`` and generic ``e(theta, theta) > 0``."""
    if bound < 1:
        raise ValueError("bound must be positive")
    return [w for w in weight_grid(alg.n, bound) if e_generic_pair(alg, w, w, samples, seed) > 0]


def run_harness(alg: Algebra, name: str, params: dict | None = None, seed: int = 0):
    """Run a theorem harness; see ``semitorsion.harness``."""
    from .harness import run_harness as _run

    return _run(alg, name, params or {}, seed)
