"""Theorem harnesses.

Each harness turns one statement into finitely many checkable cases and
returns a :class:`Report`.  A failing case is data, not an exception.
Expensive generic hom/e values are cached in a :class:`Sweep` shared by
harnesses that run on the same algebra and settings.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._seeds import derive_seed, rng_for
from .algebra import Algebra
from .present import E_generic, e_generic_pair, hom_e_generic, hom_e_samples
from .rep import extension_middle, ext1, enumerate_submodules, hom_dim, quotient_rep, subrep
from .stability import (
    LimitFlags,
    TestSet,
    build_testset,
    cone_sample,
    e_tame_scan,
    exhaustive_classes,
    ind_set,
    limit_membership,
    membership,
    tf_equivalent,
    weight_grid,
)
from .tropical import stabilization_n, trop_f, trop_f_dual, wildness

__all__ = ["Case", "Report", "Sweep", "HARNESSES", "run_harness", "default_params", "FIXTURE_SETTINGS"]

# small field and exhaustive dimension cap per built-in fixture
FIXTURE_SETTINGS = {
    "a2": dict(q=2, dim_cap=(3, 3)),
    "k2": dict(q=3, dim_cap=(2, 2)),
    "a3n": dict(q=2, dim_cap=(2, 2, 2)),
    "k3": dict(q=2, dim_cap=(1, 1)),
}

TAME_NOTE = "tame for a general weight is read as generic e(theta, theta) = 0"
H_NOTE = (
    "superscript-h classes at level l: Tbar^h = {e(l theta, M) = 0}, Fbar^h = {hom(l theta, M) = 0}, "
    "W^h = Tbar^h and Fbar^h, T^h = left Hom-orthogonal of Fbar^h, F^h = right Hom-orthogonal of Tbar^h, "
    "orthogonals taken inside the test set"
)
TESTSET_NOTE = "classes are compared on a finite test set; a pass is evidence, not proof"


@dataclass
class Case:
    case_id: str
    inputs: dict
    expected: object
    got: object
    passed: bool
    witness: object = None

    def as_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "inputs": self.inputs,
            "expected": self.expected,
            "got": self.got,
            "pass": bool(self.passed),
            "witness": self.witness,
        }


@dataclass
class Report:
    harness: str
    cases: list[Case]
    notes: list[str] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    anomalies: list[str] = field(default_factory=list)
    seconds: float = 0.0  # not serialized: JSON output must be reproducible

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.passed]

    def as_dict(self) -> dict:
        return {
            "harness": self.harness,
            "notes": list(self.notes),
            "provenance": self.provenance,
            "anomalies": list(self.anomalies),
            "summary": {
                "cases": len(self.cases),
                "passed": sum(c.passed for c in self.cases),
                "failed": len(self.failures),
            },
            "cases": [c.as_dict() for c in self.cases],
        }


def _fixture_name(alg: Algebra) -> str | None:
    from .algebra import BUILTINS, builtin

    for name in BUILTINS:
        if builtin(name, alg.p).fingerprint == alg.fingerprint:
            return name
    return None


def default_params(alg: Algebra) -> dict:
    base = dict(samples=16, n_max=8, trials=24, threads=1, bound=3, grid_bound=2, cone_points=5)
    fx = FIXTURE_SETTINGS.get(_fixture_name(alg) or "", dict(q=2, dim_cap=(1,) * alg.n))
    base.update(fx)
    return base


def _w(x) -> list[int]:
    return [int(v) for v in x]


def _pmap(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


class Sweep:
    """Exhaustive test set plus cached per-sample hom/e values."""

    _registry: dict = {}

    def __init__(self, alg: Algebra, q: int, dim_cap, samples: int, seed: int):
        self.alg, self.q, self.samples, self.seed = alg, q, samples, seed
        self.dim_cap = tuple(int(x) for x in dim_cap)
        self.testset: TestSet = build_testset(alg, self.dim_cap, 0, seed, exhaustive=True, q=q)
        self.modules = exhaustive_classes(self.testset)
        self._samples: dict = {}
        self._ref: dict = {}
        self._hom: dict = {}
        self.touched: set = set()

    @classmethod
    def get(cls, alg: Algebra, params: dict, seed: int) -> "Sweep":
        key = (id(alg), params["q"], tuple(params["dim_cap"]), params["samples"], seed)
        if key not in cls._registry:
            cls._registry[key] = Sweep(alg, params["q"], params["dim_cap"], params["samples"], seed)
        return cls._registry[key]

    def sample_values(self, mi: int, w: tuple):
        key = (mi, w)
        if key not in self._samples:
            self._samples[key] = tuple(
                hom_e_samples(self.alg, w, self.modules[mi].large, self.samples, self.seed)
            )
        return self._samples[key]

    def generic(self, mi: int, w: tuple):
        return min(self.sample_values(mi, w), key=lambda h: h.hom)

    def reference(self, mi: int, w: tuple):
        key = (mi, w)
        if key not in self._ref:
            self._ref[key] = hom_e_generic(self.alg, w, self.modules[mi].large, self.samples, self.seed, tag="ref")
        return self._ref[key]

    def hom_e_fn(self, mi: int, record: bool = False):
        def fn(w):
            if record:
                self.touched.add((mi, w))
            return self.generic(mi, w)

        return fn

    def limit(self, mi: int, delta, n_max: int) -> LimitFlags:
        return limit_membership(self.alg, self.modules[mi].large, delta, n_max, self.samples, self.seed,
                                hom_e=self.hom_e_fn(mi, record=True))

    def hom_matrix(self) -> np.ndarray:
        if "H" not in self._hom:
            n = len(self.modules)
            H = np.zeros((n, n), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    H[i, j] = hom_dim(self.modules[i].large, self.modules[j].large)
            self._hom["H"] = H
        return self._hom["H"]

    def provenance(self) -> dict:
        out = self.testset.provenance
        out["modules"] = len(self.modules)
        out["large_field"] = self.alg.p
        return out


def _module_input(m) -> dict:
    return {"module": m.name, "dims": _w(m.dims)}


# -- harnesses --------------------------------------------------------------------------


def h_duality(alg, params, seed):
    sw = Sweep.get(alg, params, seed)
    grid = weight_grid(alg.n, params["bound"], zero=True)

    def case(mi):
        M = sw.modules[mi].small
        bad = None
        count = 0
        for d in grid:
            lhs = trop_f(M, d) - trop_f_dual(M, tuple(-x for x in d))
            rhs = int(np.dot(M.dims, d))
            if lhs != rhs:
                count += 1
                bad = bad or {"delta": _w(d), "lhs": lhs, "rhs": rhs}
        return Case(f"duality/{sw.modules[mi].name}", {**_module_input(sw.modules[mi]), "weights": len(grid)},
                    0, count, count == 0, bad)

    cases = _pmap(case, list(range(len(sw.modules))), params["threads"])
    return Report("duality", cases, [TESTSET_NOTE], sw.provenance(), list(sw.testset.anomalies))


def h_stabilization(alg, params, seed):
    sw = Sweep.get(alg, params, seed)
    grid = weight_grid(alg.n, params["bound"], zero=True)
    n_max = params["n_max"]
    for d in grid:
        wildness(alg, d, params["samples"], seed)

    def case(mi):
        m = sw.modules[mi]
        not_found = bad_multiple = nonwild_late = 0
        hist: dict = {}
        witness = None
        for d in grid:
            rep = stabilization_n(alg, m.small, d, n_max, params["samples"], seed, large=m.large,
                                  hom_e=sw.hom_e_fn(mi))
            hist[str(rep.n_found)] = hist.get(str(rep.n_found), 0) + 1
            problem = None
            if rep.n_found is None:
                not_found += 1
                problem = "not found"
            elif not all(b for _, b in rep.checked_multiples):
                bad_multiple += 1
                problem = "multiple fails"
            elif rep.wildness_note != "wild" and rep.n_found != 1:
                nonwild_late += 1
                problem = "non-wild with n > 1"
            if problem and witness is None:
                witness = {"delta": _w(d), "problem": problem, "wildness": rep.wildness_note,
                           "values": {str(k): list(v) for k, v in sorted(rep.values.items())}}
        got = {"not_found": not_found, "multiple_failures": bad_multiple, "nonwild_n_gt_1": nonwild_late,
               "n_found_histogram": dict(sorted(hist.items()))}
        ok = not (not_found or bad_multiple or nonwild_late)
        return Case(f"stabilization/{m.name}", {**_module_input(m), "weights": len(grid), "n_max": n_max},
                    {"not_found": 0, "multiple_failures": 0, "nonwild_n_gt_1": 0}, got, ok, witness)

    cases = _pmap(case, list(range(len(sw.modules))), params["threads"])
    return Report("stabilization", cases, [TAME_NOTE, TESTSET_NOTE], sw.provenance(), list(sw.testset.anomalies))


def h_thm_1_5(alg, params, seed):
    sw = Sweep.get(alg, params, seed)
    grid = weight_grid(alg.n, params["bound"], zero=True)
    n_max, N = params["n_max"], len(sw.modules)
    H = sw.hom_matrix()

    def levels(mi, d):
        return [sw.generic(mi, tuple(l * x for x in d)) for l in range(1, n_max + 1)]

    def per_module(mi):
        return {d: levels(mi, d) for d in grid}

    lv = _pmap(per_module, list(range(N)), params["threads"])
    for d in grid:
        wildness(alg, d, params["samples"], seed)

    def case(mi):
        m = sw.modules[mi]
        counts = dict(limit_F=0, limit_T=0, W=0, T_strict=0, F_strict=0, tame_level_one=0)
        witness = None
        for d in grid:
            flags = membership(m.small, d)
            lim = sw.limit(mi, d, n_max)
            checks = {
                "limit_F": lim.in_F_limit == flags.in_Fbar,
                "limit_T": lim.in_Tcheck_limit == flags.in_Tbar,
                "W": flags.in_W == any(h.hom == 0 and h.e == 0 for h in lv[mi][d]),
            }
            in_T_h = all(
                all(H[mi, j] == 0 for j in range(N) if lv[j][d][l].hom == 0) for l in range(n_max)
            )
            in_F_h = all(
                all(H[j, mi] == 0 for j in range(N) if lv[j][d][l].e == 0) for l in range(n_max)
            )
            checks["T_strict"] = in_T_h == flags.in_T
            checks["F_strict"] = in_F_h == flags.in_F
            tame = wildness(alg, d, params["samples"], seed) != "wild"
            checks["tame_level_one"] = not tame or (
                (lv[mi][d][0].hom == 0) == flags.in_Fbar and (lv[mi][d][0].e == 0) == flags.in_Tbar
            )
            for k, ok in checks.items():
                if not ok:
                    counts[k] += 1
                    if witness is None:
                        witness = {"delta": _w(d), "check": k, "flags": flags.as_dict(),
                                   "limit": [lim.witness_F, lim.witness_T]}
        return Case(f"thm_1_5/{m.name}", {**_module_input(m), "weights": len(grid), "n_max": n_max},
                    {k: 0 for k in counts}, counts, not any(counts.values()), witness)

    cases = _pmap(case, list(range(N)), params["threads"])
    return Report("thm_1_5", cases, [H_NOTE, TAME_NOTE, TESTSET_NOTE], sw.provenance(), list(sw.testset.anomalies))


def h_semicontinuity(alg, params, seed):
    """Every sample of the limit-membership runs against an independent generic value."""
    sw = Sweep.get(alg, params, seed)
    grid = weight_grid(alg.n, params["bound"], zero=True)
    for mi in range(len(sw.modules)):
        for d in grid:
            sw.limit(mi, d, params["n_max"])
    touched = sorted(sw.touched)
    below = attained = 0
    witness = None
    for mi, w in touched:
        ref = sw.reference(mi, w)
        vals = sw.sample_values(mi, w)
        if any(v.hom < ref.hom or v.e < ref.e for v in vals):
            below += 1
            witness = witness or {"module": sw.modules[mi].name, "weight": _w(w), "reference": [ref.hom, ref.e]}
        if any(v.hom == ref.hom for v in vals):
            attained += 1
    total = len(touched)
    ratio_ok = attained * 100 >= 99 * total
    cases = [
        Case("semicontinuity/lower-bound", {"evaluations": total, "samples": params["samples"]}, 0, below,
             below == 0, witness),
        Case("semicontinuity/attained", {"evaluations": total, "samples": params["samples"]},
             {"attained_at_least_permille": 990}, {"attained": attained, "of": total}, ratio_ok, None),
    ]
    return Report("semicontinuity", cases, [TESTSET_NOTE], sw.provenance(), list(sw.testset.anomalies))


def _lift_rows(rows: np.ndarray, q: int, p: int) -> np.ndarray:
    s = np.where(rows > q // 2, rows - q, rows)
    return np.mod(s, p).T


def h_lemma_tf(alg, params, seed):
    """Closure of the limit classes under submodules, quotients and extensions."""
    sw = Sweep.get(alg, params, seed)
    grid = weight_grid(alg.n, params["grid_bound"])
    n_max, samples, q = params["n_max"], params["samples"], sw.q
    target = params.get("triples", 240)
    rng = rng_for(seed, "lemma_tf")

    def flags_of(M, d):
        return limit_membership(alg, M, d, n_max, samples, seed)

    pool = []  # (delta, member index, kind)
    for d in grid:
        for mi in range(len(sw.modules)):
            if sw.modules[mi].large.total_dim == 0:
                continue
            lim = sw.limit(mi, d, n_max)
            if lim.in_F_limit:
                pool.append((d, mi, "sub"))
            if lim.in_Tcheck_limit:
                pool.append((d, mi, "quotient"))
    order = rng.permutation(len(pool))
    cases: list[Case] = []
    skipped = 0
    for k in order:
        if len(cases) >= target:
            break
        d, mi, kind = pool[int(k)]
        m = sw.modules[mi]
        subs = [s for s in enumerate_submodules(m.small) if 0 < sum(x.shape[0] for x in s) < m.small.total_dim]
        if not subs:
            continue
        sub = subs[int(rng.integers(len(subs)))]
        bases = [_lift_rows(x, q, alg.p) for x in sub]
        try:
            if kind == "sub":
                X = subrep(m.large, bases)
            else:
                X, _ = quotient_rep(m.large, bases)
        except ValueError:
            skipped += 1
            continue
        f = flags_of(X, d)
        got = f.in_F_limit if kind == "sub" else f.in_Tcheck_limit
        cases.append(Case(f"lemma_tf/{kind}/{len(cases)}", {"delta": _w(d), "member": m.name, "kind": kind,
                                                           "dims": _w(X.dims)}, True, bool(got), bool(got),
                          None if got else {"witness_n": [f.witness_F, f.witness_T]}))
    # extensions of members by members
    ext_target = params.get("extension_triples", max(40, target // 4))
    made = tries = 0
    while made < ext_target and tries < 50 * ext_target:
        tries += 1
        d = grid[int(rng.integers(len(grid)))]
        kind = "sub" if rng.integers(2) == 0 else "quotient"
        members = [mi for mi in range(len(sw.modules)) if sw.modules[mi].large.total_dim
                   and (sw.limit(mi, d, n_max).in_F_limit if kind == "sub" else sw.limit(mi, d, n_max).in_Tcheck_limit)]
        if len(members) < 1:
            continue
        a, b = (sw.modules[members[int(rng.integers(len(members)))]] for _ in range(2))
        if ext1(a.large, b.large) == 0:
            continue
        E = extension_middle(a.large, b.large, seed=derive_seed(seed, "lemma_tf-ext", tries))
        f = flags_of(E, d)
        got = f.in_F_limit if kind == "sub" else f.in_Tcheck_limit
        cases.append(Case(f"lemma_tf/extension/{made}", {"delta": _w(d), "ends": [a.name, b.name],
                                                         "class": "F" if kind == "sub" else "T"},
                          True, bool(got), bool(got), None))
        made += 1
    notes = [TESTSET_NOTE, f"{skipped} lifted subspaces were not submodules over the large field and were skipped"]
    return Report("lemma_tf", cases, notes, sw.provenance(), list(sw.testset.anomalies))


def _ind(alg, theta, params, seed, cache):
    if theta not in cache:
        cache[theta] = ind_set(alg, theta, params["samples"], seed, params["trials"]).weights
    return cache[theta]


def h_thm_1_1(alg, params, seed):
    sw = Sweep.get(alg, params, seed)
    mods = [m.small for m in sw.modules]
    cache: dict = {}
    cases = []
    for theta in weight_grid(alg.n, params["grid_bound"]):
        ind = _ind(alg, theta, params, seed, cache)
        pts = cone_sample(ind, params["cone_points"], derive_seed(seed, "thm_1_1", theta))
        bad = None
        for eta in pts:
            ok, cex = tf_equivalent(theta, eta, mods)
            if not ok:
                name = sw.modules[mods.index(cex[0])].name
                bad = {"eta": _w(eta), "module": name, "flag": cex[1]}
                break
        cases.append(Case(f"thm_1_1/{','.join(map(str, theta))}",
                          {"theta": _w(theta), "ind": [_w(w) for w in ind], "cone_points": [_w(e) for e in pts]},
                          True, bad is None, bad is None, bad))
    return Report("thm_1_1", cases, [TESTSET_NOTE], sw.provenance(), list(sw.testset.anomalies))


def h_thm_1_4(alg, params, seed):
    sw = Sweep.get(alg, params, seed)
    mods = [m.small for m in sw.modules]
    scan = e_tame_scan(alg, params["bound"], params["samples"], seed)
    tame = not scan
    cache: dict = {}
    grid = weight_grid(alg.n, params["grid_bound"])
    notes = [TESTSET_NOTE]
    if not tame:
        notes.append("not E-tame within the scan bound; only Ind equality => TF equivalence is checked")
    cases = []
    for theta, eta in itertools.product(grid, grid):
        tf, cex = tf_equivalent(theta, eta, mods)
        same = _ind(alg, theta, params, seed, cache) == _ind(alg, eta, params, seed, cache)
        ok = (tf == same) if tame else (tf or not same)
        w = None
        if not ok:
            w = {"counterexample": None if cex is None else [sw.modules[mods.index(cex[0])].name, cex[1]]}
        cases.append(Case(f"thm_1_4/{','.join(map(str, theta))}/{','.join(map(str, eta))}",
                          {"theta": _w(theta), "eta": _w(eta)}, {"tf_equivalent": same} if tame else "consistent",
                          {"tf_equivalent": tf, "same_ind": same}, ok, w))
    prov = sw.provenance()
    prov["e_tame_scan"] = {"bound": params["bound"], "violations": [_w(v) for v in scan]}
    return Report("thm_1_4", cases, notes, prov, list(sw.testset.anomalies))


def h_e_equivalence(alg, params, seed):
    grid = weight_grid(alg.n, params["grid_bound"], zero=True)
    pairs = list(itertools.product(grid, grid))
    count = min(params.get("pairs", 120), len(pairs))
    rng = rng_for(seed, "e_equivalence")
    pick = sorted(int(k) for k in rng.choice(len(pairs), size=count, replace=False))
    cases = []
    for k in pick:
        d, g = pairs[k]
        E = E_generic(alg, d, g, params["samples"], seed)
        e = e_generic_pair(alg, d, g, params["samples"], seed)
        cases.append(Case(f"e_equivalence/{','.join(map(str, d))}/{','.join(map(str, g))}",
                          {"delta": _w(d), "eta": _w(g)}, e, E, E == e,
                          None if E == e else {"seed": int(seed), "tags": ["E-d", "E-g", "pair-d", "pair-g"]}))
    return Report("e_equivalence", cases, [], {"pairs": count, "large_field": alg.p})


HARNESSES: dict[str, Callable] = {
    "thm_1_1": h_thm_1_1,
    "thm_1_5": h_thm_1_5,
    "thm_1_4": h_thm_1_4,
    "lemma_tf": h_lemma_tf,
    "duality": h_duality,
    "stabilization": h_stabilization,
    "semicontinuity": h_semicontinuity,
    "e_equivalence": h_e_equivalence,
}


def run_harness(alg: Algebra, name: str, params: dict | None = None, seed: int = 0) -> Report:
    if name not in HARNESSES:
        raise KeyError(f"unknown harness {name!r}; choose from {sorted(HARNESSES)}")
    full = default_params(alg)
    full.update({k: v for k, v in (params or {}).items() if v is not None})
    full["dim_cap"] = tuple(full["dim_cap"])
    t0 = time.perf_counter()
    rep = HARNESSES[name](alg, full, seed)
    rep.seconds = time.perf_counter() - t0
    return rep
