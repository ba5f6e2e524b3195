"""Direct-sum splitting of presentations and canonical decompositions.

Splitting works in the strict endomorphism algebra of the complex, pairs
``(s, t)`` with ``d s = t d``.  A random element whose minimal polynomial has
two coprime factors yields an idempotent; its images on ``P-`` and ``P+``
are again sums of indecomposable projectives and carry the summand.

Over ``F_p`` an indecomposable summand may have endomorphism residue field
``F_{p^k}``; over the algebraic closure it breaks into ``k`` conjugate
summands of equal weight, and decompositions report it that way.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import exactlin as el
from ._seeds import derive_seed, rng_for
from .algebra import Algebra
from .present import (
    E_hom,
    Presentation,
    compose,
    e_generic_pair,
    hom_mask,
    identity_map,
    left_compose_matrix,
    right_compose_matrix,
    sample_presentation,
)

log = logging.getLogger(__name__)

__all__ = [
    "NotReduced",
    "Inconsistent",
    "NotIndecomposable",
    "EndAlgebra",
    "Decomposition",
    "WeightClass",
    "end_algebra",
    "fitting_idempotent",
    "split_by_idempotent",
    "split_presentation",
    "absolute_weights",
    "canonical_decomposition",
    "is_indecomposable",
    "verify_canonical",
    "classify_weight",
]


class NotReduced(ValueError):
    pass


class Inconsistent(RuntimeError):
    def __init__(self, message, counts=None):
        super().__init__(message)
        self.counts = counts


class NotIndecomposable(ValueError):
    pass


@dataclass(eq=False)
class EndAlgebra:
    d: Presentation
    basis: list[tuple[np.ndarray, np.ndarray]]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def flat(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.concatenate([s.ravel(), t.ravel()])

    def combine(self, coeffs) -> tuple[np.ndarray, np.ndarray]:
        p = self.d.alg.p
        s = sum(int(c) * b[0] for c, b in zip(coeffs, self.basis)) % p
        t = sum(int(c) * b[1] for c, b in zip(coeffs, self.basis)) % p
        return s, t

    def multiply(self, x, y):
        alg = self.d.alg
        return compose(alg, x[0], y[0]), compose(alg, x[1], y[1])

    def identity(self):
        alg = self.d.alg
        return identity_map(alg, self.d.neg), identity_map(alg, self.d.pos)

    def coordinates(self, x) -> np.ndarray:
        a = np.stack([self.flat(*b) for b in self.basis], axis=1)
        c = el.solve(a, self.flat(*x), self.d.alg.p)
        if c is None:
            raise ValueError("element is not in the endomorphism algebra")
        return c

    @cached_property
    def structure_constants(self) -> np.ndarray:
        n = self.dimension
        out = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                out[i, j] = self.coordinates(self.multiply(self.basis[i], self.basis[j]))
        return out


def end_algebra(d: Presentation) -> EndAlgebra:
    """Solve ``d o s = t o d`` for pairs of endomorphisms of ``P-`` and ``P+``."""
    alg, p = d.alg, d.alg.p
    nn, npos, D = len(d.neg), len(d.pos), alg.dim
    ms = hom_mask(alg, d.neg, d.neg).ravel()
    mt = hom_mask(alg, d.pos, d.pos).ravel()
    ns, nt = int(ms.sum()), int(mt.sum())
    rows = hom_mask(alg, d.neg, d.pos).ravel()
    if rows.any() and ns + nt:
        left = left_compose_matrix(alg, d.entries, nn)[rows][:, ms] if nn else np.zeros((int(rows.sum()), 0), dtype=np.int64)
        right = right_compose_matrix(alg, d.entries, npos)[rows][:, mt]
        system = np.concatenate([left, (-right) % p], axis=1)
        ker = el.kernel_basis(system, p)
    else:
        ker = np.eye(ns + nt, dtype=np.int64)
    basis = []
    for col in ker.T:
        s = np.zeros(nn * nn * D, dtype=np.int64)
        t = np.zeros(npos * npos * D, dtype=np.int64)
        s[ms] = col[:ns]
        t[mt] = col[ns:]
        basis.append((s.reshape(nn, nn, D), t.reshape(npos, npos, D)))
    return EndAlgebra(d, basis)


def _powers(E: EndAlgebra, z):
    x = E.identity()
    while True:
        yield x
        x = E.multiply(x, z)


def fitting_idempotent(E: EndAlgebra, z, seed: int = 0):
    """Idempotent from the coprime splitting of the minimal polynomial of ``z``.

    Returns ``(idempotent, factors)``; the idempotent is ``None`` when the
    minimal polynomial is a power of a single irreducible.
    """
    p = E.d.alg.p
    pw = []

    def gen():
        for x in _powers(E, z):
            pw.append(x)
            yield E.flat(*x)

    mu = el.min_poly_vectors(gen(), p)
    factors = el.poly_factor(mu, p, seed)
    if len(factors) < 2:
        return None, factors
    f, m = factors[0]
    a = [1]
    for _ in range(m):
        a = el.poly_mul(a, f, p)
    b = el.poly_divmod(mu, a, p)[0]
    _, u, v = el.poly_egcd(a, b, p)
    ecoef = el.poly_divmod(el.poly_mul(v, b, p), mu, p)[1]
    while len(pw) < len(ecoef):
        pw.append(E.multiply(pw[-1], z))
    s = sum(c * pw[k][0] for k, c in enumerate(ecoef)) % p
    t = sum(c * pw[k][1] for k, c in enumerate(ecoef)) % p
    return (s, t), factors


def _image_embedding(alg: Algebra, e: np.ndarray, vs):
    """For an idempotent endomorphism ``e`` of ``P(vs)`` return ``(vs', iota, rho)``
    with ``iota: P(vs') -> P(vs)`` onto ``Im e`` and ``rho o iota = 1``."""
    p = alg.p
    new_vs, cols = [], []
    for v in range(alg.n):
        idx = [r for r, w in enumerate(vs) if w == v]
        if not idx:
            continue
        block = e[np.ix_(idx, idx, [alg.idempotent[v]])][:, :, 0]
        rk, piv, _ = el.rref_rank(block, p)
        for c in piv:
            new_vs.append(v)
            col = np.zeros(len(vs), dtype=np.int64)
            col[idx] = block[:, c]
            cols.append(col)
    new_vs = tuple(new_vs)
    x = np.zeros((len(vs), len(new_vs), alg.dim), dtype=np.int64)
    for k, (v, col) in enumerate(zip(new_vs, cols)):
        x[:, k, alg.idempotent[v]] = col
    iota = compose(alg, e, x)
    if not new_vs:
        return new_vs, iota, np.zeros((0, len(vs), alg.dim), dtype=np.int64)
    cmask = hom_mask(alg, vs, new_vs).ravel()
    rmask = hom_mask(alg, new_vs, new_vs).ravel()
    mat = right_compose_matrix(alg, iota, len(new_vs))[rmask][:, cmask]
    rhs = identity_map(alg, new_vs).ravel()[rmask]
    sol = el.solve(mat, rhs, p)
    if sol is None:
        raise ArithmeticError("image of an idempotent is not split")
    rho = np.zeros(len(new_vs) * len(vs) * alg.dim, dtype=np.int64)
    rho[cmask] = sol
    return new_vs, iota, rho.reshape(len(new_vs), len(vs), alg.dim)


def _degree_zero_invertible(alg: Algebra, m: np.ndarray, src, tgt) -> bool:
    for v in range(alg.n):
        r = [k for k, w in enumerate(tgt) if w == v]
        c = [k for k, w in enumerate(src) if w == v]
        if len(r) != len(c):
            return False
        if r and el.rank(m[np.ix_(r, c, [alg.idempotent[v]])][:, :, 0], alg.p) < len(r):
            return False
    return True


def _block_diag(alg: Algebra, parts):
    rows = sum(x.shape[0] for x in parts)
    cols = sum(x.shape[1] for x in parts)
    out = np.zeros((rows, cols, alg.dim), dtype=np.int64)
    r = c = 0
    for x in parts:
        out[r : r + x.shape[0], c : c + x.shape[1]] = x
        r += x.shape[0]
        c += x.shape[1]
    return out


def split_by_idempotent(d: Presentation, idem):
    """Split ``d`` along an idempotent pair ``(s, t)`` of its endomorphism algebra.

    Returns the two summands and verifies the reconstruction identity
    ``d o [iota-] = [iota+] o (d' + d'')`` with invertible ``[iota+-]``.
    """
    alg, p = d.alg, d.alg.p
    s, t = idem
    one_s = (identity_map(alg, d.neg) - s) % p
    one_t = (identity_map(alg, d.pos) - t) % p
    parts, inc_neg, inc_pos = [], [], []
    for es, et in ((s, t), (one_s, one_t)):
        neg, iota_n, _ = _image_embedding(alg, es, d.neg)
        pos, iota_p, rho_p = _image_embedding(alg, et, d.pos)
        ent = compose(alg, rho_p, compose(alg, d.entries, iota_n))
        parts.append(Presentation(alg, neg, pos, ent))
        inc_neg.append(iota_n)
        inc_pos.append(iota_p)
    big_n = np.concatenate(inc_neg, axis=1)
    big_p = np.concatenate(inc_pos, axis=1)
    new_neg = parts[0].neg + parts[1].neg
    new_pos = parts[0].pos + parts[1].pos
    lhs = compose(alg, d.entries, big_n)
    rhs = compose(alg, big_p, _block_diag(alg, [parts[0].entries, parts[1].entries]))
    if not (
        np.array_equal(lhs, rhs)
        and _degree_zero_invertible(alg, big_n, new_neg, d.neg)
        and _degree_zero_invertible(alg, big_p, new_pos, d.pos)
    ):
        raise ArithmeticError("split failed the reconstruction check")
    return parts[0], parts[1]


def split_presentation(d: Presentation, seed: int = 0, trials: int = 24) -> list[Presentation]:
    """Decompose ``d`` into summands that resisted ``trials`` splitting attempts.

    Summands with a residue field of degree ``k > 1`` are returned as one
    presentation carrying ``residue_degree = k``.
    """
    if not d.reduced:
        raise NotReduced("P- and P+ share a vertex")
    p = d.alg.p
    out: list[Presentation] = []
    work = [(d, 0)]
    while work:
        piece, depth = work.pop()
        if not piece.neg and not piece.pos:
            continue
        E = end_algebra(piece)
        if E.dimension <= 1:
            out.append(piece)
            continue
        rng = rng_for(seed, "split", depth, len(out), len(work))
        degree = 1
        for trial in range(trials):
            z = E.combine(rng.integers(0, p, size=E.dimension))
            idem, factors = fitting_idempotent(E, z, derive_seed(seed, "factor", trial))
            if idem is not None:
                a, b = split_by_idempotent(piece, idem)
                work.extend([(a, depth + 1), (b, depth + 1)])
                break
            degree = max(degree, len(factors[0][0]) - 1)
        else:
            log.debug("declaring weight %s indecomposable after %d trials", piece.weight, trials)
            piece.residue_degree = degree
            out.append(piece)
    out.sort(key=lambda x: x.weight)
    return out


def absolute_weights(pieces) -> tuple[tuple[int, ...], ...]:
    """Summand weights over the algebraic closure, sorted."""
    ws = []
    for x in pieces:
        k = x.residue_degree
        w = x.weight
        if any(c % k for c in w):
            log.warning("residue degree %d does not divide weight %s", k, w)
            ws.append(w)
            continue
        ws.extend([tuple(c // k for c in w)] * k)
    return tuple(sorted(ws))


@dataclass(frozen=True)
class Decomposition:
    summands: tuple[tuple[int, ...], ...]
    samples: int
    agreement: int
    counts: dict = field(default_factory=dict, compare=False)

    @property
    def ratio(self) -> float:
        return self.agreement / self.samples


def canonical_decomposition(alg: Algebra, delta, samples: int = 16, seed: int = 0, trials: int = 24) -> Decomposition:
    """Majority summand multiset over independent general presentations."""
    delta = tuple(int(x) for x in delta)
    votes: Counter = Counter()
    for s in range(samples):
        d = sample_presentation(alg, delta, derive_seed(seed, "candecomp", delta, s))
        votes[absolute_weights(split_presentation(d, derive_seed(seed, "candecomp-split", delta, s), trials))] += 1
    best = max(votes.items(), key=lambda kv: (kv[1], [-x for w in kv[0] for x in w]))
    counts = {str([list(w) for w in k]): v for k, v in sorted(votes.items())}
    if best[1] * 2 < samples:
        raise Inconsistent(f"no decomposition of {delta} reached half of {samples} samples", counts)
    return Decomposition(best[0], samples, best[1], counts)


def is_indecomposable(alg: Algebra, delta, samples: int = 3, seed: int = 0, trials: int = 24) -> bool:
    hits = 0
    for s in range(samples):
        d = sample_presentation(alg, delta, derive_seed(seed, "indec", tuple(delta), s))
        if len(absolute_weights(split_presentation(d, derive_seed(seed, "indec-split", tuple(delta), s), trials))) == 1:
            hits += 1
    return 2 * hits > samples


def verify_canonical(alg: Algebra, candidate, samples: int = 16, seed: int = 0, trials: int = 24) -> bool:
    """Indecomposable summands with pairwise vanishing generic ``e``."""
    candidate = [tuple(int(x) for x in w) for w in candidate]
    if not candidate:
        raise ValueError("candidate must be non-empty")
    for w in set(candidate):
        if not is_indecomposable(alg, w, seed=seed, trials=trials):
            return False
    for i, a in enumerate(candidate):
        for j, b in enumerate(candidate):
            if i != j and e_generic_pair(alg, a, b, samples, seed) != 0:
                return False
    return True


@dataclass(frozen=True)
class WeightClass:
    tag: str  # "Real" | "Tame" | "Wild"
    witness: int


def classify_weight(alg: Algebra, delta, samples: int = 16, seed: int = 0, trials: int = 24) -> WeightClass:
    delta = tuple(int(x) for x in delta)
    if not is_indecomposable(alg, delta, seed=seed, trials=trials):
        raise NotIndecomposable(f"{delta} is decomposable")
    for s in range(samples):
        sd = derive_seed(seed, "rigid", delta, s)
        d = sample_presentation(alg, delta, sd)
        if E_hom(d, d) == 0:
            return WeightClass("Real", sd)
    e = e_generic_pair(alg, delta, delta, samples, seed)
    return WeightClass("Tame" if e == 0 else "Wild", e)
