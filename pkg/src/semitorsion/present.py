"""Two-term complexes of projectives and the invariants hom, e and E.

A map ``P(src) -> P(tgt)`` between sums of indecomposable projectives is an
array of shape ``(len(tgt), len(src), dim A)``; block ``(r, c)`` is an
element of ``Hom(P_src[c], P_tgt[r]) = e_src[c] A e_tgt[r]``, i.e. a
combination of paths from ``tgt[r]`` to ``src[c]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import exactlin as el
from ._seeds import derive_seed
from .algebra import Algebra, neg_part, pos_part, rep_projective
from .rep import AlgebraMismatch, Representation, direct_sum, dual, quotient_rep, rep_zero

__all__ = [
    "Presentation",
    "HomEPair",
    "weight_vertices",
    "hom_mask",
    "compose",
    "identity_map",
    "left_compose_matrix",
    "right_compose_matrix",
    "sample_presentation",
    "cokernel",
    "hom_e_fixed",
    "hom_e_samples",
    "hom_e_generic",
    "E_hom",
    "E_generic",
    "e_generic_pair",
    "dual_hom_e",
]


@dataclass(frozen=True)
class HomEPair:
    hom: int
    e: int


def weight_vertices(beta: Sequence[int]) -> tuple[int, ...]:
    """Summand vertices of ``P(beta)``, sorted by vertex."""
    return tuple(v for v, m in enumerate(beta) for _ in range(int(m)))


def hom_mask(alg: Algebra, src: Sequence[int], tgt: Sequence[int]) -> np.ndarray:
    """Valid coordinates of ``Hom(P(src), P(tgt))``."""
    if not len(src) or not len(tgt):
        return np.zeros((len(tgt), len(src), alg.dim), dtype=bool)
    return alg.pair_mask[np.asarray(tgt)[:, None], np.asarray(src)[None, :]]


def identity_map(alg: Algebra, vs: Sequence[int]) -> np.ndarray:
    out = np.zeros((len(vs), len(vs), alg.dim), dtype=np.int64)
    for r, v in enumerate(vs):
        out[r, r, alg.idempotent[v]] = 1
    return out


def compose(alg: Algebra, outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """``outer o inner``; entries multiply as ``inner[b, c] * outer[a, b]``."""
    if outer.shape[1] != inner.shape[0]:
        raise ValueError("incompatible maps")
    if 0 in outer.shape[:2] or inner.shape[1] == 0:
        return np.zeros((outer.shape[0], inner.shape[1], alg.dim), dtype=np.int64)
    return np.einsum("bcx,aby,xyz->acz", inner, outer, alg.mult, optimize=True) % alg.p


def left_compose_matrix(alg: Algebra, outer: np.ndarray, n_src: int) -> np.ndarray:
    """Matrix of ``X -> outer o X`` on full (unmasked) coordinates."""
    na, nb, D = outer.shape
    w = np.einsum("aby,xyz->abxz", outer, alg.mult) % alg.p
    big = np.einsum("abxz,cd->aczbdx", w, np.eye(n_src, dtype=np.int64))
    return big.reshape(na * n_src * D, nb * n_src * D)


def right_compose_matrix(alg: Algebra, inner: np.ndarray, n_tgt: int) -> np.ndarray:
    """Matrix of ``X -> X o inner`` on full (unmasked) coordinates."""
    nb, nc, D = inner.shape
    v = np.einsum("bcx,xyz->bcyz", inner, alg.mult) % alg.p
    big = np.einsum("bcyz,ad->aczdby", v, np.eye(n_tgt, dtype=np.int64))
    return big.reshape(n_tgt * nc * D, n_tgt * nb * D)


@dataclass(eq=False)
class Presentation:
    """``d: P(neg) -> P(pos)``.

    ``residue_degree`` is set by the splitter on summands whose endomorphism
    ring has residue field ``F_{p^k}``; over the algebraic closure such a
    summand breaks into ``k`` Galois-conjugate pieces.
    """

    alg: Algebra
    neg: tuple[int, ...]
    pos: tuple[int, ...]
    entries: np.ndarray
    residue_degree: int = 1

    def __post_init__(self):
        self.neg = tuple(int(v) for v in self.neg)
        self.pos = tuple(int(v) for v in self.pos)
        ent = np.mod(np.asarray(self.entries, dtype=np.int64), self.alg.p)
        ent = ent.reshape(len(self.pos), len(self.neg), self.alg.dim)
        if (ent[~hom_mask(self.alg, self.neg, self.pos)] != 0).any():
            raise ValueError("entry uses a path with the wrong endpoints")
        self.entries = ent

    @property
    def weight(self) -> tuple[int, ...]:
        w = [0] * self.alg.n
        for v in self.pos:
            w[v] += 1
        for v in self.neg:
            w[v] -= 1
        return tuple(w)

    @property
    def reduced(self) -> bool:
        return not (set(self.neg) & set(self.pos))

    def __repr__(self) -> str:
        return f"Presentation(weight={self.weight}, neg={self.neg}, pos={self.pos})"


def sample_presentation(alg: Algebra, delta: Sequence[int], seed: int) -> Presentation:
    """Uniformly random element of ``PHom(delta)``."""
    neg = weight_vertices(neg_part(delta))
    pos = weight_vertices(pos_part(delta))
    rng = np.random.default_rng(seed)
    ent = rng.integers(0, alg.p, size=(len(pos), len(neg), alg.dim), dtype=np.int64)
    ent *= hom_mask(alg, neg, pos)
    return Presentation(alg, neg, pos, ent)


def _sample_seed(seed: int, delta, s: int, tag: str = "") -> int:
    return derive_seed(seed, "pres", tag, tuple(int(x) for x in delta), s)


@lru_cache(maxsize=1 << 16)
def _sample_stack(alg: Algebra, delta: tuple, samples: int, seed: int, tag: str) -> np.ndarray:
    """Entries of the first ``samples`` draws, shared by every module."""
    neg = weight_vertices(neg_part(delta))
    pos = weight_vertices(pos_part(delta))
    mask = hom_mask(alg, neg, pos)
    out = np.empty((samples, len(pos), len(neg), alg.dim), dtype=np.int64)
    for s in range(samples):
        rng = np.random.default_rng(_sample_seed(seed, delta, s, tag))
        out[s] = rng.integers(0, alg.p, size=mask.shape, dtype=np.int64) * mask
    out.flags.writeable = False
    return out


def _projective_sum(alg: Algebra, vs: Sequence[int]) -> Representation:
    if not vs:
        return rep_zero(alg)
    return direct_sum(*[rep_projective(alg, v) for v in vs])


def cokernel(d: Presentation) -> Representation:
    alg, p = d.alg, d.alg.p
    P = _projective_sum(alg, d.pos)
    if not d.pos:
        return P
    cols = [[] for _ in range(alg.n)]
    coords = {(r, v): alg.paths_between(u, v) for r, u in enumerate(d.pos) for v in range(alg.n)}
    for c, j in enumerate(d.neg):
        for v in range(alg.n):
            for q in alg.paths_between(j, v):
                # q * d(e_j): v-component inside each summand P_pos[r]
                vec = []
                for r in range(len(d.pos)):
                    prod = np.einsum("y,yz->z", d.entries[r, c], alg.mult[q]) % p
                    vec.append(prod[coords[(r, v)]])
                cols[v].append(np.concatenate(vec) if vec else np.zeros(0, dtype=np.int64))
    sub = [np.stack(cols[v], axis=1) if cols[v] else np.zeros((P.dims[v], 0), dtype=np.int64) for v in range(alg.n)]
    Q, _ = quotient_rep(P, sub)
    return Q


def _check(alg: Algebra, M: Representation) -> None:
    if alg is not M.alg and alg.fingerprint != M.alg.fingerprint:
        raise AlgebraMismatch("presentation and module live over different algebras")


def _induced_matrix(d: Presentation, M: Representation) -> np.ndarray:
    """Matrix of ``Hom(P+, M) -> Hom(P-, M)``, using ``Hom(P_i, M) = M_i``."""
    rows = [M.dims[j] for j in d.neg]
    cols = [M.dims[i] for i in d.pos]
    out = np.zeros((sum(rows), sum(cols)), dtype=np.int64)
    ro = np.concatenate([[0], np.cumsum(rows)]).astype(int)
    co = np.concatenate([[0], np.cumsum(cols)]).astype(int)
    for c, j in enumerate(d.neg):
        for r, i in enumerate(d.pos):
            if rows[c] and cols[r]:
                out[ro[c] : ro[c + 1], co[r] : co[r + 1]] = M.act(d.entries[r, c], i, j)
    return out


def hom_e_fixed(d: Presentation, M: Representation) -> HomEPair:
    _check(d.alg, M)
    mat = _induced_matrix(d, M)
    rk = el.rank(mat, M.p) if mat.size else 0
    return HomEPair(mat.shape[1] - rk, mat.shape[0] - rk)


def _batched_induced(alg: Algebra, delta, M: Representation, ents: np.ndarray) -> np.ndarray:
    """Stack of induced matrices for sampled entries ``ents[s]``."""
    neg = weight_vertices(neg_part(delta))
    pos = weight_vertices(pos_part(delta))
    S = ents.shape[0]
    rows = sum(M.dims[j] for j in neg)
    cols = sum(M.dims[i] for i in pos)
    out = np.zeros((S, rows, cols), dtype=np.int64)
    beta_p, beta_m = pos_part(delta), neg_part(delta)
    r0 = 0
    for j in range(alg.n):
        nj, dj = beta_m[j], M.dims[j]
        if not nj or not dj:
            continue
        c0 = 0
        cstart = neg.index(j)
        for i in range(alg.n):
            ni, di = beta_p[i], M.dims[i]
            if not ni or not di:
                continue
            ks, st = M.path_stack(i, j)
            if ks:
                rstart = pos.index(i)
                coef = ents[:, rstart : rstart + ni, cstart : cstart + nj][..., ks]  # (S, ni, nj, Q)
                blk = np.einsum("srcq,qab->scarb", coef, st) % alg.p
                out[:, r0 : r0 + nj * dj, c0 : c0 + ni * di] = blk.reshape(S, nj * dj, ni * di)
            c0 += ni * di
        r0 += nj * dj
    return out


def hom_e_samples(
    alg: Algebra, delta, M: Representation, samples: int, seed: int, tag: str = "", stop_at_full: bool = False
) -> list[HomEPair]:
    """``hom_e_fixed`` for each of the first ``samples`` draws from PHom(delta).

    With ``stop_at_full`` the list ends at the first sample of full rank,
    which already realises the minimum of both invariants.
    """
    _check(alg, M)
    if samples < 1:
        raise ValueError("samples must be positive")
    neg = weight_vertices(neg_part(delta))
    pos = weight_vertices(pos_part(delta))
    ents = _sample_stack(alg, tuple(int(x) for x in delta), samples, seed, tag) if (neg and pos) else None
    rows = sum(M.dims[j] for j in neg)
    cols = sum(M.dims[i] for i in pos)
    if ents is None or rows == 0 or cols == 0:
        n = 1 if stop_at_full else samples
        return [HomEPair(cols, rows)] * n
    stack = _batched_induced(alg, delta, M, ents)
    ranks = el.batch_ranks(stack, alg.p, min(rows, cols) if stop_at_full else -1)
    return [HomEPair(cols - int(r), rows - int(r)) for r in ranks if r >= 0]


def hom_e_generic(alg: Algebra, delta, M: Representation, samples: int = 16, seed: int = 0, tag: str = "") -> HomEPair:
    """Generic ``(hom(delta, M), e(delta, M))``: minimum over random draws."""
    vals = hom_e_samples(alg, delta, M, samples, seed, tag, stop_at_full=True)
    best = min(vals, key=lambda h: h.hom)
    return best


def E_hom(d: Presentation, e: Presentation) -> int:
    """``dim Hom(P-^d, P+^e)`` modulo maps ``e o s - t o d``."""
    if d.alg is not e.alg and d.alg.fingerprint != e.alg.fingerprint:
        raise AlgebraMismatch("presentations live over different algebras")
    alg, p = d.alg, d.alg.p
    rows_mask = hom_mask(alg, d.neg, e.pos).ravel()
    n_rows = int(rows_mask.sum())
    if n_rows == 0:
        return 0
    blocks = []
    if e.neg:
        m = left_compose_matrix(alg, e.entries, len(d.neg))
        blocks.append(m[rows_mask][:, hom_mask(alg, d.neg, e.neg).ravel()])
    if d.pos:
        m = right_compose_matrix(alg, d.entries, len(e.pos))
        blocks.append((-m[rows_mask][:, hom_mask(alg, d.pos, e.pos).ravel()]) % p)
    if not blocks:
        return n_rows
    return n_rows - el.rank(np.concatenate(blocks, axis=1), p)


def E_generic(alg: Algebra, delta, eta, samples: int = 16, seed: int = 0) -> int:
    """Minimum of ``E_hom`` over random pairs (d, g)."""
    best = None
    for s in range(samples):
        d = sample_presentation(alg, delta, _sample_seed(seed, delta, s, "E-d"))
        g = sample_presentation(alg, eta, _sample_seed(seed, eta, s, "E-g"))
        v = E_hom(d, g)
        best = v if best is None else min(best, v)
        if best == 0:
            break
    return best


def e_generic_pair(alg: Algebra, delta, eta, samples: int = 16, seed: int = 0) -> int:
    """Generic ``e(delta, eta) = e(delta, Coker(g))`` for general g of weight eta."""
    best = None
    for s in range(samples):
        d = sample_presentation(alg, delta, _sample_seed(seed, delta, s, "pair-d"))
        g = sample_presentation(alg, eta, _sample_seed(seed, eta, s, "pair-g"))
        v = hom_e_fixed(d, cokernel(g)).e
        best = v if best is None else min(best, v)
        if best == 0:
            break
    return best


def dual_hom_e(alg: Algebra, M: Representation, delta_check, samples: int = 16, seed: int = 0) -> HomEPair:
    """``(hom(M, delta_check), e_check(M, delta_check))`` via the opposite algebra."""
    _check(alg, M)
    return hom_e_generic(alg.opposite, delta_check, dual(M), samples, seed, tag="dual")
