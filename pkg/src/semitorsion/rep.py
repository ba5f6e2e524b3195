"""Representations of a bound quiver algebra.

A representation stores one matrix per arrow, of shape
``(dim at target, dim at source)``.  Submodule enumeration and exhaustive
module generation only make sense over tiny fields and are capped.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exactlin as el
from .algebra import Algebra, rep_projective

log = logging.getLogger(__name__)

__all__ = [
    "AlgebraMismatch",
    "EnumerationCapExceeded",
    "NoNontrivialExtension",
    "Representation",
    "rep_simple",
    "rep_zero",
    "direct_sum",
    "dual",
    "hom_rep",
    "projective_cover",
    "syzygy",
    "ext1",
    "extension_middle",
    "subrep",
    "quotient_rep",
    "cyclic_submodule",
    "enumerate_submodules",
    "submodule_dimvectors",
    "iso_test",
    "all_representations",
    "lift",
    "SMALL_FIELDS",
    "MAX_ENUM_DIM",
]

SMALL_FIELDS = (2, 3, 5)
MAX_ENUM_DIM = 12
MAX_CYCLIC_GENERATORS = 20000
MAX_SUBMODULES = 200000


class AlgebraMismatch(ValueError):
    pass


class EnumerationCapExceeded(RuntimeError):
    pass


class NoNontrivialExtension(ValueError):
    pass


def _same_algebra(a: Algebra, b: Algebra) -> None:
    if a is not b and a.fingerprint != b.fingerprint:
        raise AlgebraMismatch("modules live over different algebras")


@dataclass(eq=False)
class Representation:
    alg: Algebra
    dims: tuple[int, ...]
    maps: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        p = self.alg.p
        self.dims = tuple(int(d) for d in self.dims)
        if len(self.dims) != self.alg.n or any(d < 0 for d in self.dims):
            raise ValueError("dimension vector does not match the quiver")
        arrows = self.alg.quiver.arrows
        if len(self.maps) != len(arrows):
            raise ValueError("one matrix per arrow is required")
        maps = []
        for a, m in zip(arrows, self.maps):
            m = np.mod(np.asarray(m, dtype=np.int64).reshape(self.dims[a.target], self.dims[a.source]), p)
            m.setflags(write=False)
            maps.append(m)
        self.maps = tuple(maps)
        for r in self.alg.relations:
            acc = None
            for c, names in r.terms:
                term = c * self._walk([self.alg.quiver.arrow_index(a) for a in names])
                acc = term if acc is None else acc + term
            if acc is not None and np.mod(acc, p).any():
                raise ValueError("representation violates a relation")
        for arr in self.alg.long_paths:
            if self._walk(arr).any():
                raise ValueError("a path of length L acts nonzero")

    @property
    def p(self) -> int:
        return self.alg.p

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def _walk(self, arrows: Sequence[int]) -> np.ndarray:
        arrs = self.alg.quiver.arrows
        if not arrows:
            raise ValueError("empty walk")
        out = np.eye(self.dims[arrs[arrows[0]].source], dtype=np.int64)
        for k in arrows:
            out = (self.maps[k] @ out) % self.p
        return out

    def path_matrix(self, k: int) -> np.ndarray:
        """Action of basis element ``k`` of the algebra."""
        key = ("path", k)
        if key not in self._cache:
            s, t, arr = self.alg.basis[k]
            m = np.eye(self.dims[s], dtype=np.int64) if not arr else self._walk(arr)
            m.setflags(write=False)
            self._cache[key] = m
        return self._cache[key]

    def path_stack(self, i: int, j: int) -> tuple[list[int], np.ndarray]:
        """Basis paths ``i -> j`` and their stacked action matrices."""
        key = ("stack", i, j)
        if key not in self._cache:
            ks = self.alg.paths_between(i, j)
            st = np.zeros((len(ks), self.dims[j], self.dims[i]), dtype=np.int64)
            for n, k in enumerate(ks):
                st[n] = self.path_matrix(k)
            self._cache[key] = (ks, st)
        return self._cache[key]

    def act(self, elt: np.ndarray, i: int, j: int) -> np.ndarray:
        """Action of an element supported on paths ``i -> j``."""
        ks, st = self.path_stack(i, j)
        if not ks:
            return np.zeros((self.dims[j], self.dims[i]), dtype=np.int64)
        return np.einsum("q,qab->ab", elt[ks], st) % self.p

    @property
    def key(self) -> bytes:
        if "key" not in self._cache:
            parts = [repr((self.p, self.dims)).encode()] + [m.tobytes() for m in self.maps]
            self._cache["key"] = b"|".join(parts)
        return self._cache["key"]

    def nonzeros(self) -> int:
        return int(sum(np.count_nonzero(m) for m in self.maps))

    def __repr__(self) -> str:
        return f"Representation(dims={self.dims}, p={self.p})"


def rep_zero(alg: Algebra) -> Representation:
    arrs = alg.quiver.arrows
    return Representation(alg, (0,) * alg.n, tuple(np.zeros((0, 0), dtype=np.int64) for _ in arrs))


def rep_simple(alg: Algebra, i: int) -> Representation:
    dims = tuple(1 if v == i else 0 for v in range(alg.n))
    maps = tuple(np.zeros((dims[a.target], dims[a.source]), dtype=np.int64) for a in alg.quiver.arrows)
    return Representation(alg, dims, maps)


def direct_sum(*mods: Representation) -> Representation:
    if not mods:
        raise ValueError("direct_sum needs at least one module")
    alg = mods[0].alg
    for m in mods[1:]:
        _same_algebra(alg, m.alg)
    dims = tuple(sum(m.dims[v] for m in mods) for v in range(alg.n))
    maps = []
    for k, a in enumerate(alg.quiver.arrows):
        out = np.zeros((dims[a.target], dims[a.source]), dtype=np.int64)
        r = c = 0
        for m in mods:
            out[r : r + m.dims[a.target], c : c + m.dims[a.source]] = m.maps[k]
            r += m.dims[a.target]
            c += m.dims[a.source]
        maps.append(out)
    return Representation(alg, dims, tuple(maps))


def dual(M: Representation) -> Representation:
    """Transpose dual ``D M``, a representation of the opposite algebra."""
    return Representation(M.alg.opposite, M.dims, tuple(m.T.copy() for m in M.maps))


def _hom_system(M: Representation, N: Representation) -> tuple[np.ndarray, list[int]]:
    p = M.p
    offs = [0]
    for v in range(M.alg.n):
        offs.append(offs[-1] + N.dims[v] * M.dims[v])
    blocks = []
    for k, a in enumerate(M.alg.quiver.arrows):
        s, t = a.source, a.target
        rows = N.dims[t] * M.dims[s]
        if rows == 0:
            continue
        eq = np.zeros((rows, offs[-1]), dtype=np.int64)
        # N_a phi_s - phi_t M_a = 0, row-major vec
        eq[:, offs[s] : offs[s + 1]] += np.kron(N.maps[k], np.eye(M.dims[s], dtype=np.int64))
        eq[:, offs[t] : offs[t + 1]] -= np.kron(np.eye(N.dims[t], dtype=np.int64), M.maps[k].T)
        blocks.append(eq % p)
    system = np.concatenate(blocks) if blocks else np.zeros((0, offs[-1]), dtype=np.int64)
    return system, offs


def hom_rep(M: Representation, N: Representation):
    """``(dim, basis)`` of ``Hom_A(M, N)``; each basis element is a tuple
    of per-vertex matrices ``N_v x M_v``."""
    _same_algebra(M.alg, N.alg)
    system, offs = _hom_system(M, N)
    ker = el.kernel_basis(system, M.p)
    basis = []
    for col in ker.T:
        basis.append(
            tuple(col[offs[v] : offs[v + 1]].reshape(N.dims[v], M.dims[v]) for v in range(M.alg.n))
        )
    return len(basis), basis


def hom_dim(M: Representation, N: Representation) -> int:
    _same_algebra(M.alg, N.alg)
    system, offs = _hom_system(M, N)
    return offs[-1] - el.rank(system, M.p)


def _colspace_complement(cols: np.ndarray, d: int, p: int) -> list[int]:
    """Standard basis indices completing the column space of ``cols``."""
    if cols.size == 0:
        return list(range(d))
    _, piv, _ = el.rref_rank(cols.T, p)
    return [j for j in range(d) if j not in set(piv)]


def projective_cover(M: Representation):
    """Return ``(P, pi, tops)`` with ``pi`` a list of matrices ``P_v -> M_v``
    and ``tops`` the ``(vertex, vector)`` generators lifted from the top."""
    alg, p = M.alg, M.p
    tops = []
    for v in range(alg.n):
        imgs = [M.maps[k] for k, a in enumerate(alg.quiver.arrows) if a.target == v and M.dims[a.source]]
        rad = np.concatenate(imgs, axis=1) if imgs else np.zeros((M.dims[v], 0), dtype=np.int64)
        for j in _colspace_complement(rad, M.dims[v], p):
            e = np.zeros(M.dims[v], dtype=np.int64)
            e[j] = 1
            tops.append((v, e))
    if not tops:
        return rep_zero(alg), [np.zeros((0, M.dims[v]), dtype=np.int64).T for v in range(alg.n)], tops
    P = direct_sum(*[rep_projective(alg, v) for v, _ in tops])
    pi = []
    for w in range(alg.n):
        cols = []
        for v, m in tops:
            for k in alg.paths_between(v, w):
                cols.append(M.path_matrix(k) @ m % p)
        pi.append(np.stack(cols, axis=1) if cols else np.zeros((M.dims[w], 0), dtype=np.int64))
    return P, pi, tops


def _cols(b, d: int) -> np.ndarray:
    b = np.asarray(b, dtype=np.int64)
    if b.size == 0:
        return np.zeros((d, 0), dtype=np.int64)
    return b.reshape(d, -1)


def subrep(M: Representation, bases: Sequence[np.ndarray]) -> Representation:
    """Submodule spanned at each vertex by the columns of ``bases[v]``."""
    p = M.p
    bases = [_cols(b, M.dims[v]) for v, b in enumerate(bases)]
    maps = []
    for k, a in enumerate(M.alg.quiver.arrows):
        src, tgt = bases[a.source], bases[a.target]
        img = M.maps[k] @ src % p
        if tgt.shape[1]:
            y = el.solve(tgt, img, p)
        else:
            y = None if img.any() else np.zeros((0, src.shape[1]), dtype=np.int64)
        if y is None:
            raise ValueError("subspaces are not stable under the arrows")
        maps.append(y)
    return Representation(M.alg, tuple(b.shape[1] for b in bases), tuple(maps))


def quotient_rep(M: Representation, bases: Sequence[np.ndarray]):
    """Quotient by an arrow-stable subspace; returns ``(Q, projections)``."""
    p = M.p
    projs, embeds = [], []
    for v in range(M.alg.n):
        d = M.dims[v]
        b = _cols(bases[v], d)
        if b.size:
            rk, piv, red = el.rref_rank(b.T, p)
            red = red[:rk]
        else:
            piv, red = [], np.zeros((0, d), dtype=np.int64)
        keep = [j for j in range(d) if j not in set(piv)]
        reducer = np.eye(d, dtype=np.int64)
        if piv:
            sel = np.zeros((len(piv), d), dtype=np.int64)
            sel[np.arange(len(piv)), piv] = 1
            reducer = (reducer - red.T @ sel) % p
        projs.append(reducer[keep, :])
        emb = np.zeros((d, len(keep)), dtype=np.int64)
        emb[keep, np.arange(len(keep))] = 1
        embeds.append(emb)
    maps = []
    for k, a in enumerate(M.alg.quiver.arrows):
        maps.append(projs[a.target] @ M.maps[k] @ embeds[a.source] % p)
    Q = Representation(M.alg, tuple(pr.shape[0] for pr in projs), tuple(maps))
    return Q, projs


def syzygy(M: Representation):
    """Return ``(P, Omega, inclusion, pi)`` for the chosen projective cover."""
    P, pi, _ = projective_cover(M)
    ker = [
        el.kernel_basis(pi[v].reshape(M.dims[v], P.dims[v]), M.p) if P.dims[v] else np.zeros((0, 0), dtype=np.int64)
        for v in range(M.alg.n)
    ]
    return P, subrep(P, ker), ker, pi


def ext1(M: Representation, N: Representation) -> int:
    _same_algebra(M.alg, N.alg)
    P, omega, _, _ = syzygy(M)
    return hom_dim(omega, N) - hom_dim(P, N) + hom_dim(M, N)


def _restriction_image(P, omega_incl, N):
    """Basis of the image of ``Hom(P, N) -> Hom(Omega, N)`` as flat vectors."""
    _, hb = hom_rep(P, N)
    vecs = []
    for phi in hb:
        vecs.append(np.concatenate([(phi[v] @ omega_incl[v]).ravel() for v in range(len(phi))]))
    return vecs


def extension_middle(M: Representation, N: Representation, cocycle=None, seed: int | None = None) -> Representation:
    """Middle term ``E`` of ``0 -> N -> E -> M -> 0``.

    ``cocycle`` is a hom ``Omega M -> N`` (per-vertex matrices, with
    ``Omega M`` as returned by :func:`syzygy`).  Without it a random
    non-split class is drawn from ``seed``.
    """
    _same_algebra(M.alg, N.alg)
    p, alg = M.p, M.alg
    P, omega, incl, _ = syzygy(M)
    if cocycle is None:
        _, hb = hom_rep(omega, N)
        image = _restriction_image(P, incl, N)
        base_rank = el.rank(np.stack(image), p) if image else 0
        if len(hb) - base_rank == 0:
            raise NoNontrivialExtension("Ext^1(M, N) = 0")
        rng = np.random.default_rng(seed)
        while True:
            c = rng.integers(0, p, size=len(hb))
            f = tuple(sum(int(ci) * h[v] for ci, h in zip(c, hb)) % p for v in range(alg.n))
            flat = np.concatenate([f[v].ravel() for v in range(alg.n)])
            if el.rank(np.stack(image + [flat]), p) > base_rank:
                cocycle = f
                break
    cocycle = [np.asarray(c, dtype=np.int64).reshape(N.dims[v], omega.dims[v]) for v, c in enumerate(cocycle)]
    NP = direct_sum(N, P)
    sub = [np.concatenate([cocycle[v], (-incl[v]) % p], axis=0) for v in range(alg.n)]
    E, _ = quotient_rep(NP, sub)
    return E


# -- submodules -----------------------------------------------------------------


def _rowspace(vectors: np.ndarray, p: int) -> np.ndarray:
    if vectors.size == 0:
        return np.zeros((0, vectors.shape[1] if vectors.ndim == 2 else 0), dtype=np.int64)
    rk, _, red = el.rref_rank(vectors, p)
    return red[:rk]


def cyclic_submodule(M: Representation, v: int, vec: np.ndarray) -> tuple[np.ndarray, ...]:
    """Row-reduced bases (rows) of the submodule generated by ``vec`` at ``v``."""
    p = M.p
    out = []
    for w in range(M.alg.n):
        ks, st = M.path_stack(v, w)
        if not ks or M.dims[w] == 0:
            out.append(np.zeros((0, M.dims[w]), dtype=np.int64))
            continue
        imgs = np.einsum("qab,b->qa", st, np.asarray(vec, dtype=np.int64)) % p
        out.append(_rowspace(imgs, p))
    return tuple(out)


def _sub_key(sub) -> bytes:
    return b"|".join(s.tobytes() + repr(s.shape).encode() for s in sub)


def _projective_points(d: int, q: int):
    for lead in range(d):
        for tail in itertools.product(range(q), repeat=d - lead - 1):
            v = np.zeros(d, dtype=np.int64)
            v[lead] = 1
            v[lead + 1 :] = tail
            yield v


def _check_enum_cap(M: Representation) -> None:
    if M.p not in SMALL_FIELDS:
        raise EnumerationCapExceeded(f"submodule enumeration needs a field in {SMALL_FIELDS}, got F_{M.p}")
    if M.total_dim > MAX_ENUM_DIM:
        raise EnumerationCapExceeded(f"total dimension {M.total_dim} exceeds {MAX_ENUM_DIM}")
    q = M.p
    gens = sum((q**d - 1) // (q - 1) for d in M.dims)
    if gens > MAX_CYCLIC_GENERATORS:
        raise EnumerationCapExceeded(f"{gens} cyclic generators exceed the cap")


def enumerate_submodules(M: Representation) -> list[tuple[np.ndarray, ...]]:
    """All submodules, each as per-vertex row-reduced row bases.

    Cyclic submodules of homogeneous vectors are closed under sums; every
    submodule is such a sum.
    """
    if "subs" in M._cache:
        return M._cache["subs"]
    _check_enum_cap(M)
    p = M.p
    zero = tuple(np.zeros((0, d), dtype=np.int64) for d in M.dims)
    cyclic: dict[bytes, tuple] = {}
    for v in range(M.alg.n):
        for vec in _projective_points(M.dims[v], p):
            c = cyclic_submodule(M, v, vec)
            cyclic.setdefault(_sub_key(c), c)
    cyc = list(cyclic.values())
    seen = {_sub_key(zero): zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for X in frontier:
            for C in cyc:
                Y = tuple(
                    _rowspace(np.concatenate([x, c]), p) if (x.size or c.size) else x for x, c in zip(X, C)
                )
                k = _sub_key(Y)
                if k not in seen:
                    seen[k] = Y
                    nxt.append(Y)
                    if len(seen) > MAX_SUBMODULES:
                        raise EnumerationCapExceeded("too many submodules")
        frontier = nxt
    subs = list(seen.values())
    M._cache["subs"] = subs
    return subs


def submodule_dimvectors(M: Representation) -> frozenset[tuple[int, ...]]:
    """Dimension vectors of all submodules of ``M`` (small fields only)."""
    if "dimvecs" not in M._cache:
        M._cache["dimvecs"] = frozenset(tuple(s.shape[0] for s in sub) for sub in enumerate_submodules(M))
    return M._cache["dimvecs"]


# -- isomorphism --------------------------------------------------------------


def _invertible_everywhere(mats, dims, p) -> bool:
    return all(d == 0 or el.rank(m, p) == d for m, d in zip(mats, dims))


def iso_test(M: Representation, N: Representation, seed: int = 0, trials: int = 64) -> bool:
    """Search ``Hom(M, N)`` for an isomorphism.

    Tries every basis element, every combination when the space has at most
    4096 elements, then ``trials`` random combinations.  A negative answer
    after random search is logged, since it may be a miss.
    """
    _same_algebra(M.alg, N.alg)
    if M.dims != N.dims:
        return False
    if M.total_dim == 0:
        return True
    p = M.p
    h, basis = hom_rep(M, N)
    if h == 0:
        return False
    for b in basis:
        if _invertible_everywhere(b, M.dims, p):
            return True
    stacks = [np.stack([b[v] for b in basis]) for v in range(M.alg.n)]

    def check(coeffs: np.ndarray) -> bool:
        for v, d in enumerate(M.dims):
            if d == 0:
                continue
            mats = np.einsum("sh,hab->sab", coeffs, stacks[v]) % p
            ranks = el.batch_ranks(mats, p)
            coeffs = coeffs[ranks == d]
            if not len(coeffs):
                return False
        return True

    if p**h <= 4096:
        allc = np.array(list(itertools.product(range(p), repeat=h)), dtype=np.int64)
        return check(allc)
    rng = np.random.default_rng(seed)
    if check(rng.integers(0, p, size=(trials, h))):
        return True
    log.warning("iso_test: no isomorphism found in %d random trials (dims %s)", trials, M.dims)
    return False


# -- exhaustive generation and field transport -----------------------------------


def all_representations(alg: Algebra, dims: Sequence[int], limit: int = 2**20):
    """Every representation of ``alg`` with the given dimension vector.

    Only valid over small fields; ``limit`` bounds the raw candidate count.
    """
    p = alg.p
    shapes = [(dims[a.target], dims[a.source]) for a in alg.quiver.arrows]
    sizes = [r * c for r, c in shapes]
    total = sum(sizes)
    if p**total > limit:
        raise EnumerationCapExceeded(f"{p}^{total} candidate representations exceed {limit}")
    for entries in itertools.product(range(p), repeat=total):
        maps, off = [], 0
        for (r, c), s in zip(shapes, sizes):
            maps.append(np.array(entries[off : off + s], dtype=np.int64).reshape(r, c))
            off += s
        try:
            yield Representation(alg, tuple(dims), tuple(maps))
        except ValueError:
            continue


def lift(M: Representation, target: Algebra) -> Representation:
    """Transport integer matrices to another field (symmetric residues).

    Raises ``ValueError`` if the transported matrices violate a relation.
    """
    p = M.p
    maps = []
    for m in M.maps:
        s = np.where(m > p // 2, m - p, m)
        maps.append(np.mod(s, target.p))
    return Representation(target, M.dims, tuple(maps))
