"""Bound quiver algebras ``A = kQ/I`` over a prime field.

Paths are stored in traversal order (``(a, b)`` means "a then b").  The
product is written right to left: ``x * y`` is "y then x", so modules are
left modules and the projective ``P_i = A e_i`` is spanned by paths that
start at ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from . import exactlin as el

__all__ = [
    "AlgebraError",
    "NotNilpotentAtBound",
    "NonParallelRelation",
    "UnknownArrow",
    "Arrow",
    "Quiver",
    "Relation",
    "Algebra",
    "build_algebra",
    "proj_hom_basis",
    "rep_projective",
    "opposite_algebra",
    "pos_part",
    "neg_part",
    "builtin",
    "BUILTINS",
]


class AlgebraError(ValueError):
    pass


class NotNilpotentAtBound(AlgebraError):
    pass


class NonParallelRelation(AlgebraError):
    pass


class UnknownArrow(AlgebraError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    @classmethod
    def from_lists(cls, vertices: Sequence[str], arrows: Sequence[tuple[str, str, str]]) -> "Quiver":
        vertices = tuple(str(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise AlgebraError("vertex labels must be unique")
        index = {v: i for i, v in enumerate(vertices)}
        out = []
        for name, s, t in arrows:
            if str(s) not in index or str(t) not in index:
                raise AlgebraError(f"arrow {name!r} has an undeclared endpoint")
            out.append(Arrow(str(name), index[str(s)], index[str(t)]))
        if len({a.name for a in out}) != len(out):
            raise AlgebraError("arrow names must be unique")
        return cls(vertices, tuple(out))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def arrow_index(self, name: str) -> int:
        for k, a in enumerate(self.arrows):
            if a.name == name:
                return k
        raise UnknownArrow(name)

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, tuple(Arrow(a.name, a.target, a.source) for a in self.arrows))


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths, each given by arrow names in
    traversal order."""

    terms: tuple[tuple[int, tuple[str, ...]], ...]

    @classmethod
    def of(cls, *terms) -> "Relation":
        return cls(tuple((int(c), tuple(path)) for c, path in terms))


Path = tuple[int, int, tuple[int, ...]]  # (source, target, arrow indices)


def pos_part(delta) -> tuple[int, ...]:
    return tuple(max(int(x), 0) for x in delta)


def neg_part(delta) -> tuple[int, ...]:
    return tuple(max(-int(x), 0) for x in delta)


@dataclass(eq=False)
class Algebra:
    """Finite-dimensional ``kQ/I`` with an explicit path basis.

    ``mult[x, y]`` holds the coordinates of ``x * y`` ("y then x").
    """

    quiver: Quiver
    relations: tuple[Relation, ...]
    L: int
    p: int
    basis: tuple[Path, ...]
    mult: np.ndarray = field(repr=False)
    _nf_rows: np.ndarray = field(repr=False)
    _nf_pivots: list = field(repr=False)
    _columns: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.quiver.n

    @cached_property
    def idempotent(self) -> tuple[int, ...]:
        return tuple(self.basis.index((v, v, ())) for v in range(self.n))

    @cached_property
    def long_paths(self) -> tuple[tuple[int, ...], ...]:
        """Arrow sequences of length ``L`` (all of them vanish in A)."""
        return tuple(q[2] for q in _all_paths(self.quiver, self.L) if len(q[2]) == self.L)

    @cached_property
    def source(self) -> np.ndarray:
        return np.array([b[0] for b in self.basis], dtype=np.int64)

    @cached_property
    def target(self) -> np.ndarray:
        return np.array([b[1] for b in self.basis], dtype=np.int64)

    def paths_between(self, i: int, j: int) -> list[int]:
        """Basis indices of path classes from ``i`` to ``j``."""
        return [k for k, b in enumerate(self.basis) if b[0] == i and b[1] == j]

    @cached_property
    def pair_mask(self) -> np.ndarray:
        """``pair_mask[i, j, k]`` is true when basis element k runs i -> j."""
        m = np.zeros((self.n, self.n, self.dim), dtype=bool)
        for k, (s, t, _) in enumerate(self.basis):
            m[s, t, k] = True
        return m

    def normal_form(self, path: Path) -> np.ndarray:
        """Coordinates of a path in the basis (zero if it lies in I)."""
        out = np.zeros(self.dim, dtype=np.int64)
        if len(path[2]) >= self.L:
            return out
        col = self._columns[path]
        v = np.zeros(len(self._columns), dtype=np.int64)
        v[col] = 1
        red = el.reduce_modulo(self._nf_rows, self._nf_pivots, v, self.p)[0]
        for k, b in enumerate(self.basis):
            out[k] = red[self._columns[b]]
        return out

    def element(self, terms) -> np.ndarray:
        """Algebra element from ``(coef, arrow-name path)`` pairs."""
        out = np.zeros(self.dim, dtype=np.int64)
        for c, names in terms:
            out = (out + c * self.normal_form(self._path_of(names))) % self.p
        return out

    def _path_of(self, names) -> Path:
        idx = tuple(self.quiver.arrow_index(a) for a in names)
        if not idx:
            raise AlgebraError("use vertex idempotents for trivial paths")
        arrs = self.quiver.arrows
        for x, y in zip(idx, idx[1:]):
            if arrs[x].target != arrs[y].source:
                raise AlgebraError(f"path {list(names)} is not composable")
        return (arrs[idx[0]].source, arrs[idx[-1]].target, idx)

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("x,y,xyz->z", x, y, self.mult) % self.p

    @cached_property
    def opposite(self) -> "Algebra":
        return opposite_algebra(self)

    @cached_property
    def fingerprint(self) -> tuple:
        return (
            self.quiver,
            tuple((tuple(r.terms)) for r in self.relations),
            self.L,
            self.p,
        )

    def with_field(self, p: int) -> "Algebra":
        """Same quiver and relations over another prime field."""
        return build_algebra(self.quiver, self.relations, self.L, p)


def _all_paths(quiver: Quiver, max_len: int) -> list[Path]:
    paths: list[Path] = [(v, v, ()) for v in range(quiver.n)]
    frontier = [(a.source, a.target, (k,)) for k, a in enumerate(quiver.arrows)]
    length = 1
    while frontier and length <= max_len:
        paths.extend(frontier)
        nxt = []
        for s, t, arr in frontier:
            for k, a in enumerate(quiver.arrows):
                if a.source == t:
                    nxt.append((s, a.target, arr + (k,)))
        frontier = nxt
        length += 1
    return paths


def _concat(x: Path, y: Path) -> Path | None:
    """Path "x then y" if composable."""
    if x[1] != y[0]:
        return None
    return (x[0], y[1], x[2] + y[2])


def build_algebra(quiver: Quiver, relations: Sequence[Relation], L: int, p: int) -> Algebra:
    """Build ``kQ/I`` where every path of length ``L`` must vanish."""
    if not el.is_prime(p):
        raise AlgebraError(f"field characteristic {p} is not prime")
    if L < 1:
        raise AlgebraError("nilpotency bound must be positive")
    relations = tuple(relations)
    paths = _all_paths(quiver, L)
    # longest paths first so that pivots land on long paths and the
    # surviving basis is made of short ones
    order = sorted(paths, key=lambda q: (-len(q[2]), q[0], q[1], q[2]))
    columns = {q: k for k, q in enumerate(order)}

    rel_paths = []
    for r in relations:
        terms = []
        for c, names in r.terms:
            idx = []
            for a in names:
                try:
                    idx.append(quiver.arrow_index(a))
                except UnknownArrow:
                    raise UnknownArrow(f"relation uses unknown arrow {a!r}") from None
            if not idx:
                raise NonParallelRelation("relation terms must be nonempty paths")
            arrs = quiver.arrows
            for x, y in zip(idx, idx[1:]):
                if arrs[x].target != arrs[y].source:
                    raise NonParallelRelation(f"path {list(names)} is not composable")
            terms.append((int(c) % p, (arrs[idx[0]].source, arrs[idx[-1]].target, tuple(idx))))
        ends = {(q[0], q[1]) for _, q in terms}
        if len(ends) != 1:
            raise NonParallelRelation("relation paths must share source and target")
        rel_paths.append(terms)

    rows = []
    for terms in rel_paths:
        s, t = terms[0][1][0], terms[0][1][1]
        befores = [q for q in paths if q[1] == s]
        afters = [q for q in paths if q[0] == t]
        for q0 in befores:
            for q1 in afters:
                v = np.zeros(len(order), dtype=np.int64)
                for c, r in terms:
                    full = _concat(_concat(q0, r), q1)
                    if len(full[2]) <= L:
                        v[columns[full]] = (v[columns[full]] + c) % p
                if v.any():
                    rows.append(v)
    if rows:
        rk, piv, red = el.rref_rank(np.stack(rows), p)
        red = red[:rk]
    else:
        piv, red = [], np.zeros((0, len(order)), dtype=np.int64)

    for q in paths:
        if len(q[2]) == L:
            v = np.zeros(len(order), dtype=np.int64)
            v[columns[q]] = 1
            if el.reduce_modulo(red, piv, v, p).any():
                names = [quiver.arrows[k].name for k in q[2]]
                raise NotNilpotentAtBound(f"path {names} of length {L} is nonzero in A")

    pivset = set(piv)
    basis = tuple(
        sorted(
            (q for q in paths if len(q[2]) < L and columns[q] not in pivset),
            key=lambda q: (len(q[2]), q[0], q[1], q[2]),
        )
    )
    alg = Algebra(quiver, relations, L, p, basis, np.zeros((0, 0, 0), dtype=np.int64), red, piv, columns)
    dim = len(basis)
    mult = np.zeros((dim, dim, dim), dtype=np.int64)
    for x, bx in enumerate(basis):
        for y, by in enumerate(basis):
            q = _concat(by, bx)
            if q is not None:
                mult[x, y] = alg.normal_form(q)
    alg.mult = mult
    return alg


def proj_hom_basis(alg: Algebra, i: int, j: int) -> list[int]:
    """Basis of ``Hom(P_i, P_j) = e_i A e_j``: path classes from j to i."""
    return alg.paths_between(j, i)


def rep_projective(alg: Algebra, i: int):
    """The indecomposable projective ``P_i = A e_i`` as a representation."""
    from .rep import Representation

    at = [alg.paths_between(i, v) for v in range(alg.n)]
    maps = []
    for ka, a in enumerate(alg.quiver.arrows):
        src, tgt = at[a.source], at[a.target]
        m = np.zeros((len(tgt), len(src)), dtype=np.int64)
        arrow_elt = alg.normal_form((a.source, a.target, (ka,)))
        for col, k in enumerate(src):
            e = np.zeros(alg.dim, dtype=np.int64)
            e[k] = 1
            img = alg.multiply(arrow_elt, e)
            m[:, col] = img[tgt]
        maps.append(m)
    return Representation(alg, tuple(len(x) for x in at), tuple(maps))


def opposite_algebra(alg: Algebra) -> Algebra:
    """Arrows and relation paths reversed; arrow names are kept."""
    rels = tuple(Relation(tuple((c, tuple(reversed(path))) for c, path in r.terms)) for r in alg.relations)
    return build_algebra(alg.quiver.opposite(), rels, alg.L, alg.p)


# -- built-in fixtures --------------------------------------------------------

BUILTINS = {
    "a2": dict(vertices=["1", "2"], arrows=[("a", "1", "2")], relations=[], L=2),
    "k2": dict(vertices=["1", "2"], arrows=[("a", "1", "2"), ("b", "1", "2")], relations=[], L=2),
    "k3": dict(
        vertices=["1", "2"],
        arrows=[("a", "1", "2"), ("b", "1", "2"), ("c", "1", "2")],
        relations=[],
        L=2,
    ),
    "a3n": dict(
        vertices=["1", "2", "3"],
        arrows=[("a", "1", "2"), ("b", "2", "3")],
        relations=[Relation.of((1, ("a", "b")))],
        L=2,
    ),
}


@lru_cache(maxsize=None)
def builtin(name: str, p: int = 1009) -> Algebra:
    spec = BUILTINS[name]
    q = Quiver.from_lists(spec["vertices"], spec["arrows"])
    return build_algebra(q, spec["relations"], spec["L"], p)
