"""Dense linear algebra and univariate polynomials over a prime field F_p.

Matrices are ``numpy`` int64 arrays with entries in ``[0, p)``; every routine
takes the modulus explicitly.  The elimination kernels are compiled with
numba, which keeps the generic-rank sweeps in the harness affordable.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "ZeroPolynomial",
    "is_prime",
    "as_matrix",
    "rref_rank",
    "rank",
    "batch_ranks",
    "kernel_basis",
    "solve",
    "inverse",
    "reduce_modulo",
    "poly_trim",
    "poly_mul",
    "poly_divmod",
    "poly_gcd",
    "poly_monic",
    "poly_powmod",
    "poly_factor",
    "poly_eval_matrix",
    "min_poly_vectors",
]


class ZeroPolynomial(ValueError):
    """Raised when factoring the zero polynomial."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def as_matrix(m, p: int) -> np.ndarray:
    """Copy ``m`` into a reduced int64 array (2-D, possibly empty)."""
    a = np.array(m, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else np.zeros((0, 0), dtype=np.int64)
    return np.mod(a, p)


# -- compiled kernels -------------------------------------------------------


@njit(cache=True, nogil=True)
def _inv(a, p):
    # Fermat inverse; p is prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


@njit(cache=True, nogil=True)
def _rref_inplace(a, p, pivots):
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = _inv(a[r, c], p)
        for j in range(c, cols):
            a[r, j] = a[r, j] * inv % p
        for i in range(rows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    for j in range(c, cols):
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
        pivots[r] = c
        r += 1
    return r


@njit(cache=True, nogil=True)
def _rank_inplace(a, p):
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = _inv(a[r, c], p)
        for i in range(r + 1, rows):
            f = a[i, c]
            if f != 0:
                f = f * inv % p
                for j in range(c, cols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    return r


@njit(cache=True, nogil=True)
def _batch_ranks(stack, p, stop_at):
    n = stack.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        out[s] = _rank_inplace(stack[s], p)
        if stop_at >= 0 and out[s] >= stop_at:
            break
    return out


# -- public matrix routines -------------------------------------------------


def rref_rank(m, p: int):
    """Reduced row-echelon form.

    Returns ``(rank, pivots, reduced)`` where ``pivots`` lists the pivot
    columns in increasing order.
    """
    a = as_matrix(m, p)
    piv = np.zeros(min(a.shape) if a.size else 0, dtype=np.int64)
    if a.size == 0:
        return 0, [], a
    r = _rref_inplace(a, p, piv)
    return int(r), [int(c) for c in piv[:r]], a


def rank(m, p: int) -> int:
    a = as_matrix(m, p)
    if a.size == 0:
        return 0
    return int(_rank_inplace(a, p))


def batch_ranks(stack: np.ndarray, p: int, stop_at: int = -1) -> np.ndarray:
    """Ranks of a stack of equally shaped matrices.

    With ``stop_at >= 0`` evaluation stops after the first matrix reaching
    that rank; unevaluated entries are ``-1``.
    """
    stack = np.mod(np.asarray(stack, dtype=np.int64), p)
    if stack.shape[1] == 0 or stack.shape[2] == 0:
        out = np.zeros(stack.shape[0], dtype=np.int64)
        if stop_at >= 0 and out.size:
            out[1:] = -1
        return out
    return _batch_ranks(np.ascontiguousarray(stack), p, stop_at)


def kernel_basis(m, p: int) -> np.ndarray:
    """Right null space; the columns of the result form a basis."""
    a = as_matrix(m, p)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv, red = rref_rank(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, c in enumerate(piv):
            basis[c, k] = (-red[i, f]) % p
    return basis


def solve(a, b, p: int) -> np.ndarray | None:
    """One solution ``x`` of ``a @ x = b`` or ``None`` when inconsistent."""
    a = as_matrix(a, p)
    b = np.mod(np.asarray(b, dtype=np.int64), p)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    n = a.shape[1]
    if a.shape[0] == 0:
        x = np.zeros((n, b.shape[1]), dtype=np.int64)
        return x[:, 0] if vec else x
    aug = np.concatenate([a, b], axis=1)
    r, piv, red = rref_rank(aug, p)
    if any(c >= n for c in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = red[i, n:]
    return x[:, 0] if vec else x


def inverse(a, p: int) -> np.ndarray:
    a = as_matrix(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, np.eye(n, dtype=np.int64), p)
    if x is None or rank(a, p) < n:
        raise ValueError("matrix is singular")
    return x


def reduce_modulo(reduced: np.ndarray, pivots, v: np.ndarray, p: int) -> np.ndarray:
    """Reduce the rows of ``v`` against an RREF row space."""
    v = np.mod(np.atleast_2d(np.asarray(v, dtype=np.int64)), p)
    if not len(pivots):
        return v
    coeff = v[:, pivots]
    return np.mod(v - coeff @ reduced[: len(pivots)], p)


# -- polynomials (coefficient lists, lowest degree first) --------------------


def poly_trim(f, p: int) -> list[int]:
    f = [int(c) % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_monic(f, p: int) -> list[int]:
    f = poly_trim(f, p)
    if not f:
        return f
    inv = pow(f[-1], p - 2, p)
    return [c * inv % p for c in f]


def poly_add(f, g, p: int) -> list[int]:
    n = max(len(f), len(g))
    return poly_trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], p)


def poly_sub(f, g, p: int) -> list[int]:
    return poly_add(f, [-c for c in g], p)


def poly_mul(f, g, p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim(out, p)


def poly_divmod(f, g, p: int):
    f = poly_trim(f, p)
    g = poly_trim(g, p)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(g[-1], p - 2, p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    r = list(f)
    while len(r) >= len(g) and r:
        shift = len(r) - len(g)
        c = r[-1] * inv % p
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % p
        r = poly_trim(r, p)
    return poly_trim(q, p), r


def poly_gcd(f, g, p: int) -> list[int]:
    f, g = poly_trim(f, p), poly_trim(g, p)
    while g:
        f, g = g, poly_divmod(f, g, p)[1]
    return poly_monic(f, p)


def poly_egcd(f, g, p: int):
    """Return ``(d, u, v)`` with ``u f + v g = d`` and ``d`` monic."""
    r0, r1 = poly_trim(f, p), poly_trim(g, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, p), p)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, p), p)
    inv = pow(r0[-1], p - 2, p)
    scale = lambda h: [c * inv % p for c in h]  # noqa: E731
    return scale(r0), scale(s0), scale(t0)


def poly_powmod(f, e: int, m, p: int) -> list[int]:
    result = [1]
    base = poly_divmod(f, m, p)[1]
    while e > 0:
        if e & 1:
            result = poly_divmod(poly_mul(result, base, p), m, p)[1]
        base = poly_divmod(poly_mul(base, base, p), m, p)[1]
        e >>= 1
    return result


def _deriv(f, p: int) -> list[int]:
    return poly_trim([i * f[i] for i in range(1, len(f))], p)


def _squarefree(f, p: int) -> list[tuple[list[int], int]]:
    """Square-free decomposition of a monic polynomial (Yun, char p)."""
    out: list[tuple[list[int], int]] = []
    if len(f) <= 1:
        return out
    df = _deriv(f, p)
    if not df:
        # f(x) = g(x^p) = g(x)^p over F_p
        g = [f[i] for i in range(0, len(f), p)]
        return [(h, m * p) for h, m in _squarefree(g, p)]
    c = poly_gcd(f, df, p)
    w = poly_divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = poly_gcd(w, c, p)
        z = poly_divmod(w, y, p)[0]
        if len(z) > 1:
            out.append((poly_monic(z, p), i))
        i += 1
        w = y
        c = poly_divmod(c, y, p)[0]
    if len(c) > 1:
        g = [c[i] for i in range(0, len(c), p)]
        out.extend((h, m * p) for h, m in _squarefree(poly_monic(g, p), p))
    return out


def _distinct_degree(f, p: int) -> list[tuple[list[int], int]]:
    out = []
    h = [0, 1]
    d = 0
    f = list(f)
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = poly_powmod(h, p, f, p)
        g = poly_gcd(f, poly_sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            f = poly_divmod(f, g, p)[0]
            h = poly_divmod(h, f, p)[1]
    if len(f) > 1:
        out.append((poly_monic(f, p), len(f) - 1))
    return out


def _equal_degree(f, d: int, p: int, rng) -> list[list[int]]:
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = poly_trim([int(x) for x in rng.integers(0, p, size=n)], p)
        if len(a) <= 1:
            continue
        if p == 2:
            t = list(a)
            b = list(a)
            for _ in range(d - 1):
                b = poly_powmod(b, 2, f, p)
                t = poly_add(t, b, p)
            g = poly_gcd(f, t, p)
        else:
            b = poly_powmod(a, (p**d - 1) // 2, f, p)
            g = poly_gcd(f, poly_sub(b, [1], p), p)
        if 1 < len(g) < len(f):
            h = poly_divmod(f, g, p)[0]
            return _equal_degree(g, d, p, rng) + _equal_degree(poly_monic(h, p), d, p, rng)


def poly_factor(f, p: int, seed: int = 0) -> list[tuple[list[int], int]]:
    """Factor ``f`` into monic irreducibles with multiplicities.

    Square-free, distinct-degree and Cantor-Zassenhaus stages; the
    randomised splitting draws from ``seed``.  Factors are sorted.
    """
    f = poly_trim(f, p)
    if not f:
        raise ZeroPolynomial("cannot factor the zero polynomial")
    f = poly_monic(f, p)
    rng = np.random.default_rng(seed)
    out: list[tuple[list[int], int]] = []
    for g, mult in _squarefree(f, p):
        for h, d in _distinct_degree(g, p):
            for irr in _equal_degree(h, d, p, rng):
                out.append((poly_monic(irr, p), mult))
    merged: dict[tuple[int, ...], int] = {}
    for g, m in out:
        merged[tuple(g)] = merged.get(tuple(g), 0) + m
    return sorted(([list(g), m] for g, m in merged.items()), key=lambda t: (len(t[0]), t[0]))


def poly_eval_matrix(f, z: np.ndarray, p: int) -> np.ndarray:
    """Evaluate ``f`` at a square matrix by Horner's rule."""
    n = z.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in reversed(poly_trim(f, p)):
        out = (out @ z + c * np.eye(n, dtype=np.int64)) % p
    return out


def min_poly_vectors(powers, p: int) -> list[int]:
    """Minimal polynomial from a generator of successive powers.

    ``powers`` yields flattened vectors ``z^0, z^1, ...`` of an element of
    some algebra; the first linear dependency gives the monic minimal
    polynomial.
    """
    rows: list[np.ndarray] = []
    for v in powers:
        v = np.mod(np.asarray(v, dtype=np.int64).ravel(), p)
        if rows:
            a = np.stack(rows, axis=1)
            x = solve(a, v, p)
            if x is not None:
                return poly_trim([(-int(c)) % p for c in x] + [1], p)
        rows.append(v)
    raise ValueError("power sequence ended before a dependency appeared")
