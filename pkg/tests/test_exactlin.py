import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semitorsion import exactlin as el

from oracles import brute_rank, is_irreducible_brute, poly_mul


def test_rref_examples():
    r, piv, red = el.rref_rank(np.zeros((0, 0), dtype=np.int64), 5)
    assert (r, list(piv)) == (0, [])
    r, piv, red = el.rref_rank(np.eye(3, dtype=np.int64), 5)
    assert r == 3 and list(piv) == [0, 1, 2]
    assert el.rank([[1, 2], [2, 4]], 5) == 1


def test_kernel_examples():
    assert el.kernel_basis(np.eye(2, dtype=np.int64), 5).shape == (2, 0)
    assert el.kernel_basis(np.zeros((2, 3), dtype=np.int64), 5).shape == (3, 3)
    k = el.kernel_basis([[1, 2], [2, 4]], 5)
    assert k.shape == (2, 1)
    assert not (np.array([[1, 2], [2, 4]]) @ k % 5).any()
    # (3, 1) up to scalar
    v = k[:, 0] * pow(int(k[1, 0]), -1, 5) % 5
    assert list(v) == [3, 1]


def test_reduced_form_shape():
    m = np.array([[0, 2, 4, 1], [0, 1, 2, 3], [1, 1, 1, 1]])
    r, piv, red = el.rref_rank(m, 7)
    assert list(piv) == sorted(piv)
    for i, c in enumerate(piv):
        col = red[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1


mats = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.integers(0, 100), min_size=r * c, max_size=r * c).map(
            lambda xs: np.array(xs, dtype=np.int64).reshape(r, c)
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(mats, st.sampled_from([2, 3, 5]))
def test_rank_matches_brute_force(m, q):
    assert el.rank(m, q) == brute_rank(m, q)


@settings(max_examples=60, deadline=None)
@given(mats, st.sampled_from([2, 5, 1009]))
def test_rank_transpose_and_kernel(m, p):
    m = m % p
    assert el.rank(m, p) == el.rank(m.T, p)
    k = el.kernel_basis(m, p)
    assert k.shape[1] == m.shape[1] - el.rank(m, p)
    assert not (m @ k % p).any()
    assert el.rank(k, p) == k.shape[1]


def test_batch_ranks_agree_with_single():
    rng = np.random.default_rng(3)
    stack = rng.integers(0, 7, size=(20, 5, 6)) * (rng.random((20, 5, 6)) < 0.4)
    got = el.batch_ranks(stack, 7)
    assert list(got) == [el.rank(m, 7) for m in stack]
    # early stop leaves the tail unevaluated
    full = np.eye(5, 6, dtype=np.int64)[None].repeat(3, axis=0)
    out = el.batch_ranks(full, 7, stop_at=5)
    assert out[0] == 5 and (out[1:] == -1).all()


def test_solve_and_inverse():
    a = np.array([[1, 2], [3, 4]])
    x = el.solve(a, np.array([1, 0]), 11)
    assert list(a @ x % 11) == [1, 0]
    assert el.solve(np.array([[1, 2], [2, 4]]), np.array([0, 1]), 5) is None
    inv = el.inverse(a, 11)
    assert (a @ inv % 11 == np.eye(2)).all()


def test_factor_examples():
    # x^2 - 1 = (x + 1)(x - 1) over F_5
    assert el.poly_factor([-1, 0, 1], 5) == [[[1, 1], 1], [[4, 1], 1]]
    # x^2 + 1 has no root in F_3
    assert el.poly_factor([1, 0, 1], 3) == [[[1, 0, 1], 1]]
    assert el.poly_factor([0, 0, 0, 1], 7) == [[[0, 1], 3]]
    with pytest.raises(el.ZeroPolynomial):
        el.poly_factor([0], 7)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.lists(st.integers(0, 6), min_size=1, max_size=7), st.integers(1, 6))
def test_factor_remultiplies_to_monic_input(p, coeffs, lead):
    f = [c % p for c in coeffs] + [lead % p or 1]
    facs = el.poly_factor(f, p, seed=1)
    prod = [1]
    for g, m in facs:
        assert g[-1] == 1
        assert is_irreducible_brute(g, p)
        for _ in range(m):
            prod = poly_mul(prod, g, p)
    inv = pow(f[-1], -1, p)
    assert prod == [c * inv % p for c in f]


def test_factor_large_prime_repeated_and_split():
    p = 1009
    f = poly_mul(poly_mul([3, 1], [3, 1], p), [1, 0, 1], p)  # (x+3)^2 (x^2+1); -1 is a square mod 1009
    facs = el.poly_factor(f, p)
    degs = sorted((len(g) - 1, m) for g, m in facs)
    assert degs == [(1, 1), (1, 1), (1, 2)]


def test_min_poly_vectors():
    # Jordan block with eigenvalue 2: (x - 2)^2 = x^2 + x + 4 over F_5
    z = np.array([[2, 1], [0, 2]])
    powers = (np.linalg.matrix_power(z, k).ravel() % 5 for k in range(10))
    assert el.min_poly_vectors(powers, 5) == [4, 1, 1]
