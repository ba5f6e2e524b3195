import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semitorsion.algebra import builtin, rep_projective
from semitorsion.present import hom_e_generic
from semitorsion.rep import EnumerationCapExceeded, Representation, direct_sum, lift, rep_simple, rep_zero
from semitorsion.stability import build_testset
from semitorsion.tropical import NotFound, stabilization_n, trop_f, trop_f_dual, wildness

from oracles import brute_submodule_dimvectors

A2, K2, K3 = builtin("a2"), builtin("k2"), builtin("k3")
A2q = A2.with_field(2)
K2q = K2.with_field(3)


def test_trop_f_examples():
    P1 = rep_projective(A2q, 0)
    assert trop_f(P1, (1, -1)) == 0
    assert trop_f(rep_simple(A2q, 1), (1, -1)) == 0
    assert trop_f(direct_sum(P1, rep_simple(A2q, 0)), (0, 0)) == 0


def test_trop_f_dual_examples():
    assert trop_f_dual(rep_simple(A2q, 1), (-1, 1)) == 1
    for alg in (A2q, K2q):
        for i in range(alg.n):
            e = tuple(int(j == i) for j in range(alg.n))
            assert trop_f_dual(rep_simple(alg, i), e) == 1
    assert trop_f_dual(rep_projective(A2q, 0), (-1, 1)) == 0
    # equals e((1,-1), S2) over the large field
    assert hom_e_generic(A2, (1, -1), rep_simple(A2, 1)).e == 1


def test_trop_nonnegative_and_zero_module():
    Z = rep_zero(A2q)
    assert trop_f(Z, (3, -2)) == 0 and trop_f_dual(Z, (-1, 1)) == 0


def test_cap_error():
    big = direct_sum(*[rep_projective(A2q, 0)] * 8)
    with pytest.raises(EnumerationCapExceeded):
        trop_f(big, (1, -1))


@pytest.fixture(scope="module")
def small_sets():
    return {
        "a2": build_testset(A2, (2, 2), exhaustive=True, q=2),
        "k2": build_testset(K2, (1, 1), exhaustive=True, q=3),
    }


def test_duality_identity_on_grid(small_sets):
    for ts in small_sets.values():
        n = ts.alg.n
        for tm in ts.modules:
            M = tm.small
            for d in itertools.product(range(-3, 4), repeat=n):
                lhs = trop_f(M, d) - trop_f_dual(M, tuple(-x for x in d))
                assert lhs == int(np.dot(M.dims, d))


def test_trop_matches_brute_force(small_sets):
    for ts in small_sets.values():
        for tm in ts.modules:
            vs = brute_submodule_dimvectors(tm.small)
            for d in [(1, -1), (-2, 1), (1, 1), (-1, -1)]:
                assert trop_f(tm.small, d) == max(int(np.dot(v, d)) for v in vs)


@settings(max_examples=30, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 4))
def test_nonnegative_and_scaling(a, b, c):
    M = direct_sum(rep_projective(A2q, 0), rep_simple(A2q, 1))
    assert trop_f(M, (a, b)) >= 0
    assert trop_f(M, (c * a, c * b)) == c * trop_f(M, (a, b))


def test_stabilization_examples():
    S2 = rep_simple(A2q, 1)
    r = stabilization_n(A2, S2, (1, -1))
    assert r.n_found == 1 and r.ok
    assert [k for k, _ in r.checked_multiples] == list(range(1, 9))
    r0 = stabilization_n(A2, direct_sum(S2, rep_projective(A2q, 0)), (0, 0))
    assert r0.n_found == 1 and r0.wildness_note == "zero"


def test_stabilization_kronecker_regular():
    M = Representation(K2q, (1, 1), (np.array([[1]]), np.array([[2]])))
    r = stabilization_n(K2, M, (1, -1), large=lift(M, K2))
    assert r.n_found == 1 and r.ok
    assert r.wildness_note == "non-wild"
    assert r.values[1] == (0, 0, 0, 0)


def test_stabilization_not_found_is_reported():
    # a hom_e source that never matches the tropical side
    from semitorsion.present import HomEPair

    M = rep_simple(A2q, 0)
    r = stabilization_n(A2, M, (1, -1), n_max=3, hom_e=lambda w: HomEPair(99, 99))
    assert r.n_found is NotFound and not r.ok and r.checked_multiples == ()


def test_wildness_tags():
    assert wildness(K3, (1, -2)) == "wild"
    assert wildness(K2, (1, -1)) == "non-wild"
    assert wildness(A2, (0, 0)) == "zero"
