import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bnck import classify as cl
from bnck import exactfield as ef
from bnck import liealg as la
from bnck import sampling as sp

signs = st.sampled_from([1, -1])
small = st.sampled_from([Fraction(p, q) for p in range(-2, 3) for q in (1, 2)])
seeds = st.integers(0, 10**6)


def e(n, i):
    return la.basis_vector(n, i)


def so3():
    return la.LieAlgebra.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})


def heisenberg():
    return la.LieAlgebra.from_brackets(3, {(0, 1): {2: 1}})


def test_jacobi_examples():
    assert la.jacobi_check(la.LieAlgebra.abelian(3)).passed
    assert la.jacobi_check(so3()).passed
    bad = la.LieAlgebra.from_brackets(3, {(0, 1): {0: 1}, (0, 2): {1: 1}})
    r = la.jacobi_check(bad)
    assert not r.passed
    assert r.failures()[0].witness[0] == (1, 2, 3)


def test_antisymmetry_enforced():
    c = ef.zeros(2, 2, 2)
    c[0, 1, 0] = Fraction(1)
    with pytest.raises(ValueError):
        la.LieAlgebra(c)


def test_ce_differential_examples():
    assert ef.all_zero(la.ce_differential(la.LieAlgebra.abelian(3), la.form(3, 2, {(0, 1): 1})))
    d = la.ce_differential(heisenberg(), e(3, 2))
    assert la.evaluate(d, e(3, 0), e(3, 1)) == -1
    assert ef.equal(d, -la.wedge(e(3, 0), e(3, 1)))
    # [w1, w2] = w2
    L = cl.nonunimodular_3d(1, 0, 0, 0)
    d = la.ce_differential(L, e(3, 1))
    assert ef.equal(d, -la.wedge(e(3, 0), e(3, 1)))


def test_levi_civita_unimodular_example():
    nabla = la.levi_civita(la.unimodular_3d((1, 2, 3), (1, 1, 1)), la.PseudoMetric.diagonal([1, 1, 1]))
    assert ef.equal(nabla.derivative(e(3, 0), e(3, 1)), 2 * e(3, 2))
    assert ef.equal(nabla.derivative(e(3, 1), e(3, 0)), -e(3, 2))
    for i in range(3):
        assert ef.all_zero(nabla.derivative(e(3, i), e(3, i)))


def test_levi_civita_nonunimodular_example():
    nabla = la.levi_civita(cl.nonunimodular_3d(0, 0, 0, 1), la.PseudoMetric.diagonal([1, 1, 1]))
    assert ef.equal(nabla.derivative(e(3, 2), e(3, 2)), e(3, 0))
    assert ef.equal(nabla.derivative(e(3, 2), e(3, 0)), -e(3, 2))
    assert ef.all_zero(nabla.derivative(e(3, 0), e(3, 2)))


def test_levi_civita_abelian_is_flat():
    g = la.PseudoMetric(ef.matrix([[2, 1, 0], [1, -1, 0], [0, 0, 3]]))
    assert ef.all_zero(la.levi_civita(la.LieAlgebra.abelian(3), g).gamma)


def test_canonical_operator():
    g = la.PseudoMetric.diagonal([1, 1, 1])
    assert ef.equal(la.canonical_operator_L(so3(), g), ef.identity(3))
    H = la.canonical_operator_L(heisenberg(), g)
    assert ef.equal(H, ef.matrix([[0, 0, 0], [0, 0, 0], [0, 0, 1]]))
    assert ef.equal(la.canonical_operator_L(so3(), g, orientation=-1), -ef.identity(3))


@given(seeds, st.tuples(signs, signs, signs))
def test_canonical_operator_reproduces_bracket(seed, eps):
    rng = random.Random(seed)
    L = sp.rand_lie_algebra(rng, 3)
    g = la.PseudoMetric.diagonal(eps)
    Lop = la.canonical_operator_L(L, g)
    for u, v in itertools.combinations([e(3, i) for i in range(3)], 2):
        assert ef.equal(Lop @ la.cross(g, u, v), L.bracket(u, v))


def test_killing_examples():
    g = la.PseudoMetric.diagonal([1, 1, 1])
    assert la.killing_fields(la.LieAlgebra.abelian(3), g).rank == 3
    v2 = ef.span([e(3, 1)], 3)
    assert la.killing_fields(la.unimodular_3d((1, 2, 1), (1, 1, 1)), g) == v2
    assert la.killing_fields(cl.nonunimodular_3d(0, 0, 0, 2), g) == v2


def test_unimodular_data():
    ok, k = la.unimodular_data(la.LieAlgebra.abelian(3))
    assert ok and k.rank == 3
    ok, k = la.unimodular_data(cl.nonunimodular_3d(1, 0, 0, 0))
    assert not ok and k == ef.span([e(3, 1), e(3, 2)], 3)
    assert la.unimodular_data(so3())[0]


def test_derivations():
    L = so3()
    x = ef.vector([1, Fraction(1, 2), -2])
    assert la.is_derivation(L, L.ad(x)).passed
    assert not la.is_derivation(L, ef.identity(3)).passed


@given(st.tuples(signs, signs, signs), st.lists(small, min_size=9, max_size=9))
def test_adapted_derivation_condition(eps, entries):
    """With all lambda = 1: derivation iff a_ii = 0 and a_ij = -e_i e_j a_ji."""
    A = [entries[3 * i: 3 * i + 3] for i in range(3)]
    L0 = la.unimodular_3d((1, 1, 1), eps)
    D = ef.matrix(A).T  # D e_i = sum_j a_ij e_j
    expected = all(A[i][i] == 0 for i in range(3)) and all(
        A[i][j] == -eps[i] * eps[j] * A[j][i] for i in range(3) for j in range(3))
    assert la.is_derivation(L0, D).passed == expected


@given(seeds, st.integers(2, 4))
def test_d_squared_zero(seed, n):
    rng = random.Random(seed)
    L = sp.rand_lie_algebra(rng, n)
    for k in (1, 2):
        idx = list(itertools.combinations(range(n), k))
        w = la.form(n, k, {i: sp.rand_rational(rng) for i in idx})
        assert ef.all_zero(la.ce_differential(L, la.ce_differential(L, w)))


@given(seeds, st.integers(2, 4))
def test_levi_civita_properties(seed, n):
    rng = random.Random(seed)
    L = sp.rand_lie_algebra(rng, n)
    P = sp.rand_invertible(rng, n)
    eta = ef.matrix(np.diag([ef.as_scalar(rng.choice([1, -1])) for _ in range(n)]))
    g = la.PseudoMetric(P.T @ eta @ P)
    nabla = la.levi_civita(L, g)
    assert nabla.torsion_free(L)
    assert nabla.metric_compatible(g)
    K = la.killing_fields(L, g)
    for k in K.vectors():
        assert la.is_killing(L, g, k)
    # Killing fields form a subalgebra
    assert la.is_subalgebra(L, K)[0]


@given(seeds)
def test_wedge_graded_commutative(seed):
    rng = random.Random(seed)
    a = ef.vector([sp.rand_rational(rng) for _ in range(4)])
    b = sp.rand_antisymmetric(rng, 4)
    assert ef.equal(la.wedge(a, b), la.wedge(b, a))
    assert ef.all_zero(la.wedge(a, a))


def test_metric_validation():
    with pytest.raises(ValueError):
        la.PseudoMetric(ef.matrix([[1, 2], [0, 1]]))
    with pytest.raises(ValueError):
        la.PseudoMetric(ef.matrix([[1, 1], [1, 1]]))
