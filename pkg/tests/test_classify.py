import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bnck import classify as cl
from bnck import exactfield as ef
from bnck import integrability as it
from bnck import liealg as la

seeds = st.integers(0, 10**6)
Q = Fraction
A_ZERO = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
A_23 = [[0, 0, 0], [0, 0, 1], [0, -1, 0]]


def test_rational_sqrt():
    assert cl.rational_sqrt(Q(16, 25)) == Q(4, 5)
    assert cl.rational_sqrt(Q(2)) is None


# ---------------------------------------------------------------- catalog

def test_dim2_default_point():
    for sign in (1, -1):
        _, comps = cl.entry("DIM2-ABELIAN").generate({"y": Q(3, 5), "eps": 1, "eps_plus": sign})
        assert comps.c_plus == sign * Q(4, 5)


def test_dim2_rejects_unit_fields():
    with pytest.raises(cl.InadmissibleParameters, match="parallel"):
        cl.entry("DIM2-ABELIAN").generate({"y": 1, "eps": 1})


def test_dim4_rejects_zero_c():
    with pytest.raises(cl.InadmissibleParameters):
        cl.entry("DIM4-ADAPTED").generate({"c_plus": 0, "a": 1, "b_t": 1})


def test_iso11_has_no_admissible_instance(rng):
    e = cl.entry("DIM3-ISO11")
    with pytest.raises(cl.InadmissibleParameters, match="not definite"):
        e.generate({"lam": 2})
    assert e.sample(rng, 5) == []


@pytest.mark.parametrize("name,params", [
    ("DIM2-ABELIAN", {"y": Q(3, 5)}),
    ("DIM3-ISO2", {"lam": 1, "eps1": 1, "eps3": 1}),
    ("DIM3-RxSOL2", {"delta": 3, "eps": 1, "eps_prime": 1}),
    ("DIM4-ADAPTED", {"lam": 1, "beta": 0, "a": Q(3, 5), "b": 0, "a_t": 0, "b_t": Q(3, 5), "c_plus": Q(4, 5)}),
])
def test_catalog_examples_verify(name, params):
    assert cl.verify_entry(cl.entry(name), params).passed


@pytest.mark.parametrize("name", [e.name for e in cl.catalog() if e.name != "DIM3-ISO11"])
def test_catalog_samples_verify(name, rng):
    e = cl.entry(name)
    samples = e.sample(rng, 5)
    assert len(samples) == 5
    for p in samples:
        assert cl.verify_entry(e, p).passed, (name, p)


def test_rxsol2_orthonormal_rejects_nonpositive_pattern():
    with pytest.raises(cl.InadmissibleParameters):
        cl.entry("DIM3-RxSOL2-ORTHONORMAL").generate({"eps2": -1, "eps3": -1})


# ------------------------------------------------------- Levi-Civita tables

@settings(max_examples=20)
@given(st.lists(st.sampled_from([Q(p, q) for p in range(-3, 4) for q in (1, 2)]), min_size=3, max_size=3),
       st.tuples(*[st.sampled_from([1, -1])] * 3))
def test_unimodular_table_matches_koszul(lams, eps):
    L = la.unimodular_3d(lams, eps)
    g = la.PseudoMetric.diagonal(eps)
    assert ef.equal(cl.levi_civita_unimodular_3d(lams, eps).gamma, la.levi_civita(L, g).gamma)


# ------------------------------------------------------ pencils and units

def test_pencil_kernels():
    A0 = ef.matrix([[1, 0], [0, 2]])
    A1 = ef.matrix([[-1, 0], [0, -1]])
    roots, irr = cl.pencil_kernels(A0, A1)
    assert irr == 0
    assert sorted(t for t, _ in roots) == [1, 2]
    roots, irr = cl.pencil_kernels(ef.matrix([[2, 0], [0, 1]]), ef.matrix([[0, -1], [-1, 0]]))
    assert roots == [] and irr == 2


def test_unit_representatives():
    g = la.PseudoMetric.diagonal([1, 1, 1])
    reps, irr = cl.unit_representatives(g, [la.basis_vector(3, 1)])
    assert not irr
    assert any(ef.equal(r, la.basis_vector(3, 1)) for r in reps)
    for r in reps:
        assert g.inner(r, r) == 1


# ------------------------------------------------------------- dim 3 search

def test_search_iso2_point():
    sols = cl.search_dim3_unimodular((1, 0, 1), (1, 1, 1))
    assert sols
    v2 = la.basis_vector(3, 1)
    for s in sols:
        assert ef.all_zero(s.algebroid.H) and ef.all_zero(s.algebroid.F)
        assert ef.equal(s.components.X_minus, v2) or ef.equal(s.components.X_minus, -v2)
        assert ef.equal(s.components.X_plus, v2) or ef.equal(s.components.X_plus, -v2)
        assert s.report.passed


@pytest.mark.parametrize("lams", [(1, 1, 1), (1, 2, 1)])
def test_search_empty_points(lams):
    log = []
    assert cl.search_dim3_unimodular(lams, (1, 1, 1), log) == []
    assert not any("irrational" in m for m in log)


def test_search_lorentzian_is_empty():
    log = []
    assert cl.search_dim3_unimodular((1, 0, 1), (1, 1, -1), log) == []
    assert log and "det g < 0" in log[0]


# --------------------------------------------------------------- dim 4

def point(lams, A, xp, c=Q(4, 5), eps=(1, 1)):
    return cl.make_point(eps[0], eps[1], lams, A, xp, c)


def test_class4_point_extends():
    r = cl.analyze_point(point((0, 1, 1), A_23, (Q(3, 5), 0, 0, 0)))
    assert r.classes == [4] and r.agree and r.extendable and r.family_shape
    for A, comps in r.completions:
        assert ef.all_zero(A.H) and ef.all_zero(A.F)
        assert it.check_even(A, comps).passed


def test_class1_point_does_not_extend():
    r = cl.analyze_point(point((1, 2, 2), A_ZERO, (Q(3, 5), 0, 0, 0)))
    assert r.classes == [1] and r.agree and not r.extendable


def test_class8_point_at_zero_lambda1_extends():
    r = cl.analyze_point(point((0, 1, 1), A_ZERO, (0, Q(3, 5), 0, 0)))
    assert r.classes == [8] and r.agree and r.extendable and r.family_shape
    H, F = cl.class_forms(8, r.point)
    assert ef.all_zero(H) and ef.all_zero(F)


def test_class8_point_with_nonzero_lambda1_does_not_extend():
    r = cl.analyze_point(point((1, 2, 2), A_ZERO, (0, Q(3, 5), 0, 0)))
    assert r.classes == [8] and r.agree
    assert not r.extendable
    assert cl.expected_extendable(8, r.point) and not cl.refined_extendable(8, r.point)


def test_solve_classes_rejects_boundary_c():
    for c in (0, 1, -1):
        with pytest.raises(ValueError):
            cl.solve_classes_dim4((1, 1), c, per_class=1)


@settings(max_examples=25)
@given(seeds)
def test_specialized_vs_generic(seed):
    p, H, F = cl.random_adapted_point(random.Random(seed))
    r = cl.specialized_vs_generic(p, H, F)
    assert r.passed, r.failures()


@settings(max_examples=10)
@given(seeds)
def test_adapted_table_matches_koszul(seed):
    p, _, _ = cl.random_adapted_point(random.Random(seed))
    closed = cl.levi_civita_adapted_4d(p.lams, p.A, p.eps, p.eps1)
    assert ef.equal(closed.gamma, la.levi_civita(p.algebra(), p.metric()).gamma)
