import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bnck import classify as cl
from bnck import courant as co
from bnck import exactfield as ef
from bnck import liealg as la
from bnck import sampling as sp
from bnck import structures as stc

seeds = st.integers(0, 10**6)
I_ = ef.imag_unit()
HALF = Fraction(1, 2)


def one_dim():
    g = la.PseudoMetric.diagonal([1])
    z = ef.zeros(1, 1)
    v = ef.vector([1])
    return stc.GenMetric(g), stc.ComponentsOdd(g, z, z, v, v)


def test_gend_one_dim():
    m, _ = one_dim()
    G = stc.gend(m)
    assert ef.equal(G @ ef.vector([1, -1, 0]), ef.vector([-1, 1, 0]))
    assert ef.equal(G @ ef.vector([1, 1, 0]), ef.vector([1, 1, 0]))
    assert ef.equal(G @ ef.vector([0, 0, 1]), ef.vector([0, 0, 1]))


@given(seeds, st.integers(1, 4))
def test_gend_involution_and_metric_round_trip(seed, n):
    rng = random.Random(seed)
    P = sp.rand_invertible(rng, n)
    eta = ef.matrix(np.diag([ef.as_scalar(rng.choice([1, -1])) for _ in range(n)]))
    g = P.T @ eta @ P
    m = stc.GenMetric(g)
    G = stc.gend(m)
    assert ef.equal(G @ G, ef.identity(2 * n + 1))
    assert ef.equal(stc.induced_metric(m), g)


def test_assemble_one_dim():
    m, comps = one_dim()
    acs = stc.assemble(m, comps)
    expected = ef.matrix([[0, 0, 1], [0, 0, 1], [-HALF, -HALF, 0]])
    assert ef.equal(acs.F, expected)
    assert ef.equal(acs.F @ acs.F @ ef.vector([0, 0, 1]), ef.vector([0, 0, -1]))


def test_dim2_catalog_kernel():
    A, comps = cl.entry("DIM2-ABELIAN").generate({})
    assert comps.c_plus == Fraction(4, 5)
    m = stc.GenMetric(comps.g)
    acs = stc.assemble(m, comps)
    assert ef.kernel(acs.F) == ef.span([m.s_plus(comps.X_plus, comps.c_plus)], 5)


def test_odd_components_need_unit_fields():
    g = la.PseudoMetric.diagonal([1, 1, 1])
    J = cl.complex_structure_around(g, la.basis_vector(3, 0))
    with pytest.raises(stc.InvalidComponents, match="X_plus"):
        stc.validate(stc.ComponentsOdd(g, J, J, ef.zeros(3), ef.zeros(3)))


def test_round_trips_on_examples():
    m, comps = one_dim()
    assert stc.extract(m, stc.assemble(m, comps)).same_as(comps)
    _, comps = cl.entry("DIM2-ABELIAN").generate({})
    m = stc.GenMetric(comps.g)
    assert stc.extract(m, stc.assemble(m, comps)).same_as(comps)


def test_extract_rejects_non_commuting():
    m, comps = one_dim()
    acs = stc.assemble(m, comps)
    T = ef.identity(3)
    T[0, 1] = ef.as_scalar(1)
    bad = stc.BnACS(ef.inverse(T) @ acs.F @ T, acs.u0, 1)
    with pytest.raises(ValueError, match="commute"):
        stc.extract(m, bad)


def test_eigenbundles_one_dim():
    m, comps = one_dim()
    eb = stc.eigenbundles(m, stc.assemble(m, comps))
    assert eb.L1 == ef.span([ef.vector([1, 1, I_])], 3)
    assert eb.L1_minus.rank == 0
    assert eb.agree


def test_eigenbundles_dim2_catalog():
    _, comps = cl.entry("DIM2-ABELIAN").generate({})
    m = stc.GenMetric(comps.g)
    eb = stc.eigenbundles(m, stc.assemble(m, comps))
    c = Fraction(4, 5)
    v = (comps.X_minus - (I_ * c) * comps.X_plus) * (1 / (1 - c * c))
    assert 1 - c * c == Fraction(9, 25)
    assert eb.L1_plus == ef.span([m.s_plus(v, I_)], 5)
    assert eb.agree


def test_eigenbundle_rank_on_catalog():
    for e in cl.catalog():
        try:
            _, comps = e.generate({})
        except cl.InadmissibleParameters:
            continue
        m = stc.GenMetric(comps.g)
        assert stc.eigenbundles(m, stc.assemble(m, comps)).L1.rank == comps.n


@given(seeds, st.integers(2, 4))
def test_assembly_and_eigenbundles_random(seed, n):
    rng = random.Random(seed)
    comps = sp.rand_components(rng, n) if n != 2 else sp.rand_components_even(rng, 2)
    m = stc.GenMetric(comps.g)
    acs = stc.assemble(m, comps)
    assert not acs.invariant_violations()
    assert co.is_skew(acs.F, n)
    G = stc.gend(m)
    assert ef.equal(G @ acs.F, acs.F @ G)
    assert stc.extract(m, acs).same_as(comps)
    eb = stc.eigenbundles(m, acs)
    assert eb.agree and eb.L1.rank == n


@given(seeds, st.integers(2, 4))
def test_admissibility(seed, n):
    rng = random.Random(seed)
    comps = sp.rand_components(rng, n) if n != 2 else sp.rand_components_even(rng, 2)
    m = stc.GenMetric(comps.g)
    acs = stc.assemble(m, comps)
    F1, F2 = stc.standard_pair(m, acs)
    assert stc.admissibility_check(m, F1, F2).passed
    bad = stc.admissibility_check(m, F1, F1)
    assert not bad.check("anchor restricted to {F1 u = -F2 u} is an isomorphism").passed


def test_from_matrix_recovers_u0():
    _, comps = cl.entry("DIM4-ADAPTED").generate({})
    m = stc.GenMetric(comps.g)
    acs = stc.assemble(m, comps)
    rec = stc.BnACS.from_matrix(acs.F, 4)
    assert ef.equal(rec.u0, stc.normalize_sign(acs.u0))
