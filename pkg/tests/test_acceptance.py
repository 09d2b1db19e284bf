"""The ten acceptance criteria.

Each criterion is a function returning (passed, detail).  Under pytest every
criterion is a test and a PASS/FAIL line is printed in the terminal summary;
run this file directly to print the lines without pytest.

Two criteria are stated with a pattern that the exact computations refute.
Their literal form is kept as a strict xfail (it must keep failing), and a
corrected form is asserted alongside it.
"""

import functools
import itertools
import random
import sys
import time
from fractions import Fraction as Q

import numpy as np
import pytest

from bnck import classify as cl
from bnck import courant as co
from bnck import exactfield as ef
from bnck import integrability as it
from bnck import liealg as la
from bnck import sampling as sp
from bnck import structures as stc

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = {}

SEED = 20261015
TITLES = {
    1: "axiom suite on catalog and random twisted algebroids",
    2: "assembly fidelity of F from components",
    3: "eigenbundle closed forms equal direct eigenspaces",
    4: "direct and component integrability routes agree",
    5: "dim-3 unimodular classification over the lambda grid",
    6: "dim-4 adapted classes: membership and extension",
    7: "rescalings preserve passing verdicts",
    8: "side theorems on passing instances",
    9: "Levi-Civita tables equal the Koszul solver",
    10: "twist isomorphism intertwines and standardizes",
}


def record(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {k:2d}: {TITLES[k]} | {detail}"
    ACCEPTANCE_LINES[k] = line
    return line


# ------------------------------------------------------------------ corpora

@functools.lru_cache(maxsize=None)
def catalog_instances(per_entry=5):
    """(name, algebroid, components) at the defaults and `per_entry` samples per entry."""
    rng = random.Random(SEED)
    out = []
    for e in cl.catalog():
        for p in [{}] + e.sample(rng, per_entry):
            try:
                out.append((e.name, *e.generate(p)))
            except cl.InadmissibleParameters:
                pass
    return tuple(out)


@functools.lru_cache(maxsize=None)
def component_corpus():
    """100 random valid components per parity over dims 2-4."""
    rng = random.Random(SEED + 2)
    odd = [sp.rand_components_odd(rng, 3) for _ in range(100)]
    even = [sp.rand_components_even(rng, rng.choice((2, 4)), classical=rng.random() < 0.15)
            for _ in range(100)]
    return tuple(odd + even)


@functools.lru_cache(maxsize=None)
def dim3_grid():
    """({(lams, eps): solutions} over {-2..2}^3 and all sign patterns, seconds spent)."""
    t0 = time.time()
    out = {}
    for lams in itertools.product(range(-2, 3), repeat=3):
        for eps in itertools.product((1, -1), repeat=3):
            out[(lams, eps)] = cl.search_dim3_unimodular(lams, eps)
    return out, time.time() - t0


DIM4_SETTINGS = (((1, 1), Q(4, 5)), ((-1, -1), Q(5, 4)))


@functools.lru_cache(maxsize=None)
def dim4_results():
    out = []
    for eps, c in DIM4_SETTINGS:
        results, _ = cl.solve_classes_dim4(eps, c, per_class=10, seed=SEED)
        out.append((eps, c, results))
    return tuple(out)


# ----------------------------------------------------------------- criteria

def criterion_1():
    t0 = time.time()
    rng = random.Random(SEED + 1)
    algebroids = [A for _, A, _ in catalog_instances(0)]
    for k in range(20):
        algebroids.append(sp.rand_algebroid(rng, 2 + k % 3))
    bad = [i for i, A in enumerate(algebroids) if not co.check_axioms(A).passed]
    dt = time.time() - t0
    ok = not bad and dt < 10
    return ok, f"{len(algebroids)} algebroids, {len(bad)} failing, {dt:.1f}s (limit 10s)"


def criterion_2():
    problems = []
    for k, comps in enumerate(component_corpus()):
        m = stc.GenMetric(comps.g)
        acs = stc.assemble(m, comps)
        G = stc.gend(m)
        if (acs.invariant_violations() or not co.is_skew(acs.F, comps.n)
                or not ef.equal(G @ acs.F, acs.F @ G) or not stc.extract(m, acs).same_as(comps)):
            problems.append(k)
    n = len(component_corpus())
    return not problems, f"{n} components, {len(problems)} failing"


def criterion_3():
    problems = []
    for k, comps in enumerate(component_corpus()):
        m = stc.GenMetric(comps.g)
        eb = stc.eigenbundles(m, stc.assemble(m, comps))
        if not eb.agree or eb.L1.rank != comps.n:
            problems.append(k)
    return not problems, f"{len(component_corpus())} components, {len(problems)} mismatches"


def criterion_4():
    rng = random.Random(SEED + 4)
    corpus = list(catalog_instances())
    for parity in ("odd", "even"):
        for _ in range(50):
            n = 3 if parity == "odd" else rng.choice((2, 4))
            comps = sp.rand_components_odd(rng, 3) if parity == "odd" else sp.rand_components_even(rng, n)
            corpus.append(("random", sp.rand_algebroid(rng, n), comps))
    total = reduced = passing = 0
    disagreements = []
    for name, A, comps in corpus:
        for desc, B in [("original", A)] + list(sp.corruptions(A)):
            r = it.check_structure(B, comps, "both")
            total += 1
            passing += r.passed
            direct = all(c.passed for c in r.checks if c.label.startswith("direct: "))
            if not r.check("direct and component verdicts agree").passed:
                disagreements.append((name, desc, "components"))
            red = it.check_reduced(B, comps)
            if red is not None:
                reduced += 1
                if red.passed != direct:
                    disagreements.append((name, desc, "reduced"))
    detail = (f"{total} instances ({passing} passing), {reduced} with a reduced test, "
              f"{len(disagreements)} disagreements")
    return not disagreements, detail


def literal_pattern(lams, eps):
    if all(x == 0 for x in lams):
        return True
    zeros = [i for i, x in enumerate(lams) if x == 0]
    if len(zeros) != 1:
        return False
    k = zeros[0]
    a, b = (lams[i] for i in range(3) if i != k)
    return a == b != 0 and eps[k] == 1


def corrected_pattern(lams, eps):
    """A g-skew complex structure on a plane needs the plane definite, so det g > 0."""
    return literal_pattern(lams, eps) and eps[0] * eps[1] * eps[2] > 0


def criterion_5(pattern, pm_on_abelian=True):
    """pm_on_abelian: also demand X+ = +-X- on the abelian algebra, whose
    structures in fact allow any pair of unit spacelike X+ and X-."""
    grid, dt = dim3_grid()
    wrong_presence, bad_solutions = [], 0
    for (lams, eps), sols in grid.items():
        if bool(sols) != pattern(lams, eps):
            wrong_presence.append((lams, eps))
        for s in sols:
            A, c = s.algebroid, s.components
            same = ef.equal(c.X_plus, c.X_minus) or ef.equal(c.X_plus, -c.X_minus)
            same = same or (not pm_on_abelian and all(x == 0 for x in lams))
            if not (ef.all_zero(A.H) and ef.all_zero(A.F) and same and s.report.passed
                    and it.check_structure(A, c, "both").passed and it.check_odd_3d(A, c).passed):
                bad_solutions += 1
    solved = sum(1 for s in grid.values() if s)
    ok = not wrong_presence and not bad_solutions and dt < 60
    detail = (f"{len(grid)} points, {solved} with solutions, {len(wrong_presence)} off-pattern, "
              f"{bad_solutions} bad solutions, {dt:.1f}s (limit 60s)")
    if wrong_presence:
        detail += f", e.g. {wrong_presence[0]}"
    return ok, detail


def criterion_6(expectation):
    counts, problems = {}, []
    for eps, c, results in dim4_results():
        for r in results:
            k = r.klass
            if k is None or not r.agree:
                problems.append((eps, c, "membership", r.point.to_dict()))
                continue
            counts[(eps, k)] = counts.get((eps, k), 0) + 1
            if r.extendable != expectation(k, r.point):
                problems.append((eps, c, f"class {k} extension", r.point.to_dict()))
            for A, comps in r.completions:
                if not (r.family_shape and ef.all_zero(A.H) and ef.all_zero(A.F)
                        and it.check_even(A, comps).passed):
                    problems.append((eps, c, f"class {k} completion", r.point.to_dict()))
    few = [key for key in itertools.product([e for e, _ in DIM4_SETTINGS], range(1, 9))
           if counts.get(key, 0) < 10]
    detail = (f"{sum(counts.values())} points over {len(DIM4_SETTINGS)} sign/c+ settings, "
              f"min per class {min(counts.values()) if counts else 0}, {len(problems)} mismatches")
    if problems:
        detail += f", first: {problems[0][2]} at lambda={problems[0][3]['lambda']}"
    return not problems and not few, detail


def passing_odd_instances():
    out = [(A, c) for name, A, c in catalog_instances() if c.parity == "odd"]
    for (lams, eps), sols in dim3_grid()[0].items():
        if sols and lams[0] == lams[2] and lams[1] == 0:
            out.extend((s.algebroid, s.components) for s in sols[:1])
    return out


def passing_even_instances():
    out = []
    for c in (Q(4, 5), Q(3, 5), Q(12, 13)):
        r = 1 - c * c
        s = cl.rational_sqrt(r)
        for eps1, eps2 in ((1, 1), (1, -1)):
            p = {"lam": 1, "beta": Q(1, 2), "eps1": eps1, "eps2": eps2, "a": s, "b": 0, "a_t": 0,
                 "b_t": s, "c_plus": c}
            out.append(cl.entry("DIM4-ADAPTED").generate(p))
        y = s  # then (1 - y^2)^(1/2) = |c|
        for eps_plus in (1, -1):
            out.append(cl.entry("DIM2-ABELIAN").generate({"y": y, "eps_plus": eps_plus}))
    return out


def criterion_7():
    failures, count = [], 0
    for A, comps in passing_odd_instances():
        assert it.check_structure(A, comps).passed
        for lam in (1, -1, 2, -2, Q(3, 2)):
            B, c2 = it.rescale(A, comps, lam=lam)
            count += 1
            if not it.check_structure(B, c2).passed:
                failures.append(("odd", lam))
    cs = set()
    for A, comps in passing_even_instances():
        assert it.check_structure(A, comps).passed
        cs.add(abs(comps.c_plus))
        B, c2 = it.rescale(A, comps, to_unit=True)
        count += 1
        if not (c2.c_plus == 0 and it.check_structure(B, c2).passed):
            failures.append(("even", comps.c_plus))
    ok = not failures and cs == {Q(4, 5), Q(3, 5), Q(12, 13)}
    return ok, f"{count} rescaled instances, {len(failures)} not passing"


def criterion_8():
    instances = [(A, c) for _, A, c in catalog_instances()]
    instances += passing_odd_instances() + passing_even_instances()
    for eps, c, results in dim4_results()[:1]:
        for r in results:
            instances.extend(r.completions[:1])
    failures, checked = [], 0
    for A, comps in instances:
        if not it.check_structure(A, comps).passed:
            continue
        checked += 1
        m = stc.GenMetric(comps.g)
        acs = stc.assemble(m, comps)
        ok = ef.all_zero(co.dorfman_lie_derivative(A, acs.u0, acs.F))
        ok &= ef.all_zero(co.dorfman_lie_derivative(A, acs.u0, stc.gend(m)))
        if comps.parity == "odd":
            ok &= it.side_conditions_odd(A, comps).passed
        elif not comps.is_classical():
            comm = ef.all_zero(A.L.bracket(comps.X_plus, comps.X_minus))
            exch = ef.all_zero(it.exchange_residual(A, comps))
            ok &= comm == exch and it.side_conditions_even(A, comps).passed
        if not ok:
            failures.append(comps.parity)
    return not failures and checked > 0, f"{checked} passing instances, {len(failures)} failing"


def criterion_9():
    rng = random.Random(SEED + 9)
    mismatches, counts = 0, [0, 0, 0]
    # unimodular table; the first point is the worked example
    uni = [((1, 2, 3), (1, 1, 1))] + [
        (tuple(rng.choice(sp.SMALL) for _ in range(3)), tuple(rng.choice((1, -1)) for _ in range(3)))
        for _ in range(7)]
    for lams, eps in uni:
        closed = cl.levi_civita_unimodular_3d(lams, eps)
        koszul = la.levi_civita(la.unimodular_3d(lams, eps), la.PseudoMetric.diagonal(eps))
        mismatches += not ef.equal(closed.gamma, koszul.gamma)
        counts[0] += 1
    e = [la.basis_vector(3, i) for i in range(3)]
    ex = la.levi_civita(la.unimodular_3d((1, 2, 3), (1, 1, 1)), la.PseudoMetric.diagonal((1, 1, 1)))
    mismatches += not (ef.equal(ex.derivative(e[0], e[1]), 2 * e[2]) and ef.equal(ex.derivative(e[1], e[0]), -e[2]))
    non = [((0, 0, 0, 1), (1, 1, 1))] + [
        (tuple(rng.choice(sp.SMALL) for _ in range(4)), tuple(rng.choice((1, -1)) for _ in range(3)))
        for _ in range(7)]
    for (a, b, c, d), eps in non:
        closed = cl.levi_civita_nonunimodular_3d(a, b, c, d, eps)
        koszul = la.levi_civita(cl.nonunimodular_3d(a, b, c, d), la.PseudoMetric.diagonal(eps))
        mismatches += not ef.equal(closed.gamma, koszul.gamma)
        counts[1] += 1
    ex = cl.levi_civita_nonunimodular_3d(0, 0, 0, 1, (1, 1, 1))
    mismatches += not (ef.equal(ex.derivative(e[2], e[2]), e[0]) and ef.equal(ex.derivative(e[2], e[0]), -e[2]))
    for _ in range(8):
        p, _, _ = cl.random_adapted_point(rng)
        closed = cl.levi_civita_adapted_4d(p.lams, p.A, p.eps, p.eps1)
        mismatches += not ef.equal(closed.gamma, la.levi_civita(p.algebra(), p.metric()).gamma)
        counts[2] += 1
    ok = mismatches == 0 and min(counts) >= 5
    return ok, f"points per table {counts}, {mismatches} mismatches"


def criterion_10():
    rng = random.Random(SEED + 10)
    failures = 0
    for k in range(20):
        n = 2 + k % 3
        A = sp.rand_algebroid(rng, n)
        b = sp.rand_antisymmetric(rng, n)
        a = ef.vector([sp.rand_rational(rng) for _ in range(n)])
        eta = ef.matrix(np.diag([ef.as_scalar(rng.choice((1, -1))) for _ in range(n)]))
        P = sp.rand_invertible(rng, n)
        g = P.T @ eta @ P
        I, B = co.twist_isomorphism(A, b, a)
        E = stc.minus_bundle_general(g, b, a)
        image = ef.span([I @ v for v in E.vectors()], 2 * n + 1)
        ok = co.is_orthogonal(I, n) and co.intertwines(I, A, B) is None
        ok = ok and image == stc.GenMetric(g).e_minus()
        failures += not ok
    return failures == 0, f"20 random (b, A), {failures} failing"


# -------------------------------------------------------------------- tests

def _run(k, fn, *args, label=None):
    ok, detail = fn(*args)
    record(k, ok, detail if label is None else f"{label}: {detail}")
    return ok, detail


def _append(k, text):
    if k in ACCEPTANCE_LINES:
        ACCEPTANCE_LINES[k] += f"; {text}"


@pytest.mark.parametrize("k", [1, 2, 3, 4, 7, 8, 9, 10])
def test_criterion(k):
    ok, detail = _run(k, globals()[f"criterion_{k}"])
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="the literal pattern admits sign patterns with det g < 0, "
                                       "where no g-skew complex structure exists, and forces "
                                       "X+ = +-X- on the abelian algebra")
def test_criterion_5_literal():
    ok, detail = _run(5, criterion_5, literal_pattern, label="literal pattern")
    assert ok, detail


def test_criterion_5_corrected():
    ok, detail = criterion_5(corrected_pattern, pm_on_abelian=False)
    _append(5, f"corrected pattern (det g > 0, X+ free when abelian) {'PASS' if ok else 'FAIL'}")
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="class 8 carries H, F proportional to lambda1, "
                                       "so it extends only at lambda1 = 0")
def test_criterion_6_literal():
    ok, detail = _run(6, criterion_6, cl.expected_extendable, label="literal verdicts")
    assert ok, detail


def test_criterion_6_refined():
    ok, detail = criterion_6(cl.refined_extendable)
    _append(6, f"refined verdicts (class 8 only at lambda1 = 0) {'PASS' if ok else 'FAIL'}")
    assert ok, detail


def main():
    for k in range(1, 11):
        if k == 5:
            ok, detail = criterion_5(literal_pattern)
            ok2, _ = criterion_5(corrected_pattern, pm_on_abelian=False)
            record(5, ok, f"literal pattern: {detail}; corrected pattern (det g > 0, X+ free when abelian) {'PASS' if ok2 else 'FAIL'}")
        elif k == 6:
            ok, detail = criterion_6(cl.expected_extendable)
            ok2, _ = criterion_6(cl.refined_extendable)
            record(6, ok, f"literal verdicts: {detail}; refined verdicts (class 8 only at lambda1 = 0) {'PASS' if ok2 else 'FAIL'}")
        else:
            _run(k, globals()[f"criterion_{k}"])
        print(ACCEPTANCE_LINES[k], flush=True)


if __name__ == "__main__":
    sys.exit(main())
