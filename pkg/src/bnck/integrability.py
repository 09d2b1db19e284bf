"""Integrability of Bn-generalized almost pseudo-Hermitian structures.

Two independent routes are provided: direct closure of the eigenbundles
under the Dorfman bracket, and the conditions on the component tensors
(g, J+, J-, X+, X-[, c+]) expressed through the Levi-Civita connection.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import courant as co
from . import exactfield as ef
from . import liealg as la
from . import structures as st
from .report import ReportBuilder

HALF = Fraction(1, 2)


class NullVectorFields(ValueError):
    """Even components with c+^2 = 1 but nonzero X+, X- (null vector fields)."""


# ---------------------------------------------------------------- direct

def bundle_closed(A: co.BnAlgebroid, S: ef.ComplexSubspace, label: str = "closed under the bracket"):
    rb = ReportBuilder("direct")
    rb.add(label, *_closure(A, S))
    return rb.build()


def _closure(A, S, left=None):
    """(ok, witness) for [u, v] in S over basis pairs (u from `left` if given)."""
    right = S.vectors()
    lefts = right if left is None else left
    for a, u in enumerate(lefts):
        for b, v in enumerate(right):
            w = A.bracket(u, v)
            res = S.residual(w)
            if not ef.all_zero(res):
                return False, {"pair": (a + 1, b + 1), "bracket": w, "residual": res}
    return True, None


def check_direct(A: co.BnAlgebroid, m: st.GenMetric, acs: st.BnACS):
    """Closure of L1, L1+, L1- and preservation of L1- by the bracket with u0."""
    rb = ReportBuilder("direct")
    i = ef.imag_unit()
    F = np.asarray(acs.F, dtype=object)
    G = st.gend(m)
    L1 = ef.eigenspace(F, i)
    L1p = ef.intersect(L1, m.e_plus())
    L1m = ef.intersect(L1, m.e_minus())
    ok = rb.add("(a) L1 closed", *_closure(A, L1))
    ok &= rb.add("(b) L1+ closed", *_closure(A, L1p))
    ok &= rb.add("(c) L1- closed", *_closure(A, L1m))
    ok &= rb.add("(d) [u0, L1-] inside L1-", *_closure(A, L1m, left=[acs.u0]))
    L2 = ef.eigenspace(G @ F, i)
    rb.add("L2 (i-eigenbundle of G F) closed", *_closure(A, L2))
    if ok:
        dF = co.dorfman_lie_derivative(A, acs.u0, F)
        rb.add("Lie derivative of F along u0 vanishes", ef.all_zero(dF), None if ef.all_zero(dF) else dF)
        dG = co.dorfman_lie_derivative(A, acs.u0, G)
        rb.add("Lie derivative of G along u0 vanishes", ef.all_zero(dG), None if ef.all_zero(dG) else dG)
    return rb.build()


# ------------------------------------------------------- tensor helpers

class _Tensors:
    """Musical identifications of H and F through g, plus the Levi-Civita connection."""

    def __init__(self, A: co.BnAlgebroid, comps):
        if A.n != comps.n:
            raise ValueError("algebroid and components have different dimensions")
        self.A = A
        self.comps = comps
        self.g = comps.g
        self.n = A.n
        self.nabla = la.levi_civita(A.L, comps.g)
        self.Fm = self.g.raise_form(A.F)  # X -> F(X)
        self.xp = np.asarray(comps.X_plus, dtype=object)
        self.xm = np.asarray(comps.X_minus, dtype=object)
        self.Jp = np.asarray(comps.J_plus, dtype=object)
        self.Jm = np.asarray(comps.J_minus, dtype=object)

    def e(self, i):
        return la.basis_vector(self.n, i)

    def Hx(self, x):
        """Endomorphism Y -> H(x, Y) = g^{-1} H(x, Y, .)."""
        hx = la.interior(np.asarray(x, dtype=object), self.A.H)
        return self.g.raise_form(hx)

    def H2(self, x, y):
        return self.Hx(x) @ np.asarray(y, dtype=object)

    def F1(self, x):
        return self.Fm @ np.asarray(x, dtype=object)

    def tensor(self, a, b):
        """(a (x) b)(Y) = g(a, Y) b."""
        return np.outer(np.asarray(b, dtype=object), self.g.flat(a))


def _preserves(rb, label, ops, T: ef.ComplexSubspace):
    """Each operator in ops maps T into itself (checked on the echelon basis)."""
    for i, op in enumerate(ops):
        for a, v in enumerate(T.vectors()):
            res = T.residual(op @ v)
            if not ef.all_zero(res):
                return rb.add(label, False, {"direction": i + 1, "basis_vector": a + 1, "residual": res})
    return rb.add(label, True)


def _vector_identity(rb, label, n, lhs, rhs):
    """lhs(e_i) = rhs(e_i) for every basis direction."""
    for i in range(n):
        d = lhs(i) - rhs(i)
        if not ef.all_zero(d):
            return rb.add(label, False, {"direction": i + 1, "residual": d})
    return rb.add(label, True)


def _form_vanishes(rb, label, w, T: ef.ComplexSubspace, k: int, rhs=None):
    """w restricted to Lambda^k T equals rhs (default zero)."""
    vecs = T.vectors()
    for idx in itertools.combinations(range(len(vecs)), k):
        vs = [vecs[a] for a in idx]
        val = la.evaluate(w, *vs)
        if rhs is not None:
            val = val - la.evaluate(rhs, *vs)
        if not ef.is_zero(val):
            return rb.add(label, False, {"basis_tuple": tuple(a + 1 for a in idx), "value": val})
    return rb.add(label, True)


def _zero(rb, label, x):
    x = np.asarray(x, dtype=object)
    return rb.add(label, ef.all_zero(x), None if ef.all_zero(x) else x)


# ------------------------------------------------------------ odd case

def odd_connections(A: co.BnAlgebroid, comps: st.ComponentsOdd):
    """Matrices of nabla^-_{e_i} and nabla^+_{e_i}."""
    t = _Tensors(A, comps)
    minus, plus = [], []
    h = ef.as_scalar(HALF)
    for i in range(t.n):
        e = t.e(i)
        base = t.nabla.along(e)
        minus.append(base + h * t.Hx(e))
        plus.append(base - h * t.Hx(e) - t.tensor(t.Jp @ t.F1(e), t.xp))
    return minus, plus


def check_odd(A: co.BnAlgebroid, comps: st.ComponentsOdd):
    st.validate(comps)
    if comps.n % 2 != 1:
        raise ValueError("check_odd needs odd dimension")
    t = _Tensors(A, comps)
    rb = ReportBuilder("components")
    n = t.n
    i_ = ef.imag_unit()
    minus, plus = odd_connections(A, comps)
    Tp = st.holomorphic(t.Jp)
    Tm = st.holomorphic(t.Jm)
    _preserves(rb, "nabla+ preserves T10(J+)", plus, Tp)
    _preserves(rb, "nabla- preserves T10(J-)", minus, Tm)
    _vector_identity(rb, "nabla-_X X- = 0", n, lambda i: minus[i] @ t.xm, lambda i: ef.zeros(n))
    _vector_identity(rb, "nabla+_X X+ = -J+ F(X)", n,
                     lambda i: plus[i] @ t.xp, lambda i: -(t.Jp @ t.F1(t.e(i))))
    H, F = A.H, A.F
    _form_vanishes(rb, "H vanishes on Lambda3 T10(J+)", H, Tp, 3)
    _form_vanishes(rb, "H vanishes on Lambda3 T10(J-)", H, Tm, 3)
    _form_vanishes(rb, "i_{X+}H = i F on Lambda2 T10(J+)", la.interior(t.xp, H), Tp, 2, i_ * F)
    _form_vanishes(rb, "i_{X-}H vanishes on Lambda2 T10(J-)", la.interior(t.xm, H), Tm, 2)
    _form_vanishes(rb, "F vanishes on Lambda2 T10(J-)", F, Tm, 2)
    _zero(rb, "i_{X-}F = 0", la.interior(t.xm, F))
    return rb.build()


def check_odd_3d(A: co.BnAlgebroid, comps: st.ComponentsOdd):
    """Reduced test in dimension 3: i_{X-}F = 0 and the two covariant derivative formulas."""
    st.validate(comps)
    if comps.n != 3:
        raise ValueError("the reduced odd test is for dimension 3")
    t = _Tensors(A, comps)
    rb = ReportBuilder("components-3d")
    h = ef.as_scalar(HALF)
    _zero(rb, "i_{X-}F = 0", la.interior(t.xm, A.F))
    _vector_identity(rb, "nabla_X X- = -1/2 H(X, X-)", 3,
                     lambda i: t.nabla.derivative(t.e(i), t.xm), lambda i: -h * t.H2(t.e(i), t.xm))
    _vector_identity(rb, "nabla_X X+ = -1/2 H(X+, X) - J+ F(X)", 3,
                     lambda i: t.nabla.derivative(t.e(i), t.xp),
                     lambda i: -h * t.H2(t.xp, t.e(i)) - t.Jp @ t.F1(t.e(i)))
    return rb.build()


# ----------------------------------------------------------- even case

def _require_non_null(comps):
    if ef.is_zero(comps.c_plus ** 2 - 1):
        raise NullVectorFields(
            "c_plus^2 = 1: the component test assumes non-null X+, X- (c_plus != +-1); "
            "use classical_reduction_check when X+ = X- = 0")


def even_connections(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """Matrices of D^-_{e_i} and D^+_{e_i}."""
    t = _Tensors(A, comps)
    c = comps.c_plus
    k = ef.as_scalar(1) / (1 - c * c)
    h = ef.as_scalar(HALF)
    minus, plus = [], []
    for i in range(t.n):
        e = t.e(i)
        base = t.nabla.along(e)
        minus.append(base + h * t.Hx(e))
        fe = t.F1(e)
        plus.append(base - h * t.Hx(e) + (c * k) * t.tensor(fe, t.xp) - k * t.tensor(t.Jp @ fe, t.xm))
    return minus, plus


def check_even(A: co.BnAlgebroid, comps: st.ComponentsEven, commutation: str = "bracket"):
    """Component test for even n.  commutation='exchange' replaces [X+, X-] = 0
    by H(X+, X-) = c+ F(X-) + J+ F(X+)."""
    st.validate(comps)
    if comps.n % 2 != 0:
        raise ValueError("check_even needs even dimension")
    _require_non_null(comps)
    t = _Tensors(A, comps)
    rb = ReportBuilder("components")
    n = t.n
    c = comps.c_plus
    h = ef.as_scalar(HALF)
    i_ = ef.imag_unit()
    minus, plus = even_connections(A, comps)
    Tp = st.holomorphic(t.Jp)
    Tm = st.holomorphic(t.Jm)
    _preserves(rb, "D+ preserves T10(J+)", plus, Tp)
    _preserves(rb, "D- preserves T10(J-)", minus, Tm)
    if commutation == "exchange":
        _zero(rb, "H(X+, X-) = c+ F(X-) + J+ F(X+)", exchange_residual(A, comps))
    else:
        _zero(rb, "[X+, X-] = 0", A.L.bracket(t.xp, t.xm))
    _vector_identity(rb, "nabla_X X+ = -1/2 (i_{X+}H)(X) + c+ F(X)", n,
                     lambda i: t.nabla.derivative(t.e(i), t.xp),
                     lambda i: -h * t.H2(t.xp, t.e(i)) + c * t.F1(t.e(i)))
    _vector_identity(rb, "nabla_X X- = -1/2 (i_{X-}H)(X) - J+ F(X)", n,
                     lambda i: t.nabla.derivative(t.e(i), t.xm),
                     lambda i: -h * t.H2(t.xm, t.e(i)) - t.Jp @ t.F1(t.e(i)))
    H, F = A.H, A.F
    _form_vanishes(rb, "F vanishes on Lambda2 T10(J-)", F, Tm, 2)
    _form_vanishes(rb, "H vanishes on Lambda3 T10(J+)", H, Tp, 3)
    _form_vanishes(rb, "H vanishes on Lambda3 T10(J-)", H, Tm, 3)
    _form_vanishes(rb, "i_{X+ + i c+ X-}H vanishes on Lambda2 T10(J+)",
                   la.interior(t.xp + (i_ * c) * t.xm, H), Tp, 2)
    _form_vanishes(rb, "F = -i i_{X-}H on Lambda2 T10(J+)", F, Tp, 2, -i_ * la.interior(t.xm, H))
    _zero(rb, "i_{X+}F = dc+ = 0", la.interior(t.xp, F))
    return rb.build()


def exchange_residual(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """H(X+, X-) - c+ F(X-) - J+ F(X+)."""
    t = _Tensors(A, comps)
    return t.H2(t.xp, t.xm) - comps.c_plus * t.F1(t.xm) - t.Jp @ t.F1(t.xp)


def check_even_4d(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """Reduced test in dimension 4."""
    st.validate(comps)
    if comps.n != 4:
        raise ValueError("the reduced even test is for dimension 4")
    _require_non_null(comps)
    t = _Tensors(A, comps)
    rb = ReportBuilder("components-4d")
    c = comps.c_plus
    h = ef.as_scalar(HALF)
    _vector_identity(rb, "nabla_X X+ = -1/2 (i_{X+}H)(X) + c+ F(X)", 4,
                     lambda i: t.nabla.derivative(t.e(i), t.xp),
                     lambda i: -h * t.H2(t.xp, t.e(i)) + c * t.F1(t.e(i)))
    _vector_identity(rb, "nabla_X X- = -1/2 (i_{X-}H)(X) - J+ F(X)", 4,
                     lambda i: t.nabla.derivative(t.e(i), t.xm),
                     lambda i: -h * t.H2(t.xm, t.e(i)) - t.Jp @ t.F1(t.e(i)))
    minus, _ = even_connections(A, comps)
    _vector_identity(rb, "D- preserves J-", 4,
                     lambda i: minus[i] @ t.Jm - t.Jm @ minus[i], lambda i: ef.zeros(4, 4))
    F = A.F
    _zero(rb, "F is of type (1,1) for J-", t.Jm.T @ F @ t.Jm - F)
    _zero(rb, "i_{X+}F = dc+ = 0", la.interior(t.xp, F))
    _zero(rb, "H(X+, X-) = c+ F(X-) + J+ F(X+)", exchange_residual(A, comps))
    return rb.build()


def check_even_2d(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """Reduced test in dimension 2 (H vanishes identically)."""
    st.validate(comps)
    if comps.n != 2:
        raise ValueError("the reduced even test is for dimension 2")
    _require_non_null(comps)
    t = _Tensors(A, comps)
    rb = ReportBuilder("components-2d")
    c = comps.c_plus
    found = None
    for e0 in (1, -1):
        if (ef.all_zero(t.Jm @ t.xp + e0 * t.xm) and ef.all_zero(t.Jm @ t.xm - e0 * t.xp)
                and ef.equal(t.Jp, (e0 * c) * t.Jm)):
            found = e0
            break
    rb.add("J- X+ = -e0 X-, J- X- = e0 X+, J+ = e0 c+ J- for a sign e0", found is not None)
    if ef.is_zero(c):
        _zero(rb, "X+ parallel", t.nabla.of(t.xp))
        _zero(rb, "F = 0", A.F)
    else:
        rb.add("X+ Killing", la.is_killing(A.L, t.g, t.xp))
        dx = la.ce_differential(A.L, t.g.flat(t.xp))
        _zero(rb, "F = d(X+ flat) / (2 c+)", A.F - dx * (ef.as_scalar(1) / (2 * c)))
    return rb.build()


# ------------------------------------------------------ classical case

def classical_reduction_check(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """X+ = X- = 0: F = 0, J+- integrable, nabla +- 1/2 H preserves J-+."""
    st.validate(comps)
    if not comps.is_classical():
        raise ValueError("classical reduction needs X+ = X- = 0")
    t = _Tensors(A, comps)
    rb = ReportBuilder("classical")
    n = t.n
    h = ef.as_scalar(HALF)
    _zero(rb, "F = 0", A.F)
    for name, J in (("J+", t.Jp), ("J-", t.Jm)):
        ok, w = la.is_subalgebra(A.L, st.holomorphic(J))
        rb.add(f"{name} integrable", ok, w)
    for sign, name, J in ((1, "nabla + 1/2 H preserves J-", t.Jm), (-1, "nabla - 1/2 H preserves J+", t.Jp)):
        ops = [t.nabla.along(t.e(i)) + (sign * h) * t.Hx(t.e(i)) for i in range(n)]
        _vector_identity(rb, name, n, lambda i, ops=ops, J=J: ops[i] @ J - J @ ops[i],
                         lambda i: ef.zeros(n, n))
    return rb.build()


# ------------------------------------------------------ dispatch helpers

def check_components(A: co.BnAlgebroid, comps):
    """Full component test for either parity (classical even case routed separately)."""
    if comps.parity == "odd":
        return check_odd(A, comps)
    if comps.is_classical():
        return classical_reduction_check(A, comps)
    return check_even(A, comps)


def check_reduced(A: co.BnAlgebroid, comps):
    """Dimension-specialized test, or None when no specialization applies."""
    n = comps.n
    if comps.parity == "odd" and n == 3:
        return check_odd_3d(A, comps)
    if comps.parity == "even" and not comps.is_classical():
        if n == 2 and ef.all_zero(A.H):
            return check_even_2d(A, comps)
        if n == 4:
            return check_even_4d(A, comps)
    return None


def check_structure(A: co.BnAlgebroid, comps, via: str = "both"):
    """Run the requested routes; with 'both', also report whether the verdicts agree."""
    m = st.GenMetric(comps.g)
    rb = ReportBuilder(via)
    verdicts = []
    if via in ("direct", "both"):
        r = check_direct(A, m, st.assemble(m, comps))
        verdicts.append(r.passed)
        rb.extend(r, "direct: ")
    if via in ("components", "both"):
        r = check_components(A, comps)
        verdicts.append(r.passed)
        rb.extend(r, "components: ")
    if via == "both":
        same = verdicts[0] == verdicts[1]
        rb.add("direct and component verdicts agree", same,
               None if same else {"direct": verdicts[0], "components": verdicts[1]})
    return rb.build()


# ------------------------------------------------------- side conditions

def side_conditions_odd(A: co.BnAlgebroid, comps: st.ComponentsOdd):
    """On passing odd instances: X- Killing, [X+, X-] = 0, L_{X-} J+- = 0."""
    t = _Tensors(A, comps)
    rb = ReportBuilder("side")
    rb.add("X- Killing", la.is_killing(A.L, t.g, t.xm))
    _zero(rb, "[X+, X-] = 0", A.L.bracket(t.xp, t.xm))
    _zero(rb, "L_{X-} J+ = 0", la.lie_derivative_endo(A.L, t.xm, t.Jp))
    _zero(rb, "L_{X-} J- = 0", la.lie_derivative_endo(A.L, t.xm, t.Jm))
    return rb.build()


def side_conditions_even(A: co.BnAlgebroid, comps: st.ComponentsEven):
    """On passing even instances: X+ Killing, and the exchange identity."""
    t = _Tensors(A, comps)
    rb = ReportBuilder("side")
    rb.add("X+ Killing", la.is_killing(A.L, t.g, t.xp))
    comm = ef.all_zero(A.L.bracket(t.xp, t.xm))
    exch = ef.all_zero(exchange_residual(A, comps))
    rb.add("[X+, X-] = 0 iff H(X+, X-) = c+ F(X-) + J+ F(X+)", comm == exch,
           {"commute": comm, "exchange": exch})
    return rb.build()


# ------------------------------------------------------------- rescaling

def rescale(A: co.BnAlgebroid, comps, lam=None, to_unit: bool = False):
    """Rescaled (algebroid, components).

    odd: g -> lam^2 g, X+- -> X+- / lam, H -> lam^2 H, F -> lam F.
    even (to_unit): g -> eps g, X+- -> X+- / |1 - c^2|^(1/2), c -> 0,
    J+ killed on span{X+, X-}, H -> eps H, with eps = sign(1 - c^2).
    """
    if comps.parity == "odd":
        if to_unit:
            raise ValueError("to_unit applies to even dimension only")
        if lam is None:
            raise ValueError("odd rescaling needs lambda")
        lam = ef.as_scalar(lam)
        if ef.is_zero(lam):
            raise ValueError("lambda must be nonzero")
        inv = ef.as_scalar(1) / lam
        g = comps.g.scaled(lam * lam)
        new = st.ComponentsOdd(g, comps.J_plus, comps.J_minus,
                               np.asarray(comps.X_plus, dtype=object) * inv,
                               np.asarray(comps.X_minus, dtype=object) * inv)
        B = A.with_forms(H=(lam * lam) * A.H, F=lam * A.F)
        return B, st.validate(new)
    if lam is not None and not to_unit:
        lam = ef.as_scalar(lam)
        if ef.is_zero(lam - 1):
            return A, comps
        raise ValueError("even structures only rescale to unit (c+ -> 0)")
    c = comps.c_plus
    if ef.is_zero(c * c - 1):
        raise NullVectorFields("c_plus^2 = 1 cannot be rescaled")
    if ef.is_zero(c):
        raise ValueError("c_plus = 0: already unit")
    if not ef.all_zero(A.F):
        raise ValueError("unit rescaling needs F = 0")
    r = 1 - c * c
    eps = 1 if r > 0 else -1
    s = ef.as_scalar(1) / ef.sqrt(abs(r))
    g = comps.g.scaled(ef.as_scalar(eps))
    xp = np.asarray(comps.X_plus, dtype=object)
    xm = np.asarray(comps.X_minus, dtype=object)
    # J+ restricted to span{X+, X-} acts as c times a rotation; remove that part
    gm = comps.g
    proj_p = np.outer(xp, gm.flat(xp)) * (ef.as_scalar(1) / r)
    proj_m = np.outer(xm, gm.flat(xm)) * (ef.as_scalar(1) / r)
    Jp = np.asarray(comps.J_plus, dtype=object)
    Jp_new = Jp @ (ef.identity(comps.n) - proj_p - proj_m)
    new = st.ComponentsEven(g, Jp_new, comps.J_minus, xp * s, xm * s, ef.as_scalar(0))
    B = A.with_forms(H=eps * A.H)
    return B, st.validate(new)
