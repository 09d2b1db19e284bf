"""Generalized metrics and Bn-generalized almost complex structures.

A generalized metric in standard form is fixed by g: E- = {X - gX} and
E+ = {X + gX + mu}.  A pseudo-Hermitian structure is encoded either by
its endomorphism (a BnACS) or by its component tensors (g, J+, J-, X+, X-
and, in even dimension, c+).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import courant as co
from . import exactfield as ef
from . import liealg as la
from .report import ReportBuilder

HALF = Fraction(1, 2)


class InvalidComponents(ValueError):
    """Raised with a field-precise message when component invariants fail."""


# ------------------------------------------------------------------ metric

class GenMetric:
    """Generalized metric in standard form (b = 0, A = 0)."""

    def __init__(self, g):
        self.metric = g if isinstance(g, la.PseudoMetric) else la.PseudoMetric(g)
        self.n = self.metric.n

    @property
    def g(self):
        return self.metric.g

    def s_minus(self, x):
        """X -> X - g(X)."""
        return co.element(x, -self.metric.flat(x), ef.as_scalar(0))

    def s_plus(self, x, mu=0):
        """(X, mu) -> X + g(X) + mu."""
        return co.element(x, self.metric.flat(x), ef.as_scalar(mu))

    def e_minus(self) -> ef.ComplexSubspace:
        n = self.n
        return ef.span([self.s_minus(la.basis_vector(n, j)) for j in range(n)], 2 * n + 1)

    def e_plus(self) -> ef.ComplexSubspace:
        n = self.n
        vecs = [self.s_plus(la.basis_vector(n, j)) for j in range(n)]
        vecs.append(co.unit_vector(n, 2 * n))
        return ef.span(vecs, 2 * n + 1)


def gend(m: GenMetric):
    """The involution equal to +1 on E+ and -1 on E-."""
    n = m.n
    G = ef.zeros(2 * n + 1, 2 * n + 1)
    G[:n, n : 2 * n] = m.metric.inv
    G[n : 2 * n, :n] = m.g
    G[2 * n, 2 * n] = ef.as_scalar(1)
    return G


def induced_metric(m: GenMetric):
    """g(X, Y) = -<X - gX, Y - gY>, recovered from the bundle."""
    n = m.n
    out = ef.zeros(n, n)
    for i in range(n):
        for j in range(n):
            out[i, j] = -co.scalar_product(m.s_minus(la.basis_vector(n, i)),
                                           m.s_minus(la.basis_vector(n, j)))
    return out


def minus_bundle_general(g, b, a_form) -> ef.ComplexSubspace:
    """E- = {X - i_X(g - b) - A(X)A + A(X)} of a metric with data (g, b, A)."""
    g = np.asarray(g, dtype=object)
    b = np.asarray(b, dtype=object)
    a_form = np.asarray(a_form, dtype=object)
    n = g.shape[0]
    vecs = []
    for j in range(n):
        x = la.basis_vector(n, j)
        ax = a_form @ x
        cov = -(g @ x) + la.interior(x, b) - ax * a_form
        vecs.append(co.element(x, cov, ax))
    return ef.span(vecs, 2 * n + 1)


# -------------------------------------------------------------- components

def _vec(x):
    return np.asarray(x, dtype=object)


@dataclass(frozen=True, eq=False)
class ComponentsOdd:
    g: la.PseudoMetric
    J_plus: np.ndarray
    J_minus: np.ndarray
    X_plus: np.ndarray
    X_minus: np.ndarray

    parity = "odd"

    @property
    def n(self) -> int:
        return self.g.n

    def violations(self) -> list:
        g = self.g
        n = g.n
        out = []
        if n % 2 != 1:
            out.append("parity: odd components need odd dimension")
        I = ef.identity(n)
        for name, J, X in (("J_plus", self.J_plus, self.X_plus), ("J_minus", self.J_minus, self.X_minus)):
            sign = name[2:]
            xname = "X_" + sign
            if not g.is_skew(J):
                out.append(f"{name}: not g-skew")
            if not ef.all_zero(J @ X):
                out.append(f"{name}: does not annihilate {xname}")
            if not ef.is_zero(g.inner(X, X) - 1):
                out.append(f"{xname}: g({xname}, {xname}) != 1")
            proj = np.outer(_vec(X), g.flat(X))
            if not ef.equal(J @ J, -I + proj):
                out.append(f"{name}: not a complex structure on the orthogonal complement of {xname}")
        return out

    def same_as(self, other) -> bool:
        return (
            isinstance(other, ComponentsOdd)
            and ef.equal(self.g.g, other.g.g)
            and ef.equal(self.J_plus, other.J_plus)
            and ef.equal(self.J_minus, other.J_minus)
            and ef.equal(self.X_plus, other.X_plus)
            and ef.equal(self.X_minus, other.X_minus)
        )


@dataclass(frozen=True, eq=False)
class ComponentsEven:
    g: la.PseudoMetric
    J_plus: np.ndarray
    J_minus: np.ndarray
    X_plus: np.ndarray
    X_minus: np.ndarray
    c_plus: object

    parity = "even"

    @property
    def n(self) -> int:
        return self.g.n

    def violations(self) -> list:
        g = self.g
        n = g.n
        out = []
        if n % 2 != 0:
            out.append("parity: even components need even dimension")
        I = ef.identity(n)
        c = self.c_plus
        xp, xm = _vec(self.X_plus), _vec(self.X_minus)
        if not g.is_skew(self.J_minus):
            out.append("J_minus: not g-skew")
        if not ef.equal(self.J_minus @ self.J_minus, -I):
            out.append("J_minus: J_minus^2 != -Id")
        if not g.is_skew(self.J_plus):
            out.append("J_plus: not g-skew")
        if not ef.all_zero(self.J_plus @ xp + c * xm):
            out.append("J_plus: J_plus X_plus != -c_plus X_minus")
        if not ef.all_zero(self.J_plus @ xm - c * xp):
            out.append("J_plus: J_plus X_minus != c_plus X_plus")
        proj = np.outer(xp, g.flat(xp)) + np.outer(xm, g.flat(xm))
        if not ef.equal(self.J_plus @ self.J_plus, -I + proj):
            out.append("J_plus: J_plus^2 != -Id + g(., X_plus)X_plus + g(., X_minus)X_minus")
        if not ef.is_zero(g.inner(xp, xp) - (1 - c * c)):
            out.append("X_plus: g(X_plus, X_plus) != 1 - c_plus^2")
        if not ef.is_zero(g.inner(xm, xm) - (1 - c * c)):
            out.append("X_minus: g(X_minus, X_minus) != 1 - c_plus^2")
        if not ef.is_zero(g.inner(xp, xm)):
            out.append("X_minus: g(X_plus, X_minus) != 0")
        return out

    def same_as(self, other) -> bool:
        return (
            isinstance(other, ComponentsEven)
            and ef.equal(self.g.g, other.g.g)
            and ef.equal(self.J_plus, other.J_plus)
            and ef.equal(self.J_minus, other.J_minus)
            and ef.equal(self.X_plus, other.X_plus)
            and ef.equal(self.X_minus, other.X_minus)
            and ef.is_zero(self.c_plus - other.c_plus)
        )

    def is_classical(self) -> bool:
        return ef.all_zero(self.X_plus) and ef.all_zero(self.X_minus)


def validate(comps):
    problems = comps.violations()
    if problems:
        raise InvalidComponents("; ".join(problems))
    return comps


# ------------------------------------------------------------------- BnACS

@dataclass(frozen=True, eq=False)
class BnACS:
    """Endomorphism F of the bundle together with its unit kernel section."""

    F: np.ndarray
    u0: np.ndarray
    n: int

    @property
    def parity(self) -> str:
        return "odd" if self.n % 2 else "even"

    @classmethod
    def from_matrix(cls, F, n: int) -> "BnACS":
        """Recover u0 from ker F: <u0, u0> = (-1)^n, first nonzero coordinate positive."""
        F = np.asarray(F, dtype=object)
        k = ef.kernel(F)
        if k.rank != 1:
            raise ValueError(f"kernel of F has rank {k.rank}, expected 1")
        v = k.basis[0]
        norm = co.scalar_product(v, v)
        target = (-1) ** n
        ratio = norm * target
        if ef.is_zero(ratio) or ratio < 0:
            raise ValueError("kernel section has the wrong causal type")
        u0 = v * (ef.as_scalar(1) / ef.sqrt(ratio))
        return cls(F, normalize_sign(u0), n)

    def invariant_violations(self) -> list:
        n = self.n
        out = []
        if not co.is_skew(self.F, n):
            out.append("F is not skew for the scalar product")
        P = co.pairing_matrix(n)
        sq = -ef.identity(2 * n + 1) + (-1) ** n * np.outer(self.u0, P @ self.u0)
        if not ef.equal(self.F @ self.F, sq):
            out.append("F^2 != -Id + (-1)^n <., u0> u0")
        if not ef.is_zero(co.scalar_product(self.u0, self.u0) - (-1) ** n):
            out.append("<u0, u0> != (-1)^n")
        if ef.kernel(self.F).rank != 1:
            out.append("ker F does not have rank 1")
        if not ef.all_zero(self.F @ self.u0):
            out.append("u0 is not in ker F")
        return out


def normalize_sign(u):
    """Flip u so that its first nonzero coordinate is positive."""
    u = np.asarray(u, dtype=object)
    for x in u:
        if not ef.is_zero(x):
            re = x.real if hasattr(x, "real") else x
            return u if re > 0 else -u
    return u


def assemble(m: GenMetric, comps) -> BnACS:
    """Block matrix of F from the component tensors."""
    validate(comps)
    n = m.n
    if comps.n != n:
        raise InvalidComponents("g: dimension differs from the generalized metric")
    if not ef.equal(comps.g.g, m.g):
        raise InvalidComponents("g: component metric differs from the generalized metric")
    g = m.g
    ginv = m.metric.inv
    Jp, Jm = comps.J_plus, comps.J_minus
    xb = _vec(comps.X_plus if comps.parity == "odd" else comps.X_minus)
    h = ef.as_scalar(HALF)
    F = ef.zeros(2 * n + 1, 2 * n + 1)
    F[:n, :n] = h * (Jp + Jm)
    F[:n, n : 2 * n] = h * (Jp - Jm) @ ginv
    F[:n, 2 * n] = xb
    F[n : 2 * n, :n] = h * g @ (Jp - Jm)
    F[n : 2 * n, n : 2 * n] = -h * (Jp + Jm).T
    F[n : 2 * n, 2 * n] = g @ xb
    F[2 * n, :n] = -h * (g @ xb)
    F[2 * n, n : 2 * n] = -h * xb
    if comps.parity == "odd":
        u0 = m.s_minus(comps.X_minus)
    else:
        u0 = m.s_plus(comps.X_plus, comps.c_plus)
    acs = BnACS(F, u0, n)
    problems = acs.invariant_violations()
    G = gend(m)
    if not ef.equal(G @ F, F @ G):
        problems.append("F does not commute with the generalized metric")
    if problems:
        raise AssertionError("assembled structure breaks its invariants: " + "; ".join(problems))
    return acs


def extract(m: GenMetric, acs: BnACS):
    """Inverse of assemble: read J-, J+, X and c+ off the restrictions of F."""
    G = gend(m)
    F = np.asarray(acs.F, dtype=object)
    if not ef.equal(G @ F, F @ G):
        raise ValueError("F does not commute with the generalized metric")
    n = m.n
    Jm = ef.zeros(n, n)
    Jp = ef.zeros(n, n)
    for j in range(n):
        e = la.basis_vector(n, j)
        Jm[:, j] = co.anchor(F @ m.s_minus(e), n)
        Jp[:, j] = co.anchor(F @ m.s_plus(e), n)
    xb = co.anchor(F @ co.unit_vector(n, 2 * n), n)
    u0 = np.asarray(acs.u0, dtype=object)
    if n % 2:
        comps = ComponentsOdd(m.metric, Jp, Jm, xb, co.anchor(u0, n))
    else:
        comps = ComponentsEven(m.metric, Jp, Jm, co.anchor(u0, n), xb, u0[2 * n])
    return validate(comps)


# ------------------------------------------------------------ eigenbundles

@dataclass(frozen=True, eq=False)
class Eigenbundles:
    L1: ef.ComplexSubspace
    L1_plus: ef.ComplexSubspace
    L1_minus: ef.ComplexSubspace
    closed_plus: ef.ComplexSubspace
    closed_minus: ef.ComplexSubspace

    @property
    def agree(self) -> bool:
        return self.L1_plus == self.closed_plus and self.L1_minus == self.closed_minus

    def L2(self) -> ef.ComplexSubspace:
        """i-eigenbundle of G F: L1+ plus the conjugate of L1-."""
        return ef.subspace_sum(self.L1_plus, self.L1_minus.conjugate())


def holomorphic(J) -> ef.ComplexSubspace:
    """T^(1,0): the i-eigenspace of J."""
    return ef.eigenspace(np.asarray(J, dtype=object), ef.imag_unit())


def eigenbundles(m: GenMetric, acs: BnACS, comps=None) -> Eigenbundles:
    n = m.n
    i = ef.imag_unit()
    if comps is None:
        comps = extract(m, acs)
    if comps.parity == "even" and ef.is_zero(comps.c_plus ** 2 - 1) and not comps.is_classical():
        raise ValueError("c_plus^2 = 1 with nonzero X: null X_plus, X_minus are outside scope")
    L1 = ef.eigenspace(acs.F, i)
    L1p = ef.intersect(L1, m.e_plus())
    L1m = ef.intersect(L1, m.e_minus())

    tp = holomorphic(comps.J_plus)
    tm = holomorphic(comps.J_minus)
    plus = [m.s_plus(v) for v in tp.vectors()]
    minus = [m.s_minus(v) for v in tm.vectors()]
    if comps.parity == "odd":
        plus.append(m.s_plus(comps.X_plus, i))
    elif not comps.is_classical():
        c = comps.c_plus
        v = (_vec(comps.X_minus) - (i * c) * _vec(comps.X_plus)) * (1 / (1 - c * c))
        plus.append(m.s_plus(v, i))
    dim = 2 * n + 1
    return Eigenbundles(L1, L1p, L1m, ef.span(plus, dim), ef.span(minus, dim))


# ---------------------------------------------------------- admissibility

def admissibility_check(m: GenMetric, F1: BnACS, F2: BnACS):
    n = m.n
    rb = ReportBuilder("admissibility")
    P = co.pairing_matrix(n)
    S = ef.kernel(np.asarray(F1.F, dtype=object) + np.asarray(F2.F, dtype=object))
    if n % 2 == 0:
        S = ef.intersect(S, ef.kernel(ef.matrix([P @ F1.u0])))
    image = ef.span([co.anchor(v, n) for v in S.vectors()], n) if S.rank else ef.zero_space(n)
    ok = S.rank == n and image.rank == n
    rb.add("anchor restricted to {F1 u = -F2 u} is an isomorphism", ok,
           {"subspace_rank": S.rank, "image_rank": image.rank})

    G = gend(m)
    u0 = np.asarray(F1.u0, dtype=object)
    rb.add("G(u0) = (-1)^n u0", ef.equal(G @ u0, (-1) ** n * u0))
    F = np.asarray(F1.F, dtype=object)
    Gb = G.T @ P  # bilinear form (u, v) -> <G u, v>
    lhs = F.T @ Gb @ F
    rhs = Gb - np.outer(P @ u0, P @ u0)
    rb.add("G(Fu, Fv) = G(u, v) - <u, u0><v, u0>", ef.equal(lhs, rhs))
    rb.add("G(Fu, v) = -G(u, Fv)", ef.equal(F.T @ Gb, -(Gb @ F)))
    return rb.build()


def standard_pair(m: GenMetric, acs: BnACS):
    """(F, G F) as a pair of BnACS sharing the kernel section."""
    G = gend(m)
    return acs, BnACS(G @ acs.F, acs.u0, acs.n)
