"""The type-Bn Courant algebroid g + g* + R over a Lie algebra.

Elements are coordinate vectors of length 2n+1 in block order
(vector part, covector part, scalar part).  Brackets are evaluated on
constant-coefficient (left-invariant) sections only.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from . import exactfield as ef
from . import liealg as la
from .report import ReportBuilder

HALF = Fraction(1, 2)


def element(x, xi, lam):
    x = np.asarray(x, dtype=object)
    xi = np.asarray(xi, dtype=object)
    return np.concatenate([x, xi, np.array([lam], dtype=object)])


def split(u, n: int):
    u = np.asarray(u, dtype=object)
    if u.shape != (2 * n + 1,):
        raise ValueError(f"expected an element of length {2 * n + 1}, got shape {u.shape}")
    return u[:n], u[n : 2 * n], u[2 * n]


def unit_vector(n: int, a: int):
    """Basis section number a of the rank 2n+1 bundle."""
    return la.basis_vector(2 * n + 1, a)


def pairing_matrix(n: int):
    """Gram matrix of the scalar product (1/2)(eta(X) + xi(Y)) + lam*mu."""
    P = ef.zeros(2 * n + 1, 2 * n + 1)
    h = ef.as_scalar(HALF)
    for i in range(n):
        P[i, n + i] = h
        P[n + i, i] = h
    P[2 * n, 2 * n] = ef.as_scalar(1)
    return P


def scalar_product(u, v):
    u = np.asarray(u, dtype=object)
    v = np.asarray(v, dtype=object)
    if u.shape != v.shape or u.shape[0] % 2 != 1:
        raise ValueError("dimension mismatch")
    n = (u.shape[0] - 1) // 2
    x, xi, lam = split(u, n)
    y, eta, mu = split(v, n)
    return HALF * (eta @ x + xi @ y) + lam * mu


def anchor(u, n: int):
    return split(u, n)[0]


class BnAlgebroid:
    """Lie algebra with twisting forms H (degree 3) and F (degree 2).

    The constructor enforces dF = 0 and dH = -F^F.
    """

    def __init__(self, L: la.LieAlgebra, H=None, F=None, validate: bool = True):
        n = L.n
        self.L = L
        self.n = n
        self.H = la.zero_form(n, 3) if H is None else np.asarray(H, dtype=object)
        self.F = la.zero_form(n, 2) if F is None else np.asarray(F, dtype=object)
        if self.H.shape != (n,) * 3 or self.F.shape != (n,) * 2:
            raise ValueError("form shapes do not match the algebra dimension")
        self._table = None
        # d(e^k) for the dual basis, so d(xi) is a contraction
        self.d_basis = np.array([la.ce_differential(L, la.basis_vector(n, k)) for k in range(n)],
                                dtype=object)
        if validate:
            problems = self.invariant_violations()
            if problems:
                raise ValueError("; ".join(problems))

    def invariant_violations(self) -> list:
        out = []
        if not la.jacobi_check(self.L).passed:
            out.append("structure constants violate the Jacobi identity")
        if not la.is_antisymmetric(self.F):
            out.append("F is not antisymmetric")
        if not la.is_antisymmetric(self.H):
            out.append("H is not antisymmetric")
        if not ef.all_zero(la.ce_differential(self.L, self.F)):
            out.append("twist condition dF = 0 fails")
        lhs = la.ce_differential(self.L, self.H) + la.wedge(self.F, self.F)
        if not ef.all_zero(lhs):
            out.append("twist condition dH = -F^F fails")
        return out

    @property
    def rank(self) -> int:
        return 2 * self.n + 1

    # the bracket of basis sections, computed term by term once
    def table(self):
        if self._table is None:
            r = self.rank
            self._table = [[dorfman_terms(self, unit_vector(self.n, a), unit_vector(self.n, b))
                            for b in range(r)] for a in range(r)]
        return self._table

    def d1(self, xi):
        """Chevalley-Eilenberg differential of a 1-form via the cached basis."""
        out = la.zero_form(self.n, 2)
        for k, x in enumerate(xi):
            if x != 0:
                out = out + x * self.d_basis[k]
        return out

    def bracket(self, u, v):
        """The bracket formula is bilinear, so it also serves complexified sections."""
        return dorfman_terms(self, u, v)

    def with_forms(self, H=None, F=None, validate: bool = True) -> "BnAlgebroid":
        return BnAlgebroid(self.L, self.H if H is None else H, self.F if F is None else F, validate)


def dorfman_terms(A: BnAlgebroid, u, v):
    """[X+xi+lam, Y+eta+mu] evaluated term by term.

    [X,Y] + (L_X eta - i_Y dxi + i_X i_Y H - 2(mu i_X F - lam i_Y F)) + F(X,Y)
    with L_X eta = i_X d eta for constant sections.
    """
    n = A.n
    x, xi, lam = split(u, n)
    y, eta, mu = split(v, n)
    vec = A.L.bracket(x, y)
    d_eta = A.d1(eta)
    d_xi = A.d1(xi)
    cov = (
        la.interior(x, d_eta)
        - la.interior(y, d_xi)
        + la.interior(x, la.interior(y, A.H))
        - 2 * (mu * la.interior(x, A.F) - lam * la.interior(y, A.F))
    )
    scal = la.evaluate(A.F, x, y)
    return element(vec, cov, scal)


def dorfman(A: BnAlgebroid, u, v):
    return dorfman_terms(A, u, v)


def check_axioms(A: BnAlgebroid):
    """C1, C2, C4, C5 on all basis sections (C3 degenerates for constant sections)."""
    rb = ReportBuilder("axioms")
    r = A.rank
    n = A.n
    P = pairing_matrix(n)
    t = A.table()
    e = [unit_vector(n, a) for a in range(r)]

    def left(a, v):  # [e_a, v]
        out = ef.zeros(r)
        for d in range(r):
            if v[d] != 0:
                out = out + v[d] * t[a][d]
        return out

    def right(v, c):  # [v, e_c]
        out = ef.zeros(r)
        for d in range(r):
            if v[d] != 0:
                out = out + v[d] * t[d][c]
        return out

    bad1 = None
    for a, b, c in itertools.product(range(r), repeat=3):
        lhs = left(a, t[b][c])
        rhs = right(t[a][b], c) + left(b, t[a][c])
        if not ef.all_zero(lhs - rhs):
            bad1 = ((a + 1, b + 1, c + 1), lhs - rhs)
            break
    rb.add("C1 Leibniz identity", bad1 is None, bad1)

    bad2 = None
    for a, b in itertools.product(range(r), repeat=2):
        res = anchor(t[a][b], n) - A.L.bracket(anchor(e[a], n), anchor(e[b], n))
        if not ef.all_zero(res):
            bad2 = ((a + 1, b + 1), res)
            break
    rb.add("C2 anchor is a morphism of brackets", bad2 is None, bad2)
    rb.add("C3 (degenerate: invariant sections have constant coefficients)", True, None)

    bad4 = None
    for a, b, c in itertools.product(range(r), repeat=3):
        res = t[a][b] @ P @ e[c] + e[b] @ P @ t[a][c]
        if not ef.is_zero(res):
            bad4 = ((a + 1, b + 1, c + 1), res)
            break
    rb.add("C4 invariance of the scalar product", bad4 is None, bad4)

    bad5 = None
    for a, b in itertools.combinations_with_replacement(range(r), 2):
        sym = t[a][b] + t[b][a]
        res = sym @ P
        if not ef.all_zero(res):
            bad5 = ((a + 1, b + 1), res)
            break
    rb.add("C5 <[u,u], v> = 0 (polarized)", bad5 is None, bad5)
    return rb.build()


def dorfman_lie_derivative(A: BnAlgebroid, u, T):
    """(L_u T)(v) = [u, T v] - T [u, v], as a matrix."""
    T = np.asarray(T, dtype=object)
    r = A.rank
    out = ef.zeros(r, r)
    for b in range(r):
        eb = unit_vector(A.n, b)
        out[:, b] = A.bracket(u, T @ eb) - T @ A.bracket(u, eb)
    return out


def twist_isomorphism(A: BnAlgebroid, b, a_form):
    """The map I and the algebroid with H - db - (2F + dA)^A, F + dA."""
    n = A.n
    b = np.asarray(b, dtype=object)
    a_form = np.asarray(a_form, dtype=object)
    dA = la.ce_differential(A.L, a_form)
    db = la.ce_differential(A.L, b)
    H_new = A.H - db - la.wedge(2 * A.F + dA, a_form)
    F_new = A.F + dA
    r = 2 * n + 1
    I = ef.identity(r)
    for i in range(n):
        ai = a_form[i]
        col = I[:, i].copy()
        col[n : 2 * n] = col[n : 2 * n] - la.interior(la.basis_vector(n, i), b) - ai * a_form
        col[2 * n] = col[2 * n] - ai
        I[:, i] = col
    I[n : 2 * n, 2 * n] = 2 * a_form
    return I, BnAlgebroid(A.L, H_new, F_new)


def is_orthogonal(T, n: int) -> bool:
    P = pairing_matrix(n)
    T = np.asarray(T, dtype=object)
    return ef.equal(T.T @ P @ T, P)


def is_skew(T, n: int) -> bool:
    P = pairing_matrix(n)
    T = np.asarray(T, dtype=object)
    return ef.equal(T.T @ P, -(P @ T))


def intertwines(I, A: BnAlgebroid, B: BnAlgebroid):
    """First basis pair where I[u,v]_A != [Iu, Iv]_B, or None."""
    I = np.asarray(I, dtype=object)
    r = A.rank
    ta = A.table()
    for a, c in itertools.product(range(r), repeat=2):
        lhs = I @ ta[a][c]
        rhs = B.bracket(I[:, a], I[:, c])
        if not ef.equal(lhs, rhs):
            return (a + 1, c + 1), lhs - rhs
    return None
