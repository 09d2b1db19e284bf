"""Reproducible random corpora: Lie algebras, twist forms, components, corruptions."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np

from . import courant as co
from . import exactfield as ef
from . import liealg as la
from . import structures as st

SMALL = [Fraction(p, q) for p in range(-3, 4) for q in (1, 2, 3)]
PYTHAGOREAN = [Fraction(3, 5), Fraction(4, 5), Fraction(5, 13), Fraction(12, 13),
               Fraction(8, 17), Fraction(15, 17), Fraction(1, 2), Fraction(2, 3)]


def rand_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        x = rng.choice(SMALL)
        if x or not nonzero:
            return x


def rand_invertible(rng: random.Random, n: int):
    while True:
        p = ef.matrix([[rand_rational(rng) for _ in range(n)] for _ in range(n)])
        if ef.det(p) != 0:
            return p


def rand_antisymmetric(rng: random.Random, n: int):
    k = ef.zeros(n, n)
    for i, j in itertools.combinations(range(n), 2):
        v = rand_rational(rng)
        k[i, j] = v
        k[j, i] = -v
    return k


def cayley_orthogonal(rng: random.Random, eta):
    """Rational eta-orthogonal matrix (I - S)^-1 (I + S), S eta-skew."""
    eta = np.asarray(eta, dtype=object)
    n = eta.shape[0]
    I = ef.identity(n)
    while True:
        S = ef.inverse(eta) @ rand_antisymmetric(rng, n)
        if ef.det(I - S) != 0:
            return ef.inverse(I - S) @ (I + S)


# ------------------------------------------------------------ algebras

def rand_lie_algebra(rng: random.Random, n: int) -> la.LieAlgebra:
    """Random algebra: abelian, semidirect R x_D R^(n-1), or a 3-d unimodular factor,
    written in a random rational basis."""
    kind = rng.choice(["abelian", "semidirect", "semidirect", "unimodular"] if n >= 3
                      else ["abelian", "semidirect"])
    if kind == "abelian":
        L = la.LieAlgebra.abelian(n)
    elif kind == "semidirect":
        D = ef.matrix([[rand_rational(rng) for _ in range(n - 1)] for _ in range(n - 1)])
        br = {(0, j + 1): {k + 1: D[k, j] for k in range(n - 1)} for j in range(n - 1)}
        L = la.LieAlgebra.from_brackets(n, br)
    else:
        lams = [rng.choice([-1, 0, 1, 2]) for _ in range(3)]
        L3 = la.unimodular_3d(lams, [1, 1, 1])
        c = ef.zeros(n, n, n)
        c[:3, :3, :3] = L3.c
        L = la.LieAlgebra(c)
    return L.transform(rand_invertible(rng, n))


def closed_forms(L: la.LieAlgebra, k: int):
    """Basis (as forms) of the closed invariant k-forms."""
    n = L.n
    idx = list(itertools.combinations(range(n), k))
    cols = []
    for t in idx:
        d = la.ce_differential(L, la.form(n, k, {t: 1}))
        cols.append([d[s] for s in itertools.combinations(range(n), k + 1)])
    if not cols[0]:
        return [la.form(n, k, {t: 1}) for t in idx]
    M = ef.matrix(cols).T
    return [la.form(n, k, dict(zip(idx, v))) for v in ef.nullspace(M)]


def solve_exact_form(L: la.LieAlgebra, target, k: int):
    """Some k-form w with dw = target, or None."""
    n = L.n
    idx = list(itertools.combinations(range(n), k))
    rows = list(itertools.combinations(range(n), k + 1))
    if not rows:
        return la.zero_form(n, k) if target.ndim == k + 1 else None
    cols = []
    for t in idx:
        d = la.ce_differential(L, la.form(n, k, {t: 1}))
        cols.append([d[s] for s in rows])
    M = ef.matrix(cols).T
    b = ef.vector([target[s] for s in rows])
    x = ef.solve(M, b)
    if x is None:
        return None
    return la.form(n, k, dict(zip(idx, x)))


def rand_twist(rng: random.Random, L: la.LieAlgebra):
    """Random (H, F) with dF = 0 and dH = -F^F."""
    n = L.n
    for _ in range(20):
        F = la.zero_form(n, 2)
        for w in closed_forms(L, 2):
            F = F + rand_rational(rng) * w
        if n < 3:
            return la.zero_form(n, 3), F
        H0 = solve_exact_form(L, -la.wedge(F, F), 3)
        if H0 is None:
            continue
        H = H0
        for w in closed_forms(L, 3):
            H = H + rand_rational(rng) * w
        return H, F
    return la.zero_form(n, 3), la.zero_form(n, 2)


def rand_algebroid(rng: random.Random, n: int) -> co.BnAlgebroid:
    L = rand_lie_algebra(rng, n)
    H, F = rand_twist(rng, L)
    return co.BnAlgebroid(L, H, F)


# ----------------------------------------------------------- components

def _rot(n, a, b, sign=1):
    J = ef.zeros(n, n)
    J[b, a] = ef.as_scalar(sign)
    J[a, b] = ef.as_scalar(-sign)
    return J


def _in_basis(P, eta, vectors, endos):
    """Metric P^T eta P; frame vectors and endomorphisms pulled back through P."""
    Pinv = ef.inverse(P)
    g = la.PseudoMetric(P.T @ eta @ P)
    return g, [Pinv @ v for v in vectors], [Pinv @ J @ P for J in endos]


def rand_components_odd(rng: random.Random, n: int = 3) -> st.ComponentsOdd:
    """X- unit with definite complement, X+ = O X-, J+- complex on the complements."""
    s = rng.choice([1, -1])
    eta = ef.matrix(np.diag([ef.as_scalar(1)] + [ef.as_scalar(s)] * (n - 1)))
    e1 = la.basis_vector(n, 0)
    J0 = ef.zeros(n, n)
    for a in range(1, n, 2):
        J0 = J0 + _rot(n, a, a + 1, rng.choice([1, -1]))
    Jm = J0
    O = cayley_orthogonal(rng, eta)
    Jp0 = ef.zeros(n, n)
    for a in range(1, n, 2):
        Jp0 = Jp0 + _rot(n, a, a + 1, rng.choice([1, -1]))
    Jp = O @ Jp0 @ ef.inverse(O)
    xp = rng.choice([1, -1]) * (O @ e1)
    xm = rng.choice([1, -1]) * e1
    g, (xp, xm), (Jp, Jm) = _in_basis(rand_invertible(rng, n), eta, [xp, xm], [Jp, Jm])
    return st.validate(st.ComponentsOdd(g, Jp, Jm, xp, xm))


def rand_components_even(rng: random.Random, n: int, classical: bool = False) -> st.ComponentsEven:
    """Random valid even components; c+ from a small rational list (or +-1 classical)."""
    P = rand_invertible(rng, n)
    if classical:
        d = [rng.choice([1, -1]) for _ in range(n // 2)]
        eta = ef.matrix(np.diag([ef.as_scalar(x) for x in d for _ in (0, 1)]))
        J0 = sum((_rot(n, 2 * a, 2 * a + 1, rng.choice([1, -1])) for a in range(n // 2)), ef.zeros(n, n))
        O1, O2 = cayley_orthogonal(rng, eta), cayley_orthogonal(rng, eta)
        J1 = sum((_rot(n, 2 * a, 2 * a + 1, rng.choice([1, -1])) for a in range(n // 2)), ef.zeros(n, n))
        Jm = O1 @ J0 @ ef.inverse(O1)
        Jp = O2 @ J1 @ ef.inverse(O2)
        g, _, (Jp, Jm) = _in_basis(P, eta, [], [Jp, Jm])
        z = ef.zeros(n)
        return st.validate(st.ComponentsEven(g, Jp, Jm, z, z, ef.as_scalar(rng.choice([1, -1]))))
    c = rng.choice(PYTHAGOREAN + [Fraction(0), Fraction(3, 2), Fraction(-5, 4)]) * rng.choice([1, -1])
    r = 1 - c * c
    tail = [rng.choice([1, -1]) for _ in range((n - 2) // 2)]
    eta = ef.matrix(np.diag([ef.as_scalar(r)] * 2 + [ef.as_scalar(x) for x in tail for _ in (0, 1)]))
    e1, e2 = la.basis_vector(n, 0), la.basis_vector(n, 1)
    # J+ f1 = -c f2, J+ f2 = c f1, complex on the rest
    Jp = ef.zeros(n, n)
    Jp[1, 0] = -c
    Jp[0, 1] = c
    for a in range(2, n, 2):
        Jp = Jp + _rot(n, a, a + 1, rng.choice([1, -1]))
    J0 = sum((_rot(n, 2 * a, 2 * a + 1, rng.choice([1, -1])) for a in range(n // 2)), ef.zeros(n, n))
    O = cayley_orthogonal(rng, eta)
    Jm = O @ J0 @ ef.inverse(O)
    g, (xp, xm), (Jp, Jm) = _in_basis(P, eta, [e1, e2], [Jp, Jm])
    return st.validate(st.ComponentsEven(g, Jp, Jm, xp, xm, ef.as_scalar(c)))


def rand_components(rng: random.Random, n: int):
    if n % 2:
        return rand_components_odd(rng, n)
    return rand_components_even(rng, n, classical=rng.random() < 0.15)


# ----------------------------------------------------------- corruptions

def corruptions(A: co.BnAlgebroid, delta=Fraction(1)):
    """Single-coefficient perturbations of the algebroid data that remain valid.

    Yields (description, algebroid).  Structure constants are perturbed in
    one antisymmetric pair, forms in one independent component.
    """
    n = A.n
    for i, j in itertools.combinations(range(n), 2):
        for k in range(n):
            c = A.L.c.copy()
            c[i, j, k] = c[i, j, k] + delta
            c[j, i, k] = c[j, i, k] - delta
            L = la.LieAlgebra(c)
            if not la.jacobi_check(L).passed:
                continue
            B = co.BnAlgebroid(L, A.H, A.F, validate=False)
            if not B.invariant_violations():
                yield f"c[{i + 1},{j + 1},{k + 1}] += {delta}", B
    for k, name in ((2, "F"), (3, "H")):
        for idx in itertools.combinations(range(n), k):
            w = la.form(n, k, {idx: delta})
            B = co.BnAlgebroid(A.L, A.H + w if name == "H" else A.H,
                               A.F + w if name == "F" else A.F, validate=False)
            if not B.invariant_violations():
                label = ",".join(str(a + 1) for a in idx)
                yield f"{name}[{label}] += {delta}", B
