"""Left-invariant calculus on a Lie algebra given by structure constants.

Conventions: ``c[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
A k-form is a fully antisymmetric numpy array of shape ``(n,)*k`` holding
its values on basis tuples, so ``(e1*^e2*)(e1, e2) = 1``.  The exterior
derivative uses only the bracket terms of the alternating-sum formula,
e.g. ``dxi(X, Y) = -xi([X, Y])``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from . import exactfield as ef
from .report import ReportBuilder

HALF = Fraction(1, 2)


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


class LieAlgebra:
    """Finite-dimensional Lie algebra in a fixed basis."""

    def __init__(self, c, check_antisymmetry: bool = True):
        c = np.asarray(c, dtype=object)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError("structure constants must have shape (n, n, n)")
        self.n = c.shape[0]
        self.c = c
        if check_antisymmetry:
            for i, j, k in itertools.product(range(self.n), repeat=3):
                if not ef.is_zero(c[i, j, k] + c[j, i, k], ef.array_magnitude(c)):
                    raise ValueError(
                        f"structure constants not antisymmetric at ({i + 1},{j + 1},{k + 1})"
                    )

    @classmethod
    def from_brackets(cls, n: int, brackets: dict) -> "LieAlgebra":
        """Build from {(i, j): {k: coeff}} with 0-based indices, i != j."""
        c = ef.zeros(n, n, n)
        for (i, j), img in brackets.items():
            for k, v in img.items():
                v = ef.as_scalar(v)
                c[i, j, k] = v
                c[j, i, k] = -v
        return cls(c)

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls(ef.zeros(n, n, n))

    def bracket(self, x, y):
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        out = ef.zeros(self.n)
        for i in range(self.n):
            if x[i] == 0:
                continue
            for j in range(self.n):
                if y[j] == 0:
                    continue
                out = out + (x[i] * y[j]) * self.c[i, j]
        return out

    def ad(self, x):
        """Matrix of ad_x (columns are images of basis vectors)."""
        x = np.asarray(x, dtype=object)
        m = ef.zeros(self.n, self.n)
        for j in range(self.n):
            m[:, j] = self.bracket(x, basis_vector(self.n, j))
        return m

    def is_abelian(self) -> bool:
        return ef.all_zero(self.c)

    def transform(self, p) -> "LieAlgebra":
        """Structure constants in the new basis f_a = sum_i p[i, a] e_i."""
        p = np.asarray(p, dtype=object)
        pinv = ef.inverse(p)
        n = self.n
        c = ef.zeros(n, n, n)
        for a in range(n):
            for b in range(a + 1, n):
                v = pinv @ self.bracket(p[:, a], p[:, b])
                c[a, b] = v
                c[b, a] = -v
        return LieAlgebra(c)


def basis_vector(n: int, i: int):
    v = ef.zeros(n)
    v[i] = ef.as_scalar(1)
    return v


# ------------------------------------------------------------------ forms

def zero_form(n: int, k: int):
    return ef.zeros(*((n,) * k)) if k else np.array(ef.as_scalar(0), dtype=object)


def form(n: int, k: int, components: dict):
    """k-form from {(i1, ..., ik): coeff} (0-based, any order of indices)."""
    w = zero_form(n, k)
    for idx, v in components.items():
        idx = tuple(idx)
        if len(idx) != k or len(set(idx)) != k:
            raise ValueError(f"bad form index {idx}")
        v = ef.as_scalar(v)
        for p in itertools.permutations(range(k)):
            w[tuple(idx[q] for q in p)] = _perm_sign(p) * v
    return w


def form_components(w) -> dict:
    """Independent components {(i1 < ... < ik): coeff}, nonzero only."""
    w = np.asarray(w, dtype=object)
    k = w.ndim
    n = w.shape[0] if k else 0
    out = {}
    for idx in itertools.combinations(range(n), k):
        if w[idx] != 0:
            out[idx] = w[idx]
    return out


def is_antisymmetric(w) -> bool:
    w = np.asarray(w, dtype=object)
    k = w.ndim
    for p in itertools.permutations(range(k)):
        if not ef.equal(np.transpose(w, p), _perm_sign(p) * w):
            return False
    return True


def wedge(a, b):
    """Exterior product, normalized so that e1*^e2*(e1, e2) = 1."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    p, q = a.ndim, b.ndim
    if p == 0:
        return a[()] * b
    if q == 0:
        return b[()] * a
    n = a.shape[0]
    k = p + q
    if k > n:
        return zero_form(n, k)
    t = np.multiply.outer(a, b)
    out = zero_form(n, k)
    for perm in itertools.permutations(range(k)):
        out = out + _perm_sign(perm) * np.transpose(t, perm)
    return out * Fraction(1, math.factorial(p) * math.factorial(q))


def interior(x, w):
    """i_x w."""
    w = np.asarray(w, dtype=object)
    x = np.asarray(x, dtype=object)
    return np.tensordot(x, w, axes=([0], [0]))


def evaluate(w, *vectors):
    w = np.asarray(w, dtype=object)
    out = w
    for v in vectors:
        out = np.tensordot(np.asarray(v, dtype=object), out, axes=([0], [0]))
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def ce_differential(L: LieAlgebra, w):
    """Chevalley-Eilenberg differential of a left-invariant k-form."""
    w = np.asarray(w, dtype=object)
    k = w.ndim
    n = L.n
    if k + 1 > n:
        return zero_form(n, k + 1)
    out = zero_form(n, k + 1)
    # contract [e_a, e_b] into the first slot once
    if k == 0:
        return out
    bw = np.tensordot(L.c, w, axes=([2], [0]))  # bw[a, b, ...] = w([e_a, e_b], ...)
    for idx in itertools.combinations(range(n), k + 1):
        total = 0
        for i, j in itertools.combinations(range(k + 1), 2):
            rest = tuple(idx[m] for m in range(k + 1) if m not in (i, j))
            val = bw[(idx[i], idx[j]) + rest]
            if val != 0:
                total = total + (-1) ** (i + j) * val
        if total != 0:
            for p in itertools.permutations(range(k + 1)):
                out[tuple(idx[q] for q in p)] = _perm_sign(p) * total
    return out


def exterior_powers_zero(n: int, k: int) -> bool:
    return k > n


# ---------------------------------------------------------------- metrics

class PseudoMetric:
    """Nondegenerate symmetric bilinear form on the algebra."""

    def __init__(self, g):
        g = np.asarray(g, dtype=object)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metric must be a square matrix")
        if not ef.equal(g, g.T):
            raise ValueError("metric is not symmetric")
        try:
            inv = ef.inverse(g)
        except ZeroDivisionError:
            raise ValueError("metric is degenerate") from None
        self.g = g
        self.inv = inv
        self.n = g.shape[0]

    @classmethod
    def diagonal(cls, entries) -> "PseudoMetric":
        n = len(entries)
        g = ef.zeros(n, n)
        for i, v in enumerate(entries):
            g[i, i] = ef.as_scalar(v)
        return cls(g)

    def inner(self, x, y):
        return np.asarray(x, dtype=object) @ self.g @ np.asarray(y, dtype=object)

    def flat(self, x):
        return self.g @ np.asarray(x, dtype=object)

    def sharp(self, xi):
        return self.inv @ np.asarray(xi, dtype=object)

    def raise_form(self, w):
        """Endomorphism-valued view of a 2-form: column j is sharp(w(e_j, .))."""
        w = np.asarray(w, dtype=object)
        return self.inv @ w.T

    def is_skew(self, a) -> bool:
        a = np.asarray(a, dtype=object)
        ga = self.g @ a
        return ef.equal(ga, -ga.T)

    def scaled(self, s) -> "PseudoMetric":
        return PseudoMetric(s * self.g)


class Connection:
    """Left-invariant connection: nabla_{e_i} e_j = sum_k gamma[i, j, k] e_k."""

    def __init__(self, gamma):
        self.gamma = np.asarray(gamma, dtype=object)
        self.n = self.gamma.shape[0]

    def derivative(self, x, y):
        """nabla_x y for constant-coefficient fields."""
        x = np.asarray(x, dtype=object)
        y = np.asarray(y, dtype=object)
        return np.tensordot(np.tensordot(x, self.gamma, axes=([0], [0])), y, axes=([0], [0]))

    def along(self, x):
        """Matrix of Y -> nabla_x Y."""
        x = np.asarray(x, dtype=object)
        return np.tensordot(x, self.gamma, axes=([0], [0])).T

    def of(self, y):
        """Matrix of X -> nabla_X y."""
        y = np.asarray(y, dtype=object)
        return np.tensordot(self.gamma, y, axes=([1], [0])).T

    def torsion_free(self, L: LieAlgebra) -> bool:
        return ef.equal(self.gamma - np.transpose(self.gamma, (1, 0, 2)), L.c)

    def metric_compatible(self, g: PseudoMetric) -> bool:
        low = np.tensordot(self.gamma, g.g, axes=([2], [0]))  # g(nabla_i e_j, e_l)
        return ef.equal(low, -np.transpose(low, (0, 2, 1)))


def _koszul_lowered(L: LieAlgebra, g: PseudoMetric):
    """K[i, j, l] = g(nabla_{e_i} e_j, e_l) via the Koszul formula."""
    cg = np.tensordot(L.c, g.g, axes=([2], [0]))  # g([e_i, e_j], e_l)
    return HALF * (cg - np.transpose(cg, (2, 0, 1)) + np.transpose(cg, (1, 2, 0)))


def levi_civita(L: LieAlgebra, g: PseudoMetric) -> Connection:
    if L.n != g.n:
        raise ValueError("dimension mismatch between algebra and metric")
    low = _koszul_lowered(L, g)
    return Connection(np.tensordot(low, g.inv, axes=([2], [0])))


def killing_fields(L: LieAlgebra, g: PseudoMetric) -> ef.ComplexSubspace:
    """Left-invariant Killing fields as a (real) subspace of the algebra."""
    low = _koszul_lowered(L, g)
    n = L.n
    rows = []
    for a in range(n):
        for b in range(a, n):
            rows.append([low[a, j, b] + low[b, j, a] for j in range(n)])
    return ef.kernel(ef.matrix(rows) if rows else ef.zeros(0, n))


def is_killing(L: LieAlgebra, g: PseudoMetric, x) -> bool:
    nab = levi_civita(L, g).of(x)
    s = g.g @ nab
    return ef.equal(s, -s.T)


def unimodular_data(L: LieAlgebra):
    """(is_unimodular, kernel of x -> trace ad_x)."""
    tr = [sum((L.c[i, j, j] for j in range(L.n)), ef.as_scalar(0)) for i in range(L.n)]
    k = ef.kernel(ef.matrix([tr]))
    return k.rank == L.n, k


def jacobi_check(L: LieAlgebra):
    rb = ReportBuilder("jacobi")
    n = L.n
    e = [basis_vector(n, i) for i in range(n)]
    bad = []
    for i, j, k in itertools.combinations(range(n), 3):
        s = (
            L.bracket(L.bracket(e[i], e[j]), e[k])
            + L.bracket(L.bracket(e[j], e[k]), e[i])
            + L.bracket(L.bracket(e[k], e[i]), e[j])
        )
        if not ef.all_zero(s, ef.array_magnitude(L.c) ** 2):
            bad.append(((i + 1, j + 1, k + 1), s))
    rb.add("Jacobi identity", not bad, bad[0] if bad else None)
    return rb.build()


def is_derivation(L0: LieAlgebra, D):
    """Check D[x, y] = [Dx, y] + [x, Dy] on basis pairs."""
    D = np.asarray(D, dtype=object)
    rb = ReportBuilder("derivation")
    n = L0.n
    e = [basis_vector(n, i) for i in range(n)]
    bad = []
    for i, j in itertools.combinations(range(n), 2):
        r = D @ L0.bracket(e[i], e[j]) - L0.bracket(D @ e[i], e[j]) - L0.bracket(e[i], D @ e[j])
        if not ef.all_zero(r):
            bad.append(((i + 1, j + 1), r))
    rb.add("derivation rule", not bad, bad[0] if bad else None)
    return rb.build()


def lie_derivative_endo(L: LieAlgebra, x, A):
    """(L_x A)(Y) = [x, AY] - A[x, Y] for invariant fields."""
    ad = L.ad(x)
    A = np.asarray(A, dtype=object)
    return ad @ A - A @ ad


def is_subalgebra(L: LieAlgebra, S: ef.ComplexSubspace):
    """Closure of a (complex) subspace of the complexified algebra under the bracket."""
    vecs = S.vectors()
    for a in range(len(vecs)):
        for b in range(a + 1, len(vecs)):
            if not S.contains(L.bracket(vecs[a], vecs[b])):
                return False, (a, b)
    return True, None


# ------------------------------------------------------------ dimension 3

def metric_volume(g: PseudoMetric, orientation: int = 1):
    """vol(e1, e2, e3) = orientation * sqrt|det g|."""
    d = ef.det(g.g)
    return orientation * ef.sqrt(abs(d))


def cross(g: PseudoMetric, u, v, orientation: int = 1):
    """Metric cross product: g(u x v, w) = vol(u, v, w)."""
    u = np.asarray(u, dtype=object)
    v = np.asarray(v, dtype=object)
    e = ef.vector([u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]])
    return metric_volume(g, orientation) * (g.inv @ e)


def cross_matrix(g: PseudoMetric, u, orientation: int = 1):
    """Matrix of v -> u x v."""
    cols = [cross(g, u, basis_vector(3, j), orientation) for j in range(3)]
    return np.array(cols, dtype=object).T


def canonical_operator_L(L: LieAlgebra, g: PseudoMetric, orientation: int = 1):
    """The endomorphism with [u, v] = L(u x v) in dimension 3."""
    if L.n != 3 or g.n != 3:
        raise ValueError("the canonical operator is defined in dimension 3 only")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    pairs = [(1, 2), (2, 0), (0, 1)]
    C = np.array([L.c[i, j] for i, j in pairs], dtype=object).T
    s = metric_volume(g, orientation)
    # columns of s * g^{-1} are e2 x e3, e3 x e1, e1 x e2
    return (C @ g.g) * (1 / s)


def unimodular_3d(lams, eps) -> LieAlgebra:
    """[v1,v2] = e3 l3 v3, [v2,v3] = e1 l1 v1, [v3,v1] = e2 l2 v2."""
    l1, l2, l3 = (ef.as_scalar(x) for x in lams)
    e1, e2, e3 = (ef.as_scalar(x) for x in eps)
    return LieAlgebra.from_brackets(
        3, {(0, 1): {2: e3 * l3}, (1, 2): {0: e1 * l1}, (2, 0): {1: e2 * l2}}
    )
