"""Exact scalar arithmetic and linear algebra over Q and Q[i].

Matrices are numpy object arrays whose entries are ``int``/``Fraction``
(real) or :class:`QI` (Gaussian rationals).  Inside a :func:`numeric`
context the same routines accept floats/complex numbers and decide zero
with a scale-aware tolerance.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import numbers
from fractions import Fraction

import numpy as np

DEFAULT_TOL = 1e-9

_TOL: contextvars.ContextVar = contextvars.ContextVar("bnck_tol", default=None)


@contextlib.contextmanager
def numeric(tol: float = DEFAULT_TOL):
    """Switch zero tests to floating point with tolerance ``tol``."""
    token = _TOL.set(float(tol))
    try:
        yield
    finally:
        _TOL.reset(token)


@contextlib.contextmanager
def exact():
    token = _TOL.set(None)
    try:
        yield
    finally:
        _TOL.reset(token)


def tolerance():
    """Current tolerance, or None in exact mode."""
    return _TOL.get()


def is_numeric() -> bool:
    return _TOL.get() is not None


class QI:
    """Gaussian rational ``real + imag*i`` with Fraction parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = real if type(real) is Fraction else Fraction(real)
        self.imag = imag if type(imag) is Fraction else Fraction(imag)

    @staticmethod
    def _parts(other):
        if isinstance(other, QI):
            return other.real, other.imag
        if isinstance(other, numbers.Rational):
            return other, 0
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QI(self.real + p[0], self.imag + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QI(self.real - p[0], self.imag - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QI(p[0] - self.real, p[1] - self.imag)

    def __mul__(self, other):
        if isinstance(other, QI):
            a, b, c, d = self.real, self.imag, other.real, other.imag
            return QI(a * c - b * d, a * d + b * c)
        if isinstance(other, numbers.Rational):
            return QI(self.real * other, self.imag * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QI):
            c, d = other.real, other.imag
            n = c * c + d * d
            if n == 0:
                raise ZeroDivisionError("QI division by zero")
            a, b = self.real, self.imag
            return QI((a * c + b * d) / n, (b * c - a * d) / n)
        if isinstance(other, numbers.Rational):
            if other == 0:
                raise ZeroDivisionError("QI division by zero")
            return QI(self.real / other, self.imag / other)
        return NotImplemented

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QI(*p) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** -k)
        out = QI(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return QI(-self.real, -self.imag)

    def __pos__(self):
        return self

    def __abs__(self):
        return math.hypot(self.real, self.imag)

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.real == p[0] and self.imag == p[1]

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def conjugate(self):
        return QI(self.real, -self.imag)

    def __repr__(self):
        return f"QI({self.real}, {self.imag})"

    def __str__(self):
        if self.imag == 0:
            return str(self.real)
        if self.real == 0:
            return f"{self.imag}i"
        sign = "+" if self.imag > 0 else "-"
        return f"{self.real}{sign}{abs(self.imag)}i"


def _one():
    return 1.0 if is_numeric() else Fraction(1)


def imag_unit():
    """The unit i in the current mode."""
    return 1j if is_numeric() else QI(0, 1)


def as_scalar(x):
    """Coerce input to the scalar type of the current mode."""
    if is_numeric():
        if isinstance(x, (QI, complex)):
            return complex(x)
        return float(x)
    if isinstance(x, QI):
        return x
    if isinstance(x, (float, complex)):
        raise TypeError(f"floating value {x!r} in exact mode")
    return Fraction(x)


def magnitude(x) -> float:
    if isinstance(x, QI):
        return abs(complex(x))
    return abs(x)


def is_zero(x, scale: float = 1.0) -> bool:
    tol = _TOL.get()
    if tol is None:
        return x == 0
    return magnitude(x) <= tol * (1.0 + scale)


def exact_sqrt(q):
    """Square root of a nonnegative rational when it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


def sqrt(q):
    """Exact square root when possible; a float in numeric mode otherwise."""
    r = None if is_numeric() else exact_sqrt(q)
    if r is not None:
        return r
    if not is_numeric():
        raise ValueError(f"{q} has no rational square root; use numeric mode")
    return math.sqrt(float(q))


# ---------------------------------------------------------------- matrices

def matrix(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return np.vectorize(as_scalar, otypes=[object])(arr) if arr.size else arr


def vector(entries) -> np.ndarray:
    arr = np.array(list(entries), dtype=object)
    return np.vectorize(as_scalar, otypes=[object])(arr) if arr.size else arr


def zeros(*shape) -> np.ndarray:
    z = 0.0 if is_numeric() else Fraction(0)
    return np.full(shape, z, dtype=object)


def identity(n: int) -> np.ndarray:
    m = zeros(n, n)
    one = 1.0 if is_numeric() else Fraction(1)
    for i in range(n):
        m[i, i] = one
    return m


def conj(a):
    a = np.asarray(a, dtype=object)
    return np.vectorize(lambda x: x.conjugate(), otypes=[object])(a) if a.size else a


def array_magnitude(a) -> float:
    a = np.asarray(a, dtype=object)
    if not a.size:
        return 0.0
    return max(magnitude(x) for x in a.flat)


def all_zero(a, scale: float | None = None) -> bool:
    a = np.asarray(a, dtype=object)
    if not is_numeric():
        return all(x == 0 for x in a.flat)
    s = array_magnitude(a) if scale is None else scale
    return all(is_zero(x, s) for x in a.flat)


def equal(a, b, scale: float | None = None) -> bool:
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape != b.shape:
        return False
    if scale is None and is_numeric():
        scale = max(array_magnitude(a), array_magnitude(b))
    return all_zero(a - b, scale)


def to_numeric(a):
    """Float/complex copy of an exact array."""
    a = np.asarray(a, dtype=object)

    def conv(x):
        if isinstance(x, (QI, complex)):
            return complex(x)
        return float(x)

    return np.vectorize(conv, otypes=[object])(a) if a.size else a.copy()


def _rref(m):
    """Return (R, pivots) with R the reduced row echelon form of m."""
    a = np.array(m, dtype=object, copy=True)
    if a.ndim != 2:
        raise ValueError("rref expects a matrix")
    rows, cols = a.shape
    numeric_mode = is_numeric()
    scale = array_magnitude(a) if numeric_mode else 0.0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        if numeric_mode:
            best = max(range(r, rows), key=lambda i: magnitude(a[i, c]))
            if is_zero(a[best, c], scale):
                continue
            piv = best
        else:
            piv = next((i for i in range(r, rows) if a[i, c] != 0), None)
            if piv is None:
                continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = _one() / a[r, c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r:
                f = a[i, c]
                if (f != 0) if not numeric_mode else not is_zero(f, 0.0):
                    a[i] = a[i] - f * a[r]
        if numeric_mode:
            for i in range(rows):
                if i != r:
                    a[i, c] = 0.0
        pivots.append(c)
        r += 1
    if numeric_mode:
        for i in range(a.shape[0]):
            for j in range(cols):
                if is_zero(a[i, j], scale):
                    a[i, j] = 0.0
    return a, pivots


def rref(m):
    """Reduced row echelon form and rank."""
    a, piv = _rref(m)
    return a, len(piv)


def rank(m) -> int:
    m = np.asarray(m, dtype=object)
    if m.size == 0:
        return 0
    return len(_rref(m)[1])


def nullspace(m) -> np.ndarray:
    """Rows spanning {x : m x = 0}."""
    m = np.asarray(m, dtype=object)
    rows, cols = m.shape
    a, piv = _rref(m) if rows else (zeros(0, cols), [])
    free = [c for c in range(cols) if c not in piv]
    out = zeros(len(free), cols)
    one = 1.0 if is_numeric() else Fraction(1)
    for k, f in enumerate(free):
        out[k, f] = one
        for r, p in enumerate(piv):
            out[k, p] = -a[r, f]
    return out


def solve(a, b):
    """One solution x of a x = b, or None when the system is inconsistent."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object).reshape(-1, 1)
    aug = np.concatenate([a, b], axis=1)
    r, piv = _rref(aug)
    n = a.shape[1]
    if n in piv:
        return None
    x = zeros(n)
    for row, p in enumerate(piv):
        x[p] = r[row, n]
    return x


def inverse(m) -> np.ndarray:
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    aug = np.concatenate([m, identity(n)], axis=1)
    r, piv = _rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return r[:, n:]


def det(m):
    """Determinant by fraction-free-ish elimination."""
    a = np.array(m, dtype=object, copy=True)
    n = a.shape[0]
    out = Fraction(1) if not is_numeric() else 1.0
    scale = array_magnitude(a)
    for c in range(n):
        if is_numeric():
            piv = max(range(c, n), key=lambda i: magnitude(a[i, c]))
            if is_zero(a[piv, c], scale):
                return 0.0
        else:
            piv = next((i for i in range(c, n) if a[i, c] != 0), None)
            if piv is None:
                return Fraction(0)
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            out = -out
        out = out * a[c, c]
        for i in range(c + 1, n):
            f = a[i, c] * (_one() / a[c, c])
            if f != 0:
                a[i] = a[i] - f * a[c]
    return out


# -------------------------------------------------------------- subspaces

class ComplexSubspace:
    """Subspace of K^d stored by its reduced row echelon basis."""

    __slots__ = ("dim", "basis", "pivots")

    def __init__(self, vectors, dim: int):
        vecs = np.asarray(vectors, dtype=object).reshape(-1, dim) if len(vectors) else zeros(0, dim)
        self.dim = dim
        if vecs.shape[0] == 0:
            self.basis = zeros(0, dim)
            self.pivots = ()
            return
        r, piv = _rref(vecs)
        self.basis = r[: len(piv)]
        self.pivots = tuple(piv)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def residual(self, v):
        """v minus its echelon projection; zero iff v lies in the subspace."""
        v = np.asarray(v, dtype=object)
        out = np.array(v, dtype=object, copy=True)
        for row, p in enumerate(self.pivots):
            coef = v[p]
            if coef != 0:
                out = out - coef * self.basis[row]
        return out

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=object)
        return all_zero(self.residual(v), array_magnitude(v) + 1.0)

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __eq__(self, other):
        if not isinstance(other, ComplexSubspace):
            return NotImplemented
        if self.dim != other.dim or self.pivots != other.pivots:
            return False
        return equal(self.basis, other.basis)

    def __hash__(self):
        return hash((self.dim, self.pivots))

    def __repr__(self):
        return f"ComplexSubspace(dim={self.dim}, rank={self.rank})"

    def vectors(self):
        return [self.basis[i] for i in range(self.rank)]

    def conjugate(self) -> "ComplexSubspace":
        return ComplexSubspace(conj(self.basis), self.dim)

    def is_real(self) -> bool:
        return equal(self.basis, conj(self.basis))


def span(vectors, dim: int) -> ComplexSubspace:
    return ComplexSubspace(list(vectors), dim)


def full_space(dim: int) -> ComplexSubspace:
    return ComplexSubspace(identity(dim), dim)


def zero_space(dim: int) -> ComplexSubspace:
    return ComplexSubspace([], dim)


def kernel(m) -> ComplexSubspace:
    m = np.asarray(m, dtype=object)
    return ComplexSubspace(nullspace(m), m.shape[1])


def eigenspace(m, lam) -> ComplexSubspace:
    """Kernel of m - lam*Id."""
    m = np.asarray(m, dtype=object)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("eigenspace expects a square matrix")
    return kernel(m - lam * identity(m.shape[0]))


def subspace_sum(a: ComplexSubspace, b: ComplexSubspace) -> ComplexSubspace:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return ComplexSubspace(list(a.vectors()) + list(b.vectors()), a.dim)


def intersect(a: ComplexSubspace, b: ComplexSubspace) -> ComplexSubspace:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if a.rank == 0 or b.rank == 0:
        return zero_space(a.dim)
    # x·A = y·B  <=>  (x, y) in the kernel of [A^T | -B^T]
    m = np.concatenate([a.basis.T, -b.basis.T], axis=1)
    coeffs = nullspace(m)
    vecs = [c[: a.rank] @ a.basis for c in coeffs]
    return ComplexSubspace(vecs, a.dim)


# ---------------------------------------------------------- serialization

def parse_scalar(s):
    """Parse "p/q", "p", a number, or {"re", "im"} into a scalar."""
    if isinstance(s, dict):
        re = parse_scalar(s.get("re", "0"))
        im = parse_scalar(s.get("im", "0"))
        if is_numeric():
            return complex(re, im)
        return QI(re, im)
    if isinstance(s, bool):
        raise ValueError(f"not a scalar: {s!r}")
    if isinstance(s, int):
        return as_scalar(s)
    if isinstance(s, float):
        if is_numeric():
            return s
        return Fraction(s).limit_denominator(10**12) if s != int(s) else Fraction(int(s))
    if isinstance(s, str):
        text = s.strip()
        if is_numeric():
            if "/" in text:
                p, q = text.split("/", 1)
                return float(Fraction(int(p), int(q)))
            return float(text)
        return Fraction(text)
    raise ValueError(f"not a scalar: {s!r}")


def format_scalar(x):
    """Inverse of parse_scalar for exact values; floats pass through."""
    if isinstance(x, QI):
        if x.imag == 0:
            return format_scalar(x.real)
        return {"re": format_scalar(x.real), "im": format_scalar(x.imag)}
    if isinstance(x, complex):
        if x.imag == 0:
            return x.real
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float):
        return x
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
