"""JSON documents: algebras, algebroids, structures, reports.

Indices are 1-based on disk and 0-based in memory.  Rationals are strings
"p/q".  Coefficient records of antisymmetric objects may repeat a slot in
permuted order; lenient loading averages the sign-adjusted values, strict
loading rejects any inconsistency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import courant as co
from . import exactfield as ef
from . import liealg as la
from . import structures as st


class DocumentError(ValueError):
    """Malformed or invalid document; `path` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class InputDocument:
    algebroid: co.BnAlgebroid
    metric: la.PseudoMetric | None = None
    structure: object = None
    mode: str = "exact"
    tolerance: float = ef.DEFAULT_TOL

    @property
    def lie_algebra(self) -> la.LieAlgebra:
        return self.algebroid.L


# ------------------------------------------------------------ primitives

def _scalar(value, path):
    try:
        return ef.parse_scalar(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DocumentError(path, f"cannot parse scalar {value!r} ({exc})") from None


def _index(rec, key, n, path):
    if key not in rec:
        raise DocumentError(f"{path}.{key}", "missing index")
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"{path}.{key}", f"index must be an integer, got {v!r}")
    if not 1 <= v <= n:
        raise DocumentError(f"{path}.{key}", f"index {v} outside 1..{n}")
    return v - 1


def _records(doc, key, path):
    recs = doc.get(key, [])
    if not isinstance(recs, list):
        raise DocumentError(path, "expected a list of coefficient records")
    for r, rec in enumerate(recs):
        if not isinstance(rec, dict):
            raise DocumentError(f"{path}[{r}]", "expected an object")
    return recs


def _perm_sign(idx):
    sign, idx = 1, list(idx)
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                sign = -sign
    return sign


def _collect(entries, strict, path, what):
    """entries: list of (record path, antisymmetric index tuple, extra key, value).

    Returns {(sorted tuple, extra): value} after normalization.
    """
    groups: dict = {}
    for rpath, idx, extra, val in entries:
        if len(set(idx)) < len(idx):
            if strict and not ef.is_zero(val):
                raise DocumentError(rpath, f"{what} with a repeated antisymmetric index must vanish")
            continue
        key = (tuple(sorted(idx)), extra)
        groups.setdefault(key, []).append((rpath, _perm_sign(idx) * val))
    out = {}
    for key, vals in groups.items():
        first = vals[0][1]
        consistent = all(ef.is_zero(v - first) for _, v in vals)
        if strict and not consistent:
            raise DocumentError(vals[-1][0], f"{what} is not antisymmetric (permuted records disagree)")
        total = sum((v for _, v in vals), ef.as_scalar(0))
        out[key] = first if consistent else total / len(vals)
    return out


# ---------------------------------------------------------------- parsing

def parse_lie_algebra(doc, path="lie_algebra", strict=False) -> la.LieAlgebra:
    if not isinstance(doc, dict):
        raise DocumentError(path, "expected an object")
    n = doc.get("dimension")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DocumentError(f"{path}.dimension", "dimension must be a positive integer")
    entries = []
    for r, rec in enumerate(_records(doc, "structure_constants", f"{path}.structure_constants")):
        rp = f"{path}.structure_constants[{r}]"
        i, j, k = (_index(rec, key, n, rp) for key in "ijk")
        if "c" not in rec:
            raise DocumentError(f"{rp}.c", "missing coefficient")
        entries.append((f"{rp}.c", (i, j), k, _scalar(rec["c"], f"{rp}.c")))
    c = ef.zeros(n, n, n)
    for ((i, j), k), v in _collect(entries, strict, path, "structure constant").items():
        c[i, j, k] = v
        c[j, i, k] = -v
    L = la.LieAlgebra(c)
    if not la.jacobi_check(L).passed:
        raise DocumentError(f"{path}.structure_constants", "structure constants violate the Jacobi identity")
    return L


def parse_form(recs, n, k, path, strict=False):
    if not isinstance(recs, list):
        raise DocumentError(path, "expected a list of coefficient records")
    keys = "ijk"[:k]
    entries = []
    for r, rec in enumerate(recs):
        rp = f"{path}[{r}]"
        if not isinstance(rec, dict):
            raise DocumentError(rp, "expected an object")
        idx = tuple(_index(rec, key, n, rp) for key in keys)
        if "c" not in rec:
            raise DocumentError(f"{rp}.c", "missing coefficient")
        entries.append((f"{rp}.c", idx, None, _scalar(rec["c"], f"{rp}.c")))
    comps = {idx: v for (idx, _), v in _collect(entries, strict, path, "form coefficient").items()}
    return la.form(n, k, comps)


def _matrix(value, n, path, shape=None):
    shape = shape or (n, n)
    if not isinstance(value, list) or len(value) != shape[0]:
        raise DocumentError(path, f"expected a {shape[0]} x {shape[1]} matrix")
    rows = []
    for a, row in enumerate(value):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise DocumentError(f"{path}[{a}]", f"expected a row of length {shape[1]}")
        rows.append([_scalar(x, f"{path}[{a}][{b}]") for b, x in enumerate(row)])
    return ef.matrix(rows)


def _vector(value, n, path):
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(path, f"expected a vector of length {n}")
    return ef.vector([_scalar(x, f"{path}[{a}]") for a, x in enumerate(value)])


def parse_metric(value, n, path="metric") -> la.PseudoMetric:
    g = _matrix(value, n, path)
    try:
        return la.PseudoMetric(g)
    except ValueError as exc:
        raise DocumentError(path, str(exc)) from None


def parse_structure(doc, n, metric=None, path="structure"):
    if not isinstance(doc, dict):
        raise DocumentError(path, "expected an object")
    parity = doc.get("parity", "odd" if n % 2 else "even")
    if parity not in ("odd", "even"):
        raise DocumentError(f"{path}.parity", "parity must be 'odd' or 'even'")
    if "metric" in doc:
        metric = parse_metric(doc["metric"], n, f"{path}.metric")
    if metric is None:
        raise DocumentError(f"{path}.metric", "a metric is required for a structure")
    fields = {}
    for key in ("J_plus", "J_minus"):
        if key not in doc:
            raise DocumentError(f"{path}.{key}", "missing field")
        fields[key] = _matrix(doc[key], n, f"{path}.{key}")
    for key in ("X_plus", "X_minus"):
        if key not in doc:
            raise DocumentError(f"{path}.{key}", "missing field")
        fields[key] = _vector(doc[key], n, f"{path}.{key}")
    if parity == "odd":
        comps = st.ComponentsOdd(metric, fields["J_plus"], fields["J_minus"], fields["X_plus"], fields["X_minus"])
    else:
        if "c_plus" not in doc:
            raise DocumentError(f"{path}.c_plus", "even structures need c_plus")
        c = _scalar(doc["c_plus"], f"{path}.c_plus")
        comps = st.ComponentsEven(metric, fields["J_plus"], fields["J_minus"], fields["X_plus"], fields["X_minus"], c)
    problems = comps.violations()
    if problems:
        first = problems[0]
        field = first.split(":", 1)[0] if ":" in first else "parity"
        raise DocumentError(f"{path}.{field}", "; ".join(problems))
    return comps


def _load_env(doc):
    import os
    mode = os.environ.get("BNCK_MODE") or doc.get("mode", "exact")
    if mode not in ("exact", "numeric"):
        raise DocumentError("mode", f"mode must be 'exact' or 'numeric', got {mode!r}")
    tol = os.environ.get("BNCK_TOL", doc.get("tolerance", ef.DEFAULT_TOL))
    try:
        tol = float(tol)
    except (TypeError, ValueError):
        raise DocumentError("tolerance", f"cannot parse tolerance {tol!r}") from None
    if not tol > 0:
        raise DocumentError("tolerance", "tolerance must be positive")
    return mode, tol


def parse(text: str, strict: bool = False) -> InputDocument:
    """Parse and validate a document.  In numeric mode, call inside mode_context(doc)."""
    try:
        doc = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("$", "expected a JSON object")
    mode, tol = _load_env(doc)
    if mode == "numeric":
        with ef.numeric(tol):
            return _parse(doc, strict, mode, tol)
    return _parse(doc, strict, mode, tol)


def _parse(doc, strict, mode, tol):
    if "lie_algebra" not in doc:
        raise DocumentError("lie_algebra", "missing field")
    L = parse_lie_algebra(doc["lie_algebra"], strict=strict)
    n = L.n
    H = parse_form(doc.get("H", []), n, 3, "H", strict)
    F = parse_form(doc.get("F", []), n, 2, "F", strict)
    A = co.BnAlgebroid(L, H, F, validate=False)
    for problem in A.invariant_violations():
        where = "F" if "dF" in problem else "H"
        raise DocumentError(where, problem)
    metric = parse_metric(doc["metric"], n) if "metric" in doc else None
    structure = parse_structure(doc["structure"], n, metric) if "structure" in doc else None
    if structure is not None and metric is None:
        metric = structure.g
    return InputDocument(A, metric, structure, mode, tol)


def load(path: str, strict: bool = False) -> InputDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), strict)


def mode_context(doc: InputDocument):
    """Context manager matching the document's arithmetic mode."""
    return ef.numeric(doc.tolerance) if doc.mode == "numeric" else ef.exact()


# ---------------------------------------------------------- serialization

def _fmt(x):
    return ef.format_scalar(x)


def serialize_lie_algebra(L: la.LieAlgebra) -> dict:
    recs = []
    n = L.n
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if not ef.is_zero(L.c[i, j, k]):
                    recs.append({"i": i + 1, "j": j + 1, "k": k + 1, "c": _fmt(L.c[i, j, k])})
    return {"dimension": n, "structure_constants": recs}


def serialize_form(w) -> list:
    out = []
    for idx, v in sorted(la.form_components(w).items()):
        if not ef.is_zero(v):
            rec = {key: a + 1 for key, a in zip("ijk", idx)}
            rec["c"] = _fmt(v)
            out.append(rec)
    return out


def _mat(m):
    return [[_fmt(x) for x in row] for row in np.asarray(m, dtype=object)]


def serialize_structure(comps) -> dict:
    out = {"parity": comps.parity, "metric": _mat(comps.g.g), "J_plus": _mat(comps.J_plus),
           "J_minus": _mat(comps.J_minus), "X_plus": [_fmt(x) for x in comps.X_plus],
           "X_minus": [_fmt(x) for x in comps.X_minus]}
    if comps.parity == "even":
        out["c_plus"] = _fmt(comps.c_plus)
    return out


def serialize(A: co.BnAlgebroid, comps=None, metric=None, mode: str = "exact") -> dict:
    doc = {"lie_algebra": serialize_lie_algebra(A.L), "H": serialize_form(A.H), "F": serialize_form(A.F)}
    if metric is not None:
        doc["metric"] = _mat(metric.g)
    if comps is not None:
        doc["structure"] = serialize_structure(comps)
    if mode != "exact":
        doc["mode"] = mode
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
