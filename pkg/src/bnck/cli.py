"""Command-line entry point.

Exit codes: 0 verdict pass, 1 verdict fail, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from fractions import Fraction

from . import classify as cl
from . import courant as co
from . import documents as dc
from . import exactfield as ef
from . import integrability as it
from . import liealg as la
from .report import Report, ReportBuilder, _plain

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------- output

def _emit_report(report: Report, as_json: bool, out) -> int:
    if as_json:
        out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        width = max((len(c.label) for c in report.checks), default=0)
        for c in report.checks:
            line = f"{c.status.upper():4}  {c.label.ljust(width)}"
            if not c.passed and c.witness is not None:
                line += f"  witness: {json.dumps(_plain(c.witness))}"
            out.write(line.rstrip() + "\n")
        out.write(f"verdict: {report.verdict} ({report.method})\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _emit_json(data, out):
    out.write(json.dumps(data, indent=2) + "\n")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse rational {text!r}") from None


def parse_grid(text: str | None, default) -> list:
    """Comma-separated rationals; 'a..b' expands to the integers from a to b."""
    if text is None:
        return list(default)
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = _rational(lo), _rational(hi)
            if lo.denominator != 1 or hi.denominator != 1 or lo > hi:
                raise UsageError(f"bad integer range {part!r}")
            values.extend(Fraction(v) for v in range(int(lo), int(hi) + 1))
        else:
            values.append(_rational(part))
    if not values:
        raise UsageError("empty grid")
    return sorted(set(values))


def _signs(text: str, count: int) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse signs {text!r}") from None
    if len(vals) != count or any(v not in (1, -1) for v in vals):
        raise UsageError(f"expected {count} comma-separated signs (+1 or -1), got {text!r}")
    return vals


def _load(args):
    doc = dc.load(args.file, strict=args.strict)
    return doc


# -------------------------------------------------------------- commands

def cmd_check_axioms(args, out) -> int:
    doc = _load(args)
    with dc.mode_context(doc):
        report = co.check_axioms(doc.algebroid)
    return _emit_report(report, args.json, out)


def cmd_check_kahler(args, out) -> int:
    doc = _load(args)
    if doc.structure is None:
        raise dc.DocumentError("structure", "check-kahler needs a structure block")
    with dc.mode_context(doc):
        report = it.check_structure(doc.algebroid, doc.structure, args.via)
    return _emit_report(report, args.json, out)


def cmd_levi_civita(args, out) -> int:
    doc = _load(args)
    if doc.metric is None:
        raise dc.DocumentError("metric", "levi-civita needs a metric")
    with dc.mode_context(doc):
        L, g = doc.lie_algebra, doc.metric
        nabla = la.levi_civita(L, g)
        rb = ReportBuilder("levi-civita")
        rb.add("torsion free", nabla.torsion_free(L))
        rb.add("metric compatible", nabla.metric_compatible(g))
        report = rb.build()
        n = L.n
        records = [{"i": i + 1, "j": j + 1, "k": k + 1, "c": ef.format_scalar(nabla.gamma[i, j, k])}
                   for i, j, k in itertools.product(range(n), repeat=3)
                   if not ef.is_zero(nabla.gamma[i, j, k])]
    if args.json:
        _emit_json({"christoffel": records, "report": report.to_dict()}, out)
        return EXIT_PASS if report.passed else EXIT_FAIL
    out.write("nabla_{e_i} e_j = sum_k c e_k, nonzero coefficients:\n")
    for r in records:
        out.write(f"  i={r['i']} j={r['j']} k={r['k']}  c={json.dumps(r['c'])}\n")
    return _emit_report(report, False, out)


def cmd_rescale(args, out) -> int:
    doc = _load(args)
    if doc.structure is None:
        raise dc.DocumentError("structure", "rescale needs a structure block")
    if (args.lam is None) == (not args.to_unit):
        raise UsageError("give exactly one of --lambda or --to-unit")
    with dc.mode_context(doc):
        lam = None if args.lam is None else ef.parse_scalar(args.lam)
        try:
            A, comps = it.rescale(doc.algebroid, doc.structure, lam=lam, to_unit=args.to_unit)
        except ValueError as exc:
            raise UsageError(f"cannot rescale: {exc}") from None
        result = dc.serialize(A, comps, comps.g, doc.mode)
    _emit_json(result, out)
    return EXIT_PASS


def cmd_catalog(args, out) -> int:
    entries = cl.catalog()
    rows, ok = [], True
    if args.export:
        os.makedirs(args.export, exist_ok=True)
    for e in entries:
        row = {"name": e.name, "parity": e.parity, "dimension": e.dim, "provenance": e.provenance,
               "slots": [s.name for s in e.slots]}
        try:
            A, comps = e.generate({})
        except cl.InadmissibleParameters as exc:
            row["admissible"] = False
            row["note"] = str(exc)
            rows.append(row)
            continue
        row["admissible"] = True
        if args.verify:
            report = cl.verify_entry(e, {})
            row["verdict"] = report.verdict
            row["report"] = report.to_dict()
            ok = ok and report.passed
        if args.export:
            data = dc.serialize(A, comps, comps.g)
            data["catalog"] = {"name": e.name, "parameters": _plain(e.resolve({}))}
            path = os.path.join(args.export, f"{e.name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dc.dumps(data) + "\n")
            row["file"] = path
        rows.append(row)
    if args.json:
        _emit_json(rows, out)
    else:
        for r in rows:
            status = r.get("verdict", "").upper() or ("ok" if r["admissible"] else "none")
            if not r["admissible"]:
                status = "NONE"
            out.write(f"{status:4}  {r['name']:26} {r['parity']:4} dim {r['dimension']}")
            if not r["admissible"]:
                out.write(f"  ({r['note']})")
            out.write("\n")
    return EXIT_PASS if ok else EXIT_FAIL


def _search_dim3(args, out) -> int:
    grid = parse_grid(args.grid, range(-2, 3))
    results, notes = [], []
    for lams in itertools.product(grid, repeat=3):
        for eps in itertools.product((1, -1), repeat=3):
            log = []
            for sol in cl.search_dim3_unimodular(lams, eps, log):
                params = {"lambda": list(lams), "eps": list(eps), **sol.parameters,
                          "X_plus": sol.components.X_plus, "X_minus": sol.components.X_minus}
                results.append({"parameters": _plain(params), "class": "dim3-unimodular",
                                "extendable": None, "report": sol.report.to_dict()})
            notes.extend(f"lams={_plain(list(lams))} eps={list(eps)}: {m}" for m in log
                         if not m.startswith("det g < 0") and m != "no Killing fields")
    ok = all(r["report"]["verdict"] == "pass" for r in results)
    if args.json:
        _emit_json(results, out)
    else:
        out.write(f"{len(results)} verified structure(s) over {len(grid) ** 3 * 8} points\n")
        for r in results:
            out.write(f"{r['report']['verdict'].upper():4}  {json.dumps(r['parameters'])}\n")
    for m in notes:
        print(f"note: {m}", file=sys.stderr)
    return EXIT_PASS if ok else EXIT_FAIL


def _search_dim4(args, out) -> int:
    grid = parse_grid(args.grid, cl.DEFAULT_GRID) if args.grid else None
    eps = _signs(args.eps, 2)
    c_plus = _rational(args.c_plus)
    try:
        results, _ = cl.solve_classes_dim4(eps, c_plus, grid, args.per_class, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = [r.to_dict() for r in results]
    ok = all(r.agree and r.family_shape is not False for r in results)
    if args.json:
        _emit_json(data, out)
    else:
        for r in results:
            ext = "extendable" if r.extendable else "not extendable"
            out.write(f"class {r.klass}  {ext:15} agree={r.agree}  {json.dumps(r.point.to_dict())}\n")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_search(args, out) -> int:
    if args.family == "dim3-unimodular":
        return _search_dim3(args, out)
    return _search_dim4(args, out)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--strict", action="store_true",
                        help="reject non-normalized antisymmetric records instead of normalizing")

    p = _Parser(prog="bnck", description="Checks for generalized Kahler structures on odd exact Courant algebroids.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-axioms", parents=[common], help="Courant algebroid axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_check_axioms)

    s = sub.add_parser("check-kahler", parents=[common], help="integrability of a structure")
    s.add_argument("file")
    s.add_argument("--via", choices=("direct", "components", "both"), default="both")
    s.set_defaults(func=cmd_check_kahler)

    s = sub.add_parser("catalog", parents=[common], help="list, verify or export the example catalog")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--export", metavar="DIR")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("search", parents=[common], help="classification searches")
    s.add_argument("family", choices=("dim3-unimodular", "dim4-adapted"))
    s.add_argument("--grid", help="comma-separated rationals, 'a..b' for integer ranges")
    s.add_argument("--eps", default="1,1", help="dim4: signs eps1,eps2")
    s.add_argument("--c-plus", default="4/5", help="dim4: value of c+")
    s.add_argument("--per-class", type=int, default=4, help="dim4: sample points per class")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("levi-civita", parents=[common], help="Levi-Civita connection of a metric")
    s.add_argument("file")
    s.set_defaults(func=cmd_levi_civita)

    s = sub.add_parser("rescale", parents=[common], help="rescale a structure")
    s.add_argument("file")
    s.add_argument("--lambda", dest="lam", metavar="P/Q")
    s.add_argument("--to-unit", action="store_true")
    s.set_defaults(func=cmd_rescale)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args, out)
    except dc.DocumentError as exc:
        print(f"input error: {exc}", file=sys.stderr)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
    return EXIT_USAGE


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
