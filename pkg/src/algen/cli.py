"""Command-line interface.

Subcommands: validate, free, con, solve, compare, lgg, kleene-dual, props.
Exit codes: 0 success, 1 bad input, 2 budget exceeded, 3 inconclusive by
bound.  All output is deterministic; JSON keys are emitted in a fixed
order, DOT nodes are labelled by canonical representatives.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .algebra import AlgebraError, Congruence, poset_covers
from .dot import congruence_lattice_dot, congruence_poset_dot
from .kleene import (
    NotKleeneError,
    dual_poset,
    is_exact_by_quasieq,
    is_projective_by_duality,
    poset_to_dot,
)
from .solver import (
    DEFAULT_BOUND,
    SolverError,
    SymbolicProblem,
    _rename_to_output,
    check_1ep,
    check_1esp,
    classify_all,
    compare_generality,
    congruence_blocks_labels,
    congruence_name,
    pairwise_reduce,
    solve,
)
from .terms import (
    ParseError,
    Signature,
    Substitution,
    TermError,
    lgg_syntactic,
    parse_term,
    term_to_str,
    term_vars,
)
from .varfile import VarFileError, load_variety
from .variety import DEFAULT_BUDGET, BudgetExceeded, VarietyContext

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2
EXIT_INCONCLUSIVE = 3


def _emit(text: str):
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _emit_json(obj):
    _emit(json.dumps(obj, indent=2, ensure_ascii=False))


def _context(args) -> VarietyContext:
    spec = load_variety(args.file)
    return VarietyContext(spec, budget_limit=args.budget)


def _rename_display(term, n):
    # 1-generated listings read better with the conventional variable z
    if n == 1:
        return term_to_str(_rename_to_output(term))
    return term_to_str(term)


def _verdict_text(v) -> str:
    out = v.status
    if v.bound is not None:
        out += f" (bound {v.bound})"
    if v.status == "no" and isinstance(v.detail, str):
        out += f": {v.detail}"
    return out


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args) -> int:
    spec = load_variety(args.file)
    doc = {
        "variety": spec.name,
        "signature": [[op, arity] for op, arity in spec.sig.ops],
        "algebras": [{"name": a.name, "size": a.size} for a in spec.generators],
        "ok": True,
    }
    if args.json:
        _emit_json(doc)
    else:
        _emit(f"variety {spec.name}: ok")
        _emit("signature: " + ", ".join(f"{op}/{arity}"
                                        for op, arity in spec.sig.ops))
        for a in spec.generators:
            _emit(f"algebra {a.name}: {a.size} elements")
    return EXIT_OK


def cmd_free(args) -> int:
    ctx = _context(args)
    f = ctx.free_algebra(args.n)
    if args.json:
        _emit_json({
            "variety": ctx.spec.name,
            "n": args.n,
            "size": f.size,
            "elements": [{"index": i, "term": _rename_display(f.reps[i], args.n)}
                         for i in range(f.size)],
        })
    else:
        _emit(f"F_{ctx.spec.name}({args.n}): {f.size} elements")
        for i in range(f.size):
            _emit(f"  {i}\t{_rename_display(f.reps[i], args.n)}")
    return EXIT_OK


def _classification_rows(ctx, bound):
    cls = classify_all(ctx, bound)
    items = sorted(cls, key=Congruence.sort_key)
    rows = []
    for theta in items:
        c = cls[theta]
        rows.append({
            "name": congruence_name(ctx, theta),
            "blocks": congruence_blocks_labels(ctx, theta),
            "exact": c.exact.to_dict(),
            "projective": c.projective.to_dict(),
            "strongly_projective": c.strongly_projective.to_dict(),
        })
    covers = poset_covers(items, lambda a, b: a.leq(b))
    cover_names = [[congruence_name(ctx, items[i]), congruence_name(ctx, items[j])]
                   for i, j in covers]
    unknown = any(
        c.exact.status == "unknown" or c.strongly_projective.status == "unknown"
        for c in cls.values())
    return rows, cover_names, unknown


def cmd_con(args) -> int:
    ctx = _context(args)
    rows, covers, unknown = _classification_rows(ctx, args.bound)
    if args.dot:
        _emit(congruence_lattice_dot(ctx, args.bound,
                                     name=f"con_{ctx.spec.name}"))
    elif args.json:
        _emit_json({
            "variety": ctx.spec.name,
            "bound": args.bound,
            "size": len(rows),
            "congruences": rows,
            "covers": covers,
        })
    else:
        _emit(f"Con F_{ctx.spec.name}(1): {len(rows)} congruences  "
              f"[bound {args.bound}]")
        for row in rows:
            blocks = " ".join("{" + ",".join(b) + "}" for b in row["blocks"])
            _emit(f"  {row['name']}")
            _emit(f"    blocks: {blocks}")
            for key in ("exact", "projective", "strongly_projective"):
                v = row[key]
                text = v["status"]
                if "bound" in v:
                    text += f" (bound {v['bound']})"
                if v["status"] == "no" and isinstance(v.get("detail"), str):
                    text += f": {v['detail']}"
                _emit(f"    {key.replace('_', ' ')}: {text}")
        _emit("covers:")
        for lo, hi in covers:
            _emit(f"  {lo} < {hi}")
    return EXIT_INCONCLUSIVE if unknown else EXIT_OK


def cmd_solve(args) -> int:
    ctx = _context(args)
    terms = tuple(parse_term(s, ctx.spec.sig) for s in args.terms)
    problem = SymbolicProblem(ctx, terms)
    report = (pairwise_reduce(problem, args.bound) if args.pairwise
              else solve(problem, args.bound))
    if args.dot:
        pool = report.g.members if report.g.status == "exact" else report.g.upper
        _emit(congruence_poset_dot(ctx, pool, highlight=report.g.maximal,
                                   name=f"g_{ctx.spec.name}"))
    elif args.json:
        _emit_json(report.to_dict())
    else:
        _emit(f"problem: {', '.join(term_to_str(t) for t in terms)}   "
              f"[variety {ctx.spec.name}, bound {args.bound}]")
        blocks = " ".join(
            "{" + ",".join(b) + "}"
            for b in congruence_blocks_labels(ctx, report.kernel))
        _emit(f"kernel: {congruence_name(ctx, report.kernel)}")
        _emit(f"  blocks: {blocks}")
        g = report.g
        if g.status == "exact":
            _emit("g-congruences: "
                  + ", ".join(congruence_name(ctx, t) for t in g.members))
        else:
            _emit("g-congruences: approximate (two-sided bounds)")
            _emit("  lower: " + ", ".join(congruence_name(ctx, t) for t in g.lower))
            _emit("  upper: " + ", ".join(congruence_name(ctx, t) for t in g.upper))
        _emit("  maximal: " + ", ".join(congruence_name(ctx, t) for t in g.maximal))
        if report.mcsg:
            _emit("mcsg:")
            for entry in report.mcsg:
                _emit(f"  {term_to_str(entry.term)}")
                for k, w in enumerate(entry.witnesses):
                    _emit(f"    sigma{k + 1}: {w}")
        else:
            _emit("mcsg: (none emitted)")
        _emit(f"type: {report.type.render()}"
              + (f"  [{report.type.reason}]" if report.type.reason else ""))
        _emit(f"1EP: {_verdict_text(report.ep)}   1ESP: {_verdict_text(report.esp)}")
        _emit(f"shortcut: {report.shortcut['status']}"
              + (f" ({report.shortcut.get('reason', '')})"
                 if "reason" in report.shortcut else ""))
        for c in report.caveats:
            _emit(f"caveat: {c}")
    return EXIT_INCONCLUSIVE if report.type.kind == "inconclusive" else EXIT_OK


def cmd_compare(args) -> int:
    ctx = _context(args)
    s = parse_term(args.left, ctx.spec.sig)
    t = parse_term(args.right, ctx.spec.sig)
    rel = compare_generality(ctx, s, t)
    if args.json:
        _emit_json({"left": term_to_str(s), "right": term_to_str(t),
                    "relation": rel})
    else:
        _emit(rel)
    return EXIT_OK


_CALL_RE = re.compile(r"([A-Za-z0-9_]+)\s*\(")


def _infer_signature(sources) -> Signature:
    """Signature inference for the syntactic baseline: every applied
    identifier becomes an operation; arities must be consistent."""
    arities: dict[str, int] = {}

    def scan(src: str):
        pos = 0
        while True:
            m = _CALL_RE.search(src, pos)
            if not m:
                return
            name = m.group(1)
            depth = 1
            args = 1
            i = m.end()
            while i < len(src) and depth:
                ch = src[i]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                elif ch == "," and depth == 1:
                    args += 1
                i += 1
            if depth:
                raise ParseError("unbalanced parenthesis",
                                 len(src[:m.end()].encode()))
            if i == m.end() + 1:
                args = 0
            if arities.setdefault(name, args) != args:
                raise TermError(
                    f"operation {name!r} used with arities "
                    f"{arities[name]} and {args}")
            pos = m.end()

    for src in sources:
        scan(src)
    return Signature.make(sorted(arities.items()))


def cmd_lgg(args) -> int:
    if args.file:
        sig = load_variety(args.file).sig
    else:
        sig = _infer_signature(args.terms)
    terms = [parse_term(s, sig) for s in args.terms]
    g, sigmas = lgg_syntactic(terms)
    if args.json:
        _emit_json({
            "generalizer": term_to_str(g),
            "witnesses": [{v: term_to_str(t) for v, t in w.bindings}
                          for w in sigmas],
        })
    else:
        _emit(f"lgg: {term_to_str(g)}")
        for k, w in enumerate(sigmas):
            _emit(f"  sigma{k + 1}: {w}")
    return EXIT_OK


def cmd_kleene_dual(args) -> int:
    spec = load_variety(args.file)
    named = {a.name: a for a in spec.generators}
    if args.algebra not in named:
        raise VarFileError(f"no algebra named {args.algebra!r} in {args.file} "
                           f"(have {sorted(named)})")
    a = named[args.algebra]
    p = dual_poset(a)
    proj_ok, failed = is_projective_by_duality(p)
    exact_ok, reason = is_exact_by_quasieq(a)
    covers = [(i, j) for i in range(p.size) for j in range(p.size)
              if i != j and p.le(i, j) and not any(
                  k != i and k != j and p.le(i, k) and p.le(k, j)
                  for k in range(p.size))]
    if args.dot:
        _emit(poset_to_dot(p, name=f"dual_{args.algebra}"))
    elif args.json:
        _emit_json({
            "algebra": args.algebra,
            "points": list(p.labels),
            "covers": [[p.labels[i], p.labels[j]] for i, j in covers],
            "involution": {p.labels[i]: p.labels[p.iota[i]]
                           for i in range(p.size)},
            "projective": {"ok": proj_ok, "failed_condition": failed},
            "exact": {"ok": exact_ok, "reason": reason},
        })
    else:
        _emit(f"dual poset of {args.algebra}: {p.size} points")
        _emit("  points: " + ", ".join(p.labels))
        for i, j in covers:
            _emit(f"  cover: {p.labels[i]} < {p.labels[j]}")
        for i in range(p.size):
            j = p.iota[i]
            if i <= j:
                arrow = "fixed" if i == j else f"<-> {p.labels[j]}"
                _emit(f"  involution: {p.labels[i]} {arrow}")
        _emit("projective (duality conditions): "
              + ("yes" if proj_ok else f"no (condition {failed} fails)"))
        _emit("exact (quasi-equation): "
              + ("yes" if exact_ok else f"no ({reason})"))
    return EXIT_OK


def cmd_props(args) -> int:
    ctx = _context(args)
    ep = check_1ep(ctx, args.bound)
    esp = check_1esp(ctx, args.bound)
    if args.json:
        _emit_json({
            "variety": ctx.spec.name,
            "bound": args.bound,
            "1ep": ep.to_dict(),
            "1esp": esp.to_dict(),
        })
    else:
        _emit(f"variety {ctx.spec.name}  [bound {args.bound}]")
        _emit(f"1EP: {_verdict_text(ep)}")
        if ep.status == "no":
            _emit(f"  witness: {ep.detail['witness']}")
        _emit(f"1ESP: {_verdict_text(esp)}")
        if esp.status == "no":
            _emit(f"  witness: {esp.detail['witness']}")
    if ep.status == "unknown" or esp.status == "unknown":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(p, file_arg=True, bound=False, formats=(), budget=True):
    if file_arg:
        p.add_argument("file", help="variety file (JSON)")
    if bound:
        p.add_argument("--bound", type=int, default=DEFAULT_BOUND,
                       help="search bound for exactness and strong "
                            "projectivity (default 2)")
    if budget:
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="cell budget for constructions (default 10^7)")
    if formats:
        group = p.add_mutually_exclusive_group()
        if "json" in formats:
            group.add_argument("--json", action="store_true",
                               help="JSON output (stable key order)")
        if "dot" in formats:
            group.add_argument("--dot", action="store_true",
                               help="DOT output")
        if "text" in formats:
            group.add_argument("--text", action="store_true",
                               help="plain text output (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algen",
        description="Equational generalization over varieties presented by "
                    "finite algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a variety file")
    _add_common(p, formats=("json", "text"), budget=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("free", help="list a free algebra with representatives")
    _add_common(p, formats=("json", "text"))
    p.add_argument("-n", type=int, required=True, help="number of generators")
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("con", help="congruence lattice of F(1) with "
                                   "classifications")
    _add_common(p, bound=True, formats=("json", "dot", "text"))
    p.set_defaults(func=cmd_con)

    p = sub.add_parser("solve", help="solve a generalization problem")
    _add_common(p, bound=True, formats=("json", "dot", "text"))
    p.add_argument("terms", nargs="+", help="problem terms")
    p.add_argument("--pairwise", action="store_true",
                   help="use the iterated pairing procedure")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="compare two terms in the generality "
                                       "preorder")
    _add_common(p, formats=("json", "text"))
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("lgg", help="syntactic least general generalization")
    p.add_argument("terms", nargs="+", help="terms in prefix syntax")
    p.add_argument("--file", help="variety file providing the signature "
                                  "(otherwise inferred)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lgg)

    p = sub.add_parser("kleene-dual", help="involutive-poset dual of a "
                                           "Kleene algebra")
    _add_common(p, formats=("json", "dot", "text"), budget=False)
    p.add_argument("algebra", help="algebra name inside the file")
    p.set_defaults(func=cmd_kleene_dual)

    p = sub.add_parser("props", help="1EP / 1ESP verdicts for the variety")
    _add_common(p, bound=True, formats=("json", "text"))
    p.set_defaults(func=cmd_props)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (VarFileError, ParseError, TermError, SolverError, AlgebraError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
