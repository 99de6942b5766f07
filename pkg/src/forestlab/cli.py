"""Command-line front end: ``forestlab <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (one JSON object on stderr)
and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus
from .errors import ForestlabError, ParseError, ResourceBoundError
from .laws import check_main_theorem, forest_series, ratio_test
from .series import TruncatedSeries, format_coefficient
from .spec.evaluate import evaluate_expr, evaluate_system, max_order_from_env
from .spec.gexpr import evaluate_gexpr, format_gexpr, free_names
from .spec.parser import parse_gexpr, parse_system
from .structure import Verdict, class_expr_to_gexpr, classify_radius, growth_crosscheck, to_explicit
from .trees import (
    DEFAULT_MAX_SIZE,
    _Membership,
    count_by_enumeration,
    enumerate_forests,
    enumerate_trees,
    factor_module,
    parse_module,
)


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like a..b") from None
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError("window needs 1 <= a <= b")
    return lo, hi


def _common(p: argparse.ArgumentParser, system: bool = True, cls: bool = True) -> None:
    if system:
        p.add_argument("--system", metavar="PATH", help="system file (.fst) or corpus:<name>")
    if cls:
        p.add_argument("--class", dest="cls", metavar="NAME", help="class or definition name")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--max-order", type=_positive, help="cap on truncation order (default: FORESTLAB_MAX_ORDER or 20000)")
    p.add_argument("--max-size", type=_positive, default=DEFAULT_MAX_SIZE, help="cap on enumeration size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forestlab", description="Counting, radius and zero-one law tools for recursively specified classes of rooted trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "eval",
        help="coefficients of a class or expression",
        description="Ordinary generating function of a system class or definition (Compton equation system, Polya multiset operators), or of a GExpr.",
    )
    _common(p)
    p.add_argument("--expr", metavar="GEXPR", help="GExpr to evaluate instead of a class")
    p.add_argument("--order", type=_nonneg, default=20)

    p = sub.add_parser(
        "classify",
        help="dependency digraph and radius verdicts",
        description="Dependency digraph with strong components and ranks, unit-cycle radius classification, and the numeric growth crosscheck.",
    )
    _common(p, cls=False)
    p.add_argument("--order", type=_positive, default=200, help="order of the growth crosscheck")

    p = sub.add_parser(
        "explicit",
        help="closed form as a let-bound GExpr",
        description="Explicit closed form over x and x/(1-x^m) with E_m, E_>=m, built from the cycle pump modules M_ii and connectors M^_ik.",
    )
    _common(p)

    p = sub.add_parser(
        "law",
        help="ratio test on forests and coherence with the radius",
        description="Compton's ratio test a((n-1)d)/a(nd) -> 1 on the forests (>=1)T of a tree class, compared with the structural radius verdict.",
    )
    _common(p)
    p.add_argument("--order", type=_positive, default=None, help="single truncation order (default: escalate up to 4000)")
    p.add_argument("--window", type=_window, help="degree window a..b for the ratio test")

    p = sub.add_parser(
        "enumerate",
        help="brute-force trees or forests of one size",
        description="Exhaustive enumeration of canonical unordered rooted trees (or forests), optionally filtered by class membership.",
    )
    _common(p)
    p.add_argument("--size", type=_nonneg, required=True)

    p = sub.add_parser(
        "gfun",
        help="evaluate a GExpr",
        description="Evaluate an expression of the closure of x and x/(1-x^m) under +, *, E_m and E_>=m; free names are bound to classes of --system.",
    )
    _common(p, cls=False)
    p.add_argument("--expr", metavar="GEXPR", required=True)
    p.add_argument("--order", type=_nonneg, default=20)

    p = sub.add_parser(
        "factor",
        help="factor a tree module",
        description="Unique factorisation of a tree module (tree with designated leaf) into indecomposables of the stack monoid.",
    )
    p.add_argument("module", metavar="MODULE", help="module literal such as '(()(()))@1.0'")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


# helpers ---------------------------------------------------------------------


def _load_system(args):
    if not getattr(args, "system", None):
        raise UsageError("--system is required")
    path = args.system
    if path.startswith("corpus:"):
        return corpus.load(path[len("corpus:"):])
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def _bound(args) -> int:
    return args.max_order if args.max_order is not None else max_order_from_env()


def _check(order: int, args) -> None:
    bound = _bound(args)
    if order > bound:
        raise ResourceBoundError(f"order {order} exceeds the configured bound {bound}")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def _series_out(series: TruncatedSeries, fmt: str, start: int, meta: dict) -> str:
    if fmt == "csv":
        return series.to_csv(start).rstrip("\n")
    return _json({**meta, "order": series.order, "coefficients": [_coeff_json(c) for c in series.coeffs]})


def _coeff_json(c):
    return c if isinstance(c, int) else format_coefficient(c)


# subcommands -----------------------------------------------------------------


def cmd_eval(args) -> str:
    _check(args.order, args)
    if args.expr:
        return _gexpr_out(args)
    system = _load_system(args)
    if not args.cls:
        raise UsageError("eval needs --class or --expr")
    cexpr = system.resolve(args.cls)
    series = evaluate_expr(system, cexpr, args.order, _bound(args))
    start = 1 if system.kind(cexpr) == "tree" else 0
    return _series_out(series, args.format, start, {"system": system.name, "class": args.cls})


def cmd_classify(args) -> str:
    _check(args.order, args)
    system = _load_system(args)
    cl = classify_radius(system)
    report = cl.to_dict()
    dg = cl.digraph
    names = system.classes
    report["edges"] = {names[i]: [names[j] for j in dg.edges[i]] for i in range(dg.n)}
    report["components"] = [
        {"members": [names[v] for v in comp], "nontrivial": dg.nontrivial[c], "test": _ev(cl, c)}
        for c, comp in enumerate(dg.components)
    ]
    cross = growth_crosscheck(system, cl, args.order, _bound(args))
    report["crosscheck"] = cross.to_dict()
    if args.format == "csv":
        lines = ["class,verdict,rank,estimate,flag"]
        for cv, row in zip(cl.classes, cross.rows):
            est = "" if row.estimate is None else f"{row.estimate:.6f}"
            lines.append(f"{cv.name},{cv.verdict.label},{cv.rank},{est},{row.flag}")
        return "\n".join(lines)
    return _json(report)


def _ev(cl, c):
    ev = cl.components.get(c)
    return None if ev is None else {"passed": ev.passed, "rule": ev.rule}


def cmd_explicit(args) -> str:
    system = _load_system(args)
    form = to_explicit(system)
    if args.cls:
        body = class_expr_to_gexpr(system, system.resolve(args.cls))
        text = format_gexpr(form.expr_for(body))
        if args.format == "json":
            return _json({"system": system.name, "class": args.cls, "explicit": text})
        return text
    if args.format == "json":
        return _json(
            {
                "system": system.name,
                "bindings": {name: format_gexpr(value) for name, value in form.bindings},
                "empty": form.skipped,
            }
        )
    return "\n".join(f"{name} = {format_gexpr(value)}" for name, value in form.bindings)


def cmd_law(args) -> str:
    system = _load_system(args)
    if not args.cls:
        raise UsageError("law needs --class")
    order = args.order
    if order is None:
        order = args.window[1] if args.window else 4000
    _check(order, args)
    if args.window and args.window[1] > order:
        raise UsageError("window end exceeds --order")
    if args.window:
        cl = classify_radius(system)
        forests = forest_series(system, args.cls, order, _bound(args))
        rep = ratio_test(forests, args.window)
        structural = cl.expr_verdict(system.resolve(args.cls))
        radius_one = structural is Verdict.RADIUS_ONE or (structural is Verdict.FINITE and not forests.is_zero())
        agree = radius_one == (rep.verdict.value == "CONVERGES_TO_ONE")
        report = {
            "tree_class": args.cls,
            "structural": structural.label,
            "order": order,
            "verdict": rep.verdict.value,
            "coherence": "AGREE" if agree else "CONFLICT",
            "ratio_test": rep.to_dict(),
        }
    else:
        report = check_main_theorem(
            system, args.cls, order, max_order=_bound(args), escalate=args.order is None
        ).to_dict()
    if args.format == "csv":
        rows = ["n,ratio,approx"] + [
            f"{r['n']},{r['exact']},{r['approx']}" for r in (report["ratio_test"] or {}).get("ratios", [])
        ]
        return "\n".join(rows)
    return _json(report)


def cmd_enumerate(args) -> str:
    n = args.size
    if args.system:
        system = _load_system(args)
        if not args.cls:
            raise UsageError("enumerate with --system needs --class")
        expr = system.resolve(args.cls)
        member = _Membership(system)
        if system.kind(expr) == "tree":
            items = [t.encoding for t in (enumerate_trees(n, args.max_size) if n >= 1 else []) if member.tree_in(expr, t)]
        else:
            items = [str(f) for f in enumerate_forests(n, args.max_size) if member.forest_in(expr, f.trees)]
        assert len(items) == count_by_enumeration(system, expr, n, args.max_size)
    else:
        if n < 1:
            raise UsageError("tree size must be >= 1")
        items = [t.encoding for t in enumerate_trees(n, args.max_size)]
    if args.format == "csv":
        return "\n".join(["index,item"] + [f"{i},{s}" for i, s in enumerate(items)])
    return _json({"size": n, "class": args.cls, "count": len(items), "items": items})


def _gexpr_out(args) -> str:
    system = _load_system(args) if args.system else None
    expr = parse_gexpr(args.expr, system.classes if system else ())
    env = {}
    if free_names(expr):
        env = evaluate_system(system, args.order, _bound(args))
    series = evaluate_gexpr(expr, args.order, env, _bound(args))
    return _series_out(series, args.format, 1, {"expr": format_gexpr(expr)})


def cmd_gfun(args) -> str:
    _check(args.order, args)
    return _gexpr_out(args)


def cmd_factor(args) -> str:
    m = parse_module(args.module)
    parts = factor_module(m)
    if args.format == "csv":
        return "\n".join(["index,module,size"] + [f"{i},{p},{p.size}" for i, p in enumerate(parts)])
    return _json(
        {
            "module": str(m),
            "size": m.size,
            "factors": [{"module": str(p), "size": p.size} for p in parts],
        }
    )


COMMANDS = {
    "eval": cmd_eval,
    "classify": cmd_classify,
    "explicit": cmd_explicit,
    "law": cmd_law,
    "enumerate": cmd_enumerate,
    "gfun": cmd_gfun,
    "factor": cmd_factor,
}


def _error_payload(err: Exception) -> dict:
    if isinstance(err, ForestlabError):
        payload = {"error": err.kind, "message": str(err)}
        if isinstance(err, ParseError) and err.line is not None:
            payload.update(line=err.line, column=err.column)
        return payload
    if isinstance(err, OSError):
        return {"error": "IOError", "message": f"{err.strerror}: {err.filename}"}
    return {"error": type(err).__name__, "message": str(err)}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "max_order", None) is None:
            max_order_from_env()  # reject a malformed environment bound early
        out = COMMANDS[args.command](args)
    except UsageError as err:
        parser.print_usage(stderr)
        print(f"forestlab: error: {err}", file=stderr)
        return 2
    except (ForestlabError, OSError, ValueError, KeyError) as err:
        print(json.dumps(_error_payload(err)), file=stderr)
        return 1
    print(out, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
