"""Command line interface.

Exit codes: 0 affirmative, 10 certified negative (infeasible, not magic,
refuted), 20 inconclusive or budget exhausted, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import algebra, catalog, degrees, families, milp, search
from .graph import Graph, complement, regularity
from .labeling import (
    Labeling,
    certificate_dict,
    complement_transport,
    labeled_cartesian,
    labeled_strong,
    read_certificate,
    verify_xor_magic,
    write_certificate,
    build_power_n_graph,
)

OK, NEGATIVE, INCONCLUSIVE, USAGE = 0, 10, 20, 2


class UsageError(ValueError):
    pass


# -- expressions ---------------------------------------------------------------
#
#   expr  := name "(" expr ("," expr)* ")" | leaf
#   leaf  := circulant:m:s1,s2,... | hypercube:n | mobius:n | andrasfai:r
#          | doob:r:t | powercycle:m:r | copowercycle:m:r | catalog:id
#          | cert:path | power:n:parity
#
# Commas inside a circulant connection set are told apart from argument
# separators by lookahead: a comma followed by a digit continues the set.

_TOKEN = re.compile(r"\s*([A-Za-z][\w-]*:[^(),]*(?:,\d[^(),]*)*|[A-Za-z]\w*|\(|\)|,)")


def _tokens(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise UsageError(f"cannot parse expression at {text[pos:]!r}")
        out.append(m.group(1).strip())
        pos = m.end()
    return out


def parse_expr(text: str):
    """Parse into nested tuples ``(op, args)`` with string leaves."""
    toks = _tokens(text)
    pos = 0

    def expr():
        nonlocal pos
        if pos >= len(toks):
            raise UsageError("unexpected end of expression")
        tok = toks[pos]
        pos += 1
        if ":" in tok:
            return tok
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args = [expr()]
            while pos < len(toks) and toks[pos] == ",":
                pos += 1
                args.append(expr())
            if pos >= len(toks) or toks[pos] != ")":
                raise UsageError(f"missing ')' after arguments of {tok}")
            pos += 1
            return (tok, args)
        raise UsageError(f"unknown leaf {tok!r}")

    tree = expr()
    if pos != len(toks):
        raise UsageError(f"trailing input in expression: {' '.join(toks[pos:])}")
    return tree


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected integers, got {text!r}") from None


def _leaf_graph(leaf: str) -> Graph:
    kind, _, rest = leaf.partition(":")
    args = rest.split(":")
    try:
        if kind == "circulant":
            return families.circulant(int(args[0]), _ints(args[1]))
        if kind == "hypercube":
            return families.hypercube(int(args[0]))
        if kind == "mobius":
            return families.mobius_ladder(int(args[0]))
        if kind == "andrasfai":
            return families.andrasfai(int(args[0]))
        if kind == "doob":
            return families.doob(int(args[0]), int(args[1]))
        if kind == "powercycle":
            return families.power_of_cycle(int(args[0]), int(args[1]))
        if kind == "copowercycle":
            return families.complement_power_of_cycle(int(args[0]), int(args[1]))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad family {leaf!r}: {exc}") from None
    return _leaf_labeled(leaf)[0]


def _leaf_labeled(leaf: str):
    kind, _, rest = leaf.partition(":")
    if kind == "catalog":
        e = catalog.catalog_load(rest)
        return e.graph, e.labeling, e.mode
    if kind == "cert":
        return read_certificate(rest)
    if kind == "power":
        n, _, parity = rest.partition(":")
        g, lab = build_power_n_graph(int(n), parity)
        return g, lab, "open" if parity == "open-odd" else "closed"
    raise UsageError(f"{leaf!r} is not a labeled graph")


def eval_graph(tree) -> Graph:
    if isinstance(tree, str):
        return _leaf_graph(tree)
    op, args = tree
    if op == "complement" and len(args) == 1:
        return complement(eval_graph(args[0]))
    if op in ("cartesian", "strong") and len(args) == 2:
        prod = families.cartesian_product if op == "cartesian" else families.strong_product
        return prod(eval_graph(args[0]), eval_graph(args[1]))
    raise UsageError(f"bad use of {op} with {len(args)} argument(s)")


_CART_MODE = {("open", "closed"): "open", ("closed", "open"): "open",
              ("closed", "closed"): "closed", ("open", "open"): "closed"}


def eval_labeled(tree):
    """Evaluate to ``(graph, labeling, mode)`` following the product rules."""
    if isinstance(tree, str):
        return _leaf_labeled(tree)
    op, args = tree
    if op == "complement" and len(args) == 1:
        g, lab, mode = eval_labeled(args[0])
        g2, lab2 = complement_transport(g, lab)
        return g2, lab2, "closed" if mode == "open" else "open"
    if op in ("cartesian", "strong") and len(args) == 2:
        g, lg, mg = eval_labeled(args[0])
        h, lh, mh = eval_labeled(args[1])
        if op == "cartesian":
            return (*labeled_cartesian(g, lg, h, lh), _CART_MODE[(mg, mh)])
        if (mg, mh) != ("closed", "closed"):
            raise UsageError("strong product is defined here for two closed factors only")
        return (*labeled_strong(g, lg, h, lh), "closed")
    raise UsageError(f"bad use of {op} with {len(args)} argument(s)")


# -- commands ------------------------------------------------------------------


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_verify(args) -> int:
    if args.cert:
        g, lab, mode = read_certificate(args.cert)
    elif args.expr:
        g, lab, mode = eval_labeled(parse_expr(args.expr))
    else:
        if not (args.graph and args.labeling):
            raise UsageError("give --cert, --expr, or both --graph and --labeling")
        g = Graph.from_json(Path(args.graph).read_text())
        lab = Labeling.from_dict(json.loads(Path(args.labeling).read_text()))
        mode = None
    mode = args.mode or mode or "open"
    verdict = verify_xor_magic(g, lab, mode)
    payload = {"mode": mode, "order": g.order, "regularity": regularity(g),
               "status": verdict.status, "vertex": verdict.vertex}
    _emit(args, payload, f"{mode}: {verdict}")
    return OK if verdict else NEGATIVE


def cmd_search(args) -> int:
    problem = search.SearchProblem(
        args.n, args.d, args.mode, require_connected=args.connected,
        budget_secs=args.budget_secs, node_limit=args.node_limit, seed=args.seed,
        symmetry_breaking=not args.no_symmetry,
    )
    outcome = search.solve(problem, workers=args.workers)
    stats = outcome.stats
    payload = {"status": outcome.status, "n": args.n, "d": args.d, "mode": args.mode,
               "connected": outcome.connected, "nodes": stats.nodes,
               "time": round(stats.time, 3), "restarts": stats.restarts}
    if outcome.feasible:
        payload["edges"] = [list(e) for e in outcome.graph.edges()]
        if args.out:
            write_certificate(args.out, outcome.graph, problem.labeling, args.mode)
    text = f"{outcome.status} (nodes={stats.nodes}, time={stats.time:.2f}s, restarts={stats.restarts})"
    _emit(args, payload, text)
    return {search.FEASIBLE: OK, search.INFEASIBLE: NEGATIVE}.get(outcome.status, INCONCLUSIVE)


def cmd_export_milp(args) -> int:
    lab = None
    if args.labeling:
        lab = Labeling.from_dict(json.loads(Path(args.labeling).read_text()))
    try:
        model = milp.build_model(args.n, args.d, args.mode, args.variant, args.t, lab, args.literal)
    except milp.MilpError as exc:
        raise UsageError(str(exc)) from None
    text = milp.render_lp(model)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
        _emit(args, {"out": args.out, "census": model.census}, f"wrote {args.out} {model.census}")
    else:
        sys.stdout.write(text)
    return OK


def cmd_algebra(args) -> int:
    if args.expr:
        g = eval_graph(parse_expr(args.expr))
    elif args.graph:
        g = Graph.from_json(Path(args.graph).read_text())
    else:
        raise UsageError("give --expr or --graph")
    report = algebra.algebra_report(g)
    lines = [f"{k}: {v}" for k, v in report.items()]
    _emit(args, report, "\n".join(lines))
    return NEGATIVE if report["necessary_condition_open"] == "fail" else INCONCLUSIVE


def cmd_construct(args) -> int:
    if args.expr:
        g, lab, mode = eval_labeled(parse_expr(args.expr))
    elif args.n and args.parity:
        g, lab = build_power_n_graph(args.n, args.parity)
        mode = "open" if args.parity == "open-odd" else "closed"
    else:
        raise UsageError("give --expr, or --n with --parity")
    verdict = verify_xor_magic(g, lab, mode)
    if args.out:
        write_certificate(args.out, g, lab, mode)
    payload = {"order": g.order, "regularity": regularity(g), "mode": mode, "status": verdict.status}
    _emit(args, payload, f"order {g.order}, {regularity(g)}-regular, {mode}: {verdict}")
    return OK if verdict else NEGATIVE


def cmd_catalog(args) -> int:
    if args.action == "list":
        entries = catalog.catalog_list()
        payload = {"entries": [{"id": e.id, "mode": e.mode, "degree": e.degree,
                                "order": e.graph.order, "expected": e.expected,
                                "provenance": e.provenance} for e in entries]}
        text = "\n".join(f"{e.id:10} {e.mode:6} d={e.degree:<3} order={e.graph.order:<3} "
                         f"{e.expected}  {e.provenance}" for e in entries)
        _emit(args, payload, text)
        return OK
    if not args.out:
        raise UsageError("catalog export needs --out DIR")
    ids = catalog.catalog_ids() if args.id in (None, "all") else [args.id]
    paths = [str(catalog.catalog_export(i, args.out)) for i in ids]
    _emit(args, {"written": paths}, "\n".join(paths))
    return OK


def cmd_degrees(args) -> int:
    rules = {r.strip() for r in args.rules.split(",") if r.strip()}
    try:
        found = degrees.reachable_degrees(args.n, args.parity, rules)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"n": args.n, "parity": args.parity, "rules": sorted(rules), "degrees": list(found)}
    if args.trace:
        payload["traces"] = {str(d): t.to_dict() for d, t in found.items()}
        text = "\n".join(t.render() for t in found.values())
    else:
        text = " ".join(map(str, found))
    _emit(args, payload, text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xormagic", description="XOR-magic labelings over (Z_2)^n")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(func=func)
        return sp

    v = add("verify", cmd_verify, "check a labeling")
    v.add_argument("--cert")
    v.add_argument("--expr", help="labeled expression, e.g. cartesian(catalog:fig4-d5,catalog:fig5-d4)")
    v.add_argument("--graph")
    v.add_argument("--labeling")
    v.add_argument("--mode", choices=["open", "closed"])

    s = add("search", cmd_search, "exact existence search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--mode", choices=["open", "closed"], default="open")
    s.add_argument("--connected", action="store_true")
    s.add_argument("--budget-secs", type=float)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--no-symmetry", action="store_true")
    s.add_argument("--out")

    m = add("export-milp", cmd_export_milp, "write an LP model")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--d", type=int, required=True)
    m.add_argument("--mode", choices=["open", "closed"], default="open")
    m.add_argument("--variant", choices=["model1", "model2"], default="model1")
    m.add_argument("--t", type=int)
    m.add_argument("--literal", action="store_true")
    m.add_argument("--labeling")
    m.add_argument("--out")

    a = add("algebra", cmd_algebra, "determinant and Smith form tests")
    a.add_argument("--expr", help="e.g. complement(circulant:16:1)")
    a.add_argument("--graph")

    c = add("construct", cmd_construct, "build a labeled graph by products")
    c.add_argument("--expr")
    c.add_argument("--n", type=int)
    c.add_argument("--parity", choices=[degrees.OPEN, degrees.CLOSED])
    c.add_argument("--out")

    k = add("catalog", cmd_catalog, "list or export catalog fixtures")
    k.add_argument("action", choices=["list", "export"])
    k.add_argument("--id")
    k.add_argument("--out")

    g = add("degrees", cmd_degrees, "degrees reachable by constructions")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--parity", choices=[degrees.OPEN, degrees.CLOSED], required=True)
    g.add_argument("--rules", default="cartesian,strong,complement")
    g.add_argument("--trace", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    try:
        return args.func(args)
    except (UsageError, catalog.CatalogError, search.SearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
