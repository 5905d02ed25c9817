"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure,
3 computation budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from .cache import resolve_cache_dir
from .classexpr import ClassExprError, context_for_group, parse_class_expr
from .groups import (
    FiniteGroup,
    conjugation_orbits,
    direct_product,
    make_cyclic,
    make_klein_four,
    make_quaternion,
)
from .tc import BudgetExceeded, CrossCheckFailure, TCEngine, VerificationFailure
from .workspace import Workspace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_BUDGET = 3

CONFIG_FILE = "cohomtc.cfg"


class UsageError(ValueError):
    pass


def load_config(path=CONFIG_FILE):
    cfg = {}
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                k, v = line.split("=", 1)
                cfg[k.strip()] = v.strip()
    return cfg


def parse_group_token(token: str) -> FiniteGroup:
    token = token.strip()
    m = re.fullmatch(r"C(\d+)", token)
    if m:
        return make_cyclic(int(m.group(1)))
    m = re.fullmatch(r"Q(\d+)", token)
    if m:
        order = int(m.group(1))
        if order % 8 != 0 or order == 0:
            raise UsageError(f"quaternion order must be a multiple of 8: {token}")
        return make_quaternion(order // 8)
    if token == "V4":
        return make_klein_four()
    # binary product <A>x<B>: try each split point
    for k in range(1, len(token)):
        if token[k] != "x":
            continue
        try:
            left = parse_group_token(token[:k])
            right = parse_group_token(token[k + 1:])
        except UsageError:
            continue
        return direct_product(left, right, name=f"{left.name}x{right.name}")
    raise UsageError(f"unknown group token {token!r}")


def load_group_file(path: str) -> FiniteGroup:
    with open(path) as fh:
        data = json.load(fh)
    mul = np.array(data["mul"], dtype=np.int32)
    gens = [(str(n), int(e)) for n, e in data["generators"]]
    names = [str(n) for n in data.get(
        "names", [f"g{i}" for i in range(mul.shape[0])])]
    G = FiniteGroup(str(data.get("name", "G")), mul, gens, names)
    G.validate()
    return G


def _resolve_group(args) -> FiniteGroup:
    if getattr(args, "group_file", None):
        return load_group_file(args.group_file)
    if getattr(args, "group", None):
        return parse_group_token(args.group)
    raise UsageError("a group is required (--group or --group-file)")


def _emit(args, text_fn, record):
    body = (json.dumps(record, indent=2, sort_keys=True)
            if args.format == "json" else text_fn())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)


# -- subcommands --------------------------------------------------------


def cmd_group(args, ws):
    G = _resolve_group(args)
    orbits = conjugation_orbits(G, 1)
    record = {
        "name": G.name,
        "order": G.order,
        "generators": {n: G.element_names[e] for n, e in G.generators},
        "conjugacy_classes": len(orbits) + 1,
        "abelian": all(G.op(a, b) == G.op(b, a)
                       for _, a in G.generators for _, b in G.generators),
    }

    def text():
        lines = [
            f"group              {record['name']}",
            f"order              {record['order']}",
            f"abelian            {str(record['abelian']).lower()}",
            f"conjugacy classes  {record['conjugacy_classes']}",
            "generators",
        ]
        for n, e in record["generators"].items():
            lines.append(f"  {n:<4} {e}")
        return "\n".join(lines)

    _emit(args, text, record)
    return EXIT_OK


def cmd_cohomology(args, ws):
    G = _resolve_group(args)
    top = args.max_degree
    dims = ws.betti(G, top)
    record = {"group": G.name, "prime": ws.p, "dims": dims}

    def text():
        lines = [f"H^*({G.name}; F{ws.p}) graded dimensions", "degree  dim"]
        for r, d in enumerate(dims):
            lines.append(f"{r:>6}  {d}")
        lines.append("row     " + " ".join(str(d) for d in dims))
        return "\n".join(lines)

    _emit(args, text, record)
    return EXIT_OK


def cmd_orbits(args, ws):
    G = _resolve_group(args)
    from .groups import centralizer

    orbits = conjugation_orbits(G, args.arity)
    record = {
        "group": G.name,
        "arity": args.arity,
        "orbits": [
            {
                "representative": [G.element_names[e] for e in rep],
                "size": len(orbit),
                "centralizer_order": len(centralizer(G, rep)),
            }
            for rep, orbit in orbits
        ],
    }

    def text():
        lines = [
            f"conjugation orbits of {args.arity}-tuples over "
            f"{G.name} (no identity entries)",
            f"{'representative':<24} {'size':>5} {'|centralizer|':>14}",
        ]
        for o in record["orbits"]:
            rep = "(" + ", ".join(o["representative"]) + ")"
            lines.append(
                f"{rep:<24} {o['size']:>5} {o['centralizer_order']:>14}")
        lines.append(f"total orbits: {len(record['orbits'])}")
        return "\n".join(lines)

    _emit(args, text, record)
    return EXIT_OK


def cmd_e1(args, ws):
    G = _resolve_group(args)
    engine = TCEngine(ws)
    page = engine.e1_page(G, args.r, args.s)
    blocks = [
        {
            "representative": [G.element_names[e] for e in rep],
            "dim": page.blocks[k].dim,
        }
        for k, (rep, _) in enumerate(page.orbits)
    ]
    record = {
        "group": G.name,
        "r": args.r,
        "s": args.s,
        "blocks": blocks,
        "total_dim": sum(b["dim"] for b in blocks),
        "ext_dim_cross_check": page.Hbig.dim,
    }

    def text():
        lines = [
            f"E1 page of {G.name}: r = {args.r}, s = {args.s}",
            f"{'orbit representative':<24} {'dim':>4}",
        ]
        for b in blocks:
            rep = "(" + ", ".join(b["representative"]) + ")"
            lines.append(f"{rep:<24} {b['dim']:>4}")
        lines.append(f"total dim     {record['total_dim']}")
        lines.append(f"ext dim check {record['ext_dim_cross_check']}")
        return "\n".join(lines)

    _emit(args, text, record)
    return EXIT_OK


def cmd_weight(args, ws):
    G = _resolve_group(args)
    engine = TCEngine(ws)
    if not args.class_expr:
        raise UsageError("--class-expr is required")
    node = parse_class_expr(args.class_expr)
    ctx = context_for_group(ws, G)
    degree, z = ctx.evaluate(node)
    n_max = args.max_n if args.max_n is not None else degree
    certs = []
    if args.method in ("direct", "both"):
        certs.append(engine.d_degree_direct(z, n_max,
                                            class_expr=args.class_expr))
    if args.method in ("bockstein", "both"):
        certs.append(engine.d_degree_bockstein(z, n_max,
                                               class_expr=args.class_expr))
    if args.method == "both" and certs[0].certified_n != certs[1].certified_n:
        raise CrossCheckFailure(
            f"direct ({certs[0].certified_n}) and bockstein "
            f"({certs[1].certified_n}) disagree")
    record = {
        "group": G.name,
        "class_expr": args.class_expr,
        "degree": degree,
        "certificates": [c.to_record() for c in certs],
        "methods_agree": (len({c.certified_n for c in certs}) == 1),
    }

    def text():
        lines = [
            f"class        {args.class_expr}",
            f"group square {z.parent.group.name}",
            f"degree       {degree}",
        ]
        for c in certs:
            lines.append(
                f"certificate  method {c.method:<10} certified_n "
                f"{c.certified_n}  checks "
                + ",".join(f"{n}={'ok' if ok else 'FAIL'}"
                           for n, ok in c.checks))
        return "\n".join(lines)

    _emit(args, text, record)
    return EXIT_OK


def cmd_tc(args, ws):
    from .spaces import tc_bounds_report

    engine = TCEngine(ws)
    report = tc_bounds_report(engine, args.m)
    _emit(args, report.render_text, report.to_record())
    return EXIT_OK


def cmd_selftest(args, ws):
    from .selftest import run_selftest

    lines = []

    def sink(msg):
        lines.append(msg)
        if not args.out:
            print(msg)

    failures = run_selftest(out=sink)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK if failures == 0 else EXIT_VERIFICATION


# -- argument parsing ---------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="cohomtc",
                description="Mod-p cohomology of finite groups and "
                            "topological-complexity certificates")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("--group")
            sp.add_argument("--group-file")
        sp.add_argument("--prime", type=int, default=2)
        sp.add_argument("--cache-dir")
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("group", help="group facts")
    common(sp)
    sp.set_defaults(fn=cmd_group)

    sp = sub.add_parser("cohomology", help="graded dimensions")
    common(sp)
    sp.add_argument("--max-degree", type=int, default=7)
    sp.set_defaults(fn=cmd_cohomology)

    sp = sub.add_parser("orbits", help="conjugation orbits of tuples")
    common(sp)
    sp.add_argument("--arity", type=int, default=1)
    sp.set_defaults(fn=cmd_orbits)

    sp = sub.add_parser("e1", help="E1 page block decomposition")
    common(sp)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.set_defaults(fn=cmd_e1)

    sp = sub.add_parser("weight", help="filtration-degree certificate")
    common(sp)
    sp.add_argument("--class-expr")
    sp.add_argument("--max-n", type=int, default=None)
    sp.add_argument("--method", choices=("direct", "bockstein", "both"),
                    default="both")
    sp.set_defaults(fn=cmd_weight)

    sp = sub.add_parser("tc", help="TC bound report for S^3/Q_{8m}")
    common(sp, group=False)
    sp.add_argument("--m", type=int, required=True)
    sp.set_defaults(fn=cmd_tc)

    sp = sub.add_parser("selftest", help="run the invariant suite")
    common(sp, group=False)
    sp.set_defaults(fn=cmd_selftest)

    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    cfg = load_config()
    try:
        args = build_parser().parse_args(argv)
        if args.prime != 2:
            raise UsageError("only prime 2 is supported")
        cache_dir = resolve_cache_dir(args.cache_dir, cfg)
        if args.format == "text" and cfg.get("format") == "json" and \
                "--format" not in argv:
            args.format = "json"
        ws = Workspace(p=args.prime, cache_dir=cache_dir)
        return args.fn(args, ws)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ClassExprError as exc:
        print(f"class expression error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CrossCheckFailure, VerificationFailure) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
