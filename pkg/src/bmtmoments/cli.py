"""Command-line front end. Every subcommand calls the same handler the
HTTP service uses; this module only parses flags and formats output.

Exit codes: 0 success, 1 invalid input, 2 refused by a size or budget cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .errors import CapExceeded, InputError
from .kernel import parse_word
from .service import handlers
from .service.schemas import GraphInput


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract wants 1
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _parse_int_list(text: str) -> list[int]:
    """Accepts '2,4,6' and range items like '1..4' (mixable)."""
    out: list[int] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise InputError(f"empty item in list {text!r}")
        try:
            if ".." in item:
                lo, hi = item.split("..", 1)
                lo_i, hi_i = int(lo), int(hi)
                if hi_i < lo_i:
                    raise ValueError("empty range")
                out.extend(range(lo_i, hi_i + 1))
            else:
                out.append(int(item))
        except ValueError as exc:
            raise InputError(f"bad integer list {text!r}: {exc}") from None
    return out


def _graph_input(value: str, n: int | None) -> GraphInput:
    if os.path.isfile(value):
        with open(value, "r", encoding="utf-8") as fh:
            return GraphInput(text=fh.read())
    return GraphInput(family=value, N=n)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _rat_text(cell, decimal: bool) -> str:
    return "" if cell is None else cell.text(decimal)


def _table_text(rows, fmt: str, decimal: bool) -> str:
    header = ["N", "m", "exact", "leading", "reference", "gap_leading", "gap_reference"]
    lines = [",".join(header)]
    for r in rows:
        lines.append(
            ",".join(
                [
                    str(r.N),
                    str(r.m),
                    _rat_text(r.exact, decimal),
                    _rat_text(r.leading, decimal),
                    _rat_text(r.reference, decimal),
                    _rat_text(r.gap_leading, decimal),
                    _rat_text(r.gap_reference, decimal),
                ]
            )
        )
    return "\n".join(lines)


def _json_text(model) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bmt", description="Graph-encoded independence: kernels, moments, limit tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="kernel of a word relative to a graph")
    p.add_argument("--word", required=True, help="comma-separated letters, e.g. 4,1,3,4,1,4")
    p.add_argument("--graph", required=True, help="family spec like complete:5, or a graph file")
    p.add_argument("--N", type=int, default=None, help="size for family specs using the N placeholder")

    p = sub.add_parser("moment", help="exact mixed moment of a word")
    p.add_argument("--graph", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--marginal", default="bernoulli", choices=["bernoulli", "poisson"])
    p.add_argument("--lam", default=None, help="rate for the poisson marginal (rational, default 1)")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--decimal", action="store_true")

    p = sub.add_parser("law", help="moments of a reference law")
    p.add_argument("--name", required=True)
    p.add_argument("--upto", type=int, default=10)
    p.add_argument("--lam", default=None)
    p.add_argument("--decimal", action="store_true")

    p = sub.add_parser("operator-verify", help="operator model vs combinatorial engine")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--N", type=int, default=None)

    p = sub.add_parser("clt", help="central-limit table for a graph family")
    p.add_argument("--family", required=True, help="e.g. empty:N, complete:N, turan:N,3")
    p.add_argument("--N", required=True, help="sizes, e.g. 4,8,16")
    p.add_argument("--moments", required=True, help="orders, e.g. 2,4,6 or 2..6")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)
    p.add_argument("--decimal", action="store_true")

    p = sub.add_parser("poisson", help="Poisson-limit table for a graph family")
    p.add_argument("--family", required=True)
    p.add_argument("--lambda", dest="lam", default="1", help="rational rate, e.g. 1 or 3/2")
    p.add_argument("--N", required=True)
    p.add_argument("--moments", required=True, help="orders, e.g. 1..4")
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--out", default=None)
    p.add_argument("--decimal", action="store_true")

    p = sub.add_parser("graph-gen", help="print a family graph in text form")
    p.add_argument("spec", help="family spec, e.g. counterexample:3")
    p.add_argument("--N", type=int, default=None)

    sub.add_parser("selftest", help="run the built-in invariant suite")

    return parser


def run(argv: Sequence[str]) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "kernel":
        rep = handlers.kernel_report(list(parse_word(args.word)), _graph_input(args.graph, args.N))
        print(f"word: {','.join(str(x) for x in rep.word)}")
        print(f"ker: {rep.ker}")
        print(f"ker_G: {rep.ker_g}")
        print(f"equal: {str(rep.equal).lower()}")
        print(f"ncg_subgraph: {str(rep.ncg_subgraph).lower()}")
        print(f"ncg_edges: {' '.join(f'({u},{v})' for u, v in rep.ncg_edges)}")
        return 0

    if args.command == "moment":
        rep = handlers.moment_report(
            list(parse_word(args.word)), _graph_input(args.graph, args.N), args.marginal, args.lam
        )
        print(f"moment: {rep.moment.text(args.decimal)}")
        print(f"kernel: {rep.kernel}")
        print(f"marginal: {rep.marginal}")
        return 0

    if args.command == "law":
        rep = handlers.law_table(args.name, args.upto, args.lam)
        print(f"law: {rep.law}")
        for entry in rep.moments:
            print(f"{entry.k}: {entry.value.text(args.decimal)}")
        return 0

    if args.command == "operator-verify":
        rep = handlers.operator_verify_report(_graph_input(args.graph, args.N), args.max_len, args.seed)
        print(f"cases: {rep.cases}")
        print(f"max_deviation: {rep.max_deviation:.3e}")
        print(f"tolerance: {rep.tolerance:.1e}")
        print(f"ok: {str(rep.ok).lower()}")
        for line in rep.violations:
            print(line)
        return 0

    if args.command == "clt":
        rep = handlers.clt_payload(args.family, _parse_int_list(args.N), _parse_int_list(args.moments))
        text = _json_text(rep) if args.format == "json" else _table_text(rep.rows, "csv", args.decimal)
        _emit(text, args.out)
        return 0

    if args.command == "poisson":
        rep = handlers.poisson_payload(
            args.family, args.lam, _parse_int_list(args.N), _parse_int_list(args.moments)
        )
        text = _json_text(rep) if args.format == "json" else _table_text(rep.rows, "csv", args.decimal)
        _emit(text, args.out)
        return 0

    if args.command == "graph-gen":
        rep = handlers.graph_gen_text(args.spec, args.N)
        sys.stdout.write(rep.text)
        return 0

    if args.command == "selftest":
        rep = handlers.selftest_report()
        for check in rep.checks:
            mark = "ok  " if check.ok else "FAIL"
            print(f"{mark} {check.name}: {check.detail}")
        print(f"{'all checks passed' if rep.ok else 'FAILURES PRESENT'}")
        return 0 if rep.ok else 1

    raise InputError(f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else list(argv))
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
