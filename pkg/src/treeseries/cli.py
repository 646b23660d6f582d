"""Command-line interface.

Exit status: 0 success or "true", 1 "false" (not equivalent, no simulation),
2 usage, parse or input errors, 3 internal invariant violations.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from . import descriptions as desc
from .document import Document, ParseError, format_document, parse_document, parse_tree
from .semiring import SemiringError, parse_semiring
from .series import DEFAULT_MAX_HEIGHT, behavior, equiv_up_to, solve
from .simulation import SimMatrix, check_simulation, find_simulations, DEFAULT_BUDGET
from .terms import TermError, height

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _emit(doc: Document, name: str, d: desc.Description, out) -> int:
    result = Document(doc.semiring, d.alphabet, {name: d})
    out.write(format_document(result))
    return EXIT_OK


def cmd_flatten(args, doc, out):
    return _emit(doc, args.name or args.desc, desc.flatten(doc[args.desc]), out)


def cmd_normalize_initial(args, doc, out):
    return _emit(doc, args.name or args.desc, desc.normalize_initial(doc[args.desc]), out)


def cmd_coeff(args, doc, out):
    d = doc[args.desc]
    tree = parse_tree(args.tree, doc.semiring, doc.alphabet)
    s = behavior(d, height(tree), max_height=args.max_height)
    out.write(doc.semiring.format(s.coeff(tree)) + "\n")
    return EXIT_OK


def cmd_enumerate(args, doc, out):
    s = behavior(doc[args.desc], args.height, max_height=args.max_height)
    out.write(s.dump(doc.alphabet))
    return EXIT_OK


def cmd_equiv(args, doc, out):
    res = equiv_up_to(doc[args.a], doc[args.b], args.height, max_height=args.max_height)
    if res.equivalent:
        out.write(f"equivalent up to height {args.height}\n")
        return EXIT_OK
    fmt = doc.semiring.format
    out.write(f"not equivalent: {res.witness}\t{fmt(res.left)}\t{fmt(res.right)}\n")
    return EXIT_FALSE


def cmd_check_sim(args, doc, out):
    M = SimMatrix.parse(Path(args.matrix).read_text(encoding="utf-8"), doc.semiring)
    if check_simulation(doc[args.a], doc[args.b], M):
        out.write("simulation\n")
        return EXIT_OK
    out.write("not a simulation\n")
    return EXIT_FALSE


def cmd_find_sim(args, doc, out):
    universe = None
    if args.universe:
        universe = [doc.semiring.parse(u) for u in args.universe]
    found = find_simulations(doc[args.a], doc[args.b], universe, budget=args.budget)
    out.write("\n".join(M.format() for M in found))
    return EXIT_OK if found else EXIT_FALSE


def cmd_combine(args, doc, out):
    op, rest = args.op, args.operands
    if op == "sum":
        if not rest:
            raise UsageError("combine sum needs at least one description")
        result = doc[rest[0]]
        for name in rest[1:]:
            result = desc.desc_sum(result, doc[name])
    elif op == "scale":
        if len(rest) != 2:
            raise UsageError("usage: combine scale <k> <desc>")
        result = desc.desc_scale(doc.semiring.parse(rest[0]), doc[rest[1]])
    elif op == "sigma":
        if not rest:
            raise UsageError("usage: combine sigma <symbol> <desc>...")
        result = desc.desc_sigma(rest[0], *(doc[n] for n in rest[1:]),
                                 semiring=doc.semiring, alphabet=doc.alphabet)
    else:
        raise UsageError(f"unknown combinator {op!r}; use sum, scale or sigma")
    return _emit(doc, args.name or "result", result, out)


def cmd_subst(args, doc, out):
    bind = {}
    for item in args.bind:
        param, sep, name = item.partition("=")
        if not sep:
            raise UsageError(f"--bind expects a=<desc>, got {item!r}")
        bind[param] = doc[name]
    return _emit(doc, args.name or args.desc, desc.desc_substitute(doc[args.desc], bind), out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="treeseries",
        description="Guarded equation systems, rational tree series and weighted tree automata.")
    p.add_argument("-d", "--doc", required=True, help="description document ('-' for stdin)")
    p.add_argument("--semiring", help="must match the document header if given")
    p.add_argument("--max-height", type=int, default=DEFAULT_MAX_HEIGHT,
                   help=f"largest tree height the solver accepts (default {DEFAULT_MAX_HEIGHT})")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("flatten", help="print an equivalent flat description")
    s.add_argument("desc")
    s.add_argument("--name")
    s.set_defaults(func=cmd_flatten)

    s = sub.add_parser("normalize-initial", help="rewrite to final weights (1, 0, ..., 0)")
    s.add_argument("desc")
    s.add_argument("--name")
    s.set_defaults(func=cmd_normalize_initial)

    s = sub.add_parser("coeff", help="coefficient of one tree in the behavior")
    s.add_argument("desc")
    s.add_argument("tree")
    s.set_defaults(func=cmd_coeff)

    s = sub.add_parser("enumerate", help="dump the behavior up to a height")
    s.add_argument("desc")
    s.add_argument("--height", type=int, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("equiv", help="compare behaviors up to a height")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--height", type=int, required=True)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("check-sim", help="check a simulation matrix A -> B")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_check_sim)

    s = sub.add_parser("find-sim", help="search simulations A -> B over a finite universe")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--universe", nargs="+")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_find_sim)

    s = sub.add_parser("combine", help="sum, scale k or sigma <symbol> of descriptions")
    s.add_argument("op", choices=["sum", "scale", "sigma"])
    s.add_argument("operands", nargs="*")
    s.add_argument("--name")
    s.set_defaults(func=cmd_combine)

    s = sub.add_parser("subst", help="substitute descriptions for parameters")
    s.add_argument("desc")
    s.add_argument("--bind", action="append", default=[], metavar="a=DESC")
    s.add_argument("--name")
    s.set_defaults(func=cmd_subst)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        text = sys.stdin.read() if args.doc == "-" else Path(args.doc).read_text(encoding="utf-8")
        override = parse_semiring(args.semiring) if args.semiring else None
        doc = parse_document(text, override)
        return args.func(args, doc, stdout)
    except (ParseError, UsageError, SemiringError, TermError, desc.DescriptionError,
            ValueError, OSError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        stderr.write(f"internal error: {type(e).__name__}: {e}\n")
        return EXIT_INTERNAL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
