"""Command line: check files, print definitions, report builtin sizes."""

import argparse
import os
import sys

from .. import errors, geometry
from ..kernel import check_term, reset_session
from .elab import CheckResult, Session
from .printer import Printer, print_context, print_definition, size
from .syntax import Builtin, parse, parse_term

SIZE_KINDS = {
    "cyl": ("cylcomp", lambda n: (n, 1, n)),
    "cylcomp": ("cylcomp", lambda n: (n, 1, n)),
    "stack": ("cylstack", lambda n: (n,)),
    "cylstack": ("cylstack", lambda n: (n,)),
    "cone": ("conecomp", lambda n: (n, 1, n)),
    "conecomp": ("conecomp", lambda n: (n, 1, n)),
}


def check_file(path):
    """Parse and elaborate one file in a fresh session."""
    reset_session()
    if not os.path.isfile(path):
        raise errors.FileNotFound(f"no such file: {path}", path=path)
    return Session().run(parse(path))


def parse_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo = int(lo)
        hi = int(hi) if sep else lo
    except ValueError:
        raise errors.SyntaxError(f"bad range {text!r}", expected="N or N..M") from None
    if lo > hi:
        raise errors.SyntaxError(f"empty range {text!r}", expected="N..M with N <= M")
    return range(lo, hi + 1)


def size_table(kind, rng):
    """Rows ``(label, n, bytes)`` for a builtin family."""
    if kind not in SIZE_KINDS:
        raise errors.UnknownName(f"unknown size family {kind!r}", name=kind)
    name, idx = SIZE_KINDS[kind]
    rows = []
    for n in rng:
        reset_session()
        g = geometry.generic(name, *idx(n))
        label = f"{name}({','.join(map(str, idx(n)))})"
        rows.append((label, n, size(g.term)))
    return rows


def format_definition(d):
    return print_definition(d.kind, d.name, d.ctx, d.ty, None if d.kind == "coh" else d.term)


def format_check(c, printer=None):
    p = printer or Printer()
    tele, names = print_context(c.ctx, p)
    memo = {}
    prefix = "check " + (tele + " " if tele else "")
    return f"{prefix}: {p.type(c.ty, names, memo)} = {p.term(c.term, names, memo)}"


def _report(exc, out):
    where = f"{exc.span}: " if getattr(exc, "span", None) is not None else ""
    print(f"error[{exc.code}] {where}{exc}", file=out)


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = argparse.ArgumentParser(prog="catt", description="Type-check .catt files.")
    ap.add_argument("files", nargs="*", help="files to check")
    ap.add_argument("--print", dest="print_name", metavar="NAME",
                    help="print a definition of the last file, or a builtin like cylcomp(2,1,2)")
    ap.add_argument("--sizes", nargs=2, metavar=("KIND", "RANGE"),
                    help="size table for cyl, stack or cone over a range such as 2..4")
    ap.add_argument("--quiet", action="store_true", help="do not echo check statements")
    args = ap.parse_args(argv)
    files = list(args.files)
    if files and files[0] == "check" and not os.path.exists("check"):
        files = files[1:]
    try:
        session = None
        for path in files:
            session = check_file(path)
            if not args.quiet:
                p = Printer()
                for c in session.checks:
                    print(format_check(c, p), file=stdout)
            print(f"{path}: success ({len(session.order)} definitions, "
                  f"{len(session.checks)} checks)", file=stdout)
        if args.print_name:
            print(_print_named(args.print_name, session), file=stdout)
        if args.sizes:
            kind, text = args.sizes
            for label, _, nbytes in size_table(kind, parse_range(text)):
                print(f"{label:<20} {nbytes:>12}", file=stdout)
        if not files and not args.print_name and not args.sizes:
            ap.print_usage(stderr)
            return 1
    except errors.CattError as exc:
        _report(exc, stderr)
        return 1 if exc.user_error else 2
    except RecursionError:
        print("error[InternalError] recursion limit exceeded", file=stderr)
        return 2
    return 0


def _print_named(name, session):
    if session is not None and name in session.defs:
        return format_definition(session.defs[name])
    node = parse_term(name, "<print>")
    if not isinstance(node, Builtin):
        raise errors.UnknownName(f"no definition named {name}", name=name)
    ref = Session()._builtin(node)
    return format_check(CheckResult(ref.ctx, ref.term, check_term(ref.ctx, ref.term)))


if __name__ == "__main__":
    sys.exit(main())
