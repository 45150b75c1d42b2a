"""Deterministic concrete syntax for contexts, types and terms.

Coherences are printed with their head inline (``comp(tele)`` for unbiased
composites, ``coh(tele : type)`` otherwise) applied to the explicit arguments
only, and every application is parenthesised, so the output re-parses to the
same head and, after inference of the implicit arguments, the same term.
"""

import re

from ..kernel import OBJ, Var
from .syntax import KEYWORDS

_IDENT = re.compile(r"[A-Za-z_](?:[A-Za-z0-9_'~+]|-(?!>))*\Z")


def safe_names(variables, taken=()):
    """Printable, pairwise distinct names for a list of variables."""
    return dict(zip(variables, _distinct([v.name for v in variables], taken)))


def _distinct(raw, taken=()):
    used = set(taken)
    out = []
    for i, name in enumerate(raw):
        if not _IDENT.match(name) or name in KEYWORDS or name in used:
            base = name if _IDENT.match(name) and name not in KEYWORDS else f"v{i}"
            k = 1
            while f"{base}_{k}" in used:
                k += 1
            name = f"{base}_{k}"
        used.add(name)
        out.append(name)
    return out


class Printer:
    def __init__(self):
        self._heads = {}

    def head(self, h):
        r = self._heads.get(h)
        if r is None:
            names = dict(zip(h.vars, _distinct(h.names)))
            tele = self.tele(h.ctx.entries, names)
            if h._unbiased:
                r = f"comp({tele})"
            else:
                r = f"coh({tele} : {self.type(h.ty, names, {})})"
            self._heads[h] = r
        return r

    def tele(self, entries, names):
        groups = []
        memo = {}
        for v, a in entries:
            ty = self.type(a, names, memo)
            if groups and groups[-1][1] == ty:
                groups[-1][0].append(names[v])
            else:
                groups.append(([names[v]], ty))
        return " ".join(f"({' '.join(ns)} : {ty})" for ns, ty in groups)

    def type(self, a, names, memo):
        if a is OBJ:
            return "*"
        return f"{self.term(a.src, names, memo)} -> {self.term(a.tgt, names, memo)}"

    def term(self, t, names, memo):
        if isinstance(t, Var):
            return names[t.var]
        r = memo.get(t)
        if r is None:
            h = t.head
            parts = [self.head(h)]
            for i in h.explicit:
                parts.append(self.term(t.args[i], names, memo))
            r = memo[t] = "(" + " ".join(parts) + ")"
        return r


def print_term(t, names=None, printer=None):
    p = printer or Printer()
    return p.term(t, names or _Names(), {})


def print_type(a, names=None, printer=None):
    p = printer or Printer()
    return p.type(a, names or _Names(), {})


def print_context(ctx, printer=None):
    p = printer or Printer()
    names = safe_names(ctx.vars)
    return p.tele(ctx.entries, names), names


class _Names(dict):
    def __missing__(self, v):
        return v.name


def print_definition(kind, name, ctx, ty, term=None, printer=None):
    """``coh NAME tele : type`` or ``let NAME tele : type = term``."""
    p = printer or Printer()
    tele, names = print_context(ctx, p)
    memo = {}
    head = f"{kind} {name}" + (f" {tele}" if tele else "")
    text = f"{head} : {p.type(ty, names, memo)}"
    if term is not None:
        text += f" = {p.term(term, names, memo)}"
    return text


def size(t, names=None):
    """Byte length of the printed term."""
    return len(print_term(t, names).encode("utf-8"))
