"""Lexer, AST and recursive-descent parser for ``.catt`` files.

Grammar::

    file    ::= decl*
    decl    ::= 'coh' IDENT tele* ':' type
              | 'let' IDENT tele* [':' type] '=' term
              | 'check' [tele* [':' type] '='] term
    tele    ::= '(' IDENT+ ':' type ')'
    type    ::= '*' | term '->' term
    term    ::= atom atom*
    atom    ::= IDENT | '(' term ')' | '[' term ']'
              | 'comp' | 'comp' '(' tele* ')'
              | 'coh' '(' tele* ':' type ')'
              | 'cylcomp' '(' INT ',' INT ',' INT ')'
              | 'cylstack' '(' INT ')'
              | 'conecomp' '(' INT ',' INT ',' INT ')'

Line comments start with ``--``.
"""

import re
from dataclasses import dataclass, field

from .. import errors

KEYWORDS = frozenset({"coh", "let", "check", "comp", "cylcomp", "cylstack", "conecomp"})
BUILTINS = {"cylcomp": 3, "cylstack": 1, "conecomp": 3}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<arrow>->)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_](?:[A-Za-z0-9_'~+]|-(?!>))*)
  | (?P<punct>[()\[\]:*=,])
""", re.VERBOSE)


@dataclass(frozen=True)
class Span:
    path: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.path}:{self.line}:{self.col}"

    def to(self, other):
        return Span(self.path, self.line, self.col, other.end_line, other.end_col)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


def tokenize(text, path="<input>"):
    out = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            span = Span(path, line, col, line, col + 1)
            raise errors.SyntaxError(f"unexpected character {text[pos]!r}", span=span,
                                     expected="a token")
        kind = m.lastgroup
        s = m.group()
        lines = s.count("\n")
        if lines:
            end_line, end_col = line + lines, len(s) - s.rfind("\n")
        else:
            end_line, end_col = line, col + len(s)
        if kind not in ("ws", "comment"):
            if kind == "ident" and s in KEYWORDS:
                kind = s
            elif kind in ("punct", "arrow"):
                kind = s
            out.append(Token(kind, s, Span(path, line, col, end_line, end_col)))
        pos = m.end()
        line, col = end_line, end_col
    out.append(Token("eof", "", Span(path, line, col, line, col)))
    return out


# ---------------------------------------------------------------------------
# AST

@dataclass
class Name:
    name: str
    span: Span


@dataclass
class Paren:
    body: object
    span: Span


@dataclass
class Bracket:
    body: object
    span: Span


@dataclass
class App:
    head: object
    args: list
    span: Span


@dataclass
class CompKw:
    span: Span


@dataclass
class CompHead:
    tele: list
    span: Span


@dataclass
class CohHead:
    tele: list
    ty: object
    span: Span


@dataclass
class Builtin:
    name: str
    indices: tuple
    span: Span


@dataclass
class Star:
    span: Span


@dataclass
class ArrowTy:
    src: object
    tgt: object
    span: Span


@dataclass
class Binder:
    names: list
    ty: object
    span: Span


@dataclass
class CohDecl:
    name: str
    tele: list
    ty: object
    span: Span


@dataclass
class LetDecl:
    name: str
    tele: list
    ty: object
    body: object
    span: Span


@dataclass
class CheckDecl:
    tele: list
    ty: object
    body: object
    span: Span


@dataclass
class SourceFile:
    path: str
    decls: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# parser

class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, what=None):
        t = self.tok
        if t.kind != kind:
            found = t.text or "end of file"
            raise errors.SyntaxError(f"expected {what or repr(kind)}, found {found!r}",
                                     span=t.span, expected=what or kind)
        return self.advance()

    def file(self, path):
        out = SourceFile(path)
        while self.tok.kind != "eof":
            out.decls.append(self.decl())
        return out

    def decl(self):
        t = self.tok
        if t.kind == "coh" and self.peek().kind == "ident":
            self.advance()
            name = self.advance()
            tele = self.teles()
            self.expect(":", "':'")
            ty = self.type_()
            return CohDecl(name.text, tele, ty, t.span.to(self.prev_span()))
        if t.kind == "let":
            self.advance()
            name = self.expect("ident", "a name")
            tele = self.teles()
            ty = None
            if self.tok.kind == ":":
                self.advance()
                ty = self.type_()
            self.expect("=", "'='")
            body = self.term()
            return LetDecl(name.text, tele, ty, body, t.span.to(self.prev_span()))
        if t.kind == "check":
            self.advance()
            tele, ty = [], None
            if self.at_binder() or self.tok.kind == ":":
                tele = self.teles()
                if self.tok.kind == ":":
                    self.advance()
                    ty = self.type_()
                self.expect("=", "'='")
            body = self.term()
            return CheckDecl(tele, ty, body, t.span.to(self.prev_span()))
        raise errors.SyntaxError(f"expected a declaration, found {t.text or 'end of file'!r}",
                                 span=t.span, expected="'coh', 'let' or 'check'")

    def prev_span(self):
        return self.toks[self.i - 1].span

    def at_binder(self, offset=0):
        if self.peek(offset).kind != "(":
            return False
        k = offset + 1
        while self.peek(k).kind == "ident":
            k += 1
        return k > offset + 1 and self.peek(k).kind == ":"

    def teles(self):
        out = []
        while self.at_binder():
            start = self.advance()
            names = []
            while self.tok.kind == "ident":
                names.append(self.advance())
            self.expect(":", "':'")
            ty = self.type_()
            end = self.expect(")", "')'")
            out.append(Binder([Name(n.text, n.span) for n in names], ty, start.span.to(end.span)))
        return out

    def type_(self):
        t = self.tok
        if t.kind == "*":
            self.advance()
            return Star(t.span)
        src = self.term()
        self.expect("->", "'->'")
        tgt = self.term()
        return ArrowTy(src, tgt, _span(src).to(_span(tgt)))

    def term(self):
        head = self.atom()
        args = []
        while self.tok.kind in ("ident", "(", "[", "comp", "coh", "cylcomp", "cylstack",
                                "conecomp"):
            if self.tok.kind == "coh" and self.peek().kind != "(":
                break
            args.append(self.atom())
        if not args:
            return head
        return App(head, args, _span(head).to(_span(args[-1])))

    def atom(self):
        t = self.tok
        k = t.kind
        if k == "ident":
            self.advance()
            return Name(t.text, t.span)
        if k == "(":
            self.advance()
            body = self.term()
            end = self.expect(")", "')'")
            return Paren(body, t.span.to(end.span))
        if k == "[":
            self.advance()
            body = self.term()
            end = self.expect("]", "']'")
            return Bracket(body, t.span.to(end.span))
        if k == "comp":
            self.advance()
            if self.tok.kind == "(" and (self.at_binder(1) or self.peek().kind == ")"):
                self.advance()
                tele = self.teles()
                end = self.expect(")", "')'")
                return CompHead(tele, t.span.to(end.span))
            return CompKw(t.span)
        if k == "coh":
            self.advance()
            self.expect("(", "'('")
            tele = self.teles()
            self.expect(":", "':'")
            ty = self.type_()
            end = self.expect(")", "')'")
            return CohHead(tele, ty, t.span.to(end.span))
        if k in BUILTINS:
            self.advance()
            self.expect("(", "'('")
            idx = [int(self.expect("int", "an index").text)]
            for _ in range(BUILTINS[k] - 1):
                self.expect(",", "','")
                idx.append(int(self.expect("int", "an index").text))
            end = self.expect(")", "')'")
            return Builtin(k, tuple(idx), t.span.to(end.span))
        raise errors.SyntaxError(f"expected a term, found {t.text or 'end of file'!r}",
                                 span=t.span, expected="a term")


def _span(node):
    return node.span


def parse_text(text, path="<input>"):
    return Parser(tokenize(text, path)).file(path)


def parse_term(text, path="<input>"):
    p = Parser(tokenize(text, path))
    t = p.term()
    p.expect("eof", "end of input")
    return t


def parse_type(text, path="<input>"):
    p = Parser(tokenize(text, path))
    t = p.type_()
    p.expect("eof", "end of input")
    return t


def parse(path):
    """Parse a ``.catt`` file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_text(text, str(path))
