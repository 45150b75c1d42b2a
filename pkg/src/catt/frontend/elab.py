"""Elaboration of parsed declarations into checked kernel terms."""

from dataclasses import dataclass, field

from .. import errors, geometry, naturality
from ..kernel import (OBJ, Arr, Coh, Context, Variable, canonicalize, check_context,
                      check_head, check_term, check_type, locally_maximal_positions,
                      subst_term, type_of)
from ..metaops import compose, unbiased_comp
from ..pasting import check_ps
from ..unify import complete, match
from . import syntax as S


@dataclass
class Definition:
    """A checked declaration: a term over its parameter context."""

    name: str
    kind: str
    ctx: Context
    term: object
    ty: object
    span: object = None

    @property
    def explicit(self):
        return tuple(self.ctx.entries[i][0] for i in locally_maximal_positions(self.ctx))


@dataclass
class CheckResult:
    ctx: Context
    term: object
    ty: object
    span: object = None


@dataclass
class _Callable:
    ctx: Context
    term: object
    builtin: bool = False

    @property
    def explicit(self):
        return tuple(self.ctx.entries[i][0] for i in locally_maximal_positions(self.ctx))


class _Scope:
    def __init__(self):
        self.names = {}
        self.entries = []

    @property
    def env(self):
        return dict(self.entries)

    def bind(self, name, ty, span):
        if name.name in self.names:
            raise errors.DuplicateVariable(f"variable {name.name} declared twice",
                                           span=name.span, var=name.name)
        v = Variable(name.name)
        self.names[name.name] = v
        self.entries.append((v, ty))
        return v

    def ctx(self):
        return Context(self.entries)


@dataclass
class Session:
    """The definitions of one file, in order."""

    defs: dict = field(default_factory=dict)
    order: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def run(self, source):
        for decl in source.decls:
            self.declare(decl)
        return self

    def declare(self, decl):
        try:
            if isinstance(decl, S.CohDecl):
                self._coh(decl)
            elif isinstance(decl, S.LetDecl):
                self._let(decl)
            else:
                self._check(decl)
        except errors.CattError as exc:
            raise exc.with_span(decl.span)

    def _fresh_name(self, decl):
        if decl.name in self.defs:
            raise errors.DuplicateDefinition(f"{decl.name} is already defined", span=decl.span,
                                             name=decl.name)

    def _coh(self, decl):
        self._fresh_name(decl)
        scope = self._tele(decl.tele)
        ctx = check_context(scope.ctx())
        check_ps(ctx)
        ty = self._type(decl.ty, scope)
        head, ren = canonicalize(ctx.entries, ty)
        check_head(head)
        term = Coh(head, [v.term for v in ren])
        self._record(Definition(decl.name, "coh", ctx, term, ty, decl.span))

    def _let(self, decl):
        self._fresh_name(decl)
        scope = self._tele(decl.tele)
        ctx = check_context(scope.ctx())
        term = self._term(decl.body, scope)
        ty = self._checked(ctx, term, decl.ty, scope, decl.body.span)
        self._record(Definition(decl.name, "let", ctx, term, ty, decl.span))

    def _check(self, decl):
        if not decl.tele and decl.ty is None:
            target = _unparen(decl.body)
            ref = None
            if isinstance(target, S.Builtin):
                ref = self._builtin(target)
            elif isinstance(target, S.Name) and target.name in self.defs:
                d = self.defs[target.name]
                ref = _Callable(d.ctx, d.term)
            if ref is not None:
                ty = _kernel(ref.ctx, ref.term, target.span)
                self.checks.append(CheckResult(ref.ctx, ref.term, ty, decl.span))
                return
        scope = self._tele(decl.tele)
        ctx = check_context(scope.ctx())
        term = self._term(decl.body, scope)
        ty = self._checked(ctx, term, decl.ty, scope, decl.body.span)
        self.checks.append(CheckResult(ctx, term, ty, decl.span))

    def _checked(self, ctx, term, declared, scope, span):
        ty = _kernel(ctx, term, span)
        if declared is not None:
            want = self._type(declared, scope)
            if want is not ty:
                raise errors.TypeMismatch("the term does not have the declared type",
                                          span=declared.span, expected=want, got=ty)
        return ty

    def _record(self, d):
        self.defs[d.name] = d
        self.order.append(d)

    # -- telescopes and types

    def _tele(self, binders):
        scope = _Scope()
        for b in binders:
            for n in b.names:
                ty = self._type(b.ty, scope)
                scope.bind(n, ty, b.span)
        return scope

    def _type(self, node, scope):
        if isinstance(node, S.Star):
            return OBJ
        src = self._term(node.src, scope)
        tgt = self._term(node.tgt, scope)
        env = scope.env
        a = Arr(_typeof(src, env, node.src.span), src, tgt)
        try:
            check_type(Context(scope.entries), a)
        except errors.CattError as exc:
            raise exc.with_span(node.span)
        return a

    # -- terms

    def _term(self, node, scope):
        try:
            return self._term_inner(node, scope)
        except errors.CattError as exc:
            raise exc.with_span(node.span)

    def _term_inner(self, node, scope):
        if isinstance(node, S.Paren):
            return self._term(node.body, scope)
        if isinstance(node, S.Bracket):
            raise errors.SyntaxError("brackets only mark arguments of an application",
                                     span=node.span, expected="an application")
        if isinstance(node, S.Name):
            v = scope.names.get(node.name)
            if v is not None:
                return v.term
            return self._apply(self._callable(node), [], scope, node.span)
        if isinstance(node, S.App):
            head = _unparen(node.head)
            if isinstance(head, S.CompKw):
                return self._comp(node.args, scope)
            if isinstance(head, S.Name) and head.name in scope.names:
                raise errors.TypeMismatch(f"{head.name} is a variable and takes no arguments",
                                          span=head.span)
            return self._apply(self._callable(head), node.args, scope, node.span)
        if isinstance(node, S.CompKw):
            raise errors.SyntaxError("comp needs arguments", span=node.span,
                                     expected="arguments")
        return self._apply(self._callable(node), [], scope, node.span)

    def _comp(self, args, scope):
        terms = []
        for a in args:
            if isinstance(a, S.Bracket):
                raise errors.SyntaxError("comp takes no bracketed arguments", span=a.span,
                                         expected="a term")
            terms.append(self._term(a, scope))
        env = scope.env
        dims = [_typeof(t, env, a.span).dim + 1 for t, a in zip(terms, args)]
        return compose(min(dims) - 1, terms, env)

    def _callable(self, node):
        if isinstance(node, S.Name):
            d = self.defs.get(node.name)
            if d is None:
                raise errors.UnknownName(f"unknown name {node.name}", span=node.span,
                                         name=node.name)
            return _Callable(d.ctx, d.term)
        if isinstance(node, S.Builtin):
            return self._builtin(node)
        if isinstance(node, (S.CohHead, S.CompHead)):
            return self._inline_head(node)
        raise errors.TypeMismatch("this term cannot be applied", span=node.span)

    def _builtin(self, node):
        try:
            g = geometry.generic(node.name, *node.indices)
        except errors.CattError as exc:
            raise exc.with_span(node.span)
        return _Callable(g.ctx, g.term, True)

    def _inline_head(self, node):
        scope = self._tele(node.tele)
        ctx = check_context(scope.ctx())
        if isinstance(node, S.CompHead):
            tree = check_ps(ctx)
            if tree.is_disc():
                raise errors.NotFull("a disc has no composite", span=node.span,
                                     detail="comp over a disc")
            term = unbiased_comp(tree)
        else:
            check_ps(ctx)
            ty = self._type(node.ty, scope)
            head, ren = canonicalize(ctx.entries, ty)
            check_head(head)
            term = Coh(head, [v.term for v in ren])
        return _Callable(ctx, term)

    def _apply(self, fn, arg_nodes, scope, span):
        explicit = fn.explicit
        if len(arg_nodes) == len(explicit):
            formals = explicit
        elif len(arg_nodes) == len(fn.ctx) and arg_nodes:
            formals = fn.ctx.vars
        else:
            raise errors.SubstitutionArity(
                f"expected {len(explicit)} arguments, got {len(arg_nodes)}", span=span,
                expected=len(explicit), got=len(arg_nodes))
        bracketed = [isinstance(a, S.Bracket) for a in arg_nodes]
        actuals = [self._term(a.body if b else a, scope) for a, b in zip(arg_nodes, bracketed)]
        env = scope.env
        if any(bracketed):
            X = naturality.up_closure(fn.ctx, [v for v, b in zip(formals, bracketed) if b])
            for v, b, a in zip(formals, bracketed, arg_nodes):
                if not b and v in X:
                    raise errors.XNotUpClosed(
                        f"{v.name} depends on a bracketed argument and must be bracketed too",
                        span=a.span, offending=v.name)
            body = naturality.term_up(fn.ctx, fn.term, X)
            pattern = naturality.build_up(fn.ctx, X).ctx_up
            assign = {naturality.bar(v) if b else v: t
                      for v, b, t in zip(formals, bracketed, actuals)}
        else:
            body, pattern = fn.term, fn.ctx
            assign = dict(zip(formals, actuals))
        try:
            sub = match(pattern.types, assign, env)
            complete(pattern, sub)
        except errors.InferenceFailed as exc:
            if fn.builtin:
                raise errors.FacesMismatch(f"the arguments do not fit together: {exc}",
                                           span=span) from exc
            raise exc.with_span(span)
        return subst_term(body, sub)


def _unparen(node):
    while isinstance(node, S.Paren):
        node = node.body
    return node


def _typeof(t, env, span):
    try:
        return type_of(t, env)
    except errors.CattError as exc:
        raise exc.with_span(span)


def _kernel(ctx, term, span):
    try:
        return check_term(ctx, term)
    except errors.CattError as exc:
        raise exc.with_span(span)


def elaborate(source):
    """Elaborate a parsed file; returns the session with its definitions."""
    return Session().run(source)
