"""Raw syntax, substitution and the typing judgements.

Terms and types are hash-consed: two structurally equal objects built in the
same session are the same Python object, so syntactic equality is ``is`` and
memo tables can be keyed on the objects themselves.  Coherence heads are kept
in a canonical positional form (their context uses the shared bound variables
``bound_var(0), bound_var(1), ...``), which makes alpha-equivalence of heads
an identity test as well.
"""

import itertools
import sys
import threading

from . import errors

sys.setrecursionlimit(max(sys.getrecursionlimit(), 200000))

_caches = []
_lock = threading.Lock()


def session_cache():
    """A dict cleared by :func:`reset_session`."""
    table = {}
    _caches.append(table)
    return table


def reset_session():
    """Drop every interned object and memo table."""
    with _lock:
        for table in _caches:
            table.clear()


class Variable:
    """A variable with a surface name and a unique id; equality is by id."""

    __slots__ = ("id", "name", "_term", "dups")
    _counter = itertools.count()

    def __init__(self, name):
        self.id = next(Variable._counter)
        self.name = name
        self._term = None
        self.dups = None

    @property
    def term(self):
        t = self._term
        if t is None:
            t = self._term = Var(self)
        return t

    def __repr__(self):
        return f"{self.name}#{self.id}"


def fresh(name):
    return Variable(name)


_bound = []


def bound_var(i):
    while len(_bound) <= i:
        _bound.append(Variable(f"_{len(_bound)}"))
    return _bound[i]


# ---------------------------------------------------------------------------
# types

class Type:
    __slots__ = ()


class ObjType(Type):
    __slots__ = ()
    dim = -1

    def __repr__(self):
        return "*"

    @property
    def fv(self):
        return frozenset()


OBJ = ObjType()
_arr_table = session_cache()


class Arr(Type):
    __slots__ = ("base", "src", "tgt", "dim", "_fv")

    def __new__(cls, base, src, tgt):
        key = (base, src, tgt)
        node = _arr_table.get(key)
        if node is None:
            node = object.__new__(cls)
            node.base, node.src, node.tgt = base, src, tgt
            node.dim = base.dim + 1
            node._fv = None
            node = _arr_table.setdefault(key, node)
        return node

    @property
    def fv(self):
        fv = self._fv
        if fv is None:
            fv = self._fv = self.base.fv | self.src.fv | self.tgt.fv
        return fv

    def __repr__(self):
        return f"({self.src!r} -> {self.tgt!r})"


def arr(src, tgt, base):
    return Arr(base, src, tgt)


# ---------------------------------------------------------------------------
# terms

class Term:
    __slots__ = ()


class Var(Term):
    __slots__ = ("var", "fv")

    def __init__(self, var):
        self.var = var
        self.fv = frozenset((var,))

    def __repr__(self):
        return self.var.name


_coh_table = session_cache()


class Coh(Term):
    """``coh_{H}[args]`` where ``args[i]`` is the image of ``bound_var(i)``."""

    __slots__ = ("head", "args", "_fv", "_type")

    def __new__(cls, head, args):
        args = tuple(args)
        key = (head, args)
        node = _coh_table.get(key)
        if node is None:
            if len(args) != len(head.ctx):
                raise errors.SubstitutionArity(
                    f"coherence expects {len(head.ctx)} arguments, got {len(args)}")
            node = object.__new__(cls)
            node.head, node.args = head, args
            node._fv = None
            node._type = None
            node = _coh_table.setdefault(key, node)
        return node

    @property
    def fv(self):
        fv = self._fv
        if fv is None:
            acc = set()
            for a in self.args:
                acc |= a.fv
            fv = self._fv = frozenset(acc)
        return fv

    @property
    def ty(self):
        t = self._type
        if t is None:
            t = self._type = subst_type(self.head.ty, self.head.arg_map(self.args))
        return t

    @property
    def dim(self):
        return self.ty.dim + 1

    def __repr__(self):
        return f"{self.head.label}[{', '.join(map(repr, self.args))}]"


# ---------------------------------------------------------------------------
# contexts

class Context:
    """An ordered telescope of ``(Variable, Type)`` entries; immutable."""

    __slots__ = ("entries", "types", "_index", "_fv", "checked", "memo")

    def __init__(self, entries=()):
        self.entries = tuple(entries)
        self.types = dict(self.entries)
        self._index = None
        self._fv = None
        self.checked = False
        self.memo = {}

    @property
    def vars(self):
        return tuple(v for v, _ in self.entries)

    @property
    def fv(self):
        if self._fv is None:
            self._fv = frozenset(self.types)
        return self._fv

    def index(self, v):
        if self._index is None:
            self._index = {w: i for i, (w, _) in enumerate(self.entries)}
        return self._index[v]

    def __contains__(self, v):
        return v in self.types

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, v):
        return self.types[v]

    def extend(self, *entries):
        return Context(self.entries + tuple(entries))

    def type_of(self, t):
        return type_of(t, self.types)

    def __repr__(self):
        return "(" + ", ".join(f"{v.name} : {a!r}" for v, a in self.entries) + ")"


def type_of(t, env):
    if isinstance(t, Var):
        try:
            return env[t.var]
        except KeyError:
            raise errors.UnboundVariable(f"unbound variable {t.var.name}", var=t.var) from None
    return t.ty


def dim(x, env=None):
    """Dimension of a type, a term (given the variable types) or a context.

    The empty context has no dimension and yields ``None``."""
    if isinstance(x, Type):
        return x.dim
    if isinstance(x, Context):
        if not x.entries:
            return None
        return max(a.dim for _, a in x.entries) + 1
    if isinstance(x, Var):
        if env is None:
            raise TypeError("dimension of a variable needs its context")
        if isinstance(env, Context):
            env = env.types
        return type_of(x, env).dim + 1
    return x.dim


# ---------------------------------------------------------------------------
# coherence heads

_head_table = session_cache()


class Head:
    """A pasting context and a type over it, in canonical positional form."""

    __slots__ = ("ctx", "ty", "names", "_tree", "_status", "_flavor", "_explicit",
                 "_unbiased", "label", "_arg_shapes")

    def __init__(self, ctx, ty, names):
        self.ctx = ctx
        self.ty = ty
        self.names = names
        self._tree = None
        self._status = None
        self._flavor = None
        self._explicit = None
        self._unbiased = None
        self._arg_shapes = None
        self.label = "coh"

    def arg_map(self, args):
        return {bound_var(i): a for i, a in enumerate(args)}

    @property
    def vars(self):
        return tuple(v for v, _ in self.ctx.entries)

    @property
    def identity_args(self):
        return tuple(v.term for v in self.vars)

    @property
    def tree(self):
        if self._tree is None:
            from .pasting import check_ps
            self._tree = check_ps(self.ctx)
        return self._tree

    @property
    def flavor(self):
        check_head(self)
        return self._flavor

    @property
    def explicit(self):
        """Positions of the locally maximal variables of the context."""
        if self._explicit is None:
            self._explicit = locally_maximal_positions(self.ctx)
        return self._explicit

    @property
    def dim(self):
        return self.ty.dim + 1

    def __repr__(self):
        return f"Head({self.ctx!r} : {self.ty!r})"


def locally_maximal_positions(ctx):
    used = set()
    for _, a in ctx.entries:
        used |= a.fv
    return tuple(i for i, (v, _) in enumerate(ctx.entries) if v not in used)


def canonicalize(entries, ty):
    """Rename a context positionally onto the bound variables.

    Returns ``(head, renaming)`` where ``renaming[i]`` is the original variable
    at position ``i``.  The head is raw: call :func:`check_head` to validate."""
    entries = tuple(entries)
    ren = {}
    memo = {}
    types = []
    for i, (v, a) in enumerate(entries):
        types.append(subst_type(a, ren, memo))
        ren[v] = bound_var(i).term
    canon_ty = subst_type(ty, ren, memo)
    key = (tuple(types), canon_ty)
    head = _head_table.get(key)
    if head is None:
        ctx = Context((bound_var(i), a) for i, a in enumerate(types))
        head = Head(ctx, canon_ty, tuple(v.name for v, _ in entries))
        head = _head_table.setdefault(key, head)
    return head, tuple(v for v, _ in entries)


def make_coh(entries, ty, args=None):
    """``coh_{entries, ty}[args]``; ``args`` defaults to the identity."""
    head, ren = canonicalize(entries, ty)
    if args is None:
        args = tuple(v.term for v in ren)
    return Coh(head, args)


def check_head(head):
    status = head._status
    if status is None:
        try:
            _check_head(head)
            status = True
        except errors.CattError as exc:
            status = exc
        head._status = status
    if status is not True:
        raise status
    return head


def _check_head(head):
    from .pasting import check_ps, boundary_vars
    check_context(head.ctx)
    tree = check_ps(head.ctx)
    head._tree = tree
    check_type(head.ctx, head.ty)
    ty = head.ty
    if not isinstance(ty, Arr):
        raise errors.NotFull("a coherence must have an arrow type", detail="type is *")
    base_vars = ty.base.fv
    src_vars = ty.src.fv | base_vars
    tgt_vars = ty.tgt.fv | base_vars
    all_vars = head.ctx.fv
    n = tree.dim
    if n > 0:
        minus = boundary_vars(tree, n - 1, False)
        plus = boundary_vars(tree, n - 1, True)
    else:
        minus = plus = frozenset()
    if src_vars == minus and tgt_vars == plus:
        head._flavor = "comp"
        return
    if src_vars == all_vars and tgt_vars == all_vars:
        head._flavor = "inv"
        return
    if src_vars != all_vars and src_vars != minus:
        detail = "Var(u) u Var(A) is neither Var(d-Gamma) nor Var(Gamma)"
    elif tgt_vars != all_vars and tgt_vars != plus:
        detail = "Var(v) u Var(A) is neither Var(d+Gamma) nor Var(Gamma)"
    else:
        detail = "source and target use different side conditions"
    raise errors.NotFull(f"type is not full: {detail}", detail=detail)


# ---------------------------------------------------------------------------
# substitution

def subst_term(t, s, memo=None, dom=None):
    """Simultaneous substitution; ``s`` maps Variables to Terms."""
    if not s:
        return t
    if memo is None:
        memo = {}
    if dom is None:
        dom = frozenset(s)
    return _st(t, s, memo, dom)


def _st(t, s, memo, dom):
    r = memo.get(t)
    if r is not None:
        return r
    if isinstance(t, Var):
        r = s.get(t.var, t)
    elif t.fv.isdisjoint(dom):
        r = t
    else:
        r = Coh(t.head, [_st(a, s, memo, dom) for a in t.args])
    memo[t] = r
    return r


def subst_type(a, s, memo=None, dom=None):
    if not s or a is OBJ:
        return a
    if memo is None:
        memo = {}
    if dom is None:
        dom = frozenset(s)
    return _sty(a, s, memo, dom)


def _sty(a, s, memo, dom):
    if a is OBJ:
        return a
    r = memo.get(a)
    if r is not None:
        return r
    if a.fv.isdisjoint(dom):
        r = a
    else:
        r = Arr(_sty(a.base, s, memo, dom), _st(a.src, s, memo, dom), _st(a.tgt, s, memo, dom))
    memo[a] = r
    return r


class Substitution:
    """An association list of ``(Variable, Term)``; the last binding wins."""

    __slots__ = ("pairs", "map")

    def __init__(self, pairs=()):
        self.pairs = tuple(pairs)
        self.map = dict(self.pairs)

    @classmethod
    def identity(cls, ctx):
        return cls((v, v.term) for v in ctx.vars)

    def __getitem__(self, v):
        return self.map.get(v, v.term)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def fv(self):
        acc = set()
        for _, t in self.pairs:
            acc |= t.fv
        return frozenset(acc)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        return "<" + ", ".join(f"{v.name} -> {t!r}" for v, t in self.pairs) + ">"


def as_map(s):
    if isinstance(s, Substitution):
        return s.map
    return s


def apply_sub(target, gamma):
    """Action of a raw substitution on a type, term or substitution."""
    s = as_map(gamma)
    memo = {}
    dom = frozenset(s)
    if isinstance(target, Term):
        return subst_term(target, s, memo, dom)
    if isinstance(target, Type):
        return subst_type(target, s, memo, dom)
    if isinstance(target, Substitution):
        return Substitution((v, subst_term(t, s, memo, dom)) for v, t in target.pairs)
    if isinstance(target, dict):
        return {v: subst_term(t, s, memo, dom) for v, t in target.items()}
    raise TypeError(f"cannot substitute into {type(target).__name__}")


def compose_sub(delta, gamma):
    """``delta o gamma``: first ``delta``, then ``gamma`` on the images."""
    return apply_sub(delta if isinstance(delta, Substitution) else Substitution(delta.items()), gamma)


def free_vars(x):
    """``Var(-)`` of a type, term, context or substitution."""
    if isinstance(x, (Term, Type, Context, Substitution)):
        return x.fv
    if isinstance(x, dict):
        acc = set()
        for t in x.values():
            acc |= t.fv
        return frozenset(acc)
    raise TypeError(f"no variables for {type(x).__name__}")


# ---------------------------------------------------------------------------
# judgements

def check_context(ctx):
    """Rules (ec)/(cc): each entry's type checks in its prefix."""
    if not isinstance(ctx, Context):
        ctx = Context(ctx)
    if ctx.checked:
        return ctx
    seen = {}
    memo = {}
    for pos, (v, a) in enumerate(ctx.entries):
        if v in seen:
            raise errors.DuplicateVariable(f"variable {v.name} declared twice", var=v, position=pos)
        try:
            _check_type(seen, a, memo)
        except errors.CattError as exc:
            raise errors.IllTypedEntry(
                f"entry {pos} ({v.name}) is ill-typed: {exc}", position=pos, cause=exc) from exc
        seen[v] = a
    ctx.checked = True
    return ctx


def check_type(ctx, a):
    ctx = check_context(ctx)
    _check_type(ctx.types, a, ctx.memo)
    return a


def check_term(ctx, t):
    """Returns the type of ``t`` in ``ctx`` after checking it."""
    ctx = check_context(ctx)
    return _infer(ctx.types, t, ctx.memo)


def infer(ctx, t):
    return check_term(ctx, t)


def _check_type(env, a, memo):
    if a is OBJ:
        return
    if memo.get(a) is True:
        return
    _check_type(env, a.base, memo)
    ts = _infer(env, a.src, memo)
    tt = _infer(env, a.tgt, memo)
    if ts is not a.base or tt is not a.base:
        raise errors.NotParallel(
            f"endpoints of {a!r} do not live over {a.base!r}", base=a.base, src_type=ts, tgt_type=tt)
    memo[a] = True


def _infer(env, t, memo):
    r = memo.get(t)
    if r is not None:
        return r
    if isinstance(t, Var):
        r = env.get(t.var)
        if r is None:
            raise errors.UnboundVariable(f"unbound variable {t.var.name}", var=t.var)
        memo[t] = r
        return r
    head = check_head(t.head)
    args = t.args
    inst = {}
    smemo = {}
    for i, (v, expected) in enumerate(head.ctx.entries):
        got = _infer(env, args[i], memo)
        want = subst_type(expected, inst, smemo)
        if got is not want:
            raise errors.TypeMismatch(
                f"argument {i} of {t.head.label} has type {got!r}, expected {want!r}",
                position=i, expected=want, got=got)
        inst[v] = args[i]
    r = t.ty
    memo[t] = r
    return r


def check_sub(delta, gamma, ctx):
    """Rules (es)/(sc): ``delta |- gamma : ctx``."""
    delta = check_context(delta)
    ctx = check_context(ctx)
    if not isinstance(gamma, Substitution):
        gamma = Substitution(gamma.items() if isinstance(gamma, dict) else gamma)
    if len(gamma.pairs) != len(ctx.entries):
        raise errors.SubstitutionArity(
            f"substitution has {len(gamma.pairs)} entries, context has {len(ctx.entries)}")
    inst = {}
    smemo = {}
    for i, ((v, t), (w, a)) in enumerate(zip(gamma.pairs, ctx.entries)):
        if v is not w:
            raise errors.SubstitutionOrder(
                f"entry {i} binds {v.name}, expected {w.name}", position=i)
        got = _infer(delta.types, t, delta.memo)
        want = subst_type(a, inst, smemo)
        if got is not want:
            raise errors.TypeMismatch(
                f"image of {v.name} has type {got!r}, expected {want!r}",
                position=i, expected=want, got=got)
        inst[v] = t
    return gamma


# ---------------------------------------------------------------------------
# alpha-equivalence

def _first_occurrence(x, order, seen):
    stack = [x]
    while stack:
        y = stack.pop()
        if isinstance(y, Var):
            if y.var not in seen:
                seen.add(y.var)
                order.append(y.var)
        elif isinstance(y, Coh):
            stack.extend(reversed(y.args))
        elif isinstance(y, Arr):
            stack.extend((y.tgt, y.src, y.base))


def _positional(x):
    if isinstance(x, Context):
        head, _ = canonicalize(x.entries, OBJ)
        return head
    order, seen = [], set()
    _first_occurrence(x, order, seen)
    ren = {v: bound_var(i).term for i, v in enumerate(order)}
    if isinstance(x, Type):
        return subst_type(x, ren)
    return subst_term(x, ren)


def alpha_equiv(a, b, ctx_a=None, ctx_b=None):
    """Equality up to a consistent renaming of variables.

    Contexts are compared positionally.  Terms and types given together with
    their contexts are renamed along the contexts; on their own they are
    renamed in order of first occurrence."""
    if ctx_a is not None and ctx_b is not None:
        if len(ctx_a) != len(ctx_b):
            return False
        if _positional(ctx_a) is not _positional(ctx_b):
            return False
        ren = {v: w.term for (v, _), (w, _) in zip(ctx_a.entries, ctx_b.entries)}
        return apply_sub(a, ren) is b
    if isinstance(a, Context) and isinstance(b, Context):
        return len(a) == len(b) and _positional(a) is _positional(b)
    if isinstance(a, Substitution) and isinstance(b, Substitution):
        if [v for v, _ in a.pairs] != [v for v, _ in b.pairs]:
            return False
        return all(alpha_equiv(s, t) for (_, s), (_, t) in zip(a.pairs, b.pairs))
    return _positional(a) is _positional(b)
