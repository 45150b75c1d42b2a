"""Cylinders and cones: their contexts, types, faces, composites and stacking.

Shapes are built with the naturality construction.  Every composite is first
produced once, generically, over a universal context whose only locally
maximal variables are the two fillers ``a`` and ``b``; applying it to actual
cylinders or cones instantiates that context by matching.
"""

from . import errors
from .kernel import (OBJ, Arr, Coh, Context, Var, Variable, bound_var, canonicalize,
                     check_context, check_head, check_term, session_cache, subst_term,
                     subst_type, type_of)
from .metaops import (compose, fresh_poles, linear0, op_term, opposite, suspend,
                      unbiased_comp)
from .naturality import (_term_up, bar, build_up, coh_up_head, dups, minus, plus)
from .pasting import Node, PastingTree
from .unify import complete, match

CYL, CONE = "cyl", "cone"


# ---------------------------------------------------------------------------
# shapes

class CylinderShape:
    """``C^n`` with its boundary ``dC^n`` and distinguished variables."""

    __slots__ = ("n", "ctx", "boundary", "top", "bot", "fill", "back", "front", "_back_map",
                 "_front_map")

    def __init__(self, n, ctx, boundary, top, bot, fill, back=None, front=None):
        self.n, self.ctx, self.boundary = n, ctx, boundary
        self.top, self.bot, self.fill = top, bot, fill
        self.back, self.front = back, front

    kind = CYL


class ConeShape:
    """``D^n`` with its boundary ``dD^n``, apex, base and filler."""

    __slots__ = ("n", "ctx", "boundary", "apex", "base", "fill", "back", "front")

    def __init__(self, n, ctx, boundary, apex, base, fill, back=None, front=None):
        self.n, self.ctx, self.boundary = n, ctx, boundary
        self.apex, self.base, self.fill = apex, base, fill
        self.back, self.front = back, front

    kind = CONE


def _rename(ctx, ren):
    """Rename some variables of a context to fresh ones."""
    s = {v: w.term for v, w in ren.items()}
    memo = {}
    return Context((ren.get(v, v), subst_type(a, s, memo)) for v, a in ctx.entries)


_shapes = session_cache()


def cyl_shape(n):
    if n < 1:
        raise errors.IndexOutOfRange(f"cylinders start in dimension 1, got {n}")
    key = (CYL, n)
    r = _shapes.get(key)
    if r is not None:
        return r
    if n == 1:
        top, bot, fill = Variable("top1"), Variable("bot1"), Variable("cyl1")
        boundary = Context([(top, OBJ), (bot, OBJ)])
        ctx = Context([(top, OBJ), (bot, OBJ), (fill, Arr(OBJ, top.term, bot.term))])
        r = CylinderShape(1, ctx, boundary, top, bot, fill)
    else:
        prev = cyl_shape(n - 1)
        X = frozenset((prev.top, prev.bot, prev.fill))
        up = build_up(prev.ctx, X)
        m = frozenset((n,))
        top, bot, fill = Variable(f"top{n}"), Variable(f"bot{n}"), Variable(f"cyl{n}")
        ren = {bar(prev.top): top, bar(prev.bot): bot, bar(prev.fill): fill}
        ctx = _rename(opposite(up.ctx_up, m), ren)
        boundary = Context(ctx.entries[:-1])
        r = CylinderShape(n, check_context(ctx), boundary, top, bot, fill,
                          minus(prev.fill), plus(prev.fill))
    _shapes[key] = r
    return r


def cone_shape(n):
    if n < 1:
        raise errors.IndexOutOfRange(f"cones start in dimension 1, got {n}")
    key = (CONE, n)
    r = _shapes.get(key)
    if r is not None:
        return r
    if n == 1:
        apex, base, fill = Variable("apex"), Variable("base1"), Variable("cone1")
        boundary = Context([(apex, OBJ), (base, OBJ)])
        ctx = Context([(apex, OBJ), (base, OBJ), (fill, Arr(OBJ, base.term, apex.term))])
        r = ConeShape(1, ctx, boundary, apex, base, fill)
    else:
        prev = cone_shape(n - 1)
        X = frozenset((prev.base, prev.fill))
        up = build_up(prev.ctx, X)
        base, fill = Variable(f"base{n}"), Variable(f"cone{n}")
        ctx = _rename(up.ctx_up, {bar(prev.base): base, bar(prev.fill): fill})
        boundary = Context(ctx.entries[:-1])
        r = ConeShape(n, check_context(ctx), boundary, prev.apex, base, fill,
                      minus(prev.fill), plus(prev.fill))
    _shapes[key] = r
    return r


def shape(kind, n):
    return cyl_shape(n) if kind == CYL else cone_shape(n)


# ---------------------------------------------------------------------------
# instances and faces

class Instance:
    """A cylinder or cone ``filler`` in an ambient context, with its classifying substitution."""

    __slots__ = ("kind", "n", "env", "filler", "sub")

    def __init__(self, kind, n, env, filler, sub):
        self.kind, self.n, self.env, self.filler, self.sub = kind, n, env, filler, sub

    @property
    def shape(self):
        return shape(self.kind, self.n)

    def face(self, name):
        sh = self.shape
        if name in ("back", "front"):
            if self.n == 1:
                if self.kind == CONE:
                    return self.sub[sh.apex]
                raise errors.ShapeMismatch("a 1-cylinder has no back or front", which=name)
            return self.sub[getattr(sh, name)]
        return self.sub[getattr(sh, name)]

    @property
    def top(self):
        return self.face("top")

    @property
    def bot(self):
        return self.face("bot")

    @property
    def base(self):
        return self.face("base")

    @property
    def back(self):
        return self.face("back")

    @property
    def front(self):
        return self.face("front")

    def faces(self):
        names = ("top", "bot") if self.kind == CYL else ("base",)
        if self.n > 1 or self.kind == CONE:
            names += ("back", "front")
        return {k: self.face(k) for k in names}

    def back_face(self):
        return classify(self.kind, self.n - 1, self.back, self.env)

    def front_face(self):
        return classify(self.kind, self.n - 1, self.front, self.env)

    def iterated(self, side, k):
        """``back^k`` / ``front^k`` as an instance; itself when ``k >= n``."""
        inst = self
        while inst.n > k:
            inst = inst.back_face() if side == "back" else inst.front_face()
        return inst

    def __repr__(self):
        return f"Instance({self.kind}, {self.n}, {self.filler!r})"


def classify(kind, n, t, env):
    """Read ``t`` as an n-dimensional cylinder or cone; raises ShapeMismatch otherwise."""
    if kind == CONE and n == 0:
        return _Point(t, env)
    sh = shape(kind, n)
    try:
        sub = match(sh.ctx.types, {sh.fill: t}, env)
        complete(sh.ctx, sub)
    except errors.InferenceFailed as exc:
        raise errors.ShapeMismatch(f"not a {n}-dimensional {kind}inder: {exc}"
                                   if kind == CYL else f"not a {n}-dimensional cone: {exc}",
                                   which="type") from exc
    return Instance(kind, n, env, t, sub)


class _Point:
    __slots__ = ("filler", "env", "n")

    def __init__(self, t, env):
        self.filler, self.env, self.n = t, env, 0


def mk_instance(kind, n, t, env):
    """Check a term and classify it; ``env`` is a context or a dict of variable types."""
    if isinstance(env, Context):
        check_term(env, t)
        env = env.types
    return classify(kind, n, t, env)


def back_k(inst, k):
    return inst.iterated("back", k).filler


def front_k(inst, k):
    return inst.iterated("front", k).filler


# ---------------------------------------------------------------------------
# closed type formulas

def _cls(kind, n, t, env):
    return classify(kind, n, t, env)


def cyl_type(env, a, b, c=None, d=None):
    """``Cyl^1(a,b)`` or ``Cyl^{n+1}(a,b,c,d)`` from the closed formula."""
    if c is None:
        return Arr(OBJ, a, b)
    n = type_of(c, env).dim + 1
    ci, di = _cls(CYL, n, c, env), _cls(CYL, n, d, env)
    _cyl_equations(env, a, b, ci, di, n)
    src = a
    for i in range(n):
        src = compose(i, [src, front_k(di, i + 1)], env)
    tgt = b
    for i in range(n):
        tgt = compose(i, [back_k(ci, i + 1), tgt], env)
    return Arr(type_of(src, env), src, tgt)


def _cyl_equations(env, a, b, ci, di, n):
    ta, tb = type_of(a, env), type_of(b, env)
    if ta.dim + 1 != n or tb.dim + 1 != n:
        raise errors.ShapeMismatch("top and bottom must be cells of the faces' dimension",
                                   which="dimension")
    checks = [("d-a = top(c)", ta.src, ci.top), ("d-b = bot(c)", tb.src, ci.bot),
              ("d+a = top(d)", ta.tgt, di.top), ("d+b = bot(d)", tb.tgt, di.bot)]
    if n > 1:
        checks += [("back(c) = back(d)", ci.back, di.back),
                   ("front(c) = front(d)", ci.front, di.front)]
    for which, x, y in checks:
        if x is not y:
            raise errors.ShapeMismatch(f"cylinder equation {which} fails", which=which)


def cone_type(env, a, b, c=None):
    """``Cone^1(a,b)`` or ``Cone^{n+1}(a,b,c)`` from the closed formula."""
    if c is None:
        return Arr(OBJ, a, b)
    n = type_of(b, env).dim + 1
    bi, ci = _cls(CONE, n, b, env), _cls(CONE, n, c, env)
    _cone_equations(env, a, bi, ci, n)
    w = compose(0, [a, front_k(ci, 1)], env)
    for i in range(1, n):
        if i % 2:
            w = compose(i, [back_k(bi, i + 1), w], env)
        else:
            w = compose(i, [w, front_k(ci, i + 1)], env)
    if n % 2:
        return Arr(type_of(b, env), b, w)
    return Arr(type_of(c, env), w, c)


def _cone_equations(env, a, bi, ci, n):
    ta = type_of(a, env)
    if ta.dim + 1 != n:
        raise errors.ShapeMismatch("the base must be a cell of the faces' dimension",
                                   which="dimension")
    checks = [("d-a = base(b)", ta.src, bi.base), ("d+a = base(c)", ta.tgt, ci.base),
              ("back(b) = back(c)", bi.back, ci.back),
              ("front(b) = front(c)", bi.front, ci.front)]
    for which, x, y in checks:
        if x is not y:
            raise errors.ShapeMismatch(f"cone equation {which} fails", which=which)


def formula_type(inst):
    """The closed-formula type at an instance's own faces."""
    env = inst.env
    if inst.kind == CYL:
        if inst.n == 1:
            return cyl_type(env, inst.top, inst.bot)
        return cyl_type(env, inst.top, inst.bot, inst.back, inst.front)
    if inst.n == 1:
        return cone_type(env, inst.base, inst.back)
    return cone_type(env, inst.base, inst.back, inst.front)


# ---------------------------------------------------------------------------
# interchangers as coherences over minimal pasting contexts

def _down_closure(vs, env):
    out = set()
    stack = list(vs)
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        stack.extend(env[v].fv)
    return out


def pasting_of(vs, env):
    """Arrange a down-closed set of variables as a pasting context, or return None."""
    cells = {}
    dims = {}
    for v in vs:
        a = env[v]
        dims[v] = a.dim + 1
        if a is OBJ:
            continue
        if not (isinstance(a.src, Var) and isinstance(a.tgt, Var)):
            return None
        cells.setdefault((a.src.var, a.tgt.var), []).append(v)
    objs = [v for v in vs if dims[v] == 0]
    used = set()

    def chain(group):
        nxt = {}
        has_in = set()
        for c in group:
            for c2 in group:
                if c is not c2 and (c, c2) in cells:
                    if c in nxt:
                        return None
                    nxt[c] = c2
                    has_in.add(c2)
        starts = [c for c in group if c not in has_in]
        if len(starts) != 1:
            return None
        order = [starts[0]]
        while order[-1] in nxt:
            order.append(nxt[order[-1]])
        if len(order) != len(group):
            return None
        return order

    def node(group):
        order = chain(group)
        if order is None:
            return None
        children = []
        for c, c2 in zip(order, order[1:]):
            sub = cells.get((c, c2))
            if not sub:
                return None
            child = node(sub)
            if child is None:
                return None
            children.append(child)
        used.update(order)
        return Node(order, children)

    if not objs:
        return None
    root = node(objs)
    if root is None or len(used) != len(vs):
        return None
    return PastingTree(root)


def minimal_coherence(x, y, env):
    """The (inv) coherence ``x -> y`` over the smallest pasting context holding both."""
    vs = _down_closure(x.fv | y.fv, env)
    tree = pasting_of(vs, env)
    if tree is None:
        raise errors.InternalError("the two sides do not span a pasting context")
    head, ren = canonicalize(tree.ctx.entries, Arr(type_of(x, env), x, y))
    check_head(head)
    return Coh(head, [v.term for v in ren])


def bridge(x, y, env):
    """A cell ``x -> y`` between parallel terms, or None when they coincide.

    Equal heads are handled by depth-0 functoriality at the differing top
    arguments; elsewhere a coherence over the minimal pasting context is used."""
    if x is y:
        return None
    if isinstance(x, Coh) and isinstance(y, Coh) and x.head is y.head:
        head = x.head
        diff = [i for i, (p, q) in enumerate(zip(x.args, y.args)) if p is not q]
        top = set(head.explicit)
        hd = head.dim
        types = head.ctx.entries
        if all(i in top and types[i][1].dim + 1 == hd for i in diff):
            Y = frozenset(bound_var(i) for i in diff)
            c = coh_up_head(head, Y)
            sub = {}
            for i, (p, q) in enumerate(zip(x.args, y.args)):
                b = bound_var(i)
                if i in diff:
                    m, pl, bb = dups(b)
                    sub[m], sub[pl] = p, q
                    sub[bb] = bridge(p, q, env)
                else:
                    sub[b] = p
            return subst_term(c, sub)
    return minimal_coherence(x, y, env)


def _correct(u, goal, k, env):
    """``j- *_k u *_k j+`` turning ``u`` into a term of type ``goal``."""
    ut = type_of(u, env)
    jm = bridge(goal.src, ut.src, env)
    jp = bridge(ut.tgt, goal.tgt, env)
    parts = [t for t in (jm, u, jp) if t is not None]
    return compose(k, parts, env), jm is not None, jp is not None


# ---------------------------------------------------------------------------
# universal contexts and generic composites

class Generic:
    """A composite over a universal context whose explicit variables are ``a`` and ``b``."""

    __slots__ = ("kind", "op", "m", "k", "n", "ctx", "term", "a", "b", "sides")

    def __init__(self, kind, op, m, k, n, ctx, term, a, b, sides=None):
        self.kind, self.op, self.m, self.k, self.n = kind, op, m, k, n
        self.ctx, self.term, self.a, self.b = ctx, term, a, b
        self.sides = sides

    @property
    def dim(self):
        return max(self.m, self.n)

    def apply(self, ta, tb, env):
        try:
            sub = match(self.ctx.types, {self.a: ta, self.b: tb}, env)
            complete(self.ctx, sub)
        except errors.InferenceFailed as exc:
            raise errors.FacesMismatch(f"the arguments do not fit together: {exc}") from exc
        return subst_term(self.term, sub)


def glued_universal(kind, d, k):
    """Two d-dimensional shapes glued along front^k of the first and back^k of the second."""
    sh = shape(kind, d)
    env = sh.ctx.types
    inst = Instance(kind, d, env, sh.fill.term, {v: v.term for v in sh.ctx.vars})
    front = inst.iterated("front", k)
    back_vars = _down_closure([_as_var(inst.iterated("back", k).filler)], env)
    front_vars = _down_closure([_as_var(front.filler)], env)
    # match the back face of a copy onto the front face of the original
    bface = inst.iterated("back", k)
    try:
        corr = match(env, {_as_var(bface.filler): front.filler}, env)
    except errors.InferenceFailed as exc:
        raise errors.InternalError(f"faces of the shape do not correspond: {exc}") from exc
    entries = list(sh.ctx.entries)
    ren = {}
    for v, a in sh.ctx.entries:
        if v in back_vars:
            ren[v] = corr[v]
        else:
            w = Variable(v.name + "'")
            ren[v] = w.term
            entries.append((w, subst_type(a, ren)))
    del front_vars
    ctx = check_context(Context(entries))
    return ctx, sh.fill, _as_var(ren[sh.fill])


def _as_var(t):
    if not isinstance(t, Var):
        raise errors.InternalError(f"expected a variable, found {t!r}")
    return t.var


def _face_vars(kind, ctx, v, names):
    inst = classify(kind, type_of(v.term, ctx.types).dim + 1, v.term, ctx.types)
    return [_as_var(inst.face(nm)) for nm in names]


_generic = session_cache()


def _lift(prev, kind, d, X, a_new, b_new, m, k, n, use_op):
    up = build_up(prev.ctx, frozenset(X))
    t = _term_up(prev.term, up)
    ctx = up.ctx_up
    if use_op:
        M = frozenset((d,))
        ctx = opposite(ctx, M)
        t = op_term(t, M)
    check_context(ctx)
    _must_check(ctx, t)
    return Generic(kind, use_op, m, k, n, ctx, t, a_new, b_new)


def _must_check(ctx, t):
    try:
        return check_term(ctx, t)
    except errors.CattError as exc:
        raise errors.RecheckFailed(f"generated term does not check: {exc}", cause=exc) from exc


def cyl_generic(m, k, n):
    """The generic composite ``a m∘k n b``."""
    if k < 1:
        raise errors.UnsupportedIndices("cylinder composition along k = 0 is not supported",
                                        m=m, k=k, n=n)
    if m < k + 1 or n < k + 1:
        raise errors.UnsupportedIndices(
            f"composites along k need both dimensions above k, got m={m}, n={n}, k={k}",
            m=m, k=k, n=n)
    key = ("cylcomp", m, k, n)
    r = _generic.get(key)
    if r is not None:
        return r
    if m == n == k + 1:
        r = _cyl_base(k)
    elif m == n:
        prev = cyl_generic(m - 1, k, n - 1)
        ta, ba = _face_vars(CYL, prev.ctx, prev.a, ("top", "bot"))
        tb, bb = _face_vars(CYL, prev.ctx, prev.b, ("top", "bot"))
        X = {ta, ba, prev.a, tb, bb, prev.b}
        r = _lift(prev, CYL, m, X, bar(prev.a), bar(prev.b), m, k, n, True)
    elif m > n:
        prev = cyl_generic(m - 1, k, n)
        ta, ba = _face_vars(CYL, prev.ctx, prev.a, ("top", "bot"))
        r = _lift(prev, CYL, m, {ta, ba, prev.a}, bar(prev.a), prev.b, m, k, n, True)
    else:
        prev = cyl_generic(m, k, n - 1)
        tb, bb = _face_vars(CYL, prev.ctx, prev.b, ("top", "bot"))
        r = _lift(prev, CYL, n, {tb, bb, prev.b}, prev.a, bar(prev.b), m, k, n, True)
    _generic[key] = r
    return r


def _cyl_base(k):
    if k == 1:
        lin = linear0(2)
        X = frozenset(lin.ctx.vars)
        up = build_up(lin.ctx, X)
        t = _term_up(unbiased_comp(lin.tree), up)
        ctx = check_context(up.ctx_up)
        _must_check(ctx, t)
        return Generic(CYL, False, 2, 1, 2, ctx, t, bar(lin.fs[0]), bar(lin.fs[1]))
    prev = cyl_generic(k, k - 1, k)
    ctx, a, b = glued_universal(CYL, k + 1, k)
    return _sigma_step(prev, CYL, k, ctx, a, b, frozenset())


def _sigma_step(prev, kind, k, ctx, a, b, op_set):
    env = ctx.types
    pctx, pt = prev.ctx, prev.term
    if op_set:
        pctx, pt = opposite(pctx, op_set), op_term(pt, op_set)
    poles = fresh_poles(pctx, ctx)
    sctx = suspend(pctx, poles)
    st = suspend(pt, poles)
    try:
        # op reverses the order of composition, so the roles swap
        pair = {prev.a: b.term, prev.b: a.term} if op_set else {prev.a: a.term, prev.b: b.term}
        sub = match(sctx.types, pair, env)
        complete(sctx, sub)
    except errors.InferenceFailed as exc:
        raise errors.InternalError(f"suspended composite does not fit: {exc}") from exc
    u = subst_term(st, sub)
    ia, ib = classify(kind, k + 1, a.term, env), classify(kind, k + 1, b.term, env)
    goal = _expected_type(kind, ia, ib, k)
    term, jm, jp = _correct(u, goal, k, env)
    _must_check(ctx, term)
    return Generic(kind, bool(op_set), k + 1, k, k + 1, ctx, term, a, b, (jm, jp))


def cyl_stack_generic(n):
    if n < 1:
        raise errors.IndexOutOfRange(f"stacking needs n >= 1, got {n}")
    key = ("cylstack", n)
    r = _generic.get(key)
    if r is not None:
        return r
    if n == 1:
        lin = linear0(2)
        t = unbiased_comp(lin.tree)
        r = Generic(CYL, False, 1, 0, 1, check_context(lin.ctx), t, lin.fs[0], lin.fs[1])
    else:
        prev = cyl_stack_generic(n - 1)
        ta, ba = _face_vars(CYL, prev.ctx, prev.a, ("top", "bot"))
        (bb,) = _face_vars(CYL, prev.ctx, prev.b, ("bot",))
        X = {ta, ba, prev.a, bb, prev.b}
        r = _lift(prev, CYL, n, X, bar(prev.a), bar(prev.b), n, 0, n, True)
    _generic[key] = r
    return r


def cone_generic(m, k, n):
    """The generic cone composite ``a m▹k n b``."""
    if k < 1:
        raise errors.UnsupportedIndices("cone composition along k = 0 is not supported",
                                        m=m, k=k, n=n)
    if m < k + 1 or n < k + 1:
        raise errors.UnsupportedIndices(
            f"composites along k need both dimensions above k, got m={m}, n={n}, k={k}",
            m=m, k=k, n=n)
    key = ("conecomp", m, k, n)
    r = _generic.get(key)
    if r is not None:
        return r
    if m == n == k + 1:
        r = _cone_base(k)
    elif m == n:
        prev = cone_generic(m - 1, k, n - 1)
        (ba,) = _face_vars(CONE, prev.ctx, prev.a, ("base",))
        (bb,) = _face_vars(CONE, prev.ctx, prev.b, ("base",))
        r = _lift(prev, CONE, m, {ba, prev.a, bb, prev.b}, bar(prev.a), bar(prev.b),
                  m, k, n, False)
    elif m > n:
        prev = cone_generic(m - 1, k, n)
        (ba,) = _face_vars(CONE, prev.ctx, prev.a, ("base",))
        r = _lift(prev, CONE, m, {ba, prev.a}, bar(prev.a), prev.b, m, k, n, False)
    else:
        prev = cone_generic(m, k, n - 1)
        (bb,) = _face_vars(CONE, prev.ctx, prev.b, ("base",))
        r = _lift(prev, CONE, n, {bb, prev.b}, prev.a, bar(prev.b), m, k, n, False)
    _generic[key] = r
    return r


def _cone_base(k):
    ctx, a, b = glued_universal(CONE, k + 1, k)
    if k == 1:
        env = ctx.types
        ia, ib = classify(CONE, 2, a.term, env), classify(CONE, 2, b.term, env)
        f, g = ia.base, ib.base
        l = ib.front
        lin = linear0(3)
        lenv = lin.ctx.types
        fs = [v.term for v in lin.fs]
        right = compose(0, [fs[0], compose(0, fs[1:], lenv)], lenv)
        left = compose(0, [compose(0, fs[:2], lenv), fs[2]], lenv)
        head, ren = canonicalize(lin.ctx.entries,
                                 Arr(Arr(OBJ, lin.xs[0].term, lin.xs[3].term), right, left))
        check_head(head)
        ta = type_of(f, env)
        tl = type_of(l, env)
        place = {lin.xs[0]: ta.src, lin.xs[1]: ta.tgt, lin.xs[2]: type_of(g, env).tgt,
                 lin.xs[3]: tl.tgt, lin.fs[0]: f, lin.fs[1]: g, lin.fs[2]: l}
        assoc = Coh(head, [place[v] for v in ren])
        t = compose(1, [a.term, compose(0, [f, b.term], env), assoc], env)
        goal = _expected_type(CONE, ia, ib, 1)
        got = _must_check(ctx, t)
        if got is not goal:
            raise errors.RecheckFailed("the base cone composite has an unexpected type",
                                       expected=goal, got=got)
        return Generic(CONE, False, 2, 1, 2, ctx, t, a, b)
    prev = cone_generic(k, k - 1, k)
    return _sigma_step(prev, CONE, k, ctx, a, b, frozenset(range(1, k + 1)))


# ---------------------------------------------------------------------------
# expected types of composites

def _compose_faces(k, x, y, env):
    return compose(k, [x, y], env)


def _expected_type(kind, ia, ib, k):
    """The type a composite of ``ia`` and ``ib`` along ``k`` must have, from the closed formula."""
    env = ia.env
    m, n = ia.n, ib.n
    d = max(m, n)
    if kind == CYL:
        top = _compose_faces(k - 1, ia.top, ib.top, env)
        bot = _compose_faces(k - 1, ia.bot, ib.bot, env)
        if m == n == k + 1:
            back, front = ia.back, ib.front
        else:
            back = _apply(kind, ia.iterated("back", d - 1), ib.iterated("back", d - 1), k)
            front = _apply(kind, ia.iterated("front", d - 1), ib.iterated("front", d - 1), k)
        return cyl_type(env, top, bot, back, front)
    base = _compose_faces(k - 1, ia.base, ib.base, env)
    if m == n == k + 1:
        back, front = ia.back, ib.front
    else:
        back = _apply(kind, ia.iterated("back", d - 1), ib.iterated("back", d - 1), k)
        front = _apply(kind, ia.iterated("front", d - 1), ib.iterated("front", d - 1), k)
    return cone_type(env, base, back, front)


def _apply(kind, ia, ib, k):
    g = cyl_generic(ia.n, k, ib.n) if kind == CYL else cone_generic(ia.n, k, ib.n)
    return g.apply(ia.filler, ib.filler, ia.env)


def expected_composite_type(a, b, k):
    return _expected_type(a.kind, a, b, k)


# ---------------------------------------------------------------------------
# public operations on instances

def _check_pair(a, b, kind):
    if a.kind != kind or b.kind != kind:
        raise errors.ShapeMismatch(f"expected two {kind} instances", which="kind")
    if a.env is not b.env and a.env != b.env:
        raise errors.FacesMismatch("the two arguments live in different contexts")


def cyl_comp(a, b, k):
    """``a m∘k n b`` for cylinder instances."""
    _check_pair(a, b, CYL)
    if k < 1:
        raise errors.UnsupportedIndices("cylinder composition along k = 0 is not supported",
                                        m=a.n, k=k, n=b.n)
    if k >= max(a.n, b.n):
        raise errors.IndexOutOfRange(f"k must be below the dimension, got k={k}")
    if front_k(a, k) is not back_k(b, k):
        raise errors.FacesMismatch(f"front^{k} of the first is not back^{k} of the second",
                                   k=k)
    g = cyl_generic(a.n, k, b.n)
    t = g.apply(a.filler, b.filler, a.env)
    return classify(CYL, g.dim, t, a.env)


def cyl_stack(a, b):
    _check_pair(a, b, CYL)
    if a.n != b.n:
        raise errors.ShapeMismatch("stacking needs cylinders of the same dimension",
                                   which="dimension")
    if a.bot is not b.top:
        raise errors.FacesMismatch("the bottom of the first is not the top of the second")
    g = cyl_stack_generic(a.n)
    t = g.apply(a.filler, b.filler, a.env)
    return classify(CYL, a.n, t, a.env)


def cone_comp(a, b, k):
    """``a m▹k n b`` for cone instances."""
    _check_pair(a, b, CONE)
    if k < 1:
        raise errors.UnsupportedIndices("cone composition along k = 0 is not supported",
                                        m=a.n, k=k, n=b.n)
    if k >= max(a.n, b.n):
        raise errors.IndexOutOfRange(f"k must be below the dimension, got k={k}")
    if front_k(a, k) is not back_k(b, k):
        raise errors.FacesMismatch(f"front^{k} of the first is not back^{k} of the second",
                                   k=k)
    g = cone_generic(a.n, k, b.n)
    t = g.apply(a.filler, b.filler, a.env)
    return classify(CONE, g.dim, t, a.env)


def generic(name, *idx):
    """The generic composite behind a builtin name."""
    if name == "cylcomp":
        return cyl_generic(*idx)
    if name == "cylstack":
        return cyl_stack_generic(*idx)
    if name == "conecomp":
        return cone_generic(*idx)
    raise errors.UnknownName(f"no builtin {name}", name=name)
