"""Naturality of contexts, types, terms, substitutions and coherences.

For an up-closed set ``X`` of variables of depth at most one, every variable
``x`` in ``X`` is split into a lower copy ``x-``, an upper copy ``x+`` and a
filler ``x~`` between them.  The duplicates of a variable are created once
and shared by every construction, which keeps all outputs deterministic and
lets memo tables be keyed on terms.
"""

from . import errors
from .kernel import (OBJ, Arr, Coh, Context, Substitution, Var, Variable, bound_var,
                     canonicalize, check_context, check_term, check_type, session_cache,
                     subst_term, subst_type, type_of)
from .metaops import (associator, compose, fresh_poles, linear0, suspend)
from .pasting import Node, PastingTree, boundary_vars, is_reduced, reduce, street_order


def dups(x):
    """``(x-, x+, x~)`` for a variable, created on first use."""
    d = x.dups
    if d is None:
        d = x.dups = (Variable(x.name + "-"), Variable(x.name + "+"), Variable(x.name + "~"))
    return d


def minus(x):
    return dups(x)[0]


def plus(x):
    return dups(x)[1]


def bar(x):
    return dups(x)[2]


# ---------------------------------------------------------------------------
# depth, up-closure, preimages

class DepthReport:
    __slots__ = ("d", "k")

    def __init__(self, d, k):
        self.d, self.k = d, k

    def __iter__(self):
        return iter((self.d, self.k))

    def __repr__(self):
        return f"DepthReport(d={self.d}, k={self.k})"


def _dim_var(x, env):
    return env[x].dim + 1


def depth_term(t, X, env):
    """``max {dim t - dim x : x in (Var t u Var A) n X}``, or -1."""
    ty = type_of(t, env)
    hit = (t.fv | ty.fv) & X
    if not hit:
        return -1
    d = ty.dim + 1
    return max(d - _dim_var(x, env) for x in hit)


def depth_type(a, X, env):
    hit = a.fv & X
    if not hit:
        return -1
    return max(a.dim - _dim_var(x, env) for x in hit)


def depth_ctx(ctx, X):
    env = ctx.types
    best = -1
    for v, _ in ctx.entries:
        best = max(best, depth_term(v.term, X, env))
    return best


def depth_sub(gamma, X, env):
    best = -1
    for _, t in gamma.pairs:
        best = max(best, depth_term(t, X, env))
    return best


def depth(X, focus, ctx):
    """Depth of ``X`` in ``ctx`` (``d``) and in ``focus`` (``k``)."""
    X = frozenset(X)
    env = ctx.types
    d = depth_ctx(ctx, X)
    if isinstance(focus, Context):
        k = depth_ctx(focus, X)
    elif isinstance(focus, Substitution):
        k = depth_sub(focus, X, env)
    elif isinstance(focus, Arr) or focus is OBJ:
        k = depth_type(focus, X, env)
    else:
        k = depth_term(focus, X, env)
    return DepthReport(d, k)


def up_closure(ctx, X):
    X = set(X)
    for v, a in ctx.entries:
        if v not in X and not a.fv.isdisjoint(X):
            X.add(v)
    return frozenset(X)


def is_up_closed(ctx, X):
    return up_closure(ctx, X) == frozenset(X)


def check_up_closed(ctx, X, exc=errors.NotUpClosed):
    X = frozenset(X)
    stray = X - ctx.fv
    if stray:
        raise exc(f"{sorted(v.name for v in stray)} are not variables of the context",
                  offending=tuple(stray))
    for v, a in ctx.entries:
        if v not in X and not a.fv.isdisjoint(X):
            x = next(iter(a.fv & X))
            raise exc(f"{v.name} depends on {x.name} but is not in the set",
                      offending=v, source=x)
    return X


def preimage(gamma, X):
    """``gamma^-1 X = {x | Var(x[gamma]) n X != {}}``."""
    X = frozenset(X)
    pairs = gamma.pairs if isinstance(gamma, Substitution) else gamma.items()
    return frozenset(v for v, t in pairs if not t.fv.isdisjoint(X))


# ---------------------------------------------------------------------------
# naturality of contexts

class Up:
    """The data of ``Gamma ^ X``: entries, variable types and the injections."""

    __slots__ = ("ctx", "X", "entries", "env", "inj_m", "inj_p", "_memo_m", "_memo_p",
                 "_dom", "_ctx_up", "_ctx_pm", "pm_len")

    def __init__(self, ctx, X):
        self.ctx = ctx
        self.X = X
        self.entries = []
        self.env = {}
        self.inj_m = {}
        self.inj_p = {}
        self._memo_m = {}
        self._memo_p = {}
        self._dom = None
        self._ctx_up = None
        self._ctx_pm = None
        self.pm_len = 0

    def lower(self, t):
        if not self.inj_m:
            return t
        return subst_term(t, self.inj_m, self._memo_m, self.dom)

    def upper(self, t):
        if not self.inj_p:
            return t
        return subst_term(t, self.inj_p, self._memo_p, self.dom)

    def lower_type(self, a):
        return subst_type(a, self.inj_m, self._memo_m, self.dom) if self.inj_m else a

    def upper_type(self, a):
        return subst_type(a, self.inj_p, self._memo_p, self.dom) if self.inj_p else a

    @property
    def dom(self):
        if self._dom is None or len(self._dom) != len(self.inj_m):
            self._dom = frozenset(self.inj_m)
        return self._dom

    @property
    def ctx_up(self):
        if self._ctx_up is None:
            self._ctx_up = Context(self.entries)
        return self._ctx_up

    @property
    def ctx_pm(self):
        if self._ctx_pm is None:
            self._ctx_pm = Context(self.entries[:self.pm_len])
        return self._ctx_pm

    def injection(self, plus_side):
        inj = self.inj_p if plus_side else self.inj_m
        return Substitution((v, inj.get(v, v.term)) for v in self.ctx.vars)


class NaturalityOutput:
    __slots__ = ("ctxPM", "ctxUp", "injMinus", "injPlus")

    def __init__(self, up):
        self.ctxPM = up.ctx_pm
        self.ctxUp = up.ctx_up
        self.injMinus = up.injection(False)
        self.injPlus = up.injection(True)


_up_cache = session_cache()


def build_up(ctx, X):
    """Naturality of a context, memoised on ``(ctx, X)``; no checks."""
    key = (ctx, X)
    up = _up_cache.get(key)
    if up is not None:
        return up
    up = Up(ctx, X)
    env = up.env
    for v, a in ctx.entries:
        if v not in X:
            up.entries.append((v, a))
            env[v] = a
            up.pm_len = len(up.entries)
            continue
        m, p, b = dups(v)
        am, ap = up.lower_type(a), up.upper_type(a)
        up.entries.append((m, am))
        up.entries.append((p, ap))
        env[m], env[p] = am, ap
        up.pm_len = len(up.entries)
        ab = _type_up_fresh(a, v, up)
        up.inj_m[v] = m.term
        up.inj_p[v] = p.term
        up.entries.append((b, ab))
        env[b] = ab
    _up_cache[key] = up
    return up


def _type_up_fresh(a, x, up):
    m, p, _ = dups(x)
    if a is OBJ:
        return Arr(OBJ, m.term, p.term)
    n = a.base.dim + 1
    base = Arr(up.lower_type(a.base), up.lower(a.src), up.upper(a.tgt))
    src = m.term
    if not a.tgt.fv.isdisjoint(up.X):
        src = compose(n, [src, _term_up(a.tgt, up)], up.env)
    tgt = p.term
    if not a.src.fv.isdisjoint(up.X):
        tgt = compose(n, [_term_up(a.src, up), tgt], up.env)
    return Arr(base, src, tgt)


def _type_up_term(a, t, up):
    if a is OBJ:
        return Arr(OBJ, up.lower(t), up.upper(t))
    n = a.base.dim + 1
    base = Arr(up.lower_type(a.base), up.lower(a.src), up.upper(a.tgt))
    src = up.lower(t)
    if not a.tgt.fv.isdisjoint(up.X):
        src = compose(n, [src, _term_up(a.tgt, up)], up.env)
    tgt = up.upper(t)
    if not a.src.fv.isdisjoint(up.X):
        tgt = compose(n, [_term_up(a.src, up), tgt], up.env)
    return Arr(base, src, tgt)


# ---------------------------------------------------------------------------
# naturality of terms

_term_memo = session_cache()


def _term_up(t, up):
    """``t ^ X`` for a term over ``up.ctx``; requires ``Var(t) n X`` non-empty."""
    if isinstance(t, Var):
        x = t.var
        if x not in up.X:
            raise errors.DepthExceeded(f"{x.name} does not meet the chosen variables", depth=-1)
        return bar(x).term
    hit = t.fv & up.X
    if not hit:
        raise errors.DepthExceeded("the term does not meet the chosen variables", depth=-1)
    key = (t, hit)
    r = _term_memo.get(key)
    if r is None:
        head = t.head
        ys = []
        sub = {}
        for i, a in enumerate(t.args):
            b = bound_var(i)
            if a.fv.isdisjoint(up.X):
                sub[b] = a
            else:
                ys.append(b)
                m, p, bb = dups(b)
                sub[m] = up.lower(a)
                sub[p] = up.upper(a)
                sub[bb] = _term_up(a, up)
        c = coh_up_head(head, frozenset(ys))
        r = subst_term(c, sub)
        _term_memo[key] = r
    return r


def sub_up_map(pairs, up):
    """``gamma ^ X`` as a list of pairs, for ``gamma`` given as ``(var, term)`` pairs."""
    out = []
    for v, t in pairs:
        if t.fv.isdisjoint(up.X):
            out.append((v, t))
        else:
            m, p, b = dups(v)
            out.append((m, up.lower(t)))
            out.append((p, up.upper(t)))
            out.append((b, _term_up(t, up)))
    return out


# ---------------------------------------------------------------------------
# naturality of coherences

_coh_memo = session_cache()


def coh_up_head(head, Y):
    """``coh_{Gamma,A} ^ Y`` as a term over ``Gamma ^ Y`` (bound-variable space)."""
    key = (head, Y)
    r = _coh_memo.get(key)
    if r is None:
        up = build_up(head.ctx, Y)
        d = depth_ctx(head.ctx, Y)
        if d <= 0:
            r = _coh_up_depth0(head, up)
        else:
            lin = _linear_shape(head)
            if lin is not None:
                r = _coh_up_linear(head, up, *lin)
            elif is_reduced(head.tree):
                r = _coh_up_reduced(head, up)
            else:
                r = _coh_up_general(head, up)
        _coh_memo[key] = r
    return r


def _coh_up_depth0(head, up):
    ident = Coh(head, head.identity_args)
    ty = _type_up_term(head.ty, ident, up)
    new_head, ren = canonicalize(up.entries, ty)
    if head._unbiased and new_head._unbiased is None:
        # registers the head as an unbiased composite when it is one
        from .metaops import comp_head
        from .pasting import check_ps
        comp_head(check_ps(up.ctx_up))
    return Coh(new_head, [v.term for v in ren])


def _linear_shape(head):
    """``(n, k)`` when the head is the unbiased composite of k >= 2 cells in a row."""
    if not head._unbiased:
        return None
    node = head.tree.root
    n = 0
    while len(node.children) == 1 and len(node.sectors) == 2:
        node = node.children[0]
        n += 1
    k = len(node.children)
    if k < 2 or any(c.children for c in node.children):
        return None
    return n, k


_linear_memo = session_cache()


def _coh_up_linear(head, up, n, k):
    lin = linear0(k)
    offset = 2 * n
    hvars = head.vars[offset:]
    to_lin = dict(zip(hvars, lin.ctx.vars))
    Y0 = frozenset(to_lin[y] for y in up.X)
    t0 = assemble_linear_raw(k, Y0)
    up0 = build_up(lin.ctx, Y0)
    ctx_s = Context(up0.entries)
    t = t0
    for _ in range(n):
        pp = fresh_poles(ctx_s)
        ctx_s = suspend(ctx_s, pp)
        t = suspend(t, pp)
    if len(ctx_s.entries) != len(up.entries):
        raise errors.InternalError("suspended linear context does not line up")
    ren = {v: w.term for (v, _), (w, _) in zip(ctx_s.entries, up.entries)}
    return subst_term(t, ren)


def _inl(z, up):
    return minus(z).term if z in up.X else z.term


def _inr(z, up):
    return plus(z).term if z in up.X else z.term


def scan_sub_raw(k, j, up):
    """``psi^X_{k,j}`` from the k+1 arrow context into the k arrow one, as a dict."""
    lin = linear0(k)
    big = linear0(k + 1)
    xs, fs = lin.xs, lin.fs
    bx, bf = big.xs, big.fs
    psi = {bx[0]: _inl(xs[0], up)}
    for i in range(k + 1):
        if i < j:
            psi[bx[i + 1]] = _inl(xs[i + 1], up)
            psi[bf[i]] = _inl(fs[i], up)
        elif i == j:
            psi[bx[i + 1]] = _inr(xs[i], up)
            psi[bf[i]] = bar(xs[j]).term
        else:
            psi[bx[i + 1]] = _inr(xs[i], up)
            psi[bf[i]] = _inr(fs[i - 1], up)
    return psi


def whisker_phase_raw(k, j, up):
    lin = linear0(k)
    cells = []
    for i, f in enumerate(lin.fs):
        if i < j:
            cells.append(_inl(f, up))
        elif i == j:
            cells.append(bar(f).term)
        else:
            cells.append(_inr(f, up))
    return compose(0, cells, up.env)


def linear_phases(k, Y0):
    """The phases of the naturality of the k-ary 1-composite, in composition order."""
    lin = linear0(k)
    up = build_up(lin.ctx, Y0)
    order = [v for v in street_order(lin.tree) if v in Y0]
    xs, fs = list(lin.xs), list(lin.fs)
    phases = []
    for v in reversed(order):
        if v in xs:
            j = xs.index(v)
            psi = scan_sub_raw(k, j, up)
            phases.append(("assoc", j, subst_term(associator(k, j), psi)))
        else:
            j = fs.index(v)
            phases.append(("whisker", j, whisker_phase_raw(k, j, up)))
    return phases


def assemble_linear_raw(k, Y0):
    key = (k, Y0)
    r = _linear_memo.get(key)
    if r is None:
        lin = linear0(k)
        up = build_up(lin.ctx, Y0)
        phases = [t for _, _, t in linear_phases(k, Y0)]
        try:
            r = compose(1, phases, up.env)
        except errors.BoundaryMismatch as exc:
            raise errors.PhasesNotComposable(str(exc)) from exc
        _linear_memo[key] = r
    return r


def partition(tree, X):
    """``(X^m, X^l, X^lm, X^b)`` for a pasting tree of dimension n."""
    from .pasting import locally_maximal
    n = tree.dim
    env = tree.ctx.types
    lm = frozenset(locally_maximal(tree))
    x_lm = X & lm
    x_m = frozenset(x for x in X if env[x].dim + 1 == n)
    return x_m, x_lm - x_m, x_lm, X - x_lm


def theta_raw(tree, up):
    """``theta_{Gamma,X}`` as a dict from the variables of ``Gamma ^ X^lm``."""
    X = up.X
    _, _, x_lm, x_b = partition(tree, X)
    n = tree.dim
    minus_bd = boundary_vars(tree, n - 1, False)
    plus_bd = boundary_vars(tree, n - 1, True)
    theta = {}
    for v in tree.vars:
        if v in x_lm:
            m, p, b = dups(v)
            bt = up.env[b]
            theta[b] = b.term
            theta[m] = bt.src
            theta[p] = bt.tgt
        elif v in x_b:
            in_m, in_p = v in minus_bd, v in plus_bd
            if in_m == in_p:
                raise errors.InternalError(
                    f"{v.name} lies in both boundaries or in neither; the side is ambiguous")
            theta[v] = (minus(v) if in_m else plus(v)).term
        else:
            theta[v] = v.term
    return theta


def _coh_up_reduced(head, up):
    tree = head.tree
    n = tree.dim
    X = up.X
    _, _, x_lm, _ = partition(tree, X)
    theta = theta_raw(tree, up)
    middle = subst_term(coh_up_head(head, x_lm), theta)
    jm = _interchanger(head, up, True)
    jp = _interchanger(head, up, False)
    try:
        return compose(n, [jm, middle, jp], up.env)
    except errors.BoundaryMismatch as exc:
        raise errors.InternalError(f"reduced naturality does not compose: {exc}") from exc


class InterchangerData:
    """The pieces of an interchanger: its pasting contexts, substitutions and endpoints."""

    __slots__ = ("Phi", "Psi", "phi", "psi", "p", "q", "theta", "partition", "term")

    def __init__(self, **kw):
        for k in self.__slots__:
            setattr(self, k, kw.get(k))


def _interchanger(head, up, plus_side):
    return interchanger_data(head, up, plus_side).term


def interchanger_data(head, up, plus_side):
    """``j-`` (``plus_side=True``) or ``j+`` for a reduced head.

    ``j-`` looks at the target boundary and reads the context through inl;
    ``j+`` looks at the source boundary and reads it through inr."""
    tree = head.tree
    n = tree.dim
    X = up.X
    ident = Coh(head, head.identity_args)
    inj = _inl if plus_side else _inr
    parts = partition(tree, X)
    theta = theta_raw(tree, up)
    side = boundary_vars(tree, n - 1, plus_side)
    Y = X & side
    if not Y:
        ty = Arr(head.ty, ident, ident)
        h, ren = canonicalize(head.ctx.entries, ty)
        phi = {v: inj(v, up) for v in ren}
        return InterchangerData(Phi=tree, Psi=tree, phi=phi, psi=None, p=ident, q=ident,
                                theta=theta, partition=parts, term=Coh(h, [phi[v] for v in ren]))
    _, x_l, _, x_b = parts
    y_l, y_b = Y & x_l, Y & x_b

    def graft_node(node, h, ys):
        if h == n - 1:
            s = node.sectors[-1] if plus_side else node.sectors[0]
            if s not in ys:
                return node
            if plus_side:
                return Node(node.sectors + (plus(s),), node.children + (Node([bar(s)]),))
            return Node((minus(s),) + node.sectors, (Node([bar(s)]),) + node.children)
        return Node(node.sectors, [graft_node(c, h + 1, ys) for c in node.children])

    phi_tree = PastingTree(graft_node(tree.root, 0, Y))
    psi_tree = PastingTree(graft_node(tree.root, 0, y_b))
    phi_env = phi_tree.ctx.types
    a = head.ty
    v_side = a.tgt if plus_side else a.src
    collapse = {}
    for y in Y:
        m, p, _ = dups(y)
        collapse[m if plus_side else p] = y.term
    p_nat = subst_term(_term_up(v_side, build_up(head.ctx, Y)), collapse)
    # the reduction of Psi read back over Phi
    sigma = {}
    for node in _nodes_at(tree.root, 0, n - 1):
        s = node.sectors[-1] if plus_side else node.sectors[0]
        if s in y_b:
            cell = node.children[-1 if plus_side else 0].sectors[0]
            if plus_side:
                sigma[s] = plus(s).term
                sigma[cell] = compose(n - 1, [cell.term, bar(s).term], phi_env)
            else:
                sigma[s] = minus(s).term
                sigma[cell] = compose(n - 1, [bar(s).term, cell.term], phi_env)
    coh_sigma = Coh(head, [sigma.get(v, v.term) for v in head.vars])
    q_nat = None
    if y_l:
        rn = {}
        for y in y_l:
            m, p, _ = dups(y)
            rn[m if plus_side else p] = y.term
        for y in y_b:
            rn[y] = (plus(y) if plus_side else minus(y)).term
        q_nat = subst_term(_term_up(v_side, build_up(head.ctx, y_l)), rn)
    if plus_side:
        p = compose(n - 1, [ident, p_nat], phi_env)
        q = compose(n - 1, [coh_sigma, q_nat], phi_env) if q_nat is not None else coh_sigma
        ty = Arr(type_of(p, phi_env), p, q)
    else:
        p = compose(n - 1, [p_nat, ident], phi_env)
        q = compose(n - 1, [q_nat, coh_sigma], phi_env) if q_nat is not None else coh_sigma
        ty = Arr(type_of(p, phi_env), q, p)
    h, ren = canonicalize(phi_tree.ctx.entries, ty)
    phi = {v: (inj(v, up) if v in head.ctx.types else v.term) for v in ren}
    psi = {v: v.term for v in psi_tree.vars}
    return InterchangerData(Phi=phi_tree, Psi=psi_tree, phi=phi, psi=psi, p=p, q=q,
                            theta=theta, partition=parts, term=Coh(h, [phi[v] for v in ren]))


def _nodes_at(node, h, target):
    if h == target:
        yield node
        return
    for c in node.children:
        yield from _nodes_at(c, h + 1, target)


def _coh_up_general(head, up):
    tree = head.tree
    n = tree.dim
    red = reduce(tree)
    a = head.ty
    head_r, ren_r = canonicalize(red.reduced.ctx.entries, a)
    rho_args = [red.rho[v] for v in ren_r]
    coh_r = Coh(head_r, rho_args)
    ident = Coh(head, head.identity_args)
    e_head, e_ren = canonicalize(head.ctx.entries, Arr(a, ident, coh_r))
    e = Coh(e_head, [v.term for v in e_ren])
    er_head, er_ren = canonicalize(head.ctx.entries, Arr(a, coh_r, ident))
    e_rev = Coh(er_head, [v.term for v in er_ren])
    em = up.lower(e)
    if not a.tgt.fv.isdisjoint(up.X):
        em = compose(n - 1, [em, _term_up(a.tgt, up)], up.env)
    ep = up.upper(e_rev)
    if not a.src.fv.isdisjoint(up.X):
        ep = compose(n - 1, [_term_up(a.src, up), ep], up.env)
    middle = _term_up(coh_r, up)
    try:
        return compose(n, [em, middle, ep], up.env)
    except errors.BoundaryMismatch as exc:
        raise errors.InternalError(f"general naturality does not compose: {exc}") from exc


# ---------------------------------------------------------------------------
# public entry points: eager depth checks and a kernel re-check of every output

def _prepare(ctx, X):
    ctx = check_context(ctx)
    X = check_up_closed(ctx, X)
    d = depth_ctx(ctx, X)
    if d > 1:
        raise errors.DepthExceeded(f"the set has depth {d} in the context; at most 1 is supported",
                                   depth=d)
    return ctx, X


def _recheck(ctx, t, expected):
    try:
        got = check_term(ctx, t)
    except errors.CattError as exc:
        raise errors.RecheckFailed(f"generated term does not check: {exc}", cause=exc) from exc
    if got is not expected:
        raise errors.RecheckFailed("generated term checks at an unexpected type",
                                   expected=expected, got=got)
    return t


def ctx_up(ctx, X, check=True):
    """``(Gamma =>X, Gamma ^ X, inj-, inj+)`` as a :class:`NaturalityOutput`."""
    ctx, X = _prepare(ctx, X)
    up = build_up(ctx, X)
    out = NaturalityOutput(up)
    if check:
        from .kernel import check_sub
        check_context(out.ctxUp)
        check_sub(out.ctxPM, out.injMinus, ctx)
        check_sub(out.ctxPM, out.injPlus, ctx)
    return out


def type_up_fresh(ctx, a, x, X):
    """``A ^x X``: the type of the filler of a fresh variable ``x : A``."""
    ctx, X = _prepare(ctx, X)
    if x in ctx.types:
        raise errors.DuplicateVariable(f"{x.name} is not fresh", var=x)
    check_type(ctx, a)
    d = depth_type(a, X, ctx.types)
    if d > 0:
        raise errors.DepthExceeded(f"the type has depth {d}; a fresh variable over it would "
                                   f"have depth {d + 1}", depth=d + 1)
    ext = Context(ctx.entries + ((x, a),))
    return build_up(ext, X | {x}).env[bar(x)]


def type_up_term(ctx, a, t, X):
    """``A ^t X`` for ``t : A``."""
    ctx, X = _prepare(ctx, X)
    got = check_term(ctx, t)
    if got is not a:
        raise errors.TypeMismatch(f"the term has type {got!r}, not {a!r}", expected=a, got=got)
    _term_depth(ctx, t, X)
    return _type_up_term(a, t, build_up(ctx, X))


def _term_depth(ctx, t, X):
    d = depth_term(t, X, ctx.types)
    if d > 1:
        raise errors.DepthExceeded(f"the term has depth {d}; at most 1 is supported", depth=d)
    if d < 0:
        raise errors.DepthExceeded("the term does not meet the chosen variables", depth=d)
    return d


def term_up(ctx, t, X, check=True):
    """``t ^ X``, re-checked at ``A ^t X``."""
    ctx, X = _prepare(ctx, X)
    a = check_term(ctx, t)
    _term_depth(ctx, t, X)
    up = build_up(ctx, X)
    r = _term_up(t, up)
    if check:
        _recheck(up.ctx_up, r, _type_up_term(a, t, up))
    return r


def sub_up(delta, gamma, X, target=None, check=True):
    """``gamma ^ X`` for ``delta |- gamma : target``; ``X`` lives in ``delta``."""
    from .kernel import check_sub
    delta, X = _prepare(delta, X)
    if not isinstance(gamma, Substitution):
        gamma = Substitution(gamma.items() if isinstance(gamma, dict) else gamma)
    d = depth_sub(gamma, X, delta.types)
    if d > 1:
        raise errors.DepthExceeded(f"the substitution has depth {d}", depth=d)
    up = build_up(delta, X)
    out = Substitution(sub_up_map(gamma.pairs, up))
    if check and target is not None:
        check_sub(delta, gamma, target)
        tgt_up = build_up(check_context(target), preimage(gamma, X))
        check_sub(up.ctx_up, out, tgt_up.ctx_up)
    return out


def coh_up(tree, a, X, check=True):
    """``coh_{Gamma,A} ^ X`` over ``Gamma ^ X`` for a pasting context and a full type."""
    from .kernel import check_head
    from .pasting import check_ps
    if not isinstance(tree, PastingTree):
        tree = check_ps(tree)
    ctx = tree.ctx
    head, ren = canonicalize(ctx.entries, a)
    check_head(head)
    return term_up(ctx, Coh(head, [v.term for v in ren]), X, check)


def _linear_set(k, X):
    lin = linear0(k)
    by_name = {v.name: v for v in lin.ctx.vars}
    out = set()
    for x in X:
        v = by_name.get(x) if isinstance(x, str) else x
        if v not in lin.ctx.types:
            raise errors.UnknownName(f"{x!r} is not a variable of the linear context", name=str(x))
        out.add(v)
    return lin, frozenset(out)


def linear_variables(k):
    """The variables ``x0 .. xk, f0 .. f(k-1)`` of the context of k composable arrows."""
    return linear0(k).ctx.vars


def scan_sub(k, j, X):
    """``psi^X_{k,j}`` as a substitution into the context of k+1 arrows."""
    if k < 1 or not 0 <= j <= k:
        raise errors.IndexOutOfRange(f"scan_sub needs k >= 1 and 0 <= j <= k, got {k}, {j}")
    lin, X = _linear_set(k, X)
    if lin.xs[j] not in X:
        raise errors.IndexOutOfRange(f"x{j} is not in the set", index=j)
    _, X = _prepare(lin.ctx, X)
    up = build_up(lin.ctx, X)
    psi = scan_sub_raw(k, j, up)
    out = Substitution((v, psi[v]) for v in linear0(k + 1).ctx.vars)
    from .kernel import check_sub
    check_sub(up.ctx_up, out, linear0(k + 1).ctx)
    return out


def whisker_phase(k, j, X):
    """``w^X_{k,j}``."""
    if k < 1 or not 0 <= j < k:
        raise errors.IndexOutOfRange(f"whisker_phase needs 0 <= j < k, got {k}, {j}")
    lin, X = _linear_set(k, X)
    if lin.fs[j] not in X:
        raise errors.IndexOutOfRange(f"f{j} is not in the set", index=j)
    _, X = _prepare(lin.ctx, X)
    up = build_up(lin.ctx, X)
    r = whisker_phase_raw(k, j, up)
    check_term(up.ctx_up, r)
    return r


def assemble_linear(k, X):
    """``comp^0_k ^ X`` by phases, re-checked at its naturality type."""
    if k < 2:
        raise errors.IndexOutOfRange(f"the linear composite needs k >= 2, got {k}")
    lin, X = _linear_set(k, X)
    _, X = _prepare(lin.ctx, X)
    if not X:
        raise errors.DepthExceeded("the set is empty", depth=-1)
    up = build_up(lin.ctx, X)
    r = assemble_linear_raw(k, X)
    comp = Coh(_comp_of(lin.tree), [v.term for v in lin.ctx.vars])
    return _recheck(up.ctx_up, r, _type_up_term(comp.ty, comp, up))


def _comp_of(tree):
    from .metaops import comp_head
    return comp_head(tree)


def _reduced_head(tree, a, X):
    from .kernel import check_head
    from .pasting import check_ps
    if not isinstance(tree, PastingTree):
        tree = check_ps(tree)
    if not is_reduced(tree):
        raise errors.NotAPastingContext("the pasting context is not reduced", position=0)
    ctx, X = _prepare(tree.ctx, X)
    head, ren = canonicalize(ctx.entries, a)
    check_head(head)
    to_b = {v: bound_var(i) for i, v in enumerate(ren)}
    back = {}
    for v, b in to_b.items():
        back[b] = v.term
        for dv, db in zip(dups(v), dups(b)):
            back[db] = dv.term
    return head, frozenset(to_b[x] for x in X), back


def theta(tree, X):
    """``theta_{Gamma,X}`` from ``Gamma ^ X^lm`` into ``Gamma ^ X``."""
    from .pasting import check_ps
    if not isinstance(tree, PastingTree):
        tree = check_ps(tree)
    ctx, X = _prepare(tree.ctx, X)
    up = build_up(ctx, X)
    th = theta_raw(tree, up)
    _, _, x_lm, _ = partition(tree, X)
    src = build_up(ctx, x_lm)
    out = Substitution((v, th[v]) for v in src.ctx_up.vars)
    from .kernel import check_sub
    check_sub(up.ctx_up, out, src.ctx_up)
    return out


def interchanger(side, tree, X, a):
    """``j-`` (side ``'-'``) or ``j+`` (side ``'+'``) over ``Gamma ^ X``."""
    return interchanger_full(side, tree, X, a).term


def interchanger_full(side, tree, X, a):
    """:class:`InterchangerData` of ``j-`` or ``j+``, with variables of ``tree``."""
    head, Y, back = _reduced_head(tree, a, X)
    up = build_up(head.ctx, Y)
    data = interchanger_data(head, up, side in ("-", "minus", False))
    data.term = subst_term(data.term, back)
    data.p = subst_term(data.p, back)
    data.q = subst_term(data.q, back)
    return data
