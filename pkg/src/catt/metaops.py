"""Suspension, opposites, unbiased and biased composites, associators."""

from . import errors
from .kernel import (OBJ, Arr, Coh, Context, Substitution, Term, Type, Var, Variable,
                     bound_var, canonicalize, session_cache, type_of)
from .pasting import (Node, PastingTree, boundary_tree, glued_shape, linear_context,
                      tree_from_shape)
from .unify import match

# ---------------------------------------------------------------------------
# suspension

_poles = []


def poles(level=0):
    while len(_poles) <= level:
        _poles.append((Variable("N"), Variable("S")))
    return _poles[level]


def fresh_poles(*objs):
    """The first pole pair not occurring in any of ``objs``."""
    used = set()
    for o in objs:
        if isinstance(o, dict):
            used |= set(o)
        elif isinstance(o, Context):
            used |= o.fv
        else:
            used |= o.fv
    level = 0
    while True:
        n, s = poles(level)
        if n not in used and s not in used:
            return n, s
        level += 1


_susp_head = session_cache()
_susp_term = session_cache()


def suspend_head(head):
    r = _susp_head.get(head)
    if r is None:
        n, s = poles(0)
        pn = (n.term, s.term)
        entries = [(n, OBJ), (s, OBJ)]
        for v, a in head.ctx.entries:
            entries.append((v, _susp_type(a, pn)))
        new_head, _ = canonicalize(entries, _susp_type(head.ty, pn))
        if head._unbiased:
            new_head._unbiased = True
            new_head.label = "comp"
        r = _susp_head[head] = new_head
    return r


def _susp_type(a, pn):
    if a is OBJ:
        return Arr(OBJ, pn[0], pn[1])
    return Arr(_susp_type(a.base, pn), _susp(a.src, pn), _susp(a.tgt, pn))


def _susp(t, pn):
    if isinstance(t, Var):
        return t
    key = (t, pn)
    r = _susp_term.get(key)
    if r is None:
        r = Coh(suspend_head(t.head), pn + tuple(_susp(a, pn) for a in t.args))
        _susp_term[key] = r
    return r


def suspend(x, pole_pair=None):
    """Suspension of a context, type, term or substitution.

    Contexts get a fresh pair of poles prepended; for the other kinds the
    poles can be given (as the variables returned by :func:`context_poles`)."""
    if isinstance(x, Context):
        n, s = pole_pair or fresh_poles(x)
        pn = (n.term, s.term)
        return Context([(n, OBJ), (s, OBJ)] + [(v, _susp_type(a, pn)) for v, a in x.entries])
    n, s = pole_pair or fresh_poles(x)
    pn = (n.term, s.term)
    if isinstance(x, Type):
        return _susp_type(x, pn)
    if isinstance(x, Term):
        return _susp(x, pn)
    if isinstance(x, Substitution):
        return Substitution([(n, pn[0]), (s, pn[1])] + [(v, _susp(t, pn)) for v, t in x.pairs])
    raise TypeError(f"cannot suspend {type(x).__name__}")


def context_poles(ctx):
    """The poles of a suspended context (its first two entries)."""
    return ctx.entries[0][0], ctx.entries[1][0]


def iterate_suspend_head(head, n):
    for _ in range(n):
        head = suspend_head(head)
    return head


# ---------------------------------------------------------------------------
# opposites

_op_head = session_cache()
_op_term = session_cache()


def _op_tree(node, h, m):
    children = [_op_tree(c, h + 1, m) for c in node.children]
    if h + 1 in m:
        return Node(reversed(node.sectors), reversed(children))
    return Node(node.sectors, children)


def op_head(head, m):
    """``(H', perm)``: the opposite head and, for each of its positions, the old one."""
    key = (head, m)
    r = _op_head.get(key)
    if r is None:
        tree = head.tree
        rev = PastingTree(_op_tree(tree.root, 0, m))
        entries = rev.ctx.entries
        new_ty = op_type(head.ty, m)
        new_head, ren = canonicalize(entries, new_ty)
        if head._unbiased:
            new_head._unbiased = True
            new_head.label = "comp"
        perm = tuple(head.ctx.index(v) for v in ren)
        r = _op_head[key] = (new_head, perm)
    return r


def op_type(a, m):
    if a is OBJ:
        return a
    src, tgt = op_term(a.src, m), op_term(a.tgt, m)
    if a.dim + 1 in m:
        src, tgt = tgt, src
    return Arr(op_type(a.base, m), src, tgt)


def op_term(t, m):
    if isinstance(t, Var) or not m:
        return t
    key = (t, m)
    r = _op_term.get(key)
    if r is None:
        new_head, perm = op_head(t.head, m)
        r = Coh(new_head, [op_term(t.args[i], m) for i in perm])
        _op_term[key] = r
    return r


def opposite(x, m):
    """``op_M`` on a context, type, term or substitution."""
    m = frozenset(m)
    if isinstance(x, Context):
        return Context((v, op_type(a, m)) for v, a in x.entries)
    if isinstance(x, Type):
        return op_type(x, m)
    if isinstance(x, Term):
        return op_term(x, m)
    if isinstance(x, Substitution):
        return Substitution((v, op_term(t, m)) for v, t in x.pairs)
    if isinstance(x, PastingTree):
        return PastingTree(_op_tree(x.root, 0, m))
    raise TypeError(f"cannot take the opposite of {type(x).__name__}")


# ---------------------------------------------------------------------------
# unbiased composites

_comp_head = session_cache()


def comp_head(tree):
    """The head of the unbiased composite over a non-disc tree's shape."""
    shape = tree.shape()
    head = _comp_head.get(shape)
    if head is None:
        env = tree.ctx.types
        src = unbiased_comp(boundary_tree(tree, tree.dim - 1, False))
        tgt = unbiased_comp(boundary_tree(tree, tree.dim - 1, True))
        ty = Arr(type_of(src, env), src, tgt)
        head, _ = canonicalize(tree.ctx.entries, ty)
        head._unbiased = True
        head.label = "comp"
        _comp_head[shape] = head
    return head


def unbiased_comp(tree):
    """``comp_Gamma``: the top variable of a disc, else the composite coherence."""
    if tree.is_disc():
        node = tree.root
        while node.children:
            node = node.children[0]
        return node.sectors[0].term
    return Coh(comp_head(tree), [v.term for v in tree.vars])


def is_unbiased(head):
    return bool(head._unbiased)


_glued = session_cache()


def glued_tree(k, dims):
    """Discs of the given dimensions glued along k; cached with its top cells."""
    key = (k, dims)
    r = _glued.get(key)
    if r is None:
        tree = tree_from_shape(glued_shape(k, dims))
        node = tree.root
        for _ in range(k):
            node = node.children[0]
        tops = []
        for child in node.children:
            c = child
            while c.children:
                c = c.children[0]
            tops.append(c.sectors[0])
        comp = unbiased_comp(tree)
        r = _glued[key] = (tree, tuple(tops), comp)
    return r


def compose(k, terms, env):
    """The unbiased composite of ``terms`` along their k-boundaries.

    ``env`` gives the types of the variables the terms live over.  A single
    term is returned unchanged."""
    terms = list(terms)
    if len(terms) == 1:
        return terms[0]
    if not terms:
        raise errors.IndexOutOfRange("nothing to compose")
    dims = tuple(type_of(t, env).dim + 1 for t in terms)
    if min(dims) <= k:
        raise errors.BoundaryMismatch(f"cannot compose cells of dimensions {dims} along {k}")
    tree, tops, comp = glued_tree(k, dims)
    try:
        sub = match(tree.ctx.types, dict(zip(tops, terms)), env)
    except errors.InferenceFailed as exc:
        raise errors.BoundaryMismatch(f"cells are not composable along {k}: {exc}") from exc
    return Coh(comp.head, [sub[v] for v in tree.vars])


def compose2(k, a, b, env):
    return compose(k, [a, b], env)


# ---------------------------------------------------------------------------
# biased composites and associators

_bcomp = session_cache()


def linear0(k):
    """The cached linear context of k composable 1-cells."""
    key = ("lin", k)
    r = _bcomp.get(key)
    if r is None:
        r = _bcomp[key] = linear_context(0, k)
    return r


def biased_comp(k, j):
    """``bcomp_{k,j}`` over the linear context of k+1 arrows."""
    if k <= 0 or not 0 <= j <= k + 1:
        raise errors.IndexOutOfRange(f"bcomp needs k > 0 and 0 <= j <= k+1, got k={k}, j={j}")
    key = ("bcomp", k, j)
    r = _bcomp.get(key)
    if r is None:
        lin = linear0(k + 1)
        env = lin.ctx.types
        fs = [f.term for f in lin.fs]

        if j == 0:
            r = compose(0, [fs[0], compose(0, fs[1:], env)], env)
        elif j == k + 1:
            r = compose(0, [compose(0, fs[:k], env), fs[k]], env)
        else:
            pair = compose(0, [fs[j - 1], fs[j]], env)
            r = compose(0, fs[:j - 1] + [pair] + fs[j + 1:], env)
        _bcomp[key] = r
    return r


def associator(k, j):
    """``assoc_{k,j} : bcomp_{k,j+1} -> bcomp_{k,j}``, an (inv) coherence."""
    if k <= 0 or not 0 <= j <= k:
        raise errors.IndexOutOfRange(f"assoc needs k > 0 and 0 <= j <= k, got k={k}, j={j}")
    key = ("assoc", k, j)
    r = _bcomp.get(key)
    if r is None:
        lin = linear0(k + 1)
        src, tgt = biased_comp(k, j + 1), biased_comp(k, j)
        ty = Arr(Arr(OBJ, lin.xs[0].term, lin.xs[-1].term), src, tgt)
        head, ren = canonicalize(lin.ctx.entries, ty)
        head.label = "assoc"
        r = _bcomp[key] = Coh(head, [v.term for v in ren])
    return r


def identity_coh(ctx_entries, t, env=None):
    """``coh_{Gamma, t -> t}[id]`` for a term over a pasting context."""
    env = env or dict(ctx_entries)
    ty = Arr(type_of(t, env), t, t)
    head, ren = canonicalize(ctx_entries, ty)
    return Coh(head, [v.term for v in ren])


def sub_args(head, sub):
    """Arguments of ``head`` read off a substitution from its bound variables."""
    return [sub[bound_var(i)] for i in range(len(head.ctx))]
