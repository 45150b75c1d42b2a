"""Hypothesis strategies for small globular contexts, terms and substitutions."""

from hypothesis import assume, strategies as st

from catt import errors
from catt.kernel import OBJ, Arr, Context, Variable, subst_type, type_of
from catt.metaops import compose, unbiased_comp
from catt.naturality import depth_ctx, up_closure
from catt.pasting import tree_from_shape


@st.composite
def tree_shapes(draw, max_vars=8):
    """Nested tuples describing a pasting tree with at most ``max_vars`` variables."""
    budget = [(max_vars - 1) // 2]

    def node(depth):
        children = []
        while budget[0] > 0 and depth < 4 and draw(st.booleans()):
            budget[0] -= 1
            children.append(node(depth + 1))
        return tuple(children)

    return node(0)


@st.composite
def pasting_trees(draw, max_vars=8, non_disc=False):
    tree = tree_from_shape(draw(tree_shapes(max_vars)))
    if non_disc:
        assume(not tree.is_disc())
    return tree


@st.composite
def extend_context(draw, entries, max_vars=8, prefix="e"):
    """Add random objects and arrows between parallel cells."""
    entries = list(entries)
    k = 0
    while len(entries) < max_vars and draw(st.booleans()):
        v = Variable(f"{prefix}{k}")
        k += 1
        if not entries or draw(st.integers(0, 3)) == 0:
            entries.append((v, OBJ))
            continue
        src_v, a = draw(st.sampled_from(entries))
        parallel = [w for w, b in entries if b is a]
        tgt_v = draw(st.sampled_from(parallel))
        entries.append((v, Arr(a, src_v.term, tgt_v.term)))
    return Context(entries)


@st.composite
def contexts(draw, max_vars=8):
    base = draw(pasting_trees(max(1, max_vars - 2)))
    return draw(extend_context(base.ctx.entries, max_vars))


def term_pool(ctx, with_composites=True):
    """Variables and binary composites of composable variables."""
    env = ctx.types
    pool = [v.term for v in ctx.vars]
    if not with_composites:
        return pool
    cells = [v for v in ctx.vars if env[v] is not OBJ]
    for a in cells:
        for b in cells:
            da, db = env[a].dim + 1, env[b].dim + 1
            for k in range(min(da, db)):
                try:
                    pool.append(compose(k, [a.term, b.term], env))
                except errors.BoundaryMismatch:
                    pass
    return pool


def pasting_pool(tree):
    pool = term_pool(tree.ctx)
    if not tree.is_disc():
        pool.append(unbiased_comp(tree))
    return pool


@st.composite
def substitutions(draw, target, ambient):
    """A well-typed substitution ``ambient |- sigma : target`` as a dict, drawn greedily."""
    pool = term_pool(ambient)
    env = ambient.types
    by_type = {}
    for t in pool:
        by_type.setdefault(type_of(t, env), []).append(t)
    sigma = {}
    memo = {}
    for v, a in target.entries:
        want = subst_type(a, sigma, memo)
        options = by_type.get(want, [])
        assume(options)
        sigma[v] = draw(st.sampled_from(options))
    return sigma


@st.composite
def copy_with_extras(draw, ctx, max_vars=8):
    """A renamed copy of ``ctx`` extended by random cells, so that ``ctx`` maps into it."""
    ren = {v: Variable(v.name + "'") for v in ctx.vars}
    s = {v: w.term for v, w in ren.items()}
    entries = [(ren[v], subst_type(a, s)) for v, a in ctx.entries]
    return draw(extend_context(entries, max_vars, prefix="g"))


@st.composite
def up_closed_sets(draw, ctx, max_depth=1, nonempty=True):
    vs = list(ctx.vars)
    picked = draw(st.lists(st.sampled_from(vs), min_size=1 if nonempty else 0,
                           max_size=3, unique=True))
    X = up_closure(ctx, picked)
    assume(depth_ctx(ctx, X) <= max_depth)
    return X


def locally_maximal(ctx):
    used = set()
    for _, a in ctx.entries:
        used |= a.fv
    return [v for v in ctx.vars if v not in used]


@st.composite
def depth0_sets(draw, ctx):
    """Non-empty up-closed sets of depth 0: exactly the sets of locally maximal variables."""
    lm = locally_maximal(ctx)
    return frozenset(draw(st.lists(st.sampled_from(lm), min_size=1, unique=True)))
