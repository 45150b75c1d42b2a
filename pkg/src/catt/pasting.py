"""Pasting contexts as rooted planar trees.

A node at height ``h`` carries a tuple of sectors, which are parallel
``h``-dimensional variables, and one child per gap between consecutive
sectors.  The child in gap ``i`` holds the ``(h+1)``-cells from sector ``i``
to sector ``i+1``.  Flattening a tree in the order of the pasting rules gives
back the context: root sector 0, then for every gap the next sector followed
by the first sector of the child and the child's own contents.
"""

from . import errors
from .kernel import OBJ, Arr, Context, Substitution, Variable, session_cache


class Node:
    __slots__ = ("sectors", "children")

    def __init__(self, sectors, children=()):
        self.sectors = tuple(sectors)
        self.children = tuple(children)
        assert len(self.sectors) == len(self.children) + 1

    def shape(self):
        return tuple(c.shape() for c in self.children)

    def __repr__(self):
        names = ",".join(v.name for v in self.sectors)
        if not self.children:
            return f"[{names}]"
        return f"[{names} | {' '.join(map(repr, self.children))}]"


class PastingTree:
    """A pasting context in tree form; ``ctx`` is its flattening."""

    __slots__ = ("root", "_ctx", "_dim")

    def __init__(self, root, ctx=None):
        self.root = root
        self._ctx = ctx
        self._dim = None

    @property
    def ctx(self):
        if self._ctx is None:
            self._ctx = Context(flatten(self.root))
        return self._ctx

    @property
    def dim(self):
        if self._dim is None:
            self._dim = _height(self.root)
        return self._dim

    @property
    def vars(self):
        return self.ctx.vars

    def shape(self):
        return self.root.shape()

    def is_disc(self):
        node = self.root
        while node.children:
            if len(node.children) != 1:
                return False
            node = node.children[0]
        return True

    def __repr__(self):
        return f"PastingTree({self.root!r})"


def _height(node):
    if not node.children:
        return 0
    return 1 + max(_height(c) for c in node.children)


def flatten(root):
    out = [(root.sectors[0], OBJ)]
    _flatten(root, OBJ, out)
    return out


def _flatten(node, ty, out):
    sectors = node.sectors
    for i, child in enumerate(node.children):
        nxt = sectors[i + 1]
        out.append((nxt, ty))
        cty = Arr(ty, sectors[i].term, nxt.term)
        out.append((child.sectors[0], cty))
        _flatten(child, cty, out)


def tree_to_context(tree):
    return tree.ctx


# ---------------------------------------------------------------------------
# the pasting judgement

_ps_cache = session_cache()


def check_ps(ctx):
    """Replay the pasting rules as a left-to-right scan and build the tree."""
    if not isinstance(ctx, Context):
        ctx = Context(ctx)
    cached = _ps_cache.get(ctx)
    if cached is not None:
        return cached
    entries = ctx.entries
    if not entries:
        raise errors.NotAPastingContext("the empty context is not a pasting context", position=0)
    x0, a0 = entries[0]
    if a0 is not OBJ:
        raise errors.NotAPastingContext("a pasting context starts with an object", position=0)
    root = ([x0], [])
    path = [(root, OBJ)]
    seen = {x0}
    i = 1
    while i < len(entries):
        y, a = entries[i]
        if i + 1 >= len(entries):
            raise errors.NotAPastingContext(
                f"{y.name} is not followed by an arrow into it", position=i)
        f, b = entries[i + 1]
        p = a.dim + 1
        if p >= len(path) or path[p][1] is not a or y in seen:
            raise errors.NotAPastingContext(
                f"{y.name} cannot extend the pasting context here", position=i)
        node = path[p][0]
        x = node[0][-1]
        if f in seen or f is y or b is not Arr(a, x.term, y.term):
            raise errors.NotAPastingContext(
                f"{f.name} must be an arrow {x.name} -> {y.name}", position=i + 1)
        seen.add(y)
        seen.add(f)
        node[0].append(y)
        child = ([f], [])
        node[1].append(child)
        del path[p + 1:]
        path.append((child, b))
        i += 2
    tree = PastingTree(_freeze(root), ctx)
    _ps_cache[ctx] = tree
    return tree


def is_pasting(ctx):
    try:
        check_ps(ctx)
        return True
    except errors.NotAPastingContext:
        return False


def _freeze(raw):
    return Node(raw[0], [_freeze(c) for c in raw[1]])


# ---------------------------------------------------------------------------
# building trees

_DIM_LETTERS = "xfamnpqrst"


def tree_from_shape(shape, prefix=""):
    """A tree of fresh variables with the given shape (nested tuples of children)."""
    counters = {}

    def name(h):
        k = counters.get(h, 0)
        counters[h] = k + 1
        letter = _DIM_LETTERS[h] if h < len(_DIM_LETTERS) else f"c{h}_"
        return f"{prefix}{letter}{k}"

    # sectors are created in flattening order so that names follow the context
    def build_ordered(sh, h, first):
        node_sectors = [first]
        node_children = []
        for child_shape in sh:
            nxt = Variable(name(h))
            node_sectors.append(nxt)
            node_children.append(build_ordered(child_shape, h + 1, Variable(name(h + 1))))
        return Node(node_sectors, node_children)

    return PastingTree(build_ordered(tuple(shape), 0, Variable(name(0))))


def chain(length):
    shape = ()
    for _ in range(length):
        shape = (shape,)
    return shape


def disc_shape(n):
    return chain(n)


def glued_shape(k, dims):
    """Shape of discs of dimensions ``dims`` glued in a row along their k-boundaries."""
    node = tuple(chain(d - k - 1) for d in dims)
    for _ in range(k):
        node = (node,)
    return node


def linear_shape(n, k):
    """Shape of the linear context: k composable (n+1)-cells along n-boundaries."""
    return glued_shape(n, [n + 1] * k)


class LinearContext:
    __slots__ = ("n", "k", "tree", "xs", "fs")

    def __init__(self, n, k, tree, xs, fs):
        self.n, self.k, self.tree, self.xs, self.fs = n, k, tree, xs, fs

    @property
    def ctx(self):
        return self.tree.ctx


def linear_context(n, k):
    """The context of ``k`` composable (n+1)-cells; ``xs`` are the n-cells."""
    if n < 0 or k < 0:
        raise errors.IndexOutOfRange(f"linear context needs n, k >= 0, got {n}, {k}")
    node = Node([Variable(f"x{i}") for i in range(k + 1)],
                [Node([Variable(f"f{i}")]) for i in range(k)])
    xs, fs = node.sectors, tuple(c.sectors[0] for c in node.children)
    for level in range(n - 1, -1, -1):
        node = Node([Variable(f"N{level}"), Variable(f"S{level}")], [node])
    return LinearContext(n, k, PastingTree(node), xs, fs)


# ---------------------------------------------------------------------------
# boundaries

def boundary_tree(tree, i, plus):
    """The tree of the i-boundary on the given side, sharing variables."""
    if i >= tree.dim:
        return tree
    return PastingTree(_boundary(tree.root, 0, i, plus))


def _boundary(node, h, i, plus):
    if h == i:
        return Node([node.sectors[-1] if plus else node.sectors[0]])
    return Node(node.sectors, [_boundary(c, h + 1, i, plus) for c in node.children])


def boundary(tree, i, side):
    """``(d_i^side Gamma, delta)`` where ``delta`` includes the boundary into ``tree``.

    ``side`` is ``'-'``/``'+'`` or a boolean meaning plus."""
    plus = side if isinstance(side, bool) else side in ("+", "plus")
    if not isinstance(tree, PastingTree):
        tree = check_ps(tree)
    bt = boundary_tree(tree, i, plus)
    ctx = bt.ctx
    return ctx, Substitution((v, v.term) for v in ctx.vars)


def boundary_vars(tree, i, plus):
    if i < 0:
        return frozenset()
    return frozenset(boundary_tree(tree, i, plus).ctx.vars)


def top_vars(tree):
    """Variables of maximal dimension."""
    n = tree.dim
    out = []
    _collect_height(tree.root, 0, n, out)
    return out


def _collect_height(node, h, target, out):
    if h == target:
        out.extend(node.sectors)
        return
    for c in node.children:
        _collect_height(c, h + 1, target, out)


def locally_maximal(tree):
    """Variables not in the boundary of any other variable: leaf sectors."""
    out = []

    def walk(node):
        if not node.children:
            out.append(node.sectors[0])
        for c in node.children:
            walk(c)
    walk(tree.root)
    return out


def street_order(tree):
    """Planar order: a node's sector i precedes its child i which precedes sector i+1."""
    out = []

    def walk(node):
        out.append(node.sectors[0])
        for i, c in enumerate(node.children):
            walk(c)
            out.append(node.sectors[i + 1])
    walk(tree.root)
    return out


def node_at_height(tree, h):
    out = []

    def walk(node, d):
        if d == h:
            out.append(node)
            return
        for c in node.children:
            walk(c, d + 1)
    walk(tree.root, 0)
    return out


# ---------------------------------------------------------------------------
# grafting

def graft(left, right, n):
    """``left (x)_n right``: glue along ``d+_n left = d-_n right``.

    Returns ``(tree, proj1, proj2)``; the projections map the variables of
    each argument to their images in the result.  Variables of ``right`` off
    the shared boundary are renamed to fresh copies."""
    proj2 = {}

    def copy(node):
        sectors = []
        for v in node.sectors:
            w = Variable(v.name)
            proj2[v] = w.term
            sectors.append(w)
        return Node(sectors, [copy(c) for c in node.children])

    def merge(g, d, h):
        if h == n:
            rest = copy(Node(d.sectors, d.children))
            proj2[d.sectors[0]] = g.sectors[-1].term
            return Node(g.sectors + rest.sectors[1:], g.children + rest.children)
        if len(g.sectors) != len(d.sectors):
            raise errors.BoundaryMismatch(
                f"boundaries disagree at height {h}: {len(g.sectors)} vs {len(d.sectors)} sectors")
        for a, b in zip(g.sectors, d.sectors):
            proj2[b] = a.term
        return Node(g.sectors, [merge(a, b, h + 1) for a, b in zip(g.children, d.children)])

    if n < 0:
        raise errors.BoundaryMismatch("grafting level must be non-negative")
    root = merge(left.root, right.root, 0)
    result = PastingTree(root)
    proj1 = {v: v.term for v in left.vars}
    return result, proj1, proj2


# ---------------------------------------------------------------------------
# reduction

class ReductionResult:
    __slots__ = ("reduced", "rho", "fused")

    def __init__(self, reduced, rho, fused):
        self.reduced = reduced
        self.rho = rho
        self.fused = fused


def is_reduced(tree):
    n = tree.dim
    if n == 0:
        return True
    return all(len(node.children) <= 1 for node in node_at_height(tree, n - 1))


_reduce_cache = session_cache()


def reduce(tree):
    """Fuse the top cells glued along codimension-1 boundaries.

    ``rho`` maps each variable of the reduced tree to a term over ``tree``:
    the identity on kept variables, and the unbiased composite of the fused
    cells for the new ones.  ``fused`` maps each new variable to that list."""
    cached = _reduce_cache.get(tree.ctx)
    if cached is not None:
        return cached
    from .metaops import compose
    n = tree.dim
    env = tree.ctx.types
    rho = {v: v.term for v in tree.vars}
    fused = {}

    def walk(node, h):
        if h == n - 1:
            if len(node.children) <= 1:
                return node
            cells = [c.sectors[0] for c in node.children]
            w = Variable(f"{cells[0].name}_{cells[-1].name}")
            rho[w] = compose(n - 1, [c.term for c in cells], env)
            fused[w] = cells
            return Node([node.sectors[0], node.sectors[-1]], [Node([w])])
        return Node(node.sectors, [walk(c, h + 1) for c in node.children])

    if n == 0:
        result = ReductionResult(tree, rho, fused)
    else:
        reduced = PastingTree(walk(tree.root, 0))
        rho = {v: rho[v] for v in reduced.vars}
        result = ReductionResult(reduced, rho, fused)
    _reduce_cache[tree.ctx] = result
    return result
