"""First-order matching of pattern terms against actual terms.

A pattern lives over a context whose variables are the unknowns.  Binding an
unknown to a term also matches the unknown's declared type against the type
of the term, so assigning the locally maximal variables of a pasting context
determines every other variable.
"""

from . import errors
from .kernel import OBJ, Var, type_of


def _solve(pattern_types, work, env, sub):
    seen = set()
    while work:
        p, a = work.pop()
        key = (p, a)
        if key in seen:
            continue
        seen.add(key)
        if isinstance(p, Var):
            v = p.var
            if v in pattern_types:
                bound = sub.get(v)
                if bound is None:
                    sub[v] = a
                    _push_type(work, pattern_types[v], type_of(a, env))
                elif bound is not a:
                    raise errors.InferenceFailed(
                        f"{v.name} is needed both as {bound!r} and as {a!r}", var=v)
            elif p is not a:
                raise errors.InferenceFailed(f"expected {p!r}, found {a!r}")
        else:
            if isinstance(a, Var) or a.head is not p.head:
                raise errors.InferenceFailed(f"expected an instance of {p!r}, found {a!r}")
            work.extend(zip(p.args, a.args))
    return sub


def _push_type(work, pat, act):
    while True:
        if pat is OBJ or act is OBJ:
            if pat is not act:
                raise errors.InferenceFailed(f"dimension mismatch between {pat!r} and {act!r}")
            return
        work.append((pat.src, act.src))
        work.append((pat.tgt, act.tgt))
        pat, act = pat.base, act.base


def match(pattern_types, assignments, env, known=None):
    """Extend ``assignments`` (unknown -> term) to all unknowns it determines.

    ``pattern_types`` maps each unknown to its type and ``env`` gives the
    types of the actual variables.  Raises :class:`errors.InferenceFailed`
    on a clash."""
    work = [(v.term, t) for v, t in assignments.items()]
    return _solve(pattern_types, work, env, dict(known or {}))


def match_terms(pattern_types, pairs, env, known=None):
    return _solve(pattern_types, list(pairs), env, dict(known or {}))


def match_type(pattern_types, pat, act, env, known=None):
    """Match a pattern type against an actual type."""
    work = []
    _push_type(work, pat, act)
    return _solve(pattern_types, work, env, dict(known or {}))


def complete(pattern_ctx, sub):
    """Check that ``sub`` binds every variable of ``pattern_ctx``."""
    missing = [v.name for v in pattern_ctx.vars if v not in sub]
    if missing:
        raise errors.InferenceFailed(
            "cannot infer " + ", ".join(missing), missing=tuple(missing))
    return sub


def instantiate(pattern_ctx, assignments, env):
    """A substitution for every variable of ``pattern_ctx`` from a partial one."""
    return complete(pattern_ctx, match(pattern_ctx.types, assignments, env))
