"""A kernel for the type theory of weak omega-categories, with naturality and
the cylinder and cone constructions built on it."""

from . import errors, geometry, kernel, metaops, naturality, pasting
from .errors import CattError
from .geometry import (classify, cone_comp, cone_shape, cone_type, cyl_comp, cyl_shape,
                       cyl_stack, cyl_type)
from .kernel import (OBJ, Arr, Coh, Context, Substitution, Var, Variable, alpha_equiv,
                     check_context, check_sub, check_term, check_type, reset_session)
from .naturality import coh_up, ctx_up, sub_up, term_up, type_up_fresh, type_up_term

__all__ = [
    "OBJ", "Arr", "CattError", "Coh", "Context", "Substitution", "Var", "Variable",
    "alpha_equiv", "check_context", "check_sub", "check_term", "check_type", "classify",
    "coh_up", "cone_comp", "cone_shape", "cone_type", "ctx_up", "cyl_comp", "cyl_shape",
    "cyl_stack", "cyl_type", "errors", "geometry", "kernel", "metaops", "naturality",
    "pasting", "reset_session", "sub_up", "term_up", "type_up_fresh", "type_up_term",
]
