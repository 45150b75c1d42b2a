"""Cylinder and cone shapes, faces, closed type formulas and composites."""

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from catt import errors
from catt.geometry import (CONE, CYL, back_k, classify, cone_comp, cone_generic, cone_shape,
                           cone_type, cyl_comp, cyl_generic, cyl_shape, cyl_stack,
                           cyl_stack_generic, cyl_type, expected_composite_type, formula_type,
                           front_k, generic, glued_universal)
from catt.kernel import OBJ, Arr, alpha_equiv, check_term, make_coh, subst_term, type_of
from catt.metaops import compose, linear0
from catt.naturality import build_up, depth_ctx, term_up, up_closure

import catalog

PROPS = settings(max_examples=100, deadline=None,
                 suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])


def by_name(ctx):
    return {v.name: v.term for v in ctx.vars}


def c(env, k, *ts):
    return compose(k, list(ts), env)


# --- shapes --------------------------------------------------------------------

def test_one_cylinder_is_an_arrow():
    sh = cyl_shape(1)
    assert [v.name for v in sh.ctx.vars] == ["top1", "bot1", "cyl1"]
    assert sh.ctx.types[sh.fill] is Arr(OBJ, sh.top.term, sh.bot.term)


def test_two_cylinder_context():
    sh = cyl_shape(2)
    v = by_name(sh.ctx)
    assert [x.name for x in sh.ctx.vars] == ["top1-", "top1+", "top2", "bot1-", "bot1+", "bot2",
                                              "cyl1-", "cyl1+", "cyl2"]
    env = sh.ctx.types
    assert env[sh.fill] is Arr(Arr(OBJ, v["top1-"], v["bot1+"]),
                               c(env, 0, v["top2"], v["cyl1+"]), c(env, 0, v["cyl1-"], v["bot2"]))
    assert len(sh.boundary) == 8


def test_two_cone_context():
    sh = cone_shape(2)
    v = by_name(sh.ctx)
    assert [x.name for x in sh.ctx.vars] == ["apex", "base1-", "base1+", "base2", "cone1-",
                                              "cone1+", "cone2"]
    env = sh.ctx.types
    assert env[sh.fill] is Arr(Arr(OBJ, v["base1-"], v["apex"]), v["cone1-"],
                               c(env, 0, v["base2"], v["cone1+"]))


def test_three_and_four_cones_alternate_sides():
    s3, s4 = cone_shape(3), cone_shape(4)
    v, env = by_name(s3.ctx), s3.ctx.types
    src = c(env, 1, v["cone2-"], c(env, 0, v["base3"], v["cone1+"]))
    assert env[s3.fill] is Arr(type_of(src, env), src, v["cone2+"])
    v, env = by_name(s4.ctx), s4.ctx.types
    tgt = c(env, 2, c(env, 1, v["cone2-"], c(env, 0, v["base4"], v["cone1+"])), v["cone3+"])
    assert env[s4.fill] is Arr(type_of(tgt, env), v["cone3-"], tgt)


def test_three_cylinder_type():
    sh = cyl_shape(3)
    v, env = by_name(sh.ctx), sh.ctx.types
    src = c(env, 1, c(env, 0, v["top3"], v["cyl1+"]), v["cyl2+"])
    tgt = c(env, 1, v["cyl2-"], c(env, 0, v["cyl1-"], v["bot3"]))
    assert env[sh.fill] is Arr(type_of(src, env), src, tgt)


@pytest.mark.parametrize("kind", [CYL, CONE])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_shapes_match_the_closed_formulas(kind, n):
    sh = cyl_shape(n) if kind == CYL else cone_shape(n)
    check_term(sh.ctx, sh.fill.term)
    inst = classify(kind, n, sh.fill.term, sh.ctx.types)
    assert formula_type(inst) is sh.ctx.types[sh.fill]
    assert [v for v, _ in sh.boundary.entries] == list(sh.ctx.vars[:-1])


def test_shapes_below_dimension_one():
    with pytest.raises(errors.IndexOutOfRange):
        cyl_shape(0)
    with pytest.raises(errors.IndexOutOfRange):
        cone_shape(0)


# --- faces ---------------------------------------------------------------------

def test_faces_of_the_two_cylinder():
    sh = cyl_shape(2)
    v = by_name(sh.ctx)
    inst = classify(CYL, 2, sh.fill.term, sh.ctx.types)
    assert inst.faces() == {"top": v["top2"], "bot": v["bot2"], "back": v["cyl1-"],
                            "front": v["cyl1+"]}


def test_faces_of_the_one_cone():
    sh = cone_shape(1)
    inst = classify(CONE, 1, sh.fill.term, sh.ctx.types)
    assert inst.base is sh.base.term
    assert inst.back is inst.front is sh.apex.term


@pytest.mark.parametrize("kind", [CYL, CONE])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_iterated_faces_at_or_above_the_dimension(kind, n):
    sh = cyl_shape(n) if kind == CYL else cone_shape(n)
    inst = classify(kind, n, sh.fill.term, sh.ctx.types)
    for k in range(n, n + 3):
        assert inst.iterated("back", k) is inst
        assert back_k(inst, k) is front_k(inst, k) is sh.fill.term


def test_iterated_faces_below_the_dimension():
    sh = cyl_shape(3)
    v = by_name(sh.ctx)
    inst = classify(CYL, 3, sh.fill.term, sh.ctx.types)
    assert back_k(inst, 2) is v["cyl2-"] and front_k(inst, 2) is v["cyl2+"]
    assert back_k(inst, 1) is v["cyl1-"] and front_k(inst, 1) is v["cyl1+"]


def test_a_term_that_is_not_a_cylinder():
    sh = cyl_shape(2)
    with pytest.raises(errors.ShapeMismatch):
        classify(CYL, 2, sh.top.term, sh.ctx.types)


def test_closed_formula_checks_its_equations():
    sh = cyl_shape(2)
    v, env = by_name(sh.ctx), sh.ctx.types
    with pytest.raises(errors.ShapeMismatch):
        cyl_type(env, v["top2"], v["top2"], v["cyl1-"], v["cyl1+"])
    assert cyl_type(env, v["top1-"], v["bot1-"]) is Arr(OBJ, v["top1-"], v["bot1-"])
    s = cone_shape(2)
    w, cenv = by_name(s.ctx), s.ctx.types
    assert cone_type(cenv, w["base2"], w["cone1-"], w["cone1+"]) is cenv[s.fill]
    with pytest.raises(errors.ShapeMismatch):
        cone_type(cenv, w["base2"], w["cone1+"], w["cone1-"])


@st.composite
def shape_and_substitution(draw):
    kind = draw(st.sampled_from([CYL, CONE]))
    n = draw(st.integers(1, 3))
    sh = cyl_shape(n) if kind == CYL else cone_shape(n)
    picked = draw(st.lists(st.sampled_from(list(sh.ctx.vars)), min_size=1, max_size=2))
    X = up_closure(sh.ctx, picked)
    if depth_ctx(sh.ctx, X) > 1:
        X = frozenset([sh.fill])
    plus = draw(st.booleans())
    return kind, n, sh, X, plus


@PROPS
@given(shape_and_substitution())
def test_instances_are_stable_under_substitution(setup):
    kind, n, sh, X, plus = setup
    up = build_up(sh.ctx, X)
    inj = up.injection(plus)
    m = {v: t for v, t in inj.pairs}
    env = up.ctx_up.types
    inst = classify(kind, n, sh.fill.term, sh.ctx.types)
    moved = classify(kind, n, subst_term(sh.fill.term, m), env)
    for name, face in inst.faces().items():
        assert moved.faces()[name] is subst_term(face, m)


# --- composites ----------------------------------------------------------------

def test_square_composite_is_naturality_of_composition():
    g = cyl_generic(2, 1, 2)
    two = catalog.two_arrows()
    fg = compose(0, [two["f"], two["g"]], two.env)
    assert alpha_equiv(g.term, term_up(two.ctx, fg, set(two.ctx.vars)))
    check_term(g.ctx, g.term)


def test_stacking_one_cylinders_composes_arrows():
    g = cyl_stack_generic(1)
    lin = linear0(2)
    assert alpha_equiv(g.term, compose(0, [f.term for f in lin.fs], lin.ctx.types))


def test_base_cone_composite():
    g = cone_generic(2, 1, 2)
    env = g.ctx.types
    v = by_name(g.ctx)
    ia = classify(CONE, 2, g.a.term, env)
    ib = classify(CONE, 2, g.b.term, env)
    f, gg, l_ = ia.base, ib.base, ib.front
    t = catalog.three_arrows()
    tenv = t.env
    rev = make_coh(t.ctx.entries, Arr(Arr(OBJ, t["x"], t["w"]),
                                      c(tenv, 0, t["f"], c(tenv, 0, t["g"], t["h"])),
                                      c(tenv, 0, c(tenv, 0, t["f"], t["g"]), t["h"])))
    fa, la = type_of(f, env), type_of(l_, env)
    alpha = subst_term(rev, {t.var("x"): fa.src, t.var("y"): fa.tgt, t.var("f"): f,
                             t.var("z"): type_of(gg, env).tgt, t.var("g"): gg,
                             t.var("w"): la.tgt, t.var("h"): l_})
    assert g.term is c(env, 1, g.a.term, c(env, 0, f, g.b.term), alpha)
    assert f is v["base2"]


@pytest.mark.parametrize("kind,m,k,n", [(CYL, 2, 1, 2), (CYL, 3, 1, 3), (CYL, 3, 2, 3),
                                        (CYL, 2, 1, 3), (CONE, 2, 1, 2), (CONE, 3, 1, 3),
                                        (CONE, 3, 2, 3), (CONE, 3, 1, 2)])
def test_composites_have_the_closed_formula_type(kind, m, k, n):
    g = cyl_generic(m, k, n) if kind == CYL else cone_generic(m, k, n)
    env = g.ctx.types
    ia = classify(kind, m, g.a.term, env)
    ib = classify(kind, n, g.b.term, env)
    assert check_term(g.ctx, g.term) is expected_composite_type(ia, ib, k)
    out = (cyl_comp if kind == CYL else cone_comp)(ia, ib, k)
    assert out.filler is g.term and out.n == max(m, n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_stacking_keeps_the_outer_faces(n):
    g = cyl_stack_generic(n)
    env = g.ctx.types
    ia, ib = classify(CYL, n, g.a.term, env), classify(CYL, n, g.b.term, env)
    out = cyl_stack(ia, ib)
    assert out.filler is g.term
    assert out.top is ia.top and out.bot is ib.bot
    check_term(g.ctx, g.term)


def test_builtin_dispatch():
    assert generic("cylcomp", 2, 1, 2) is cyl_generic(2, 1, 2)
    assert generic("conecomp", 2, 1, 2) is cone_generic(2, 1, 2)
    with pytest.raises(errors.UnknownName):
        generic("spherecomp", 2, 1, 2)


# --- errors --------------------------------------------------------------------

def pair(kind, d, k):
    ctx, a, b = glued_universal(kind, d, k)
    env = ctx.types
    return classify(kind, d, a.term, env), classify(kind, d, b.term, env)


@pytest.mark.parametrize("kind", [CYL, CONE])
def test_faces_that_do_not_meet(kind):
    ia, ib = pair(kind, 2, 1)
    op = cyl_comp if kind == CYL else cone_comp
    with pytest.raises(errors.FacesMismatch):
        op(ib, ia, 1)


def test_stacking_faces_that_do_not_meet():
    ia, ib = pair(CYL, 2, 1)
    with pytest.raises(errors.FacesMismatch):
        cyl_stack(ia, ib)


@pytest.mark.parametrize("kind", [CYL, CONE])
def test_composition_along_zero_is_unsupported(kind):
    ia, ib = pair(kind, 2, 1)
    op = cyl_comp if kind == CYL else cone_comp
    with pytest.raises(errors.UnsupportedIndices):
        op(ia, ib, 0)
    with pytest.raises(errors.UnsupportedIndices):
        (cyl_generic if kind == CYL else cone_generic)(2, 0, 2)


def test_composition_index_at_the_dimension():
    ia, ib = pair(CYL, 2, 1)
    with pytest.raises(errors.IndexOutOfRange):
        cyl_comp(ia, ib, 2)


def test_composing_a_cone_with_a_cylinder():
    ia, _ = pair(CYL, 2, 1)
    _, jb = pair(CONE, 2, 1)
    with pytest.raises(errors.ShapeMismatch):
        cyl_comp(ia, jb, 1)
