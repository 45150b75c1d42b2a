"""Parser, elaborator, printer and command line."""

import io
import pathlib
import subprocess
import sys

import pytest

from catt import errors
from catt.frontend import (Session, check_file, main, parse_text, print_context, print_term, size,
                           size_table)
from catt.frontend import syntax as S
from catt.frontend.cli import format_check, format_definition
from catt.frontend.elab import CheckResult
from catt.geometry import generic
from catt.kernel import OBJ, Arr, alpha_equiv, apply_sub, check_term, reset_session
from catt.metaops import compose

DEMOS = sorted((pathlib.Path(__file__).parent.parent / "demos").glob("example_*.catt"))

ASSOC = """
coh assoc (x y : *) (f : x -> y) (z : *) (g : y -> z) (w : *) (h : z -> w)
  : comp (comp f g) h -> comp f (comp g h)
"""

ASSOC_NAT = """
let assoc_nat (x y z w : *) (f_minus : x -> y)
  (f_plus : x -> y)
  (f_arrow : f_minus -> f_plus)
  (g : y -> z) (h : z -> w)
  = assoc [f_arrow] g h
"""

FG = "let fg (x y z : *) (f : x -> y) (g : y -> z) = comp f g\n"


def run(text):
    return Session().run(parse_text(text, "<test>"))


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# --- parsing -------------------------------------------------------------------

def test_naturality_listing_parses_to_a_bracketed_application():
    src = parse_text(ASSOC_NAT, "<listing>")
    [decl] = src.decls
    assert isinstance(decl, S.LetDecl) and decl.name == "assoc_nat"
    body = decl.body
    assert isinstance(body, S.App) and body.head.name == "assoc"
    assert [isinstance(a, S.Bracket) for a in body.args] == [True, False, False]
    assert body.args[0].body.name == "f_arrow"
    assert [[n.name for n in b.names] for b in decl.tele][:2] == [["x", "y", "z", "w"], ["f_minus"]]


def test_builtin_check_statement():
    [decl] = parse_text("check conecomp(2,1,2)", "<t>").decls
    assert isinstance(decl, S.CheckDecl)
    assert isinstance(decl.body, S.Builtin) and decl.body.name == "conecomp"
    assert decl.body.indices == (2, 1, 2)


@pytest.mark.parametrize("text", ["let t (x : *) = f [x", "let t (x : * = x",
                                  "check cylcomp(2,1", "let t (x y : *) (f : x ->) = f"])
def test_syntax_errors_carry_a_span(text):
    with pytest.raises(errors.SyntaxError) as info:
        parse_text(text, "<t>")
    assert info.value.span is not None and info.value.span.line == 1


def test_comments_and_primes_in_names():
    [decl] = parse_text("-- note\nlet id' (x : *) (f' : x -> x) = f' -- tail\n", "<t>").decls
    assert decl.name == "id'"


# --- elaboration ---------------------------------------------------------------

def test_functoriality_file():
    s = run(FG + """
let fg_up (x y z : *) (f_minus f_plus : x -> y) (f_arrow : f_minus -> f_plus) (g : y -> z)
  : comp f_minus g -> comp f_plus g
  = fg [f_arrow] g
""")
    d = s.defs["fg_up"]
    v = {x.name: x.term for x in d.ctx.vars}
    env = d.ctx.types
    assert d.term is compose(0, [v["f_arrow"], v["g"]], env)
    assert d.ty is Arr(Arr(OBJ, v["x"], v["z"]), compose(0, [v["f_minus"], v["g"]], env),
                       compose(0, [v["f_plus"], v["g"]], env))


def test_associator_naturality_has_the_square_type():
    s = run(ASSOC + ASSOC_NAT)
    d = s.defs["assoc_nat"]
    v = {x.name: x.term for x in d.ctx.vars}
    env = d.ctx.types
    a = s.defs["assoc"]
    names = [x.name for x in a.ctx.vars]
    assert names == ["x", "y", "f", "z", "g", "w", "h"]

    def alpha(f):
        images = [v["x"], v["y"], v[f], v["z"], v["g"], v["w"], v["h"]]
        return apply_sub(a.term, dict(zip(a.ctx.vars, images)))

    def c(k, *ts):
        return compose(k, list(ts), env)
    gh = c(0, v["g"], v["h"])
    src = c(1, alpha("f_minus"), c(0, v["f_arrow"], gh))
    tgt = c(1, c(0, c(0, v["f_arrow"], v["g"]), v["h"]), alpha("f_plus"))
    base = Arr(Arr(OBJ, v["x"], v["w"]), c(0, c(0, v["f_minus"], v["g"]), v["h"]),
               c(0, v["f_plus"], gh))
    assert d.ty is Arr(base, src, tgt)


def test_unknown_name():
    with pytest.raises(errors.UnknownName) as info:
        run("let t (x : *) = y")
    assert info.value.span.line == 1


def test_bracket_set_that_is_not_up_closed():
    text = FG + "let bad (a b : *) (p : a -> b) (y z : *) (f : b -> y) (g : y -> z)\n" \
                "  = fg [p] y z f g\n"
    with pytest.raises(errors.XNotUpClosed) as info:
        run(text)
    assert info.value.span is not None and info.value.span.line == 3


@pytest.mark.parametrize("cell,n", [("(a : f -> g) = a", 5),
                                    ("(a b : f -> g) (m : a -> b) = m", 7)])
def test_bracketing_an_object_under_a_higher_cell(cell, n):
    text = (f"let top (x y : *) (f g : x -> y) {cell}\n"
            f"let bad (z : *) = top {' '.join(['[z]'] * n)}\n")
    with pytest.raises(errors.DepthExceeded) as info:
        run(text)
    assert info.value.span.line == 2


def test_duplicate_definition():
    with pytest.raises(errors.DuplicateDefinition):
        run(FG + FG)


def test_declared_type_is_checked():
    with pytest.raises(errors.TypeMismatch):
        run("let t (x y : *) (f : x -> y) : y -> x = f")


def test_coherence_with_a_non_pasting_context():
    with pytest.raises(errors.NotAPastingContext):
        run("coh bad (x y : *) (f g : x -> y) : x -> y")


def test_builtin_with_unsupported_indices():
    with pytest.raises(errors.UnsupportedIndices):
        run("check cylcomp(2,0,2)")


def test_builtin_applied_to_faces_that_do_not_meet():
    text = ("let sq (x y x' y' : *) (f : x -> y) (f' : x' -> y') (p : x -> x') (q : y -> y')\n"
            "  (a : comp f q -> comp p f') (b : comp f q -> comp p f')\n"
            "  = cylcomp(2,1,2) a b\n")
    with pytest.raises(errors.FacesMismatch):
        run(text)


# --- printing ------------------------------------------------------------------

@pytest.mark.parametrize("name,idx", [("cylcomp", (2, 1, 2)), ("cylcomp", (3, 1, 3)),
                                      ("cylcomp", (3, 2, 3)), ("cylstack", (3,)),
                                      ("conecomp", (2, 1, 2)), ("conecomp", (3, 2, 3))])
def test_printed_builtins_reparse(name, idx):
    g = generic(name, *idx)
    ty = check_term(g.ctx, g.term)
    text = format_check(CheckResult(g.ctx, g.term, ty))
    back = run(text).checks[0]
    assert alpha_equiv(back.term, g.term, back.ctx, g.ctx)
    assert alpha_equiv(back.ty, ty, back.ctx, g.ctx)
    assert format_check(back) == text


def test_printing_is_deterministic_across_sessions():
    texts = []
    for _ in range(2):
        reset_session()
        g = generic("cylcomp", 2, 1, 2)
        texts.append(print_term(g.term, print_context(g.ctx)[1]))
    assert texts[0] == texts[1]


@pytest.mark.parametrize("path", DEMOS, ids=lambda p: p.name)
def test_definitions_recheck_from_their_printed_form(path):
    s = check_file(str(path))
    printed = "\n".join(format_definition(d) for d in s.order)
    again = run(printed)
    assert [d.name for d in again.order] == [d.name for d in s.order]
    for a, b in zip(s.order, again.order):
        assert alpha_equiv(a.ctx, b.ctx)
        assert alpha_equiv(a.ty, b.ty, a.ctx, b.ctx)
        if a.kind != "coh":
            assert alpha_equiv(a.term, b.term, a.ctx, b.ctx)


def test_sizes_are_byte_lengths():
    g = generic("cylcomp", 2, 1, 2)
    text = print_term(g.term)
    assert size(g.term) == len(text.encode("utf-8"))
    assert 80 <= size(g.term) <= 8180


def test_cone_size_is_near_the_reference():
    assert 50 <= size(generic("conecomp", 2, 1, 2).term) <= 5010


# --- command line --------------------------------------------------------------

@pytest.mark.parametrize("path", DEMOS, ids=lambda p: p.name)
def test_demos_check(path):
    code, out, err = cli("check", str(path))
    assert code == 0, err
    assert f"{path}: success" in out


def test_missing_file():
    code, _, err = cli("check", "/nonexistent/file.catt")
    assert code == 1 and err.startswith("error[FileNotFound]")


def test_error_diagnostic_has_code_and_span(tmp_path):
    p = tmp_path / "bad.catt"
    p.write_text(FG + "let bad (a b : *) (p : a -> b) (y z : *) (f : b -> y) (g : y -> z)\n"
                      "  = fg [p] y z f g\n")
    code, out, err = cli(str(p))
    assert code == 1 and "success" not in out
    assert err.startswith(f"error[XNotUpClosed] {p}:3:")


def test_internal_errors_exit_with_two(tmp_path, monkeypatch):
    from catt.frontend import cli as cli_module

    def boom(path):
        raise errors.InternalError("broken invariant")
    monkeypatch.setattr(cli_module, "check_file", boom)
    p = tmp_path / "ok.catt"
    p.write_text(FG)
    code, _, err = cli(str(p))
    assert code == 2 and err.startswith("error[InternalError]")


def test_size_table():
    code, out, _ = cli("--sizes", "cyl", "2..4")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 3
    assert [r.split()[0] for r in rows] == ["cylcomp(2,1,2)", "cylcomp(3,1,3)", "cylcomp(4,1,4)"]
    assert [int(r.split()[1]) for r in rows] == [n for _, _, n in size_table("cyl", range(2, 5))]


def test_print_a_definition(tmp_path):
    p = tmp_path / "fg.catt"
    p.write_text(FG)
    code, out, _ = cli(str(p), "--print", "fg")
    assert code == 0
    assert out.splitlines()[-1].startswith("let fg (x y z : *) (f : x -> y) (g : y -> z)")


def test_print_a_builtin():
    code, out, _ = cli("--print", "conecomp(2,1,2)")
    assert code == 0 and out.startswith("check ")


def test_bad_size_range():
    code, _, err = cli("--sizes", "cyl", "4..2")
    assert code == 1 and "SyntaxError" in err


def test_module_entry_point():
    demo = str(DEMOS[0])
    r = subprocess.run([sys.executable, "-m", "catt", "check", demo], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "success" in r.stdout
