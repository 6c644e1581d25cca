import random
import zlib

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from orientvc.circle import element
from orientvc.formula import (And, Eq, Exists, Forall, InV, LanguageError, Not, Orient,
                              ParseError, Term, TheoryId, ZERO_TERM, canonical_rename,
                              format_formula, free_vars, is_quantifier_free, iter_atoms,
                              normalize_atom, parse_formula, parse_term, relativize_to_V,
                              substitute)
from orientvc.models import canonical_model, eval as eval_qf, random_element
from orientvc.qe.generator import FormulaGenerator

from conftest import theories

x, y, z = Term.var("x"), Term.var("y"), Term.var("z")


# -- parsing -----------------------------------------------------------------

def test_parse_orient_collects_terms():
    assert parse_formula("O(0, x, y+y)") == Orient(ZERO_TERM, x, y + y)
    assert parse_formula("O(0, x, y+y)") == Orient(ZERO_TERM, x, Term({"y": 2}))


def test_parse_pair_formula():
    f = parse_formula("E x. (V(x - y1) & V(x - y2))", TheoryId.PAIR_TF_TF)
    assert isinstance(f, Exists) and f.var == "x"
    assert free_vars(f) == {"y1", "y2"}


def test_v_outside_pair_language():
    with pytest.raises(LanguageError):
        parse_formula("V(x)", TheoryId.DOG_TF)
    parse_formula("V(x)", TheoryId.PAIR_TOR_TF)


@pytest.mark.parametrize("text", ["O(x, y)", "E x O(0,x,y)", "x + = y", "V(x", "3 = x", "x @ y"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert 0 <= info.value.position <= len(text)
    assert "position" in str(info.value)


def test_precedence_and_scope():
    f = parse_formula("!x = y & O(0,x,y) | x = 0")
    assert format_formula(f) == "!(x = y) & O(0, x, y) | x = 0"
    g = parse_formula("E x. x = y & O(0, x, y)")
    assert isinstance(g, Exists) and isinstance(g.body, And)


def test_constants_and_coefficients():
    t = parse_term("-3*x + c[1/2 + 1/3*r2] - y")
    assert t.coeff("x") == -3 and t.coeff("y") == -1
    assert "c[" in str(t)


# -- normalization and rewriting ---------------------------------------------

def test_normalize_atom_examples():
    assert normalize_atom(Orient(y, x, y + y)) == Orient(ZERO_TERM, x - y, y)
    assert normalize_atom(Eq(x, x)) == Eq(ZERO_TERM, ZERO_TERM)
    assert normalize_atom(Orient(ZERO_TERM, x, y)) == Orient(ZERO_TERM, x, y)
    assert normalize_atom(InV(x - y)) == InV(x - y)


@pytest.mark.parametrize("text", ["O(y, x, 2*y)", "O(x - y, 3*y, z)", "2*x = y - z",
                                  "O(x, y, z)", "x + y = 2*z"])
@pytest.mark.parametrize("theory", list(TheoryId))
def test_normalize_atom_preserves_truth(text, theory):
    m = canonical_model(theory)
    a = parse_formula(text)
    n = normalize_atom(a)
    rng = random.Random(zlib.crc32(text.encode()))
    for _ in range(1000 // len(TheoryId)):
        s = {v: random_element(m, rng) for v in "xyz"}
        assert eval_qf(a, s, m) == eval_qf(n, s, m)


def test_relativize_examples():
    f = relativize_to_V(parse_formula("E z. z+z = y"))
    assert f == Exists("z", And((InV(z), Eq(z + z, y))))
    assert relativize_to_V(parse_formula("O(0,x,y)")) == parse_formula("O(0,x,y)")
    g = relativize_to_V(parse_formula("A z. O(0,z,y)"))
    assert format_formula(g) == "A z. !V(z) | O(0, z, y)"


def test_relativize_commutes_with_substitution():
    f = parse_formula("E z. (O(0, z, y) & O(z, x, 2*y))")
    t = parse_term("3*w - x")
    assert relativize_to_V(substitute(f, "y", t)) == substitute(relativize_to_V(f), "y", t)


def test_substitute_examples():
    assert substitute(parse_formula("O(0,x,y)"), "x", y + y) == Orient(ZERO_TERM, y + y, y)
    assert free_vars(parse_formula("E x. O(0,x,y)")) == {"y"}
    assert substitute(parse_formula("V(x-y)"), "y", ZERO_TERM) == InV(x)


def test_substitute_avoids_capture():
    f = parse_formula("E x. O(0, x, y)")
    g = substitute(f, "y", x)
    assert free_vars(g) == {"x"}
    assert isinstance(g, Exists) and g.var != "x"
    assert substitute(f, "x", y) == f


def test_canonical_rename_identifies_alpha_variants():
    a = parse_formula("E u. A v. O(u, v, y)")
    b = parse_formula("E p. A q. O(p, q, y)")
    assert a != b
    assert canonical_rename(a) == canonical_rename(b)


# -- round trip over generated formulas --------------------------------------

@settings(max_examples=200)
@given(theories, st.integers(0, 10 ** 6))
def test_print_parse_round_trip(theory, seed):
    f = FormulaGenerator(theory, seed=seed).formula()
    g = parse_formula(format_formula(f), theory)
    assert canonical_rename(g) == canonical_rename(f)


@settings(max_examples=100)
@given(st.integers(0, 10 ** 6))
def test_quantifier_free_detection(seed):
    f = FormulaGenerator(TheoryId.PAIR_TOR_TOR, seed=seed).formula()
    assert not is_quantifier_free(f)
    assert all(isinstance(a, (Eq, Orient, InV)) for a in iter_atoms(f))


def test_orient_with_repeated_argument_is_false():
    m = canonical_model(TheoryId.DOG_TOR)
    s = {"x": element(mpq(1, 3)), "y": element(mpq(1, 3))}
    assert not eval_qf(parse_formula("O(0, x, y)"), s, m)
    assert not eval_qf(parse_formula("O(x, x, 0)"), s, m)
    assert eval_qf(Not(parse_formula("O(0, x, y)")), s, m)
