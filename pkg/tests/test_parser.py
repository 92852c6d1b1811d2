from fractions import Fraction

import pytest

from bihv.catalog.parser import (Add, Integer, Mul, Neg, ParseError, Pow, RationalLit, Variable,
                                 parse_ast, parse_expr, tokenize)
from bihv.catalog.registry import Corpus
from bihv.poly import to_text
from bihv.rings import lambda_ring, ring_from_spec

LAM = lambda_ring()


def test_zero():
    assert parse_expr("0", LAM).is_zero()


def test_two_term_round_trip():
    p = parse_expr("3/2*tau^2 - 4*phi*psi", LAM)
    tau, phi, psi = LAM.var("tau"), LAM.var("phi"), LAM.var("psi")
    assert p == (tau ** 2).scale(Fraction(3, 2)) - 4 * phi * psi
    assert parse_expr(to_text(p), LAM) == p


def test_rational_literal_folds():
    assert parse_ast("3/2") == RationalLit(value=Fraction(3, 2))
    assert parse_ast("4/2") == RationalLit(value=Fraction(2))


def test_ast_shapes():
    x = Variable(name="x")
    assert parse_ast("x") == x
    assert parse_ast("-x^2") == Neg(operand=Pow(base=x, exponent=2))
    assert parse_ast("1 + 2*x") == Add(left=Integer(value=1), right=Mul(left=Integer(value=2), right=x))


def test_precedence_and_unary_minus():
    tau = LAM.var("tau")
    assert parse_expr("-tau^2", LAM) == -(tau ** 2)
    assert parse_expr("2 - -tau", LAM) == 2 + tau
    assert parse_expr("(1 + tau)^2 - 2*tau", LAM) == 1 + tau ** 2
    assert parse_expr("tau/2", LAM) == tau.scale(Fraction(1, 2))


def test_comments_and_line_breaks():
    text = "# a comment\n  tau\n  # another\n  + 1  # trailing\n"
    assert parse_expr(text, LAM) == LAM.var("tau") + 1


@pytest.mark.parametrize("text, line, col", [
    ("2 tau", 1, 3),            # implicit multiplication
    ("tau +", 1, 6),
    ("(tau", 1, 5),
    ("tau^-1", 1, 5),           # negative exponent
    ("tau^2^3", 1, 6),
    ("tau\n  $", 2, 3),
    ("tau^x", 1, 5),
])
def test_syntax_errors_carry_location(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_expr(text, LAM)
    assert (info.value.line, info.value.col) == (line, col)


def test_unknown_variable_rejected():
    with pytest.raises(ParseError, match="unknown variable 'lm1'"):
        parse_expr("lm1 + tau", LAM)


def test_division_by_nonconstant_rejected():
    with pytest.raises(ParseError):
        parse_expr("tau / phi", LAM)
    with pytest.raises(ParseError):
        parse_expr("tau / 0", LAM)


def test_tokens_track_columns():
    toks = tokenize("ab +\n 12")
    assert [(t.kind, t.line, t.col) for t in toks] == [
        ("NAME", 1, 1), ("OP", 1, 4), ("INT", 2, 2), ("END", 2, 4)]


def test_n_means_n1_plus_one():
    assert parse_expr("n", LAM) == LAM.var("n1") + 1


def test_taup0_c_degrees():
    corpus = Corpus()
    p = corpus.expected("taup0-c")
    assert p.degree("phi") == 14
    assert p.degree("n1") == 6


def test_whole_corpus_round_trips():
    corpus = Corpus()
    for name, entry in corpus.entries.items():
        if entry.file is None:
            continue
        ring = ring_from_spec(entry.ring)
        p = parse_expr(corpus.text(name), ring)
        again = parse_expr(to_text(p), ring)
        assert again == p, name
        assert to_text(again) == to_text(p)
