from fractions import Fraction

import pytest

from bihv.catalog.parser import parse_expr
from bihv.catalog.registry import Corpus, corpus_elimination
from bihv.elimination import (DegenerateEliminationError, EliminationError, _squarefree,
                              account_cofactor, eliminate_tau, leading_coefficient,
                              pseudo_remainder, specialize_steps, univariate_content)
from bihv.poly import VarTable, proportionality, substitute, to_text
from bihv.rings import lambda_ring

LAM = lambda_ring()
T = VarTable(["a", "x", "y", "tau"])
a, x, y, tau = T.vars("a", "x", "y", "tau")


def P(text):
    return parse_expr(text, LAM)


@pytest.fixture(scope="module")
def taup_run():
    return corpus_elimination(str(Corpus().directory))


def test_self_remainder_is_zero():
    f = tau ** 3 * x + tau - y
    step = pseudo_remainder(f, f, "tau")
    assert step.remainder.is_zero() and step.verify()


def test_difference_of_squares():
    step = pseudo_remainder(tau ** 2 - a ** 2, tau - a, "tau")
    assert step.remainder.is_zero()
    assert step.quotient == tau + a


def test_pseudo_division_identity_and_delta():
    f = x * tau ** 3 + y * tau + 1
    g = (x + y) * tau ** 2 + 2 * x
    step = pseudo_remainder(f, g, "tau")
    assert step.delta == 2
    assert step.multiplier == (x + y) ** 2
    assert step.verify()
    assert step.remainder.degree("tau") < 2


def test_equal_degree_uses_exponent_one():
    step = pseudo_remainder(x * tau + 1, y * tau + 3, "tau")
    assert step.delta == 1 and step.multiplier == y and step.verify()


def test_extracted_content_is_signed():
    step = pseudo_remainder(tau ** 2, tau + 2, "tau")   # remainder 4
    assert step.remainder == T.one() and step.extracted == 4
    step = pseudo_remainder(-6 * tau ** 2 * x, tau + 1, "tau")
    assert step.extracted == -6 and step.remainder == x


def test_pseudo_remainder_errors():
    with pytest.raises(EliminationError):
        pseudo_remainder(tau, T.zero(), "tau")
    with pytest.raises(EliminationError):
        pseudo_remainder(tau, tau ** 2, "tau")


def test_leading_coefficients_of_corpus():
    corpus = Corpus()
    assert leading_coefficient(corpus.expected("taup3"), "tau") == P("9*(1 + phi^2)^2*(-7 + 8*phi^2)")
    assert leading_coefficient(corpus.expected("taup4"), "tau") == P("324*phi*(1 + phi^2)^3*(-3 + 2*phi^2)")
    assert leading_coefficient(x, "y") == x
    with pytest.raises(EliminationError):
        leading_coefficient(T.zero(), "tau")


def test_degenerate_inputs():
    with pytest.raises(DegenerateEliminationError):
        eliminate_tau(tau ** 2 + x, (tau - 1) * x, "tau")      # f_hi has lower degree
    with pytest.raises(DegenerateEliminationError):
        eliminate_tau(x + y, tau ** 2 + x, "tau")              # f_lo free of tau
    with pytest.raises(DegenerateEliminationError):
        eliminate_tau(T.zero(), tau, "tau")


def test_self_elimination_stops_gracefully():
    f = tau ** 2 * x + y
    report = eliminate_tau(f, f, "tau")
    assert report.stopped_early
    assert report.f2.is_zero() and report.f1 is None
    assert report.degrees() == {"f2": -1, "f1": None, "f0": None}


def test_small_elimination_is_resultant_like():
    # common root tau = 1 whenever a = 1: the final remainder must vanish there
    f3 = tau ** 3 - a
    f4 = tau ** 4 + x * tau ** 2 - 1 - x
    report = eliminate_tau(f3, f4, "tau")
    f0 = report.f0
    assert f0.degree("tau") == 0
    assert report.degrees() == {"f2": 2, "f1": 1, "f0": 0}
    assert substitute(f0, {"a": 1, "x": 3}).is_zero()
    assert not substitute(f0, {"a": 2, "x": 3}).is_zero()
    assert all(s.verify() for s in report.steps)


def test_taup_degrees_and_steps(taup_run):
    r = taup_run
    assert r.degrees() == {"f2": 2, "f1": 1, "f0": 0}
    assert [len(s.remainder) for s in r.steps] == [94, 233, 616]
    assert [s.extracted for s in r.steps] == [486, -36, 12]
    assert [s.delta for s in r.steps] == [2, 2, 2]
    assert all(s.verify() for s in r.steps)
    assert not r.f0.is_zero()


def test_taup_factors_divide(taup_run):
    checks = {c.name: c for c in taup_run.factor_checks}
    assert set(checks) == {"taup0-a", "taup0-b", "taup0-c"}
    assert all(c.divides for c in checks.values())
    assert [checks[n].quotient_terms for n in ("taup0-a", "taup0-b", "taup0-c")] == [546, 380, 296]
    assert len(taup_run.product_quotient) == 87


def test_taup_cofactor_accounting(taup_run):
    acc = taup_run.account
    assert acc.complete
    assert acc.constant == Fraction(2048, 9)
    got = {to_text(p): e for p, e, _ in acc.pieces}
    assert got == {"n1 + 3/2": 2, "phi^2 - 7/8": 4, "phi^2 + 1": 24, "psi": 12}
    rebuilt = LAM.const(acc.constant)
    for p, e, _ in acc.pieces:
        rebuilt = rebuilt * p ** e
    assert rebuilt == taup_run.product_quotient


def test_report_json_is_deterministic(taup_run):
    text = taup_run.to_json_text()
    assert text == taup_run.to_json_text()
    assert "time" not in text


def test_specialization_commutes(taup_run):
    corpus = Corpus()
    f3 = substitute(corpus.expected("taup3"), {"n1": 5})
    f4 = substitute(corpus.expected("taup4"), {"n1": 5})
    special = eliminate_tau(f3, f4, "tau")
    for general, spec in zip(specialize_steps(taup_run, {"n1": 5}), special.steps):
        assert proportionality(general, spec.remainder) is not None


def test_univariate_content_and_squarefree():
    p = (x ** 2 - 1) * (x + 2) * y + (x ** 2 - 1) * 3
    assert univariate_content(p, "x") == x ** 2 - 1
    # (x-1)^2 (x+1): squarefree pieces x-1 and x+1 (multiplicities dropped)
    pieces = _squarefree([Fraction(1), Fraction(-1), Fraction(-1), Fraction(1)])
    assert sorted(map(tuple, pieces)) == sorted([(1, -1), (1, 1)])


def test_account_cofactor_small():
    sources = [("lc", (x ** 2 + 1) ** 2 * y), ("lc2", x * (y - 1))]
    acc = account_cofactor((x ** 2 + 1) ** 3 * y * x ** 2 * 5, sources)
    assert acc.complete and acc.constant == 5
    assert account_cofactor(x + y + 7, sources).leftover == x + y + 7
