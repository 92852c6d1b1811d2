from fractions import Fraction

import pytest

from bihv.catalog.sk import (N1_TABLE, Laurent, m_formula, q_asymptotic, q_at_equal_weights,
                             q_laurent_coeff, q_polynomial, q_value, s_series, s_values, s_system)
from bihv.poly import evaluate
from bihv.rings import s_ring


def test_q_asymptotic_expansion():
    n1 = N1_TABLE.var("n1")
    want = -4 * n1 ** 6 - 6 * n1 ** 5 + 36 * n1 ** 4 + 54 * n1 ** 3
    assert q_asymptotic() == want
    assert q_asymptotic() == -2 * n1 ** 3 * (n1 - 3) * (n1 + 3) * (2 * n1 + 3)


def test_only_positive_integer_root_is_three():
    q = q_asymptotic()
    roots = [m for m in range(1, 200) if evaluate(q, {"n1": m}) == 0]
    assert roots == [3]
    # for m > 3 every factor has fixed sign, so no larger roots exist
    assert all(evaluate(q, {"n1": m}) < 0 for m in range(4, 50))


def test_q_at_zero_weights():
    assert q_at_equal_weights(0).is_zero()


def test_q_weight_is_seven():
    for mono in q_polynomial().terms:
        ring = s_ring()
        weight = sum(k * mono[ring.table.index(f"s{k}")] for k in range(1, 6))
        assert weight == 7


@pytest.mark.parametrize("b, at, want", [
    ((0, 0, 0), 0, 0),
    ((0, 0, 1), 0, 560),
    ((0,), 0, 80),
])
def test_laurent_examples(b, at, want):
    assert q_laurent_coeff(b, at) == want


@pytest.mark.parametrize("m", range(1, 7))
def test_laurent_matches_m_formula(m):
    coeff = q_laurent_coeff((0,) * m)
    assert coeff == m_formula(m)
    assert coeff == evaluate(q_asymptotic(), {"n1": m})


def test_laurent_depends_only_on_group_size():
    assert q_laurent_coeff((Fraction(1, 2), 3, Fraction(1, 2), -1), 0) == m_formula(2)
    assert q_laurent_coeff((5, 5, 5, 0), 3) == m_formula(1)


def test_laurent_against_direct_evaluation():
    # (p + b_0)^7 Q(p) -> coefficient as p -> -b_0; check with exact values near the pole
    b = (0, 0, 1)
    eps = Fraction(1, 10 ** 8)
    approx = eps ** 7 * q_value(b, eps)
    assert abs(approx - 560) < Fraction(1, 10 ** 4)


def test_s_specialization_is_exact():
    p = Fraction(3, 7)
    vals = s_values((0, 0, 0, 0), p)
    for k in range(1, 6):
        assert vals[f"s{k}"] == 4 / p ** k


def test_s_series_leading_term():
    s = s_series((0, 0, 2), 0, 3, 2)
    assert s.val == -3 and s.coefficient(-3) == 2
    assert s.coefficient(0) == Fraction(1, 8)
    with pytest.raises(Exception):
        s.coefficient(5)


def test_laurent_arithmetic():
    a = Laurent.pole(1, 1, 3)                  # 1/x
    b = Laurent.inverse_power(Fraction(1), 1, 3)   # 1/(1+x) = 1 - x + x^2
    prod = a * b
    assert [prod.coefficient(j) for j in (-1, 0, 1)] == [1, -1, 1]
    assert (a + b).coefficient(-1) == 1 and (a + b).coefficient(0) == 1


def test_s_rates():
    d = s_system()
    ring = s_ring()
    s1, s2, cth = ring.var("s1"), ring.var("s2"), ring.var("cth")
    assert d(s1) == -s2 * cth
    assert d(ring.var("p")) == cth
    # cos^2 + sin^2 is a first integral
    assert d(cth ** 2 + ring.var("sth") ** 2).is_zero()
