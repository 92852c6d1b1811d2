from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bihv.catalog.parser import parse_expr
from bihv.catalog.registry import Corpus
from bihv.derivation import (DerivationError, SizeGuardError, build_p0, full_derivation,
                             lambda_rate, lambda_ring_derivation, lambda_system, lambda_to_linear,
                             mu_linear_substitution, pk_chain, power_sum_reduce)
from bihv.poly import Polynomial, evaluate, proportionality, substitute
from bihv.rings import full_ring, lambda_ring, linear_full_ring

LAM = lambda_ring()


# -- full system ---------------------------------------------------------------

def test_constant_has_zero_rate():
    ring = full_ring(2)
    assert full_derivation(ring.const(Fraction(7, 3)), 2).is_zero()
    assert full_derivation(ring.var("K"), 2).is_zero()


def test_rate_of_lm1_for_single_index():
    ring = full_ring(1)
    lm1, mu1 = ring.var("lm1"), ring.var("mu1")
    assert full_derivation(lm1, 1) == (lm1 * mu1).scale(Fraction(4, 3))


def test_rate_of_mu1_for_single_index():
    ring = full_ring(1)
    lm1, mu1, K = ring.var("lm1"), ring.var("mu1"), ring.var("K")
    assert full_derivation(mu1, 1) == mu1 ** 2 - (lm1 ** 2).scale(Fraction(1, 3)) + K


def test_missing_rule_is_an_error():
    from bihv.derivation import DerivationSystem
    from bihv.poly import VarTable
    T = VarTable(["a", "b"])
    d = DerivationSystem(T, {"a": T.one()})
    assert d(T.var("a") ** 2) == 2 * T.var("a")
    with pytest.raises(DerivationError):
        d(T.var("b"))


# -- P0 -----------------------------------------------------------------------

@pytest.mark.parametrize("n1, terms", [(1, 3), (2, 12), (3, 31), (4, 64), (5, 115)])
def test_p0_constructions_agree(n1, terms):
    c = build_p0(n1)
    assert c.ratio == 1
    assert c.from_ode == c.poly.scale(c.ratio)
    assert len(c.poly) == terms


def test_p0_equal_weights_intermediate():
    # lm_1 = lm_2 = lm, mu_1 = mu_2 = mu, K = 0, n1 = 2: lm (16 lm^2 - 5 mu^2) up to a constant
    from bihv.poly import VarTable
    T = VarTable(["lm", "mu"])
    lm, mu = T.vars("lm", "mu")
    p = substitute(build_p0(2).poly, {"lm1": lm, "lm2": lm, "mu1": mu, "mu2": mu, "K": 0}, T)
    assert proportionality(p, lm * (16 * lm ** 2 - 5 * mu ** 2)) is not None


def test_p0_vanishes_at_constant_solution():
    p = build_p0(3).poly
    point = {"lm1": 1, "lm2": 1, "lm3": 1, "mu1": 0, "mu2": 0, "mu3": 0, "K": 1}
    assert evaluate(p, point) == 0


# -- chain ---------------------------------------------------------------------

def test_chain_metadata_n1_2():
    chain = pk_chain(2, 3)
    assert chain.k_max == 3
    assert chain.degrees == [3, 4, 5, 6]
    assert chain.term_counts == [12, 20, 40, 60]
    for a, b in zip(chain.degrees, chain.degrees[1:]):
        assert b <= a + 1


def test_chain_vanishes_on_tau_zero_family_point():
    # K = 0 family a = (1, -1), c = (0, 0) at t = 1: lm = (1, -1), mu = (-1, -1)
    chain = pk_chain(2, 4, K=0)
    point = {"lm1": 1, "lm2": -1, "mu1": -1, "mu2": -1, "K": 0}
    assert [evaluate(p, point) for p in chain.polys] == [0] * 5


def test_chain_with_fixed_K_has_no_K():
    chain = pk_chain(2, 2, K=-1)
    assert all(p.degree("K") == 0 for p in chain.polys)


def test_chain_p1_single_index_on_family():
    # n1 = 1 forces a = 0: lm = 0, mu = -1/(t + c); check P_1 at several t
    chain = pk_chain(1, 1, K=0)
    for t in (Fraction(1), Fraction(5, 2), Fraction(-3, 7)):
        assert evaluate(chain.polys[1], {"lm1": 0, "mu1": -1 / t, "K": 0}) == 0


def test_chain_guard_and_bad_kmax():
    with pytest.raises(SizeGuardError):
        pk_chain(3, 3, max_terms=50)
    with pytest.raises(DerivationError):
        pk_chain(2, -1)


# -- Lambda ring -------------------------------------------------------------------

def test_lambda_rate_of_psi():
    tau, phi, psi = LAM.var("tau"), LAM.var("phi"), LAM.var("psi")
    assert lambda_ring_derivation(psi) == psi ** 2 - (tau * phi * psi).scale(Fraction(1, 2))
    assert lambda_ring_derivation(psi, curvature=True) == \
        psi ** 2 - (tau * phi * psi).scale(Fraction(1, 2)) + LAM.var("K")


def test_lambda_rate_of_lm2():
    tau, phi, psi = LAM.var("tau"), LAM.var("phi"), LAM.var("psi")
    lm2, lm3 = LAM.var("Lm2"), LAM.var("Lm3")
    half = Fraction(1, 2)
    want = 2 * ((tau * psi * tau.scale(Fraction(3, 2))).scale(half)
                + ((tau * phi).scale(half) + psi) * lm2 + phi * lm3)
    assert lambda_ring_derivation(lm2) == want


def test_lambda_rate_of_constant():
    assert lambda_ring_derivation(LAM.const(5)).is_zero()
    assert lambda_ring_derivation(LAM.var("n1") ** 2).is_zero()


def test_lambda_index_overflow_names_the_index():
    with pytest.raises(DerivationError, match="Lm5"):
        lambda_ring_derivation(LAM.var("Lm4"))


def test_lm1_bookkeeping_matches_tau_rule():
    system = lambda_system()
    assert lambda_rate(LAM, 1) == system.rule("tau").scale(Fraction(3, 2))


def test_lambda_tau_rule():
    n1, tau, phi, psi, lm2 = (LAM.var(v) for v in ("n1", "tau", "phi", "psi", "Lm2"))
    want = ((n1 + 3) * tau * psi).scale(Fraction(1, 3)) + (tau ** 2 * phi).scale(Fraction(1, 2)) \
        + (phi * lm2).scale(Fraction(2, 3))
    assert lambda_system().rule("tau") == want


lam_polys = st.lists(
    st.tuples(st.sampled_from(["n1", "tau", "phi", "psi", "Lm2", "K"]), st.integers(0, 2), st.integers(-4, 4)),
    max_size=4,
).map(lambda ts: sum((LAM.var(v) ** e * c for v, e, c in ts), LAM.zero()))


@settings(max_examples=30, deadline=None)
@given(lam_polys, lam_polys)
def test_lambda_derivation_leibniz_and_linearity(a, b):
    d = lambda_system(curvature=True)
    assert d(a * b) == d(a) * b + a * d(b)
    assert d(a + b.scale(3)) == d(a) + d(b).scale(3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 2), st.integers(-3, 3)), max_size=4),
       st.lists(st.tuples(st.integers(0, 5), st.integers(0, 2), st.integers(-3, 3)), max_size=4))
def test_full_derivation_leibniz(ta, tb):
    ring = full_ring(3)
    names = ring.table.names
    a = sum((ring.var(names[i]) ** e * c for i, e, c in ta), ring.zero())
    b = sum((ring.var(names[i]) ** e * c for i, e, c in tb), ring.zero())
    assert full_derivation(a * b, 3) == full_derivation(a, 3) * b + a * full_derivation(b, 3)


# -- power sums ---------------------------------------------------------------------

def test_reduce_sum_mu():
    ring = full_ring(3)
    n1, tau, phi, psi = (LAM.var(v) for v in ("n1", "tau", "phi", "psi"))
    got = power_sum_reduce(ring.resolve("sum_l0m1"), 3)
    assert got == phi * tau.scale(Fraction(3, 2)) + 3 * psi


def test_reduce_sum_mu_squared_by_expansion():
    ring = full_ring(3)
    lm_sq = power_sum_reduce(ring.resolve("sum_l0m2"), 3)
    phi, psi, tau, lm2 = (LAM.var(v) for v in ("phi", "psi", "tau", "Lm2"))
    want = phi ** 2 * lm2 + 2 * phi * psi * tau.scale(Fraction(3, 2)) + 3 * psi ** 2
    assert lm_sq == want
    lin = linear_full_ring(3)
    brute = sum(((lin.var("phi") * lin.var(f"lm{i}") + lin.var("psi")) ** 2 for i in (1, 2, 3)), lin.zero())
    assert lambda_to_linear(lm_sq, 3) == brute


def test_non_symmetric_input_rejected():
    ring = full_ring(2)
    with pytest.raises(DerivationError):
        power_sum_reduce(ring.var("lm1"), 2)


@pytest.mark.parametrize("n1", [2, 3, 4, 5])
def test_reduced_p0_matches_lm30(n1):
    lm30 = Corpus().expected("Lm30")
    reduced = power_sum_reduce(build_p0(n1).poly, n1)
    reduced_k0 = lambda_to_linear(substitute(reduced, {"K": 0}), n1)
    expected = lambda_to_linear(substitute(lm30, {"n1": n1}), n1)
    assert proportionality(reduced_k0, expected) is not None


@pytest.mark.parametrize("n1", [2, 3])
def test_derivation_commutes_with_reduction(n1):
    p0 = build_p0(n1).poly
    derive_then_reduce = mu_linear_substitution(full_derivation(p0, n1), n1)
    reduce_then_derive = lambda_to_linear(
        lambda_ring_derivation(power_sum_reduce(p0, n1), curvature=True), n1)
    assert derive_then_reduce == reduce_then_derive
