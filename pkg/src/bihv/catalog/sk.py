"""The ``psi = 0`` analysis in the ring of ``s_k = sum_i (p + b_i)^-k``.

With ``psi = 0`` all angles agree, ``lm_i = -sin(theta)/(p + b_i)`` and
``mu_i = -cos(theta)/(p + b_i)``, ``p' = cos(theta)``, ``theta' = tau/2``.
The constraint polynomial becomes a relation for ``cos^2``; its rate gives one
for ``sin^2``; eliminating both with ``cos^2 + sin^2 = 1`` leaves ``Q(p)``,
which is a weight-7 form in the ``s_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from ..derivation import DerivationSystem
from ..poly import (Polynomial, PolynomialError, VarTable, divide_exact, strip_monomial_content,
                    substitute)
from ..rings import S_MAX, s_ring

THIRD = Fraction(1, 3)

# Reference form of Q(p) in the s ring.
Q_TERMS = (
    (-4, (5, 1, 0, 0)), (12, (3, 2, 0, 0)), (-18, (4, 0, 1, 0)), (63, (2, 1, 1, 0)),
    (54, (0, 2, 1, 0)), (162, (1, 0, 2, 0)), (-27, (3, 0, 0, 1)), (-162, (1, 1, 0, 1)),
)
Q_WEIGHT = 7


def q_polynomial() -> Polynomial:
    ring = s_ring()
    out = ring.zero()
    for c, exps in Q_TERMS:
        term = ring.const(c)
        for k, e in enumerate(exps, start=1):
            term = term * ring.var(f"s{k}") ** e
        out = out + term
    return out


def s_system() -> DerivationSystem:
    """``s_k' = -k s_{k+1} cth``, ``cth' = sth^2 s1 / 3``, ``sth' = -cth sth s1 / 3``, ``p' = cth``."""
    ring = s_ring()
    cth, sth, s1 = ring.var("cth"), ring.var("sth"), ring.var("s1")
    rules = {
        "n1": ring.zero(),
        "p": cth,
        "cth": (sth * sth * s1).scale(THIRD),
        "sth": -(cth * sth * s1).scale(THIRD),
    }

    def lazy(var):
        if var.startswith("s") and var[1:].isdigit():
            k = int(var[1:])
            if k + 1 > S_MAX:
                raise PolynomialError(f"rate of s{k} needs s{k + 1}, beyond s{S_MAX}")
            return -(ring.var(f"s{k + 1}") * cth).scale(k)
        return None

    return DerivationSystem(ring.table, rules, lazy, name="s")


def reduce_sine(p: Polynomial) -> Polynomial:
    """Rewrite ``sth^2`` as ``1 - cth^2`` until ``sth`` occurs at most linearly."""
    ring = s_ring()
    one_minus = ring.one() - ring.var("cth") ** 2
    out = ring.zero()
    for e, coeff in p.coefficients_in("sth").items():
        out = out + coeff * one_minus ** (e // 2) * ring.var("sth") ** (e % 2)
    return out


def _even_in(p: Polynomial, var: str) -> dict[int, Polynomial]:
    coeffs = p.coefficients_in(var)
    if any(e % 2 for e in coeffs):
        raise PolynomialError(f"expected only even powers of {var}")
    return {e // 2: c for e, c in coeffs.items()}


def _linear_in(p: Polynomial, var: str) -> tuple[Polynomial, Polynomial]:
    """``p == a * var^2 + b`` with ``a, b`` free of ``var``."""
    parts = _even_in(p, var)
    if set(parts) - {0, 1}:
        raise PolynomialError(f"{var}^2 must occur at most linearly")
    zero = p.table.zero()
    return parts.get(1, zero), parts.get(0, zero)


def strip_units(p: Polynomial, units: Sequence[Polynomial]) -> tuple[Polynomial, list[tuple[Polynomial, int]]]:
    """Divide out monomial content and every power of the given unit factors."""
    mono, p = strip_monomial_content(p)
    removed = []
    if any(mono):
        removed.append((Polynomial.from_terms(p.table, [(mono, 1)]), 1))
    for u in units:
        e = 0
        while True:
            q = divide_exact(p, u)
            if q is None:
                break
            p, e = q, e + 1
        if e:
            removed.append((u, e))
    return p, removed


def cos_relation_from_p0(p0_s: Polynomial) -> Polynomial:
    """The constraint in the s ring, ``sth`` factored out and ``sth^2 -> 1 - cth^2``."""
    mono, p = strip_monomial_content(p0_s)
    return reduce_sine(p)


def sin_relation_from_cos(cos_rel: Polynomial) -> tuple[Polynomial, list]:
    """Rate of ``cos_rel`` divided by ``cth``, with ``cth^2`` eliminated through ``cos_rel``."""
    ring = s_ring()
    d = divide_exact(s_system()(cos_rel), ring.var("cth"))
    if d is None:
        raise PolynomialError("rate of the cos relation is not divisible by cth")
    a, b = _linear_in(cos_rel, "cth")          # a*u + b = 0 with u = cth^2
    parts = _even_in(d, "cth")
    top = max(parts)
    acc = ring.zero()
    for k, coeff in parts.items():                # sum coeff u^k * a^top
        acc = acc + coeff * (-b) ** k * a ** (top - k)
    return strip_units(acc, unit_factors(ring))


def unit_factors(ring):
    s1, s2, s3 = (ring.var(f"s{k}") for k in (1, 2, 3))
    return [s1 * s2 * 2 + s3 * 3]


def q_from_cos_sin(cos_rel: Polynomial, sin_rel: Polynomial) -> tuple[Polynomial, list]:
    """Eliminate ``u = cth^2``, ``v = sth^2`` from ``a u + b = 0``, ``c v + d = 0``, ``u + v = 1``."""
    a, b = _linear_in(cos_rel, "cth")
    c, d = _linear_in(sin_rel, "sth")
    if a.degree("sth") or b.degree("sth") or c.degree("cth") or d.degree("cth"):
        raise PolynomialError("relations must be separated in cth and sth")
    return strip_units(-(b * c) - d * a - a * c, unit_factors(s_ring()))


# -- asymptotics and Laurent coefficients -----------------------------------

N1_TABLE = VarTable(["n1"])


def q_at_equal_weights(value) -> Polynomial:
    """``Q`` with every ``s_k`` replaced by ``value`` (a scalar or a polynomial over ``N1_TABLE``)."""
    return substitute(q_polynomial(), {f"s{k}": value for k in range(1, S_MAX + 1)}
                      | {"n1": 0, "p": 0, "cth": 0, "sth": 0}, N1_TABLE)


def q_asymptotic() -> Polynomial:
    """``lim p^7 Q(p)`` when all ``b_i = 0``, i.e. ``s_k = n1 p^-k``: a polynomial in ``n1``."""
    return q_at_equal_weights(N1_TABLE.var("n1"))


def m_formula(m) -> Fraction:
    m = Fraction(m)
    return -2 * m ** 3 * (m - 3) * (m + 3) * (2 * m + 3)


@dataclass(frozen=True)
class Laurent:
    """Truncated Laurent series ``sum c_j x^(val + j)``, exact up to (excluding) ``x^prec``."""
    val: int
    coeffs: tuple
    prec: int

    @classmethod
    def pole(cls, c, order: int, prec: int) -> "Laurent":
        return cls(-order, (Fraction(c),), prec)

    @classmethod
    def inverse_power(cls, d: Fraction, k: int, prec: int) -> "Laurent":
        """Taylor series of ``(x + d)^-k`` around ``x = 0`` (``d != 0``)."""
        coeffs = tuple(Fraction(comb(k + n - 1, n) * (-1) ** n) / Fraction(d) ** (k + n)
                       for n in range(max(prec, 0)))
        return cls(0, coeffs, prec)

    def coefficient(self, j: int) -> Fraction:
        if j >= self.prec:
            raise PolynomialError(f"coefficient x^{j} beyond precision x^{self.prec}")
        i = j - self.val
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def _terms(self):
        return {self.val + i: c for i, c in enumerate(self.coeffs) if self.val + i < self.prec and c}

    def __add__(self, other: "Laurent") -> "Laurent":
        prec = min(self.prec, other.prec)
        acc: dict = {}
        for t in (self._terms(), other._terms()):
            for j, c in t.items():
                if j < prec:
                    acc[j] = acc.get(j, 0) + c
        return Laurent._from(acc, prec)

    def __mul__(self, other) -> "Laurent":
        if not isinstance(other, Laurent):
            return Laurent(self.val, tuple(c * other for c in self.coeffs), self.prec)
        prec = min(self.prec + other.val, other.prec + self.val)
        acc: dict = {}
        for i, a in self._terms().items():
            for j, b in other._terms().items():
                if i + j < prec:
                    acc[i + j] = acc.get(i + j, 0) + a * b
        return Laurent._from(acc, prec)

    @staticmethod
    def _from(acc: dict, prec: int) -> "Laurent":
        acc = {j: c for j, c in acc.items() if c}
        if not acc:
            return Laurent(prec, (), prec)
        lo = min(acc)
        return Laurent(lo, tuple(acc.get(j, Fraction(0)) for j in range(lo, max(acc) + 1)), prec)


def s_series(b: Sequence, at: int, k: int, prec: int) -> Laurent:
    """``s_k = sum_i (p + b_i)^-k`` expanded in ``x = p + b_at``."""
    b = [Fraction(v) for v in b]
    center = b[at]
    m = sum(1 for v in b if v == center)
    series = Laurent.pole(m, k, prec)
    for v in b:
        if v != center:
            series = series + Laurent.inverse_power(v - center, k, prec)
    return series


def q_laurent_coeff(b: Sequence, at: int = 0, order: int = Q_WEIGHT) -> Fraction:
    """Coefficient of ``(p + b_at)^-order`` in the partial-fraction expansion of ``Q(p)``."""
    if not b:
        raise PolynomialError("b must be nonempty")
    if not 0 <= at < len(b):
        raise PolynomialError(f"index {at} out of range for {len(b)} values")
    prec = -order + 1
    # each factor needs absolute precision prec - (sum of the other factors' valuations)
    work = prec + Q_WEIGHT
    s = {k: s_series(b, at, k, work) for k in range(1, 5)}
    total = None
    for c, exps in Q_TERMS:
        term = None
        for k, e in enumerate(exps, start=1):
            for _ in range(e):
                term = s[k] if term is None else term * s[k]
        term = term * Fraction(c)
        total = term if total is None else total + term
    return total.coefficient(-order)


def s_values(b: Sequence, p) -> dict[str, Fraction]:
    """Exact ``s_1..s_5`` at a rational point ``p``."""
    p = Fraction(p)
    return {f"s{k}": sum((1 / (p + Fraction(v)) ** k for v in b), Fraction(0)) for k in range(1, S_MAX + 1)}


def q_value(b: Sequence, p) -> Fraction:
    from ..poly import evaluate
    vals = s_values(b, p)
    q = q_polynomial()
    return evaluate(q, {name: vals.get(name, 0) for name in q.table.names})
