"""Fraction-free elimination of a variable by a pseudo-remainder sequence.

``eliminate_tau(f3, f4)`` runs ``f2 = prem(f4, f3)``, ``f1 = prem(f3, f2)``,
``f0 = prem(f2, f1)`` in ``tau``, stripping the integer content after every
step.  Each step records its pseudo-multiplier ``lc^delta`` so that the
polynomial factor by which ``f0`` differs from a plain numerator can be
accounted for afterwards (:func:`account_cofactor`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .poly import (Polynomial, PolynomialError, VarTable, content, divide_exact,
                   primitive_part, strip_monomial_content, to_text)


class EliminationError(PolynomialError):
    pass


class DegenerateEliminationError(EliminationError):
    """The remainder sequence cannot proceed (zero divisor or bad degrees)."""


def leading_coefficient(p: Polynomial, var: str) -> Polynomial:
    if p.is_zero():
        raise EliminationError("leading coefficient of the zero polynomial")
    return p.coefficient_of(var, p.degree(var))


@dataclass
class PrsStep:
    dividend: Polynomial
    divisor: Polynomial
    var: str
    quotient: Polynomial
    multiplier: Polynomial      # lc(divisor)^delta
    delta: int
    extracted: Fraction         # signed: raw remainder == extracted * remainder
    remainder: Polynomial       # primitive, positive leading coefficient (or zero)

    @property
    def raw_remainder(self) -> Polynomial:
        return self.remainder.scale(self.extracted) if self.extracted else self.remainder

    def verify(self) -> bool:
        """``multiplier * dividend == quotient * divisor + extracted * remainder``."""
        return self.multiplier * self.dividend == self.quotient * self.divisor + self.raw_remainder


def pseudo_remainder(f: Polynomial, g: Polynomial, var: str) -> PrsStep:
    """Pseudo-division ``lc(g)^(deg f - deg g + 1) f = q g + r`` with ``r`` content-normalized."""
    if g.is_zero():
        raise EliminationError("pseudo-division by zero")
    if f.table != g.table:
        raise EliminationError("pseudo-division across different tables")
    dg = g.degree(var)
    df = f.degree(var) if not f.is_zero() else 0
    if df < dg:
        raise EliminationError(f"deg_{var} of dividend ({df}) below divisor's ({dg})")
    delta = df - dg + 1
    lc = leading_coefficient(g, var)
    tail = g - lc.mul_monomial(_var_power(g.table, var, dg))
    r = f
    q = f.table.zero()
    # standard pseudo-division: r <- lc*r - lc_r * x^(d-dg) * g, delta times
    for step in range(delta):
        d = r.degree(var) if not r.is_zero() else -1
        if d < dg:
            r = r * lc
            q = q * lc
            continue
        lcr = r.coefficient_of(var, d)
        shift = _var_power(g.table, var, d - dg)
        q = q * lc + lcr.mul_monomial(shift)
        r = (r - lcr.mul_monomial(_var_power(g.table, var, d))) * lc - (lcr * tail).mul_monomial(shift)
    multiplier = lc ** delta
    if r.is_zero():
        extracted = Fraction(0)
    else:
        extracted, r = primitive_part(r)
    return PrsStep(f, g, var, q, multiplier, delta, extracted, r)


def _var_power(table: VarTable, var: str, e: int):
    mono = [0] * len(table)
    mono[table.index(var)] = e
    return tuple(mono)


@dataclass
class FactorCheck:
    name: str
    divides: bool
    quotient_terms: Optional[int] = None


@dataclass
class CofactorAccount:
    """``cofactor == constant * prod(piece^exponent)``, every piece drawn from a multiplier."""
    cofactor: Polynomial
    constant: Fraction
    pieces: list[tuple[Polynomial, int, str]]   # (piece, exponent, source multiplier)
    leftover: Polynomial

    @property
    def complete(self) -> bool:
        return self.leftover.is_constant()


@dataclass
class EliminationReport:
    var: str
    steps: list[PrsStep] = field(default_factory=list)
    factor_checks: list[FactorCheck] = field(default_factory=list)
    product_quotient: Optional[Polynomial] = None
    account: Optional[CofactorAccount] = None
    stopped_early: bool = False

    def _f(self, i):
        return self.steps[i].remainder if len(self.steps) > i else None

    @property
    def f2(self):
        return self._f(0)

    @property
    def f1(self):
        return self._f(1)

    @property
    def f0(self):
        return self._f(2)

    def degrees(self) -> dict[str, Optional[int]]:
        out = {}
        for label, p in (("f2", self.f2), ("f1", self.f1), ("f0", self.f0)):
            out[label] = None if p is None else (-1 if p.is_zero() else p.degree(self.var))
        return out

    def to_json(self) -> dict:
        steps = []
        for label, s in zip(("f2", "f1", "f0"), self.steps):
            steps.append({
                "result": label,
                "delta": s.delta,
                "dividend_degree": s.dividend.degree(self.var),
                "divisor_degree": s.divisor.degree(self.var),
                "remainder_degree": None if s.remainder.is_zero() else s.remainder.degree(self.var),
                "remainder_terms": len(s.remainder),
                "extracted_content": str(s.extracted),
                "multiplier_terms": len(s.multiplier),
            })
        doc = {"var": self.var, "steps": steps, "degrees": self.degrees(),
               "stopped_early": self.stopped_early,
               "factor_checks": [{"name": c.name, "divides": c.divides,
                                  "quotient_terms": c.quotient_terms} for c in self.factor_checks]}
        if self.product_quotient is not None:
            doc["product_quotient_terms"] = len(self.product_quotient)
        if self.account is not None:
            a = self.account
            doc["cofactor"] = {
                "terms": len(a.cofactor),
                "constant": str(a.constant),
                "pieces": [{"piece": to_text(p), "exponent": e, "source": src} for p, e, src in a.pieces],
                "complete": a.complete,
            }
        return doc

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def eliminate_tau(f3: Polynomial, f4: Polynomial, var: str = "tau",
                  factors: Sequence[tuple[str, Polynomial]] = ()) -> EliminationReport:
    """Three pseudo-remainder steps ``f4 -> f2 -> f1 -> f0`` in ``var``.

    A zero remainder stops the sequence gracefully (``stopped_early``).  With
    ``factors`` the final ``f0`` is trial-divided by each and by their product,
    and the leftover cofactor is accounted against the step multipliers.
    """
    d3, d4 = f3.degree(var), f4.degree(var)
    if f3.is_zero() or f4.is_zero():
        raise DegenerateEliminationError("inputs must be nonzero")
    if d4 < d3 or d3 < 1:
        raise DegenerateEliminationError(
            f"need deg_{var}(f_hi) >= deg_{var}(f_lo) >= 1, got {d4} and {d3}")
    report = EliminationReport(var)
    dividend, divisor = f4, f3
    for _ in range(3):
        if leading_coefficient(divisor, var).is_zero():
            raise DegenerateEliminationError("divisor has zero leading coefficient")
        step = pseudo_remainder(dividend, divisor, var)
        report.steps.append(step)
        if step.remainder.is_zero():
            report.stopped_early = True
            return report
        if step.remainder.degree(var) == 0:
            break
        dividend, divisor = divisor, step.remainder
    f0 = report.steps[-1].remainder
    if len(report.steps) < 3 or f0.degree(var) != 0:
        report.stopped_early = True
        return report
    if factors:
        product = f0.table.one()
        for name, fac in factors:
            q = divide_exact(f0, fac)
            report.factor_checks.append(FactorCheck(name, q is not None, None if q is None else len(q)))
            product = product * fac
        report.product_quotient = divide_exact(f0, product)
        if report.product_quotient is not None:
            sources = [(f"lc^{s.delta} of step {i + 1}", leading_coefficient(s.divisor, var))
                       for i, s in enumerate(report.steps)]
            report.account = account_cofactor(report.product_quotient, sources)
    return report


# -- cofactor accounting ---------------------------------------------------

def _uni_divmod(a: list, b: list):
    """Dense univariate division over Q (coefficient lists, highest degree first)."""
    a = list(a)
    q = []
    while len(a) >= len(b):
        c = Fraction(a[0]) / b[0]
        q.append(c)
        for i in range(len(b)):
            a[i] -= c * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return q, a


def _uni_gcd(a: list, b: list) -> list:
    while b:
        _, r = _uni_divmod(a, b)
        a, b = b, r
    return [Fraction(c) / a[0] for c in a] if a else []


def _dense(p: Polynomial, var: str) -> list:
    d = p.degree(var)
    coeffs = p.coefficients_in(var)
    return [coeffs[e].constant_value() if e in coeffs else 0 for e in range(d, -1, -1)]


def _from_dense(table: VarTable, var: str, dense: list) -> Polynomial:
    d = len(dense) - 1
    return Polynomial.from_terms(table, [(_var_power(table, var, d - i), c) for i, c in enumerate(dense) if c])


def univariate_content(p: Polynomial, var: str) -> Polynomial:
    """The monic gcd in ``Q[var]`` of ``p``'s coefficients as a polynomial in the other variables."""
    idx = p.table.index(var)
    groups: dict = {}
    for mono, c in p.terms.items():
        key = mono[:idx] + mono[idx + 1:]
        groups.setdefault(key, {})[mono[idx]] = c
    g: list = []
    for coeffs in groups.values():
        d = max(coeffs)
        dense = [coeffs.get(e, 0) for e in range(d, -1, -1)]
        g = _uni_gcd(g, dense) if g else _uni_gcd(dense, [])
        if len(g) == 1:
            break
    return _from_dense(p.table, var, g)


def _uni_deriv(u: list) -> list:
    d = len(u) - 1
    return [c * (d - i) for i, c in enumerate(u[:-1])]


def _uni_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = [0] * (n - len(a)) + list(a)
    b = [0] * (n - len(b)) + list(b)
    out = [x - y for x, y in zip(a, b)]
    while out and out[0] == 0:
        out.pop(0)
    return out


def _squarefree(u: list) -> list:
    """Yun's algorithm: monic squarefree pieces (multiplicities dropped) of univariate ``u``."""
    if len(u) <= 1:
        return []
    du = _uni_deriv(u)
    a = _uni_gcd(u, du)
    b, _ = _uni_divmod(u, a)
    c, _ = _uni_divmod(du, a)
    d = _uni_sub(c, _uni_deriv(b))
    out = []
    while len(b) > 1:
        a = _uni_gcd(b, d)
        if len(a) > 1:
            out.append(a)
        b, _ = _uni_divmod(b, a)
        c, _ = _uni_divmod(d, a) if d else ([], [])
        d = _uni_sub(c, _uni_deriv(b))
    return out


def _refine(basis: list) -> list:
    """Gcd-free basis of monic univariate polynomials."""
    basis = [b for b in basis if len(b) > 1]
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                g = _uni_gcd(basis[i], basis[j])
                if len(g) > 1:
                    a, _ = _uni_divmod(basis[i], g)
                    b, _ = _uni_divmod(basis[j], g)
                    rest = [x for k, x in enumerate(basis) if k not in (i, j)]
                    basis = rest + [g] + [x for x in (a, b) if len(x) > 1]
                    basis = [[c / x[0] for c in x] for x in basis]
                    changed = True
                    break
            if changed:
                break
    return basis


def multiplier_pieces(sources: Sequence[tuple[str, Polynomial]]) -> list[tuple[Polynomial, str]]:
    """Split multipliers into trial divisors: single variables, univariate contents, primitive rests."""
    table = sources[0][1].table
    per_var: dict[str, list] = {v: [] for v in table.names}
    origin: dict = {}
    rests = []
    for label, m in sources:
        mono, m = strip_monomial_content(m)
        for v, e in zip(table.names, mono):
            if e:
                per_var[v].append([Fraction(1), Fraction(0)])
                origin.setdefault((v, (1, 0)), label)
        rest = m
        for v in table.names:
            if rest.degree(v) == 0:
                continue
            uc = univariate_content(rest, v)
            if uc.degree(v) > 0:
                dense = _dense(uc, v)
                for sq in _squarefree(dense):
                    per_var[v].append(sq)
                    origin.setdefault((v, tuple(sq)), label)
                rest = divide_exact(rest, uc)
        if not rest.is_constant():
            _, prim = primitive_part(rest)
            rests.append((prim, label))
    pieces = []
    for v, polys in per_var.items():
        for b in _refine(polys):
            src = next((lab for (vv, key), lab in origin.items()
                        if vv == v and divide_exact(_from_dense(table, v, list(key)),
                                                    _from_dense(table, v, b)) is not None), "?")
            pieces.append((_from_dense(table, v, b), src))
    return pieces + rests


def account_cofactor(cofactor: Polynomial, sources: Sequence[tuple[str, Polynomial]]) -> CofactorAccount:
    """Trial-divide ``cofactor`` by pieces of the recorded multipliers as often as possible."""
    rest = cofactor
    used = []
    for piece, label in multiplier_pieces(sources):
        e = 0
        while not rest.is_constant():
            q = divide_exact(rest, piece)
            if q is None:
                break
            rest, e = q, e + 1
        if e:
            used.append((piece, e, label))
    constant = rest.constant_value() if rest.is_constant() else Fraction(0)
    return CofactorAccount(cofactor, Fraction(constant), used, rest)


def specialize_steps(report: EliminationReport, values: dict) -> list[Polynomial]:
    """Remainders of ``report`` with ``values`` substituted, for commutation checks."""
    from .poly import substitute
    return [substitute(s.remainder, values) for s in report.steps]
