"""Registry of reference identities: corpus loading, construction recipes, verdicts.

Every identity names a corpus file (the reference polynomial), the ring it is
parsed in, and a comparison mode.  Its recipe rebuilds the polynomial from the
ODE system with the derivation and elimination modules and yields one or more
``(label, constructed, expected)`` comparisons.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .. import derivation as dv
from ..elimination import EliminationReport, eliminate_tau
from ..poly import (Polynomial, PolynomialError, divide_exact, embed, proportionality,
                    strip_monomial_content, substitute, to_text)
from ..rings import Ring, full_ring, lambda_ring, linear_full_ring, ring_from_spec, s_ring
from . import sk
from .parser import parse_expr

MODES = ("proportional", "divides", "equal")
CORPUS_ENV = "BIHV_CORPUS"
DIFF_TERMS = 8


class UnknownIdentityError(KeyError):
    pass


@dataclass(frozen=True)
class Entry:
    name: str
    file: Optional[str]
    ring: str
    mode: str


def default_corpus_dir() -> Path:
    env = os.environ.get(CORPUS_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("bihv") / "corpus" / "identities"))


def read_manifest(path: Path) -> dict[str, Entry]:
    entries = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
        name, file, ring, mode = fields
        if mode not in MODES:
            raise ValueError(f"{path}:{lineno}: unknown mode {mode!r}")
        entries[name] = Entry(name, None if file == "-" else file, ring, mode)
    return entries


class Corpus:
    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory else default_corpus_dir()
        self.entries = read_manifest(self.directory / "manifest.txt")
        self._cache: dict = {}

    def __contains__(self, name):
        return name in self.entries

    def text(self, name: str) -> str:
        entry = self.entry(name)
        if entry.file is None:
            raise PolynomialError(f"identity {name!r} has no corpus file")
        return (self.directory / entry.file).read_text(encoding="utf-8")

    def entry(self, name: str) -> Entry:
        if name not in self.entries:
            raise UnknownIdentityError(name)
        return self.entries[name]

    def expected(self, name: str, ring: Optional[Ring] = None) -> Polynomial:
        ring = ring or ring_from_spec(self.entry(name).ring)
        key = (name, ring.name, ring.table)
        if key not in self._cache:
            self._cache[key] = parse_expr(self.text(name), ring)
        return self._cache[key]


@dataclass
class Comparison:
    label: str
    constructed: Polynomial
    expected: Polynomial


@dataclass
class Verdict:
    name: str
    mode: str
    passed: bool
    ratios: dict[str, Fraction] = field(default_factory=dict)
    quotients: dict[str, Polynomial] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def ratio(self) -> Optional[Fraction]:
        """The common ratio when every comparison has the same one."""
        values = set(self.ratios.values())
        return values.pop() if len(values) == 1 else None

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.mode == "proportional":
            r = self.ratio
            body = f"ratio {r}" if r is not None else \
                "ratios " + ", ".join(f"{k}={v}" for k, v in self.ratios.items())
        elif self.mode == "divides":
            body = "quotients " + ", ".join(f"{k}:{len(q)} terms" for k, q in self.quotients.items())
        else:
            body = f"{len(self.ratios)} exact matches"
        line = f"{self.name:<18} {status} {self.mode:<12} {body}"
        if self.failures:
            line += " | " + "; ".join(f"{k}: {v}" for k, v in self.failures.items())
        return line

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "mode": self.mode,
            "passed": self.passed,
            "ratios": {k: str(v) for k, v in self.ratios.items()},
            "quotients": {k: to_text(q) if len(q) <= 4 else f"<{len(q)} terms>"
                          for k, q in self.quotients.items()},
            "details": {k: str(v) for k, v in self.details.items()},
            "failures": self.failures,
        }


def _diff_text(constructed: Polynomial, expected: Polynomial) -> str:
    if constructed.is_zero() or expected.is_zero():
        d = constructed - expected
    else:
        scale = Fraction(constructed.leading_coefficient()) / expected.leading_coefficient()
        d = constructed - expected.scale(scale)
    terms = d.sorted_terms()
    head = Polynomial(d.table, dict(terms[:DIFF_TERMS]))
    more = f" ... (+{len(terms) - DIFF_TERMS} terms)" if len(terms) > DIFF_TERMS else ""
    return f"difference {to_text(head)}{more}"


def compare(mode: str, comparisons: list[Comparison], name: str,
            details: Optional[dict] = None) -> Verdict:
    v = Verdict(name, mode, True, details=dict(details or {}))
    for c in comparisons:
        if c.constructed.table != c.expected.table:
            raise PolynomialError(f"{name}/{c.label}: constructed and expected live in different rings")
        if mode == "proportional":
            r = proportionality(c.constructed, c.expected)
            if r is None:
                v.passed = False
                v.failures[c.label] = "not proportional; " + _diff_text(c.constructed, c.expected)
            else:
                v.ratios[c.label] = r
        elif mode == "equal":
            if c.constructed == c.expected:
                v.ratios[c.label] = Fraction(1)
            else:
                v.passed = False
                v.failures[c.label] = _diff_text(c.constructed, c.expected)
        elif mode == "divides":
            q = divide_exact(c.constructed, c.expected) if not c.expected.is_zero() else None
            if q is None or c.constructed.is_zero():
                v.passed = False
                v.failures[c.label] = "expected factor does not divide the constructed polynomial"
            else:
                v.quotients[c.label] = q
        else:
            raise ValueError(f"unknown mode {mode!r}")
    if not comparisons:
        v.passed = False
        v.failures["-"] = "recipe produced no comparisons"
    return v


# -- recipes ---------------------------------------------------------------

Recipe = Callable[["Corpus", dict], list[Comparison]]
RECIPES: dict[str, Recipe] = {}

P0_FULL_N1 = (1, 2, 3, 4, 5)
REDUCE_N1 = (2, 3, 4, 5)


def recipe(name):
    def deco(fn):
        RECIPES[name] = fn
        return fn
    return deco


def eliminate_linear(a: Polynomial, b: Polynomial, var: str) -> Polynomial:
    """``lc_b a - lc_a b`` for ``a, b`` of degree at most one in ``var``."""
    if a.degree(var) > 1 or b.degree(var) > 1:
        raise PolynomialError(f"{var} must occur linearly")
    return b.coefficient_of(var, 1) * a - a.coefficient_of(var, 1) * b


def _lam() -> Ring:
    return lambda_ring()


@recipe("P0")
def _p0(corpus: Corpus, details: dict) -> list[Comparison]:
    out = []
    for n1 in P0_FULL_N1:
        ring = full_ring(n1)
        derived = dv.tension_residual(ring, dv.full_system(n1))
        out.append(Comparison(f"full:{n1}", derived, corpus.expected("P0", ring)))
    lam = _lam()
    derived = dv.tension_residual(lam, dv.lambda_system(lam, curvature=True))
    out.append(Comparison("lambda", derived, corpus.expected("P0", lam)))
    return out


@recipe("chen-n2")
def _chen(corpus, details):
    ring = full_ring(1)
    return [Comparison("full:1", dv.tension_residual(ring, dv.full_system(1)), corpus.expected("chen-n2"))]


@recipe("chen-n2-derived")
def _chen_derived(corpus, details):
    ring = full_ring(1)
    bracket = divide_exact(corpus.expected("chen-n2"), ring.var("lm1"))
    if bracket is None:
        raise PolynomialError("chen-n2 corpus entry is not lm1 times a bracket")
    return [Comparison("full:1", dv.full_derivation(bracket, 1), corpus.expected("chen-n2-derived"))]


@recipe("same-lm")
def _same_lm(corpus, details):
    system = dv.equal_system()
    ring = ring_from_spec("equal")
    residual = substitute(dv.tension_residual(ring, system), {"K": 0})
    reduced = divide_exact(residual, ring.var("n1"))
    details["divided_by"] = "n1"
    return [Comparison("equal", reduced, corpus.expected("same-lm"))]


@recipe("const-solutions")
def _const(corpus, details):
    out = []
    for n1 in P0_FULL_N1:
        ring = full_ring(n1)
        frozen = dv.DerivationSystem(ring.table, {v: ring.zero() for v in ring.table.names},
                                     name="constant")
        residual = dv.tension_residual(ring, frozen)
        out.append(Comparison(f"full:{n1}", residual, corpus.expected("const-solutions", ring)))
    details["expected_quotient"] = "tau"
    return out


def _curvature_sum(ring: Ring) -> Polynomial:
    r = ring.resolve
    return r("Lm1") ** 2 - r("Lm2") + r("sum_l0m1") ** 2 - r("sum_l0m2")


@recipe("Lm2-tau-vp-phi")
def _lm2_tau(corpus, details):
    lam = _lam()
    out = [Comparison("lambda", _curvature_sum(lam),
                      corpus.expected("Lm2-tau-vp-phi"))]
    for n1 in REDUCE_N1:
        lin = linear_full_ring(n1)
        expanded = dv.lambda_to_linear(substitute(corpus.expected("Lm2-tau-vp-phi"), {"n1": n1}), n1)
        out.append(Comparison(f"linear:{n1}", _curvature_sum(lin), expanded))
    details["construction"] = "(sum lm)^2 - sum lm^2 + (sum mu)^2 - sum mu^2"
    return out


@recipe("Lm20")
def _lm20(corpus, details):
    return [Comparison("lambda", _curvature_sum(_lam()), corpus.expected("Lm20"))]


@recipe("Lm30")
def _lm30(corpus, details):
    lam = _lam()
    out = [Comparison("lambda", substitute(corpus.expected("P0", lam), {"K": 0}),
                      corpus.expected("Lm30"))]
    for n1 in REDUCE_N1:
        p0 = substitute(dv.build_p0(n1).from_ode, {"K": 0})
        reduced = dv.power_sum_reduce(p0, n1)
        expected = substitute(corpus.expected("Lm30"), {"n1": n1})
        out.append(Comparison(f"reduced:{n1}", dv.lambda_to_linear(reduced, n1),
                              dv.lambda_to_linear(expected, n1)))
    return out


@recipe("Lm3")
def _lm3(corpus, details):
    return [Comparison("lambda", dv.lambda_ring_derivation(corpus.expected("Lm20")),
                       corpus.expected("Lm3"))]


@recipe("Lm2")
def _lm2(corpus, details):
    e = eliminate_linear(corpus.expected("Lm30"), corpus.expected("Lm3"), "Lm3")
    mono, e = strip_monomial_content(e)
    details["stripped_monomial"] = to_text(Polynomial.from_terms(e.table, [(mono, 1)]))
    return [Comparison("lambda", e, corpus.expected("Lm2"))]


@recipe("taup3")
def _taup3(corpus, details):
    e = eliminate_linear(corpus.expected("Lm20"), corpus.expected("Lm2"), "Lm2")
    return [Comparison("lambda", e, corpus.expected("taup3"))]


def eliminate_lm2_via_lm20(p: Polynomial, corpus: Corpus) -> Polynomial:
    """``p`` with ``Lm2`` eliminated through the curvature relation (multiplier ``-4(1+phi^2)``)."""
    return eliminate_linear(p, corpus.expected("Lm20"), "Lm2")


def taup3_terms(corpus: Corpus) -> list[Polynomial]:
    """The four stored terms of taup3, split by their power of ``psi``."""
    parts = corpus.expected("taup3").coefficients_in("psi")
    psi = _lam().var("psi")
    return [parts[e] * psi ** e for e in sorted(parts)]


def _one_plus_phi2():
    phi = _lam().var("phi")
    return phi * phi + 1


def _part(index):
    def run(corpus, details):
        term = taup3_terms(corpus)[index - 1]
        e = eliminate_lm2_via_lm20(dv.lambda_ring_derivation(term), corpus)
        q = divide_exact(e, _one_plus_phi2())
        if q is not None:
            e = q
            details["divided_by"] = "1 + phi^2"
        details["multiplier"] = "-4*(1 + phi^2)"
        return [Comparison("lambda", e, corpus.expected(f"part{index}"))]
    return run


for _i in (1, 2, 3, 4):
    RECIPES[f"part{_i}"] = _part(_i)


@recipe("taup4")
def _taup4(corpus, details):
    e = eliminate_lm2_via_lm20(dv.lambda_ring_derivation(corpus.expected("taup3")), corpus)
    details["multiplier"] = "-4*(1 + phi^2)"
    parts = [corpus.expected(f"part{i}") for i in (1, 2, 3, 4)]
    assembled = (parts[0] + parts[1] + parts[3]) * _one_plus_phi2().scale(3) + parts[2]
    return [Comparison("derived", e, corpus.expected("taup4")),
            Comparison("assembled", assembled, corpus.expected("taup4"))]


@lru_cache(maxsize=4)
def corpus_elimination(directory: str) -> EliminationReport:
    corpus = Corpus(Path(directory))
    factors = [(n, corpus.expected(n)) for n in ("taup0-a", "taup0-b", "taup0-c")]
    return eliminate_tau(corpus.expected("taup3"), corpus.expected("taup4"), "tau", factors)


def _factor(name):
    def run(corpus, details):
        report = corpus_elimination(str(corpus.directory))
        return [Comparison("f0", report.f0, corpus.expected(name))]
    return run


for _n in ("taup0-a", "taup0-b", "taup0-c"):
    RECIPES[_n] = _factor(_n)


@recipe("f0-factors")
def _f0_factors(corpus, details):
    report = corpus_elimination(str(corpus.directory))
    product = _lam().one()
    for n in ("taup0-a", "taup0-b", "taup0-c"):
        product = product * corpus.expected(n)
    details["degrees"] = report.degrees()
    if report.account is not None:
        details["cofactor_complete"] = report.account.complete
    return [Comparison("f0", report.f0, product)]


@recipe("dtau")
def _dtau(corpus, details):
    jets = lambda_ring(dv.DEFAULT_MAX_LAMBDA, True)
    r = jets.resolve
    tau1, tau2 = jets.var("tau1"), jets.var("tau2")
    ode = -tau2 + tau1 * r("sum_l0m1") + r("tau") * (r("tau") ** 2 * Fraction(1, 4) + r("Lm2"))
    rate = embed(dv.lambda_system().rule("tau"), jets.table)
    e = eliminate_linear(ode, tau1 - rate, "Lm2")
    return [Comparison("lambda+jets", e, corpus.expected("dtau"))]


@recipe("cos-si")
def _cos(corpus, details):
    p0 = corpus.expected("P0", s_ring())
    return [Comparison("s", sk.cos_relation_from_p0(p0), corpus.expected("cos-si"))]


@recipe("sin-si")
def _sin(corpus, details):
    rel, units = sk.sin_relation_from_cos(corpus.expected("cos-si"))
    details["units"] = [f"({to_text(u)})^{e}" for u, e in units]
    return [Comparison("s", rel, corpus.expected("sin-si"))]


@recipe("Q")
def _q(corpus, details):
    q, units = sk.q_from_cos_sin(corpus.expected("cos-si"), corpus.expected("sin-si"))
    details["units"] = [f"({to_text(u)})^{e}" for u, e in units]
    return [Comparison("s", q, corpus.expected("Q"))]


# -- public API ------------------------------------------------------------

def identity_names(corpus: Optional[Corpus] = None) -> list[str]:
    corpus = corpus or Corpus()
    return [n for n in corpus.entries if n in RECIPES]


def check_identity(name: str, corpus: Optional[Corpus] = None) -> Verdict:
    corpus = corpus or Corpus()
    entry = corpus.entry(name)
    if name not in RECIPES:
        raise UnknownIdentityError(name)
    details: dict = {}
    comparisons = RECIPES[name](corpus, details)
    return compare(entry.mode, comparisons, name, details)
