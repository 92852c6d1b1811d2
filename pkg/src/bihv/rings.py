"""Ring contexts: a variable table plus the named aliases the corpus uses.

Every context knows how to expand

* ``n``       ambient dimension, always ``n1 + 1``;
* ``tau``     the tension, ``(2/3) * sum lm_i`` in whatever form the ring has;
* ``Lm<k>``   power sums ``sum lm_i^k``;
* ``sum_l<a>m<b>``  mixed power sums ``sum lm_i^a * mu_i^b``.

so one transcription of a reference formula with sums can be parsed into the
full ring for a fixed ``n1``, into the Lambda ring with symbolic ``n1``, and
so on.  Cross-ring moves always go through an explicit ``substitute`` map.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Optional

from .poly import Polynomial, PolynomialError, VarTable

_SUM_RE = re.compile(r"^sum_l(\d+)m(\d+)$")
_LM_RE = re.compile(r"^Lm(\d+)$")

DEFAULT_MAX_LAMBDA = 4


class Ring:
    """A :class:`VarTable` with alias resolution for the parser."""

    def __init__(self, name: str, table: VarTable,
                 aliases: Optional[dict[str, Callable[[], Polynomial]]] = None,
                 pattern: Optional[Callable[[str], Optional[Polynomial]]] = None,
                 n1: Optional[int] = None):
        self.name = name
        self.table = table
        self._aliases = dict(aliases or {})
        self._pattern = pattern
        self._cache: dict[str, Polynomial] = {}
        self.n1 = n1

    def __repr__(self):
        return f"Ring({self.name!r})"

    def var(self, name: str) -> Polynomial:
        return self.table.var(name)

    def const(self, c) -> Polynomial:
        return self.table.const(c)

    def zero(self) -> Polynomial:
        return self.table.zero()

    def one(self) -> Polynomial:
        return self.table.one()

    def resolve(self, name: str) -> Polynomial:
        """Variable or alias ``name`` as a polynomial of this ring."""
        if name in self.table:
            return self.table.var(name)
        if name in self._cache:
            return self._cache[name]
        value = None
        if name in self._aliases:
            value = self._aliases[name]()
        elif self._pattern is not None:
            value = self._pattern(name)
        if value is None:
            raise PolynomialError(f"unknown variable {name!r} in ring {self.name}")
        self._cache[name] = value
        return value

    def knows(self, name: str) -> bool:
        try:
            self.resolve(name)
        except PolynomialError:
            return False
        return True


def _lm(i):
    return f"lm{i}"


def _mu(i):
    return f"mu{i}"


@lru_cache(maxsize=None)
def full_ring(n1: int) -> Ring:
    """``Q[lm_1..lm_n1, mu_1..mu_n1, K]`` for a concrete ``n1``."""
    if n1 < 1:
        raise PolynomialError("n1 must be >= 1")
    table = VarTable([_lm(i) for i in range(1, n1 + 1)] + [_mu(i) for i in range(1, n1 + 1)] + ["K"])
    lms = [table.var(_lm(i)) for i in range(1, n1 + 1)]
    mus = [table.var(_mu(i)) for i in range(1, n1 + 1)]

    def mixed(a, b):
        acc = table.zero()
        for lm, mu in zip(lms, mus):
            acc = acc + lm ** a * mu ** b
        return acc

    def pattern(name):
        m = _SUM_RE.match(name)
        if m:
            return mixed(int(m.group(1)), int(m.group(2)))
        m = _LM_RE.match(name)
        if m:
            return mixed(int(m.group(1)), 0)
        return None

    aliases = {
        "n1": lambda: table.const(n1),
        "n": lambda: table.const(n1 + 1),
        "tau": lambda: mixed(1, 0).scale(Fraction(2, 3)),
    }
    return Ring(f"full:{n1}", table, aliases, pattern, n1=n1)


@lru_cache(maxsize=None)
def linear_full_ring(n1: int) -> Ring:
    """``Q[lm_1..lm_n1, phi, psi, K]`` with ``mu_i`` aliased to ``phi*lm_i + psi``."""
    table = VarTable([_lm(i) for i in range(1, n1 + 1)] + ["phi", "psi", "K"])
    lms = [table.var(_lm(i)) for i in range(1, n1 + 1)]
    phi, psi = table.var("phi"), table.var("psi")
    mus = [phi * lm + psi for lm in lms]

    def mixed(a, b):
        acc = table.zero()
        for lm, mu in zip(lms, mus):
            acc = acc + lm ** a * mu ** b
        return acc

    def pattern(name):
        m = _SUM_RE.match(name)
        if m:
            return mixed(int(m.group(1)), int(m.group(2)))
        m = _LM_RE.match(name)
        if m:
            return mixed(int(m.group(1)), 0)
        m = re.match(r"^mu(\d+)$", name)
        if m and 1 <= int(m.group(1)) <= n1:
            return mus[int(m.group(1)) - 1]
        return None

    aliases = {
        "n1": lambda: table.const(n1),
        "n": lambda: table.const(n1 + 1),
        "tau": lambda: mixed(1, 0).scale(Fraction(2, 3)),
    }
    return Ring(f"linear:{n1}", table, aliases, pattern, n1=n1)


def lambda_names(max_index: int) -> list[str]:
    return [f"Lm{k}" for k in range(2, max_index + 1)]


@lru_cache(maxsize=None)
def lambda_ring(max_index: int = DEFAULT_MAX_LAMBDA, jets: bool = False) -> Ring:
    """``Q[n1, K, tau, phi, psi, Lm2..Lm<max_index>]`` (plus ``tau1, tau2`` when ``jets``).

    ``Lm0 = n1`` and ``Lm1 = (3/2) tau`` are aliases, as is every mixed sum
    under the linear relation ``mu_i = phi*lm_i + psi``.
    """
    if max_index < 2:
        raise PolynomialError("the Lambda ring needs at least Lm2")
    names = ["n1", "K", "tau", "phi", "psi"] + lambda_names(max_index)
    if jets:
        names += ["tau1", "tau2"]
    table = VarTable(names)
    n1 = table.var("n1")
    tau = table.var("tau")
    phi, psi = table.var("phi"), table.var("psi")

    def power_sum(k):
        if k == 0:
            return n1
        if k == 1:
            return tau.scale(Fraction(3, 2))
        if k > max_index:
            raise PolynomialError(f"Lm{k} exceeds the ring's maximum index {max_index}")
        return table.var(f"Lm{k}")

    def mixed(a, b):
        acc = table.zero()
        for j in range(b + 1):
            acc = acc + power_sum(a + j) * phi ** j * psi ** (b - j) * comb(b, j)
        return acc

    def pattern(name):
        m = _SUM_RE.match(name)
        if m:
            return mixed(int(m.group(1)), int(m.group(2)))
        m = _LM_RE.match(name)
        if m:
            return power_sum(int(m.group(1)))
        return None

    aliases = {"n": lambda: n1 + 1}
    return Ring("lambda+jets" if jets else "lambda", table, aliases, pattern)


@lru_cache(maxsize=None)
def equal_ring() -> Ring:
    """``Q[n1, K, lm, mu]``: all ``lm_i = lm`` and all ``mu_i = mu`` with symbolic ``n1``."""
    table = VarTable(["n1", "K", "lm", "mu"])
    n1, lm, mu = table.var("n1"), table.var("lm"), table.var("mu")

    def pattern(name):
        m = _SUM_RE.match(name)
        if m:
            return n1 * lm ** int(m.group(1)) * mu ** int(m.group(2))
        m = _LM_RE.match(name)
        if m:
            return n1 * lm ** int(m.group(1))
        return None

    aliases = {
        "n": lambda: n1 + 1,
        "tau": lambda: (n1 * lm).scale(Fraction(2, 3)),
    }
    return Ring("equal", table, aliases, pattern)


S_MAX = 5


@lru_cache(maxsize=None)
def s_ring() -> Ring:
    """``Q[n1, p, s1..s5, cth, sth]`` for the ``psi = 0`` analysis.

    There ``lm_i = -sin(theta)/(p + b_i)`` and ``mu_i = -cos(theta)/(p + b_i)``;
    ``s_k = sum (p + b_i)^-k``, ``cth = cos(theta)``, ``sth = sin(theta)``.
    The ambient space is Euclidean, so ``K`` is the alias 0.
    """
    table = VarTable(["n1", "p"] + [f"s{k}" for k in range(1, S_MAX + 1)] + ["cth", "sth"])
    n1 = table.var("n1")
    cth, sth = table.var("cth"), table.var("sth")

    def s(k):
        if k == 0:
            return n1
        if k > S_MAX:
            raise PolynomialError(f"s{k} exceeds the s-ring's maximum index {S_MAX}")
        return table.var(f"s{k}")

    def pattern(name):
        m = _SUM_RE.match(name)
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            return (sth ** a * cth ** b * s(a + b)).scale((-1) ** (a + b))
        return None

    aliases = {
        "n": lambda: n1 + 1,
        "K": lambda: table.zero(),
        "tau": lambda: (sth * s(1)).scale(Fraction(-2, 3)),
    }
    return Ring("s", table, aliases, pattern)


def ring_from_spec(spec: str) -> Ring:
    """Parse a manifest ring field: ``full:<n1>``, ``linear:<n1>``, ``lambda``,
    ``lambda:<max>``, ``lambda+jets``, ``equal`` or ``s``."""
    spec = spec.strip()
    if spec.startswith("full:"):
        return full_ring(int(spec[5:]))
    if spec.startswith("linear:"):
        return linear_full_ring(int(spec[7:]))
    if spec == "lambda":
        return lambda_ring()
    if spec == "lambda+jets":
        return lambda_ring(DEFAULT_MAX_LAMBDA, True)
    if spec.startswith("lambda:"):
        return lambda_ring(int(spec[7:]))
    if spec == "equal":
        return equal_ring()
    if spec == "s":
        return s_ring()
    raise PolynomialError(f"unknown ring spec {spec!r}")
