"""Derivations induced by the ODE system on polynomial rings.

Two systems matter:

* the full system on ``Q[lm_i, mu_i, K]`` (``n1`` concrete)::

      lm_i' = (tau/2 + lm_i) mu_i,   mu_i' = mu_i^2 - tau lm_i / 2 + K,
      tau = (2/3) sum lm_i,          K' = 0

  which generates the chain ``P_0, P_1, ...``;

* the Lambda-ring system on ``Q[n1, K, tau, phi, psi, Lm2..]`` that holds once
  ``mu_i = phi lm_i + psi``::

      phi' = -tau (phi^2 + 1)/2 + phi psi
      psi' = (psi - tau phi / 2) psi            (+ K with curvature)
      tau' = (n1 + 3) tau psi / 3 + tau^2 phi / 2 + 2 phi Lm2 / 3
      Lm_k' = k (tau psi Lm_{k-1} / 2 + (tau phi / 2 + psi) Lm_k + phi Lm_{k+1})
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .poly import (Polynomial, PolynomialError, VarTable, proportionality, substitute)
from .rings import (DEFAULT_MAX_LAMBDA, Ring, equal_ring, full_ring, lambda_ring,
                    linear_full_ring)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


class DerivationError(PolynomialError):
    pass


class SizeGuardError(DerivationError):
    """A chain member outgrew the configured term budget."""


class DerivationSystem:
    """A derivation ``D`` on a polynomial ring, given by ``D(v)`` for each variable.

    ``rules`` maps names to images over the same table.  ``lazy`` may supply
    rules on demand (used for the open-ended ``Lm_k``); it should raise
    :class:`DerivationError` when a rule cannot be formed.
    """

    def __init__(self, table: VarTable, rules: Mapping[str, Polynomial],
                 lazy: Optional[Callable[[str], Optional[Polynomial]]] = None,
                 name: str = ""):
        for var, img in rules.items():
            table.index(var)
            if img.table != table:
                raise DerivationError(f"rule for {var!r} lives in another ring")
        self.table = table
        self.rules = dict(rules)
        self.lazy = lazy
        self.name = name

    def rule(self, var: str) -> Polynomial:
        if var in self.rules:
            return self.rules[var]
        img = self.lazy(var) if self.lazy else None
        if img is None:
            raise DerivationError(f"no derivation rule for variable {var!r} ({self.name})")
        self.rules[var] = img
        return img

    def __call__(self, p: Polynomial) -> Polynomial:
        if p.table != self.table:
            raise DerivationError(f"polynomial over {p.table.names} given to {self.name} derivation")
        out = self.table.zero()
        for var in p.variables():
            partial = p.diff(var)
            if partial.is_zero():
                continue
            out = out + partial * self.rule(var)
        return out

    def iterate(self, p: Polynomial, times: int) -> Polynomial:
        for _ in range(times):
            p = self(p)
        return p


# -- full system -----------------------------------------------------------

_FULL_SYSTEMS: dict[int, DerivationSystem] = {}


def full_system(n1: int) -> DerivationSystem:
    if n1 not in _FULL_SYSTEMS:
        ring = full_ring(n1)
        tau = ring.resolve("tau")
        K = ring.var("K")
        rules = {"K": ring.zero()}
        for i in range(1, n1 + 1):
            lm, mu = ring.var(f"lm{i}"), ring.var(f"mu{i}")
            rules[f"lm{i}"] = (tau.scale(HALF) + lm) * mu
            rules[f"mu{i}"] = mu * mu - (tau * lm).scale(HALF) + K
        _FULL_SYSTEMS[n1] = DerivationSystem(ring.table, rules, name=f"full n1={n1}")
    return _FULL_SYSTEMS[n1]


def full_derivation(p: Polynomial, n1: int) -> Polynomial:
    """``sum_v dp/dv * rule(v)`` for the full system with ``n1`` index pairs."""
    return full_system(n1)(p)


# -- Lambda ring -----------------------------------------------------------

def lambda_rate(ring: Ring, k: int) -> Polynomial:
    """``Lm_k'`` as given by the power-sum recursion (``Lm_0 = n1``, ``Lm_1 = 3 tau / 2``)."""
    if k == 0:
        return ring.zero()
    tau, phi, psi = ring.var("tau"), ring.var("phi"), ring.var("psi")
    prev, cur, nxt = (ring.resolve(f"Lm{j}") for j in (k - 1, k, k + 1))
    body = (tau * psi * prev).scale(HALF) + ((tau * phi).scale(HALF) + psi) * cur + phi * nxt
    return body.scale(k)


_LAMBDA_SYSTEMS: dict = {}


def lambda_system(ring: Optional[Ring] = None, *, curvature: bool = False) -> DerivationSystem:
    """The Lambda-ring derivation over ``ring`` (default: ``lambda_ring()``).

    With ``curvature`` the ``psi`` rule carries the ``+K`` of a general space
    form; the reference identities are all for ``K = 0``.
    """
    ring = ring or lambda_ring()
    key = (ring.name, ring.table, curvature)
    if key in _LAMBDA_SYSTEMS:
        return _LAMBDA_SYSTEMS[key]
    n1, K, tau = ring.var("n1"), ring.var("K"), ring.var("tau")
    phi, psi = ring.var("phi"), ring.var("psi")
    max_index = max(int(v[2:]) for v in ring.table.names if v.startswith("Lm"))
    psi_rate = (psi - (tau * phi).scale(HALF)) * psi
    if curvature:
        psi_rate = psi_rate + K
    rules = {
        "n1": ring.zero(),
        "K": ring.zero(),
        "phi": -(tau * (phi * phi + 1)).scale(HALF) + phi * psi,
        "psi": psi_rate,
        "tau": (tau * psi * (n1 + 3)).scale(THIRD) + (tau * tau * phi).scale(HALF)
        + (phi * ring.var("Lm2")).scale(Fraction(2, 3)),
    }

    def lazy(var):
        if var.startswith("Lm"):
            k = int(var[2:])
            if k + 1 > max_index:
                raise DerivationError(
                    f"derivative of {var} needs Lm{k + 1}, beyond the maximum index {max_index}")
            return lambda_rate(ring, k)
        return None

    system = DerivationSystem(ring.table, rules, lazy, name=f"lambda max={max_index}")
    _LAMBDA_SYSTEMS[key] = system
    return system


def lambda_ring_derivation(p: Polynomial, max_lambda_index: int = DEFAULT_MAX_LAMBDA,
                           *, curvature: bool = False) -> Polynomial:
    ring = lambda_ring(max_lambda_index)
    if p.table != ring.table:
        jets = lambda_ring(max_lambda_index, True)
        if p.table == jets.table:
            ring = jets
        else:
            raise DerivationError(f"{p.table.names} is not a Lambda ring with max index {max_lambda_index}")
    return lambda_system(ring, curvature=curvature)(p)


def equal_system() -> DerivationSystem:
    """All ``lm_i = lm``, ``mu_i = mu``: ``lm' = (n1+3) lm mu / 3``, ``mu' = mu^2 - n1 lm^2 / 3 + K``."""
    ring = equal_ring()
    n1, K, lm, mu = (ring.var(v) for v in ("n1", "K", "lm", "mu"))
    rules = {
        "n1": ring.zero(),
        "K": ring.zero(),
        "lm": (lm * mu * (n1 + 3)).scale(THIRD),
        "mu": mu * mu - (n1 * lm * lm).scale(THIRD) + K,
    }
    return DerivationSystem(ring.table, rules, name="equal")


# -- tension equation and P0 -----------------------------------------------

def tension_residual(ring: Ring, system: DerivationSystem) -> Polynomial:
    """``-tau'' + tau' sum mu_i + tau (tau^2/4 - n K + sum lm_i^2)`` with the rates substituted."""
    tau = ring.resolve("tau")
    d1 = system(tau)
    d2 = system(d1)
    bracket = (tau * tau).scale(Fraction(1, 4)) - ring.resolve("n") * ring.resolve("K") \
        + ring.resolve("sum_l2m0")
    return -d2 + d1 * ring.resolve("sum_l0m1") + tau * bracket


def p0_in(ring: Ring) -> Polynomial:
    """The reference constraint polynomial, transcribed term by term over ``ring``'s sums."""
    r = ring.resolve
    tau = r("tau")
    terms = [
        r("sum_l1m2").scale(Fraction(-4, 3)),
        (tau * r("sum_l0m2")).scale(Fraction(-2, 3)),
        (r("sum_l0m1") * r("sum_l1m1")).scale(Fraction(4, 9)),
        (tau * r("sum_l2m0")).scale(Fraction(4, 3)),
        (tau * r("sum_l0m1") ** 2).scale(Fraction(2, 9)),
        (tau ** 3).scale(HALF),
        ((r("n") * 2 + 1) * r("K") * tau).scale(Fraction(-2, 3)),
    ]
    out = ring.zero()
    for t in terms:
        out = out + t
    return out


@dataclass(frozen=True)
class P0Construction:
    n1: int
    poly: Polynomial
    from_ode: Polynomial
    ratio: Fraction  # from_ode == ratio * poly


def build_p0(n1: int) -> P0Construction:
    """Build the constraint both verbatim and from the tension equation; they must be proportional."""
    if n1 < 1:
        raise DerivationError("n1 must be >= 1")
    ring = full_ring(n1)
    verbatim = p0_in(ring)
    derived = tension_residual(ring, full_system(n1))
    ratio = proportionality(derived, verbatim)
    if ratio is None:
        raise DerivationError(f"tension equation is not proportional to P0 for n1={n1}")
    return P0Construction(n1, verbatim, derived, ratio)


@dataclass
class PkChain:
    n1: int
    K: Optional[Fraction]
    polys: list[Polynomial] = field(default_factory=list)

    @property
    def degrees(self) -> list[int]:
        return [p.total_degree() for p in self.polys]

    @property
    def term_counts(self) -> list[int]:
        return [len(p) for p in self.polys]

    @property
    def k_max(self) -> int:
        return len(self.polys) - 1


def pk_chain(n1: int, k_max: int, K=None, *, max_terms: Optional[int] = None) -> PkChain:
    """``P_0 .. P_k_max``; ``K`` stays symbolic unless a rational value is given."""
    if k_max < 0:
        raise DerivationError("k_max must be >= 0")
    system = full_system(n1)
    p = build_p0(n1).poly
    if K is not None:
        K = Fraction(K)
        p = substitute(p, {"K": K})
    chain = PkChain(n1, K, [p])
    for k in range(k_max):
        p = system(p)
        if K is not None:   # K is constant along the flow, so fixing it commutes with the derivation
            p = substitute(p, {"K": K})
        if max_terms is not None and len(p) > max_terms:
            raise SizeGuardError(f"P_{k + 1} for n1={n1} has {len(p)} terms > {max_terms}")
        chain.polys.append(p)
    return chain


# -- power sums ------------------------------------------------------------

def mu_linear_substitution(p: Polynomial, n1: int) -> Polynomial:
    """Map a full-ring polynomial into ``Q[lm, phi, psi, K]`` via ``mu_i -> phi lm_i + psi``."""
    lin = linear_full_ring(n1)
    images = {f"mu{i}": lin.resolve(f"mu{i}") for i in range(1, n1 + 1)}
    return substitute(p, images, lin.table)


def lambda_to_linear(p: Polynomial, n1: int) -> Polynomial:
    """Expand a Lambda-ring polynomial for concrete ``n1`` into ``Q[lm, phi, psi, K]``."""
    lin = linear_full_ring(n1)
    images: dict[str, object] = {"n1": n1, "tau": lin.resolve("tau")}
    for name in p.table.names:
        if name.startswith("Lm"):
            images[name] = lin.resolve(name)
    for name in ("tau1", "tau2"):
        if name in p.table:
            if p.degree(name) > 0:
                raise DerivationError(f"cannot expand jet variable {name}")
            images[name] = 0
    return substitute(p, images, lin.table)


def _elementary(lin: Ring, n1: int, k: int) -> Polynomial:
    from itertools import combinations
    lms = [lin.var(f"lm{i}") for i in range(1, n1 + 1)]
    acc = lin.zero()
    for idx in combinations(range(n1), k):
        t = lin.one()
        for i in idx:
            t = t * lms[i]
        acc = acc + t
    return acc


def _elementary_in_power_sums(ring: Ring, k: int, cache: dict) -> Polynomial:
    # Newton: k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i
    if k in cache:
        return cache[k]
    if k == 0:
        cache[0] = ring.one()
        return cache[0]
    acc = ring.zero()
    for i in range(1, k + 1):
        term = _elementary_in_power_sums(ring, k - i, cache) * ring.resolve(f"Lm{i}")
        acc = acc + (term if i % 2 else -term)
    cache[k] = acc.scale(Fraction(1, k))
    return cache[k]


def power_sum_reduce(p: Polynomial, n1: int, max_index: int = DEFAULT_MAX_LAMBDA) -> Polynomial:
    """Rewrite a full-ring polynomial, after ``mu_i -> phi lm_i + psi``, in the Lambda ring.

    The substituted polynomial must be symmetric in the ``lm_i``.  It is
    reduced to elementary symmetric polynomials by leading-term elimination,
    which are then rewritten as power sums by Newton's identities.  The
    result is expanded back and checked against the input.
    """
    lin = linear_full_ring(n1)
    ring = lambda_ring(max_index)
    target = mu_linear_substitution(p, n1) if p.table == full_ring(n1).table else p
    if target.table != lin.table:
        raise DerivationError("power_sum_reduce expects a full-ring or linear-ring polynomial")

    elem = [_elementary(lin, n1, k) for k in range(n1 + 1)]
    newton_cache: dict = {}
    rest_names = ["phi", "psi", "K"]
    rest_index = [lin.table.index(v) for v in rest_names]

    remaining = dict(target.terms)
    out = ring.zero()
    while remaining:
        lead = max((m[:n1] for m in remaining))
        if any(lead[i] < lead[i + 1] for i in range(n1 - 1)):
            raise DerivationError(f"non-symmetric residue with exponent {lead} after reduction")
        coeff_terms = {m: c for m, c in remaining.items() if m[:n1] == lead}
        coeff_lin = Polynomial(lin.table, {(0,) * n1 + m[n1:]: c for m, c in coeff_terms.items()})
        # multiplier prod e_k^(a_k - a_{k+1}) in both rings
        mult_lin = lin.one()
        mult_ring = ring.one()
        for k in range(1, n1 + 1):
            e = lead[k - 1] - (lead[k] if k < n1 else 0)
            if e:
                if k > max_index:
                    raise DerivationError(f"reduction needs Lm{k}, beyond the maximum index {max_index}")
                mult_lin = mult_lin * elem[k] ** e
                mult_ring = mult_ring * _elementary_in_power_sums(ring, k, newton_cache) ** e
        sub = coeff_lin * mult_lin
        for m, c in sub.terms.items():
            v = remaining.get(m, 0) - c
            if v:
                remaining[m] = v
            else:
                remaining.pop(m, None)
        coeff_ring = Polynomial(ring.table, {}) + Polynomial.from_terms(ring.table, [
            (_lift(m, rest_index, ring), c) for m, c in coeff_terms.items()])
        out = out + coeff_ring * mult_ring
    if lambda_to_linear(out, n1) != target:
        raise DerivationError("power-sum reduction failed its expansion check")
    return out


def _lift(mono, rest_index, ring: Ring):
    out = [0] * len(ring.table)
    for name, idx in zip(("phi", "psi", "K"), rest_index):
        out[ring.table.index(name)] = mono[idx]
    return tuple(out)
