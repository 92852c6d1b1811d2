"""Exact sparse multivariate polynomials over the rationals.

Coefficients are stored as ``int`` when integral and as
:class:`fractions.Fraction` otherwise, so integer-heavy work (the pseudo
remainder sequences) stays on the fast path.  Monomials are exponent tuples
aligned with a :class:`VarTable`; the monomial order is graded
lexicographic over the table order.

Polynomials are immutable.  Every operation returns a fresh object.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Iterable, Mapping, Optional, Union

Coeff = Union[int, Fraction]
Monomial = tuple


class PolynomialError(ValueError):
    """Raised for invalid polynomial operations (mixed tables, bad exponents...)."""


def as_rational(value) -> Coeff:
    """Coerce ``value`` to an exact coefficient, normalising integral fractions to int."""
    if isinstance(value, bool):
        raise PolynomialError("booleans are not coefficients")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, _RationalABC):
        return as_rational(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return as_rational(Fraction(value))
    raise PolynomialError(f"not an exact rational: {value!r}")


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class VarTable:
    """Ordered, duplicate-free list of variable names.

    Two tables are compatible iff their name tuples are equal; the table is
    hashable so it can key caches.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolynomialError(f"duplicate variable names in {names}")
        for name in names:
            if not isinstance(name, str) or not name:
                raise PolynomialError(f"bad variable name {name!r}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolynomialError(f"unknown variable {name!r}; table has {self.names}") from None

    def __eq__(self, other):
        return self is other or (isinstance(other, VarTable) and self.names == other.names)

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({list(self.names)})"

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial.const(self, 1)

    def const(self, c) -> "Polynomial":
        return Polynomial.const(self, c)

    def var(self, name: str) -> "Polynomial":
        return Polynomial.var(self, name)

    def vars(self, *names: str):
        return tuple(self.var(n) for n in names)


def grlex_key(mono: Monomial):
    return (sum(mono), mono)


class Polynomial:
    """A sparse polynomial: ``{exponent tuple: nonzero coefficient}``."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VarTable, terms: Mapping[Monomial, Coeff]):
        # trusted constructor: callers guarantee canonical terms
        self.table = table
        self.terms = terms
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def const(cls, table: VarTable, c) -> "Polynomial":
        c = as_rational(c)
        if c == 0:
            return cls(table, {})
        return cls(table, {(0,) * len(table): c})

    @classmethod
    def var(cls, table: VarTable, name: str) -> "Polynomial":
        i = table.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(table)))
        return cls(table, {mono: 1})

    @classmethod
    def from_terms(cls, table: VarTable, terms: Iterable[tuple[Monomial, object]]) -> "Polynomial":
        acc: dict = {}
        n = len(table)
        for mono, c in terms:
            mono = tuple(mono)
            if len(mono) != n or any((not isinstance(e, int)) or e < 0 for e in mono):
                raise PolynomialError(f"bad monomial {mono} for {table}")
            c = as_rational(c)
            acc[mono] = acc.get(mono, 0) + c
        return cls(table, {m: _norm(c) for m, c in acc.items() if c != 0})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Coeff:
        if not self.is_constant():
            raise PolynomialError("polynomial is not constant")
        return next(iter(self.terms.values())) if self.terms else 0

    def coefficient(self, mono: Monomial) -> Coeff:
        return self.terms.get(tuple(mono), 0)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def degree(self, var: Optional[str] = None) -> int:
        """Degree in ``var`` (total degree when omitted); the zero polynomial has degree -1."""
        if var is None:
            return self.total_degree()
        i = self.table.index(var)
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def variables(self) -> tuple[str, ...]:
        """Names of the variables that actually occur."""
        used = [False] * len(self.table)
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(n for n, u in zip(self.table.names, used) if u)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self) -> Coeff:
        return self.terms[self.leading_monomial()]

    def sorted_terms(self):
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.table is not other.table and self.table != other.table:
            raise PolynomialError(
                f"mismatched variable tables: {self.table.names} vs {other.table.names}")

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.const(self.table, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = _norm(v)
            else:
                out.pop(m, None)
        return Polynomial(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.table, {m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) - c
            if v:
                out[m] = _norm(v)
            else:
                out.pop(m, None)
        return Polynomial(self.table, out)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if c == 0:
            return Polynomial(self.table, {})
        if c == 1:
            return self
        return Polynomial(self.table, {m: _norm(v * c) for m, v in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c=1) -> "Polynomial":
        c = as_rational(c)
        if c == 0:
            return Polynomial(self.table, {})
        return Polynomial(self.table, {
            tuple(a + b for a, b in zip(m, mono)): _norm(v * c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial(self.table, {})
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        bitems = list(b.items())
        for ma, ca in a.items():
            for mb, cb in bitems:
                m = tuple([x + y for x, y in zip(ma, mb)])
                out[m] = get(m, 0) + ca * cb
        return Polynomial(self.table, {m: _norm(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or isinstance(e, bool):
            raise PolynomialError(f"exponent must be an int, got {e!r}")
        if e < 0:
            raise PolynomialError("negative exponent")
        result = self.table.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __truediv__(self, other):
        """Division by a nonzero rational constant (use :func:`divide_exact` for polynomials)."""
        if isinstance(other, Polynomial):
            self._check(other)
            if not other.is_constant():
                raise PolynomialError("use divide_exact for polynomial division")
            other = other.constant_value()
        c = as_rational(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self.scale(Fraction(1) / c)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.table == other.table and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def diff(self, var: str) -> "Polynomial":
        i = self.table.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Polynomial(self.table, out)

    def coefficients_in(self, var: str) -> dict[int, "Polynomial"]:
        """Split as ``sum_k coeff_k * var**k``; the coefficients keep the same table."""
        i = self.table.index(var)
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            e = m[i]
            parts.setdefault(e, {})[m[:i] + (0,) + m[i + 1:]] = c
        return {e: Polynomial(self.table, t) for e, t in parts.items()}

    def coefficient_of(self, var: str, power: int) -> "Polynomial":
        return self.coefficients_in(var).get(power, self.table.zero())

    def __repr__(self):
        return f"Polynomial({to_text(self)!r})"

    def __str__(self):
        return to_text(self)


Scalar = Union[int, Fraction]


def _check_same(a: Polynomial, b: Polynomial):
    if a.table != b.table:
        raise PolynomialError(f"mismatched variable tables: {a.table.names} vs {b.table.names}")


def arith(op: str, a: Polynomial, b) -> Polynomial:
    """Dispatch ``add``/``sub``/``mul``/``pow`` by name."""
    if op == "pow":
        return a ** b
    if not isinstance(b, Polynomial):
        raise PolynomialError(f"{op} needs a polynomial operand")
    _check_same(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PolynomialError(f"unknown operation {op!r}")


def differentiate(p: Polynomial, var: str) -> Polynomial:
    return p.diff(var)


def substitute(p: Polynomial, mapping: Mapping[str, object],
               target: Optional[VarTable] = None) -> Polynomial:
    """Simultaneous substitution ``var -> image``.

    Images are polynomials over ``target`` (default: ``p.table``) or exact
    scalars.  Unmapped variables are carried over by name, which is how an
    explicit embedding into another ring is expressed; an unmapped variable
    that occurs in ``p`` but is missing from ``target`` is an error.
    """
    src = p.table
    target = target or src
    for name in mapping:
        src.index(name)
    mapped: list[int] = []
    images: dict[int, Polynomial] = {}
    carried: dict[int, int] = {}
    for i, name in enumerate(src.names):
        if name in mapping:
            img = mapping[name]
            if isinstance(img, Polynomial):
                if img.table != target:
                    raise PolynomialError(
                        f"image of {name!r} lives over {img.table.names}, expected {target.names}")
            else:
                img = Polynomial.const(target, img)
            images[i] = img
            mapped.append(i)
        elif name in target:
            carried[i] = target.index(name)

    powers: dict[tuple[int, int], Polynomial] = {}
    products: dict[tuple, Polynomial] = {}

    def product(key):
        if key not in products:
            acc = target.one()
            for i, e in zip(mapped, key):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = images[i] ** e
                    acc = acc * powers[(i, e)]
            products[key] = acc
        return products[key]

    out: dict = {}
    n_target = len(target)
    for m, c in p.terms.items():
        shift = [0] * n_target
        for i, e in enumerate(m):
            if e and i not in images:
                if i not in carried:
                    raise PolynomialError(
                        f"variable {src.names[i]!r} has no image and is absent from the target table")
                shift[carried[i]] += e
        base = product(tuple(m[i] for i in mapped))
        for bm, bc in base.terms.items():
            t = tuple([x + y for x, y in zip(bm, shift)])
            out[t] = out.get(t, 0) + bc * c
    return Polynomial(target, {m: _norm(c) for m, c in out.items() if c})


def embed(p: Polynomial, target: VarTable) -> Polynomial:
    """Re-express ``p`` over a table containing all of its occurring variables."""
    return substitute(p, {}, target)


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def divide_exact(a: Polynomial, b: Polynomial) -> Optional[Polynomial]:
    """Return ``q`` with ``a == q*b``, or ``None`` when ``b`` does not divide ``a``.

    Multivariate division by a single divisor in graded-lex order; a single
    polynomial is a Groebner basis of its ideal, so a leading term that is
    not divisible proves non-divisibility and we stop early.
    """
    _check_same(a, b)
    if b.is_zero():
        raise ZeroDivisionError("divide_exact by the zero polynomial")
    if a.is_zero():
        return a.table.zero()
    lb = b.leading_monomial()
    cb = b.terms[lb]
    inv_cb = Fraction(1, 1) / cb
    b_rest = [(m, c) for m, c in b.terms.items() if m != lb]
    r = dict(a.terms)
    q: dict = {}
    while r:
        lm = max(r, key=grlex_key)
        if not _mono_divides(lb, lm):
            return None
        shift = tuple(x - y for x, y in zip(lm, lb))
        coef = _norm(r.pop(lm) * inv_cb)
        q[shift] = coef
        for m, c in b_rest:
            t = tuple([x + y for x, y in zip(m, shift)])
            v = r.get(t, 0) - coef * c
            if v:
                r[t] = _norm(v)
            else:
                r.pop(t, None)
    return Polynomial(a.table, q)


def divides(b: Polynomial, a: Polynomial) -> bool:
    return divide_exact(a, b) is not None


def content(p: Polynomial) -> Fraction:
    """Positive rational ``c`` with ``p / c`` integral and primitive."""
    if p.is_zero():
        raise PolynomialError("content of the zero polynomial")
    num = 0
    den = 1
    for c in p.terms.values():
        if type(c) is int:
            num = math.gcd(num, c)
        else:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
    return Fraction(num, den)


def primitive_part(p: Polynomial) -> tuple[Fraction, Polynomial]:
    """Split ``p == unit * q`` with ``q`` integral, primitive, positive leading coefficient.

    ``unit`` is the signed content: ``abs(unit) == content(p)`` and its sign
    records the sign flip applied to reach a positive leading coefficient.
    """
    c = content(p)
    if p.leading_coefficient() < 0:
        c = -c
    if c == 1:
        return Fraction(1), p
    inv = 1 / c
    return c, Polynomial(p.table, {m: _norm(v * inv) for m, v in p.terms.items()})


def monomial_content(p: Polynomial) -> Monomial:
    """Componentwise minimum exponent: the largest monomial dividing every term."""
    if p.is_zero():
        raise PolynomialError("monomial content of the zero polynomial")
    mins = None
    for m in p.terms:
        mins = list(m) if mins is None else [min(a, b) for a, b in zip(mins, m)]
    return tuple(mins)


def strip_monomial_content(p: Polynomial) -> tuple[Monomial, Polynomial]:
    mono = monomial_content(p)
    if not any(mono):
        return mono, p
    return mono, Polynomial(p.table, {
        tuple(a - b for a, b in zip(m, mono)): c for m, c in p.terms.items()})


def proportionality(a: Polynomial, b: Polynomial) -> Optional[Fraction]:
    """The rational ``r`` with ``a == r*b`` if one exists (both nonzero), else ``None``."""
    _check_same(a, b)
    if a.is_zero() or b.is_zero() or len(a.terms) != len(b.terms):
        return None
    ratio = None
    for m, cb in b.terms.items():
        ca = a.terms.get(m)
        if ca is None:
            return None
        r = Fraction(ca) / cb
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _is_floating(v) -> bool:
    return isinstance(v, float) or hasattr(v, "dtype")


def evaluate(p: Polynomial, assignment: Mapping[str, object]):
    """Evaluate ``p`` by nested Horner in table order.

    Exact when every value is an int/Fraction.  If any value is a float or a
    numpy array the coefficients are converted to float first; other value
    types (e.g. quadratic surds) only need ``+``, ``*`` and ``**``.  Only
    variables that occur in ``p`` need a value.
    """
    values = []
    for i, name in enumerate(p.table.names):
        if any(m[i] for m in p.terms):
            if name not in assignment:
                raise PolynomialError(f"no value for variable {name!r}")
            v = assignment[name]
            values.append(as_rational(v) if _is_exact(v) else v)
        else:
            values.append(None)
    if not p.terms:
        return 0
    items = list(p.terms.items())
    if any(v is not None and _is_floating(v) for v in values):
        items = [(m, float(c)) for m, c in items]
    return _horner(items, 0, values)


def _horner(items, i, values):
    n = len(values)
    while i < n and values[i] is None:
        i += 1
    if i == n:
        total = 0
        for _, c in items:
            total = total + c
        return total
    groups: dict[int, list] = {}
    for m, c in items:
        groups.setdefault(m[i], []).append((m, c))
    x = values[i]
    acc = 0
    prev = None
    for e in sorted(groups, reverse=True):
        if prev is not None:
            acc = acc * x ** (prev - e)
        acc = acc + _horner(groups[e], i + 1, values)
        prev = e
    if prev:
        acc = acc * x ** prev
    return acc


def compile_evaluator(p: Polynomial, names: Optional[Iterable[str]] = None) -> Callable:
    """Vectorised float evaluator ``f(X)`` for ``X`` of shape ``(points, len(names))``.

    Builds per-variable power tables and sums ``c * prod(x**e)`` term by
    term; use :func:`evaluate` when the Horner order matters.  ``names`` fixes
    the column order (default: the table order).
    """
    import numpy as np

    names = tuple(names) if names is not None else p.table.names
    missing = [v for v in p.variables() if v not in names]
    if missing:
        raise PolynomialError(f"evaluator columns do not cover {missing}")
    cols = [(names.index(v), p.table.index(v)) for v in p.variables()]
    if p.terms:
        exps = np.array([[m[j] for _, j in cols] for m in p.terms], dtype=np.int64)
        coefs = np.array([float(c) for c in p.terms.values()])
    else:
        exps = np.zeros((0, len(cols)), dtype=np.int64)
        coefs = np.zeros(0)

    def f(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        if not len(coefs):
            return out
        acc = np.ones((len(coefs), X.shape[0])) * coefs[:, None]
        for k, (col, _) in enumerate(cols):
            deg = int(exps[:, k].max())
            if deg == 0:
                continue
            x = X[:, col]
            table = np.ones((deg + 1, X.shape[0]))
            for d in range(1, deg + 1):
                table[d] = table[d - 1] * x
            acc *= table[exps[:, k]]
        return acc.sum(axis=0)

    return f


# -- canonical text ---------------------------------------------------------

def _fmt_coeff(c: Coeff) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _fmt_mono(table: VarTable, m: Monomial) -> str:
    parts = []
    for name, e in zip(table.names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def to_text(p: Polynomial) -> str:
    """Canonical text: terms in decreasing graded-lex order, e.g. ``3/2*tau^2 - 4*phi*psi``."""
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _fmt_mono(p.table, m)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
