"""Numeric side: RK4 integration, closed-form families, residuals, constant solutions.

Full mode integrates ``lm_i' = (tau/2 + lm_i) mu_i``, ``mu_i' = mu_i^2 - tau lm_i/2 + K``
with ``tau = (2/3) sum lm_i``.  Linear-related mode integrates
``(tau, phi, psi, Lm2..Lm_n1)`` under the Lambda-ring rules, closing the
recursion with Newton's identities (``Lm_{n1+1}`` is fixed by ``Lm_1..Lm_n1``).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .derivation import pk_chain
from .poly import compile_evaluator, evaluate

BLOWUP_NORM = 1e12
POLE_EPS = 1e-9
GROUP_TOL = 1e-12


class SimulationError(RuntimeError):
    pass


class NonFiniteStateError(SimulationError):
    pass


class PoleError(SimulationError):
    pass


class ConstraintError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SystemSpec:
    n1: int
    K: Fraction = Fraction(0)
    mode: str = "full"          # "full" | "linear"

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError("n1 must be >= 1")
        if self.mode not in ("full", "linear"):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "K", Fraction(self.K))

    @property
    def dim(self) -> int:
        return 2 * self.n1 if self.mode == "full" else 3 + max(self.n1 - 1, 0)

    @property
    def names(self) -> list[str]:
        if self.mode == "full":
            return [f"lm{i}" for i in range(1, self.n1 + 1)] + [f"mu{i}" for i in range(1, self.n1 + 1)]
        return ["tau", "phi", "psi"] + [f"Lm{k}" for k in range(2, self.n1 + 1)]


def full_rhs(n1: int, K: float):
    def f(t, y):
        lm, mu = y[:n1], y[n1:]
        tau = 2.0 * lm.sum() / 3.0
        return np.concatenate(((0.5 * tau + lm) * mu, mu * mu - 0.5 * tau * lm + K))
    return f


def newton_next_power_sum(p: Sequence[float], n1: int) -> float:
    """``p_{n1+1}`` from ``p_1..p_n1`` for ``n1`` numbers (so ``e_{n1+1} = 0``)."""
    e = [1.0]
    for k in range(1, n1 + 1):
        e.append(sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1)) / k)
    return sum((-1) ** (i - 1) * e[i] * p[n1 - i] for i in range(1, n1 + 1))


def linear_rhs(n1: int, K: float):
    def f(t, y):
        tau, phi, psi = y[0], y[1], y[2]
        lam = [float(n1), 1.5 * tau] + list(y[3:])       # Lm0..Lm_n1
        lam.append(newton_next_power_sum(lam[1:], n1))   # Lm_{n1+1}
        dtau = (n1 + 3) * tau * psi / 3 + 0.5 * tau * tau * phi + 2.0 * phi * lam[2] / 3
        dphi = -0.5 * tau * (phi * phi + 1) + phi * psi
        dpsi = (psi - 0.5 * tau * phi) * psi + K
        dlam = [k * (0.5 * tau * psi * lam[k - 1] + (0.5 * tau * phi + psi) * lam[k] + phi * lam[k + 1])
                for k in range(2, n1 + 1)]
        return np.array([dtau, dphi, dpsi] + dlam)
    return f


def rhs_for(spec: SystemSpec):
    K = float(spec.K)
    return full_rhs(spec.n1, K) if spec.mode == "full" else linear_rhs(spec.n1, K)


def rk4_fixed(f, y0, t0: float, t1: float, steps: int, stop_norm: float = BLOWUP_NORM):
    """Classical RK4 on a uniform grid.  Returns ``(times, states, blew_up)``.

    Integration stops early, flagged, once the state norm exceeds ``stop_norm``.
    """
    h = (t1 - t0) / steps
    times = t0 + h * np.arange(steps + 1)
    times[-1] = t1
    ys = np.empty((steps + 1, len(y0)))
    ys[0] = y0
    y = np.array(y0, dtype=float)
    for i in range(steps):
        t = times[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(f"non-finite state at t={times[i + 1]:.6g}")
        ys[i + 1] = y
        if np.linalg.norm(y) > stop_norm:
            return times[: i + 2], ys[: i + 2], True
    return times, ys, False


@dataclass
class Trajectory:
    spec: SystemSpec
    times: np.ndarray
    states: np.ndarray
    h: float
    blowup: bool = False
    error_estimate: float = 0.0
    refinements: list[tuple[float, float]] = field(default_factory=list)  # (h, endpoint change)
    residuals: dict[str, np.ndarray] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.spec.names.index(name)]

    @property
    def tau(self) -> np.ndarray:
        if self.spec.mode == "full":
            return 2.0 * self.states[:, : self.spec.n1].sum(axis=1) / 3.0
        return self.states[:, 0]


def integrate(spec: SystemSpec, init: Sequence[float], t_span: tuple[float, float], tol: float,
              *, initial_steps: int = 16, max_steps: int = 1 << 18) -> Trajectory:
    """RK4 with step doubling: halve ``h`` until the endpoint moves by less than ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    y0 = np.asarray(init, dtype=float)
    if y0.shape != (spec.dim,):
        raise ValueError(f"initial state needs {spec.dim} entries, got {y0.shape}")
    if not np.all(np.isfinite(y0)):
        raise NonFiniteStateError("initial state is not finite")
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    f = rhs_for(spec)
    steps = initial_steps
    coarse = rk4_fixed(f, y0, t0, t1, steps)
    refinements = []
    while True:
        fine = rk4_fixed(f, y0, t0, t1, 2 * steps)
        if coarse[2] or fine[2]:
            times, states, _ = fine
            return Trajectory(spec, times, states, (t1 - t0) / (2 * steps), True,
                              math.inf, refinements)
        change = float(np.max(np.abs(fine[1][-1] - coarse[1][-1])))
        refinements.append(((t1 - t0) / (2 * steps), change))
        if change < tol:
            return Trajectory(spec, fine[0], fine[1], (t1 - t0) / (2 * steps), False,
                              change / 15.0, refinements)
        steps *= 2
        if 2 * steps > max_steps:
            raise SimulationError(f"no convergence to tol={tol} within {max_steps} steps")
        coarse = fine


def convergence_order(spec: SystemSpec, init, t_span, levels: Sequence[int] = (16, 32, 64, 128)) -> float:
    """Least-squares slope of log endpoint change against log h (about 4 for RK4)."""
    f = rhs_for(spec)
    ends = [rk4_fixed(f, np.asarray(init, float), *t_span, n)[1][-1] for n in levels]
    hs, diffs = [], []
    for a, b, n in zip(ends, ends[1:], levels):
        hs.append((t_span[1] - t_span[0]) / n)
        diffs.append(float(np.max(np.abs(b - a))))
    return float(np.polyfit(np.log(hs), np.log(diffs), 1)[0])


# -- closed-form tau = 0 families ------------------------------------------

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class ClosedFormFamily:
    """``tau = 0`` solutions; ``c_i = inf`` (K=0) or ``+-inf`` (K=-1) select the singular branches.

    K = 0:  mu = -1/(t+c), lm = a/(t+c);       c = inf:  mu = 0,  lm = a
    K = -1: mu = -tanh(t+c), lm = a/cosh(t+c); c = +inf: mu = -1, lm = a e^-t;
                                               c = -inf: mu = +1, lm = a e^t
    K = 1:  mu = tan(t+c), lm = a/cos(t+c)
    """
    K: int
    a: tuple
    c: tuple

    def __post_init__(self):
        if self.K not in (0, -1, 1):
            raise ConstraintError("closed forms exist for K in {0, -1, 1}")
        if len(self.a) != len(self.c) or not self.a:
            raise ConstraintError("a and c must be nonempty and of equal length")
        for ci in self.c:
            if math.isinf(ci) and (self.K == 1 or (self.K == 0 and ci < 0)):
                raise ConstraintError(f"c = {ci} is not a branch for K = {self.K}")
        for key, total in self.group_sums().items():
            if abs(total) > GROUP_TOL:
                raise ConstraintError(f"sum of a over the group c = {key} is {total}, not 0")

    @property
    def n1(self) -> int:
        return len(self.a)

    def group_sums(self) -> dict:
        sums: dict = {}
        for ai, ci in zip(self.a, self.c):
            sums[ci] = sums.get(ci, 0) + ai
        return sums


def _check_pole(family: ClosedFormFamily, u: np.ndarray):
    if family.K == 0 and np.any(np.abs(u) < POLE_EPS):
        raise PoleError("t + c_i is at a pole")
    if family.K == 1 and np.any(np.abs(np.cos(u)) < POLE_EPS):
        raise PoleError("cos(t + c_i) is at a pole")


def closed_form(family: ClosedFormFamily, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``(lm, mu)`` at time ``t``."""
    lm, mu, _, _ = _closed_form_jet(family, t)
    return lm, mu


def closed_form_derivative(family: ClosedFormFamily, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Analytic ``(lm', mu')`` at time ``t``."""
    _, _, dlm, dmu = _closed_form_jet(family, t)
    return dlm, dmu


def _closed_form_jet(family: ClosedFormFamily, t: float):
    n = family.n1
    lm, mu, dlm, dmu = (np.zeros(n) for _ in range(4))
    finite = [i for i, c in enumerate(family.c) if not math.isinf(c)]
    u = np.array([t + family.c[i] for i in finite], dtype=float)
    _check_pole(family, u)
    for j, i in enumerate(finite):
        a, x = float(family.a[i]), u[j]
        if family.K == 0:
            mu[i], lm[i] = -1 / x, a / x
            dmu[i], dlm[i] = 1 / x ** 2, -a / x ** 2
        elif family.K == -1:
            th, ch = math.tanh(x), math.cosh(x)
            mu[i], lm[i] = -th, a / ch
            dmu[i], dlm[i] = -1 / ch ** 2, -a * th / ch
        else:
            tn, cs = math.tan(x), math.cos(x)
            mu[i], lm[i] = tn, a / cs
            dmu[i], dlm[i] = 1 / cs ** 2, a * tn / cs
    for i, c in enumerate(family.c):
        if not math.isinf(c):
            continue
        a = float(family.a[i])
        if family.K == 0:
            lm[i] = a
        else:
            s = -1.0 if c > 0 else 1.0
            mu[i], lm[i], dlm[i] = s, a * math.exp(s * t), s * a * math.exp(s * t)
    return lm, mu, dlm, dmu


def family_residual(family: ClosedFormFamily, times: Sequence[float]) -> float:
    """Max over ``times`` of the three ODE residuals with analytic derivatives substituted."""
    K = float(family.K)
    n = family.n1
    worst = 0.0
    for t in times:
        lm, mu, dlm, dmu = _closed_form_jet(family, float(t))
        tau = 2 * lm.sum() / 3
        dtau = 2 * dlm.sum() / 3
        r_lm = dlm - (0.5 * tau + lm) * mu
        r_mu = dmu - (mu * mu - 0.5 * tau * lm + K)
        # lm'' from differentiating the lm equation, with analytic lm', mu', tau'
        d2lm = (0.5 * dtau + dlm) * mu + (0.5 * tau + lm) * dmu
        d2tau = 2 * d2lm.sum() / 3
        r_tau = -d2tau + dtau * mu.sum() + tau * (0.25 * tau * tau - (n + 1) * K + (lm * lm).sum())
        worst = max(worst, float(np.max(np.abs(r_lm))), float(np.max(np.abs(r_mu))), abs(r_tau))
    return worst


def random_family(K: int, n1: int, rng: np.random.Generator, t_window=(0.0, 1.0)) -> ClosedFormFamily:
    """A random constraint-satisfying family that is pole-free on ``t_window``."""
    groups = _random_partition(n1, rng)
    a = [0.0] * n1
    c = [0.0] * n1
    lo, hi = t_window
    for g in groups:
        if K == 0:
            ci = math.inf if rng.random() < 0.2 else float(rng.uniform(0.5, 2.0)) - lo
        elif K == -1:
            r = rng.random()
            ci = math.inf if r < 0.1 else -math.inf if r < 0.2 else float(rng.uniform(-1.0, 1.0))
        else:
            ci = float(rng.uniform(-1.2, 1.2 - (hi - lo))) - lo
        vals = rng.uniform(-1.0, 1.0, len(g))
        vals -= vals.mean()
        for i, v in zip(g, vals):
            a[i], c[i] = float(v), ci
    return ClosedFormFamily(K, tuple(a), tuple(c))


def _random_partition(n: int, rng) -> list[list[int]]:
    idx = list(rng.permutation(n))
    groups, i = [], 0
    while i < n:
        size = int(rng.integers(1, n - i + 1))
        groups.append([int(j) for j in idx[i:i + size]])
        i += size
    return groups


def family_state(family: ClosedFormFamily, t: float) -> np.ndarray:
    lm, mu = closed_form(family, t)
    return np.concatenate((lm, mu))


# -- residuals ----------------------------------------------------------------

@lru_cache(maxsize=32)
def _chain_evaluators(n1: int, K: Fraction, k_max: int):
    chain = pk_chain(n1, k_max, K)
    names = [f"lm{i}" for i in range(1, n1 + 1)] + [f"mu{i}" for i in range(1, n1 + 1)] + ["K"]
    return chain, [compile_evaluator(p, names) for p in chain.polys]


def residuals(traj: Trajectory, k_max: int, *, exact: Optional[bool] = None) -> dict[str, np.ndarray]:
    """``P_0..P_k_max`` at every state, and the tension residual by central differences.

    The tension residual is ``nan`` at the two endpoints.  ``exact`` (default:
    only for constant trajectories) evaluates in rational arithmetic.
    """
    spec = traj.spec
    if spec.mode != "full":
        raise PreconditionError("residuals need a full-mode trajectory")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if exact is None:
        exact = bool(np.all(traj.states == traj.states[0])) and len(traj.times) <= 4096
    chain, evals = _chain_evaluators(spec.n1, spec.K, k_max)
    n1 = spec.n1
    out: dict[str, np.ndarray] = {}
    if exact:
        names = [f"lm{i}" for i in range(1, n1 + 1)] + [f"mu{i}" for i in range(1, n1 + 1)]
        cache: dict = {}
        for k, p in enumerate(chain.polys):
            col = []
            for row in traj.states:
                key = (k, row.tobytes())
                if key not in cache:
                    v = dict(zip(names, map(Fraction, row)), K=spec.K)
                    cache[key] = float(evaluate(p, v))
                col.append(cache[key])
            out[f"P{k}"] = np.array(col)
    else:
        X = np.hstack((traj.states, np.full((len(traj.times), 1), float(spec.K))))
        for k, f in enumerate(evals):
            out[f"P{k}"] = f(X)
    out["odetau"] = _tension_fd(traj, exact)
    traj.residuals.update(out)
    return out


def _tension_fd(traj: Trajectory, exact: bool) -> np.ndarray:
    spec = traj.spec
    n1, h = spec.n1, traj.h
    res = np.full(len(traj.times), np.nan)
    if len(traj.times) < 3:
        return res
    if exact:
        K = spec.K
        rows = [[Fraction(x) for x in row] for row in traj.states]
        tau = [2 * sum(r[:n1]) / 3 for r in rows]
        hh = Fraction(h)
        for i in range(1, len(rows) - 1):
            d1 = (tau[i + 1] - tau[i - 1]) / (2 * hh)
            d2 = (tau[i + 1] - 2 * tau[i] + tau[i - 1]) / hh ** 2
            lm, mu = rows[i][:n1], rows[i][n1:]
            val = -d2 + d1 * sum(mu) + tau[i] * (tau[i] ** 2 / 4 - (n1 + 1) * K + sum(x * x for x in lm))
            res[i] = float(val)
        return res
    tau = traj.tau
    lm, mu = traj.states[:, :n1], traj.states[:, n1:]
    d1 = (tau[2:] - tau[:-2]) / (2 * h)
    d2 = (tau[2:] - 2 * tau[1:-1] + tau[:-2]) / h ** 2
    body = tau[1:-1] * (0.25 * tau[1:-1] ** 2 - (n1 + 1) * float(spec.K) + (lm[1:-1] ** 2).sum(axis=1))
    res[1:-1] = -d2 + d1 * mu[1:-1].sum(axis=1) + body
    return res


# -- r-theta reconstruction ----------------------------------------------------

@dataclass
class RThetaResult:
    theta: np.ndarray          # (points, n1)
    r: np.ndarray
    max_error: float
    pole_windows: list[tuple[int, float, float]]   # (index, t_start, t_end)


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    dt = np.diff(t)
    inc = 0.5 * (y[1:] + y[:-1]) * (dt[:, None] if y.ndim == 2 else dt)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(inc, axis=0)
    return out


def r_theta_reconstruct(traj: Trajectory, pole_eps: float = 1e-6) -> RThetaResult:
    """``theta_i = theta_i(t0) + (1/2) int tau``, ``r_i = -1/(int cos theta_i + C_i)``."""
    spec = traj.spec
    if spec.mode != "full" or spec.K != 0:
        raise PreconditionError("r-theta reconstruction needs a full-mode K = 0 trajectory")
    n1 = spec.n1
    lm0, mu0 = traj.states[0, :n1], traj.states[0, n1:]
    if np.any(np.hypot(lm0, mu0) == 0):
        raise PreconditionError("(lm_i, mu_i) must be nonzero at the initial time")
    t = traj.times
    theta0 = np.arctan2(lm0, mu0)
    r0 = np.hypot(lm0, mu0)
    half_int_tau = 0.5 * _cumtrapz(traj.tau, t)
    theta = theta0[None, :] + half_int_tau[:, None]
    denom = _cumtrapz(np.cos(theta), t) - 1.0 / r0[None, :]
    windows = []
    for i in range(n1):
        bad = np.abs(denom[:, i]) < pole_eps
        if bad.any():
            idx = np.flatnonzero(bad)
            windows.append((i, float(t[idx[0]]), float(t[idx[-1]])))
    with np.errstate(divide="ignore"):
        r = -1.0 / denom
    err = np.abs(np.hstack((r * np.sin(theta), r * np.cos(theta))) - traj.states)
    ok = np.all(np.isfinite(err), axis=1)
    return RThetaResult(theta, r, float(err[ok].max()) if ok.any() else math.inf, windows)


# -- constant solutions ------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticSurd:
    """``a + b*sqrt(d)`` with rational ``a, b`` and a fixed rational radicand ``d >= 0``."""
    a: Fraction
    b: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    @classmethod
    def sqrt(cls, d) -> "QuadraticSurd":
        d = Fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        num, den = math.isqrt(d.numerator), math.isqrt(d.denominator)
        if num * num == d.numerator and den * den == d.denominator:
            return cls(Fraction(num, den))
        return cls(Fraction(0), Fraction(1), d)

    def _lift(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if other.b and self.b and other.d != self.d:
                raise ValueError("surds with different radicands")
            return other
        return QuadraticSurd(Fraction(other), Fraction(0), self.d)

    def _radicand(self, other: "QuadraticSurd") -> Fraction:
        return self.d if self.b else other.d

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticSurd(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        d = self._radicand(o)
        return QuadraticSurd(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = QuadraticSurd(Fraction(1), Fraction(0), self.d)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and (self.b == 0 or self.d == 0)

    def __eq__(self, other):
        if not isinstance(other, QuadraticSurd):
            other = self._lift(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __str__(self):
        if not self.b or not self.d:
            return str(self.a)
        root = f"sqrt({self.d})" if self.b == 1 else f"{self.b}*sqrt({self.d})"
        if self.b == -1:
            root = f"-sqrt({self.d})"
        return root if not self.a else f"{self.a} + {root}"


@dataclass(frozen=True)
class ConstantState:
    lm: tuple
    mu: tuple
    tau: QuadraticSurd

    def floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.lm + self.mu])


def constant_conditions_hold(n1: int, K, lm: Sequence, mu: Sequence) -> bool:
    """All conditions for a constant solution with ``tau != 0``, evaluated exactly."""
    K = Fraction(K)
    tau = 2 * sum(lm, QuadraticSurd(Fraction(0))) * Fraction(1, 3)
    for l, m in zip(lm, mu):
        if not ((tau * Fraction(1, 2) + l) * m).is_zero():
            return False
        if not (m * m - tau * Fraction(1, 2) * l + K).is_zero():
            return False
    third = tau * tau * Fraction(1, 4) - (n1 + 1) * K + sum((l * l for l in lm), QuadraticSurd(Fraction(0)))
    return third.is_zero() and not tau.is_zero()


def constant_solutions(n1: int, K) -> list[ConstantState]:
    """Constant solutions with ``tau != 0``.

    ``mu_i = -tau/2`` is excluded by the second condition (it forces
    ``mu_i^2 + tau^2/4 + K = 0``) unless ``mu_i = 0``; then ``lm_i = 2K/tau``
    is the same for all ``i``, so ``lm^2 = 3K/n1``.  Both signs are tested
    against every condition exactly.
    """
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    K = Fraction(K)
    if K <= 0:
        return []
    root = QuadraticSurd.sqrt(3 * K / n1)
    out = []
    zero = QuadraticSurd(Fraction(0), Fraction(0), root.d)
    for sign in (1, -1):
        lam = root * sign
        lm, mu = (lam,) * n1, (zero,) * n1
        if constant_conditions_hold(n1, K, lm, mu):
            out.append(ConstantState(lm, mu, lam * Fraction(2 * n1, 3)))
    return out


@dataclass(frozen=True)
class MinimalConstantSet:
    """Constant solutions with ``tau = 0``: ``mu_i`` from ``mu_i^2 = -K``, ``lm_i mu_i = 0``, ``sum lm_i = 0``."""
    K: Fraction
    mu_values: tuple
    lm_free: bool      # lm ranges over the hyperplane sum lm_i = 0; otherwise lm = 0

    @property
    def empty(self) -> bool:
        return not self.mu_values


def minimal_constant_solutions(n1: int, K) -> MinimalConstantSet:
    K = Fraction(K)
    if K > 0:
        return MinimalConstantSet(K, (), False)
    if K == 0:
        return MinimalConstantSet(K, (QuadraticSurd(Fraction(0)),), n1 > 1)
    r = QuadraticSurd.sqrt(-K)
    return MinimalConstantSet(K, (r, -r), False)


# -- I/O ------------------------------------------------------------------------

def init_schema() -> dict:
    text = (resources.files("bihv") / "schemas" / "init.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_init(path: Union[str, Path]) -> dict:
    """Read and validate an initial-condition document."""
    import jsonschema

    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    jsonschema.validate(doc, init_schema())
    return doc


def parse_rational(value) -> Fraction:
    return Fraction(str(value)) if not isinstance(value, float) else Fraction(value)


def csv_columns(traj: Trajectory) -> list[str]:
    cols = ["t"] + traj.spec.names + (["tau"] if traj.spec.mode == "full" else [])
    return cols + sorted(k for k in traj.residuals if k.startswith("P")) + \
        (["odetau"] if "odetau" in traj.residuals else [])


def write_csv(traj: Trajectory, path: Union[str, Path]) -> list[str]:
    cols = csv_columns(traj)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for i, t in enumerate(traj.times):
            row = [t] + list(traj.states[i])
            if traj.spec.mode == "full":
                row.append(traj.tau[i])
            row += [traj.residuals[c][i] for c in cols[len(row):]]
            w.writerow([repr(float(x)) for x in row])
    return cols
