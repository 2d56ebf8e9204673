"""Numerical stringy integrals and their extrapolation to the tropical limit.

With ``t = log x`` the stringy integral becomes
``int_{R^n} exp(eps * f(t)) dt`` with ``f(t) = <u,t> - sum_j v_j log q_j(e^t)``.
For positive coefficients f is concave, so the region where the integrand
is within ``e^{-drop}`` of its maximum is a convex body around the unique
real critical point. That body is found by root bracketing and integrated
with QUADPACK (nested for n = 2). For n = 3 the integral is estimated by
importance sampling with a Laplace proposal whose tails are heavier than
the integrand's, so the weights stay bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.special import logsumexp

from .dual_volume import dual_cone_volume
from .errors import DivergentTable, InputError, NoConvergence, NotInterior, NotPointed
from .exact import det_int, rank_rat
from .laurent import LaurentPoly
from .polytope import contains_interior, newton_polytope, weighted_minkowski
from .triangulate import Configuration, positive_functional, random_regular_triangulation

DROP = 40.0
DEFAULT_SCHEDULE = (0.1, 0.05, 0.025)
MC_SAMPLES = 1 << 18


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float
    evaluations: int
    method: str


@dataclass(frozen=True)
class QuadratureReport:
    epsilon_schedule: tuple[float, ...]
    values: tuple[float, ...]
    extrapolated: float
    error_estimate: float
    evaluations: int
    errors: tuple[float, ...] = field(default=())
    method: str = "quadpack"

    def to_json(self) -> dict:
        return {
            "epsilon_schedule": list(self.epsilon_schedule),
            "values": list(self.values),
            "value_errors": list(self.errors),
            "extrapolated": self.extrapolated,
            "error_estimate": self.error_estimate,
            "evaluations": self.evaluations,
            "method": self.method,
        }


class _Exponent:
    """A concave function on ``R^n`` with gradient and Hessian; counts evaluations."""

    n: int
    calls: int = 0

    def __call__(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hess(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class _StringyExponent(_Exponent):
    def __init__(self, qs: Sequence[LaurentPoly], v: Sequence[float], u: Sequence[float], eps: float):
        self.n = qs[0].dim
        self.eps = float(eps)
        self.u = np.array([float(x) for x in u])
        self.v = [float(x) for x in v]
        self.blocks = []
        for q in qs:
            coefs = np.array([float(c) for c in q.coefficients()])
            if np.any(coefs <= 0):
                raise InputError("stringy integrals need positive coefficients")
            self.blocks.append((np.array(q.exponents(), dtype=float), np.log(coefs)))
        self.calls = 0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        self.calls += t.size // self.n
        with np.errstate(over="ignore"):
            out = t @ self.u
            for vj, (a, logc) in zip(self.v, self.blocks):
                out = out - vj * logsumexp(logc + t @ a.T, axis=-1)
        return self.eps * out

    def _weights(self, t):
        for vj, (a, logc) in zip(self.v, self.blocks):
            z = logc + a @ t
            w = np.exp(z - logsumexp(z))
            yield vj, a, w

    def grad(self, t):
        g = self.u.copy()
        for vj, a, w in self._weights(t):
            g -= vj * (w @ a)
        return self.eps * g

    def hess(self, t):
        h = np.zeros((self.n, self.n))
        for vj, a, w in self._weights(t):
            mean = w @ a
            h -= vj * ((a.T * w) @ a - np.outer(mean, mean))
        return self.eps * h

    def section(self, s: float | None) -> "_LogSumExpSection":
        """Restriction to the last coordinate, with the first one fixed at s when n = 2."""
        lin0 = self.eps * float(self.u[0]) * s if s is not None else 0.0
        groups = []
        for vj, (a, logc) in zip(self.v, self.blocks):
            base = logc + (a[:, 0] * s if s is not None else 0.0)
            groups.append((self.eps * vj, list(zip(base.tolist(), a[:, -1].tolist()))))
        return _LogSumExpSection(lin0, self.eps * float(self.u[-1]), groups, self)


class _ExponentialExponent(_Exponent):
    """``alpha <X, t> - sum_a c_a exp(<a, t>)`` over the non-constant terms of p."""

    def __init__(self, terms: Sequence[tuple[Sequence[int], float]], x: Sequence[float], alpha: float):
        self.n = len(x)
        self.ax = float(alpha) * np.array([float(c) for c in x])
        self.a = np.array([e for e, _ in terms], dtype=float)
        self.c = np.array([float(c) for _, c in terms])
        self.calls = 0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        self.calls += t.size // self.n
        with np.errstate(over="ignore"):
            return t @ self.ax - np.exp(t @ self.a.T) @ self.c

    def grad(self, t):
        return self.ax - (self.c * np.exp(self.a @ t)) @ self.a

    def hess(self, t):
        w = self.c * np.exp(self.a @ t)
        return -(self.a.T * w) @ self.a

    def section(self, s: float | None) -> "_ExpSumSection":
        lin0 = float(self.ax[0]) * s if s is not None else 0.0
        base = np.log(self.c) + (self.a[:, 0] * s if s is not None else 0.0)
        return _ExpSumSection(lin0, float(self.ax[-1]), list(zip(base.tolist(), self.a[:, -1].tolist())), self)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 700.0 else math.inf


class _LogSumExpSection:
    """``lin0 + lin1 y - sum_j w_j log sum_k exp(base_k + slope_k y)`` in plain floats."""

    def __init__(self, lin0, lin1, groups, owner):
        self.lin0, self.lin1, self.groups, self.owner = lin0, lin1, groups, owner

    def value(self, y: float) -> float:
        self.owner.calls += 1
        out = self.lin0 + self.lin1 * y
        for w, terms in self.groups:
            z = [b + k * y for b, k in terms]
            m = max(z)
            out -= w * (m + math.log(math.fsum(math.exp(x - m) for x in z)))
        return out

    def slope(self, y: float) -> float:
        out = self.lin1
        for w, terms in self.groups:
            z = [b + k * y for b, k in terms]
            m = max(z)
            e = [math.exp(x - m) for x in z]
            out -= w * sum(ei * k for ei, (_, k) in zip(e, terms)) / sum(e)
        return out


class _ExpSumSection:
    """``lin0 + lin1 y - sum_k exp(base_k + slope_k y)`` in plain floats."""

    def __init__(self, lin0, lin1, terms, owner):
        self.lin0, self.lin1, self.terms, self.owner = lin0, lin1, terms, owner

    def value(self, y: float) -> float:
        self.owner.calls += 1
        return self.lin0 + self.lin1 * y - sum(_safe_exp(b + k * y) for b, k in self.terms)

    def slope(self, y: float) -> float:
        out = self.lin1 - sum(k * _safe_exp(b + k * y) for b, k in self.terms if k)
        return max(min(out, 1e300), -1e300)


def _maximize(g: _Exponent, start: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    x0 = np.zeros(g.n) if start is None else start
    res = optimize.minimize(
        lambda t: -float(g(t)),
        x0,
        jac=lambda t: -g.grad(t),
        hess=lambda t: -g.hess(t),
        method="trust-exact",
        options={"gtol": 1e-12, "maxiter": 500},
    )
    if not np.all(np.isfinite(res.x)) or np.linalg.norm(g.grad(res.x)) > 1e-6 * (1 + np.abs(res.fun)):
        raise NoConvergence("could not locate the maximum of the integrand")
    return res.x, float(g(res.x))


def _level_crossing(fun: Callable[[float], float], x0: float, level: float, direction: int, budget: int = 80) -> float:
    """The point beyond x0 in the given direction where the concave ``fun`` falls to ``level``."""
    floor = level - 1e6

    def gap(s: float) -> float:
        val = fun(s)
        return (val if val > floor else floor) - level

    step = 1.0
    inner = x0
    for _ in range(budget):
        outer = x0 + direction * step
        if gap(outer) < 0:
            return optimize.brentq(gap, min(inner, outer), max(inner, outer), xtol=1e-9)
        inner = outer
        step *= 2
    raise NoConvergence("truncation radius search exceeded its budget (integrand does not decay)")


def _section_max(sec, y0: float, budget: int = 80) -> tuple[float, float]:
    """Maximum of a concave section, as the root of its decreasing derivative."""
    d0 = sec.slope(y0)
    if d0 == 0:
        return y0, sec.value(y0)
    direction = 1 if d0 > 0 else -1
    step = 1.0
    inner = y0
    for _ in range(budget):
        outer = y0 + direction * step
        if direction * sec.slope(outer) <= 0:
            y = optimize.brentq(sec.slope, min(inner, outer), max(inner, outer), xtol=1e-12)
            return y, sec.value(y)
        inner = outer
        step *= 2
    raise NoConvergence("integrand section has no maximum (parameters outside the convergence domain)")


def _quad(fun, a, b, center, epsrel):
    pts = [center] if a < center < b else None
    val, err = integrate.quad(fun, a, b, points=pts, epsabs=0.0, epsrel=epsrel, limit=400)
    return val, err


def _integrate_concave(g: _Exponent, drop: float = DROP, epsrel: float = 1e-10) -> tuple[float, float, float]:
    """``int exp(g - g_max)`` over the ``drop`` level set; returns (value, error, g_max)."""
    t_star, g_star = _maximize(g)
    level = g_star - drop
    if g.n == 1:
        sec = g.section(None)
        lo = _level_crossing(sec.value, t_star[0], level, -1)
        hi = _level_crossing(sec.value, t_star[0], level, +1)
        val, err = _quad(lambda y: math.exp(sec.value(y) - g_star), lo, hi, t_star[0], epsrel)
        return val, err, g_star
    if g.n != 2:
        raise InputError("deterministic quadrature is implemented for n <= 2")

    def profile(s: float) -> float:
        return _section_max(g.section(s), t_star[1])[1]

    lo = _level_crossing(profile, t_star[0], level, -1)
    hi = _level_crossing(profile, t_star[0], level, +1)
    inner_err = [0.0]

    def inner(s: float) -> float:
        sec = g.section(s)
        y_star, m = _section_max(sec, t_star[1])
        if m <= level:
            return 0.0
        a = _level_crossing(sec.value, y_star, level, -1)
        b = _level_crossing(sec.value, y_star, level, +1)
        val, err = _quad(lambda y: math.exp(sec.value(y) - g_star), a, b, y_star, epsrel)
        inner_err[0] = max(inner_err[0], err)
        return val

    val, err = _quad(inner, lo, hi, t_star[0], epsrel * 10)
    return val, err + (hi - lo) * inner_err[0], g_star


def _monte_carlo(g: _StringyExponent, radius: float, samples: int, seed) -> tuple[float, float, float]:
    """Importance sampling with an independent Laplace proposal centred at the maximum."""
    t_star, g_star = _maximize(g)
    scale = 2.0 / (g.eps * radius)
    rng = np.random.default_rng(seed)
    chunks, total = [], 0
    while total < samples:
        m = min(1 << 15, samples - total)
        z = rng.laplace(0.0, scale, (m, g.n))
        log_q = -np.abs(z).sum(axis=1) / scale - g.n * math.log(2 * scale)
        chunks.append(np.exp(g(t_star + z) - g_star - log_q))
        total += m
    w = np.concatenate(chunks)
    mean = math.fsum(w) / len(w)
    stderr = float(np.std(w, ddof=1)) / math.sqrt(len(w))
    return mean, stderr, g_star


def _inscribed_cube_radius(qs, v, u) -> float:
    """Largest r with ``u + [-r, r]^n`` inside P; controls the integrand's slowest decay."""
    poly = weighted_minkowski([(newton_polytope(q), Fraction(w)) for q, w in zip(qs, v)])
    uu = [Fraction(x) for x in u]
    return float(
        min((sum(a * x for a, x in zip(nrm, uu)) - b) / sum(abs(a) for a in nrm) for nrm, b in poly.facets)
    )


def _check_interior(qs, v, u):
    poly = weighted_minkowski([(newton_polytope(q), Fraction(w)) for q, w in zip(qs, v)])
    if not poly.is_full_dimensional or not contains_interior(poly, [Fraction(x) for x in u]):
        raise NotInterior("u must lie in the interior of the weighted Newton polytope for convergence")


def eval_stringy_detailed(
    qs: Sequence[LaurentPoly],
    v: Sequence,
    u: Sequence,
    eps: float,
    drop: float = DROP,
    samples: int = MC_SAMPLES,
    seed=0,
) -> Estimate:
    eps = float(eps)
    if eps <= 0:
        raise InputError("epsilon must be positive")
    _check_interior(qs, v, u)
    g = _StringyExponent(qs, v, u, eps)
    n = g.n
    if n <= 2:
        val, err, g_star = _integrate_concave(g, drop)
        method = "quadpack"
    elif n == 3:
        val, err, g_star = _monte_carlo(g, _inscribed_cube_radius(qs, v, u), samples, seed)
        method = "monte_carlo"
    else:
        raise InputError("stringy quadrature supports n <= 3")
    factor = eps**n * math.exp(g_star)
    return Estimate(val * factor, err * factor, g.calls, method)


def eval_stringy(qs: Sequence[LaurentPoly], v: Sequence, u: Sequence, eps: float, **kw) -> float:
    """``eps^n`` times the stringy integral at fixed epsilon."""
    return eval_stringy_detailed(qs, v, u, eps, **kw).value


def neville_to_zero(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Polynomial extrapolation to 0 through all points, with the last-correction error estimate."""
    if len(xs) < 2:
        raise InputError("need at least two points to extrapolate")
    table = [float(y) for y in ys]
    prev = table[-1]
    for level in range(1, len(xs)):
        prev = table[-1]
        table = [
            (xs[i + level] * table[i] - xs[i] * table[i + 1]) / (xs[i + level] - xs[i])
            for i in range(len(table) - 1)
        ]
    best = table[0]
    return best, abs(best - prev)


def _check_schedule(schedule: Sequence[float]) -> tuple[float, ...]:
    schedule = tuple(float(e) for e in schedule)
    if len(schedule) < 3:
        raise InputError("the epsilon schedule needs at least three entries")
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or schedule[-1] <= 0:
        raise InputError("the epsilon schedule must be positive and strictly decreasing")
    return schedule


def _report(schedule, estimates: Sequence[Estimate], divergence_tol: float) -> QuadratureReport:
    values = [e.value for e in estimates]
    if not all(math.isfinite(x) for x in values):
        raise NoConvergence("non-finite quadrature value")
    best, err = neville_to_zero(schedule, values)
    if err > divergence_tol * abs(best):
        raise DivergentTable(
            f"extrapolation table does not settle: estimate {best:.6g} with correction {err:.3g}"
        )
    return QuadratureReport(
        epsilon_schedule=schedule,
        values=tuple(values),
        extrapolated=best,
        error_estimate=err,
        evaluations=sum(e.evaluations for e in estimates),
        errors=tuple(e.error for e in estimates),
        method=estimates[0].method,
    )


def extrapolate_amplitude(
    qs: Sequence[LaurentPoly],
    v: Sequence,
    u: Sequence,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    divergence_tol: float = 0.1,
    **kw,
) -> QuadratureReport:
    """Richardson extrapolation of ``eps^n I(eps)`` to ``eps = 0``."""
    schedule = _check_schedule(schedule)
    estimates = [eval_stringy_detailed(qs, v, u, e, **kw) for e in schedule]
    return _report(schedule, estimates, divergence_tol)


def _cone_interior(gens: Sequence[Sequence[int]], x: Sequence) -> bool:
    """Whether x is in the interior of the pointed, full-dimensional cone spanned by gens."""
    n = len(x)
    if rank_rat(gens) < n:
        return False
    xs = [Fraction(c) for c in x]
    for subset in combinations(range(len(gens)), n - 1):
        rows = [gens[i] for i in subset]
        normal = [(-1) ** k * det_int([r[:k] + r[k + 1:] for r in rows]) for k in range(n)]
        if not any(normal):
            continue
        sides = [sum(a * b for a, b in zip(normal, g)) for g in gens]
        if all(s >= 0 for s in sides) or all(s <= 0 for s in sides):
            sign = 1 if all(s >= 0 for s in sides) else -1
            if sign * sum(a * b for a, b in zip(normal, xs)) <= 0:
                return False
    return True


def _split_constant(p: LaurentPoly):
    const = p.constant_term()
    terms = [(e, c) for e, c in p.terms.items() if any(e)]
    if not terms:
        raise InputError("p has no non-constant terms")
    if any(c <= 0 for _, c in terms):
        raise InputError("exponential integrals need positive coefficients")
    return const, terms


def eval_exponential_detailed(p: LaurentPoly, x: Sequence, alpha: float, drop: float = DROP) -> Estimate:
    const, terms = _split_constant(p)
    gens = [tuple(e) for e, _ in terms]
    if positive_functional(gens) is None:
        raise NotPointed("exponents of p do not span a pointed full-dimensional cone")
    if not _cone_interior(gens, x):
        raise NotInterior("X must lie in the interior of the exponent cone")
    if p.dim > 2:
        raise InputError("exponential quadrature supports n <= 2")
    g = _ExponentialExponent(terms, x, alpha)
    val, err, g_star = _integrate_concave(g, drop)
    factor = float(alpha) ** p.dim * math.exp(g_star - float(const))
    return Estimate(val * factor, err * factor, g.calls, "quadpack")


def eval_exponential(p: LaurentPoly, x: Sequence, alpha: float, **kw) -> float:
    """``alpha^n int exp(-p(x)) x^{alpha X} omega_0`` over the positive orthant."""
    return eval_exponential_detailed(p, x, alpha, **kw).value


def exponential_limit(p: LaurentPoly, x: Sequence, seed=0) -> tuple[float, Fraction]:
    """The alpha -> 0 limit as ``(exp(-constant term), dual cone volume)``."""
    const, terms = _split_constant(p)
    config = Configuration([tuple(e) for e, _ in terms])
    if not _cone_interior(config.points, x):
        raise NotInterior("X must lie in the interior of the exponent cone")
    t = random_regular_triangulation(config, seed)
    return math.exp(-float(const)), dual_cone_volume(config, x, t)


def extrapolate_exponential(
    p: LaurentPoly,
    x: Sequence,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    divergence_tol: float = 0.1,
) -> QuadratureReport:
    schedule = _check_schedule(schedule)
    estimates = [eval_exponential_detailed(p, x, a) for a in schedule]
    return _report(schedule, estimates, divergence_tol)


def vanishing_limit_integral(alpha: float, z: Sequence[float] = (1.0,)) -> float:
    """``alpha^n int_{(0,1)^n} exp(-1/(xi_1...xi_n)) xi^{alpha Z} dxi/xi``; tends to 0 with alpha."""
    n = len(z)

    def integrand(*xi):
        prod = math.prod(xi)
        return math.exp(-1.0 / prod) * math.prod(x ** (alpha * zi - 1.0) for x, zi in zip(xi, z))

    val, _ = integrate.nquad(integrand, [(0.0, 1.0)] * n, opts={"limit": 200})
    return alpha**n * val
