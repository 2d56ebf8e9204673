"""Truncated Gamma-series solutions of the GKZ system and the intersection identity.

For a simplex sigma of a unimodular regular triangulation the series
``phi_v(z) = sum_{w in L_A} z^{w+v} / prod_i Gamma(1 + w_i + v_i)`` with
``A v = -delta`` and ``v`` vanishing off sigma only has nonzero terms when
``w`` is nonnegative off sigma. Those lattice points are parametrized by
their entries off sigma, which is how they are enumerated here.

Pairing the series for ``delta`` and ``-delta`` over the simplices of T
with sine factors reproduces the exact amplitude for z in the convergence
domain ``U_T``; the identity is checked numerically, not assumed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from scipy.special import rgamma

from .cayley import CayleyConfig, assemble_delta, build_cayley
from .dual_volume import amplitude_triangulation
from .errors import IntegralParameter, NonUnimodular, NotInDomain
from .exact import RatVector, det_int, format_rational, solve_exact, transpose
from .laurent import LaurentPoly
from .triangulate import Configuration, Triangulation

DEFAULT_R = Fraction(1, 4)


def _columns(config) -> tuple[tuple[int, ...], ...]:
    if isinstance(config, CayleyConfig):
        return config.columns
    if isinstance(config, Configuration):
        return config.points
    return transpose(config)


def _require_unimodular(cols, sigma):
    d = det_int(transpose([cols[i] for i in sigma]))
    if abs(d) != 1:
        raise NonUnimodular(f"simplex {[i + 1 for i in sigma]} has |det| = {abs(d)}; only unimodular simplices are supported")


def base_exponent(config, sigma: Sequence[int], delta: Sequence, k: Sequence[int] | None = None) -> RatVector:
    """The unique v with ``A v = -delta`` and ``v_j = k_j`` off sigma (k = 0 by default)."""
    cols = _columns(config)
    sigma = tuple(sigma)
    rest = [j for j in range(len(cols)) if j not in sigma]
    k = [0] * len(rest) if k is None else list(k)
    rhs = [-Fraction(x) for x in delta]
    for kj, j in zip(k, rest):
        rhs = [r - kj * a for r, a in zip(rhs, cols[j])]
    v_sigma = solve_exact(transpose([cols[i] for i in sigma]), rhs)
    v = [Fraction(0)] * len(cols)
    for i, x in zip(sigma, v_sigma):
        v[i] = x
    for j, kj in zip(rest, k):
        v[j] = Fraction(kj)
    return tuple(v)


@dataclass(frozen=True)
class GammaSeries:
    columns: tuple[tuple[int, ...], ...]
    sigma: tuple[int, ...]
    base: RatVector
    truncation_order: int
    lattice_points: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> tuple[int, ...]:
        return tuple(0 for j in range(len(self.columns)) if j not in self.sigma)


def _lattice_points(cols, sigma, order: int) -> list[tuple[int, ...]]:
    """Kernel vectors w, nonnegative off sigma, with ``|w|_1 <= order``."""
    n_cols = len(cols)
    rest = [j for j in range(n_cols) if j not in sigma]
    a_sigma_t = transpose([cols[i] for i in sigma])
    points = []
    for w_rest in product(range(order + 1), repeat=len(rest)):
        if sum(w_rest) > order:
            continue
        rhs = [0] * len(sigma)
        for wj, j in zip(w_rest, rest):
            rhs = [r - wj * a for r, a in zip(rhs, cols[j])]
        w_sigma = solve_exact(a_sigma_t, rhs)
        w = [0] * n_cols
        for i, x in zip(sigma, w_sigma):
            w[i] = int(x)
        for j, x in zip(rest, w_rest):
            w[j] = x
        if sum(abs(x) for x in w) <= order:
            points.append(tuple(w))
    return sorted(points, key=lambda w: (sum(abs(x) for x in w), w))


def make_series(config, sigma: Sequence[int], delta: Sequence, order: int) -> GammaSeries:
    cols = _columns(config)
    sigma = tuple(sorted(sigma))
    _require_unimodular(cols, sigma)
    base = base_exponent(config, sigma, delta)
    if any(base[i].denominator == 1 for i in sigma):
        raise IntegralParameter(
            f"A_sigma^-1 delta has an integral entry on simplex {[i + 1 for i in sigma]}; parameters not very generic"
        )
    return GammaSeries(cols, sigma, base, int(order), tuple(_lattice_points(cols, sigma, int(order))))


def _power(z: complex, e: float) -> complex:
    """Principal branch ``z^e``."""
    return cmath.exp(e * cmath.log(z))


def phi_eval(series: GammaSeries, z: Sequence[complex]) -> complex:
    """Truncated ``phi_v(z)``, summed from the smallest lattice points outward."""
    z = [complex(x) for x in z]
    terms = []
    for w in series.lattice_points:
        expo = [wi + float(vi) for wi, vi in zip(w, series.base)]
        value = complex(1.0)
        for zi, ei in zip(z, expo):
            if ei:
                value *= _power(zi, ei)
            value *= complex(rgamma(1.0 + ei))
        terms.append(value)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def in_U_T(config, t: Triangulation | Sequence[Sequence[int]], z: Sequence[complex], r=DEFAULT_R) -> bool:
    """``|z_sigma^{-A_sigma^{-1} a_j} z_j| < R`` for every sigma in T and j off sigma."""
    cols = _columns(config)
    simplices = t.simplices if isinstance(t, Triangulation) else [tuple(s) for s in t]
    log_abs = [math.log(abs(complex(x))) for x in z]
    bound = math.log(float(r))
    for sigma in simplices:
        a_sigma_t = transpose([cols[i] for i in sigma])
        for j in range(len(cols)):
            if j in sigma:
                continue
            c = solve_exact(a_sigma_t, cols[j])
            if log_abs[j] - sum(float(ci) * log_abs[i] for ci, i in zip(c, sigma)) >= bound:
                return False
    return True


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Fraction
    rhs: complex
    rel_err: float

    def to_json(self) -> dict:
        return {
            "lhs": format_rational(self.lhs),
            "lhs_float": float(self.lhs),
            "rhs_re": self.rhs.real,
            "rhs_im": self.rhs.imag,
            "rel_err": self.rel_err,
        }


def ghm_identity_check(
    qs: Sequence[LaurentPoly],
    v: Sequence,
    u: Sequence,
    z: Sequence[complex],
    t: Triangulation,
    order: int,
    r=DEFAULT_R,
) -> IdentityCheck:
    """Compare the exact amplitude with the paired Gamma-series sum over a unimodular T."""
    cfg = build_cayley(qs)
    delta = assemble_delta(v, u)
    cols = cfg.columns
    for sigma in t.simplices:
        _require_unimodular(cols, sigma)
    if not in_U_T(cfg, t, z, r):
        raise NotInDomain(f"z is not in U_T for R = {r}")
    lhs = amplitude_triangulation(cfg, delta, t).value
    minus = [-x for x in delta.combined]
    total = 0j
    for sigma in t.simplices:
        plus_series = make_series(cfg, sigma, delta.combined, order)
        minus_series = make_series(cfg, sigma, minus, order)
        sines = 1.0
        for i in sigma:
            p = -float(plus_series.base[i])
            sines *= math.pi / math.sin(math.pi * p)
        total += sines * phi_eval(plus_series, z) * phi_eval(minus_series, z)
    weight = math.prod(float(x) for x in delta.v)
    rhs = weight * total
    return IdentityCheck(lhs, rhs, abs(rhs - float(lhs)) / abs(float(lhs)))


def omega_degree(
    config, lift: Sequence, sigma: Sequence[int], delta: Sequence, k: Sequence[int], k_prime: Sequence[int]
) -> Fraction:
    """``<omega, v_sigma^k(delta) + v_sigma^k'(-delta)>``, exactly."""
    plus = base_exponent(config, sigma, delta, k)
    minus = base_exponent(config, sigma, [-Fraction(x) for x in delta], k_prime)
    return sum((Fraction(w) * (a + b) for w, a, b in zip(lift, plus, minus)), Fraction(0))
