"""Sparse Laurent polynomials in ``n`` variables."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimMismatch, EmptyPolynomial

Exponent = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """``sum c_a x^a`` stored as a map from exponent tuples to coefficients.

    Zero coefficients are dropped at construction. Coefficients are usually
    Fractions; numeric (float/complex) coefficients are allowed for
    internal work.
    """

    dim: int
    terms: Mapping[Exponent, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for exp, coef in dict(self.terms).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.dim:
                raise DimMismatch(f"exponent {exp} in a {self.dim}-variate polynomial")
            if coef != 0:
                clean[exp] = clean.get(exp, 0) + coef
        object.__setattr__(self, "terms", {e: c for e, c in sorted(clean.items()) if c != 0})

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1) -> "LaurentPoly":
        return cls(len(exp), {tuple(exp): coef})

    @classmethod
    def constant(cls, dim: int, value) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: value})

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"{c}*x^{list(e)}" for e, c in self.terms.items()) or "0"
        return f"LaurentPoly({self.dim}: {body})"

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other: "LaurentPoly"):
        if other.dim != self.dim:
            raise DimMismatch(f"{self.dim}-variate vs {other.dim}-variate polynomial")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dim, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.dim, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.dim, out)

    __rmul__ = __mul__

    def theta(self, i: int) -> "LaurentPoly":
        """Euler derivative ``x_i d/dx_i``."""
        return LaurentPoly(self.dim, {e: c * e[i] for e, c in self.terms.items()})

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exp``."""
        return LaurentPoly(self.dim, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def substitute_monomial(self, q: Sequence[Sequence[int]]) -> "LaurentPoly":
        """Exponents transform as ``a -> q a`` (q an integer matrix)."""
        out = {}
        for e, c in self.terms.items():
            out[tuple(sum(r * x for r, x in zip(row, e)) for row in q)] = c
        return LaurentPoly(len(q), out)

    def exponents(self) -> list[Exponent]:
        return list(self.terms)

    def coefficients(self) -> list:
        return list(self.terms.values())

    def constant_term(self):
        return self.terms.get((0,) * self.dim, 0)

    def is_positive(self) -> bool:
        return bool(self.terms) and all(isinstance(c, (int, Fraction)) and c > 0 for c in self.terms.values())

    def require_nonzero(self):
        if not self.terms:
            raise EmptyPolynomial("the zero polynomial has no Newton polytope")

    def evaluate(self, x: Sequence) -> complex:
        """Numeric value at a point with all coordinates nonzero."""
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for xi, ei in zip(x, e):
                if ei:
                    term *= complex(xi) ** ei
            total += term
        return total

    def evaluate_exact(self, x: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            term = Fraction(c)
            for xi, ei in zip(x, e):
                term *= Fraction(xi) ** ei
            total += term
        return total

    def numeric(self) -> "NumericPoly":
        return NumericPoly.from_poly(self)


class NumericPoly:
    """Vectorised evaluation helper: exponent matrix plus float coefficients."""

    def __init__(self, exps: np.ndarray, coefs: np.ndarray):
        self.exps = exps
        self.coefs = coefs
        self.dim = exps.shape[1]

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "NumericPoly":
        exps = np.array(p.exponents(), dtype=float).reshape(len(p.terms), p.dim)
        coefs = np.array([complex(c) for c in p.coefficients()])
        if np.all(coefs.imag == 0):
            coefs = coefs.real
        return cls(exps, coefs)

    def monomials_log(self, t: np.ndarray) -> np.ndarray:
        """Monomial values ``c_a exp(<a, t>)`` for a batch of log-points ``t`` (S x n)."""
        return self.coefs * np.exp(t @ self.exps.T)

    def derivatives_log(self, t: np.ndarray):
        """``(q, theta q, theta theta q)`` at ``x = exp(t)``, batched over rows of t."""
        mon = self.monomials_log(t)
        q = mon.sum(axis=1)
        dq = mon @ self.exps
        ddq = np.einsum("sm,mi,mk->sik", mon, self.exps, self.exps)
        return q, dq, ddq

    def log_value_real(self, t: Sequence[float]) -> float:
        """``log q(exp t)`` for real t and positive coefficients, overflow-safe."""
        vals = [math.log(c) + sum(a * ti for a, ti in zip(row, t)) for row, c in zip(self.exps, self.coefs)]
        m = max(vals)
        return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def lex_first_exponent(p: LaurentPoly) -> Exponent:
    return min(p.terms)


def poly_from_terms(dim: int, terms: Iterable[tuple[Sequence[int], object]]) -> LaurentPoly:
    out: dict[Exponent, object] = {}
    for exp, coef in terms:
        exp = tuple(exp)
        out[exp] = out.get(exp, 0) + coef
    return LaurentPoly(dim, out)


def log_point(x: Sequence[complex]) -> np.ndarray:
    return np.array([cmath.log(complex(xi)) for xi in x])
