"""Exact amplitudes: the triangulation sum and the dual-polytope volume.

For ``P = sum_j v_j New(q_j)`` and ``u`` interior to ``P`` both routes give
the normalized volume of ``(P - u)°``. The triangulation route sums one
signed term per simplex of any regular triangulation of the Cayley
configuration; individual terms may be negative (signed cone decomposition) but the
total never depends on the triangulation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .cayley import CayleyConfig, DeltaVector, assemble_delta, build_cayley
from .errors import InputError, NotFullDim, NotInterior, NotPointed, ParameterOnWall, Singular
from .exact import RatVector, det_int, format_rational, solve_exact, transpose
from .laurent import LaurentPoly
from .polytope import contains_interior, dual_polytope, newton_polytope, normalized_volume, weighted_minkowski
from .triangulate import Configuration, Triangulation, positive_functional, random_regular_triangulation

Generators = Union[CayleyConfig, Configuration, Sequence[Sequence[int]]]


@dataclass(frozen=True)
class AmplitudeResult:
    value: Fraction
    pipeline: str
    triangulation_used: Triangulation | None = None
    per_simplex_terms: tuple[tuple[tuple[int, ...], Fraction], ...] | None = None

    def to_json(self) -> dict:
        out = {"exact": format_rational(self.value), "float": float(self.value)}
        if self.triangulation_used is not None:
            out["triangulation"] = self.triangulation_used.to_json()
        if self.per_simplex_terms is not None:
            out["terms"] = [
                {"simplex": [i + 1 for i in s], "value": format_rational(v)} for s, v in self.per_simplex_terms
            ]
        return out


def _columns(gens: Generators) -> tuple[tuple[int, ...], ...]:
    if isinstance(gens, CayleyConfig):
        return gens.columns
    if isinstance(gens, Configuration):
        return gens.points
    return transpose(gens)


def p_sigma(gens: Generators, sigma: Sequence[int], x: Sequence) -> RatVector:
    """``A_sigma^{-1} X``: coordinates of X in the basis of columns in sigma."""
    return _solve_sigma(_columns(gens), sigma, x)


def _solve_sigma(cols, sigma, x) -> RatVector:
    try:
        return solve_exact(transpose([cols[i] for i in sigma]), [Fraction(c) for c in x])
    except Singular:
        raise Singular(f"simplex {[i + 1 for i in sigma]} has det A_sigma = 0") from None


def _simplex_terms(cols, x, simplices):
    terms = []
    for sigma in simplices:
        p = _solve_sigma(cols, sigma, x)
        if any(pi == 0 for pi in p):
            raise ParameterOnWall(
                f"parameter lies on a facet hyperplane of simplex {[i + 1 for i in sigma]}"
            )
        denom = Fraction(abs(det_int(transpose([cols[i] for i in sigma]))))
        for pi in p:
            denom *= pi
        terms.append((tuple(sigma), 1 / denom))
    return terms


def dual_cone_volume(gens: Generators, x: Sequence, t: Triangulation) -> Fraction:
    """Signed sum ``sum_sigma 1 / (|det A_sigma| prod_i p_sigma_i(X))``."""
    cols = _columns(gens)
    if positive_functional(cols) is None:
        raise NotPointed("generators do not span a pointed full-dimensional cone")
    if len(x) != len(cols[0]):
        raise InputError("X has the wrong length")
    return sum((v for _, v in _simplex_terms(cols, x, t.simplices)), Fraction(0))


def amplitude_triangulation(cfg: CayleyConfig, delta: DeltaVector, t: Triangulation) -> AmplitudeResult:
    terms = _simplex_terms(cfg.columns, delta.combined, t.simplices)
    weight = Fraction(1)
    for vj in delta.v:
        weight *= vj
    total = sum((v for _, v in terms), Fraction(0))
    return AmplitudeResult(weight * total, "triangulation", t, tuple(terms))


def minkowski_polytope(qs: Sequence[LaurentPoly], v: Sequence):
    return weighted_minkowski([(newton_polytope(q), Fraction(w)) for q, w in zip(qs, v)])


def amplitude_dual_volume(qs: Sequence[LaurentPoly], v: Sequence, u: Sequence) -> AmplitudeResult:
    delta = assemble_delta(v, u)
    poly = minkowski_polytope(qs, delta.v)
    if not poly.is_full_dimensional:
        raise NotFullDim("the weighted Minkowski sum is not full-dimensional")
    if not contains_interior(poly, delta.u):
        raise NotInterior(f"u = {[str(x) for x in delta.u]} is not in the interior of P")
    return AmplitudeResult(normalized_volume(dual_polytope(poly, delta.u)), "dual_volume")


def amplitude(qs: Sequence[LaurentPoly], v: Sequence, u: Sequence, seed=0) -> AmplitudeResult:
    """Triangulation-route amplitude with a seeded random regular triangulation."""
    delta = assemble_delta(v, u)
    poly = minkowski_polytope(qs, delta.v)
    if not contains_interior(poly, delta.u):
        raise NotInterior(f"u = {[str(x) for x in delta.u]} is not in the interior of P")
    cfg = build_cayley(qs)
    t = random_regular_triangulation(cfg.configuration, seed)
    return amplitude_triangulation(cfg, delta, t)
