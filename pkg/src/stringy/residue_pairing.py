"""Intersection pairings from residue data at normal-crossing points.

The engine takes, for every point where n boundary divisors meet, the
residue of the connection there and the residues of each form, and sums
``<Res(nabla)^{-1} Res(omega_+), Res(omega_-)>``. Values are reported
divided by ``(2 pi i)^n`` so they stay rational.

The arrangement front-end produces that data for generic projective
hyperplane arrangements with logarithmic forms
``dlog(l_{H_1}/l_inf) ^ ... ^ dlog(l_{H_n}/l_inf)``, where no blow-up is
needed because every intersection is already normal crossing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Mapping, Sequence, Union

from .errors import (
    InputError,
    NonGenericArrangement,
    NonZeroWeightSum,
    Singular,
    SingularResidue,
    ZeroWeightAtVertex,
)
from .exact import det_rat, format_rational, kernel_lattice, parse_rational, rank_rat, solve_exact

Residue = Union[Fraction, tuple]


@dataclass(frozen=True)
class SncPoint:
    """Residue data at one point; matrix data uses vectors for ``omega_+`` and covectors for ``omega_-``."""

    id: object
    connection_residue: Residue
    residues: Mapping[object, Residue] = field(default_factory=dict)

    @property
    def is_matrix(self) -> bool:
        return isinstance(self.connection_residue, (tuple, list))


def _residue(point: SncPoint, form) -> Residue:
    try:
        return point.residues[form]
    except KeyError:
        raise InputError(f"form {form!r} has no residue recorded at point {point.id!r}") from None


def _point_term(point: SncPoint, form_a, form_b) -> Fraction:
    a = _residue(point, form_a)
    b = _residue(point, form_b)
    if not point.is_matrix:
        r = Fraction(point.connection_residue)
        if r == 0:
            raise SingularResidue(f"connection residue vanishes at point {point.id!r}")
        return Fraction(a) * Fraction(b) / r
    try:
        x = solve_exact(point.connection_residue, [Fraction(c) for c in a])
    except Singular:
        raise SingularResidue(f"connection residue is not invertible at point {point.id!r}") from None
    if len(b) != len(x):
        raise InputError(f"residue of {form_b!r} at {point.id!r} has the wrong length")
    return sum((Fraction(bi) * xi for bi, xi in zip(b, x)), Fraction(0))


def pairing_from_residues(points: Sequence[SncPoint], form_a, form_b) -> Fraction:
    """``sum_P <Res(nabla)^{-1} Res(a), Res(b)>`` with a in the plus and b in the minus slot."""
    return sum((_point_term(p, form_a, form_b) for p in points), Fraction(0))


@dataclass(frozen=True)
class Arrangement:
    """Hyperplanes ``c_0 x_0 + c_1 x_1 + ... + c_n x_n = 0`` in projective n-space.

    In the affine chart ``x_0 = 1`` this is ``c_0 + sum c_i x_i``; the line at
    infinity is ``(1, 0, ..., 0)``. Indices are 0-based.
    """

    n: int
    hyperplanes: tuple[tuple[Fraction, ...], ...]
    alphas: tuple[Fraction, ...]
    infinity: int

    def __post_init__(self):
        hs = tuple(tuple(Fraction(c) for c in h) for h in self.hyperplanes)
        alphas = tuple(Fraction(a) for a in self.alphas)
        object.__setattr__(self, "hyperplanes", hs)
        object.__setattr__(self, "alphas", alphas)
        if len(alphas) != len(hs):
            raise InputError("need one weight per hyperplane")
        if any(len(h) != self.n + 1 for h in hs):
            raise InputError(f"hyperplanes need {self.n + 1} homogeneous coefficients")
        if any(not any(h) for h in hs):
            raise InputError("a hyperplane has all coefficients zero")
        if not 0 <= self.infinity < len(hs):
            raise InputError("infinity index out of range")
        if sum(alphas) != 0:
            raise NonZeroWeightSum(f"weights sum to {sum(alphas)}, not 0")

    @classmethod
    def from_json(cls, data: dict) -> "Arrangement":
        hs = data["hyperplanes"]
        return cls(
            n=int(data["n"]),
            hyperplanes=[[parse_rational(c) for c in h["coeffs"]] for h in hs],
            alphas=[parse_rational(h["alpha"]) for h in hs],
            infinity=int(data["infinity"]) - 1,
        )


@dataclass(frozen=True)
class Vertex:
    subset: tuple[int, ...]
    point: tuple[Fraction, ...]

    @property
    def affine(self) -> tuple[Fraction, ...] | None:
        if self.point[0] == 0:
            return None
        return tuple(x / self.point[0] for x in self.point[1:])


def _normalize(point: Sequence[Fraction]) -> tuple[Fraction, ...]:
    lead = next(x for x in point if x != 0)
    return tuple(Fraction(x) / lead for x in point)


def arrangement_vertices(arr: Arrangement) -> list[Vertex]:
    """Every n-subset of hyperplanes with its common projective point."""
    hs = arr.hyperplanes
    for subset in combinations(range(len(hs)), arr.n + 1):
        if det_rat([hs[i] for i in subset]) == 0:
            raise NonGenericArrangement(
                f"hyperplanes {[i + 1 for i in subset]} pass through a common point"
            )
    out = []
    for subset in combinations(range(len(hs)), arr.n):
        rows = [hs[i] for i in subset]
        if rank_rat(rows) < arr.n:
            raise NonGenericArrangement(f"hyperplanes {[i + 1 for i in subset]} do not meet in a single point")
        scale = lcm(*(c.denominator for row in rows for c in row))
        (kernel,) = kernel_lattice([[int(c * scale) for c in row] for row in rows])
        out.append(Vertex(subset, _normalize([Fraction(k) for k in kernel])))
    return out


def _check_form(arr: Arrangement, form: Sequence[int]) -> tuple[int, ...]:
    form = tuple(form)
    if len(form) != arr.n:
        raise InputError(f"basis form {form} needs {arr.n} hyperplanes")
    if arr.infinity in form:
        raise InputError("basis forms may not use the hyperplane at infinity")
    if any(not 0 <= h < len(arr.hyperplanes) for h in form):
        raise InputError(f"basis form {form} refers to a missing hyperplane")
    return form


def form_residue(arr: Arrangement, form: Sequence[int], vertex: Vertex | Sequence[int]) -> Fraction:
    """Iterated residue of ``dlog(l_{H_1}/l_inf) ^ ... ^ dlog(l_{H_n}/l_inf)`` at a vertex.

    The residue of ``dlog(l_H/l_inf)`` along K is 1 if K = H, -1 if K is at
    infinity and 0 otherwise; the wedge gives the determinant with rows
    indexed by the vertex hyperplanes in increasing order.
    """
    form = _check_form(arr, form)
    subset = vertex.subset if isinstance(vertex, Vertex) else tuple(sorted(vertex))
    matrix = [
        [1 if k == h else (-1 if k == arr.infinity else 0) for h in form]
        for k in subset
    ]
    return det_rat(matrix)


def residue_data(arr: Arrangement, basis: Sequence[Sequence[int]]) -> list[SncPoint]:
    """SNC residue data of the arrangement with forms labelled by basis position."""
    points = []
    for vertex in arrangement_vertices(arr):
        weight = Fraction(1)
        for h in vertex.subset:
            weight *= arr.alphas[h]
        if weight == 0:
            raise ZeroWeightAtVertex(
                f"weight product vanishes at the vertex of hyperplanes {[h + 1 for h in vertex.subset]}"
            )
        residues = {k: form_residue(arr, form, vertex) for k, form in enumerate(basis)}
        points.append(SncPoint(vertex.subset, weight, residues))
    return points


def intersection_matrix(arr: Arrangement, basis: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """``M[a][b] = sum_vertices Res(omega_a) Res(omega_b) / prod alpha``."""
    basis = [_check_form(arr, f) for f in basis]
    points = residue_data(arr, basis)
    return [[pairing_from_residues(points, a, b) for b in range(len(basis))] for a in range(len(basis))]


def matrix_to_json(m: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in m]
