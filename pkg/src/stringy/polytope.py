"""Exact polytope geometry over the rationals.

Everything is computed with Fractions (hull predicates are integer
determinants after clearing denominators); there is no floating-point
geometry in this module. Problems are desk-sized, so facets are found by
enumerating ``dim``-subsets of points.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DimMismatch, NonPositiveWeight, NotFullDim, NotInterior, Singular
from .exact import det_int, det_rat, format_rational, parse_rational, rank_rat, solve_exact
from .laurent import LaurentPoly

Point = tuple[Fraction, ...]
Facet = tuple[Point, Fraction]


def _as_point(p: Iterable) -> Point:
    return tuple(Fraction(x) for x in p)


def _affine_rank(points: Sequence[Point]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank_rat([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def _integerize(points: Sequence[Point]) -> tuple[list[tuple[int, ...]], int]:
    scale = 1
    for p in points:
        for x in p:
            scale = lcm(scale, x.denominator)
    return [tuple(int(x * scale) for x in p) for p in points], scale


def _primitive(normal: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in normal:
        g = gcd(g, x)
    return tuple(x // g for x in normal)


def _hull_facets(points: Sequence[Point]) -> list[Facet]:
    """Facets ``<normal, x> >= offset`` of a full-dimensional point set.

    Normals are primitive integer vectors, so the list has a canonical form.
    """
    d = len(points[0])
    ipts, scale = _integerize(points)
    found: dict[tuple[int, ...], int] = {}
    for subset in combinations(range(len(ipts)), d):
        base = ipts[subset[0]]
        diffs = [[a - b for a, b in zip(ipts[i], base)] for i in subset[1:]]
        normal = []
        for col in range(d):
            minor = [row[:col] + row[col + 1:] for row in diffs]
            normal.append((-1) ** col * det_int(minor))
        if not any(normal):
            continue
        normal = _primitive(normal)
        offset = sum(a * b for a, b in zip(normal, base))
        if found.get(normal) == offset or found.get(tuple(-x for x in normal)) == -offset:
            continue
        sides = [sum(a * b for a, b in zip(normal, p)) - offset for p in ipts]
        if all(s >= 0 for s in sides):
            found[normal] = offset
        elif all(s <= 0 for s in sides):
            found[tuple(-x for x in normal)] = -offset
    return sorted(
        (tuple(Fraction(x) for x in n), Fraction(b, scale)) for n, b in found.items()
    )


def _coordinate_chart(points: Sequence[Point], k: int) -> list[int]:
    """Coordinates whose projection is injective on the affine hull (rank k)."""
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    chosen: list[int] = []
    for col in range(len(p0)):
        trial = chosen + [col]
        if rank_rat([[row[c] for c in trial] for row in diffs]) == len(trial):
            chosen = trial
            if len(chosen) == k:
                break
    return chosen


def extreme_points(points: Iterable[Iterable]) -> list[Point]:
    """The vertices of conv(points), for point sets of any affine dimension."""
    pts = sorted(set(_as_point(p) for p in points))
    if len(pts) <= 1:
        return pts
    k = _affine_rank(pts)
    if k == 0:
        return pts[:1]
    chart = _coordinate_chart(pts, k)
    proj = [tuple(p[c] for c in chart) for p in pts]
    if k == 1:
        lo = min(range(len(pts)), key=lambda i: proj[i])
        hi = max(range(len(pts)), key=lambda i: proj[i])
        return sorted({pts[lo], pts[hi]})
    facets = _hull_facets(proj)
    out = []
    for p, q in zip(pts, proj):
        tight = [n for n, b in facets if sum(a * x for a, x in zip(n, q)) == b]
        if len(tight) >= k and rank_rat(tight) == k:
            out.append(p)
    return out


class Polytope:
    """A convex polytope given by its vertices; facets are computed lazily."""

    def __init__(self, points: Iterable[Iterable], dim: int | None = None):
        pts = [_as_point(p) for p in points]
        if not pts:
            raise ValueError("a polytope needs at least one point")
        self.dim = dim if dim is not None else len(pts[0])
        if any(len(p) != self.dim for p in pts):
            raise DimMismatch("points of differing dimension")
        self.vertices: tuple[Point, ...] = tuple(extreme_points(pts))
        self._facets: list[Facet] | None = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={[[str(x) for x in v] for v in self.vertices]})"

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.dim == other.dim and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash((self.dim, frozenset(self.vertices)))

    @property
    def affine_dim(self) -> int:
        return _affine_rank(self.vertices)

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    @property
    def facets(self) -> list[Facet]:
        if self._facets is None:
            with self._lock:
                if self._facets is None:
                    if not self.is_full_dimensional:
                        raise NotFullDim(f"polytope has affine dimension {self.affine_dim} < {self.dim}")
                    self._facets = _hull_facets(self.vertices)
        return self._facets

    def scale(self, factor) -> "Polytope":
        factor = Fraction(factor)
        return Polytope([tuple(factor * x for x in v) for v in self.vertices], self.dim)

    def translate(self, shift: Sequence) -> "Polytope":
        shift = _as_point(shift)
        return Polytope([tuple(x + s for x, s in zip(v, shift)) for v in self.vertices], self.dim)

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [[format_rational(x) for x in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        return cls([[parse_rational(x) for x in v] for v in data["vertices"]], int(data["dim"]))


def newton_polytope(q: LaurentPoly) -> Polytope:
    q.require_nonzero()
    return Polytope(q.exponents(), q.dim)


def weighted_minkowski(parts: Sequence[tuple[Polytope, object]]) -> Polytope:
    """Minkowski sum of ``weight * polytope`` over the parts."""
    if not parts:
        raise ValueError("empty Minkowski sum")
    dim = parts[0][0].dim
    acc: list[Point] = [(Fraction(0),) * dim]
    for poly, weight in parts:
        weight = Fraction(weight)
        if poly.dim != dim:
            raise DimMismatch(f"summand of dimension {poly.dim} in a {dim}-dimensional sum")
        if weight <= 0:
            raise NonPositiveWeight(f"Minkowski weight {weight} must be positive")
        sums = {tuple(a + weight * b for a, b in zip(p, v)) for p in acc for v in poly.vertices}
        acc = extreme_points(sums)
    return Polytope(acc, dim)


def contains_interior(p: Polytope, u: Sequence) -> bool:
    u = _as_point(u)
    return all(sum(a * x for a, x in zip(n, u)) > b for n, b in p.facets)


def dual_polytope(p: Polytope, u: Sequence) -> Polytope:
    """``{psi : <psi, w - u> >= -1 for every vertex w of p}``."""
    u = _as_point(u)
    if not contains_interior(p, u):
        raise NotInterior(f"point {[str(x) for x in u]} is not interior to the polytope")
    rows = [tuple(a - b for a, b in zip(w, u)) for w in p.vertices]
    found = set()
    for subset in combinations(range(len(rows)), p.dim):
        try:
            psi = solve_exact([rows[i] for i in subset], [-1] * p.dim)
        except Singular:
            continue
        if all(sum(a * b for a, b in zip(psi, r)) >= -1 for r in rows):
            found.add(psi)
    return Polytope(found, p.dim)


def placing_triangulation(points: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Placing triangulation of a full-dimensional point set, as index tuples.

    Points are inserted in the given order; each point that lies outside
    the current hull is coned over the boundary facets visible from it.
    """
    pts = [_as_point(p) for p in points]
    d = len(pts[0])

    def orient(face: Sequence[int], q: int) -> int:
        det = det_rat([[a - b for a, b in zip(pts[i], pts[q])] for i in face])
        return (det > 0) - (det < 0)

    start = [0]
    for i in range(1, len(pts)):
        if _affine_rank([pts[j] for j in start + [i]]) == len(start):
            start.append(i)
            if len(start) == d + 1:
                break
    if len(start) < d + 1:
        raise NotFullDim("point set is not full-dimensional")
    simplices = [tuple(start)]
    boundary: dict[frozenset, int] = {}
    for drop in start:
        boundary[frozenset(set(start) - {drop})] = drop
    for q in range(len(pts)):
        if q in start:
            continue
        visible = []
        for face, opp in boundary.items():
            face_t = tuple(sorted(face))
            s = orient(face_t, q)
            if s != 0 and s != orient(face_t, opp):
                visible.append(face)
        for face in visible:
            simplices.append(tuple(sorted(face | {q})))
            del boundary[face]
            for drop in face:
                new_face = frozenset((face - {drop}) | {q})
                if new_face in boundary:
                    del boundary[new_face]
                else:
                    boundary[new_face] = drop
    return simplices


def simplex_volume(vertices: Sequence[Point]) -> Fraction:
    """``|det|`` of the edge matrix: the normalized volume of a simplex."""
    base = vertices[0]
    return abs(det_rat([[a - b for a, b in zip(v, base)] for v in vertices[1:]]))


def normalized_volume(p: Polytope) -> Fraction:
    """``dim! * Lebesgue volume``, exact."""
    if not p.is_full_dimensional:
        raise NotFullDim(f"polytope has affine dimension {p.affine_dim} < {p.dim}")
    verts = list(p.vertices)
    return sum(
        (simplex_volume([verts[i] for i in s]) for s in placing_triangulation(verts)),
        Fraction(0),
    )
