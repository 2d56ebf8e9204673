"""Seeded random problems for pipeline-agreement checks.

Each problem has positive rational coefficients, a saturated Cayley
configuration, a full-dimensional weighted Newton polytope and ``u``
drawn as a strict convex combination of its vertices, so it is interior.
Parameters that put ``delta`` on a wall of some simplex are redrawn.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from stringy.cayley import build_cayley
from stringy.dual_volume import minkowski_polytope, p_sigma
from stringy.errors import InputError
from stringy.exact import det_int, transpose
from stringy.laurent import LaurentPoly


@dataclass(frozen=True)
class Problem:
    name: str
    qs: tuple[LaurentPoly, ...]
    v: tuple[Fraction, ...]
    u: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.qs[0].dim


def _rational(rng: random.Random, lo: int = 1, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 4))


def _poly(rng: random.Random, n: int, size: int) -> LaurentPoly:
    exps: set[tuple[int, ...]] = set()
    while len(exps) < size:
        exps.add(tuple(rng.randint(0, 2) for _ in range(n)))
    return LaurentPoly(n, {e: _rational(rng) for e in exps})


def _generic(qs, v, u) -> bool:
    """No simplex of the Cayley configuration has a zero entry in ``A_sigma^{-1} delta``."""
    cfg = build_cayley(qs)
    cols = cfg.columns
    delta = tuple(v) + tuple(u)
    for sigma in combinations(range(len(cols)), len(delta)):
        if det_int(transpose([cols[i] for i in sigma])) == 0:
            continue
        if any(x == 0 for x in p_sigma(cfg, sigma, delta)):
            return False
    return True


def random_problem(rng: random.Random, n: int, e: int, name: str = "") -> Problem:
    while True:
        room = 3**n
        budget = min(rng.randint(n + 1 + (e - 1), 8), room * e)
        sizes = [2] * e
        for _ in range(budget - 2 * e):
            open_slots = [j for j in range(e) if sizes[j] < room]
            sizes[rng.choice(open_slots)] += 1
        qs = tuple(_poly(rng, n, s) for s in sizes)
        try:
            build_cayley(qs)
        except InputError:
            continue
        v = tuple(_rational(rng) for _ in range(e))
        poly = minkowski_polytope(qs, v)
        if not poly.is_full_dimensional:
            continue
        weights = [Fraction(rng.randint(1, 5)) for _ in poly.vertices]
        total = sum(weights)
        u = tuple(sum(w * p[i] for w, p in zip(weights, poly.vertices)) / total for i in range(n))
        if _generic(qs, v, u):
            return Problem(name or f"n{n}e{e}", qs, v, u)


def corpus(seed: int = 20241016, count: int = 24) -> list[Problem]:
    """Problems cycling through (n, e) in {1,2,3} x {1,2}."""
    rng = random.Random(seed)
    shapes = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2)]
    out = []
    for k in range(count):
        n, e = shapes[k % len(shapes)]
        out.append(random_problem(rng, n, e, f"p{k:02d}_n{n}e{e}"))
    return out


def poly(n: int, terms: dict) -> LaurentPoly:
    return LaurentPoly(n, {tuple(k): Fraction(c) for k, c in terms.items()})


def golden() -> dict[str, Problem]:
    one = poly(1, {(0,): 1, (1,): 1})
    return {
        "beta": Problem("beta", (one,), (Fraction(3),), (Fraction(1),)),
        "quadratic": Problem("quadratic", (poly(1, {(0,): 1, (1,): 1, (2,): 1}),), (Fraction(3),), (Fraction(1),)),
        "dirichlet": Problem(
            "dirichlet", (poly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1}),), (Fraction(3),), (Fraction(1), Fraction(1))
        ),
        "product": Problem(
            "product",
            (poly(2, {(0, 0): 1, (1, 0): 1}), poly(2, {(0, 0): 1, (0, 1): 1})),
            (Fraction(3), Fraction(2)),
            (Fraction(1), Fraction(1, 2)),
        ),
    }
