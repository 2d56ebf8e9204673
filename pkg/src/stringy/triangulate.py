"""Regular triangulations of vector configurations by lifting.

A configuration is a list of integer column vectors spanning ``R^d`` and
lying in an open half-space (a pointed cone). For homogenized point sets,
such as Cayley configurations whose columns all satisfy "sum of the top
``e`` coordinates = 1", triangulating the cone and triangulating the
point set are the same thing.

Lower facets are found by checking every ``d``-subset: ``sigma`` is a cell
of the subdivision induced by heights ``w`` iff the linear functional ``y``
with ``<y, a_i> = w_i`` on ``sigma`` satisfies ``<y, a_j> < w_j`` for every
other column.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import DegenerateLift, InputError, NotFullDim, RetriesExhausted, Singular
from .exact import det_int, rank_rat, solve_exact, transpose

log = logging.getLogger(__name__)

LIFT_HEIGHT = 1000
MAX_RETRIES = 64


@dataclass(frozen=True)
class Configuration:
    points: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InputError("empty configuration")
        if len(set(pts)) != len(pts):
            raise InputError("configuration has duplicate columns")
        if rank_rat(pts) != len(pts[0]):
            raise NotFullDim("configuration does not span its ambient space")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[int]]) -> "Configuration":
        return cls(transpose(matrix))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self):
        return len(self.points)

    def submatrix(self, sigma: Sequence[int]) -> tuple[tuple[int, ...], ...]:
        """The square matrix ``A_sigma`` whose columns are the points in sigma."""
        return transpose([self.points[i] for i in sigma])


@dataclass(frozen=True)
class Triangulation:
    """Simplices are sorted 0-based index tuples; JSON uses 1-based indices."""

    simplices: tuple[tuple[int, ...], ...]
    lift: tuple[int, ...]
    config: Configuration | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {"lift": list(self.lift), "simplices": [[i + 1 for i in s] for s in self.simplices]}

    @classmethod
    def from_json(cls, data: dict, config: Configuration | None = None) -> "Triangulation":
        simplices = tuple(sorted(tuple(sorted(i - 1 for i in s)) for s in data["simplices"]))
        return cls(simplices, tuple(int(x) for x in data.get("lift", ())), config)


def positive_functional(points: Sequence[Sequence[int]]) -> tuple[Fraction, ...] | None:
    """A functional with ``<phi, a> >= 1`` on every column, or None if the cone is not pointed.

    Vertex enumeration of ``{phi : <phi, a_i> >= 1}``: when this polyhedron is
    nonempty and the columns span, it has a vertex cut out by ``d`` tight rows.
    """
    d = len(points[0])
    if rank_rat(points) < d:
        return None
    for subset in combinations(range(len(points)), d):
        try:
            phi = solve_exact([points[i] for i in subset], [1] * d)
        except Singular:
            continue
        if all(sum(a * b for a, b in zip(phi, p)) >= 1 for p in points):
            return phi
    return None


def regular_triangulation(config: Configuration, lift: Sequence[int]) -> Triangulation:
    if len(lift) != len(config):
        raise InputError(f"lift has {len(lift)} heights for {len(config)} columns")
    lift = tuple(int(x) for x in lift)
    d = config.dim
    cells = []
    for sigma in combinations(range(len(config)), d):
        a_sigma = config.submatrix(sigma)
        if det_int(a_sigma) == 0:
            continue
        y = solve_exact(transpose(a_sigma), [lift[i] for i in sigma])
        gaps = [
            lift[j] - sum(yi * aj for yi, aj in zip(y, config.points[j]))
            for j in range(len(config))
            if j not in sigma
        ]
        if gaps and min(gaps) < 0:
            continue
        if gaps and min(gaps) == 0:
            raise DegenerateLift(f"lift {list(lift)} has a non-simplicial lower facet through {sigma}")
        cells.append(sigma)
    if not cells:
        raise DegenerateLift(f"lift {list(lift)} produced no lower facets")
    return Triangulation(tuple(sorted(cells)), lift, config)


def random_regular_triangulation(
    config: Configuration,
    seed=None,
    retries: int = MAX_RETRIES,
    height: int = LIFT_HEIGHT,
) -> Triangulation:
    """Regular triangulation from random integer heights in ``[-height, height]``."""
    if positive_functional(config.points) is None:
        raise InputError("configuration does not span a pointed cone")
    rng = random.Random(seed)
    for attempt in range(retries):
        lift = [rng.randint(-height, height) for _ in range(len(config))]
        try:
            return regular_triangulation(config, lift)
        except DegenerateLift:
            log.debug("degenerate lift on attempt %d, retrying", attempt)
    raise RetriesExhausted(f"no generic lift found in {retries} attempts")


def volume_check(t: Triangulation, config: Configuration | None = None) -> int:
    """Sum of ``|det A_sigma|``; the same for every triangulation of a configuration."""
    config = config or t.config
    if config is None:
        raise InputError("triangulation carries no configuration")
    return sum(abs(det_int(config.submatrix(s))) for s in t.simplices)
