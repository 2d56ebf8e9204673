import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from corpus import corpus, golden, poly
from stringy.cayley import assemble_delta, build_cayley
from stringy.dual_volume import (
    amplitude,
    amplitude_dual_volume,
    amplitude_triangulation,
    dual_cone_volume,
    p_sigma,
)
from stringy.errors import NotFullDim, NotInterior, NotPointed, ParameterOnWall
from stringy.triangulate import Configuration, Triangulation, random_regular_triangulation, regular_triangulation

F = Fraction
beta_cfg = build_cayley([poly(1, {(0,): 1, (1,): 1})])
quad_cfg = build_cayley([poly(1, {(0,): 1, (1,): 1, (2,): 1})])
fan = Triangulation(((0, 1), (1, 2)), (0, -1, 0))
wide = Triangulation(((0, 2),), (0, 1, 0))


def test_p_sigma_examples():
    assert p_sigma(beta_cfg, (0, 1), (3, 1)) == (2, 1)
    assert p_sigma(quad_cfg, (1, 2), (3, 1)) == (5, -2)
    assert p_sigma(quad_cfg, (0, 2), (3, 1)) == (F(5, 2), F(1, 2))


def test_triangulation_amplitude_examples():
    delta = assemble_delta([3], [1])
    assert amplitude_triangulation(beta_cfg, delta, Triangulation(((0, 1),), (0, 0))).value == F(3, 2)
    fanned = amplitude_triangulation(quad_cfg, delta, fan)
    assert fanned.value == F(6, 5)
    assert [v for _, v in fanned.per_simplex_terms] == [F(1, 2), F(-1, 10)]
    assert amplitude_triangulation(quad_cfg, delta, wide).value == F(6, 5)


def test_dual_volume_examples():
    assert amplitude_dual_volume([poly(1, {(0,): 1, (1,): 1})], [3], [1]).value == F(3, 2)
    assert amplitude_dual_volume([poly(1, {(0,): 1, (1,): 1, (2,): 1})], [3], [1]).value == F(6, 5)
    assert amplitude_dual_volume([poly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1})], [3], [1, 1]).value == 3


def test_dual_cone_examples():
    assert dual_cone_volume(beta_cfg, (3, 1), Triangulation(((0, 1),), (0, 0))) == F(1, 2)
    assert dual_cone_volume(quad_cfg, (3, 1), fan) == F(2, 5)
    assert dual_cone_volume(quad_cfg, (3, 1), wide) == F(2, 5)


def test_negative_term_outside_a_simplex():
    # X = (1, 3/2) is outside the cone of simplex {1, 2}, giving a negative term
    x = (1, F(3, 2))
    assert dual_cone_volume(quad_cfg, x, fan) == dual_cone_volume(quad_cfg, x, wide) == F(8, 3)
    terms = amplitude_triangulation(quad_cfg, assemble_delta([1], [F(3, 2)]), fan).per_simplex_terms
    assert [v for _, v in terms] == [F(-4, 3), 4]


def test_parameter_on_wall():
    with pytest.raises(ParameterOnWall):
        # u = v is interior to [0, 2v] but on the wall of simplex {1, 2}
        amplitude_triangulation(quad_cfg, assemble_delta([2], [2]), fan)


def test_boundary_u_is_not_interior():
    with pytest.raises(NotInterior):
        amplitude_dual_volume([poly(1, {(0,): 1, (1,): 1})], [3], [0])
    with pytest.raises(NotInterior):
        amplitude([poly(1, {(0,): 1, (1,): 1})], [3], [3])


def test_non_pointed_cone():
    with pytest.raises(NotPointed):
        dual_cone_volume([[1, -1]], (1,), Triangulation(((0,),), (0, 0)))


def test_golden_product_rule():
    g = golden()["product"]
    v1, v2 = g.v
    u1, u2 = g.u
    expected = v1 * v2 / (u1 * (v1 - u1) * u2 * (v2 - u2))
    assert amplitude_dual_volume(g.qs, g.v, g.u).value == expected
    assert amplitude(g.qs, g.v, g.u, seed=3).value == expected


def scipy_dual_cone_volume(cols, x):
    """Float ``d! vol{y : <y, a> >= 0 for all columns a, <y, X> <= 1}``."""
    d = len(x)
    halfspaces = [list(-np.array(a, dtype=float)) + [0.0] for a in cols]
    halfspaces.append(list(np.array(x, dtype=float)) + [-1.0])
    # Chebyshev-style interior point: maximize the slack s
    res = linprog(
        np.r_[np.zeros(d), -1.0],
        A_ub=np.c_[np.array(halfspaces)[:, :d], np.ones(len(halfspaces))],
        b_ub=-np.array(halfspaces)[:, d],
        bounds=[(None, None)] * d + [(0, 1)],
    )
    interior = res.x[:d]
    hs = HalfspaceIntersection(np.array(halfspaces), interior)
    return math.factorial(d) * ConvexHull(hs.intersections).volume


cone_gens = st.lists(
    st.tuples(st.integers(1, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=6, unique=True
)


@settings(max_examples=30, deadline=None)
@given(cone_gens, st.lists(st.integers(1, 9), min_size=6, max_size=6), st.integers(0, 999))
def test_dual_cone_volume_matches_halfspace_oracle(cols, weights, seed):
    try:
        config = Configuration(tuple(cols))
    except NotFullDim:
        assume(False)
    x = [sum(w * c[i] for w, c in zip(weights, cols)) for i in range(3)]
    t1 = random_regular_triangulation(config, seed)
    t2 = random_regular_triangulation(config, seed + 1)
    try:
        a = dual_cone_volume(config, x, t1)
        b = dual_cone_volume(config, x, t2)
    except ParameterOnWall:
        assume(False)
    assert a == b
    assert float(a) == pytest.approx(scipy_dual_cone_volume(cols, x), rel=1e-7)


problems = corpus()


@pytest.mark.parametrize("problem", problems, ids=lambda p: p.name)
def test_exact_pipelines_agree(problem):
    cfg = build_cayley(problem.qs)
    delta = assemble_delta(problem.v, problem.u)
    dual = amplitude_dual_volume(problem.qs, problem.v, problem.u).value
    for seed in (5, 6):
        t = random_regular_triangulation(cfg.configuration, seed)
        result = amplitude_triangulation(cfg, delta, t)
        assert result.value == dual
        assert result.value > 0
        total = sum((v for _, v in result.per_simplex_terms), F(0))
        assert total * math.prod(delta.v) == result.value


@pytest.mark.parametrize("problem", problems[:12], ids=lambda p: p.name)
@pytest.mark.parametrize("lam", [F(2), F(1, 3), F(7, 5)])
def test_scaling_law(problem, lam):
    base = amplitude(problem.qs, problem.v, problem.u, seed=1).value
    scaled = amplitude(problem.qs, [lam * x for x in problem.v], [lam * x for x in problem.u], seed=1).value
    assert scaled == lam ** (-problem.n) * base


@pytest.mark.parametrize("seed", range(5))
def test_product_rule_on_random_factors(seed):
    rng = random.Random(seed)
    qx = poly(1, {(0,): rng.randint(1, 5), (1,): rng.randint(1, 5), (2,): rng.randint(1, 5)})
    qy = poly(1, {(0,): 1, (1,): rng.randint(1, 5)})
    vx, vy = F(rng.randint(2, 6)), F(rng.randint(2, 6))
    ux, uy = vx * F(rng.choice([1, 3, 5, 7]), 4), vy / 3
    left = amplitude_dual_volume([qx], [vx], [ux]).value * amplitude_dual_volume([qy], [vy], [uy]).value
    lift = {exp: c for exp, c in qx.terms.items()}
    qx2 = poly(2, {(e[0], 0): c for e, c in lift.items()})
    qy2 = poly(2, {(0, e[0]): c for e, c in qy.terms.items()})
    assert amplitude_dual_volume([qx2, qy2], [vx, vy], [ux, uy]).value == left
    assert amplitude([qx2, qy2], [vx, vy], [ux, uy], seed=seed).value == left


def test_regular_triangulation_from_cayley_lift():
    t = regular_triangulation(quad_cfg.configuration, (0, -1, 0))
    assert t == fan
