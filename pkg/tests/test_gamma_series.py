from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import poly
from stringy.cayley import assemble_delta, build_cayley
from stringy.errors import IntegralParameter, NonUnimodular, NotInDomain
from stringy.exact import matvec
from stringy.gamma_series import (
    base_exponent,
    ghm_identity_check,
    in_U_T,
    make_series,
    omega_degree,
    phi_eval,
)
from stringy.triangulate import Triangulation, regular_triangulation

F = Fraction
beta_q = poly(1, {(0,): 1, (1,): 1})
quad_q = poly(1, {(0,): 1, (1,): 10, (2,): 1})
beta_cfg = build_cayley([beta_q])
quad_cfg = build_cayley([quad_q])
fan_lift = (0, -1, 0)
fan = regular_triangulation(quad_cfg.configuration, fan_lift)
wide = Triangulation(((0, 2),), (0, 1, 0), quad_cfg.configuration)
generic = (F(5, 3), F(1, 2))


def test_base_exponent_solves_the_system():
    v = base_exponent(quad_cfg, (0, 1), generic)
    assert matvec(quad_cfg.matrix, v) == tuple(-x for x in generic)
    assert v[2] == 0


@settings(max_examples=30)
@given(st.integers(-3, 3), st.fractions(min_value=F(1, 9), max_value=5, max_denominator=9))
def test_base_exponent_with_shift(k, u):
    delta = (F(7, 3), u)
    v = base_exponent(quad_cfg, (1, 2), delta, [k])
    assert v[0] == k
    assert matvec(quad_cfg.matrix, v) == tuple(-x for x in delta)


def test_beta_series_has_one_term():
    s = make_series(beta_cfg, (0, 1), generic, 10)
    assert s.lattice_points == ((0, 0),)
    z = (1.3, 0.7)
    value = phi_eval(s, z)
    oracle = 1
    for zi, vi in zip(z, s.base):
        oracle *= mpmath.power(zi, float(vi)) * mpmath.rgamma(1 + float(vi))
    assert value == pytest.approx(complex(oracle), rel=1e-13)


def test_quadratic_lattice_points():
    s = make_series(quad_cfg, (0, 1), generic, 10)
    assert set(s.lattice_points) == {(0, 0, 0), (1, -2, 1), (2, -4, 2)}


def mp_phi(base, points, z):
    total = mpmath.mpc(0)
    for w in points:
        term = mpmath.mpc(1)
        for wi, vi, zi in zip(w, base, z):
            e = wi + mpmath.mpf(vi.numerator) / vi.denominator
            term *= mpmath.power(mpmath.mpc(zi), e) * mpmath.rgamma(1 + e)
        total += term
    return complex(total)


@pytest.mark.parametrize("z", [(1, 10, 1), (0.5 + 0.2j, -8 + 3j, 2), (1, 4.5, 0.7)])
@pytest.mark.parametrize("sigma", [(0, 1), (1, 2)])
def test_phi_matches_mpmath(z, sigma):
    s = make_series(quad_cfg, sigma, generic, 12)
    assert phi_eval(s, z) == pytest.approx(mp_phi(s.base, s.lattice_points, z), rel=1e-12)


def test_integral_parameter_rejected():
    with pytest.raises(IntegralParameter):
        make_series(beta_cfg, (0, 1), (3, 1), 0)


def test_non_unimodular_simplex_rejected():
    with pytest.raises(NonUnimodular):
        make_series(quad_cfg, (0, 2), generic, 5)
    with pytest.raises(NonUnimodular):
        ghm_identity_check([quad_q], [generic[0]], [generic[1]], (1, 10, 1), wide, 5)


def test_domain_examples():
    assert in_U_T(beta_cfg, [(0, 1)], (1, 1))
    assert in_U_T(quad_cfg, fan, (1, 10, 1))
    # |z1 z3 / z2^2| = 1/4 = R on the boundary
    assert not in_U_T(quad_cfg, fan, (1, 2, 1))
    assert in_U_T(quad_cfg, fan, (1, 2.01, 1))
    assert not in_U_T(quad_cfg, fan, (1, 10, 1), r=F(1, 200))


def test_outside_domain_is_rejected():
    with pytest.raises(NotInDomain):
        ghm_identity_check([quad_q], [generic[0]], [generic[1]], (1, 1, 1), fan, 5)


def test_beta_identity_at_order_zero():
    t = Triangulation(((0, 1),), (0, 0), beta_cfg.configuration)
    check = ghm_identity_check([beta_q], [generic[0]], [generic[1]], (1.3, 0.7), t, 0)
    assert check.lhs == generic[0] / (generic[1] * (generic[0] - generic[1]))
    assert check.rel_err < 1e-10


def test_quadratic_identity_converges():
    errors = [
        ghm_identity_check([quad_q], [generic[0]], [generic[1]], (1, 10, 1), fan, order).rel_err
        for order in (5, 10, 20)
    ]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-3


def test_series_tail_shrinks():
    s_vals = [phi_eval(make_series(quad_cfg, (0, 1), generic, k), (1, 10, 1)) for k in range(4, 24, 4)]
    steps = [abs(b - a) for a, b in zip(s_vals, s_vals[1:])]
    assert all(b < a / 2 for a, b in zip(steps, steps[1:]))


def test_omega_degree_vanishes_at_initial_term():
    delta = assemble_delta([generic[0]], [generic[1]]).combined
    for sigma in fan.simplices:
        assert omega_degree(quad_cfg, fan_lift, sigma, delta, [0], [0]) == 0


def test_omega_degree_positive_for_shifts():
    delta = assemble_delta([generic[0]], [generic[1]]).combined
    for sigma in fan.simplices:
        for k, k2 in product(range(4), repeat=2):
            if 0 < k + k2 <= 3:
                assert omega_degree(quad_cfg, fan_lift, sigma, delta, [k], [k2]) > 0


def test_identity_json():
    t = Triangulation(((0, 1),), (0, 0), beta_cfg.configuration)
    data = ghm_identity_check([beta_q], [generic[0]], [generic[1]], (1.3, 0.7), t, 0).to_json()
    assert data["lhs"] == "20/7"
    assert set(data) == {"lhs", "lhs_float", "rhs_re", "rhs_im", "rel_err"}
