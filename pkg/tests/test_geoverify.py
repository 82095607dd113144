import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from intmatcount.errors import InvalidInput
from intmatcount.geoverify import (ball_volume_check, build_session, delta, delta_tilde, jacobian_check,
                                   mc_c_eta, minkowski2_quadrature, roundtrip_check, s_ij_det,
                                   sandwich_check, theta, theta_at_zero, theta_polynomial_check)
from intmatcount.geoverify.checks import inner_radius, minkowski2_integrand
from intmatcount.geoverify.session import conj_norm, delta_inverse
from intmatcount.polyalg import IntPolynomial, discriminant, roots

CORPUS = [(1, 0, 1), (1, 0, -2), (1, -1, -1), (1, 0, -1, -1), (1, -1, -3, 1), (1, 0, 0, -2)]
SESSIONS = {c: build_session(IntPolynomial(c)) for c in CORPUS}


def test_x1_examples():
    assert np.allclose(SESSIONS[(1, 0, 1)].X1, [[0, -1], [1, 0]])
    assert np.allclose(SESSIONS[(1, 0, -2)].X1, np.diag([-2 ** 0.5, 2 ** 0.5]))
    s = SESSIONS[(1, 0, -1, -1)]
    assert s.X1[0, 0] == pytest.approx(1.3247179572)
    assert s.X1[1, 1] == pytest.approx(-0.6623589786) and s.b[0] == pytest.approx(0.5622795121)


@pytest.mark.parametrize("c", CORPUS)
def test_dimensions(c):
    s = SESSIONS[c]
    assert s.dim_u == s.m - s.r2
    assert np.allclose(np.poly(s.X1), c)


def test_s_ij_examples():
    assert s_ij_det(SESSIONS[(1, 0, -2)], 0, 1) == pytest.approx(2 * 2 ** 0.5, rel=1e-12)
    # |σ2 - σ1|·|σ3 - σ1| from the certified roots
    v = roots(IntPolynomial((1, 0, -1, -1))).values
    assert s_ij_det(SESSIONS[(1, 0, -1, -1)], 0, 1) == pytest.approx(abs(v[1] - v[0]) * abs(v[2] - v[0]), rel=1e-12)
    with pytest.raises(InvalidInput):
        s_ij_det(SESSIONS[(1, 0, -2)], 1, 0)


@pytest.mark.parametrize("c", [(1, -1, -3, 1), (1, 0, -2)])
def test_totally_real_s_product(c):
    s = SESSIONS[c]
    nb = len(s.blocks)
    prod = 1.0
    for i in range(nb):
        for j in range(i + 1, nb):
            prod *= s_ij_det(s, i, j)
    assert prod == pytest.approx(abs(discriminant(s.poly)) ** 0.5, rel=1e-10)


def test_delta_examples():
    s = SESSIONS[(1, 0, 1)]
    t1, x1 = delta(s, [[3.0]], np.zeros((1, 0)))
    t2, _ = delta_tilde(s, [[3.0]], np.zeros((1, 0)))
    assert t1[0, 0] == 3.0 and t2[0, 0] == pytest.approx(13 ** 0.5 - 2)
    s2 = SESSIONS[(1, 0, -2)]
    _, x = delta(s2, np.zeros((1, 0)), [[1.0]])
    assert abs(x[0, 0]) == pytest.approx(1 / (2 * 2 ** 0.5))


@given(st.sampled_from(CORPUS), st.integers(0, 2 ** 31))
def test_delta_zero_and_t_gap(c, seed):
    s = SESSIONS[c]
    t, x = delta(s, np.zeros((1, s.r2)), np.zeros((1, s.dim_u)))
    assert not t.any() and not x.any()
    rng = np.random.default_rng(seed)
    sv = rng.uniform(0, 50, size=(20, s.r2))
    z = rng.normal(size=(20, s.dim_u))
    tp, _ = delta(s, sv, z)
    tt, _ = delta_tilde(s, sv, z)
    assert ((tp - tt >= -1e-12) & (tp - tt < 2)).all()


@pytest.mark.parametrize("c", CORPUS)
def test_roundtrip_and_theta(c):
    s = SESSIONS[c]
    assert roundtrip_check(s).passed
    assert theta_at_zero(s).passed
    assert theta_polynomial_check(s, degree=6 if s.m <= 3 else 4).passed


def test_theta_polynomial_detects_non_polynomial():
    # a square root of s is not polynomial: tilde-δ based Ψ fails the check
    s = SESSIONS[(1, 0, 1)]
    from intmatcount.geoverify import checks, session

    orig = session.theta
    try:
        checks.theta = lambda sess, sv, z: session.h_matrix(sess, np.sqrt(np.abs(sv)))
        assert not theta_polynomial_check(s).passed
    finally:
        checks.theta = orig


@pytest.mark.parametrize("c,expected", [((1, 0, 1), 1.0), ((1, 0, -2), 1 / (2 * 2 ** 0.5)),
                                        ((1, 0, -1, -1), 2 / 23 ** 0.5), ((1, -1, -3, 1), None)])
def test_jacobian(c, expected):
    rep = jacobian_check(SESSIONS[c])
    assert rep.passed and rep.extra["spread"] < 1e-6
    if expected is not None:
        assert rep.rhs == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("c", [(1, 0, 1), (1, 0, -2), (1, 0, -1, -1)])
def test_sandwich(c):
    rep = sandwich_check(SESSIONS[c], 10, samples=20_000)
    assert rep.passed, rep.extra


def test_sandwich_needs_large_radius():
    s = SESSIONS[(1, 0, 1)]
    with pytest.raises(InvalidInput):
        sandwich_check(s, 2.5)


def test_sandwich_unit_rule_fails_for_large_b():
    s = build_session(IntPolynomial((1, 0, 100)))
    assert sandwich_check(s, 30, samples=20_000).passed
    bad = sandwich_check(s, 30, samples=20_000, rule="unit")
    assert not bad.passed and "witness" in bad.extra


def test_inner_radius_is_tight():
    # for λ²+b² the inner ball is an interval [0, R]; its δ-image edge sits just inside D¹_T
    s = build_session(IntPolynomial((1, 0, 100)))
    T = 50.0
    R = inner_radius(s, T)
    t, x = delta(s, [[R]], np.zeros((1, 0)))
    assert conj_norm(s, t, x)[0] < T
    t, x = delta(s, [[T]], np.zeros((1, 0)))
    assert conj_norm(s, t, x)[0] > T


@pytest.mark.parametrize("c", [(1, 0, 1), (1, -1, -1), (1, 0, -1, -1)])
def test_mc_c_eta(c):
    rep = mc_c_eta(IntPolynomial(c), samples=2 ** 18)
    assert rep.passed, rep.to_dict()


def test_ball_volume():
    for c in [(1, 0, 1), (1, 0, -1, -1), (1, 0, 0, -2)]:
        assert ball_volume_check(SESSIONS[c], samples=2 ** 16).passed


def test_minkowski2():
    assert minkowski2_quadrature(2000).passed
    coarse = minkowski2_quadrature(100)
    assert abs(coarse.lhs - math.pi / 6) < 1e-2
    u, v = np.meshgrid(np.linspace(0, 1, 50), np.linspace(0, 1, 50))
    assert (minkowski2_integrand(u, v) >= 0).all()


def test_reports_are_json():
    import json

    rep = jacobian_check(SESSIONS[(1, 0, 1)])
    d = json.loads(json.dumps(rep.to_dict()))
    assert set(d) >= {"check", "params", "lhs", "rhs", "abs_err", "rel_err", "pass"}
