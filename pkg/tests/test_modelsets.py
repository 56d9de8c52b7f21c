import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from widom import modelsets
from widom.modelsets import EuclideanBall2, Polydisk, RealBall2, Simplex


def _grid_ball_norm(a1, a2, m=200001):
    # sup over the sphere of |z1|^a1 |z2|^a2 with |z2|^2 = 1 - |z1|^2
    r = np.linspace(0.0, 1.0, m)
    return float(np.max(r**a1 * (1 - r**2) ** (a2 / 2)))


def test_parse_and_name_round_trip():
    for name in ["polydisk:3", "ball2", "realball2", "simplex:2"]:
        assert modelsets.model_name(modelsets.parse_model(name)) == name
    with pytest.raises(ValueError):
        modelsets.parse_model("cube:2")
    with pytest.raises(ValueError):
        Polydisk(0)


def test_monomial_norms():
    assert modelsets.monomial_sup_norm(Polydisk(3), (2, 0, 5)) == 1.0
    for N in range(1, 6):
        assert modelsets.monomial_sup_norm(EuclideanBall2(), (N, N)) == pytest.approx(2.0**-N, rel=1e-14)
    v = modelsets.monomial_sup_norm(EuclideanBall2(), (2, 3))
    assert v == pytest.approx(2 * 3**1.5 / 5**2.5, rel=1e-14)
    assert v == pytest.approx(0.1859032, abs=1e-7)
    assert modelsets.monomial_sup_norm(EuclideanBall2(), (0, 0)) == 1.0
    assert modelsets.monomial_sup_norm(EuclideanBall2(), (0, 4)) == 1.0
    # simplex: prod (a_j / d)^{a_j}
    assert modelsets.monomial_sup_norm(Simplex(2), (1, 1)) == pytest.approx(0.25)


@pytest.mark.parametrize("a1", range(0, 7))
@pytest.mark.parametrize("a2", range(0, 7))
def test_ball_norms_match_grid_maximization(a1, a2):
    assert modelsets.monomial_sup_norm(EuclideanBall2(), (a1, a2)) == pytest.approx(
        _grid_ball_norm(a1, a2), abs=1e-8)


def test_alpha_must_fit():
    with pytest.raises(ValueError):
        modelsets.monomial_sup_norm(EuclideanBall2(), (1, 2, 3))
    with pytest.raises(ValueError):
        modelsets.chebyshev_norm(RealBall2(), (1, 1))


def test_directional_constants():
    assert modelsets.directional_tau(EuclideanBall2(), (0.5, 0.5)) == pytest.approx(1 / math.sqrt(2))
    assert modelsets.directional_tau(EuclideanBall2(), (1.0, 0.0)) == 1.0
    assert modelsets.directional_tau(RealBall2(), 0.4) == pytest.approx(0.4, rel=1e-14)
    assert modelsets.directional_tau(RealBall2(), (0.0, 1.0)) == pytest.approx(0.5)
    assert modelsets.directional_tau(RealBall2(), (1.0, 0.0)) == pytest.approx(0.5)
    assert modelsets.directional_tau(Polydisk(2), (0.3, 0.7)) == 1.0
    with pytest.raises(ValueError):
        modelsets.directional_tau(EuclideanBall2(), (0.7, 0.7))
    with pytest.raises(ValueError):
        modelsets.directional_tau(Simplex(2), (0.5, 0.5))


def test_profile_minima():
    prof = modelsets.profile_minimum(RealBall2(), 1001)
    assert prof.theta_min == pytest.approx(0.4, abs=1e-3)
    assert prof.tau_min == pytest.approx(0.4, abs=1e-6)
    prof = modelsets.profile_minimum(EuclideanBall2(), 1001)
    assert prof.theta_min == pytest.approx(0.5, abs=1e-3)
    assert prof.tau_min == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert np.all(prof.values >= prof.tau_min - 1e-15)
    one = modelsets.profile_minimum(EuclideanBall2(), 1)
    assert one.theta_min == 1.0 and one.tau_min == 1.0


def test_tau_minus_is_the_profile_minimum():
    for K in (EuclideanBall2(), RealBall2()):
        assert modelsets.profile_minimum(K, 2001).tau_min == pytest.approx(modelsets.tau_minus(K), abs=1e-9)


def test_extremal_functions():
    z = np.array([[0.3, 0.4j], [0.0, 1.0], [0.6, 0.6]])
    np.testing.assert_allclose(modelsets.extremal_function(EuclideanBall2(), z), 0.0)  # all inside the ball
    assert float(modelsets.extremal_function(EuclideanBall2(), np.array([3.0, 4.0]))) == pytest.approx(math.log(5))
    # the real ball: zero on the set, log(2t) + o(1) along the real axis
    assert float(modelsets.extremal_function(RealBall2(), np.array([0.3, -0.5]))) == pytest.approx(0.0, abs=1e-12)
    t = 1e6
    v = float(modelsets.extremal_function(RealBall2(), np.array([t, 0.0])))
    assert v - math.log(t) == pytest.approx(math.log(2), abs=1e-9)
    # the simplex along the symmetric ray
    s = float(modelsets.extremal_function(Simplex(2), np.array([t, t])))
    assert s - math.log(math.hypot(t, t)) == pytest.approx(math.log(4 * math.sqrt(2)), abs=1e-5)
    assert float(modelsets.extremal_function(Simplex(2), np.array([0.2, 0.3]))) == pytest.approx(0.0, abs=1e-12)


def test_closed_form_capacities():
    assert modelsets.capacities_cC(RealBall2()) == pytest.approx((1 / (2 * math.sqrt(2)), 0.5))
    assert modelsets.capacities_cC(EuclideanBall2()) == pytest.approx((1 / math.sqrt(2), 1.0))
    assert modelsets.capacities_cC(Polydisk(3)) == (1.0, 1.0)
    assert modelsets.capacities_cC(Simplex(2))[1] == pytest.approx(0.1767767, abs=1e-7)


@pytest.mark.parametrize("K", [EuclideanBall2(), RealBall2(), Simplex(2), Simplex(3)])
def test_ray_limits_match_closed_forms(K):
    C_num = math.exp(-modelsets.ray_limit(K, "euclid"))
    assert C_num == pytest.approx(modelsets.capacities_cC(K)[1], abs=1e-5)


def test_real_ball_max_norm_ray_limit():
    c_num = math.exp(-modelsets.ray_limit(RealBall2(), "max"))
    assert c_num == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-5)


@pytest.mark.parametrize("K", [Polydisk(2), EuclideanBall2(), RealBall2()])
def test_capacity_chain(K):
    c, C = modelsets.capacities_cC(K)
    tau = modelsets.tau_minus(K)
    assert c <= tau + 1e-12 and tau <= C + 1e-9
    if isinstance(K, RealBall2):
        assert c < tau < C


def test_ball_floor():
    inf = modelsets.ball_log_inf(2)
    r = np.linspace(1e-4, 1 - 1e-4, 200001)
    brute = np.min((1 + r) ** 3 / (1 - r) * np.log(1 / r))
    assert inf == pytest.approx(brute, rel=1e-8)
    assert inf == pytest.approx(3.3835709322811303, rel=1e-9)  # frozen minimizer value
    assert modelsets.ball_l2_floor(0, 0.7) == 0.7
    floors = [modelsets.ball_l2_floor(d, 1.0) for d in range(1, 6)]
    assert all(b < a for a, b in zip(floors, floors[1:]))
    with pytest.raises(ValueError):
        modelsets.ball_l2_floor(-1, 1.0)


def test_mahler_polydisk_floor():
    assert modelsets.mahler_polydisk_floor((1, 1)) == (0.25, 0.0625)
    assert modelsets.mahler_polydisk_floor((4, 0, 0))[0] == 1.0
    assert modelsets.mahler_polydisk_floor((2, 1))[0] == pytest.approx(1 / 9)
    assert modelsets.mahler_polydisk_floor((2, 1), 2.0)[1] == pytest.approx(2 / 81)


def test_sphere_quadrature_moments():
    z, w = modelsets.sphere_quadrature()
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0)
    # int |z1|^(2a) |z2|^(2b) dsigma = a! b! / (a + b + 1)!
    for a, b in [(1, 0), (1, 1), (2, 3), (4, 0)]:
        val = w @ (np.abs(z[:, 0]) ** (2 * a) * np.abs(z[:, 1]) ** (2 * b))
        exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 1)
        assert val == pytest.approx(exact, rel=1e-12)
    assert abs(w @ (z[:, 0] * np.conj(z[:, 1]))) < 1e-14


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_sphere_samples_are_on_the_sphere(seed):
    pts = modelsets.sphere_samples(100, np.random.default_rng(seed))
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
