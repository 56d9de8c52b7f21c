import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from widom import extremal1d, sets1d
from widom.errors import ResolutionError
from widom.sets1d import (AbsPower, Circle, Constant, Intervals, PiecewiseConstant, PolynomialPreimage,
                          UnitCircle, interval)

PROPS = settings(max_examples=20, deadline=None)

REAL_SETS = [
    interval(-1, 1),
    interval(0.5, 3.0),
    Intervals(((-2.0, -1.0), (0.5, 2.0))),
    PolynomialPreimage((-2.0, 0.0, 1.0)),
    Intervals(((-1.0, -0.2), (0.1, 0.3), (0.8, 1.5))),
]

WEIGHTS = [
    Constant(1.0),
    AbsPower(0.2, 1.5),
    PiecewiseConstant((0.0,), (1.0, 2.0)),
    sets1d.Product((AbsPower(-0.3, 0.5), PiecewiseConstant((1.0,), (1.5, 0.5)))),
]


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------


def test_interval_chebyshev_cubic():
    sol = extremal1d.weighted_chebyshev(interval(-1, 1), None, 3)
    assert sol.norm == pytest.approx(0.25, rel=1e-10)
    np.testing.assert_allclose(sol.poly.coef, [0.0, -0.75, 0.0, 1.0], atol=1e-9)
    assert len(sol.extreme_points) == 4


def test_degree_zero_is_the_weight_maximum():
    assert extremal1d.weighted_chebyshev(interval(-1, 1), None, 0).norm == 1.0
    w = AbsPower(0.0, 2.0)
    assert extremal1d.weighted_chebyshev(interval(-1, 2), w, 0).norm == pytest.approx(4.0)


def test_preimage_chebyshev_is_the_defining_polynomial():
    K = PolynomialPreimage((-2.0, 0.0, 1.0))
    sol = extremal1d.weighted_chebyshev(K, None, 2)
    np.testing.assert_allclose(sol.poly.coef, [-2.0, 0.0, 1.0], atol=1e-8)
    assert sol.norm == pytest.approx(1.0, rel=1e-9)
    assert extremal1d.widom_sup_1d(K, None, 2) == pytest.approx(2.0, rel=1e-9)


def test_circle_chebyshev_is_a_power():
    sol = extremal1d.weighted_chebyshev(Circle(0.5j, 2.0), Constant(3.0), 4)
    assert sol.norm == pytest.approx(3.0 * 16.0)
    assert sol.poly(0.5j + 2.0) == pytest.approx(16.0)


def test_interval_widom_factor_is_two():
    for n in range(1, 8):
        assert extremal1d.widom_sup_1d(interval(-1, 1), None, n) == pytest.approx(2.0, rel=1e-9)


@pytest.mark.parametrize("K", REAL_SETS[:4])
@pytest.mark.parametrize("w", WEIGHTS)
@pytest.mark.parametrize("n", [1, 3, 5])
def test_exchange_matches_linear_programming_oracle(K, w, n):
    sol = extremal1d.weighted_chebyshev(K, w, n)
    oracle = extremal1d.bruteforce_chebyshev_1d(K, w, n)
    assert sol.norm == pytest.approx(oracle, rel=1e-4)
    assert sol.norm >= oracle * (1 - 1e-9)  # the oracle grid cannot beat the continuous minimum


@pytest.mark.parametrize("K", REAL_SETS)
@pytest.mark.parametrize("n", [2, 4, 6])
def test_alternation_certificate(K, n):
    w = AbsPower(0.1, 1.0) * Constant(2.0)
    sol = extremal1d.weighted_chebyshev(K, w, n)
    wh = sets1d.usc_regularize(w, K)
    x = sol.extreme_points
    vals = wh(x) * sol.poly(x)
    assert len(x) >= n + 1
    np.testing.assert_allclose(np.abs(vals), sol.norm, rtol=1e-6)
    assert np.all(np.diff(x) < 0)
    # consecutive extreme points alternate in sign except across gaps of K
    assert np.sum(np.sign(vals[:-1]) != np.sign(vals[1:])) >= n


# ---------------------------------------------------------------------------
# orthogonal polynomials
# ---------------------------------------------------------------------------


def test_interval_recurrence_coefficients():
    basis = extremal1d.monic_orthogonal(interval(-1, 1), None, 8)
    np.testing.assert_allclose(basis.b, 0.0, atol=1e-14)
    np.testing.assert_allclose(basis.a2[1:], [0.5] + [0.25] * 7, rtol=1e-12)
    n = np.arange(1, 9)
    np.testing.assert_allclose(basis.monic_norms[1:] ** 2, 2.0 ** (1 - 2 * n), rtol=1e-12)
    assert basis.monic_norms[0] == pytest.approx(1.0)


def test_circle_orthogonal_polynomials_are_powers():
    basis = extremal1d.monic_orthogonal(UnitCircle(), None, 6)
    np.testing.assert_allclose(basis.monic_norms, 1.0, rtol=1e-13)
    for k, P in enumerate(basis.polys):
        expected = np.zeros(k + 1)
        expected[k] = 1.0
        np.testing.assert_allclose(P.coef, expected, atol=1e-13)


def test_resolution_guard():
    with pytest.raises(ResolutionError):
        extremal1d.monic_orthogonal(interval(-1, 1), None, 40, n_nodes=16)


def test_widom_l2_closed_forms():
    assert extremal1d.widom_l2_1d(interval(-1, 1), None, 5) ** 2 == pytest.approx(2.0, rel=1e-12)
    assert extremal1d.widom_l2_1d(UnitCircle(), None, 3) == pytest.approx(1.0, rel=1e-12)
    # P_1 = x for the even weight |x|; ||x||^2 = 4 / (3 pi) and Cap = 1/2
    w2 = extremal1d.widom_l2_1d(interval(-1, 1), AbsPower(0.0, 1.0), 1) ** 2
    assert w2 == pytest.approx(4 / (3 * math.pi) / 0.25, rel=1e-12)


@pytest.mark.parametrize("K", REAL_SETS + [Circle(1 + 1j, 0.5)])
def test_stieltjes_matches_gram_schmidt(K):
    w = Constant(1.0) if not K.is_real else AbsPower(0.05, 1.0)
    basis = extremal1d.monic_orthogonal(K, w, 8)
    gs = extremal1d.gram_schmidt_1d(K, w, 8)
    np.testing.assert_allclose(basis.monic_norms, gs, rtol=1e-8)


def test_orthogonality_of_the_basis():
    K = Intervals(((-2.0, -1.0), (0.5, 2.0)))
    w = PiecewiseConstant((1.0,), (1.0, 3.0))
    basis = extremal1d.monic_orthogonal(K, w, 6)
    mu = sets1d.weighted_measure(K, w)
    V = np.array([P(mu.nodes) for P in basis.polys])
    G = (V * mu.weights) @ V.T
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-12 * np.max(np.diag(G))
    np.testing.assert_allclose(np.sqrt(np.diag(G)), basis.monic_norms, rtol=1e-12)


# ---------------------------------------------------------------------------
# universal lower bounds
# ---------------------------------------------------------------------------


@st.composite
def set_and_weight(draw):
    K = draw(st.sampled_from(REAL_SETS + [UnitCircle(), Circle(2.0, 0.5)]))
    if not K.is_real:
        return K, Constant(draw(st.floats(0.2, 3.0)))
    lo, hi = K.components[0][0], K.components[-1][1]
    c = draw(st.floats(lo, hi))
    p = draw(st.floats(0.0, 3.0))
    b = draw(st.floats(lo, hi))
    v = draw(st.lists(st.floats(0.2, 3.0), min_size=2, max_size=2))
    return K, AbsPower(c, p) * PiecewiseConstant((b,), tuple(v))


@PROPS
@given(set_and_weight(), st.integers(1, 8))
def test_universal_bounds(Kw, n):
    K, w = Kw
    S = sets1d.szego_value(K, w)
    assert extremal1d.widom_l2_1d(K, w, n) ** 2 >= S - 1e-8
    if K.is_real:
        S_hat = sets1d.szego_value(K, sets1d.usc_regularize(w, K))
        assert extremal1d.widom_sup_1d(K, w, n) >= S_hat - 1e-8


@PROPS
@given(st.sampled_from(REAL_SETS), st.integers(1, 8))
def test_real_sets_double_the_unweighted_bound(K, n):
    assert extremal1d.widom_sup_1d(K, None, n) >= 2.0 - 1e-8
