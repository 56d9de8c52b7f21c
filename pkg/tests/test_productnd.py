import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from widom import modelsets, productnd, sets1d
from widom.errors import ScaleError, SzegoError
from widom.productnd import ProductSet, ProductWeight, SparsePolyND
from widom.sets1d import AbsPower, Constant, Intervals, PiecewiseConstant, PolynomialPreimage, UnitCircle, interval

PROPS = settings(max_examples=25, deadline=None)

SQUARE = ProductSet((interval(-1, 1), interval(-1, 1)))
RECT = ProductSet((interval(-1, 1), interval(-2, 2)))
PRE = PolynomialPreimage((-2.0, 0.0, 1.0))


# ---------------------------------------------------------------------------
# monomial order
# ---------------------------------------------------------------------------


def test_order_examples():
    assert [productnd.order_index(i, 2) for i in range(6)] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert productnd.order_rank((0, 0, 0)) == 0
    assert productnd.order_rank((1, 0, 0)) == 1
    assert productnd.order_rank((0, 0, 1)) == 3
    assert productnd.order_rank((2, 0, 0)) == 4


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_order_is_a_bijection(n):
    seen = set()
    for i in range(2000):
        a = productnd.order_index(i, n)
        assert productnd.order_rank(a) == i
        seen.add(a)
    assert len(seen) == 2000
    assert productnd.multi_indices(n, 3) == [productnd.order_index(i, n) for i in range(math.comb(n + 3, 3))]


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_rank_then_index_round_trips(alpha):
    alpha = tuple(alpha)
    assert productnd.order_index(productnd.order_rank(alpha), len(alpha)) == alpha


# ---------------------------------------------------------------------------
# sparse polynomials
# ---------------------------------------------------------------------------


def test_sparse_poly_basics():
    P = SparsePolyND({(2, 1): 1.0, (0, 0): -3.0, (1, 1): 0.0})
    assert P.nvars == 2
    assert P.leading == (2, 1)
    assert P.degrees == (2, 1)
    assert P.total_degree == 3
    A = P.dense()
    assert A.shape == (3, 2)
    assert A[2, 1] == 1.0 and A[0, 0] == -3.0
    assert SparsePolyND.from_dense(A).terms == {(2, 1): 1.0, (0, 0): -3.0}


def test_tensor_product_polynomial():
    from numpy.polynomial import Polynomial

    P = SparsePolyND.tensor([Polynomial([-0.5, 0, 1]), Polynomial([2.0, 1.0])])
    assert P.terms == {(0, 0): -1.0, (0, 1): -0.5, (2, 0): 2.0, (2, 1): 1.0}


# ---------------------------------------------------------------------------
# product extremal polynomials
# ---------------------------------------------------------------------------


def test_tau_minus():
    assert productnd.tau_minus_product(SQUARE) == pytest.approx(0.5)
    assert productnd.tau_minus_product(RECT) == pytest.approx(0.5)
    assert productnd.tau_minus_product(ProductSet((UnitCircle(), interval(-2, 2)))) == pytest.approx(1.0)


def test_product_orthogonal_norms():
    assert productnd.product_orthogonal(SQUARE, None, (0, 0)).norm == pytest.approx(1.0)
    assert productnd.product_orthogonal(SQUARE, None, (1, 0)).norm ** 2 == pytest.approx(0.5, rel=1e-12)
    assert productnd.product_orthogonal(SQUARE, None, (2, 3)).norm ** 2 == pytest.approx(2.0**-8, rel=1e-12)


def test_product_chebyshev_norms():
    T = productnd.product_chebyshev(SQUARE, None, (2, 3))
    assert T.norm == pytest.approx(1 / 8, rel=1e-9)
    assert T.poly.leading == (2, 3)
    # any monic x + c has sup-norm >= 1 on [-1, 1], and x^2 - 2 has norm 1 on its preimage
    T2 = productnd.product_chebyshev(ProductSet((interval(-1, 1), PRE)), None, (1, 2))
    assert T2.norm == pytest.approx(1.0, rel=1e-9)
    w = ProductWeight((AbsPower(0.0, 2.0), Constant(3.0)))
    T0 = productnd.product_chebyshev(ProductSet((interval(-1, 2), interval(0, 1))), w, (0, 0))
    assert T0.norm == pytest.approx(12.0)


def test_product_alternation_grid():
    K = ProductSet((interval(-1, 1), Intervals(((-2.0, -1.0), (0.5, 2.0)))))
    T = productnd.product_chebyshev(K, None, (2, 3))
    pts, signs = T.alternation_grid()
    A = T.poly.dense()
    vals = np.array([np.polynomial.polynomial.polyval2d(p[0], p[1], A) for p in pts])
    np.testing.assert_allclose(np.abs(vals), T.norm, rtol=1e-6)
    lead = np.sign(vals[0]) * signs[0]
    # along each factor the extreme points alternate, so signs follow the product rule
    prods = [np.sign(f.extreme_points.size and f.poly(f.extreme_points)) for f in T.factors]
    expect = np.einsum("i,j->ij", prods[0], prods[1]).ravel()
    np.testing.assert_array_equal(np.sign(vals), expect)
    assert lead in (1.0, -1.0)


def test_szego_product():
    assert productnd.szego_product(SQUARE) == pytest.approx(1.0)
    w = ProductWeight((AbsPower(0.0, 1.0), Constant(1.0)))
    assert productnd.szego_product(SQUARE, w) == pytest.approx(0.5, rel=1e-12)
    w2 = ProductWeight((AbsPower(0.0, 1.0), AbsPower(0.0, 1.0)))
    assert productnd.szego_product(SQUARE, w2) == pytest.approx(0.25, rel=1e-12)


def test_zero_szego_weight_is_rejected():
    w = ProductWeight((PiecewiseConstant((0.0,), (0.0, 1.0)), Constant(1.0)))
    with pytest.raises(SzegoError):
        productnd.product_orthogonal(SQUARE, w, (1, 1))
    with pytest.raises(SzegoError):
        productnd.product_chebyshev(SQUARE, w, (1, 1))


def test_widom_factors_on_the_square():
    assert productnd.widom_sup_nd(SQUARE, None, (2, 3)) == pytest.approx(4.0, rel=1e-9)
    assert productnd.widom_l2_nd(SQUARE, None, (2, 3)) ** 2 == pytest.approx(4.0, rel=1e-12)
    assert productnd.widom_sup_nd(SQUARE, None, (0, 4)) == pytest.approx(2.0, rel=1e-9)


def test_widom_factor_on_the_torus():
    K = ProductSet((UnitCircle(),) * 3)
    for alpha in [(0, 0, 0), (1, 2, 0), (4, 0, 1)]:
        assert productnd.widom_sup_nd(K, None, alpha) == pytest.approx(1.0, abs=1e-12)
        assert productnd.widom_l2_nd(K, None, alpha) == pytest.approx(1.0, abs=1e-12)


def test_l2_norm_of_explicit_polynomial():
    # x1 x2 on [-1,1]^2: int x^2 dmu = 1/2 in each variable
    P = SparsePolyND({(1, 1): 1.0})
    assert productnd.l2_norm_squared(P, SQUARE) == pytest.approx(0.25, rel=1e-13)
    P = SparsePolyND({(1, 0): 1.0, (0, 0): 1.0})
    assert productnd.l2_norm_squared(P, SQUARE) == pytest.approx(1.5, rel=1e-13)


# ---------------------------------------------------------------------------
# Jensen lower bound
# ---------------------------------------------------------------------------


def test_jensen_bound_examples():
    assert productnd.jensen_lower_bound(SparsePolyND({(0, 0): 3.0}), SQUARE) == pytest.approx(9.0)
    # x1: M = exp int log|x| dmu = 1/2, so the bound is 1/4 = ||x1||^2 / 2
    assert productnd.jensen_lower_bound(SparsePolyND({(1, 0): 1.0}), SQUARE) == pytest.approx(0.25, rel=1e-9)
    T = productnd.product_chebyshev(SQUARE, None, (2, 3)).poly
    assert productnd.jensen_lower_bound(T, SQUARE) == pytest.approx(2.0**-10, rel=1e-8)


def test_jensen_rejects_zero():
    with pytest.raises(ValueError):
        productnd.jensen_lower_bound(SparsePolyND({}), SQUARE)


@PROPS
@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 3))
def test_jensen_bound_below_l2_norm(seed, d1, d2):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d1 + 1, d2 + 1))
    P = SparsePolyND.from_dense(A)
    w = ProductWeight((AbsPower(0.3, 1.0), PiecewiseConstant((0.0,), (1.0, 2.0))))
    assert productnd.l2_norm_squared(P, SQUARE, w) >= productnd.jensen_lower_bound(P, SQUARE, w) - 1e-8


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------


# monic Chebyshev norms on [-1, 1] are 1 for degree 1 and 2^(1-n) for n >= 1
@pytest.mark.parametrize("alpha,expected", [((1, 0), 1.0), ((2, 1), 0.5), ((1, 1), 1.0), ((2, 2), 0.25),
                                            ((0, 0), 1.0)])
def test_bruteforce_minimax_on_the_square(alpha, expected):
    res = productnd.bruteforce_chebyshev_nd(SQUARE, None, alpha)
    assert res.norm == pytest.approx(expected, rel=1e-5)
    assert res.lower <= res.norm * (1 + 1e-12)


def test_bruteforce_matches_product_with_step_weight():
    w = ProductWeight((PiecewiseConstant((0.2,), (1.0, 2.0)), AbsPower(0.0, 1.0)))
    K = ProductSet((interval(-1, 1), interval(-2, 2)))
    for alpha in [(1, 1), (2, 1)]:
        res = productnd.bruteforce_chebyshev_nd(K, w, alpha)
        assert res.norm == pytest.approx(productnd.product_chebyshev(K, w, alpha).norm, rel=1e-4)


def test_bruteforce_scale_limits():
    with pytest.raises(ScaleError):
        productnd.bruteforce_chebyshev_nd(SQUARE, None, (4, 3))
    with pytest.raises(ScaleError):
        productnd.bruteforce_chebyshev_nd(ProductSet((interval(-1, 1),) * 4), None, (1, 0, 0, 0))


@pytest.mark.parametrize("K", [
    SQUARE,
    ProductSet((interval(-1, 1), Intervals(((-2.0, -1.0), (0.5, 2.0))))),
    ProductSet((UnitCircle(), interval(0.0, 3.0))),
])
def test_gram_schmidt_matches_product_norms(K):
    w = ProductWeight((Constant(1.0), Constant(1.0))) if not K.is_real else \
        ProductWeight((AbsPower(0.1, 1.0), PiecewiseConstant((1.0,), (1.0, 2.0))))
    gs = productnd.bruteforce_gram_schmidt_nd(K, w, 15)
    for i, g in enumerate(gs):
        alpha = productnd.order_index(i, 2)
        assert productnd.product_orthogonal(K, w, alpha).norm == pytest.approx(g, rel=1e-8)


# ---------------------------------------------------------------------------
# equality flags, reports, tau theorem
# ---------------------------------------------------------------------------


def test_equality_flags():
    assert productnd.equality_case_flags(SQUARE, (0, 3)) == ("zero", "inverse_image")
    assert productnd.equality_case_flags(ProductSet((PRE, PRE)), (2, 3)) == ("inverse_image", "none")
    assert productnd.equality_case_flags(ProductSet((UnitCircle(), PRE)), (1, 4)) == ("none", "inverse_image")
    # the same set given as plain intervals attains 2 but carries no construction
    plain = PRE.resolved
    assert productnd.equality_case_flags(ProductSet((plain,)), (2,)) == ("unknown",)


def test_doubling_bound_is_sharp_on_the_square():
    for alpha in productnd.multi_indices(2, 4)[1:]:
        r = productnd.widom_report(SQUARE, None, alpha)
        assert r.winf == pytest.approx(r.lower_bounds["doubling_sup"], rel=1e-8)
        assert r.w2**2 == pytest.approx(r.lower_bounds["doubling_l2"], rel=1e-10)
        assert r.violations() == []


def test_doubling_bound_is_strict_on_the_rectangle():
    r = productnd.widom_report(RECT, None, (0, 1))
    assert r.winf == pytest.approx(4.0, rel=1e-9)
    assert r.lower_bounds["doubling_sup"] == pytest.approx(4.0)
    r = productnd.widom_report(RECT, None, (1, 1))
    assert r.winf == pytest.approx(8.0, rel=1e-9)
    assert r.lower_bounds["doubling_sup"] == pytest.approx(8.0)
    r = productnd.widom_report(ProductSet((interval(-1, 1), interval(-1.5, 1.5))), None, (1, 1))
    assert r.winf > r.lower_bounds["doubling_sup"] * 0.999 and r.violations() == []


def test_report_rows_and_csv():
    reps = [productnd.widom_report(SQUARE, None, a) for a in productnd.multi_indices(2, 2)]
    text = productnd.reports_to_csv(reps)
    lines = text.strip().splitlines()
    assert lines[0].split(",") == productnd.REPORT_FIELDS
    assert len(lines) == 7
    assert reps[0].to_row()["Winf"] == 1.0


def test_theorem_tau_check():
    assert productnd.theorem_tau_check(SQUARE, (2, 3))
    assert productnd.theorem_tau_check(RECT, (3, 1))
    assert productnd.theorem_tau_check(modelsets.EuclideanBall2(), (2, 3))
    assert productnd.theorem_tau_check(modelsets.Polydisk(3), (1, 2, 1))


def test_weight_factor_count_must_match():
    with pytest.raises(ValueError):
        productnd.product_orthogonal(SQUARE, ProductWeight((Constant(1.0),)), (1, 1))
    with pytest.raises(ValueError):
        productnd.product_chebyshev(SQUARE, None, (1, 1, 1))
