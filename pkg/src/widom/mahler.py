"""Mahler measure relative to compact sets, coefficient bounds, integer floors.

For a univariate ``P`` of degree ``d`` with leading coefficient ``a_d`` and
roots ``c_j`` the Mahler measure relative to ``K`` is

    M(P) = exp(int log|P| dmu_K) = |a_d| exp(sum_j U(c_j)),

where ``U`` is the logarithmic potential of the equilibrium measure.  On a
product set the measure ``nu_K`` is the product of the factor equilibrium
measures, and ``M(P)`` is computed by integrating the exact univariate value
of ``P(., x')`` over the remaining variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as npoly

from . import sets1d
from .errors import ScaleError
from .productnd import ProductSet, SparsePolyND
from .sets1d import CompactSet1D


@dataclass(frozen=True)
class MahlerResult:
    value: float
    method: str
    certified_floor: float | None = None

    @property
    def log_value(self) -> float:
        return math.log(self.value) if self.value > 0 else -math.inf


def _coeffs(P) -> np.ndarray:
    if isinstance(P, Polynomial):
        c = np.asarray(P.coef)
    elif isinstance(P, SparsePolyND):
        if P.nvars != 1:
            raise ValueError("expected a polynomial in one variable")
        c = P.dense()
    else:
        c = np.asarray(P)
    c = np.trim_zeros(np.atleast_1d(c), "b")
    if c.size == 0:
        raise ValueError("the zero polynomial has no Mahler measure")
    return c


def max_modulus(K: CompactSet1D) -> float:
    """``max_{z in K} |z|``."""
    return float(K.max_abs())


CLUSTER_RADIUS = 1e-4
# roots of an exact k-fold factor scatter by about eps^(1/k); this catches k <= 9
_MULTIPLE_RADIUS = 2e-2


def roots(c: np.ndarray) -> np.ndarray:
    """Roots of ``sum c_k z^k`` from the (balanced) companion matrix.

    Companion eigenvalues of a ``k``-fold root scatter by about ``eps^(1/k)``,
    which matters next to the set, where the potential has a kink.  Two
    repairs are applied when roots come close together.  For real data the
    exact squarefree factorization of the (rational) float coefficients is
    computed first, so exact multiple roots come out as repeated roots.
    Remaining clusters closer than ``CLUSTER_RADIUS`` (relative) are
    recomputed from the polynomial re-expanded at the cluster centre in exact
    rational arithmetic and rescaled by the cluster radius.
    """
    if c.size <= 1:
        return np.empty(0, dtype=complex)
    r = np.roots(c[::-1]).astype(complex)
    if r.size < 2:
        return r
    if not np.iscomplexobj(c) and _clusters(r, _MULTIPLE_RADIUS):
        parts = _squarefree_exact(c)
        if any(m > 1 for _, m in parts):
            return np.concatenate([np.repeat(roots(f), m) for f, m in parts])
    for idx in _clusters(r, CLUSTER_RADIUS):
        r[idx] = _cluster_roots(c, r[idx])
    return r


# -- exact polynomial arithmetic over the rationals (coefficients low to high) --


def _q_trim(a: list) -> list:
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _q_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        t = a[i + len(b) - 1] / b[-1]
        q[i] = t
        for j, bj in enumerate(b):
            a[i + j] -= t * bj
    return q, _q_trim(a[: len(b) - 1])


def _q_monic(a: list) -> list:
    return [v / a[-1] for v in a]


def _q_gcd(a: list, b: list) -> list:
    a, b = _q_trim(a), _q_trim(b)
    while b:
        rem = _q_divmod(a, b)[1]
        a, b = b, (_q_monic(rem) if rem else [])
    return _q_monic(a)


def _q_deriv(a: list) -> list:
    return [k * v for k, v in enumerate(a)][1:]


def _q_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _q_trim([x - y for x, y in zip(a, b)])


def _squarefree_exact(c: np.ndarray) -> list[tuple[np.ndarray, int]]:
    """Yun's squarefree factorization ``P = lead * prod f_i^i`` of the exact float data."""
    f = _q_trim([Fraction(float(v)) for v in c])
    g = _q_gcd(f, _q_deriv(f))
    b = _q_divmod(f, g)[0]
    cc = _q_divmod(_q_deriv(f), g)[0]
    d = _q_sub(cc, _q_deriv(b))
    out, i = [], 1
    while len(b) > 1:
        a = _q_gcd(b, d) if d else _q_monic(b)
        if len(a) > 1:
            out.append((np.array([float(v) for v in a]), i))
        b = _q_divmod(b, a)[0]
        cc = _q_divmod(d, a)[0] if d else []
        d = _q_sub(cc, _q_deriv(b))
        i += 1
    return out


def _clusters(r: np.ndarray, radius: float) -> list[np.ndarray]:
    """Groups of at least two roots linked by distances below ``radius * (1 + |z|)``."""
    near = np.abs(r[:, None] - r[None, :]) <= radius * (1 + np.abs(r))[:, None]
    label = np.arange(r.size)
    for _ in range(r.size):
        new = np.array([label[near[i]].min() for i in range(r.size)])
        if np.array_equal(new, label):
            break
        label = new
    return [np.nonzero(label == g)[0] for g in np.unique(label) if np.sum(label == g) > 1]


def _taylor_shift_exact(c: np.ndarray, x0: complex) -> np.ndarray:
    """Coefficients of ``t -> P(x0 + t)``, computed exactly from the float data and rounded once."""
    F = Fraction
    a = [(F(float(np.real(v))), F(float(np.imag(v)))) for v in c]
    xr, xi = F(x0.real), F(x0.imag)
    out = []
    while a:
        # one synthetic division by (x - x0): the remainder is the next Taylor coefficient
        acc_r, acc_i = F(0), F(0)
        quot = []
        for vr, vi in reversed(a):
            acc_r, acc_i = acc_r * xr - acc_i * xi + vr, acc_r * xi + acc_i * xr + vi
            quot.append((acc_r, acc_i))
        out.append(complex(float(acc_r), float(acc_i)))
        a = quot[:-1][::-1]
    return np.asarray(out)


def _cluster_roots(c: np.ndarray, approx: np.ndarray) -> np.ndarray:
    k = approx.size
    x0 = complex(np.mean(approx))
    if not np.iscomplexobj(c):
        x0 = complex(x0.real, 0.0) if abs(x0.imag) <= CLUSTER_RADIUS * (1 + abs(x0)) else x0
    rho = max(float(np.max(np.abs(approx - x0))), 1e-12 * (1 + abs(x0)))
    b = _taylor_shift_exact(c, x0) * rho ** np.arange(c.size)
    s = np.roots(np.trim_zeros(b[::-1], "f"))
    s = s[np.argsort(np.abs(s))][:k]
    if s.size < k:
        return approx
    return x0 + rho * s


def _log_abs_horner(c):
    coeffs = [complex(v) if np.iscomplexobj(c) else float(v) for v in c[::-1]]

    def f(x):
        acc = 0.0
        for v in coeffs:
            acc = acc * x + v
        return math.log(max(abs(acc), 1e-300))

    return f


def log_mahler_1d(c, K: CompactSet1D) -> float:
    c = _coeffs(c)
    r = roots(c)
    lead = abs(c[-1])
    if r.size == 0:
        return math.log(lead)
    if K.is_real and not np.iscomplexobj(c):
        r = _polish_at_endpoints(c, r, K)
    return math.log(lead) + float(np.sum(sets1d.potential(K, r)))


def _polish_at_endpoints(c: np.ndarray, r: np.ndarray, K: CompactSet1D) -> np.ndarray:
    """One exact Newton step for real roots next to an endpoint of ``K``.

    The potential of a real set grows like ``sqrt(dist)`` at an endpoint, so a
    root one ulp outside shifts ``log M`` by about ``1e-8``.
    """
    ends = np.array([e for ab in K.components for e in ab])
    near = [i for i, z in enumerate(r)
            if z.imag == 0 and np.min(np.abs(ends - z.real)) <= 1e-6 * (1 + abs(z.real))]
    if not near:
        return r
    # Newton on the squarefree part, whose roots are all simple
    f = _q_trim([Fraction(float(v)) for v in c])
    f = _q_divmod(f, _q_gcd(f, _q_deriv(f)))[0]
    df = _q_deriv(f)
    for i in near:
        x = Fraction(float(r[i].real))
        p = sum(v * x**k for k, v in enumerate(f))
        dp = sum(v * x**k for k, v in enumerate(df))
        if dp != 0 and abs(p / dp) < 1e-6 * (1 + abs(x)):
            r[i] = float(x - p / dp)
    return r


def mahler_1d(P, K: CompactSet1D, method: str = "roots_potential") -> MahlerResult:
    """Mahler measure of a univariate polynomial relative to ``K``.

    ``method="roots_potential"`` uses ``|a_d| exp(sum U(c_j))`` with exact
    potentials; ``method="quadrature"`` integrates ``log|P|`` adaptively
    against the equilibrium measure with the real roots as breakpoints.
    """
    c = _coeffs(P)
    if method == "roots_potential":
        return MahlerResult(math.exp(log_mahler_1d(c, K)), method)
    if method == "quadrature":
        r = roots(c)
        if K.is_real:
            pts = [z.real for z in r if abs(z.imag) < 1e-9 * (1 + abs(z))]
        else:
            pts = list(r)
        f = _log_abs_horner(c)
        return MahlerResult(math.exp(sets1d.integrate(K, f, pts)), method)
    raise ValueError(f"unknown method {method!r}")


def coeff_bound_1d(P, K: CompactSet1D, k: int, tol: float = 1e-9,
                   M: float | None = None) -> tuple[float, bool]:
    """``binom(d, k) M(P) max|K|^(d-k) / Cap(K)^d`` and whether ``|a_k|`` respects it.

    Pass ``M`` to reuse a Mahler measure computed once for several ``k``.
    """
    c = _coeffs(P)
    d = c.size - 1
    if not 0 <= k <= d:
        raise ValueError(f"coefficient index {k} outside 0..{d}")
    if M is None:
        M = math.exp(log_mahler_1d(c, K))
    bound = comb(d, k) * M * max_modulus(K) ** (d - k) / sets1d.capacity(K) ** d
    return bound, bool(abs(c[k]) <= bound + tol)


# ---------------------------------------------------------------------------
# Several variables
# ---------------------------------------------------------------------------


def _slice(A: np.ndarray, x) -> np.ndarray:
    """Coefficients of ``P(., ..., ., x)``: contract the last axis with powers of ``x``."""
    return A @ (x ** np.arange(A.shape[-1]))


def _breakpoints(A: np.ndarray, K1: CompactSet1D, K2: CompactSet1D) -> list[float]:
    """Points of the real factor ``K2`` where ``x2 -> log M(P(., x2))`` may fail to be smooth.

    Candidates are the real zeros in ``K2`` of the leading and constant
    coefficients, of ``P(e, x2)`` for each endpoint ``e`` of ``K1``, and of the
    discriminant ``Res_{x1}(P, dP/dx1)``, computed by interpolation.
    """
    if not K2.is_real:
        return []
    m1, m2 = A.shape[0] - 1, A.shape[1] - 1
    if m2 == 0:
        return []
    polys = [A[i] for i in range(m1 + 1) if np.any(A[i])]
    if K1.is_real:
        for e in {e for ab in K1.components for e in ab}:
            polys.append((e ** np.arange(m1 + 1)) @ A)
    lo, hi = K2.components[0][0], K2.components[-1][1]
    if m1 == 2:
        polys.append(npoly.polysub(npoly.polymul(A[1], A[1]), 4 * npoly.polymul(A[2], A[0])))
    interpolated = []
    if m1 > 2:
        deg = (2 * m1 - 1) * m2
        t = np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
        xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        vals = np.array([_resultant(np.trim_zeros(_slice(A, x), "b")) for x in xs])
        if np.any(vals):
            ser = C.chebfit(t, vals / np.max(np.abs(vals)), deg)
            for r in C.chebroots(ser) if np.any(ser[1:]) else []:
                if abs(r.imag) < 1e-7 and -1 <= r.real <= 1:
                    interpolated.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * r.real)
    exact = []
    for p in polys:
        p = np.trim_zeros(np.asarray(p, dtype=complex), "b")
        if p.size < 2:
            continue
        for r in roots(p):
            if abs(r.imag) < 1e-9 * (1 + abs(r)) and K2.contains(np.array([r.real]), tol=1e-12)[0]:
                exact.append(float(r.real))
    # merge clusters, preferring roots of exactly known polynomials
    merged: list[float] = []
    for x in sorted(exact) + interpolated:
        if all(abs(x - y) > 1e-8 * (hi - lo) for y in merged):
            merged.append(x)
    return sorted(merged)


def _resultant(c) -> float:
    """``Res(p, p')`` for ``p = sum c_k x^k`` via the Sylvester matrix."""
    if len(c) < 3:
        return 0.0
    p = np.asarray(c)[::-1]
    q = np.polyder(p)
    m, n = p.size - 1, q.size - 1
    S = np.zeros((m + n, m + n), dtype=p.dtype)
    for i in range(n):
        S[i, i:i + m + 1] = p
    for i in range(m):
        S[n + i, i:i + n + 1] = q
    return float(np.real(np.linalg.det(S)))


def _log_mahler_rec(A: np.ndarray, factors: Sequence[CompactSet1D]) -> float:
    if not np.any(A):
        # a slice through a zero hypersurface of P; hit only at isolated nodes
        return math.log(1e-300)
    if len(factors) == 1:
        return log_mahler_1d(A, factors[0])
    Kn = factors[-1]
    inner = factors[:-1]
    # drop trailing zero slices in the last variable
    while A.shape[-1] > 1 and not np.any(A[..., -1]):
        A = A[..., :-1]
    if A.shape[-1] == 1:
        return _log_mahler_rec(A[..., 0], inner)
    A, common = _split_last_content(A)
    if common.size:
        return float(np.sum(sets1d.potential(Kn, common))) + _log_mahler_rec(A, factors)
    pts = []
    if len(factors) == 2:
        pts = _breakpoints(A, inner[0], Kn)
        fast = _log_mahler_2d_tanh_sinh(A, inner[0], Kn, pts)
        if fast is not None:
            return fast
    f = lambda x: _log_mahler_rec(_slice(A, x), inner)
    return sets1d.integrate(Kn, f, pts)


_VECTOR_MODELS = (sets1d._Arcsine, sets1d._CircleModel, sets1d._Pullback, sets1d._MultiInterval)


def _log_mahler_slices(A: np.ndarray, xs: np.ndarray, K1: CompactSet1D) -> np.ndarray:
    """``log M_{K1}(P(., x))`` for every ``x`` in ``xs``, with batched companion eigenvalues."""
    C = A @ (xs[None, :] ** np.arange(A.shape[1])[:, None])
    m = C.shape[0] - 1
    if m == 0:
        with np.errstate(divide="ignore"):
            return np.maximum(np.log(np.abs(C[0])), math.log(1e-300))
    lead = C[-1]
    ok = np.abs(lead) > 1e-13 * np.max(np.abs(C), axis=0)
    out = np.empty(xs.size)
    if np.any(ok):
        Cn = C[:, ok] / lead[ok]
        comp = np.zeros((Cn.shape[1], m, m), dtype=Cn.dtype)
        comp[:, 0, :] = -Cn[m - 1::-1].T
        comp[:, np.arange(1, m), np.arange(m - 1)] = 1.0
        r = np.linalg.eigvals(comp) if m > 1 else comp[:, :, 0]
        U = np.asarray(sets1d.potential(K1, r.ravel())).reshape(r.shape)
        out[ok] = np.log(np.abs(lead[ok])) + U.sum(axis=1)
    for i in np.nonzero(~ok)[0]:
        c = np.trim_zeros(C[:, i], "b")
        out[i] = log_mahler_1d(c, K1) if c.size else math.log(1e-300)
    return out


def _log_mahler_2d_tanh_sinh(A, K1, K2, pts, tol: float = 1e-11):
    """Outer integral over a real ``K2`` by composite tanh-sinh in the angle
    variable of its equilibrium measure, split at the breakpoints.  The step
    is halved until two successive values agree; ``None`` means the fast route
    does not apply or did not settle, and the caller falls back to adaptive
    quadrature."""
    outer = sets1d._model(K2)
    if not hasattr(outer, "angle_nodes") or not isinstance(sets1d._model(K1), _VECTOR_MODELS):
        return None
    if not K1.is_real:
        # roots crossing a circle are not among the breakpoints
        return None
    while A.shape[0] > 1 and not np.any(A[-1]):
        A = A[:-1]
    edges = np.unique(np.concatenate([[0.0, math.pi], outer.angles(pts)]))
    edges = edges[np.concatenate([[True], np.diff(edges) > 1e-15])]
    lo, hi = edges[:-1], edges[1:]
    prev = None
    for h in (1 / 8, 1 / 16, 1 / 32, 1 / 64):
        x, w = _tanh_sinh(h)
        c, r = 0.5 * (hi + lo), 0.5 * (hi - lo)
        t = (c[:, None] + r[:, None] * x).ravel()
        X, W = outer.angle_nodes(t)
        W = W * (r[:, None] * w).ravel()[:, None]
        val = float(W.ravel() @ _log_mahler_slices(A, X.ravel(), K1))
        if prev is not None and abs(val - prev) <= tol * (1 + abs(val)):
            return val
        prev = val
    return None


def _split_last_content(A: np.ndarray, tol: float = 1e-10):
    """Divide out the common roots ``r`` of all slices ``A[..., :]`` seen as polynomials
    in the last variable, so that ``P = prod (x_n - r) Q``.  Returns ``Q`` and the roots."""
    rows = A.reshape(-1, A.shape[-1])
    rows = rows[np.any(rows != 0, axis=1)]
    degs = [np.max(np.nonzero(r)[0]) for r in rows]
    pivot = rows[int(np.argmin(degs))]
    found = []
    for r in roots(np.trim_zeros(pivot, "b")):
        powers = np.abs(r) ** np.arange(A.shape[-1])
        vals = np.abs(rows @ (r ** np.arange(A.shape[-1])))
        if np.all(vals <= tol * (np.abs(rows) @ powers)):
            found.append(r)
    if not found:
        return A, np.empty(0)
    cplx = np.iscomplexobj(A) or any(abs(np.imag(r)) > 0 for r in found)
    Q = A.astype(complex) if cplx else A.astype(float)
    for r in found:
        if np.isreal(r):
            r = float(np.real(r))
        # synthetic division along the last axis
        out = np.zeros(Q.shape[:-1] + (Q.shape[-1] - 1,), dtype=Q.dtype)
        carry = np.zeros(Q.shape[:-1], dtype=Q.dtype)
        for k in range(Q.shape[-1] - 1, 0, -1):
            carry = Q[..., k] + r * carry
            out[..., k - 1] = carry
        Q = out
    return Q, np.asarray(found)


def _log_abs_quad(A: np.ndarray, factors) -> float:
    K1, K2 = factors

    def inner(x2):
        c = np.trim_zeros(_slice(A, x2), "b")
        if c.size == 0:
            return -700.0
        r = roots(c)
        pts = [z.real for z in r if abs(z.imag) < 1e-9 * (1 + abs(z))] if K1.is_real else list(r)
        return sets1d.integrate(K1, _log_abs_horner(c), pts)

    return sets1d.integrate(K2, inner, _breakpoints(A, K1, K2))


def mahler_nd(P: SparsePolyND, K: ProductSet, method: str = "recursive") -> MahlerResult:
    """Mahler measure of ``P`` relative to a product set.

    ``method="recursive"`` integrates the exact univariate Mahler measure of
    ``P(., x_2, ..., x_n)`` over the remaining factors; ``method="quadrature"``
    integrates ``log|P|`` by nested adaptive quadrature (two variables only).
    """
    if P.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    if P.nvars != K.n:
        raise ValueError("polynomial and set have different numbers of variables")
    A = P.dense()
    if method == "recursive":
        return MahlerResult(math.exp(_log_mahler_rec(A, K.factors)), method)
    if method == "quadrature":
        if K.n == 1:
            return mahler_1d(A, K.factors[0], "quadrature")
        if K.n != 2:
            raise ScaleError("quadrature Mahler measure is limited to two variables")
        return MahlerResult(math.exp(_log_abs_quad(A, K.factors)), method)
    raise ValueError(f"unknown method {method!r}")


def coeff_bound_nd(P: SparsePolyND, K: ProductSet, k: Sequence[int], tol: float = 1e-9,
                   M: float | None = None) -> tuple[float, bool]:
    """``M(P) prod_N binom(m_N, k_N) max|K_N|^(m_N - k_N) / Cap(K_N)^m_N`` and the check.

    Pass ``M`` to reuse a Mahler measure computed once for several ``k``.
    """
    k = tuple(int(v) for v in k)
    m = P.degrees
    if len(k) != len(m) or any(not 0 <= a <= b for a, b in zip(k, m)):
        raise ValueError(f"multi-index {k} is not below the degrees {m}")
    if M is None:
        M = mahler_nd(P, K).value
    bound = M * math.prod(comb(mN, kN) * max_modulus(KN) ** (mN - kN) / sets1d.capacity(KN) ** mN
                          for mN, kN, KN in zip(m, k, K.factors))
    a_k = abs(P.terms.get(k, 0.0))
    return bound, bool(a_k <= bound + tol)


def frostman_floor(P, K: CompactSet1D) -> float:
    """``|a_d| Cap(K)^d``, a lower bound for the Mahler measure."""
    c = _coeffs(P)
    return abs(c[-1]) * sets1d.capacity(K) ** (c.size - 1)


# ---------------------------------------------------------------------------
# Exhaustive integer sweep
# ---------------------------------------------------------------------------


def _tanh_sinh(h: float, tmax: float = 3.0):
    s = np.arange(-tmax, tmax + 1e-12, h)
    u = 0.5 * np.pi * np.sinh(s)
    x = np.tanh(u)
    w = h * 0.5 * np.pi * np.cosh(s) / np.cosh(u) ** 2
    return x, w


def _green_H(z):
    """``U(z) - log|z|`` for the arcsine measure of ``[-1, 1]`` (``|z| >= 1``)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sqrt(1 - 1 / (z * z))
    # choose the branch with |1 + s| >= 1
    s = np.where(np.abs(1 + s) < np.abs(1 - s), -s, s)
    return np.log(np.abs(1 + s) / 2)


def _U(z):
    z = np.asarray(z, dtype=complex)
    s = np.sqrt(z - 1) * np.sqrt(z + 1)
    return np.log(np.maximum(np.abs(z + s), np.abs(z - s)) / 2)


def _U_or_H(r):
    """``(log|r| if |r| > 1 else 0, U(r) - that)``: split for stable products."""
    big = np.abs(r) > 1
    rs = np.where(big, 1.0, r)
    rb = np.where(big, r, 2.0)
    part = np.where(big, _green_H(rb), _U(rs))
    return big, part


def _inner_quadratic(A, B, Cc):
    """``int log|A t^2 + B t + C| dmu_[-1,1](t)`` for arrays of real coefficients."""
    out = np.full(A.shape, -np.inf)
    two = A != 0
    one = (~two) & (B != 0)
    zero = (~two) & (~one) & (Cc != 0)
    out[zero] = np.log(np.abs(Cc[zero]))
    if np.any(one):
        b, c = B[one], Cc[one]
        r = -c / b
        big, part = _U_or_H(r)
        out[one] = np.where(big, np.log(np.abs(c)), np.log(np.abs(b))) + part
    if np.any(two):
        a, b, c = A[two], B[two], Cc[two]
        D = b * b - 4 * a * c
        sq = np.sqrt(np.abs(D))
        real = D >= 0
        sgn = np.where(b >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * sq)
        # real roots: q / a and c / q
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(real, q / a, (-b + 1j * sq) / (2 * a))
            r2 = np.where(real, np.where(q != 0, c / np.where(q != 0, q, 1.0), 0.0), (-b - 1j * sq) / (2 * a))
        big1, p1 = _U_or_H(r1)
        big2, p2 = _U_or_H(r2)
        # log|a| + sum_{big} log|r| evaluated stably
        la = np.log(np.abs(a))
        both = big1 & big2
        only1 = big1 & ~big2
        only2 = big2 & ~big1
        lead = la.copy()
        lead = np.where(both, np.log(np.abs(c)), lead)
        with np.errstate(divide="ignore"):
            lead = np.where(only1, np.log(np.abs(a * r1)), lead)
            lead = np.where(only2, np.log(np.abs(a * r2)), lead)
        out[two] = lead + p1 + p2
    return out


def _quadratic_breaks(P):
    """Real zeros in ``(-1, 1)`` of the leading, middle and constant coefficients, the
    discriminant, and ``P(+-1, t)``, as ``arccos`` angles, for a batch ``(N, 3, 3)``."""
    A, B, Cc = P[:, 2, :], P[:, 1, :], P[:, 0, :]
    # discriminant as a quartic in t: coefficients by polynomial products
    def mul(p, q):
        out = np.zeros((p.shape[0], 5))
        for i in range(3):
            for j in range(3):
                out[:, i + j] += p[:, i] * q[:, j]
        return out
    D = mul(B, B) - 4 * mul(A, Cc)
    cands = [A, B, Cc, A + B + Cc, A - B + Cc]
    angles = []
    for p in cands:
        angles.append(_real_roots_angles(np.pad(p, ((0, 0), (0, 2)))))
    angles.append(_real_roots_angles(D))
    return np.concatenate(angles, axis=1)


def _real_roots_angles(p):
    """``arccos`` of real roots in ``(-1, 1)`` of quartics ``p`` (ascending), NaN padded."""
    N = p.shape[0]
    out = np.full((N, 4), np.nan)
    # trim leading zeros per row by degree classes
    deg = np.full(N, -1)
    for k in range(5):
        deg = np.where(p[:, k] != 0, k, deg)
    for d in range(1, 5):
        rows = np.nonzero(deg == d)[0]
        if rows.size == 0:
            continue
        c = p[rows, :d + 1]
        comp = np.zeros((rows.size, d, d))
        if d > 1:
            comp[:, 1:, :-1] = np.eye(d - 1)
        comp[:, :, -1] = -c[:, :d] / c[:, d:d + 1]
        ev = np.linalg.eigvals(comp)
        ok = (np.abs(ev.imag) < 1e-9) & (np.abs(ev.real) < 1)
        ang = np.where(ok, np.arccos(np.clip(ev.real, -1, 1)), np.nan)
        out[rows, :d] = ang
    return out


def _log_mahler_quadratic_batch(P, h: float) -> np.ndarray:
    """``log M`` on ``[-1, 1]^2`` of a batch of biquadratics ``P[n, i, j]`` (coefficient of ``t1^i t2^j``)."""
    N = P.shape[0]
    br = _quadratic_breaks(P)
    br = np.where(np.isnan(br), np.pi, br)
    edges = np.sort(np.concatenate([np.zeros((N, 1)), br, np.full((N, 1), np.pi)], axis=1), axis=1)
    x, w = _tanh_sinh(h)
    lo, hi = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (hi - lo)
    theta = (0.5 * (hi + lo))[..., None] + half[..., None] * x          # (N, S, m)
    wt = half[..., None] * w / np.pi
    t2 = np.cos(theta)
    powers = np.stack([np.ones_like(t2), t2, t2 * t2], axis=-1)          # (N, S, m, 3)
    coef = np.einsum("nij,nsmj->nsmi", P, powers)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = _inner_quadratic(coef[..., 2], coef[..., 1], coef[..., 0])
    f = np.where(np.isfinite(f), f, -745.0)
    return np.sum(f * wt, axis=(1, 2))


def _canonical_integer_polys(m: tuple[int, int], R: int, square: bool):
    """Integer coefficient arrays up to the symmetries ``P -> -P``, ``t_j -> -t_j`` and
    (when both factors coincide) swapping variables.  Returns representatives
    and orbit sizes."""
    shape = (m[0] + 1, m[1] + 1)
    k = shape[0] * shape[1]
    base = 2 * R + 1
    vals = np.arange(-R, R + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([vals] * k), indexing="ij"), axis=-1).reshape(-1, *shape)
    grid = grid[np.any(grid != 0, axis=(1, 2))]
    i = np.arange(shape[0])[:, None]
    j = np.arange(shape[1])[None, :]
    weights = base ** np.arange(k, dtype=np.int64).reshape(shape)

    def code(G):
        return np.sum((G + R) * weights, axis=(1, 2))

    codes = []
    for s0 in (1, -1):
        for s1 in (1, -1):
            for s2 in (1, -1):
                T = s0 * grid * (s1 ** i) * (s2 ** j)
                codes.append(code(T))
                if square:
                    codes.append(code(np.swapaxes(T, 1, 2)))
    codes = np.stack(codes, axis=1)
    own = codes[:, 0]
    rep = own == codes.min(axis=1)
    orbit = np.array([np.unique(row).size for row in codes[rep]])
    return grid[rep], orbit


def _poly_gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    """Monic gcd over the rationals of two ascending coefficient lists."""
    def trim(c):
        while c and c[-1] == 0:
            c = c[:-1]
        return c

    p, q = trim(p), trim(q)
    while q:
        r = list(p)
        while len(r) >= len(q) and r:
            f = r[-1] / q[-1]
            shift = len(r) - len(q)
            for k, v in enumerate(q):
                r[shift + k] -= f * v
            r = trim(r[:-1])
        p, q = q, r
    return [v / p[-1] for v in p] if p else p


def _split_x2_content(reps: np.ndarray, K2: CompactSet1D):
    """Write each ``P = g(x2) Q`` with ``g`` the gcd of the rows of ``P``.

    Returns the cofactors ``Q`` (as floats) and ``log M_{K2}(g)``.
    """
    cof = reps.astype(float)
    logc = np.zeros(reps.shape[0])
    for n, r in enumerate(reps):
        rows = [[Fraction(int(v)) for v in row] for row in r if np.any(row)]
        g = rows[0]
        for row in rows[1:]:
            g = _poly_gcd(g, row)
            if len(g) == 1:
                break
        else:
            g = _poly_gcd(g, g)
        if len(g) <= 1:
            continue
        for i, row in enumerate(r):
            quot = np.zeros(r.shape[1])
            rem = [Fraction(int(v)) for v in row]
            for k in range(len(rem) - len(g), -1, -1):
                f = rem[k + len(g) - 1] / g[-1]
                quot[k] = float(f)
                for j, v in enumerate(g):
                    rem[k + j] -= f * v
            cof[n, i] = quot
        logc[n] = log_mahler_1d(np.array([float(v) for v in g]), K2)
    return cof, logc


@dataclass(frozen=True)
class IntegerFloorReport:
    count: int
    evaluated: int
    min_ratio: float
    min_mahler: float
    witness: tuple
    violations: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def integer_floor_check(K: ProductSet, degree_caps: Sequence[int] = (2, 2), coeff_range: int = 2,
                        tol: float = 1e-7, chunk: int = 4000) -> IntegerFloorReport:
    """Check ``M(P) >= prod_N min(1, Cap(K_N)^{m_N(P)})`` for every nonzero integer polynomial.

    Covers all ``P`` with per-variable degrees at most ``degree_caps`` and
    coefficients in ``[-coeff_range, coeff_range]``, using each polynomial's
    own degrees in the floor.  Desk scale only: at most two variables, degree
    caps at most 2, coefficient range at most 2, and every factor a single
    real interval.
    """
    caps = tuple(int(m) for m in degree_caps)
    if K.n > 2 or len(caps) != K.n or max(caps) > 2 or coeff_range > 2 or coeff_range < 1:
        raise ScaleError("the integer sweep is limited to n <= 2, degrees <= 2, |coefficients| <= 2")
    if any(not f.is_real or len(f.components) != 1 for f in K.factors):
        raise ScaleError("the integer sweep needs single-interval factors")
    if K.n == 1:
        K = ProductSet((K.factors[0], sets1d.interval(-1.0, 1.0)))
        caps = (caps[0], 0)
    ivs = [f.components[0] for f in K.factors]
    caps_val = [sets1d.capacity(f) for f in K.factors]
    square = caps[0] == caps[1] and ivs[0] == ivs[1]
    reps, orbit = _canonical_integer_polys(caps, coeff_range, square)
    # rewrite in the normalized variables x_j = mid_j + half_j t_j
    S = []
    for (a, b), m in zip(ivs, caps):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        T = np.zeros((m + 1, m + 1))
        for p in range(m + 1):
            for q in range(p + 1):
                T[p, q] = comb(p, q) * mid ** (p - q) * half**q
        S.append(T)
    # split off factors depending on x2 alone: they make log|P| singular along
    # whole lines and are measured exactly in one variable instead
    cofactor, log_content = _split_x2_content(reps, K.factors[1])
    Pt = np.einsum("npq,pi,qj->nij", cofactor, S[0], S[1])
    full = np.zeros((Pt.shape[0], 3, 3))
    full[:, :caps[0] + 1, :caps[1] + 1] = Pt
    logM = np.empty(full.shape[0])
    for s in range(0, full.shape[0], chunk):
        logM[s:s + chunk] = _log_mahler_quadratic_batch(full[s:s + chunk], 0.25)
    logM += log_content
    deg1 = np.array([max((i for i in range(caps[0] + 1) if np.any(r[i, :])), default=0) for r in reps])
    deg2 = np.array([max((j for j in range(caps[1] + 1) if np.any(r[:, j])), default=0) for r in reps])
    log_floor = np.minimum(0.0, deg1 * math.log(caps_val[0])) + np.minimum(0.0, deg2 * math.log(caps_val[1]))
    ratio = logM - log_floor
    # refine the near-critical cases with a finer rule
    close = np.nonzero(ratio < 0.05)[0]
    if close.size:
        for s in range(0, close.size, chunk // 4):
            idx = close[s:s + chunk // 4]
            logM[idx] = _log_mahler_quadratic_batch(full[idx], 1.0 / 12) + log_content[idx]
        ratio = logM - log_floor
    k = int(np.argmin(ratio))
    floor = np.exp(log_floor)
    viol = int(np.sum(orbit[np.exp(logM) < floor - tol]))
    witness = tuple(tuple(int(v) for v in row) for row in reps[k])
    return IntegerFloorReport(int(orbit.sum()), int(reps.shape[0]), float(np.exp(ratio[k])),
                              float(np.exp(logM.min())), witness, viol, tol)
