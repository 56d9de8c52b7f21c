"""Univariate extremal polynomials: weighted Chebyshev and monic orthogonal.

Polynomials are :class:`numpy.polynomial.Polynomial` objects with ascending
coefficients.  On real sets the weighted Chebyshev problem is solved by a
single-point (Stiefel) exchange on a fine Chebyshev-clustered grid, followed
by continuous refinement of the error maxima; orthogonal polynomials come from
the discretized Stieltjes procedure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import chebyshev as C
from scipy import optimize

from . import sets1d
from .errors import NonPolarError, ResolutionError
from .sets1d import CompactSet1D, Circle, Constant, Weight1D

RealPolynomial = Polynomial

GRID_PER_INTERVAL = 2000
REFINE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class ChebyshevSolution:
    """Monic minimizer of the weighted sup-norm and its alternation data.

    ``extreme_points`` are strictly decreasing and ``signs`` holds the sign of
    ``w_hat * poly`` at each of them.
    """

    poly: Polynomial
    norm: float
    extreme_points: np.ndarray = field(default_factory=lambda: np.empty(0))
    signs: np.ndarray = field(default_factory=lambda: np.empty(0))
    lower_bound: float | None = None


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Monic orthogonal polynomials ``P_0..P_N`` of a measure.

    For real measures ``P_{k+1} = (x - b_k) P_k - a2_k P_{k-1}`` with
    ``a2_k = ||P_k||^2 / ||P_{k-1}||^2`` (``a2[0]`` is unused and set to 0).
    For measures on a circle ``b`` holds the diagonal of the Hessenberg
    recurrence instead.
    """

    b: np.ndarray
    a2: np.ndarray
    monic_norms: np.ndarray
    polys: tuple = ()

    @property
    def degree(self) -> int:
        return len(self.monic_norms) - 1


# ---------------------------------------------------------------------------
# Weighted Chebyshev polynomials
# ---------------------------------------------------------------------------


def chebyshev_grid(set: CompactSet1D, w: Weight1D | None = None,
                   per_interval: int = GRID_PER_INTERVAL) -> np.ndarray:
    """Chebyshev-clustered grid on each component plus the weight's singular points."""
    pts = []
    for a, b in set.components:
        t = np.cos(np.linspace(np.pi, 0.0, per_interval))
        x = 0.5 * (a + b) + 0.5 * (b - a) * t
        x[0], x[-1] = a, b
        pts.append(x)
    if w is not None:
        sing = np.asarray(sets1d.weight_singularities(w))
        if sing.size:
            pts.append(sing[set.contains(sing, tol=0.0)])
    return np.unique(np.concatenate(pts))


def _hull(set):
    comps = set.components
    lo, hi = comps[0][0], comps[-1][1]
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


def _basis(t, n):
    # columns T_0..T_n at t
    return C.chebvander(t, n)


def _exchange(V, f, wv, ref, max_iter=2000):
    """Discrete weighted minimax of ``f + V c`` by single-point exchange.

    Returns ``(c, h, ref)`` with ``|h|`` the levelled reference error.
    """
    n = V.shape[1]
    for _ in range(max_iter):
        sgn = (-1.0) ** np.arange(n + 1)
        A = np.empty((n + 1, n + 1))
        A[:, :n] = V[ref]
        A[:, n] = -sgn / wv[ref]
        sol = np.linalg.solve(A, -f[ref])
        c, h = sol[:n], sol[n]
        err = wv * (f + V @ c)
        k = int(np.argmax(np.abs(err)))
        if abs(err[k]) <= abs(h) * (1 + 1e-13):
            break
        new = _swap(ref, k, err)
        if np.array_equal(new, ref):
            break
        ref = new
    return c, abs(h), ref


def _swap(ref, k, err):
    """Single-point exchange keeping sign alternation."""
    ref = ref.copy()
    s = np.sign(err[k])
    pos = np.searchsorted(ref, k)
    if pos < ref.size and ref[pos] == k:
        return ref
    if pos == 0:
        if np.sign(err[ref[0]]) == s:
            ref[0] = k
        else:
            ref = np.concatenate([[k], ref[:-1]])
    elif pos == ref.size:
        if np.sign(err[ref[-1]]) == s:
            ref[-1] = k
        else:
            ref = np.concatenate([ref[1:], [k]])
    else:
        if np.sign(err[ref[pos - 1]]) == s:
            ref[pos - 1] = k
        else:
            ref[pos] = k
    return ref


def _local_max_refine(F, x, vals, breaks):
    """Polish interior local maxima of ``|F|`` sampled at ``x`` with values ``vals``."""
    found = []
    a = np.abs(vals)
    for i in range(1, x.size - 1):
        if a[i] >= a[i - 1] and a[i] >= a[i + 1]:
            lo, hi = x[i - 1], x[i + 1]
            if np.any((breaks > lo) & (breaks < hi)):
                continue
            res = optimize.minimize_scalar(lambda t: -abs(F(t)), bounds=(lo, hi),
                                           method="bounded", options={"xatol": 1e-14 * max(1.0, abs(x[i]))})
            found.append(float(res.x))
    return np.asarray(found)


def weighted_chebyshev(set: CompactSet1D, w: Weight1D | None, degree: int,
                       per_interval: int = GRID_PER_INTERVAL) -> ChebyshevSolution:
    """Monic degree-``degree`` minimizer of ``sup_K w_hat |P|``.

    Parameters
    ----------
    set : CompactSet1D
        A real set, or a circle with a constant weight.
    w : Weight1D or None
        The weight; it is replaced by its usc envelope.  ``None`` means 1.
    degree : int
        Degree ``n >= 0``.
    per_interval : int
        Grid points per component for the discrete exchange stage.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    w = Constant(1.0) if w is None else w
    if not set.is_real:
        return _circle_chebyshev(set, w, degree)
    wh = sets1d.usc_regularize(w, set)
    if degree == 0:
        top, arg = sets1d.weight_sup(w, set)
        if top <= 0:
            raise NonPolarError("the weight vanishes identically on the set")
        return ChebyshevSolution(Polynomial([1.0]), top, np.array([arg]), np.array([1.0]), top)

    x = chebyshev_grid(set, w, max(per_interval, 4 * degree))
    wv = wh(x)
    keep = wv > 0
    x, wv = x[keep], wv[keep]
    if x.size < degree + 1:
        raise NonPolarError("the weight is positive on too few points of the set")
    mid, half = _hull(set)
    breaks = np.asarray(sets1d.weight_singularities(w) + [e for ab in set.components for e in ab])
    n = degree
    ref = np.unique(np.round(np.linspace(0, x.size - 1, n + 1)).astype(int))
    c = None
    for _ in range(30):
        t = (x - mid) / half
        V = _basis(t, n)
        f, V = V[:, n], V[:, :n]
        c, h, ref_idx = _exchange(V, f, wv, ref)
        coef = np.append(c, 1.0)
        E = lambda s: float(wh(np.array([s]))[0] * C.chebval((s - mid) / half, coef))
        err = wv * C.chebval(t, coef)
        extra = _local_max_refine(E, x, err, breaks)
        if extra.size:
            ev = np.abs(wh(extra) * C.chebval((extra - mid) / half, coef))
            true = max(float(np.max(np.abs(err))), float(np.max(ev)))
        else:
            ev, true = np.empty(0), float(np.max(np.abs(err)))
        ref_pts = x[ref_idx]
        if true - h <= REFINE_RTOL * h or extra.size == 0:
            break
        new = extra[ev > h * (1 + 0.1 * REFINE_RTOL)]
        if new.size == 0:
            break
        x = np.concatenate([x, new])
        order = np.argsort(x)
        x = x[order]
        wv = wh(x)
        ref = np.searchsorted(x, ref_pts)
    scale = half**n / 2.0 ** (n - 1)
    P = Polynomial(C.cheb2poly(np.append(c, 1.0)))(Polynomial([-mid / half, 1.0 / half])) * scale
    pts = np.sort(x[ref_idx])[::-1]
    signs = np.sign(wh(pts) * P(pts))
    return ChebyshevSolution(P, scale * true, pts, signs, scale * h)


def _circle_chebyshev(set: Circle, w: Weight1D, degree: int) -> ChebyshevSolution:
    if not isinstance(w, Constant):
        raise ValueError("on circles only constant weights are supported")
    P = Polynomial([1.0 + 0j])
    for _ in range(degree):
        P = P * Polynomial([-set.center, 1.0])
    return ChebyshevSolution(P, w.value * set.radius**degree)


def bruteforce_chebyshev_1d(set: CompactSet1D, w: Weight1D | None, degree: int,
                            grid: int = 20001) -> float:
    """Minimax norm by linear programming on a dense uniform grid (test oracle)."""
    w = Constant(1.0) if w is None else w
    wh = sets1d.usc_regularize(w, set)
    if degree == 0:
        return sets1d.weight_sup(w, set)[0]
    total = sum(b - a for a, b in set.components)
    pts = [np.linspace(a, b, max(50, int(grid * (b - a) / total))) for a, b in set.components]
    sing = np.asarray(sets1d.weight_singularities(w))
    if sing.size:
        pts.append(sing[set.contains(sing, tol=0.0)])
    x = np.unique(np.concatenate(pts))
    wv = wh(x)
    mid, half = _hull(set)
    V = np.polynomial.legendre.legvander((x - mid) / half, degree)
    lead = np.polynomial.legendre.leg2poly(np.eye(degree + 1)[degree])[-1]
    f = V[:, degree] / lead
    A = V[:, :degree]
    # minimize t subject to -t <= w (f + A c) <= t
    nvar = degree + 1
    cobj = np.zeros(nvar)
    cobj[-1] = 1.0
    WA = wv[:, None] * A
    ones = np.ones((x.size, 1))
    A_ub = np.vstack([np.hstack([WA, -ones]), np.hstack([-WA, -ones])])
    b_ub = np.concatenate([-wv * f, wv * f])
    res = optimize.linprog(cobj, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * nvar, method="highs")
    if not res.success:
        raise RuntimeError(f"linear program failed: {res.message}")
    return float(res.x[-1] * half**degree)


# ---------------------------------------------------------------------------
# Orthogonal polynomials
# ---------------------------------------------------------------------------


def monic_orthogonal(set: CompactSet1D, w: Weight1D | None, max_degree: int,
                     n_nodes: int = sets1d.DEFAULT_NODES) -> OrthoBasis:
    """Monic orthogonal polynomials of ``w dmu_K`` up to ``max_degree``."""
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    if 2 * max_degree + 2 > 2 * n_nodes - 1:
        raise ResolutionError(
            f"{n_nodes} quadrature nodes cannot resolve degree {max_degree}; "
            f"need at least {max_degree + 2}")
    w = Constant(1.0) if w is None else w
    mu = sets1d.weighted_measure(set, w, n_nodes)
    if set.is_real:
        return _stieltjes(mu.nodes.real, mu.weights, max_degree)
    return _arnoldi(mu.nodes, mu.weights, max_degree)


def _stieltjes(x, q, N):
    b = np.zeros(N + 1)
    a2 = np.zeros(N + 1)
    nu = np.zeros(N + 1)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    P_prev, P = Polynomial([0.0]), Polynomial([1.0])
    polys = [P]
    for k in range(N + 1):
        nu[k] = float(q @ (p * p))
        if not nu[k] > 0:
            raise NonPolarError("the measure is supported on too few points")
        b[k] = float(q @ (x * p * p)) / nu[k]
        if k > 0:
            a2[k] = nu[k] / nu[k - 1]
        if k == N:
            break
        p_prev, p = p, (x - b[k]) * p - a2[k] * p_prev
        P_prev, P = P, Polynomial([-b[k], 1.0]) * P - a2[k] * P_prev
        polys.append(P)
    return OrthoBasis(b[:N], a2, np.sqrt(nu), tuple(polys))


def _arnoldi(z, q, N):
    basis = [np.ones_like(z, dtype=complex)]
    polys = [Polynomial([1.0 + 0j])]
    nu = [float(np.real(q @ np.abs(basis[0]) ** 2))]
    diag = []
    for k in range(N):
        v = z * basis[k]
        V = Polynomial([0.0, 1.0]) * polys[k]
        for j in range(k + 1):
            h = complex(q @ (v * np.conj(basis[j]))) / nu[j]
            if j == k:
                diag.append(h)
            v = v - h * basis[j]
            V = V - h * polys[j]
        basis.append(v)
        polys.append(V)
        nu.append(float(np.real(q @ np.abs(v) ** 2)))
    nu = np.asarray(nu)
    a2 = np.concatenate([[0.0], nu[1:] / nu[:-1]])
    return OrthoBasis(np.asarray(diag), a2, np.sqrt(nu), tuple(polys))


def gram_schmidt_1d(set: CompactSet1D, w: Weight1D | None, max_degree: int,
                    n_nodes: int = sets1d.DEFAULT_NODES) -> np.ndarray:
    """Monic orthogonal norms from a Cholesky factor of the moment matrix (oracle, degree <= 8)."""
    if max_degree > 8:
        raise ValueError("the Gram-Schmidt oracle is limited to degree 8")
    w = Constant(1.0) if w is None else w
    mu = sets1d.weighted_measure(set, w, n_nodes)
    if set.is_real:
        mid, half = _hull(set)
        t = (mu.nodes - mid) / half
    else:
        mid, half = set.center, set.radius
        t = (mu.nodes - mid) / half
    V = np.vander(t, max_degree + 1, increasing=True)
    G = (V.conj().T * mu.weights) @ V
    L = np.linalg.cholesky(G)
    return np.abs(np.diag(L)) * abs(half) ** np.arange(max_degree + 1)


# ---------------------------------------------------------------------------
# Widom factors
# ---------------------------------------------------------------------------


def widom_l2_1d(set: CompactSet1D, w: Weight1D | None, i: int, n_nodes: int = sets1d.DEFAULT_NODES) -> float:
    """``||P_i||_{L^2(w dmu_K)} / Cap(K)^i``."""
    basis = monic_orthogonal(set, w, i, n_nodes)
    return float(basis.monic_norms[i] / sets1d.capacity(set) ** i)


def widom_sup_1d(set: CompactSet1D, w: Weight1D | None, i: int) -> float:
    """``||w_hat T_{i,w}||_K / Cap(K)^i``."""
    return weighted_chebyshev(set, w, i).norm / sets1d.capacity(set) ** i
