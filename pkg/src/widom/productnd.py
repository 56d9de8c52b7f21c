"""Product sets in several variables and their factorized extremal polynomials.

Multi-indices are tuples of non-negative integers.  Monomials are ordered by
total degree, and within one degree by *descending* lexicographic order, so
in two variables the order starts ``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)``.

On a product set ``K = K_1 x ... x K_n`` with a product weight the monic
orthogonal and weighted Chebyshev polynomials for ``z^alpha`` are tensor
products of univariate ones, and the norms factor.  The module computes these
together with Widom factors, the Szego quantity, the Jensen lower bound, and
brute-force oracles that do not assume the factorization.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import reduce
from math import comb
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import chebyshev as C
from scipy import optimize

from . import extremal1d, sets1d
from .errors import ScaleError, SzegoError
from .sets1d import CompactSet1D, Constant, PolynomialPreimage, Weight1D

MultiIndex = tuple


# ---------------------------------------------------------------------------
# Monomial order
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int) -> int:
    # number of ways to write ``total`` as an ordered sum of ``parts`` non-negative integers
    if parts == 0:
        return 1 if total == 0 else 0
    return comb(total + parts - 1, parts - 1)


def order_rank(alpha: Sequence[int]) -> int:
    """Position of ``alpha`` in the graded, descending-lexicographic order."""
    alpha = tuple(int(a) for a in alpha)
    if not alpha or min(alpha) < 0:
        raise ValueError(f"invalid multi-index {alpha}")
    n, d = len(alpha), sum(alpha)
    rank = comb(d - 1 + n, n) if d > 0 else 0
    rem = d
    for j in range(n - 1):
        for v in range(alpha[j] + 1, rem + 1):
            rank += _compositions(rem - v, n - j - 1)
        rem -= alpha[j]
    return rank


def order_index(i: int, n: int) -> MultiIndex:
    """Inverse of :func:`order_rank`."""
    if i < 0 or n < 1:
        raise ValueError("need i >= 0 and n >= 1")
    d = 0
    while comb(d + n, n) <= i:
        d += 1
    pos = i - (comb(d - 1 + n, n) if d > 0 else 0)
    alpha, rem = [], d
    for j in range(n - 1):
        for v in range(rem, -1, -1):
            block = _compositions(rem - v, n - j - 1)
            if pos < block:
                alpha.append(v)
                rem -= v
                break
            pos -= block
    alpha.append(rem)
    return tuple(alpha)


def multi_indices(n: int, max_total: int) -> list[MultiIndex]:
    """All multi-indices of total degree ``<= max_total`` in order."""
    return [order_index(i, n) for i in range(comb(max_total + n, n))]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SparsePolyND:
    """``sum c_alpha z^alpha`` stored as ``{alpha: c_alpha}`` with no zero entries."""

    terms: dict

    def __post_init__(self):
        clean = {}
        n = None
        for a, c in self.terms.items():
            a = tuple(int(v) for v in a)
            if n is None:
                n = len(a)
            elif len(a) != n:
                raise ValueError("all multi-indices must have the same length")
            if c != 0:
                clean[a] = clean.get(a, 0) + c
        object.__setattr__(self, "terms", {a: c for a, c in clean.items() if c != 0})
        object.__setattr__(self, "_nvars", n or 1)

    @property
    def nvars(self) -> int:
        return self._nvars

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading(self) -> MultiIndex:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        return max(self.terms, key=order_rank)

    @property
    def degrees(self) -> tuple[int, ...]:
        """Degree in each variable separately."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(a[j] for a in self.terms) for j in range(self.nvars))

    @property
    def total_degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def dense(self) -> np.ndarray:
        """Coefficient array ``A`` with ``A[alpha] = c_alpha``."""
        shape = tuple(d + 1 for d in self.degrees)
        cplx = any(isinstance(c, complex) or np.iscomplexobj(c) for c in self.terms.values())
        A = np.zeros(shape, dtype=complex if cplx else float)
        for a, c in self.terms.items():
            A[a] = c
        return A

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points)
        if pts.shape[-1] != self.nvars:
            raise ValueError("points must have the polynomial's number of variables last")
        out = np.zeros(pts.shape[:-1], dtype=complex if np.iscomplexobj(pts) else float)
        for a, c in self.terms.items():
            term = np.full(pts.shape[:-1], c, dtype=out.dtype if not isinstance(c, complex) else complex)
            for j, e in enumerate(a):
                if e:
                    term = term * pts[..., j] ** e
            out = out + term
        return out

    def __mul__(self, other: "SparsePolyND") -> "SparsePolyND":
        out: dict = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + c * d
        return SparsePolyND(out)

    @classmethod
    def tensor(cls, factors: Sequence[Polynomial]) -> "SparsePolyND":
        """``prod_j p_j(z_j)`` for univariate polynomials ``p_j``."""
        terms = {(): 1.0}
        for p in factors:
            coef = np.asarray(p.coef)
            new = {}
            for a, c in terms.items():
                for k, v in enumerate(coef):
                    if v != 0:
                        new[a + (k,)] = c * (v.item() if hasattr(v, "item") else v)
            terms = new
        return cls(terms)

    @classmethod
    def from_dense(cls, A) -> "SparsePolyND":
        A = np.asarray(A)
        return cls({tuple(int(i) for i in idx): A[idx].item() for idx in zip(*np.nonzero(A))})


# ---------------------------------------------------------------------------
# Product sets and weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductSet:
    factors: tuple[CompactSet1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a product set needs at least one factor")

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def is_real(self) -> bool:
        return all(f.is_real for f in self.factors)


@dataclass(frozen=True)
class ProductWeight:
    factors: tuple[Weight1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @classmethod
    def ones(cls, n: int) -> "ProductWeight":
        return cls((Constant(1.0),) * n)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points)
        out = np.ones(pts.shape[:-1])
        for j, w in enumerate(self.factors):
            out = out * w(pts[..., j])
        return out

    def is_unit(self) -> bool:
        return all(isinstance(w, Constant) and w.value == 1.0 for w in self.factors)


def _weights(K: ProductSet, w: ProductWeight | None) -> ProductWeight:
    if w is None:
        return ProductWeight.ones(K.n)
    if len(w.factors) != K.n:
        raise ValueError("weight and set have different numbers of factors")
    return w


def _alpha(alpha, n) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n or min(alpha) < 0:
        raise ValueError(f"multi-index {alpha} does not fit {n} variables")
    return alpha


def tau_minus_product(K: ProductSet) -> float:
    """``min_j Cap(K_j)``."""
    return min(sets1d.capacity(f) for f in K.factors)


def szego_product(K: ProductSet, w: ProductWeight | None = None) -> float:
    """``prod_j S(K_j, w_j)``."""
    w = _weights(K, w)
    return math.exp(sum(sets1d.log_szego(k, wj) for k, wj in zip(K.factors, w.factors)))


def _check_szego(K, w):
    for j, (k, wj) in enumerate(zip(K.factors, w.factors)):
        if sets1d.log_szego(k, wj) == -math.inf:
            raise SzegoError(f"factor {j} fails the Szego condition (S = 0)")


@dataclass(frozen=True, eq=False)
class ProductOrthogonal:
    poly: SparsePolyND
    norm: float
    factor_norms: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class ProductChebyshev:
    poly: SparsePolyND
    norm: float
    factors: tuple[extremal1d.ChebyshevSolution, ...]

    def alternation_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Points of ``L_1 x ... x L_n`` and the expected signs ``(-1)^(k_1+...+k_n)``."""
        axes = [f.extreme_points for f in self.factors]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        ks = np.meshgrid(*[np.arange(a.size) for a in axes], indexing="ij")
        signs = (-1.0) ** sum(k.ravel() for k in ks)
        return pts, signs


def product_orthogonal(K: ProductSet, w: ProductWeight | None, alpha,
                       n_nodes: int = sets1d.DEFAULT_NODES) -> ProductOrthogonal:
    """Tensor product of the univariate monic orthogonal polynomials."""
    w = _weights(K, w)
    alpha = _alpha(alpha, K.n)
    _check_szego(K, w)
    polys, norms = [], []
    for k, wj, a in zip(K.factors, w.factors, alpha):
        basis = extremal1d.monic_orthogonal(k, wj, a, n_nodes)
        polys.append(basis.polys[a])
        norms.append(float(basis.monic_norms[a]))
    return ProductOrthogonal(SparsePolyND.tensor(polys), math.prod(norms), tuple(norms))


def product_chebyshev(K: ProductSet, w: ProductWeight | None, alpha) -> ProductChebyshev:
    """Tensor product of the univariate weighted Chebyshev polynomials."""
    w = _weights(K, w)
    alpha = _alpha(alpha, K.n)
    _check_szego(K, w)
    sols = tuple(extremal1d.weighted_chebyshev(k, wj, a)
                 for k, wj, a in zip(K.factors, w.factors, alpha))
    return ProductChebyshev(SparsePolyND.tensor([s.poly for s in sols]),
                            math.prod(s.norm for s in sols), sols)


def widom_l2_nd(K: ProductSet, w: ProductWeight | None, alpha,
                n_nodes: int = sets1d.DEFAULT_NODES) -> float:
    alpha = _alpha(alpha, K.n)
    return product_orthogonal(K, w, alpha, n_nodes).norm / tau_minus_product(K) ** sum(alpha)


def widom_sup_nd(K: ProductSet, w: ProductWeight | None, alpha) -> float:
    alpha = _alpha(alpha, K.n)
    return product_chebyshev(K, w, alpha).norm / tau_minus_product(K) ** sum(alpha)


def l2_norm_squared(P: SparsePolyND, K: ProductSet, w: ProductWeight | None = None,
                    n_nodes: int = 64) -> float:
    """``int |P|^2 w dnu_K`` by tensor quadrature of the factor measures."""
    w = _weights(K, w)
    degs = P.degrees
    vals = None
    mus = []
    for k, wj, d in zip(K.factors, w.factors, degs):
        mus.append(sets1d.weighted_measure(k, wj, max(n_nodes, d + 2)))
    # contract the coefficient array axis by axis against Vandermonde matrices
    A = P.dense()
    vals = A
    for j, mu in enumerate(mus):
        V = np.vander(mu.nodes, degs[j] + 1, increasing=True)
        vals = np.tensordot(V, vals, axes=([1], [j]))
        vals = np.moveaxis(vals, 0, j)
    sq = np.abs(vals) ** 2
    for j, mu in reversed(list(enumerate(mus))):
        sq = np.tensordot(sq, mu.weights, axes=([j], [0]))
    return float(sq)


def jensen_lower_bound(P: SparsePolyND, K: ProductSet, w: ProductWeight | None = None) -> float:
    """``S(K, w) * exp(int log |P|^2 dnu_K)``, a lower bound for ``||P||^2``."""
    from .mahler import mahler_nd

    if P.is_zero():
        raise ValueError("the zero polynomial has no Jensen bound")
    w = _weights(K, w)
    M = mahler_nd(P, K).value
    return szego_product(K, w) * M**2


# ---------------------------------------------------------------------------
# Equality certificates and reports
# ---------------------------------------------------------------------------


def _factor_flag(k: CompactSet1D, a: int, tol: float = 1e-6) -> str:
    if a == 0:
        return "zero"
    if not k.is_real:
        return "none"
    if isinstance(k, PolynomialPreimage) and k.is_full_preimage and a % k.degree == 0:
        return "inverse_image"
    if len(k.components) == 1:
        # [a, b] is the inverse image of [-1, 1] under an affine Chebyshev polynomial
        return "inverse_image"
    wf = extremal1d.widom_sup_1d(k, None, a)
    return "unknown" if abs(wf - 2.0) <= tol else "none"


def equality_case_flags(K: ProductSet, alpha) -> tuple[str, ...]:
    """Per-factor certificate for equality in the doubled Widom bounds.

    ``"zero"`` for ``alpha_j = 0``; ``"inverse_image"`` when ``K_j`` is
    constructively ``R^{-1}([-1, 1])`` with ``deg R = alpha_j`` (an interval
    via an affine Chebyshev polynomial, or a full inverse image of ``R`` with
    ``deg R | alpha_j`` via ``T_k o R``); ``"unknown"`` when no certificate is
    available but the factor attains the doubled value numerically; else
    ``"none"``.
    """
    alpha = _alpha(alpha, K.n)
    return tuple(_factor_flag(k, a) for k, a in zip(K.factors, alpha))


def theorem_tau_check(K, alpha, tol: float = 1e-8) -> bool:
    """``||T_alpha||_K >= tau^-(K)^|alpha|`` for product sets and Reinhardt model sets."""
    if isinstance(K, ProductSet):
        alpha = _alpha(alpha, K.n)
        norm = product_chebyshev(K, None, alpha).norm
        tau = tau_minus_product(K)
    else:
        from . import modelsets

        norm = modelsets.chebyshev_norm(K, alpha)
        tau = modelsets.tau_minus(K)
    return norm >= tau ** sum(alpha) - tol


@dataclass(frozen=True, eq=False)
class WidomReport:
    alpha: MultiIndex
    w2: float
    winf: float
    szego: float
    szego_hat: float
    tau_minus: float
    lower_bounds: dict
    equality_flags: tuple[str, ...]

    @property
    def total_degree(self) -> int:
        return sum(self.alpha)

    def violations(self, tol: float = 1e-6) -> list[str]:
        """Names of recorded bounds exceeding the corresponding factor value."""
        out = []
        lb = self.lower_bounds
        checks = [("universal_l2", self.w2**2), ("universal_sup", self.winf),
                  ("doubling_l2", self.w2**2), ("doubling_sup", self.winf)]
        for name, value in checks:
            if lb.get(name) is not None and lb[name] > value + tol:
                out.append(name)
        return out

    def to_row(self) -> dict:
        lb = self.lower_bounds
        return {
            "alpha": " ".join(str(a) for a in self.alpha),
            "total_degree": self.total_degree,
            "W2sq": self.w2**2,
            "Winf": self.winf,
            "S": self.szego,
            "S_hat": self.szego_hat,
            "tau_minus": self.tau_minus,
            "bound_universal_l2": lb["universal_l2"],
            "bound_universal_sup": lb["universal_sup"],
            "bound_doubling_l2": lb.get("doubling_l2"),
            "bound_doubling_sup": lb.get("doubling_sup"),
            "flags": " ".join(self.equality_flags),
        }


REPORT_FIELDS = ["alpha", "total_degree", "W2sq", "Winf", "S", "S_hat", "tau_minus",
                 "bound_universal_l2", "bound_universal_sup", "bound_doubling_l2",
                 "bound_doubling_sup", "flags"]


def widom_report(K: ProductSet, w: ProductWeight | None, alpha,
                 n_nodes: int = sets1d.DEFAULT_NODES) -> WidomReport:
    w = _weights(K, w)
    alpha = _alpha(alpha, K.n)
    tau = tau_minus_product(K)
    d = sum(alpha)
    w2 = product_orthogonal(K, w, alpha, n_nodes).norm / tau**d
    winf = product_chebyshev(K, w, alpha).norm / tau**d
    S = szego_product(K, w)
    if K.is_real:
        w_hat = ProductWeight(tuple(sets1d.usc_regularize(wj, k) for wj, k in zip(w.factors, K.factors)))
    else:
        w_hat = w
    S_hat = szego_product(K, w_hat)
    bounds = {"universal_l2": S, "universal_sup": S_hat, "doubling_l2": None, "doubling_sup": None}
    if K.is_real and w.is_unit() and d >= 1:
        caps = [sets1d.capacity(k) for k in K.factors]
        two = 2.0 ** sum(1 for a in alpha if a > 0)
        bounds["doubling_l2"] = two * math.prod(c ** (2 * a) for c, a in zip(caps, alpha)) / tau ** (2 * d)
        bounds["doubling_sup"] = two * math.prod(c**a for c, a in zip(caps, alpha)) / tau**d
    flags = equality_case_flags(K, alpha)
    return WidomReport(alpha, w2, winf, S, S_hat, tau, bounds, flags)


def reports_to_csv(reports: Iterable[WidomReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        row = {k: (format_float(v) if isinstance(v, float) else ("" if v is None else v))
               for k, v in r.to_row().items()}
        writer.writerow(row)
    return buf.getvalue()


def format_float(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def _axis_map(k: CompactSet1D):
    if k.is_real:
        comps = k.components
        lo, hi = comps[0][0], comps[-1][1]
        return 0.5 * (lo + hi), 0.5 * (hi - lo)
    return k.center, k.radius


def bruteforce_gram_schmidt_nd(K: ProductSet, w: ProductWeight | None, up_to_rank: int,
                               n_nodes: int = 64) -> np.ndarray:
    """Monic orthogonal norms for ranks ``0..up_to_rank`` by Gram-Schmidt on the full monomial list.

    The Gram matrix of the monomials (in per-axis normalized variables) is
    assembled by tensor quadrature and factored by Cholesky, so no product
    structure of the answer is assumed.
    """
    w = _weights(K, w)
    alphas = [order_index(i, K.n) for i in range(up_to_rank + 1)]
    top = max(max(a) for a in alphas)
    mus = [sets1d.weighted_measure(k, wj, max(n_nodes, top + 2)) for k, wj in zip(K.factors, w.factors)]
    maps = [_axis_map(k) for k in K.factors]
    # one-dimensional moment tables M_j[p, q] = int t^p conj(t)^q dmu_j
    tables = []
    for mu, (c, h) in zip(mus, maps):
        t = (mu.nodes - c) / h
        V = np.vander(t, top + 1, increasing=True)
        tables.append((V.T * mu.weights) @ V.conj())
    r = len(alphas)
    G = np.ones((r, r), dtype=complex)
    for j, M in enumerate(tables):
        idx = np.array([a[j] for a in alphas])
        G = G * M[np.ix_(idx, idx)]
    G = 0.5 * (G + G.conj().T)
    L = np.linalg.cholesky(G if K.is_real is False else G.real)
    scale = np.array([math.prod(abs(h) ** a[j] for j, (_, h) in enumerate(maps)) for a in alphas])
    return np.abs(np.diag(L)) * scale


@dataclass(frozen=True)
class BruteForceResult:
    norm: float
    lower: float
    gap: float
    iterations: int


def _pieces(k: CompactSet1D, wj: Weight1D) -> np.ndarray:
    """Sorted cut points: component ends and weight singularities inside ``k``."""
    cuts = [e for ab in k.components for e in ab]
    sing = np.asarray(sets1d.weight_singularities(wj))
    if sing.size:
        cuts.extend(sing[k.contains(sing, tol=0.0)].tolist())
    return np.unique(cuts)


class _MinimaxProblem:
    """``w_hat * (T_alpha + sum_beta c_beta T_beta)`` in per-axis normalized Chebyshev bases."""

    def __init__(self, K, w, alpha):
        self.K, self.n, self.alpha = K, K.n, alpha
        r = order_rank(alpha)
        self.lower = [order_index(i, K.n) for i in range(r)]
        self.maps = [_axis_map(k) for k in K.factors]
        self.deg = [max([alpha[j]] + [b[j] for b in self.lower]) for j in range(K.n)]
        self.whs = [sets1d.usc_regularize(wj, k) for k, wj in zip(K.factors, w.factors)]
        self.cuts = [_pieces(k, wj) for k, wj in zip(K.factors, w.factors)]
        self.sing = [np.asarray(sets1d.weight_singularities(wj)) for wj in w.factors]
        # leading coefficient of prod T_{alpha_j}((x_j - c_j) / h_j) in x^alpha
        self.lead = math.prod((2.0 ** (a - 1) if a > 0 else 1.0) / h**a
                              for (_, h), a in zip(self.maps, alpha))

    def vander(self, X):
        return [C.chebvander((X[:, j] - c) / h, d) for j, ((c, h), d) in enumerate(zip(self.maps, self.deg))]

    def weight(self, X):
        return math.prod(wh(X[:, j]) for j, wh in enumerate(self.whs))

    def rows(self, X):
        T = self.vander(X)
        wt = self.weight(X)
        cols = np.ones((X.shape[0], len(self.lower)))
        f = np.ones(X.shape[0])
        for j in range(self.n):
            f = f * T[j][:, self.alpha[j]]
            cols = cols * T[j][:, [b[j] for b in self.lower]]
        return wt[:, None] * cols, wt * f

    def dense(self, coef):
        A = np.zeros([d + 1 for d in self.deg])
        A[self.alpha] = 1.0
        for b, cb in zip(self.lower, coef):
            A[b] = cb
        return A

    def error_points(self, A, X):
        T = self.vander(X)
        if self.n == 1:
            E = T[0] @ A
        elif self.n == 2:
            E = np.sum((T[0] @ A) * T[1], axis=1)
        else:
            E = np.einsum("pqr,ip,iq,ir->i", A, T[0], T[1], T[2])
        return self.weight(X) * E

    def error_grid(self, A, axes):
        E = A
        for j, x in enumerate(axes):
            Tj = C.chebvander((x - self.maps[j][0]) / self.maps[j][1], self.deg[j])
            E = np.moveaxis(np.tensordot(Tj, E, axes=([1], [j])), 0, j)
        for j, x in enumerate(axes):
            shape = [1] * self.n
            shape[j] = -1
            E = E * self.whs[j](x).reshape(shape)
        return E

    def box(self, j, x, step):
        """Smooth pieces around coordinates ``x`` intersected with ``[x - step, x + step]``.

        At a singular point of the weight the box collapses to the point.
        """
        cuts = self.cuts[j]
        k = np.searchsorted(cuts, x, side="right")
        kc = np.clip(k, 1, cuts.size - 1)
        # x is the right end of a component: use the piece to its left
        back = (k >= cuts.size) | ~self.K.factors[j].contains(0.5 * (cuts[kc - 1] + cuts[kc]), tol=0.0)
        k = np.maximum(np.where(back, k - 1, k), 1)
        lo = np.maximum(cuts[k - 1], x - step)
        hi = np.minimum(cuts[k], x + step)
        pinned = np.isin(x, self.sing[j])
        return np.where(pinned, x, lo), np.where(pinned, x, hi)


def _local_maxima(absE):
    mask = np.ones(absE.shape, dtype=bool)
    for j in range(absE.ndim):
        pad = [(0, 0)] * absE.ndim
        pad[j] = (1, 1)
        P = np.pad(absE, pad, constant_values=-np.inf)
        sl_prev = [slice(None)] * absE.ndim
        sl_next = [slice(None)] * absE.ndim
        sl_prev[j] = slice(0, -2)
        sl_next[j] = slice(2, None)
        mask &= (absE >= P[tuple(sl_prev)]) & (absE >= P[tuple(sl_next)])
    return np.nonzero(mask.ravel())[0]


def _zoom(prob, A, starts, steps, rounds=6, m=7):
    """Refine local maxima of ``|E|`` by repeated sampling of shrinking boxes (all starts at once)."""
    x = starts.copy()
    step = steps.copy()
    N = x.shape[0]
    s = np.linspace(0.0, 1.0, m)
    for _ in range(rounds):
        axes = []
        for j in range(prob.n):
            lo, hi = prob.box(j, x[:, j], step[:, j])
            axes.append(np.concatenate([lo[:, None] + (hi - lo)[:, None] * s, x[:, j, None]], axis=1))
        grids = np.meshgrid(*[np.arange(m + 1)] * prob.n, indexing="ij")
        X = np.stack([axes[j][:, grids[j].ravel()] for j in range(prob.n)], axis=-1)  # (N, (m+1)^n, n)
        v = np.abs(prob.error_points(A, X.reshape(-1, prob.n))).reshape(N, -1)
        x = X[np.arange(N), np.argmax(v, axis=1)]
        step = step / 3.0
    return x


def _stencil(prob, X, steps):
    """Neighbours of the points ``X`` at a quarter and half of the local grid spacing.

    Adding them with each new maximum stops the next linear program from
    moving its peak into the gap right next to it.
    """
    out = []
    for frac in (0.25, 0.5):
        for j in range(prob.n):
            for sign in (-1.0, 1.0):
                lo, hi = prob.box(j, X[:, j], frac * steps[:, j])
                Y = X.copy()
                Y[:, j] = lo if sign < 0 else hi
                out.append(Y)
    return np.vstack(out) if out else X


def _least_l1_solution(Amat, f, t, fallback):
    """Among coefficient vectors with ``|Amat c + f| <= t``, one of least l1 norm.

    In several variables the minimax polynomial is rarely unique and a vertex
    of the finite linear program tends to exploit the gaps between constraint
    points.  Preferring small Chebyshev coefficients picks a tame optimum and
    makes constraint generation converge in a few rounds.
    """
    m, r = Amat.shape
    eye = np.eye(r)
    A_ub = np.vstack([np.hstack([Amat, np.zeros((m, r))]), np.hstack([-Amat, np.zeros((m, r))]),
                      np.hstack([eye, -eye]), np.hstack([-eye, -eye])])
    b_ub = np.concatenate([t - f, t + f, np.zeros(2 * r)])
    res = optimize.linprog(np.concatenate([np.zeros(r), np.ones(r)]), A_ub=A_ub, b_ub=b_ub,
                           bounds=[(None, None)] * r + [(0, None)] * r, method="highs")
    return res.x[:r] if res.success else fallback


def bruteforce_chebyshev_nd(K: ProductSet, w: ProductWeight | None, alpha,
                            grid_density: int = 200, max_rounds: int = 40,
                            rtol: float = 1e-7) -> BruteForceResult:
    """Minimax norm of ``z^alpha + span{z^beta : rank(beta) < rank(alpha)}`` (oracle).

    The semi-infinite linear program is solved by constraint generation: the
    linear program runs on a growing set of constraint points, and each round
    adds the grid violators and the continuously refined local maxima of the
    current error.  The product grid uses ``grid_density`` Chebyshev-clustered
    points per component and axis.  ``norm`` is the largest error found for
    the final polynomial and ``lower`` the linear-program value, so the true
    minimax norm lies in ``[lower, norm]`` up to the refinement accuracy.
    Iteration stops once ``norm <= lower * (1 + rtol)``.
    """
    w = _weights(K, w)
    alpha = _alpha(alpha, K.n)
    if K.n > 3 or sum(alpha) > 6:
        raise ScaleError("brute-force minimax is limited to n <= 3 and total degree <= 6")
    if not K.is_real:
        raise ValueError("brute-force minimax needs real factors")
    if sum(alpha) == 0:
        top = math.prod(sets1d.weight_sup(wj, k)[0] for k, wj in zip(K.factors, w.factors))
        return BruteForceResult(top, top, 0.0, 0)
    prob = _MinimaxProblem(K, w, alpha)
    r = len(prob.lower)
    per_axis = min(grid_density, int(round(250000 ** (1.0 / K.n) / 2)))
    axes = []
    for k, wj, wh in zip(K.factors, w.factors, prob.whs):
        x = extremal1d.chebyshev_grid(k, wj, per_axis)
        axes.append(x[wh(x) > 0])
    gaps = [np.diff(x) for x in axes]

    coarse = [x[np.unique(np.linspace(0, x.size - 1, min(x.size, 4 * (d + 2))).round().astype(int))]
              for x, d in zip(axes, prob.deg)]
    active = np.stack([g.ravel() for g in np.meshgrid(*coarse, indexing="ij")], axis=-1)
    cobj = np.zeros(r + 1)
    cobj[-1] = 1.0
    for it in range(1, max_rounds + 1):
        Amat, f = prob.rows(active)
        ones = np.ones((len(active), 1))
        res = optimize.linprog(cobj, A_ub=np.vstack([np.hstack([Amat, -ones]), np.hstack([-Amat, -ones])]),
                               b_ub=np.concatenate([-f, f]), bounds=[(None, None)] * (r + 1), method="highs")
        if not res.success:
            raise RuntimeError(f"linear program failed: {res.message}")
        coef, lp_val = res.x[:r], float(res.x[-1])
        coef = _least_l1_solution(Amat, f, lp_val * (1 + 1e-9), coef)
        A = prob.dense(coef)
        absE = np.abs(prob.error_grid(A, axes))
        # a peak between grid points can exceed its nearest grid value by about
        # (deg * pi / (2 * grid))^2 / 2 relative, far below 1 percent here
        cand = _local_maxima(absE)
        cand = cand[absE.ravel()[cand] >= 0.99 * absE.max()]
        cand = cand[np.argsort(absE.ravel()[cand])[::-1][:4000]]
        idx = np.stack(np.unravel_index(cand, absE.shape), axis=-1)
        starts = np.stack([axes[j][idx[:, j]] for j in range(K.n)], axis=-1)
        steps = np.stack([np.maximum(gaps[j][np.minimum(idx[:, j], gaps[j].size - 1)],
                                     gaps[j][np.maximum(idx[:, j] - 1, 0)]) for j in range(K.n)], axis=-1)
        polished = _zoom(prob, A, starts, steps)
        pv = np.abs(prob.error_points(A, polished))
        best = max(float(absE.max()), float(pv.max()))
        hot = polished[pv > lp_val * (1 + 1e-10)]
        new = [hot, _stencil(prob, hot, steps[pv > lp_val * (1 + 1e-10)])]
        viol = np.nonzero(absE.ravel() > lp_val * (1 + 1e-10))[0]
        if viol.size:
            viol = viol[np.argsort(absE.ravel()[viol])[::-1][:100]]
            vi = np.stack(np.unravel_index(viol, absE.shape), axis=-1)
            new.append(np.stack([axes[j][vi[:, j]] for j in range(K.n)], axis=-1))
        new = np.vstack(new)
        if best <= lp_val * (1 + rtol) or new.size == 0:
            break
        active = np.unique(np.vstack([active, new]), axis=0)
    return BruteForceResult(best / prob.lead, lp_val / prob.lead, (best - lp_val) / lp_val, it)
