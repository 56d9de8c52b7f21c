"""Seeded invariant suites.

Each suite draws random instances from a generator seeded by the run seed and
the suite name, checks the invariants of one module, and records how many
instances were checked, how many failed, and the first failing instance.
Asymptotic statements are not asserted; the ``diagnostics`` entry reports
their finite-degree trends instead.
"""

from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning

from . import extremal1d, mahler, modelsets, productnd, sets1d
from .errors import UnboundedWeightError
from .productnd import ProductSet, ProductWeight, SparsePolyND

DEFAULT_SEED = 42


@dataclass
class Invariant:
    name: str
    checked: int = 0
    failed: int = 0
    witness: dict | None = None

    def check(self, ok: bool, witness: Callable[[], dict] | dict):
        self.checked += 1
        if not ok:
            self.failed += 1
            if self.witness is None:
                self.witness = witness() if callable(witness) else witness

    @property
    def passed(self) -> bool:
        return self.failed == 0 and self.checked > 0

    def to_dict(self) -> dict:
        out = {"checked": self.checked, "failed": self.failed, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass(frozen=True)
class VerifyOptions:
    """Run parameters.

    ``corrupt_capacity`` multiplies every capacity the suites compare
    against; it exists so tests can check that a wrong capacity is caught.
    ``scale`` multiplies the instance counts.
    """

    seed: int = DEFAULT_SEED
    corrupt_capacity: float = 1.0
    scale: float = 1.0

    def count(self, n: int) -> int:
        return max(1, int(round(n * self.scale)))


@dataclass
class SuiteContext:
    opts: VerifyOptions
    name: str
    invariants: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def rng(self) -> np.random.Generator:
        if not hasattr(self, "_rng"):
            self._rng = np.random.default_rng([self.opts.seed, zlib.crc32(self.name.encode())])
        return self._rng

    def inv(self, name: str) -> Invariant:
        return self.invariants.setdefault(name, Invariant(name))

    def capacity(self, K) -> float:
        return sets1d.capacity(K) * self.opts.corrupt_capacity


def _describe(obj) -> str:
    return repr(obj)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_intervals(rng, max_components: int = 3) -> sets1d.Intervals:
    k = int(rng.integers(1, max_components + 1))
    cuts = np.sort(rng.uniform(-2.0, 2.0, 2 * k))
    while np.min(np.diff(cuts)) < 0.05:
        cuts = np.sort(rng.uniform(-2.0, 2.0, 2 * k))
    return sets1d.Intervals(tuple((cuts[2 * i], cuts[2 * i + 1]) for i in range(k)))


def random_real_set(rng) -> sets1d.CompactSet1D:
    u = rng.random()
    if u < 0.7:
        return random_intervals(rng)
    if u < 0.85:
        c = float(rng.uniform(2.0, 3.0))
        return sets1d.PolynomialPreimage((-c, 0.0, 1.0))
    return sets1d.PolynomialPreimage((0.0, -3.0, 0.0, 4.0))


def random_set(rng, allow_circle: bool = True) -> sets1d.CompactSet1D:
    if allow_circle and rng.random() < 0.15:
        return sets1d.Circle(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), float(rng.uniform(0.5, 2)))
    return random_real_set(rng)


def _hull(K):
    return K.components[0][0], K.components[-1][1]


def random_weight(rng, K, singular: bool = True) -> sets1d.Weight1D:
    """Constant times optional ``|x - c|^p`` and step factors, Szegő by construction."""
    factors: list[sets1d.Weight1D] = [sets1d.Constant(float(rng.uniform(0.5, 2.0)))]
    if not K.is_real:
        return factors[0]
    lo, hi = _hull(K)
    if rng.random() < 0.5:
        lo_p = -0.5 if singular else 0.0
        factors.append(sets1d.AbsPower(float(rng.uniform(lo, hi)), float(rng.uniform(lo_p, 2.0))))
    if rng.random() < 0.5:
        m = int(rng.integers(1, 3))
        bp = tuple(np.sort(rng.uniform(lo, hi, m)))
        factors.append(sets1d.PiecewiseConstant(bp, tuple(rng.uniform(0.3, 3.0, m + 1))))
    return factors[0] if len(factors) == 1 else sets1d.Product(tuple(factors))


def random_product(rng, n_max: int = 3, real: bool = False):
    n = int(rng.integers(1, n_max + 1))
    K = ProductSet(tuple((random_real_set(rng) if real else random_set(rng)) for _ in range(n)))
    return K


def random_alpha(rng, n: int, max_total: int) -> tuple[int, ...]:
    d = int(rng.integers(1, max_total + 1))
    cuts = np.sort(rng.integers(0, d + 1, n - 1))
    parts = np.diff(np.concatenate([[0], cuts, [d]]))
    return tuple(int(p) for p in parts)


def random_poly_1d(rng, max_degree: int = 8, radius: float = 3.0) -> np.ndarray:
    """Real coefficients from roots drawn in a disk (in conjugate pairs) and a random leading term."""
    d = int(rng.integers(1, max_degree + 1))
    roots: list[complex] = []
    while len(roots) < d:
        r = radius * math.sqrt(rng.random())
        t = rng.uniform(0, 2 * math.pi)
        if d - len(roots) >= 2 and rng.random() < 0.5:
            z = r * complex(math.cos(t), math.sin(t))
            roots += [z, z.conjugate()]
        else:
            roots.append(r * math.cos(t))
    c = np.real(np.poly(roots))[::-1] * rng.uniform(0.5, 2.0) * rng.choice([-1, 1])
    return c


def random_poly_nd(rng, degrees: tuple[int, ...], complex_coeffs: bool = False) -> SparsePolyND:
    terms = {}
    for idx in np.ndindex(*(d + 1 for d in degrees)):
        c = rng.normal()
        if complex_coeffs:
            c = complex(c, rng.normal())
        terms[idx] = c
    return SparsePolyND(terms)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_sets1d(ctx: SuiteContext):
    rng = ctx.rng
    inv = ctx.inv("monotonicity")
    for _ in range(ctx.opts.count(30)):
        K2 = random_intervals(rng)
        sub = []
        for a, b in K2.components:
            if rng.random() < 0.8:
                u, v = np.sort(rng.uniform(a, b, 2))
                if v - u > 1e-3:
                    sub.append((u, v))
        if not sub:
            continue
        K1 = sets1d.Intervals(tuple(sub))
        c1, c2 = ctx.capacity(K1), ctx.capacity(K2)
        inv.check(c1 <= c2 + 1e-8, lambda: {"K1": _describe(K1), "K2": _describe(K2), "cap1": c1, "cap2": c2})

    inv = ctx.inv("frostman")
    for _ in range(ctx.opts.count(5)):
        K = random_set(rng)
        mu = sets1d.equilibrium_measure(K)
        logcap = math.log(ctx.capacity(K))
        pts = []
        if K.is_real:
            for a, b in K.components:
                pts += [complex(x) for x in rng.uniform(a, b, 10) if a < x < b]
            lo, hi = _hull(K)
        else:
            lo, hi = K.center.real - 2 * K.radius, K.center.real + 2 * K.radius
            ang = rng.uniform(0, 2 * np.pi, 10)
            pts += list(K.center + K.radius * np.exp(1j * ang))
        on = len(pts)
        pts += list(rng.uniform(lo - 1, hi + 1, 40 - on) + 1j * rng.uniform(-1, 1, 40 - on))
        U = np.atleast_1d(sets1d.log_potential(mu, np.array(pts)))
        for k, (z, u) in enumerate(zip(pts, U)):
            ok = u >= logcap - 1e-6
            if k < on:
                ok = ok and abs(u - logcap) <= 1e-6
            inv.check(ok, lambda: {"set": _describe(K), "z": str(z), "U": float(u), "log_cap": logcap})

    inv = ctx.inv("mass")
    for _ in range(ctx.opts.count(20)):
        K = random_set(rng)
        m = sets1d.equilibrium_measure(K, int(rng.integers(8, 300))).total_mass
        inv.check(abs(m - 1) <= 1e-12, lambda: {"set": _describe(K), "mass": m})

    inv = ctx.inv("scaling")
    for _ in range(ctx.opts.count(20)):
        K = random_set(rng)
        w = random_weight(rng, K)
        c = float(rng.uniform(0.1, 10))
        s1, s2 = sets1d.szego_value(K, sets1d.Constant(c) * w), c * sets1d.szego_value(K, w)
        inv.check(abs(s1 - s2) <= 1e-10 * abs(s2), lambda: {"set": _describe(K), "w": _describe(w), "c": c})

    inv = ctx.inv("jensen")
    for _ in range(ctx.opts.count(20)):
        K = random_set(rng)
        w = random_weight(rng, K)
        mean = sets1d.integrate(K, lambda x: float(np.real(w(x))), sets1d.weight_singularities(w))
        S = sets1d.szego_value(K, w)
        inv.check(mean >= S - 1e-10, lambda: {"set": _describe(K), "w": _describe(w), "mean": mean, "S": S})

    inv = ctx.inv("usc_dominance")
    for _ in range(ctx.opts.count(20)):
        K = random_real_set(rng)
        w = random_weight(rng, K, singular=False)
        wh = sets1d.usc_regularize(w, K)
        xs = np.concatenate([rng.uniform(*_hull(K), 50), sets1d.weight_singularities(w)])
        xs = xs[K.contains(xs)]
        ok = bool(np.all(wh(xs) >= w(xs) - 1e-14))
        inv.check(ok, lambda: {"set": _describe(K), "w": _describe(w)})


def _s_hat(K, w):
    try:
        return sets1d.szego_value(K, sets1d.usc_regularize(w, K)) if K.is_real else sets1d.szego_value(K, w)
    except UnboundedWeightError:
        return None


def suite_extremal1d(ctx: SuiteContext):
    rng = ctx.rng
    l2, sup = ctx.inv("universal_l2"), ctx.inv("universal_sup")
    for _ in range(ctx.opts.count(25)):
        K = random_set(rng)
        w = random_weight(rng, K, singular=bool(rng.random() < 0.5))
        n = int(rng.integers(1, 7))
        S = sets1d.szego_value(K, w)
        W2 = extremal1d.widom_l2_1d(K, w, n)
        l2.check(W2**2 >= S - 1e-8, lambda: {"set": _describe(K), "w": _describe(w), "n": n, "W2sq": W2**2, "S": S})
        S_hat = _s_hat(K, w)
        if S_hat is not None:
            Winf = extremal1d.widom_sup_1d(K, w, n)
            sup.check(Winf >= S_hat - 1e-8,
                      lambda: {"set": _describe(K), "w": _describe(w), "n": n, "Winf": Winf, "S_hat": S_hat})

    inv = ctx.inv("real_doubling")
    alt = ctx.inv("alternation")
    for _ in range(ctx.opts.count(12)):
        K = random_real_set(rng)
        n = int(rng.integers(1, 9))
        sol = extremal1d.weighted_chebyshev(K, None, n)
        cap = ctx.capacity(K)
        Winf = sol.norm / cap**n
        W2sq = (extremal1d.monic_orthogonal(K, None, n).monic_norms[n] / cap**n) ** 2
        inv.check(Winf >= 2 - 1e-6 and W2sq >= 2 - 1e-6,
                  lambda: {"set": _describe(K), "n": n, "Winf": Winf, "W2sq": W2sq})
        w = random_weight(rng, K, singular=False)
        sol = extremal1d.weighted_chebyshev(K, w, n)
        wh = sets1d.usc_regularize(w, K)
        x = sol.extreme_points
        vals = wh(x) * sol.poly(x)
        ok = (x.size >= n + 1 and bool(np.all(np.diff(x) < 0))
              and bool(np.all(np.sign(vals[:-1]) != np.sign(vals[1:])))
              and bool(np.all(np.abs(np.abs(vals) - sol.norm) <= 1e-8 * sol.norm)))
        alt.check(ok, lambda: {"set": _describe(K), "w": _describe(w), "n": n, "points": x.tolist()})

    inv = ctx.inv("oracle_exchange")
    for _ in range(ctx.opts.count(4)):
        K = random_real_set(rng)
        w = random_weight(rng, K, singular=False)
        n = int(rng.integers(1, 7))
        a = extremal1d.weighted_chebyshev(K, w, n).norm
        b = extremal1d.bruteforce_chebyshev_1d(K, w, n)
        inv.check(abs(a - b) <= 1e-4 * b, lambda: {"set": _describe(K), "w": _describe(w), "n": n, "exchange": a, "lp": b})

    K = sets1d.Intervals(((-1.0, 0.0), (0.5, 1.0)))
    cap = sets1d.capacity(K)
    roots = [extremal1d.weighted_chebyshev(K, None, n).norm ** (1.0 / n) for n in range(1, 13)]
    ctx.diagnostics["root_limit"] = {"set": _describe(K), "capacity": cap, "norm_root": roots,
                                     "asserted": False}


def suite_productnd(ctx: SuiteContext):
    rng = ctx.rng
    l2, hat = ctx.inv("unif_l2"), ctx.inv("hat_wid")
    d2, dsup, deq = ctx.inv("doubling_l2"), ctx.inv("doubling_sup"), ctx.inv("doubling_equality")
    for _ in range(ctx.opts.count(20)):
        K = random_product(rng)
        w = ProductWeight(tuple(random_weight(rng, k, singular=False) for k in K.factors))
        alpha = random_alpha(rng, K.n, 6)
        r = productnd.widom_report(K, w, alpha)
        l2.check(r.w2**2 >= r.szego - 1e-8, lambda: {"K": _describe(K), "w": _describe(w), "alpha": alpha})
        hat.check(r.winf >= r.szego_hat - 1e-8, lambda: {"K": _describe(K), "w": _describe(w), "alpha": alpha})
    for _ in range(ctx.opts.count(15)):
        K = random_product(rng, real=True)
        alpha = random_alpha(rng, K.n, 6)
        r = productnd.widom_report(K, None, alpha)
        caps = [ctx.capacity(k) for k in K.factors]
        c = sum(1 for a in alpha if a > 0)
        floor2 = 2.0**c * math.prod(cp ** (2 * a) for cp, a in zip(caps, alpha))
        norm2 = productnd.product_orthogonal(K, None, alpha).norm ** 2
        wit = lambda: {"K": _describe(K), "alpha": alpha, "W2sq": r.w2**2, "Winf": r.winf}
        d2.check(r.w2**2 >= 2 - 1e-6 and norm2 >= floor2 - 1e-8, wit)
        dsup.check(r.winf >= 2 - 1e-6, wit)
        flags = r.equality_flags
        if "unknown" not in flags:
            expect_eq = all(f in ("zero", "inverse_image") for f in flags)
            sharp = abs(r.winf - r.lower_bounds["doubling_sup"]) <= 1e-6
            deq.check(sharp == expect_eq, lambda: {**wit(), "flags": flags})

    inv = ctx.inv("oracle_bruteforce")
    choices = [ProductSet((sets1d.interval(-1, 1),) * 2),
               ProductSet((sets1d.interval(-1, 1), sets1d.interval(-2, 2))),
               ProductSet((sets1d.PolynomialPreimage((-2.0, 0.0, 1.0)),) * 2)]
    for _ in range(ctx.opts.count(3)):
        K = choices[int(rng.integers(len(choices)))]
        alpha = random_alpha(rng, 2, 4)
        a = productnd.product_chebyshev(K, None, alpha).norm
        b = productnd.bruteforce_chebyshev_nd(K, None, alpha).norm
        inv.check(abs(a - b) <= 1e-4 * b, lambda: {"K": _describe(K), "alpha": alpha, "product": a, "bruteforce": b})

    inv = ctx.inv("product_alternation")
    for _ in range(ctx.opts.count(10)):
        K = random_product(rng, n_max=2, real=True)
        w = ProductWeight(tuple(random_weight(rng, k, singular=False) for k in K.factors))
        alpha = random_alpha(rng, K.n, 5)
        sol = productnd.product_chebyshev(K, w, alpha)
        pts, signs = sol.alternation_grid()
        wh = ProductWeight(tuple(sets1d.usc_regularize(wj, k) for wj, k in zip(w.factors, K.factors)))
        vals = np.real(sol.poly(pts)) * wh(pts)
        s0 = np.sign(vals[0]) * signs[0]
        ok = bool(np.all(np.sign(vals) == s0 * signs)) and bool(np.all(np.abs(np.abs(vals) - sol.norm) <= 1e-8 * sol.norm))
        inv.check(ok, lambda: {"K": _describe(K), "w": _describe(w), "alpha": alpha})

    inv = ctx.inv("fubini")
    for _ in range(ctx.opts.count(10)):
        K = random_product(rng, n_max=2)
        w = ProductWeight(tuple(
            sets1d.Product((sets1d.Constant(float(rng.uniform(0.5, 2))),
                            sets1d.AbsPower(float(rng.uniform(5, 6)), float(rng.uniform(0, 3)))))
            for _ in K.factors))
        mus = [sets1d.equilibrium_measure(k) for k in K.factors]
        total = 0.0
        for idx in np.ndindex(*(mu.nodes.size for mu in mus)):
            x = np.array([mu.nodes[i] for mu, i in zip(mus, idx)])
            q = math.prod(mu.weights[i] for mu, i in zip(mus, idx))
            total += q * math.log(float(np.real(w(x[None, :])[0])))
        S = productnd.szego_product(K, w)
        inv.check(abs(S - math.exp(total)) <= 1e-8 * S, lambda: {"K": _describe(K), "w": _describe(w)})

    inv = ctx.inv("order_bijection")
    limit = ctx.opts.count(10_000)
    for n in range(1, 5):
        bad = next((i for i in range(limit) if productnd.order_rank(productnd.order_index(i, n)) != i), None)
        inv.check(bad is None, {"n": n, "index": bad})


def suite_modelsets(ctx: SuiteContext):
    rng = ctx.rng
    inv = ctx.inv("chain")
    for K in (modelsets.Polydisk(2), modelsets.Polydisk(3), modelsets.EuclideanBall2(), modelsets.RealBall2(),
              modelsets.Simplex(2), modelsets.Simplex(3)):
        c, C = modelsets.capacities_cC(K, numeric=isinstance(K, modelsets.Simplex), seed=ctx.opts.seed)
        tau = modelsets.tau_minus(K) if not isinstance(K, modelsets.Simplex) else None
        if tau is None:
            ok = c <= C + 1e-9
        else:
            ok = c <= tau + 1e-9 and tau <= C + 1e-9
            if isinstance(K, modelsets.RealBall2):
                ok = ok and c < tau < C
        inv.check(ok, {"K": modelsets.model_name(K), "c": c, "tau_minus": tau, "C": C})

    inv = ctx.inv("ray_limits")
    for K in (modelsets.EuclideanBall2(), modelsets.RealBall2(), modelsets.Simplex(2)):
        _, C_closed = modelsets.capacities_cC(K)
        _, C_num = modelsets.capacities_cC(K, numeric=True, seed=ctx.opts.seed)
        inv.check(abs(math.log(C_num) - math.log(C_closed)) <= 1e-5,
                  {"K": modelsets.model_name(K), "numeric": C_num, "closed": C_closed})

    inv = ctx.inv("ball_norms")
    from scipy.optimize import minimize_scalar
    for d in range(1, 13):
        for a1 in range(d + 1):
            a = (a1, d - a1)
            g = lambda r: -(r ** a[0]) * (1 - r * r) ** (a[1] / 2)
            rs = np.linspace(0, 1, 2001)
            k = int(np.argmin(g(rs)))
            res = minimize_scalar(g, bounds=(rs[max(k - 1, 0)], rs[min(k + 1, 2000)]), method="bounded",
                                  options={"xatol": 1e-12})
            grid = max(-res.fun, -g(rs[k]))
            closed = modelsets.monomial_sup_norm(modelsets.EuclideanBall2(), a)
            inv.check(abs(grid - closed) <= 1e-8, {"alpha": a, "grid": grid, "closed": closed})

    inv = ctx.inv("ball_jensen")
    m = ctx.opts.count(100_000)
    pts = modelsets.sphere_samples(m, rng)
    for _ in range(ctx.opts.count(20)):
        d = int(rng.integers(1, 5))
        P = random_poly_nd(rng, (d, d), complex_coeffs=True)
        lead = P.leading
        if sum(lead) != P.total_degree:
            continue
        P = SparsePolyND({a: c / P.terms[lead] for a, c in P.terms.items()})
        vals = np.abs(P(pts)) ** 2
        mean, se = float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(m))
        floor = modelsets.ball_l2_floor(P.total_degree, 1.0)
        inv.check(mean >= floor - 3 * se, lambda: {"poly": repr(P.terms), "mean": mean, "floor": floor})

    inv = ctx.inv("polydisk_mahler")
    T = ProductSet((sets1d.UnitCircle(),) * 2)
    for _ in range(ctx.opts.count(20)):
        alpha = random_alpha(rng, 2, 4)
        terms = {alpha: 1.0}
        for b in productnd.multi_indices(2, sum(alpha)):
            if productnd.order_rank(b) < productnd.order_rank(alpha) and rng.random() < 0.7:
                terms[b] = complex(rng.normal(), rng.normal())
        P = SparsePolyND(terms)
        M = mahler.mahler_nd(P, T).value
        floor, _ = modelsets.mahler_polydisk_floor(alpha)
        inv.check(M >= floor - 1e-6, lambda: {"poly": repr(P.terms), "M": M, "floor": floor})


def suite_mahler(ctx: SuiteContext):
    rng = ctx.rng
    sets = [sets1d.interval(-1, 1), sets1d.interval(-2, 2), sets1d.UnitCircle(),
            sets1d.PolynomialPreimage((-2.0, 0.0, 1.0))]
    agree, mult, floor_inv = ctx.inv("method_agreement"), ctx.inv("multiplicativity"), ctx.inv("frostman_floor")
    for _ in range(ctx.opts.count(40)):
        K = sets[int(rng.integers(len(sets)))]
        c = random_poly_1d(rng)
        a = mahler.mahler_1d(c, K).value
        b = mahler.mahler_1d(c, K, "quadrature").value
        agree.check(abs(a - b) <= 1e-6 * a, lambda: {"set": _describe(K), "coeffs": c.tolist(), "roots": a, "quad": b})
        q = random_poly_1d(rng, 4)
        pq = np.polynomial.polynomial.polymul(c, q)
        lhs, rhs = mahler.mahler_1d(pq, K).value, a * mahler.mahler_1d(q, K).value
        mult.check(abs(lhs - rhs) <= 1e-8 * rhs, lambda: {"set": _describe(K), "p": c.tolist(), "q": q.tolist()})
        fl = abs(c[-1]) * ctx.capacity(K) ** (c.size - 1)
        floor_inv.check(a >= fl - 1e-9, lambda: {"set": _describe(K), "coeffs": c.tolist(), "M": a, "floor": fl})

    inv = ctx.inv("coeff_bounds")
    for _ in range(ctx.opts.count(2000)):
        K = sets[int(rng.integers(len(sets)))]
        c = random_poly_1d(rng)
        for k in range(c.size):
            bound, ok = mahler.coeff_bound_1d(c, K, k)
            if not ok:
                inv.check(False, lambda: {"set": _describe(K), "coeffs": c.tolist(), "k": k, "bound": bound})
                break
        else:
            inv.check(True, {})

    inv = ctx.inv("coeff_bounds_nd")
    for _ in range(ctx.opts.count(30)):
        K = ProductSet((sets[int(rng.integers(len(sets)))], sets[int(rng.integers(len(sets)))]))
        P = random_poly_nd(rng, (int(rng.integers(1, 4)), int(rng.integers(1, 4))))
        M = mahler.mahler_nd(P, K).value
        caps = [sets1d.capacity(k) for k in K.factors]
        ok = True
        for k in np.ndindex(*(d + 1 for d in P.degrees)):
            bound = M * math.prod(math.comb(m, kk) * kf.max_abs() ** (m - kk) / cp**m
                                  for m, kk, kf, cp in zip(P.degrees, k, K.factors, caps))
            ok = ok and abs(P.terms.get(k, 0.0)) <= bound + 1e-9
        inv.check(ok, lambda: {"K": _describe(K), "poly": repr(P.terms)})

    inv = ctx.inv("nd_agreement")
    for _ in range(ctx.opts.count(4)):
        K = ProductSet((sets[int(rng.integers(2))], sets[int(rng.integers(2))]))
        P = random_poly_nd(rng, (int(rng.integers(1, 3)), int(rng.integers(1, 3))))
        a = mahler.mahler_nd(P, K).value
        b = mahler.mahler_nd(P, K, "quadrature").value
        inv.check(abs(a - b) <= 1e-5 * a, lambda: {"K": _describe(K), "poly": repr(P.terms), "recursive": a, "quad": b})

    inv = ctx.inv("integer_floor")
    K = ProductSet((sets1d.interval(-2, 2),) * 2)
    rep = mahler.integer_floor_check(K, (2, 2), coeff_range=1)
    inv.check(rep.passed, {"min_ratio": rep.min_ratio, "witness": rep.witness})


def suite_cli(ctx: SuiteContext):
    from . import cli

    inv = ctx.inv("determinism")
    argv = ["widom", "--set", '[{"type":"intervals","data":[[-1,1]]},{"type":"intervals","data":[[-1,1]]}]',
            "--max-total-degree", "2", "--format", "csv"]
    out1, out2 = cli.render(argv), cli.render(argv)
    inv.check(out1 == out2, {"argv": argv})

    inv = ctx.inv("round_trip")
    for argv in (argv, ["cap", "--set", '{"type":"unit_circle"}', "--tol", "1e-9"],
                 ["verify", "--seed", "7", "--suite", "mahler"],
                 ["profile", "--set", "realball2", "--grid", "11"]):
        cfg = cli.RunConfig.from_args(cli.build_parser().parse_args(argv))
        back = cli.RunConfig.from_json(cfg.to_json())
        inv.check(back == cfg, {"argv": argv})


SUITES: dict[str, Callable[[SuiteContext], None]] = {
    "sets1d": suite_sets1d,
    "extremal1d": suite_extremal1d,
    "productnd": suite_productnd,
    "modelsets": suite_modelsets,
    "mahler": suite_mahler,
    "cli": suite_cli,
}


def run_verify(suites=None, opts: VerifyOptions | None = None) -> dict:
    """Run the named suites (all by default) and return a JSON-ready summary."""
    opts = opts or VerifyOptions()
    names = list(SUITES) if not suites else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    summary = {"seed": opts.seed, "suites": {}, "diagnostics": {}, "failed_invariants": []}
    for name in names:
        ctx = SuiteContext(opts, name)
        with warnings.catch_warnings():
            # the adaptive oracles ask for 1e-13 and report reaching roundoff instead
            warnings.simplefilter("ignore", IntegrationWarning)
            SUITES[name](ctx)
        summary["suites"][name] = {k: v.to_dict() for k, v in ctx.invariants.items()}
        summary["diagnostics"].update({f"{name}.{k}": v for k, v in ctx.diagnostics.items()})
        summary["failed_invariants"] += [f"{name}.{k}" for k, v in ctx.invariants.items() if not v.passed]
    summary["passed"] = not summary["failed_invariants"]
    return summary
