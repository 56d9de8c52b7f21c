"""Computable compact sets in the plane and their equilibrium data.

Three families of sets are supported:

* finite unions of disjoint real intervals,
* circles (with the unit circle as a named special case),
* real inverse polynomial images ``{x in R : |R(x)| <= 1}``.

For every set the module provides the logarithmic capacity, a quadrature for
the equilibrium measure, the exact logarithmic potential of that measure, and
the Szego quantity ``exp(int log w dmu_K)`` of the supported weights.

One interval, a circle and a full inverse image have classical closed forms.
Any other union of ``k >= 2`` intervals uses the algebraic density
``|q(x)| / (pi sqrt|H(x)|)`` with ``q`` fixed by the gap conditions.  A direct
minimization of the logarithmic energy on a cell grid is kept as an
independent check (:func:`energy_minimization`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate as _integrate
from scipy import optimize, special

from .errors import NonPolarError, UnboundedWeightError

DEFAULT_NODES = 256
ENERGY_CELLS = 512
_LOG_FLOOR = 1e-14


# ---------------------------------------------------------------------------
# Sets
# ---------------------------------------------------------------------------


class CompactSet1D:
    """Base class for the supported compact subsets of the complex plane."""

    is_real = True

    @property
    def components(self) -> tuple[tuple[float, float], ...]:
        raise ValueError(f"{type(self).__name__} is not a subset of the real line")

    def max_abs(self) -> float:
        return max(max(abs(a), abs(b)) for a, b in self.components)

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.components:
            out |= (x >= a - tol) & (x <= b + tol)
        return out


@dataclass(frozen=True)
class Intervals(CompactSet1D):
    """A finite union of disjoint closed intervals ``[a_k, b_k]``."""

    data: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple(sorted((float(a), float(b)) for a, b in self.data))
        if not ivs:
            raise NonPolarError("the empty set is polar")
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValueError(f"interval [{a}, {b}] is not finite")
            if not b > a:
                raise NonPolarError(f"degenerate interval [{a}, {b}] is polar")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "data", ivs)

    @property
    def components(self):
        return self.data


def interval(a: float, b: float) -> Intervals:
    return Intervals(((a, b),))


@dataclass(frozen=True)
class Circle(CompactSet1D):
    """The circle ``|z - center| = radius``."""

    center: complex = 0j
    radius: float = 1.0

    is_real = False

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise NonPolarError("a circle needs a positive radius")

    def max_abs(self) -> float:
        return abs(self.center) + self.radius

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        return np.abs(np.abs(np.asarray(x) - self.center) - self.radius) <= tol


@dataclass(frozen=True)
class UnitCircle(Circle):
    center: complex = 0j
    radius: float = 1.0


@dataclass(frozen=True)
class PolynomialPreimage(CompactSet1D):
    """``{x in R : |R(x)| <= 1}`` for a real polynomial ``R`` of degree >= 1.

    ``coeffs`` are in ascending order.  When every solution of ``R(x) = t``,
    ``t in [-1, 1]``, is real the set is the full inverse image of ``[-1, 1]``
    and its capacity and equilibrium measure come in closed form; otherwise the
    resolved intervals are treated like any other union.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = np.trim_zeros(np.asarray(self.coeffs, dtype=float), "b")
        if c.size < 2:
            raise ValueError("an inverse image needs a polynomial of degree >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(float(v) for v in c))
        resolved, full = _resolve_preimage(self.coeffs)
        object.__setattr__(self, "_resolved", resolved)
        object.__setattr__(self, "_full", full)

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_full_preimage(self) -> bool:
        return self._full

    @property
    def resolved(self) -> Intervals:
        return self._resolved

    @property
    def components(self):
        return self._resolved.data


def _resolve_preimage(coeffs) -> tuple[Intervals, bool]:
    R = Polynomial(coeffs)
    dR = R.deriv()
    crit = dR.roots() if R.degree() > 1 else np.array([])
    scale = 1.0 + float(np.max(np.abs(crit))) if crit.size else 1.0
    real_crit = np.sort(crit[np.abs(crit.imag) <= 1e-9 * scale].real)
    full = crit.size == real_crit.size and bool(
        np.all(np.abs(R(real_crit)) >= 1.0 - 1e-9)
    )

    # monotone pieces of R, bounded by the real critical points
    lead = abs(coeffs[-1])
    bound = 2.0 + max(abs(c) for c in coeffs[:-1]) / lead + 1.0 / lead
    knots = [-bound, *real_crit.tolist(), bound]
    points = []
    for lo, hi in zip(knots, knots[1:]):
        if hi <= lo:
            continue
        for level in (-1.0, 1.0):
            f = lambda x, s=level: R(x) - s
            flo, fhi = f(lo), f(hi)
            if flo == 0.0:
                points.append(lo)
            elif fhi == 0.0:
                points.append(hi)
            elif flo * fhi < 0:
                points.append(optimize.brentq(f, lo, hi, xtol=1e-13, rtol=1e-15))
    points = np.unique(np.round(np.asarray(points), 15))
    # merge touching points (double roots at critical values +-1)
    merged = []
    for p in points:
        if merged and p - merged[-1] < 1e-12:
            continue
        merged.append(float(p))
    ivs = []
    for lo, hi in zip(merged, merged[1:]):
        if abs(R(0.5 * (lo + hi))) <= 1.0:
            if ivs and abs(ivs[-1][1] - lo) < 1e-12:
                ivs[-1] = (ivs[-1][0], hi)
            else:
                ivs.append((lo, hi))
    if not ivs:
        raise NonPolarError("the inverse image has no interior")
    return Intervals(tuple(ivs)), full


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


class Weight1D:
    """Base class for weights ``w >= 0`` evaluated pointwise on a set."""

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def __mul__(self, other: "Weight1D") -> "Weight1D":
        return Product((self, other))


@dataclass(frozen=True)
class Constant(Weight1D):
    value: float = 1.0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("a constant weight must be positive")

    def __call__(self, x):
        return np.full(np.shape(x), float(self.value))


@dataclass(frozen=True)
class AbsPower(Weight1D):
    """``scale * |x - center| ** exponent`` with ``exponent > -1``."""

    center: float = 0.0
    exponent: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.exponent > -1:
            raise ValueError("AbsPower needs exponent > -1 for a finite log-integral")
        if not self.scale > 0:
            raise ValueError("AbsPower needs a positive scale")

    def __call__(self, x):
        d = np.abs(np.asarray(x) - self.center)
        with np.errstate(divide="ignore"):
            return self.scale * d**self.exponent


@dataclass(frozen=True)
class PiecewiseConstant(Weight1D):
    """Right-continuous step weight.

    ``values[0]`` applies left of ``breakpoints[0]``, ``values[i]`` on
    ``[breakpoints[i-1], breakpoints[i])``.  ``break_values``, when given,
    overrides the value at each breakpoint (used for the usc envelope).
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    break_values: tuple[float, ...] | None = None

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(bp) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise ValueError("step values must be finite and non-negative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if self.break_values is not None:
            bv = tuple(float(v) for v in self.break_values)
            if len(bv) != len(bp):
                raise ValueError("break_values must match breakpoints")
            object.__setattr__(self, "break_values", bv)

    def __call__(self, x):
        x = np.asarray(x)
        if np.iscomplexobj(x):
            if np.any(x.imag != 0):
                raise ValueError("step weights are defined on the real line only")
            x = x.real
        bp = np.asarray(self.breakpoints)
        out = np.asarray(self.values)[np.searchsorted(bp, x, side="right")]
        if self.break_values is not None and bp.size:
            idx = np.searchsorted(bp, x, side="left")
            idx = np.minimum(idx, bp.size - 1)
            hit = bp[idx] == x
            out = np.where(hit, np.asarray(self.break_values)[idx], out)
        return out


@dataclass(frozen=True)
class Product(Weight1D):
    factors: tuple[Weight1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("empty product weight")

    def __call__(self, x):
        out = np.ones(np.shape(x))
        for f in self.factors:
            out = out * f(x)
        return out


def _flatten(w: Weight1D):
    """Split ``w`` into (constant, [AbsPower...], merged step weight or None)."""
    const, powers, steps = 1.0, [], []
    stack = [w]
    while stack:
        f = stack.pop()
        if isinstance(f, Product):
            stack.extend(f.factors)
        elif isinstance(f, Constant):
            const *= f.value
        elif isinstance(f, AbsPower):
            const *= f.scale
            powers.append(AbsPower(f.center, f.exponent, 1.0))
        elif isinstance(f, PiecewiseConstant):
            steps.append(f)
        else:
            raise TypeError(f"unsupported weight {f!r}")
    if not steps:
        return const, powers, None
    if len(steps) == 1:
        return const, powers, steps[0]
    bp = np.unique(np.concatenate([s.breakpoints for s in steps]))
    probe = np.concatenate([[bp[0] - 1.0], bp]) if bp.size else np.array([0.0])
    vals = np.ones(probe.size)
    at = np.ones(bp.size)
    for s in steps:
        vals *= s(probe)
        at *= s(bp)
    merged = PiecewiseConstant(tuple(bp), tuple(vals))
    if not np.array_equal(at, merged(bp)):
        merged = PiecewiseConstant(tuple(bp), tuple(vals), tuple(at))
    return const, powers, merged


def _rebuild(const: float, powers, step) -> Weight1D:
    factors: list[Weight1D] = []
    if const != 1.0 or (not powers and step is None):
        factors.append(Constant(const))
    factors.extend(powers)
    if step is not None:
        factors.append(step)
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


def usc_regularize(w: Weight1D, set: CompactSet1D) -> Weight1D:
    """Upper semicontinuous envelope of ``w`` on ``set``.

    Step weights take, at each breakpoint, the largest value reachable from
    inside the set.  Continuous factors are unchanged.  Weights with a negative
    power are unbounded and cannot be used in a sup-norm problem.
    """
    const, powers, step = _flatten(w)
    if any(p.exponent < 0 for p in powers):
        raise UnboundedWeightError("weights with negative powers are unbounded near the pole")
    if step is None:
        return w
    if not set.is_real:
        raise ValueError("step weights are only supported on real sets")
    comps = set.components
    vals = step.values
    bvals = []
    for j, b in enumerate(step.breakpoints):
        at = step(np.array([b]))[0]
        left = any(a < b <= c for a, c in comps)
        inside = any(a <= b <= c for a, c in comps)
        if inside:
            bvals.append(max(at, vals[j]) if left else max(at, vals[j + 1]))
        else:
            bvals.append(max(vals[j], vals[j + 1]))
    step = PiecewiseConstant(step.breakpoints, vals, tuple(bvals))
    return _rebuild(const, powers, step)


def weight_singularities(w: Weight1D) -> list[float]:
    """Real points where ``w`` is not smooth (power centers and step breakpoints)."""
    _, powers, step = _flatten(w)
    pts = [p.center for p in powers if p.exponent != 0]
    if step is not None:
        pts.extend(step.breakpoints)
    return sorted(set(pts))


def weight_sup(w: Weight1D, set: CompactSet1D) -> tuple[float, float | complex]:
    """``(max of the usc envelope of w on set, a maximizer)``."""
    wh = usc_regularize(w, set)
    if not set.is_real:
        theta = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        z = set.center + set.radius * np.exp(1j * theta)
        v = wh(z)
        k = int(np.argmax(v))
        return float(v[k]), complex(z[k])
    cands = [np.array([a, b]) for a, b in set.components]
    cands += [np.linspace(a, b, 4001) for a, b in set.components]
    sing = np.asarray(weight_singularities(w))
    if sing.size:
        cands.append(sing[set.contains(sing)])
    x = np.unique(np.concatenate(cands))
    v = wh(x)
    k = int(np.argmax(v))
    best, arg = float(v[k]), float(x[k])
    # polish interior maxima of products of powers
    lo = x[max(k - 1, 0)]
    hi = x[min(k + 1, x.size - 1)]
    if hi > lo and not np.any((sing > lo) & (sing < hi)):
        res = optimize.minimize_scalar(lambda t: -float(wh(np.array([t]))[0]),
                                       bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-13})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


# ---------------------------------------------------------------------------
# Equilibrium models
# ---------------------------------------------------------------------------


def _green_segment(w) -> np.ndarray:
    """Green function of ``[-1, 1]`` with pole at infinity."""
    w = np.asarray(w, dtype=complex)
    big = np.abs(w) > 1e8
    s = np.sqrt(w - 1) * np.sqrt(w + 1)
    g = np.log(np.abs(w + s))
    if np.any(big):
        wb = w[big]
        g[big] = np.log(np.abs(wb)) + np.log(np.abs(1 + np.sqrt(1 - 1 / wb**2)))
    return np.maximum(g, 0.0)


def _phi(u):
    # second antiderivative of log|u|
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = u != 0
    out[m] = 0.5 * u[m] ** 2 * np.log(np.abs(u[m])) - 0.75 * u[m] ** 2
    return out


class _Arcsine:
    def __init__(self, a: float, b: float):
        self.a, self.b = a, b
        self.mid, self.half = 0.5 * (a + b), 0.5 * (b - a)
        self.capacity = 0.5 * self.half
        self.components = ((a, b),)

    def potential(self, z):
        w = (np.asarray(z) - self.mid) / self.half
        return math.log(self.capacity) + _green_segment(w)

    def cdf(self, x):
        w = np.clip((np.asarray(x, dtype=float) - self.mid) / self.half, -1, 1)
        return 1.0 - np.arccos(w) / np.pi

    def nodes(self, n):
        k = np.arange(1, n + 1)
        return self.mid + self.half * np.cos((2 * k - 1) * np.pi / (2 * n)), np.full(n, 1.0 / n)

    def pieces(self, n):
        return [(self.a, self.b, -0.5, -0.5, lambda x: np.full(np.shape(x), 1.0 / np.pi), n)]

    def angles(self, points):
        return [math.acos(np.clip((self.mid - p) / self.half, -1, 1)) for p in points if self.a < p < self.b]

    def angle_nodes(self, theta):
        x = self.mid - self.half * np.cos(np.asarray(theta, dtype=float))
        return x[..., None], np.full(x.shape + (1,), 1.0 / np.pi)

    def integrate(self, f, points=()):
        th = [math.acos(np.clip((self.mid - p) / self.half, -1, 1))
              for p in points if self.a < p < self.b]
        g = lambda t: f(self.mid - self.half * math.cos(t)) / math.pi
        return _quad(g, 0.0, math.pi, th)


class _CircleModel:
    def __init__(self, c: complex, r: float):
        self.c, self.r = c, r
        self.capacity = r

    def potential(self, z):
        return np.log(np.maximum(np.abs(np.asarray(z) - self.c), self.r))

    def nodes(self, n):
        th = 2 * np.pi * np.arange(n) / n
        return self.c + self.r * np.exp(1j * th), np.full(n, 1.0 / n)

    def integrate(self, f, points=()):
        th = []
        for p in points:
            d = complex(p) - self.c
            if abs(abs(d) - self.r) < 1e-2 * self.r:
                th.append(math.atan2(d.imag, d.real) % (2 * math.pi))
        g = lambda t: f(self.c + self.r * complex(math.cos(t), math.sin(t))) / (2 * math.pi)
        return _quad(g, 0.0, 2 * math.pi, th)


class _Pullback:
    """Equilibrium measure of a full inverse image ``R^{-1}([-1, 1])``."""

    def __init__(self, coeffs, components):
        self.R = Polynomial(coeffs)
        self.dR = self.R.deriv()
        self.m = self.R.degree()
        self.components = components
        self.capacity = (2.0 * abs(coeffs[-1])) ** (-1.0 / self.m)
        crit = self.dR.roots() if self.m > 1 else np.array([])
        crit = np.sort(crit.real)
        # monotone branches of R inside the set
        cuts = []
        for a, b in components:
            inner = [c for c in crit if a < c < b]
            edges = [a, *inner, b]
            cuts.extend(zip(edges, edges[1:]))
        self.branches = cuts

    def potential(self, z):
        return math.log(self.capacity) + _green_segment(self.R(np.asarray(z))) / self.m

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for u, v in self.branches:
            ru = self.R(u)
            part = np.abs(np.arccos(np.clip(self.R(np.clip(x, u, v)), -1, 1))
                          - math.acos(np.clip(ru, -1, 1))) / math.pi
            out += part / self.m
        return out

    def solve(self, t):
        """All ``m`` real solutions of ``R(x) = t`` for each entry of ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c = np.asarray(self.R.coef, dtype=float)
        if self.m == 1:
            return ((t - c[0]) / c[1])[:, None]
        comp = np.zeros((t.size, self.m, self.m))
        comp[:, 1:, :-1] = np.eye(self.m - 1)
        mon = c[:-1] / c[-1]
        comp[:, :, -1] = -mon
        comp[:, 0, -1] = -(c[0] - t) / c[-1]
        x = np.sort(np.linalg.eigvals(comp).real, axis=1)
        for _ in range(3):
            d = self.dR(x)
            step = np.where(d != 0, (self.R(x) - t[:, None]) / np.where(d != 0, d, 1), 0)
            x = x - step
        return x

    def nodes(self, n):
        k = np.arange(1, n + 1)
        t = np.cos((2 * k - 1) * np.pi / (2 * n))
        x = self.solve(t).ravel()
        order = np.argsort(x)
        return x[order], np.full(x.size, 1.0 / x.size)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        r = self.R(x)
        gap = np.maximum((1 - r) * (1 + r), 1e-300)
        return np.abs(self.dR(x)) / (self.m * math.pi * np.sqrt(gap))

    def pieces(self, n):
        out = []
        ends = {e for ab in self.components for e in ab}
        for u, v in self.branches:
            eu = -0.5 if u in ends else 0.0
            ev = -0.5 if v in ends else 0.0

            def h(x, u=u, v=v, eu=eu, ev=ev):
                return self.density(x) / ((x - u) ** eu * (v - x) ** ev)

            out.append((u, v, eu, ev, h, n))
        return out

    def angles(self, points):
        th = [math.acos(float(np.clip(self.R(p), -1, 1))) for p in points]
        return [t for t in th if 0 < t < math.pi]

    def angle_nodes(self, theta):
        theta = np.asarray(theta, dtype=float)
        x = self.solve(np.cos(theta).ravel()).reshape(theta.shape + (self.m,))
        return x, np.full(x.shape, 1.0 / (self.m * math.pi))

    def integrate(self, f, points=()):
        th = self.angles(points)

        def g(t):
            xs = self.solve(math.cos(t))[0]
            return sum(f(x) for x in xs) / (self.m * math.pi)

        return _quad(g, 0.0, math.pi, th)


_POT_STRIP_N = 21.0
_POT_MIN_N = 32
_POT_MAX_N = 2048


class _MultiInterval:
    """Equilibrium measure of a union of ``k >= 2`` disjoint intervals.

    The density is ``|q(x)| / (pi sqrt|H(x)|)`` with ``H = prod (x - a_j)(x - b_j)``
    and ``q`` monic of degree ``k - 1``, fixed by requiring the complex Green
    function to have zero real period across every gap.  All integrals are
    smooth after the substitution ``x = mid - half cos(theta)`` and are done
    with fixed Gauss-Legendre rules.  Coordinates are normalized so that the
    convex hull is ``[-1, 1]``.
    """

    _GL = 96

    def __init__(self, comps):
        self.components = comps
        lo, hi = comps[0][0], comps[-1][1]
        self.shift, self.scale = 0.5 * (lo + hi), 0.5 * (hi - lo)
        self.iv = [((a - self.shift) / self.scale, (b - self.shift) / self.scale) for a, b in comps]
        self.iv[0] = (-1.0, self.iv[0][1])
        self.iv[-1] = (self.iv[-1][0], 1.0)
        self.ends = np.array([e for ab in self.iv for e in ab])
        k = len(comps)
        gaps = [(self.iv[j][1], self.iv[j + 1][0]) for j in range(k - 1)]
        y, wt = special.roots_legendre(self._GL)
        th = 0.5 * np.pi * (y + 1)
        wt = 0.5 * np.pi * wt
        A = np.zeros((k - 1, k))
        for j, (u, v) in enumerate(gaps):
            t = 0.5 * (u + v) - 0.5 * (v - u) * np.cos(th)
            r = self._rest(t, u, v)
            A[j] = (wt / r) @ (t[:, None] ** np.arange(k)[None, :])
        c = np.linalg.solve(A[:, :-1], -A[:, -1])
        self.q = Polynomial(np.append(c, 1.0))
        self.gaps = gaps
        self._th, self._wt = th, wt
        self.mass = np.array([self._theta_integral(j, np.pi) for j in range(k)])
        # capacity: log Cap = U(z0) - g(z0) at z0 = 2
        xs, ws = self._nodes_norm(64)
        U0 = float(ws @ np.log(np.abs(2.0 - xs)))
        g0 = self._g_real(2.0)
        self.log_cap = U0 - g0
        self.capacity = self.scale * math.exp(self.log_cap)
        # analyticity strip (in the angle) of the density on each component,
        # limited by the other endpoints and the zeros of q in the gaps
        feats = np.concatenate([self.ends, np.real(self.q.roots())])
        self._strip = []
        for a, b in self.iv:
            out = feats[(feats < a) | (feats > b)]
            self._strip.append(float(np.min(self._width(out, a, b))) if out.size else np.inf)

    def _rest(self, t, u, v):
        """``sqrt|H(t)|`` divided by the factors vanishing at ``u`` and ``v``."""
        out = np.ones(np.shape(t))
        for e in self.ends:
            if e == u or e == v:
                continue
            out = out * np.abs(t - e)
        return np.sqrt(out)

    def _h(self, t, j):
        a, b = self.iv[j]
        return np.abs(self.q(t)) / (np.pi * self._rest(t, a, b))

    def _theta_integral(self, j, theta):
        a, b = self.iv[j]
        th = np.asarray(theta, dtype=float)[..., None] * (self._th / np.pi)
        t = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(th)
        return (self._h(t, j) * (self._wt / np.pi)).sum(axis=-1) * np.asarray(theta)

    def _nodes_norm(self, n):
        xs, ws = [], []
        k = np.arange(1, n + 1)
        th = (2 * k - 1) * np.pi / (2 * n)
        for j, (a, b) in enumerate(self.iv):
            t = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(th)
            xs.append(t)
            ws.append(self._h(t, j) * np.pi / n)
        return np.concatenate(xs), np.concatenate(ws)

    def _g_real(self, x):
        """Green function at a real (normalized) point."""
        for a, b in self.iv:
            if a <= x <= b:
                return 0.0
        y, wt = self._th / np.pi, self._wt / np.pi
        if x > 1.0 or x < -1.0:
            e = 1.0 if x > 1.0 else -1.0
            s = math.sqrt(abs(x - e)) * y
            t = e + np.sign(x - e) * s**2
            f = 2.0 * np.abs(self.q(t)) / self._rest(t, e, None)
            return float(math.sqrt(abs(x - e)) * (wt @ f))
        for u, v in self.gaps:
            if u < x < v:
                # integrate from the nearer gap end, where the 1/sqrt singularity sits
                mid, half = 0.5 * (u + v), 0.5 * (v - u)
                theta = math.acos(np.clip((mid - x) / half, -1, 1))
                if theta > 0.5 * np.pi:
                    theta = np.pi - theta
                    t = mid + half * np.cos(theta * y)
                else:
                    t = mid - half * np.cos(theta * y)
                f = self.q(t) / self._rest(t, u, v)
                return float(abs(theta * (wt @ f)))
        raise AssertionError("unreachable")

    def _F(self, t):
        out = self.q(t)
        for a, b in self.iv:
            out = out / (np.sqrt(t - a) * np.sqrt(t - b))
        return out

    def _g(self, z):
        x, y = z.real, abs(z.imag)
        g = self._g_real(x)
        if y == 0:
            return g
        # g(x) and the vertical leg both vary like sqrt(dist) near an endpoint,
        # so start the vertical leg away from the endpoints and finish horizontally
        x0 = x
        if np.min(np.abs(self.ends - x)) < 0.5 * y:
            cands = x + 0.5 * y * np.array([-2.0, -1.0, 1.0, 2.0])
            x0 = float(cands[np.argmax([np.min(np.abs(self.ends - c)) for c in cands])])
            g = self._g_real(x0)
        f = lambda u: (2 * u * 1j * self._F(complex(x0, u * u))).real
        val, _ = _integrate.quad(f, 0.0, math.sqrt(y), limit=200, epsabs=1e-14, epsrel=1e-12)
        if x0 != x:
            h = lambda t: self._F(complex(t, y)).real
            val += _integrate.quad(h, x0, x, limit=200, epsabs=1e-14, epsrel=1e-12)[0]
        return g + val

    @staticmethod
    def _width(z, a, b):
        """Half-width of the strip around ``[0, pi]`` where ``log|z - x(theta)|`` is analytic."""
        w = (0.5 * (a + b) - np.asarray(z, dtype=complex)) / (0.5 * (b - a))
        return np.abs(np.arccos(w).imag)

    def potential(self, z):
        z = (np.atleast_1d(np.asarray(z, dtype=complex)) - self.shift) / self.scale
        flat = z.ravel()
        res = np.zeros(flat.size)
        # the midpoint rule in the angle converges like exp(-2 n w) for strip
        # half-width w; take n from the width per point and component and
        # leave points too close to the set to the Green function path
        levels = np.zeros((len(self.iv), flat.size), dtype=int)
        for j, (a, b) in enumerate(self.iv):
            w = np.minimum(self._width(flat, a, b), self._strip[j])
            with np.errstate(divide="ignore"):
                need = np.ceil(np.log2(np.maximum(_POT_STRIP_N / w, _POT_MIN_N)))
            levels[j] = np.where(np.isfinite(need), need, 99).astype(int)
        fast = np.all(levels <= int(math.log2(_POT_MAX_N)), axis=0)
        for j, (a, b) in enumerate(self.iv):
            for lev in np.unique(levels[j, fast]):
                sel = np.nonzero(fast & (levels[j] == lev))[0]
                n = 2 ** int(lev)
                th = (2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n)
                t = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(th)
                wt = self._h(t, j) * np.pi / n
                for s in range(0, sel.size, 4096):
                    part = sel[s:s + 4096]
                    res[part] += np.log(np.abs(flat[part, None] - t)) @ wt
        for i in np.nonzero(~fast)[0]:
            res[i] = self.log_cap + self._g(flat[i])
        return res.reshape(z.shape) + math.log(self.scale)

    def angles(self, points):
        """Angles ``theta`` with ``x(theta)`` at one of ``points`` on some component."""
        out = []
        for a, b in self.components:
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            out += [math.acos(np.clip((mid - p) / half, -1, 1)) for p in points if a < p < b]
        return out

    def angle_nodes(self, theta):
        """Points ``x(theta)`` on every component and the smooth weights ``dmu / dtheta``."""
        theta = np.asarray(theta, dtype=float)
        xs, ws = [], []
        for j, (a, b) in enumerate(self.iv):
            t = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(theta)
            xs.append(t * self.scale + self.shift)
            ws.append(self._h(t, j))
        return np.stack(xs, axis=-1), np.stack(ws, axis=-1)

    def cdf(self, x):
        xn = (np.asarray(x, dtype=float) - self.shift) / self.scale
        out = np.zeros(xn.shape)
        for j, (a, b) in enumerate(self.iv):
            w = np.clip((2 * xn - a - b) / (b - a), -1, 1)
            out = out + self._theta_integral(j, np.arccos(-w))
        return out

    def nodes(self, n):
        xs, ws = self._nodes_norm(n)
        return xs * self.scale + self.shift, ws

    def pieces(self, n):
        out = []
        for j, (a, b) in enumerate(self.components):
            def h(x, j=j):
                # sqrt((x - a)(b - x)) already carries the factor ``scale``
                return self._h((x - self.shift) / self.scale, j)
            out.append((a, b, -0.5, -0.5, h, n))
        return out

    def integrate(self, f, points=()):
        total = 0.0
        for j, (a, b) in enumerate(self.components):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            th = [math.acos(np.clip((mid - p) / half, -1, 1)) for p in points if a < p < b]

            def g(t, j=j, mid=mid, half=half):
                x = mid - half * math.cos(t)
                return f(x) * float(self._h(np.array([(x - self.shift) / self.scale]), j)[0])

            total += _quad(g, 0.0, math.pi, th)
        return total


def _quad(f, a, b, points=()):
    edges = [a] + sorted(p for p in points if a < p < b) + [b]
    total = 0.0
    for u, v in zip(edges[:-1], edges[1:]):
        if v - u > 1e-15 * (b - a):
            total += _integrate.quad(f, u, v, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return total


def _project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.nonzero(u * np.arange(1, v.size + 1) > (css - 1))[0][-1]
    tau = (css[k] - 1) / (k + 1)
    return np.maximum(v - tau, 0)


@lru_cache(maxsize=64)
def _energy_cells(components: tuple[tuple[float, float], ...], cells: int) -> float:
    lo, hi = components[0][0], components[-1][1]
    shift, scale = 0.5 * (lo + hi), 0.5 * (hi - lo)
    L, Rr = [], []
    for a, b in components:
        a, b = (a - shift) / scale, (b - shift) / scale
        t = np.linspace(0, np.pi, cells + 1)
        e = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(t)
        e[0], e[-1] = a, b
        L.append(e[:-1])
        Rr.append(e[1:])
    left, right = np.concatenate(L), np.concatenate(Rr)
    h = right - left
    A, B = left[:, None], right[:, None]
    C, D = left[None, :], right[None, :]
    # exact interaction of uniform cell densities: int int log(1/|x-y|)
    G = -(_phi(B - C) - _phi(A - C) - _phi(B - D) + _phi(A - D)) / (h[:, None] * h[None, :])
    N = h.size
    kkt = np.zeros((N + 1, N + 1))
    kkt[:N, :N] = G
    kkt[:N, N] = -1.0
    kkt[N, :N] = 1.0
    rhs = np.zeros(N + 1)
    rhs[N] = 1.0
    sol = np.linalg.solve(kkt, rhs)
    w = sol[:N]
    if w.min() < 0:
        # projected gradient on the probability simplex
        w = _project_simplex(w)
        step = 1.0 / (2 * np.linalg.eigvalsh(G).max())
        energy = w @ G @ w
        for _ in range(100000):
            w_new = _project_simplex(w - step * 2 * (G @ w))
            e_new = w_new @ G @ w_new
            done = energy - e_new < 1e-10
            w, energy = w_new, e_new
            if done:
                break
    return scale * math.exp(-float(w @ G @ w))


@lru_cache(maxsize=256)
def _model(set: CompactSet1D):
    if isinstance(set, Circle):
        return _CircleModel(set.center, set.radius)
    if isinstance(set, PolynomialPreimage):
        if set.is_full_preimage:
            return _Pullback(set.coeffs, set.components)
        set = set.resolved
    comps = set.components
    if len(comps) == 1:
        return _Arcsine(*comps[0])
    return _MultiInterval(comps)


def energy_minimization(set: CompactSet1D, cells: int = ENERGY_CELLS) -> float:
    """Capacity from the cell-grid energy minimizer.

    Works for every real set, including those with closed forms, and is the
    independent route used to cross-check closed-form capacities.
    """
    return _energy_cells(tuple(set.components), cells)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureMeasure:
    """Positive weights on nodes representing a finite measure.

    ``potential``, when present, evaluates the logarithmic potential of the
    measure the quadrature stands for (exactly, not through the nodes).
    """

    nodes: np.ndarray
    weights: np.ndarray
    potential: Callable | None = field(default=None, repr=False)
    total_mass: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_mass", math.fsum(np.asarray(self.weights).tolist()))

    def integrate(self, f) -> complex | float:
        return np.dot(self.weights, f(self.nodes))


def capacity(set: CompactSet1D) -> float:
    """Logarithmic capacity of ``set``."""
    return float(_model(set).capacity)


def potential(set: CompactSet1D, z) -> np.ndarray:
    """``U(z) = int log|z - t| dmu_K(t)``, evaluated in closed form."""
    return _shaped(_model(set).potential, z)


def _shaped(fn, z):
    out = np.asarray(fn(np.atleast_1d(np.asarray(z)))).reshape(np.shape(z))
    return float(out) if out.ndim == 0 else out


def equilibrium_measure(set: CompactSet1D, n_nodes: int = DEFAULT_NODES) -> QuadratureMeasure:
    """Probability quadrature for the equilibrium measure of ``set``.

    One interval gives the arcsine (Gauss-Chebyshev) rule, a circle gives
    equispaced nodes, a full inverse image ``R^{-1}([-1,1])`` gives the
    preimages of the Chebyshev nodes under ``R``, and other unions use the
    energy-minimizing cell density with four Gauss points per cell.
    """
    if n_nodes < 8:
        raise ValueError("n_nodes must be at least 8")
    model = _model(set)
    x, w = model.nodes(n_nodes)
    return QuadratureMeasure(x, w, model.potential)


def log_potential(mu: QuadratureMeasure, z, *, discrete: bool = False):
    """Logarithmic potential ``sum_k w_k log|z - x_k|`` of a quadrature measure.

    When the measure carries its exact potential it is used unless
    ``discrete=True``.  In the discrete sum, terms with ``|z - x_k| < 1e-14``
    are clamped to ``w_k log(1e-14)``.
    """
    if mu.potential is not None and not discrete:
        return _shaped(mu.potential, z)
    z = np.asarray(z)
    d = np.abs(z[..., None] - mu.nodes)
    vals = np.log(np.maximum(d, _LOG_FLOOR)) @ mu.weights
    return float(vals) if vals.ndim == 0 else vals


def equilibrium_cdf(set: CompactSet1D, x) -> np.ndarray:
    """``mu_K((-inf, x])`` for real sets."""
    if not set.is_real:
        raise ValueError("the distribution function is defined for real sets only")
    return _model(set).cdf(x)


def log_szego(set: CompactSet1D, w: Weight1D) -> float:
    """``int log w dmu_K`` (may be ``-inf``)."""
    const, powers, step = _flatten(w)
    total = math.log(const)
    model = _model(set)
    for p in powers:
        total += p.exponent * float(np.squeeze(model.potential(np.array([p.center]))))
    if step is not None:
        if not set.is_real:
            raise ValueError("step weights are only supported on real sets")
        bp = np.asarray(step.breakpoints)
        F = np.concatenate([[0.0], model.cdf(bp), [1.0]])
        masses = np.diff(F)
        for m, v in zip(masses, step.values):
            if m > 1e-15:
                if v == 0:
                    return -math.inf
                total += m * math.log(v)
    return total


def szego_value(set: CompactSet1D, w: Weight1D) -> float:
    """``S(K, w) = exp(int log w dmu_K)``."""
    return math.exp(log_szego(set, w))


@lru_cache(maxsize=64)
def _jacobi(n: int, alpha: float, beta: float):
    return special.roots_jacobi(n, alpha, beta)


def _graded(edges: list) -> list:
    """Insert geometric cuts so no piece sees a singular edge closer than its own length.

    A piece ``[u, v]`` whose neighbour on the left has length ``L << v - u`` gets
    extra cuts at ``u + L 4^j`` (and symmetrically from ``v``), which keeps the
    Gauss-Jacobi rules on every sub-piece in their geometric convergence regime.
    """
    out = [edges[0]]
    for i, (u, v) in enumerate(zip(edges, edges[1:])):
        extra = []
        left = u - edges[i - 1] if i > 0 else math.inf
        right = edges[i + 2] - v if i + 2 < len(edges) else math.inf
        for L, sign, base in ((left, 1.0, u), (right, -1.0, v)):
            step = 4.0 * L
            while step < 0.5 * (v - u):
                extra.append(base + sign * step)
                step *= 4.0
        out.extend(sorted(extra))
        out.append(v)
    return out


def weighted_measure(set: CompactSet1D, w: Weight1D, n_nodes: int = DEFAULT_NODES) -> QuadratureMeasure:
    """Quadrature for ``w dmu_K``.

    The support is cut at the weight's singular points and on every piece a
    Gauss-Jacobi rule absorbs the endpoint behaviour of the density and of
    ``|x - x0|^p``, so that polynomials times the weight integrate to near
    machine precision on closed-form sets.
    """
    if isinstance(w, Constant):
        mu = equilibrium_measure(set, n_nodes)
        return QuadratureMeasure(mu.nodes, mu.weights * w.value)
    model = _model(set)
    if not set.is_real:
        x, q = model.nodes(n_nodes)
        return QuadratureMeasure(x, q * w(x))
    _, powers, _ = _flatten(w)
    centers = {p.center: p.exponent for p in powers}
    cuts = weight_singularities(w)
    xs, ws = [], []
    for s, t, es, et, h, n in model.pieces(n_nodes):
        edges = _graded([s, *(c for c in cuts if s < c < t), t])
        for u, v in zip(edges, edges[1:]):
            pu, pv = centers.get(u, 0.0), centers.get(v, 0.0)
            eu = (es if u == s else 0.0) + pu
            ev = (et if v == t else 0.0) + pv
            if eu <= -1 or ev <= -1:
                raise ValueError("weight times equilibrium density is not integrable")
            y, W = _jacobi(n, ev, eu)
            x = u + (v - u) * (1 + y) / 2
            smooth = h(x) * w(x) / ((x - u) ** pu * (v - x) ** pv)
            if u != s:
                smooth = smooth * (x - s) ** es
            if v != t:
                smooth = smooth * (t - x) ** et
            xs.append(x)
            ws.append(((v - u) / 2) ** (1 + eu + ev) * W * smooth)
    x = np.concatenate(xs)
    q = np.concatenate(ws)
    order = np.argsort(x)
    return QuadratureMeasure(x[order], q[order])


def integrate(set: CompactSet1D, f: Callable, points: Sequence = ()) -> float:
    """Adaptive ``int f dmu_K`` for integrands with isolated (log) singularities.

    ``points`` lists locations where ``f`` is singular or not smooth.
    """
    return _model(set).integrate(f, points)
