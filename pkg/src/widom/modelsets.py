"""Closed-form extremal data for four model sets in several variables.

* ``Polydisk(n)``: the closed unit polydisk in C^n (its sup-norms live on the torus),
* ``EuclideanBall2``: the closed Euclidean unit ball in C^2,
* ``RealBall2``: the real disk ``{x in R^2 : x_1^2 + x_2^2 <= 1}``,
* ``Simplex(n)``: the standard simplex ``{x in R^n : x_j >= 0, sum x_j <= 1}``.

For each set the module knows monomial sup-norms, directional Chebyshev
constants ``tau(K, theta)``, the pluricomplex Green function ``V_K`` and the
capacities ``c(K)`` and ``C(K)`` measuring the growth of ``V_K`` along
max-norm and Euclidean-norm rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np
from scipy import optimize

RAY_RADIUS = 1e6


@dataclass(frozen=True)
class Polydisk:
    n: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("the polydisk needs n >= 1")


@dataclass(frozen=True)
class EuclideanBall2:
    n = 2


@dataclass(frozen=True)
class RealBall2:
    n = 2


@dataclass(frozen=True)
class Simplex:
    n: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("the simplex needs n >= 1")


ModelSet = Polydisk | EuclideanBall2 | RealBall2 | Simplex


def parse_model(name: str):
    """``"polydisk:n"``, ``"ball2"``, ``"realball2"`` or ``"simplex:n"``."""
    head, _, tail = name.strip().lower().partition(":")
    if head == "ball2" and not tail:
        return EuclideanBall2()
    if head == "realball2" and not tail:
        return RealBall2()
    if head in ("polydisk", "simplex"):
        try:
            n = int(tail)
        except ValueError:
            raise ValueError(f"model set {name!r} needs a dimension, e.g. {head}:2") from None
        return Polydisk(n) if head == "polydisk" else Simplex(n)
    raise ValueError(f"unknown model set {name!r}")


def model_name(K) -> str:
    if isinstance(K, Polydisk):
        return f"polydisk:{K.n}"
    if isinstance(K, Simplex):
        return f"simplex:{K.n}"
    return "ball2" if isinstance(K, EuclideanBall2) else "realball2"


def _pow0(x: float, e: float) -> float:
    # x ** e with 0 ** 0 = 1
    return 1.0 if e == 0 else x**e


def _check_alpha(K, alpha) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != K.n or min(alpha) < 0:
        raise ValueError(f"multi-index {alpha} does not fit a set in {K.n} variables")
    return alpha


def monomial_sup_norm(K, alpha: Sequence[int]) -> float:
    """``sup_K |z^alpha|``."""
    alpha = _check_alpha(K, alpha)
    d = sum(alpha)
    if isinstance(K, Polydisk) or d == 0:
        return 1.0
    if isinstance(K, (EuclideanBall2, RealBall2)):
        a1, a2 = alpha
        return _pow0(a1, a1 / 2) * _pow0(a2, a2 / 2) / d ** (d / 2)
    if isinstance(K, Simplex):
        return math.prod(_pow0(a / d, a) for a in alpha)
    raise TypeError(f"unsupported model set {K!r}")


def chebyshev_norm(K, alpha: Sequence[int]) -> float:
    """Norm of the monic Chebyshev polynomial for ``z^alpha``.

    Only for sets invariant under the torus action (polydisk and complex
    ball), where averaging over that action shows the monomial is extremal.
    """
    if isinstance(K, (Polydisk, EuclideanBall2)):
        return monomial_sup_norm(K, alpha)
    raise ValueError(f"no closed-form Chebyshev norm for {model_name(K)}")


def _theta(K, theta) -> np.ndarray:
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if th.size == 1 and K.n == 2:
        th = np.array([th[0], 1.0 - th[0]])
    if th.size != K.n or np.any(th < -1e-15) or abs(th.sum() - 1.0) > 1e-12:
        raise ValueError(f"theta={theta} is not a point of the simplex of directions")
    return np.clip(th, 0.0, 1.0)


def directional_tau(K, theta) -> float:
    """Directional Chebyshev constant ``tau(K, theta)`` (``0^0 = 1`` on the boundary)."""
    th = _theta(K, theta)
    if isinstance(K, Polydisk):
        return 1.0
    if isinstance(K, EuclideanBall2):
        return _pow0(th[0], th[0] / 2) * _pow0(th[1], th[1] / 2)
    if isinstance(K, RealBall2):
        t = th[0]
        return math.sqrt(_pow0(t, t) * (2 - t) ** (2 - t) / 4 ** (2 - t))
    raise ValueError(f"directional constants are not available for {model_name(K)}")


def tau_minus(K) -> float:
    """``inf_theta tau(K, theta)`` in closed form."""
    if isinstance(K, Polydisk):
        return 1.0
    if isinstance(K, EuclideanBall2):
        return 1.0 / math.sqrt(2.0)
    if isinstance(K, RealBall2):
        return 0.4
    raise ValueError(f"tau^- is not available for {model_name(K)}")


@dataclass(frozen=True, eq=False)
class DirectionalProfile:
    theta_grid: np.ndarray
    values: np.ndarray
    theta_min: float
    tau_min: float


def profile_minimum(K, grid: int | Sequence[float] = 1001, tol: float = 1e-10) -> DirectionalProfile:
    """Sample ``theta_1 -> tau(K, (theta_1, 1 - theta_1))`` and locate its minimum.

    An integer ``grid`` gives that many equispaced samples of ``[0, 1]``
    (a single sample is taken at ``theta_1 = 1``).
    The grid minimum is refined by bounded Brent search on the neighbouring
    grid cell.
    """
    if K.n != 2:
        raise ValueError("profiles are computed for sets in two variables")
    if isinstance(grid, int):
        # a single sample sits at the direction (1, 0)
        th = np.linspace(0.0, 1.0, grid) if grid > 1 else np.ones(1)
    else:
        th = np.asarray(grid, dtype=float)
    vals = np.array([directional_tau(K, t) for t in th])
    k = int(np.argmin(vals))
    t_best, v_best = float(th[k]), float(vals[k])
    if th.size >= 3:
        lo, hi = th[max(k - 1, 0)], th[min(k + 1, th.size - 1)]
        res = optimize.minimize_scalar(lambda t: directional_tau(K, t), bracket=None,
                                       bounds=(lo, hi), method="bounded",
                                       options={"xatol": tol})
        if res.fun <= v_best:
            t_best, v_best = float(res.x), float(res.fun)
    return DirectionalProfile(th, vals, t_best, v_best)


def _h(t):
    t = np.maximum(t, 1.0)
    return t + np.sqrt((t - 1.0) * (t + 1.0))


def extremal_function(K, z) -> np.ndarray:
    """Pluricomplex Green function ``V_K(z)`` for points ``z`` of shape ``(..., n)``."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != K.n:
        raise ValueError("points must have the set's dimension last")
    if isinstance(K, EuclideanBall2):
        return np.log(np.maximum(np.linalg.norm(z, axis=-1), 1.0))
    if isinstance(K, Polydisk):
        return np.log(np.maximum(np.max(np.abs(z), axis=-1), 1.0))
    if isinstance(K, RealBall2):
        u = np.sum(np.abs(z) ** 2, axis=-1) + np.abs(np.sum(z * z, axis=-1) - 1.0)
        return 0.5 * np.log(_h(u))
    if isinstance(K, Simplex):
        t = np.sum(np.abs(z), axis=-1) + np.abs(np.sum(z, axis=-1) - 1.0)
        return np.log(_h(t))
    raise TypeError(f"unsupported model set {K!r}")


def _direction(x: np.ndarray, n: int, norm: str) -> np.ndarray:
    zeta = x[:n] + 1j * x[n:]
    scale = np.linalg.norm(zeta) if norm == "euclid" else np.max(np.abs(zeta))
    return zeta / scale


def ray_limit(K, norm: str = "euclid", radius: float = RAY_RADIUS, starts: int = 8,
              seed: int = 0) -> float:
    """``max_{|zeta| = 1} V_K(R zeta) - log R`` at ``R = radius``.

    ``norm`` selects the Euclidean (``"euclid"``) or max (``"max"``) unit
    sphere.  The maximization uses multistart Nelder-Mead over complex
    directions, seeded for reproducibility, plus the coordinate and diagonal
    directions as deterministic starts.
    """
    if norm not in ("euclid", "max"):
        raise ValueError("norm must be 'euclid' or 'max'")
    n = K.n
    logR = math.log(radius)

    def f(x):
        zeta = _direction(x, n, norm)
        return -(float(extremal_function(K, radius * zeta)) - logR)

    rng = np.random.default_rng(seed)
    inits = [np.concatenate([np.ones(n), np.zeros(n)]), np.concatenate([np.eye(n)[0], np.zeros(n)])]
    inits += [rng.standard_normal(2 * n) for _ in range(starts)]
    best = -np.inf
    for x0 in inits:
        res = optimize.minimize(f, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 400 * n})
        best = max(best, -float(res.fun))
    return best


def capacities_cC(K, numeric: bool = False, seed: int = 0) -> tuple[float, float]:
    """``(c(K), C(K))``: closed forms, or ray-limit estimates when ``numeric``.

    The simplex ``c`` has no closed form here and is always estimated.
    """
    if numeric:
        return (math.exp(-ray_limit(K, "max", seed=seed)), math.exp(-ray_limit(K, "euclid", seed=seed)))
    if isinstance(K, Polydisk):
        return 1.0, 1.0
    if isinstance(K, EuclideanBall2):
        return 1.0 / math.sqrt(2.0), 1.0
    if isinstance(K, RealBall2):
        return 1.0 / (2.0 * math.sqrt(2.0)), 0.5
    if isinstance(K, Simplex):
        return math.exp(-ray_limit(K, "max", seed=seed)), 1.0 / (4.0 * math.sqrt(K.n))
    raise TypeError(f"unsupported model set {K!r}")


def ball_log_inf(n: int = 2, tol: float = 1e-10) -> float:
    """``inf_{0<r<1} (1+r)^(2n-1) / (1-r) * log(1/r)`` by golden-section search."""
    f = lambda r: (1 + r) ** (2 * n - 1) / (1 - r) * math.log(1 / r)
    res = optimize.minimize_scalar(f, bracket=(1e-3, 0.1, 0.9), method="golden", tol=tol)
    return float(res.fun)


def ball_l2_floor(d: int, S_value: float, n: int = 2) -> float:
    """Lower bound for ``||P||^2`` in ``L^2(w dsigma)`` over monic degree-``d`` P on the ball."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    if d == 0:
        return S_value
    return S_value / (2.0**d * math.exp(2 * d * ball_log_inf(n)))


def mahler_polydisk_floor(alpha: Sequence[int], S_value: float = 1.0) -> tuple[float, float]:
    """``(1 / prod binom(|alpha|, alpha_j), S / prod binom(|alpha|, alpha_j)^2)``."""
    alpha = tuple(int(a) for a in alpha)
    d = sum(alpha)
    b = math.prod(comb(d, a) for a in alpha)
    return 1.0 / b, S_value / b**2


def sphere_quadrature(n_s: int = 32, n_theta: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Points and weights for normalized surface measure on the unit sphere of C^2.

    Uses ``z = (sqrt(s) e^{i a}, sqrt(1-s) e^{i b})`` with ``s`` uniform on
    ``[0, 1]`` (Gauss-Legendre) and trapezoid rules in both angles; exact for
    ``|P|^2`` when ``P`` has degree ``< min(n_s, n_theta / 2)``.
    """
    y, wy = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * (y + 1)
    ang = 2 * np.pi * np.arange(n_theta) / n_theta
    S, A, B = np.meshgrid(s, ang, ang, indexing="ij")
    W = np.broadcast_to((0.5 * wy)[:, None, None], S.shape) / n_theta**2
    z = np.stack([np.sqrt(S) * np.exp(1j * A), np.sqrt(1 - S) * np.exp(1j * B)], axis=-1)
    return z.reshape(-1, 2), W.ravel()


def sphere_samples(m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` uniform samples of the unit sphere in C^2."""
    g = rng.standard_normal((m, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :2] + 1j * g[:, 2:]
