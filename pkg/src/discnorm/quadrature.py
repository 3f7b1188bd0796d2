"""Circle means, radial Gauss rules for singular weights, and area integrals.

Radial integrals are always taken in ``u = r**2``: with the normalised area
measure, ``dm = du dtheta / (2 pi)``, so

    integral over D of F(z) W(|z|^2) dm(z) = integral_0^1 W(u) <F>(u) du

where ``<F>(u)`` is the mean of ``F`` over the circle of radius ``sqrt(u)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import digamma, roots_jacobi, roots_legendre

from .funcrep import DiscFunction, find_zeros

__all__ = [
    "QuadratureGrid",
    "RadialWeight",
    "SingularIntegrandWarning",
    "jacobi_rule",
    "radial_rule",
    "u_rule",
    "omega_alpha",
    "circle_mean",
    "circle_means",
    "area_integral",
    "hardy_stein_derivative",
    "lp_density_means",
    "origin_order",
]


class SingularIntegrandWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadratureGrid:
    """Grid sizes shared by the norm routes: ``n_theta`` circle nodes, ``radial_n`` Gauss nodes."""

    n_theta: int = 256
    radial_n: int = 128

    def __post_init__(self):
        if self.n_theta < 16:
            raise ValueError("n_theta must be at least 16")
        if self.radial_n < 4:
            raise ValueError("radial_n must be at least 4")

    def halved(self) -> "QuadratureGrid":
        return QuadratureGrid(max(16, self.n_theta // 2), max(4, self.radial_n // 2))

    def scaled(self, k: int) -> "QuadratureGrid":
        return QuadratureGrid(self.n_theta * k, self.radial_n * k)


@dataclass(frozen=True)
class RadialWeight:
    """A weight ``W(u) = u**origin_power * base(u)`` on ``0 < u < 1``.

    ``kind`` selects ``base``: ``"jacobi"`` is ``(1-u)**exponent``,
    ``"omega"`` is ``omega_alpha(u)`` with ``alpha = exponent`` and
    ``"log_kernel"`` is ``log(1/u)``.
    """

    kind: str
    exponent: float = 0.0
    origin_power: float = 0.0

    def __post_init__(self):
        if self.kind not in ("jacobi", "omega", "log_kernel"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "omega" and not self.exponent > 0:
            raise ValueError("omega weight needs alpha > 0")
        if not self.origin_power > -1:
            raise ValueError("origin_power must exceed -1")

    @classmethod
    def jacobi(cls, beta: float) -> "RadialWeight":
        return cls("jacobi", float(beta))

    @classmethod
    def plain(cls) -> "RadialWeight":
        return cls("jacobi", 0.0)

    @classmethod
    def alpha_minus_1(cls, alpha: float) -> "RadialWeight":
        return cls("jacobi", float(alpha) - 1.0)

    @classmethod
    def alpha_minus_2(cls, alpha: float) -> "RadialWeight":
        return cls("jacobi", float(alpha) - 2.0)

    @classmethod
    def omega(cls, alpha: float) -> "RadialWeight":
        return cls("omega", float(alpha))

    @classmethod
    def log_kernel(cls) -> "RadialWeight":
        return cls("log_kernel")

    def with_origin_power(self, gamma: float) -> "RadialWeight":
        return replace(self, origin_power=float(gamma))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "jacobi":
            base = (1.0 - u) ** self.exponent
        elif self.kind == "omega":
            base = _omega(self.exponent, u)
        else:
            base = -np.log(u)
        return base * u**self.origin_power if self.origin_power else base


# ---------------------------------------------------------------------------
# Gauss rules


@lru_cache(maxsize=512)
def _jacobi_unit(n: int, a: float, b: float):
    x, w = roots_jacobi(n, a, b)
    return x, w


def jacobi_rule(n: int, a: float, b: float = 0.0, lo: float = 0.0, hi: float = 1.0):
    """Gauss-Jacobi rule for ``(hi-u)**a (u-lo)**b`` on ``[lo, hi]``.

    Returns ``(u, w, hi - u)``; the last array is computed without cancellation.
    """
    if not (a > -1 and b > -1):
        raise ValueError(f"Jacobi exponents must exceed -1, got {a}, {b}")
    x, w = _jacobi_unit(int(n), float(a), float(b))
    half = 0.5 * (hi - lo)
    u = lo + half * (1.0 + x)
    gap = half * (1.0 - x)
    return u, w * half ** (a + b + 1.0), gap


def _lanczos_gauss(x, w, n):
    """n-point Gauss rule of the discrete measure sum_i w_i delta(x_i) (Lanczos, full reorthogonalisation)."""
    mu0 = float(np.sum(w))
    q = np.sqrt(w / mu0)
    Q = np.zeros((x.size, n))
    a = np.zeros(n)
    b = np.zeros(max(n - 1, 0))
    q_prev = np.zeros_like(q)
    beta = 0.0
    for k in range(n):
        Q[:, k] = q
        v = x * q
        a[k] = q @ v
        v = v - a[k] * q - beta * q_prev
        for _ in range(2):
            v -= Q[:, : k + 1] @ (Q[:, : k + 1].T @ v)
        if k == n - 1:
            break
        beta = float(np.linalg.norm(v))
        b[k] = beta
        q_prev, q = q, v / beta
    J = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
    nodes, vecs = np.linalg.eigh(J)
    return nodes, mu0 * vecs[0, :] ** 2


@lru_cache(maxsize=32)
def _graded_panels(origin_power: float = 0.0, order: int = 20):
    """Composite Gauss-Legendre on [0, 1], geometrically graded towards both endpoints.

    Grading towards 0 is deep enough that the innermost panel carries less than
    ~1e-17 of a ``u**origin_power`` mass; that panel uses Gauss-Jacobi in ``u``
    with the weight divided back out, so all returned weights are plain.
    """
    depth = int(min(1000, max(80, math.ceil(60.0 / (1.0 + origin_power)))))
    inner = np.linspace(1.0 / 64, 1.0 - 1.0 / 64, 63)
    left = 2.0 ** -np.arange(depth, 6, -1, dtype=float)
    right = 1.0 - 2.0 ** -np.arange(7, 81, dtype=float)
    brk = np.unique(np.concatenate([left, inner, right, [1.0]]))
    t, tw = roots_legendre(order)
    lo, hi = brk[:-1, None], brk[1:, None]
    u = (0.5 * (lo + hi) + 0.5 * (hi - lo) * t).ravel()
    w = (0.5 * (hi - lo) * tw).ravel()
    eps = brk[0]
    u0, w0, _ = jacobi_rule(order, 0.0, origin_power, 0.0, eps)
    # the innermost weights already contain u**origin_power
    w0 = w0 / u0**origin_power
    return np.concatenate([u0, u]), np.concatenate([w0, w])


@lru_cache(maxsize=256)
def _u_rule_cached(kind: str, exponent: float, origin_power: float, n: int):
    if kind == "jacobi":
        u, w, gap = jacobi_rule(n, exponent, origin_power)
        return u, w
    u, w = _graded_panels(origin_power)
    base = _omega(exponent, u) if kind == "omega" else -np.log(u)
    dens = w * base * u**origin_power
    return _lanczos_gauss(u, dens, n)


def u_rule(weight: RadialWeight, n: int, vanishing_at_one: bool = False):
    """Gauss nodes ``u_i`` and weights with ``sum w_i h(u_i) ~ int_0^1 h(u) W(u) du``.

    For a Jacobi exponent in (-2, -1] pass ``vanishing_at_one=True``: the caller
    promises that ``h`` vanishes at least linearly at ``u = 1``; the rule is then
    the exponent+1 rule with weights divided by ``1 - u_i``.
    """
    if n < 4:
        raise ValueError("radial rules need n >= 4")
    if weight.kind == "jacobi" and weight.exponent <= -1.0:
        if not vanishing_at_one or weight.exponent <= -2.0:
            raise ValueError(f"invalid weight exponent {weight.exponent} (must exceed -1)")
        u, w, gap = jacobi_rule(n, weight.exponent + 1.0, weight.origin_power)
        return u, w / gap
    return _u_rule_cached(weight.kind, float(weight.exponent), float(weight.origin_power), int(n))


def radial_rule(weight: RadialWeight, n: int, vanishing_at_one: bool = False):
    """Nodes ``r_i`` and weights with ``sum w_i h(r_i) ~ int_0^1 h(r) W(r^2) 2r dr``.

    Gauss-type in ``u = r**2``, so the rule is exact for ``h`` a polynomial in
    ``r**2`` of degree below ``2n`` (degree below ``n`` for the caller-contract
    Jacobi weights).
    """
    u, w = u_rule(weight, n, vanishing_at_one)
    return np.sqrt(u), w


# ---------------------------------------------------------------------------
# omega_alpha


def _omega(alpha: float, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > 0.5
    if np.any(big):
        y = 1.0 - x[big]
        term = y**alpha / alpha
        total = term.copy()
        yj = y**alpha
        for j in range(1, 400):
            yj = yj * y
            term = yj / (alpha + j)
            total += term
            if np.all(term <= 1e-16 * total):
                break
        out[big] = total
    small = ~big
    if np.any(small):
        xs = x[small]
        # omega = -log x - psi(alpha) - gamma - sum_k c_{1-alpha}(k) x^k / k
        acc = np.zeros_like(xs)
        c = 1.0
        xk = np.ones_like(xs)
        for k in range(1, 400):
            c *= (k - alpha) / k
            xk = xk * xs
            term = c * xk / k
            acc += term
            if np.all(np.abs(term) <= 1e-17 * (1.0 + np.abs(acc))) or c == 0.0:
                break
        out[small] = -np.log(xs) - digamma(alpha) - np.euler_gamma - acc
    return out


def omega_alpha(alpha: float, x):
    """``int_x^1 (1-r)**(alpha-1) dr / r`` for ``0 < x <= 1``.

    Near ``x = 1`` the series ``sum_j (1-x)**(alpha+j)/(alpha+j)`` is summed
    directly; for ``x <= 1/2`` the equivalent log/digamma expansion is used,
    since the series converges too slowly there.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("omega_alpha diverges at x = 0")
    if np.any(xa > 1):
        raise ValueError("x must lie in (0, 1]")
    res = _omega(alpha, np.atleast_1d(xa))
    return float(res[0]) if np.ndim(x) == 0 else res.reshape(xa.shape)


# ---------------------------------------------------------------------------
# circle means and area integrals


def _theta(n):
    return 2.0 * np.pi * np.arange(n) / n


def _abs_pow(a, p):
    if p == 2:
        return a * a
    if p == 1:
        return a
    with np.errstate(divide="ignore"):
        return a**p


def circle_means(f: DiscFunction, p: float, r, n_theta: int = 256):
    """Vectorised ``M_p^p(r, f)`` for an array of radii (closed disc allowed)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    z = r[:, None] * np.exp(1j * _theta(n_theta))[None, :]
    return np.mean(_abs_pow(np.abs(f.values(z)), p), axis=1)


def _graded_arc(a, b, da, db, m):
    """Gauss-Legendre panels on [a, b], halving in width towards each end down to scale ``d``."""
    mid = 0.5 * (a + b)
    brk = [a, mid, b]
    h = (mid - a) / 2
    while h > da / 4:
        brk.append(a + h)
        h /= 2
    h = (b - mid) / 2
    while h > db / 4:
        brk.append(b - h)
        h /= 2
    brk = np.unique(brk)
    t, tw = np.polynomial.legendre.leggauss(m)
    lo, hi = brk[:-1, None], brk[1:, None]
    return (0.5 * (lo + hi) + 0.5 * (hi - lo) * t).ravel(), (0.5 * (hi - lo) * tw).ravel()


def graded_circle_rule(angles, scales, m: int = 12):
    """Angular rule (weights sum to 1) graded towards each ``angles[k]`` at length scale ``scales[k]``."""
    order = np.argsort(np.mod(angles, 2 * np.pi))
    ang = np.mod(np.asarray(angles, float), 2 * np.pi)[order]
    sc = np.asarray(scales, float)[order]
    nodes, weights = [], []
    for k in range(ang.size):
        a = ang[k]
        b = ang[k + 1] if k + 1 < ang.size else ang[0] + 2 * np.pi
        if b - a <= 0:
            continue
        x, w = _graded_arc(a, b, sc[k], sc[(k + 1) % ang.size], m)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights) / (2 * np.pi)


def graded_circle_means(f: DiscFunction, p: float, r, zeros, n_theta: int = 256, near: float = 0.25):
    """``M_p^p(r, f)`` where circles passing near a zero of ``f`` get a graded angular rule.

    Circles farther than ``near`` from every zero in ``zeros`` use the
    trapezoidal rule; the others are split at the angles of the nearby zeros and
    graded towards them at the scale of the distance ``| r - |a| |``, so the
    nonsmooth factor ``|z - a|^p`` is resolved.  Each graded panel has ``n_theta / 16``
    (at least 8) nodes.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = circle_means(f, p, r, n_theta)
    zs = np.asarray([a for a in zeros if abs(a) > 1e-12], dtype=complex)
    if zs.size == 0:
        return out
    m = max(8, n_theta // 16)
    for i, ri in enumerate(r):
        d = np.abs(ri - np.abs(zs))
        close = d < near
        if not close.any():
            continue
        th, w = graded_circle_rule(np.angle(zs[close]), np.maximum(d[close], 1e-300), m)
        out[i] = float(_abs_pow(np.abs(f.values(ri * np.exp(1j * th))), p) @ w)
    return out


def circle_mean(f: DiscFunction, p: float, r: float, n_theta: int = 256) -> float:
    """Trapezoidal mean of ``|f(r e^{i theta})|**p``."""
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1)")
    return float(circle_means(f, p, r, n_theta)[0])


def area_integral(F, weight: RadialWeight, grid: QuadratureGrid = QuadratureGrid(), vanishing_at_one=False) -> float:
    """``int_D F(z) W(|z|^2) dm(z)`` with ``m(D) = 1`` (radial Gauss rule x circle average).

    ``F`` maps a complex array to a real array of the same shape.
    """
    u, w = u_rule(weight, grid.radial_n, vanishing_at_one)
    z = np.sqrt(u)[:, None] * np.exp(1j * _theta(grid.n_theta))[None, :]
    vals = np.asarray(F(z), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite integrand samples in area_integral")
    return float(w @ vals.mean(axis=1))


def _lp_density(f, z, p):
    fv, dv = f.values_and_derivs(z)
    d2 = dv.real**2 + dv.imag**2
    if p == 2:
        return d2
    a = np.abs(fv)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a ** (p - 2.0) * d2
    if p > 2:
        out = np.where(a == 0, 0.0, out)
    return out


def lp_density_means(f: DiscFunction, p: float, u, n_theta: int):
    """Circle means of ``|f|**(p-2) |f'|**2`` at radii ``sqrt(u)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    z = np.sqrt(u)[:, None] * np.exp(1j * _theta(n_theta))[None, :]
    return _lp_density(f, z, p).mean(axis=1)


def origin_order(f: DiscFunction, zeros=None) -> int:
    zs = find_zeros(f) if zeros is None else zeros
    return sum(1 for a in zs if abs(a) < 1e-12)


def _near_zero(zeros, z, tol=1e-8):
    if not zeros:
        return False
    zs = np.asarray(zeros)
    zf = z.ravel()
    for a in zs:
        if np.min(np.abs(zf - a)) < tol:
            return True
    return False


def hardy_stein_derivative(f: DiscFunction, p: float, r, grid: QuadratureGrid = QuadratureGrid(), zeros=None):
    """``d/dr M_p^p(r, f)`` as ``(p^2 / 2r) int_{rD} |f|^(p-2) |f'|^2 dm``.

    Written as ``(p^2 r / 2) int_0^1 <|f|^(p-2)|f'|^2>(r^2 v) dv`` and evaluated
    with a Gauss rule in ``v``; a zero of order ``m`` at the origin is absorbed
    into a Jacobi weight ``v**(m p/2 - 1)``.  ``r`` may be an array.
    """
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r >= 1):
        raise ValueError("r must lie in (0, 1)")
    zs = find_zeros(f) if zeros is None else zeros
    m = origin_order(f, zs)
    gamma = m * p / 2.0 - 1.0 if m else 0.0
    v, wv, _ = jacobi_rule(grid.radial_n, 0.0, gamma)
    u = (r[:, None] ** 2) * v[None, :]
    z = np.sqrt(u)[..., None] * np.exp(1j * _theta(grid.n_theta))
    if p < 2 and _near_zero([a for a in zs if abs(a) >= 1e-12], z):
        warnings.warn("grid node within 1e-8 of a zero with p < 2", SingularIntegrandWarning, stacklevel=2)
    G = _lp_density(f, z, p).mean(axis=-1)
    if gamma:
        G = G / u**gamma
        # v**gamma was moved into the weight; r**(2 gamma) comes back out
        out = 0.5 * p * p * r ** (1.0 + 2.0 * gamma) * (G @ wv)
    else:
        out = 0.5 * p * p * r * (G @ wv)
    return float(out[0]) if scalar else out
