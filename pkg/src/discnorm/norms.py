"""The quantities ||f||_{alpha,p}, H^p and Besov norms, the Dyakonov functional, shift-operator formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .funcrep import DiscFunction, SpaceParams, TaylorPoly, _dft_coeffs, binom_coeffs, find_zeros
from .quadrature import (
    QuadratureGrid,
    RadialWeight,
    _theta,
    circle_means,
    graded_circle_means,
    hardy_stein_derivative,
    jacobi_rule,
    lp_density_means,
    u_rule,
)

__all__ = [
    "NormResult",
    "METHODS",
    "norm_apalpha",
    "norm_all_routes",
    "norm_hardy",
    "norm_besov",
    "dyakonov_functional",
    "shift_norm_formula",
    "shift_norm_closed_form",
    "shift_expansion_integral",
]

METHODS = ("definition", "littlewood_paley", "bergman", "coefficients")


@dataclass(frozen=True)
class NormResult:
    """A computed norm; ``error_estimate`` refers to ``p_power_value``."""

    value: float
    p_power_value: float
    method: str
    error_estimate: float
    flags: tuple = field(default=())

    @classmethod
    def from_power(cls, pv: float, p: float, method: str, err: float, flags=()) -> "NormResult":
        pv = max(float(pv), 0.0)
        return cls(pv ** (1.0 / p), pv, method, abs(float(err)), tuple(flags))

    @property
    def relative_error(self) -> float:
        return self.error_estimate / self.p_power_value if self.p_power_value else self.error_estimate


def _is_even_integer(p: float) -> bool:
    return p == round(p) and round(p) % 2 == 0


@dataclass(frozen=True)
class _Plan:
    grid: QuadratureGrid
    gamma: float  # f ~ z**m at the origin: |f|^(p-2)|f'|^2 ~ u**gamma
    m: int
    flags: tuple
    err_factor: float
    by_parts: bool


def _plan(f: DiscFunction, p: float, grid: QuadratureGrid) -> _Plan:
    zs = find_zeros(f)
    m = sum(1 for a in zs if abs(a) < 1e-12)
    off = [a for a in zs if abs(a) >= 1e-12]
    flags = []
    factor = 1.0
    nonsmooth = bool(off) and not _is_even_integer(p)
    if nonsmooth:
        # |f|^(p-2) is not smooth across these zeros: brute refinement
        grid = grid.scaled(4)
        factor = 10.0
        flags.append("zeros_in_disc_nonsmooth_integrand")
    gamma = m * p / 2.0 - 1.0 if m else 0.0
    return _Plan(grid, gamma, m, tuple(flags), factor, nonsmooth)


def _lp_power(f, p, alpha, grid, gamma, f0p):
    W = RadialWeight.omega(alpha).with_origin_power(gamma)
    u, w = u_rule(W, grid.radial_n)
    G = lp_density_means(f, p, u, grid.n_theta)
    if gamma:
        G = G / u**gamma
    return f0p + 0.25 * p * p * float(w @ G)


def _definition_power(f, p, alpha, grid, gamma, f0p, zeros):
    W = RadialWeight.alpha_minus_1(alpha).with_origin_power(gamma)
    u, w = u_rule(W, grid.radial_n)
    r = np.sqrt(u)
    inner = QuadratureGrid(grid.n_theta, max(8, grid.radial_n // 2))
    D = hardy_stein_derivative(f, p, r, inner, zeros=zeros)
    h = D / (2.0 * r)
    if gamma:
        h = h / u**gamma
    return f0p + float(w @ h)


@dataclass(frozen=True)
class _OriginQuotient(DiscFunction):
    """``f(z) / z^m`` for values away from the origin."""

    inner: DiscFunction
    m: int

    def _eval(self, z, deriv):
        f, _ = self.inner._eval(z, False)
        return f / z**self.m, None


def _by_parts_power(f, p, alpha, grid, zeros, m):
    """``M(1) + (1-alpha) int_0^1 (M(1) - M(u)) (1-u)^(alpha-2) du`` with ``M(u) = M_p^p(sqrt u, f)``.

    This is the defining integral after one integration by parts in ``u``; it
    needs ``|f|^p`` only, which stays bounded at zeros.  The ``u`` range is split
    at every ``|a|^2`` for zeros ``a``, circles near zeros use graded angular
    rules, the last piece carries the Jacobi weight ``(1-u)^(alpha-1)`` and a zero
    of order ``m`` at the origin becomes a ``u^(m p / 2)`` weight on the first piece.
    """
    off = [a for a in zeros if abs(a) >= 1e-12]
    nt, n = grid.n_theta, max(8, grid.radial_n // 2)

    def M(u):
        return graded_circle_means(f, p, np.sqrt(u), off, nt)

    M1 = float(M(np.array([1.0]))[0])
    if alpha == 1:
        return M1
    brk = sorted({0.0, *(abs(a) ** 2 for a in off)})
    if brk[-1] < 0.5:
        brk.append(0.5)
    total = 0.0
    for lo, hi in zip(brk[:-1], brk[1:]):
        u, w, gap = jacobi_rule(n, 0.0, 0.0, lo, hi)
        wt = w * (1.0 - u) ** (alpha - 2.0)
        if lo == 0.0 and m:
            gamma = m * p / 2.0
            g = _OriginQuotient(f, m)
            uj, wj, _ = jacobi_rule(n, 0.0, gamma, lo, hi)
            Mg = graded_circle_means(g, p, np.sqrt(uj), off, nt)
            total += M1 * float(np.sum(wt)) - float(wj @ (Mg * (1.0 - uj) ** (alpha - 2.0)))
        else:
            total += float(wt @ (M1 - M(u)))
    u, w, gap = jacobi_rule(n, alpha - 1.0, 0.0, brk[-1], 1.0)
    total += float(w @ ((M1 - M(u)) / gap))
    return M1 + (1.0 - alpha) * total


def _bergman_power(f, p, alpha, grid, m):
    gamma = m * p / 2.0
    W = RadialWeight.alpha_minus_2(alpha).with_origin_power(gamma)
    u, w = u_rule(W, grid.radial_n)
    M = circle_means(f, p, np.sqrt(u), grid.n_theta)
    if gamma:
        M = M / u**gamma
    return (alpha - 1.0) * float(w @ M)


def _coefficients(f: DiscFunction, tol=1e-15):
    """Taylor coefficients sampled on the unit circle until the spectrum has decayed."""
    if isinstance(f, TaylorPoly):
        return np.array(f.coeffs), 0.0
    N = 512
    while True:
        F = _dft_coeffs(f, N, 1.0)
        scale = np.max(np.abs(F))
        tail = np.max(np.abs(F[N // 2 :]))
        if tail <= tol * scale or N >= 1 << 20:
            return F[: N // 2], float(tail)
        N *= 2


def _coefficient_power(f, alpha):
    a, tail = _coefficients(f)
    c = binom_coeffs(alpha, a.size - 1)
    pv = float(np.sum(np.abs(a) ** 2 / c))
    # the next block of coefficients is bounded by the spectral tail
    K = a.size
    err = tail**2 * K * max(1.0, float(1.0 / binom_coeffs(alpha, 2 * K)[-1]))
    return pv, err


def norm_apalpha(
    f: DiscFunction,
    params: SpaceParams,
    method: str = "littlewood_paley",
    grid: QuadratureGrid | None = None,
) -> NormResult:
    """``||f||_{alpha,p}`` by one of the routes in :data:`METHODS`.

    ``definition`` integrates the Hardy-Stein derivative of the integral
    means against ``(1-r^2)^(alpha-1)``; ``littlewood_paley`` integrates
    ``|f|^(p-2)|f'|^2`` against ``omega_alpha(|z|^2)``; ``bergman`` (alpha > 1)
    is the area integral of ``|f|^p (1-|z|^2)^(alpha-2)``; ``coefficients``
    (p = 2) sums ``|a_k|^2 / c_alpha(k)``.
    """
    alpha, p = params.alpha, params.p
    grid = grid or QuadratureGrid()
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "bergman" and not alpha > 1:
        raise ValueError("the bergman route needs alpha > 1")
    if method == "coefficients" and p != 2:
        raise ValueError("the coefficients route needs p = 2")

    if method == "coefficients":
        pv, err = _coefficient_power(f, alpha)
        return NormResult.from_power(pv, p, method, err)

    f0p = float(abs(complex(f.values(np.array([0j]))[0])) ** p)
    zeros = find_zeros(f)
    plan = _plan(f, p, grid)

    def compute(g):
        if method == "littlewood_paley":
            return _lp_power(f, p, alpha, g, plan.gamma, f0p)
        if method == "definition":
            if plan.by_parts:
                return _by_parts_power(f, p, alpha, g, zeros, plan.m)
            return _definition_power(f, p, alpha, g, plan.gamma, f0p, zeros)
        return _bergman_power(f, p, alpha, g, plan.m)

    if method == "definition" and plan.by_parts:
        # the by-parts form resolves zeros through graded circle rules
        grid_, factor, flags = grid, 1.0, ("zeros_in_disc_integrated_by_parts",)
    else:
        grid_, factor, flags = plan.grid, plan.err_factor, plan.flags
    pv = compute(grid_)
    coarse = compute(grid_.halved())
    err = factor * abs(pv - coarse) + 4 * np.finfo(float).eps * abs(pv)
    return NormResult.from_power(pv, p, method, err, flags)


def norm_all_routes(f: DiscFunction, params: SpaceParams, grid: QuadratureGrid | None = None) -> dict:
    """Every route applicable to ``params``, keyed by method name."""
    out = {}
    for m in METHODS:
        if m == "bergman" and not params.alpha > 1:
            continue
        if m == "coefficients" and params.p != 2:
            continue
        out[m] = norm_apalpha(f, params, m, grid)
    return out


def norm_hardy(f: DiscFunction, p: float, n_theta: int = 256) -> NormResult:
    """``||f||_{H^p}`` from the boundary integral mean (representations are analytic across the circle)."""
    prev = None
    n = n_theta
    while True:
        val = float(circle_means(f, p, 1.0, n)[0])
        if prev is not None and abs(val - prev) <= 1e-14 * abs(val) or n >= 1 << 16:
            err = 0.0 if prev is None else abs(val - prev)
            return NormResult.from_power(val, p, "hardy", err)
        prev, n = val, 2 * n


def norm_besov(f: DiscFunction, params: SpaceParams, grid: QuadratureGrid | None = None) -> NormResult:
    """``(|f(0)|^p + (alpha+p-1) int |f'|^p (1-|z|^2)^(alpha+p-2) dm)^(1/p)`` for ``p + alpha > 1``."""
    alpha, p = params.alpha, params.p
    if not p + alpha > 1:
        raise ValueError("the Besov norm is defined here only for p + alpha > 1")
    grid = grid or QuadratureGrid()
    f0p = float(abs(complex(f.values(np.array([0j]))[0])) ** p)

    def compute(g):
        u, w = u_rule(RadialWeight.jacobi(alpha + p - 2.0), g.radial_n)
        z = np.sqrt(u)[:, None] * np.exp(1j * _theta(g.n_theta))[None, :]
        _, d = f.values_and_derivs(z)
        return f0p + (alpha + p - 1.0) * float(w @ (np.abs(d) ** p).mean(axis=1))

    pv = compute(grid)
    err = abs(pv - compute(grid.halved()))
    return NormResult.from_power(pv, p, "besov", err)


def _graded_offsets(delta: float, m: int = 8):
    """Rule on [-pi, pi] for integrands peaked at 0 with width ``delta``; weights include 1/(2 pi)."""
    brk = [0.0]
    h = delta / 8.0
    while h < math.pi:
        brk.append(h)
        h *= 2.0
    brk.append(math.pi)
    brk = np.array(brk)
    t, tw = np.polynomial.legendre.leggauss(m)
    lo, hi = brk[:-1, None], brk[1:, None]
    s = (0.5 * (lo + hi) + 0.5 * (hi - lo) * t).ravel()
    w = (0.5 * (hi - lo) * tw).ravel()
    return np.concatenate([-s, s]), np.concatenate([w, w]) / (2.0 * math.pi)


def dyakonov_functional(
    f: DiscFunction, params: SpaceParams, n_theta: int = 64, radial_n: int = 48
) -> float:
    """``int_0^1 int int |f(e^{it}) - f(re^{i theta})|^p (1-r^2)^(alpha-1) / |e^{it} - re^{i theta}|^2``.

    The ``t`` integral is taken as an offset ``s = t - theta`` on a rule graded
    towards ``s = 0`` at the scale ``1 - r`` of the kernel; ``theta`` uses the
    trapezoidal rule and ``r`` a Gauss-Jacobi rule for ``(1-r)^(alpha-1)``.
    """
    alpha, p = params.alpha, params.p
    if not 0 < alpha < 1:
        raise ValueError("the Dyakonov functional is used for 0 < alpha < 1")
    if not p >= 1:
        raise ValueError("the Dyakonov functional is used for p >= 1")
    r, wr, gap = jacobi_rule(radial_n, alpha - 1.0, 0.0)
    theta = _theta(n_theta)
    total = 0.0
    for ri, wi, di in zip(r, wr, gap):
        s, ws = _graded_offsets(di)
        interior = f.values(ri * np.exp(1j * theta))
        boundary = f.values(np.exp(1j * (theta[:, None] + s[None, :])))
        kern = 1.0 / np.abs(np.exp(1j * s) - ri) ** 2
        inner = (np.abs(boundary - interior[:, None]) ** p * kern[None, :]) @ ws
        total += wi * (1.0 + ri) ** (alpha - 1.0) * float(inner.mean())
    return total


def _shift_weighted_integral(M, alpha, p, n):
    """``(1-alpha) int_0^1 M(u) (1 - u^(p/2)) (1-u)^(alpha-2) du`` with ``M`` smooth.

    Split at u = 1/2 so the ``u^(p/2)`` endpoint behaviour at 0 and the
    ``(1-u)^(alpha-1)`` behaviour at 1 each get their own Gauss-Jacobi rule.
    """
    s = 0.5 * p
    u1, w1, _ = jacobi_rule(n, 0.0, 0.0, 0.0, 0.5)
    u2, w2, _ = jacobi_rule(n, 0.0, s, 0.0, 0.5)
    u3, w3, gap3 = jacobi_rule(n, alpha - 1.0, 0.0, 0.5, 1.0)
    A = w1 @ (M(u1) * (1.0 - u1) ** (alpha - 2.0))
    B = w2 @ (M(u2) * (1.0 - u2) ** (alpha - 2.0))
    q = -np.expm1(s * np.log(u3)) / gap3
    C = w3 @ (M(u3) * q)
    return (1.0 - alpha) * float(A - B + C)


def shift_norm_formula(params: SpaceParams, n: int = 64) -> float:
    """``||S||_{alpha,p}`` for the shift ``Sf = z f`` when ``0 < alpha < 1``, by quadrature."""
    alpha, p = params.alpha, params.p
    if not 0 < alpha < 1:
        raise ValueError("the shift formula needs 0 < alpha < 1")
    val = 1.0 + _shift_weighted_integral(lambda u: np.ones_like(u), alpha, p, n)
    return val ** (1.0 / p)


def shift_norm_closed_form(params: SpaceParams) -> float:
    """Gamma-function evaluation of the same quantity: ``(Gamma(alpha) Gamma(1+p/2) / Gamma(alpha+p/2))^(1/p)``."""
    a, s = params.alpha, 0.5 * params.p
    return math.exp((gammaln(a) + gammaln(1.0 + s) - gammaln(a + s)) / params.p)


def shift_expansion_integral(
    f: DiscFunction, params: SpaceParams, n: int = 64, n_theta: int = 256
) -> float:
    """``2(1-alpha) int_0^1 M_p^p(r,f) (1-r^p) (1-r^2)^(alpha-2) r dr``."""
    alpha, p = params.alpha, params.p
    if not 0 < alpha < 1:
        raise ValueError("needs 0 < alpha < 1")
    zeros = find_zeros(f)
    return _shift_weighted_integral(lambda u: graded_circle_means(f, p, np.sqrt(u), zeros, n_theta), alpha, p, n)
