"""Analytic functions on the unit disc as a small closed algebra.

Every node evaluates ``f`` and ``f'`` exactly (up to rounding) on numpy
arrays.  All representations here are analytic on a neighbourhood of the
closed disc, so internal code may sample them on ``|z| = 1``; the public
:func:`eval` / :func:`eval_deriv` enforce ``|z| < 1``.
"""

from __future__ import annotations

import ast
import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiscDomainError",
    "DiscFunction",
    "TaylorPoly",
    "KernelPower",
    "BlaschkeProduct",
    "Constant",
    "Sum",
    "Product",
    "IntegerPower",
    "Dilation",
    "MobiusWeighted",
    "ShiftMultiply",
    "SpaceParams",
    "AliasingWarning",
    "eval",
    "eval_deriv",
    "taylor_coeffs",
    "binom_coeff",
    "binom_coeffs",
    "mobius_transform",
    "pseudohyperbolic",
    "majorant_eval",
    "MajorantValue",
    "find_zeros",
    "winding_number",
    "parse",
]


class DiscDomainError(ValueError):
    """A point or parameter lies outside the open unit disc."""


class AliasingWarning(UserWarning):
    pass


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _check_disc(z, what="z"):
    a = np.abs(_as_complex(z))
    if np.any(~np.isfinite(a)) or np.any(a >= 1.0):
        raise DiscDomainError(f"{what} must lie in the open unit disc, got |{what}| = {np.max(a)!r}")


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "+" if c.imag >= 0 else "-"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


class DiscFunction:
    """Base class of the expression tree.

    Subclasses implement ``_eval(z, deriv)`` returning ``(f, f')`` with
    ``f'`` set to ``None`` when ``deriv`` is false.
    """

    def _eval(self, z, deriv):  # pragma: no cover - abstract
        raise NotImplementedError

    # structural zero list in the closed disc, or None when unknown
    def _zeros(self):
        return None

    def analytic_radius(self) -> float:
        """Radius R > 1 of a disc |z| < R on which the representation is analytic."""
        raise NotImplementedError

    def to_expr(self) -> str:
        raise NotImplementedError

    # -- evaluation ---------------------------------------------------------

    def __call__(self, z):
        _check_disc(z)
        return self.values(z)

    def deriv(self, z):
        _check_disc(z)
        return self.values_and_derivs(z)[1]

    def values(self, z):
        """Evaluate without the domain check (closed disc allowed)."""
        z = _as_complex(z)
        return self._eval(z, False)[0]

    def values_and_derivs(self, z):
        z = _as_complex(z)
        return self._eval(z, True)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        return Sum(self, _lift(other))

    def __radd__(self, other):
        return Sum(_lift(other), self)

    def __mul__(self, other):
        return Product(self, _lift(other))

    def __rmul__(self, other):
        return Product(_lift(other), self)

    def __sub__(self, other):
        return Sum(self, Product(Constant(-1.0), _lift(other)))

    def __neg__(self):
        return Product(Constant(-1.0), self)

    def __pow__(self, n):
        return IntegerPower(self, n)

    def __repr__(self):
        return self.to_expr()


def _lift(x) -> DiscFunction:
    if isinstance(x, DiscFunction):
        return x
    return Constant(complex(x))


@dataclass(frozen=True, repr=False)
class Constant(DiscFunction):
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))

    def _eval(self, z, deriv):
        f = np.full(z.shape, self.c, dtype=complex)
        return f, (np.zeros(z.shape, dtype=complex) if deriv else None)

    def _zeros(self):
        return [] if self.c != 0 else None

    def analytic_radius(self):
        return math.inf

    def to_expr(self):
        return f"const({_fmt(self.c)})"


@dataclass(frozen=True, repr=False)
class TaylorPoly(DiscFunction):
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coeffs)
        if not cs:
            cs = (0j,)
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _eval(self, z, deriv):
        a = self.coeffs
        f = np.full(z.shape, a[-1], dtype=complex)
        df = np.zeros(z.shape, dtype=complex) if deriv else None
        for c in a[-2::-1]:
            if deriv:
                df = df * z + f
            f = f * z + c
        return f, df

    def _zeros(self):
        a = np.array(self.coeffs)
        # a negligible leading term only adds roots near infinity but wrecks the companion matrix
        nz = np.flatnonzero(np.abs(a) > 1e-14 * np.abs(a).max()) if np.any(a) else np.array([], dtype=int)
        if nz.size == 0:
            return None
        a = a[: nz[-1] + 1]
        # numpy.roots wants the leading coefficient first
        roots = np.roots(a[::-1]) if a.size > 1 else np.array([])
        return [complex(r) for r in roots if abs(r) <= 1.0 + 1e-12]

    def analytic_radius(self):
        return math.inf

    def to_expr(self):
        return "poly(" + ", ".join(_fmt(c) for c in self.coeffs) + ")"


@dataclass(frozen=True, repr=False)
class KernelPower(DiscFunction):
    """``z -> (1 - conj(w) z) ** (-2 kappa)`` on the principal branch."""

    w: complex
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "kappa", float(self.kappa))
        _check_disc(self.w, "w")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    def _eval(self, z, deriv):
        wb = self.w.conjugate()
        base = 1.0 - wb * z
        f = np.exp(-2.0 * self.kappa * np.log(base))
        df = 2.0 * self.kappa * wb * f / base if deriv else None
        return f, df

    def _zeros(self):
        return []

    def analytic_radius(self):
        aw = abs(self.w)
        return math.inf if aw == 0 else 1.0 / aw

    def to_expr(self):
        return f"kernel(w={_fmt(self.w)}, kappa={self.kappa!r})"


@dataclass(frozen=True, repr=False)
class BlaschkeProduct(DiscFunction):
    """Finite Blaschke product normalised so each factor is positive at 0 (or ``z`` for a zero at 0)."""

    zeros: tuple

    def __post_init__(self):
        zs = tuple(complex(a) for a in self.zeros)
        for a in zs:
            _check_disc(a, "zero")
        object.__setattr__(self, "zeros", zs)

    def _eval(self, z, deriv):
        f = np.ones(z.shape, dtype=complex)
        logd = np.zeros(z.shape, dtype=complex) if deriv else None
        for a in self.zeros:
            if a == 0:
                fac = z
                if deriv:
                    logd = logd + 1.0 / z
            else:
                ab = a.conjugate()
                fac = (abs(a) / a) * (a - z) / (1.0 - ab * z)
                if deriv:
                    # d/dz log((a-z)/(1-ab z)) = -1/(a-z) + ab/(1-ab z)
                    logd = logd - 1.0 / (a - z) + ab / (1.0 - ab * z)
            f = f * fac
        if not deriv:
            return f, None
        # product rule without dividing by a possibly vanishing factor
        df = np.zeros(z.shape, dtype=complex)
        for i in range(len(self.zeros)):
            term = np.ones(z.shape, dtype=complex)
            for j, a in enumerate(self.zeros):
                if a == 0:
                    term = term * (np.ones_like(z) if i == j else z)
                    continue
                ab = a.conjugate()
                u = abs(a) / a
                if i == j:
                    term = term * (-u * (1.0 - abs(a) ** 2) / (1.0 - ab * z) ** 2)
                else:
                    term = term * (u * (a - z) / (1.0 - ab * z))
            df = df + term
        return f, df

    def _zeros(self):
        return list(self.zeros)

    def analytic_radius(self):
        m = max((abs(a) for a in self.zeros), default=0.0)
        return math.inf if m == 0 else 1.0 / m

    def to_expr(self):
        return "blaschke(" + ", ".join(_fmt(a) for a in self.zeros) + ")"


@dataclass(frozen=True, repr=False)
class Sum(DiscFunction):
    left: DiscFunction
    right: DiscFunction

    def _eval(self, z, deriv):
        f1, d1 = self.left._eval(z, deriv)
        f2, d2 = self.right._eval(z, deriv)
        return f1 + f2, (d1 + d2 if deriv else None)

    def analytic_radius(self):
        return min(self.left.analytic_radius(), self.right.analytic_radius())

    def to_expr(self):
        return f"sum({self.left.to_expr()}, {self.right.to_expr()})"


@dataclass(frozen=True, repr=False)
class Product(DiscFunction):
    left: DiscFunction
    right: DiscFunction

    def _eval(self, z, deriv):
        f1, d1 = self.left._eval(z, deriv)
        f2, d2 = self.right._eval(z, deriv)
        return f1 * f2, (d1 * f2 + f1 * d2 if deriv else None)

    def _zeros(self):
        a, b = self.left._zeros(), self.right._zeros()
        if a is None or b is None:
            return None
        return a + b

    def analytic_radius(self):
        return min(self.left.analytic_radius(), self.right.analytic_radius())

    def to_expr(self):
        return f"product({self.left.to_expr()}, {self.right.to_expr()})"


@dataclass(frozen=True, repr=False)
class IntegerPower(DiscFunction):
    base: DiscFunction
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("power must be a positive integer")
        object.__setattr__(self, "n", int(self.n))

    def _eval(self, z, deriv):
        f, d = self.base._eval(z, deriv)
        fn1 = f ** (self.n - 1)
        return fn1 * f, (self.n * fn1 * d if deriv else None)

    def _zeros(self):
        b = self.base._zeros()
        return None if b is None else b * self.n

    def analytic_radius(self):
        return self.base.analytic_radius()

    def to_expr(self):
        return f"pow({self.base.to_expr()}, {self.n})"


@dataclass(frozen=True, repr=False)
class Dilation(DiscFunction):
    inner: DiscFunction
    rho: float

    def __post_init__(self):
        object.__setattr__(self, "rho", float(self.rho))
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")

    def _eval(self, z, deriv):
        f, d = self.inner._eval(self.rho * z, deriv)
        return f, (self.rho * d if deriv else None)

    def _zeros(self):
        zs = self.inner._zeros()
        if zs is None:
            return None
        return [a / self.rho for a in zs if abs(a) < self.rho]

    def analytic_radius(self):
        return self.inner.analytic_radius() / self.rho

    def to_expr(self):
        return f"dilate({self.inner.to_expr()}, {self.rho!r})"


def _disc_automorphism(w: complex, z):
    return (w - z) / (1.0 - w.conjugate() * z)


@dataclass(frozen=True, repr=False)
class MobiusWeighted(DiscFunction):
    """The weighted composition ``f((w-z)/(1-conj(w)z)) (1-|w|^2)^kappa / (1-conj(w)z)^(2 kappa)``."""

    inner: DiscFunction
    w: complex
    kappa: float

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "kappa", float(self.kappa))
        _check_disc(self.w, "w")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    def _eval(self, z, deriv):
        w, k = self.w, self.kappa
        wb = w.conjugate()
        base = 1.0 - wb * z
        phi = (w - z) / base
        weight = (1.0 - abs(w) ** 2) ** k * np.exp(-2.0 * k * np.log(base))
        f, d = self.inner._eval(phi, deriv)
        if not deriv:
            return f * weight, None
        dphi = -(1.0 - abs(w) ** 2) / base**2
        dweight = 2.0 * k * wb * weight / base
        return f * weight, d * dphi * weight + f * dweight

    def _zeros(self):
        zs = self.inner._zeros()
        if zs is None:
            return None
        # the automorphism is an involution, so zeros map through it
        return [complex(_disc_automorphism(self.w, a)) for a in zs]

    def analytic_radius(self):
        R = self.inner.analytic_radius()
        aw = abs(self.w)
        if aw == 0:
            return R
        lo, hi = 1.0, 1.0 / aw
        if math.isinf(R):
            return hi
        # largest s with max_{|z|=s} |phi_w(z)| < R; extremes sit on the line through w
        def worst(s):
            return max(abs((aw - s) / (1 - aw * s)), (aw + s) / (1 + aw * s))

        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if worst(mid) < R:
                lo = mid
            else:
                hi = mid
        return lo

    def to_expr(self):
        return f"mobius({self.inner.to_expr()}, w={_fmt(self.w)}, kappa={self.kappa!r})"


@dataclass(frozen=True, repr=False)
class ShiftMultiply(DiscFunction):
    inner: DiscFunction

    def _eval(self, z, deriv):
        f, d = self.inner._eval(z, deriv)
        return z * f, (f + z * d if deriv else None)

    def _zeros(self):
        zs = self.inner._zeros()
        return None if zs is None else [0j] + zs

    def analytic_radius(self):
        return self.inner.analytic_radius()

    def to_expr(self):
        return f"shift({self.inner.to_expr()})"


# ---------------------------------------------------------------------------
# space parameters


@dataclass(frozen=True)
class SpaceParams:
    """The pair (alpha, p); ``kappa = alpha/p`` is the invariance index, ``sigma = 1/kappa``."""

    alpha: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "p", float(self.p))
        if not (self.alpha > 0 and self.p > 0):
            raise ValueError(f"alpha and p must be positive, got {self.alpha}, {self.p}")

    @property
    def kappa(self) -> float:
        return self.alpha / self.p

    @property
    def sigma(self) -> float:
        return self.p / self.alpha

    @classmethod
    def from_sigma(cls, alpha: float, sigma: float) -> "SpaceParams":
        return cls(alpha, sigma * alpha)


# ---------------------------------------------------------------------------
# functional API


def eval(f: DiscFunction, z):
    """``f(z)`` for ``|z| < 1``."""
    return f(z)


def eval_deriv(f: DiscFunction, z):
    """``f'(z)`` for ``|z| < 1``."""
    return f.deriv(z)


def binom_coeff(alpha: float, k: int) -> float:
    """Coefficient of ``z**k`` in ``(1 - z) ** (-alpha)``."""
    c = 1.0
    for j in range(1, k + 1):
        c *= (alpha + j - 1) / j
    return c


def binom_coeffs(alpha: float, K: int) -> np.ndarray:
    """``[c_alpha(0), ..., c_alpha(K)]`` by the same recurrence."""
    j = np.arange(1, K + 1, dtype=float)
    return np.concatenate([[1.0], np.cumprod((alpha + j - 1.0) / j)])


def _dft_coeffs(f: DiscFunction, N: int, r: float) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(N) / N
    samples = f.values(r * np.exp(1j * theta))
    return np.fft.fft(samples) / N


def taylor_coeffs(f: DiscFunction, K: int, r_sample: float = 0.5, N: int | None = None) -> np.ndarray:
    """First ``K + 1`` Taylor coefficients by a DFT on the circle ``|z| = r_sample``.

    Emits :class:`AliasingWarning` if the upper half of the spectrum is not
    negligible (relative 1e-10), which bounds the aliasing error.
    """
    if not 0.0 < r_sample < 1.0:
        raise DiscDomainError("r_sample must lie in (0, 1)")
    return _taylor_coeffs(f, K, r_sample, N)


def _taylor_coeffs(f, K, r_sample, N=None, warn=True):
    if N is None:
        N = max(256, 8 * (K + 1))
    N = max(N, 4 * (K + 1))
    F = _dft_coeffs(f, N, r_sample)
    scale = np.max(np.abs(F))
    tail = np.max(np.abs(F[N // 2 :])) if scale > 0 else 0.0
    if warn and scale > 0 and tail > 1e-10 * scale:
        warnings.warn(
            f"Taylor coefficient aliasing tail {tail / scale:.2e} exceeds 1e-10", AliasingWarning, stacklevel=3
        )
    k = np.arange(K + 1)
    return F[: K + 1] * r_sample ** (-k.astype(float))


def mobius_transform(f: DiscFunction, w: complex, kappa: float) -> MobiusWeighted:
    return MobiusWeighted(f, w, kappa)


def pseudohyperbolic(z, w):
    """``|(z - w) / (1 - conj(z) w)|``."""
    _check_disc(z)
    _check_disc(w, "w")
    z = _as_complex(z)
    w = _as_complex(w)
    return np.abs((z - w) / (1.0 - np.conj(z) * w))


@dataclass(frozen=True)
class MajorantValue:
    value: float
    tail_bound: float
    K: int
    flags: tuple = ()

    def __float__(self):
        return self.value


def majorant_eval(
    f: DiscFunction, r: float, K: int = 200, r_sample: float | None = None, rtol: float = 1e-8
) -> MajorantValue:
    """``sum_k |a_k| r^k`` truncated at ``K`` with a geometric tail estimate.

    Coefficients are sampled on ``|z| = r_sample`` (default ``r``, which keeps
    the rounding noise in ``|a_k| r^k`` at machine level).
    """
    if not 0.0 < r < 1.0:
        raise DiscDomainError("r must lie in (0, 1)")
    rs = r if r_sample is None else r_sample
    a = _taylor_coeffs(f, K, rs, warn=False)
    terms = np.abs(a) * r ** np.arange(K + 1, dtype=float)
    value = float(np.sum(terms))
    flags = []
    R = f.analytic_radius()
    if math.isinf(R) and isinstance(f, TaylorPoly) and f.degree <= K:
        tail = 0.0
    else:
        q = r / R if not math.isinf(R) else 0.0
        tk = terms[-10:]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = tk[1:] / tk[:-1]
        ratios = ratios[np.isfinite(ratios)]
        if ratios.size:
            q = max(q, float(np.max(ratios)))
        tail = math.inf if q >= 1.0 else float(terms[-1] * q / (1.0 - q))
    if tail > rtol * max(value, 1e-300):
        flags.append("tail_bound_exceeds_tolerance")
    return MajorantValue(value, tail, K, tuple(flags))


# ---------------------------------------------------------------------------
# zeros


def winding_number(f: DiscFunction, r: float = 1.0, n: int = 4096) -> float:
    """``(1/2pi) * integral of Re(z f'/f) dtheta`` on ``|z| = r``: the zero count inside."""
    z = r * np.exp(2j * np.pi * np.arange(n) / n)
    fv, dv = f.values_and_derivs(z)
    return float(np.mean(np.real(z * dv / fv)))


def find_zeros(f: DiscFunction, tol: float = 1e-10) -> list:
    """Zeros in the open disc, with multiplicity.

    Uses the structural zero list when the representation provides one,
    otherwise roots of a truncated Taylor series polished by Newton's method
    and validated against the argument principle.
    """
    zs = f._zeros()
    if zs is not None:
        return sorted((complex(a) for a in zs if abs(a) < 1.0), key=lambda a: (abs(a), np.angle(a)))
    n = int(round(winding_number(f)))
    if n <= 0:
        return []
    N = 1024
    while True:
        F = _dft_coeffs(f, N, 1.0)
        if np.max(np.abs(F[N // 2 :])) <= 1e-14 * np.max(np.abs(F)) or N >= 1 << 16:
            break
        N *= 2
    a = F[: N // 2]
    keep = np.flatnonzero(np.abs(a) > 1e-15 * np.max(np.abs(a)))
    a = a[: keep[-1] + 1]
    roots = np.roots(a[::-1])
    cand = [complex(x) for x in roots if abs(x) < 1.0 + 1e-6]
    polished = []
    for z0 in cand:
        z = z0
        for _ in range(50):
            fv, dv = f.values_and_derivs(np.array([z]))
            if dv[0] == 0:
                break
            step = fv[0] / dv[0]
            z = z - step
            if abs(step) < 1e-15:
                break
        if abs(z) < 1.0:
            polished.append(complex(z))
    polished.sort(key=lambda a: (abs(a), np.angle(a)))
    if len(polished) != n:
        warnings.warn(f"found {len(polished)} zeros, argument principle gives {n}", RuntimeWarning, stacklevel=2)
    return polished


# ---------------------------------------------------------------------------
# text serialisation

_NUM_I = re.compile(r"(?<![\w.])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)[ij]\b")


def _num(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return complex(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _num(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
        a, b = _num(node.left), _num(node.right)
        return a + b if isinstance(node.op, ast.Add) else a - b
    if isinstance(node, ast.Name) and node.id in ("i", "j"):
        return 1j
    raise ValueError(f"expected a number, got {ast.dump(node)}")


def _real(x: complex, name: str) -> float:
    if x.imag != 0:
        raise ValueError(f"{name} must be real")
    return x.real


def _build(node) -> DiscFunction:
    if not isinstance(node, ast.Call) or not isinstance(node.func, ast.Name):
        try:
            return Constant(_num(node))
        except ValueError:
            raise ValueError(f"cannot parse {ast.unparse(node)!r}") from None
    name = node.func.id
    args = node.args
    kw = {k.arg: k.value for k in node.keywords}

    def fn_args():
        return [_build(a) for a in args]

    if name == "poly":
        return TaylorPoly(tuple(_num(a) for a in args))
    if name == "const":
        return Constant(_num(args[0]))
    if name == "kernel":
        w = _num(kw.pop("w", args[0] if args else ast.Constant(0)))
        kappa = _real(_num(kw.pop("kappa", args[1] if len(args) > 1 else None)), "kappa")
        return KernelPower(w, kappa)
    if name == "blaschke":
        return BlaschkeProduct(tuple(_num(a) for a in args))
    if name in ("sum", "product"):
        parts = fn_args()
        if not parts:
            raise ValueError(f"{name}() needs arguments")
        out = parts[0]
        cls = Sum if name == "sum" else Product
        for p in parts[1:]:
            out = cls(out, p)
        return out
    if name == "pow":
        return IntegerPower(_build(args[0]), int(_real(_num(args[1]), "n")))
    if name == "dilate":
        rho = kw.get("rho", args[1] if len(args) > 1 else None)
        return Dilation(_build(args[0]), _real(_num(rho), "rho"))
    if name == "mobius":
        w = kw.get("w", args[1] if len(args) > 1 else None)
        kappa = kw.get("kappa", args[2] if len(args) > 2 else None)
        return MobiusWeighted(_build(args[0]), _num(w), _real(_num(kappa), "kappa"))
    if name == "shift":
        return ShiftMultiply(_build(args[0]))
    raise ValueError(f"unknown function constructor {name!r}")


def parse(text: str) -> DiscFunction:
    """Parse expressions such as ``product(kernel(w=0.3+0.1i, kappa=0.5), blaschke(0.2, -0.4i))``."""
    src = _NUM_I.sub(r"\1j", text.strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse function expression {text!r}: {exc.msg}") from None
    try:
        return _build(tree.body)
    except (IndexError, TypeError) as exc:
        raise ValueError(f"malformed function expression {text!r}") from exc
