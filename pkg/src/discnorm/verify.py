"""Numerical checks of the contractive inequalities, identities and counterexamples.

Every check returns a :class:`VerificationReport` with a signed margin.  The
pass convention depends on ``kind``:

* ``identity``: ``|margin| <= tolerance``;
* ``inequality``: ``margin >= -tolerance``;
* ``strict``: ``margin > tolerance`` (the claim is a strict inequality and the
  tolerance is the smallest gap we accept as resolved);
* ``exploration``: always passes; findings go into ``notes``.

Margins and tolerances are absolute; ``relative_margin`` divides by ``|rhs|``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .funcrep import (
    BlaschkeProduct,
    Constant,
    Dilation,
    DiscFunction,
    KernelPower,
    Product,
    ShiftMultiply,
    SpaceParams,
    Sum,
    TaylorPoly,
    find_zeros,
    majorant_eval,
    mobius_transform,
)
from .levelsets import level_set_profile, phi_from_profile, zero_count_estimate
from .norms import (
    NormResult,
    _is_even_integer,
    dyakonov_functional,
    norm_all_routes,
    norm_apalpha,
    norm_besov,
    norm_hardy,
    shift_expansion_integral,
    shift_norm_formula,
)
from .quadrature import QuadratureGrid

DEFAULT_SEED = 0xD15C
KINDS = ("identity", "inequality", "strict", "exploration")


@dataclass
class VerificationReport:
    check_id: str
    inputs: dict
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    kind: str
    passed: bool = field(init=False)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        self.passed = self._evaluate()

    def _evaluate(self) -> bool:
        m, tol = self.margin, self.tolerance
        if not math.isfinite(m):
            return self.kind == "exploration"
        if self.kind == "identity":
            ok = abs(m) <= tol
        elif self.kind == "inequality":
            ok = m >= -tol
        elif self.kind == "strict":
            ok = m > tol
        else:
            ok = True
        # sub-checks bundled into one report may veto the headline comparison
        return ok and not self.details.get("failed_subchecks")

    @property
    def relative_margin(self) -> float:
        return self.margin / abs(self.rhs) if self.rhs else self.margin

    def to_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("runtime_ms")
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, DiscFunction):
        return x.to_expr()
    raise TypeError(type(x))


def reports_to_json(reports, timings: bool = False) -> str:
    return json.dumps([r.to_dict(timings) for r in reports], indent=1, sort_keys=True, default=_json_default) + "\n"


def reports_to_csv(reports, timings: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["check_id", "pass", "margin", "tolerance"] + (["runtime_ms"] if timings else [])
    w.writerow(head)
    for r in reports:
        row = [r.check_id, str(r.passed).lower(), f"{r.margin:.17g}", f"{r.tolerance:.17g}"]
        if timings:
            row.append(f"{r.runtime_ms:.3f}")
        w.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# function suites


def polynomial_suite(n: int = 20, seed: int = DEFAULT_SEED, max_degree: int = 16) -> list:
    """Random polynomials of degree 1..max_degree; even-indexed members are zero-free on the closed disc.

    Coefficients are complex Gaussians damped by ``0.8^k``.  For the zero-free
    members the constant term is raised to ``1.5 sum_{k>=1} |a_k| + 0.1`` so that
    ``|a_0| > sum |a_k|`` (Rouche).
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        deg = int(rng.integers(1, max_degree + 1))
        c = (rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)) / math.sqrt(2) * 0.8 ** np.arange(deg + 1)
        if i % 2 == 0:
            c[0] = 1.5 * np.abs(c[1:]).sum() + 0.1
        out.append(TaylorPoly(tuple(complex(x) for x in c)))
    return out


def zero_free_on_closed_disc(f: DiscFunction) -> bool:
    return not find_zeros(f)


def kernel_for(w: complex, params: SpaceParams) -> KernelPower:
    """``(1 - conj(w) z)^(-2 alpha/p)``, the extremal function."""
    return KernelPower(complex(w), params.kappa)


def norm_power(f: DiscFunction, params: SpaceParams, grid: QuadratureGrid | None = None) -> NormResult:
    """``||f||_{alpha,p}`` by the route best suited to ``f``.

    The Littlewood-Paley route unless ``f`` has zeros off the origin and ``p`` is
    not an even integer, in which case the integrated-by-parts definition route
    (bounded integrand) is used.
    """
    zs = [a for a in find_zeros(f) if abs(a) >= 1e-12]
    method = "definition" if zs and not _is_even_integer(params.p) else "littlewood_paley"
    return norm_apalpha(f, params, method, grid)


def _finish(rep: VerificationReport, t_start: float) -> VerificationReport:
    rep.runtime_ms = 1000.0 * (time.perf_counter() - t_start)
    return rep


def _inputs(**kw):
    out = {}
    for k, v in kw.items():
        if isinstance(v, DiscFunction):
            v = v.to_expr()
        elif isinstance(v, SpaceParams):
            v = {"alpha": v.alpha, "p": v.p}
        elif isinstance(v, complex):
            v = [v.real, v.imag]
        elif isinstance(v, (list, tuple)):
            v = [[x.real, x.imag] if isinstance(x, complex) else x for x in v]
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# checks


def check_kernel_closed_form(w: complex, params: SpaceParams, rtol: float = 1e-6, grid=None, check_id=None):
    """``||(1 - conj(w) z)^(-2 alpha/p)||^p = (1-|w|^2)^(-alpha)``."""
    t = time.perf_counter()
    f = kernel_for(w, params)
    res = norm_power(f, params, grid)
    rhs = (1.0 - abs(w) ** 2) ** (-params.alpha)
    rep = VerificationReport(
        check_id or "kernel_closed_form",
        _inputs(w=complex(w), params=params),
        res.p_power_value, rhs, res.p_power_value - rhs, rtol * rhs, "identity",
        list(res.flags), {"error_estimate": res.error_estimate},
    )
    return _finish(rep, t)


def check_route_agreement(f: DiscFunction, params: SpaceParams, rtol: float = 1e-7, grid=None, check_id=None):
    """All applicable routes for ``||f||^p`` agree; lhs/rhs are the largest and smallest values."""
    t = time.perf_counter()
    routes = norm_all_routes(f, params, grid)
    vals = {k: v.p_power_value for k, v in routes.items()}
    hi, lo = max(vals.values()), min(vals.values())
    rep = VerificationReport(
        check_id or "route_agreement", _inputs(f=f, params=params), hi, lo, hi - lo, rtol * lo, "identity",
        [], {"routes": vals},
    )
    return _finish(rep, t)


def check_conformal_invariance(f: DiscFunction, w: complex, params: SpaceParams, rtol=None, grid=None, check_id=None):
    """``||T_{w, alpha/p} f|| = ||f||``; default tolerance 1e-6 at p = 2 and 1e-4 otherwise."""
    t = time.perf_counter()
    if rtol is None:
        rtol = 1e-6 if params.p == 2 else 1e-4
    Tf = mobius_transform(f, w, params.kappa)
    a = norm_power(Tf, params, grid)
    b = norm_power(f, params, grid)
    rep = VerificationReport(
        check_id or "conformal_invariance", _inputs(f=f, w=complex(w), params=params),
        a.value, b.value, a.value - b.value, rtol * b.value, "identity", sorted(set(a.flags + b.flags)),
    )
    return _finish(rep, t)


def check_contractive(f: DiscFunction, alpha: float, beta: float, sigma: float, rtol: float = 1e-8, grid=None,
                      check_id=None):
    """``||f||_{beta,q} <= ||f||_{alpha,p}`` with ``p = sigma alpha``, ``q = sigma beta``; margin = rhs - lhs."""
    t = time.perf_counter()
    if not 0 < alpha <= beta:
        raise ValueError("need 0 < alpha <= beta")
    P, Q = SpaceParams(alpha, sigma * alpha), SpaceParams(beta, sigma * beta)
    rhs_r = norm_power(f, P, grid)
    lhs_r = rhs_r if beta == alpha else norm_power(f, Q, grid)
    rep = VerificationReport(
        check_id or "contractive", _inputs(f=f, alpha=alpha, beta=beta, sigma=sigma),
        lhs_r.value, rhs_r.value, rhs_r.value - lhs_r.value, rtol * rhs_r.value, "inequality",
        sorted(set(lhs_r.flags + rhs_r.flags)),
        {"error_estimates": [lhs_r.error_estimate, rhs_r.error_estimate]},
    )
    return _finish(rep, t)


def check_power_trick(f: DiscFunction, params: SpaceParams, n: int, rtol: float = 1e-5, grid=None, check_id=None):
    """``||f^n||^p_{alpha,p} = ||f||^{pn}_{alpha,pn}``."""
    t = time.perf_counter()
    fn = f if n == 1 else f**n
    a = norm_power(fn, params, grid).p_power_value
    b = norm_power(f, SpaceParams(params.alpha, params.p * n), grid).p_power_value
    rep = VerificationReport(
        check_id or "power_trick", _inputs(f=f, params=params, n=n), a, b, a - b, rtol * b, "identity",
    )
    return _finish(rep, t)


def check_shift(f: DiscFunction, params: SpaceParams, identity_rtol: float = 1e-6, ratio_tol: float = 1e-10,
                grid=None, check_id=None):
    """Shift operator ``Sf = z f`` for 0 < alpha < 1.

    Headline comparison: ``||Sf|| / ||f|| <= ||S||`` (margin = formula - ratio).
    Bundled sub-check: ``||Sf||^p - ||f||^p`` equals the expansion integral of
    the integral means to ``identity_rtol``.
    """
    t = time.perf_counter()
    a = norm_power(ShiftMultiply(f), params, grid)
    b = norm_power(f, params, grid)
    diff = a.p_power_value - b.p_power_value
    integral = shift_expansion_integral(f, params)
    ratio = a.value / b.value
    bound = shift_norm_formula(params)
    ident_dev = diff - integral
    failed = []
    if abs(ident_dev) > identity_rtol * abs(integral):
        failed.append("expansion_identity")
    rep = VerificationReport(
        check_id or "shift", _inputs(f=f, params=params), ratio, bound, bound - ratio, ratio_tol * bound, "inequality",
        sorted(set(a.flags + b.flags)),
        {"norm_difference": diff, "expansion_integral": integral, "identity_deviation": ident_dev,
         "failed_subchecks": failed},
    )
    return _finish(rep, t)


def check_inner_division(g: DiscFunction, zeros, params: SpaceParams, rtol: float = 1e-4, grid=None, check_id=None):
    """``||f / I|| < ||f||`` for ``f = B g`` and every nonempty subproduct ``I`` of the Blaschke factor ``B``.

    lhs is the largest quotient value ``||f/I||^p``; the claim is strict and the
    tolerance is ``rtol ||f||^p``.
    """
    t = time.perf_counter()
    zeros = [complex(a) for a in zeros]
    inputs = _inputs(g=g, zeros=zeros, params=params)
    f = Product(BlaschkeProduct(tuple(zeros)), g) if zeros else g
    fp = norm_power(f, params, grid).p_power_value
    if not zeros:
        rep = VerificationReport(check_id or "inner_division", inputs, fp, fp, 0.0, rtol * fp, "inequality",
                                 ["not_applicable_no_inner_factor"])
        return _finish(rep, t)
    seen = {}
    idx = range(len(zeros))
    for k in range(len(zeros)):  # kept factors: proper subsets
        for keep in itertools.combinations(idx, k):
            key = tuple(sorted((round(zeros[i].real, 14), round(zeros[i].imag, 14)) for i in keep))
            if key in seen:
                continue
            q = Product(BlaschkeProduct(tuple(zeros[i] for i in keep)), g) if keep else g
            seen[key] = norm_power(q, params, grid).p_power_value
    worst = max(seen.values())
    rep = VerificationReport(
        check_id or "inner_division", inputs, worst, fp, fp - worst, rtol * fp, "strict", [],
        {"quotients": len(seen)},
    )
    return _finish(rep, t)


def majorant_counterexample(params: SpaceParams, r: float) -> DiscFunction:
    """``(1 - r z)^(-2 alpha/p) - 2``: the kernel with the sign of its constant coefficient flipped."""
    return Sum(KernelPower(complex(r), params.kappa), Constant(-2.0))


def check_majorant(params: SpaceParams, r, f: DiscFunction | None = None, rtol=None, grid=None, check_id=None):
    """Majorant bound ``Mf(r)^p (1-r^2)^alpha <= ||f||^p`` (p <= 2) or its strict failure (p > 2).

    For ``p <= 2`` the check is an inequality over every radius in ``r`` (lhs is
    the worst radius).  For ``p > 2`` ``f`` defaults to the counterexample
    :func:`majorant_counterexample` at the single radius ``r``, lhs is
    ``||f_r||^p``, rhs is the majorant side and the claim ``rhs > lhs`` is strict.
    """
    t = time.perf_counter()
    alpha, p = params.alpha, params.p
    rs = np.atleast_1d(np.asarray(r, dtype=float))
    if p <= 2:
        if f is None:
            raise ValueError("p <= 2 needs a function")
        rtol = 1e-8 if rtol is None else rtol
        nrm = norm_power(f, params, grid).p_power_value
        sides = []
        flags = set()
        for ri in rs:
            mv = majorant_eval(f, float(ri))
            flags.update(mv.flags)
            sides.append(mv.value**p * (1 - ri * ri) ** alpha)
        worst = max(sides)
        rep = VerificationReport(
            check_id or "majorant_bound", _inputs(f=f, params=params, r=[float(x) for x in rs]),
            worst, nrm, nrm - worst, rtol * nrm, "inequality", sorted(flags),
        )
        return _finish(rep, t)
    rtol = 1e-3 if rtol is None else rtol
    if rs.size != 1:
        raise ValueError("the p > 2 branch takes a single radius")
    ri = float(rs[0])
    fr = f if f is not None else majorant_counterexample(params, ri)
    mv = majorant_eval(fr, ri)
    side = mv.value**p * (1 - ri * ri) ** alpha
    nrm = norm_power(fr, params, grid).p_power_value
    closed = (1 - ri * ri) ** (-2 * alpha / p) if f is None else None
    rep = VerificationReport(
        check_id or "majorant_reversal", _inputs(f=fr, params=params, r=ri), nrm, side, side - nrm, rtol * side,
        "strict", list(mv.flags), {"majorant_value": mv.value, "majorant_closed_form": closed},
    )
    return _finish(rep, t)


def boundary_gaps(alpha: float, target: float = 0.1, max_exp: int = 14):
    """Distances ``1 - r`` starting at 0.1 and shrinking by 10 until ``(1-r^2)^alpha`` has dropped by ``target``."""
    gaps = [0.1]
    base = 0.1 * 1.9
    k = 1
    while ((gaps[-1] * (2 - gaps[-1])) / base) ** alpha > 0.5 * target and k < max_exp:
        k += 1
        gaps.append(10.0**-k)
    return gaps


def check_boundary_decay(f: DiscFunction, params: SpaceParams, gaps=None, n_theta: int = 4096, check_id=None):
    """``max_theta |f(r e^{i theta})|^p (1-r^2)^alpha`` decreases along ``r = 1 - gaps`` and ends below 0.1x its start.

    ``gaps`` defaults to :func:`boundary_gaps`, which extends the radii towards
    the circle until the weight alone has dropped twentyfold.
    """
    t = time.perf_counter()
    alpha, p = params.alpha, params.p
    gaps = list(boundary_gaps(alpha) if gaps is None else gaps)
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    vals = []
    for d in gaps:
        r = 1.0 - d
        vals.append(float(np.max(np.abs(f.values(r * np.exp(1j * th)))) ** p * (d * (2 - d)) ** alpha))
    tail = np.diff(vals)
    failed = ["not_decreasing"] if np.any(tail > 1e-12 * vals[0]) else []
    lhs, rhs = vals[-1], 0.1 * vals[0]
    rep = VerificationReport(
        check_id or "boundary_decay", _inputs(f=f, params=params, gaps=gaps), lhs, rhs, rhs - lhs,
        1e-12 * max(rhs, 1e-300), "inequality", [],
        {"values": vals, "failed_subchecks": failed},
    )
    return _finish(rep, t)


def check_pointwise_bound(f: DiscFunction, params: SpaceParams, n: int = 100, seed: int = DEFAULT_SEED, grid=None,
                          check_id=None):
    """``|f(w)|^p (1-|w|^2)^alpha <= ||f||^p`` at ``n`` random points (area-uniform)."""
    t = time.perf_counter()
    rng = np.random.default_rng(seed)
    w = np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    side = np.abs(f.values(w)) ** params.p * (1 - np.abs(w) ** 2) ** params.alpha
    nrm = norm_power(f, params, grid).p_power_value
    worst = float(side.max())
    rep = VerificationReport(
        check_id or "pointwise_bound", _inputs(f=f, params=params, n=n, seed=seed), worst, nrm, nrm - worst,
        1e-8 * nrm, "inequality",
    )
    return _finish(rep, t)


def check_dilation_monotonicity(f: DiscFunction, params: SpaceParams, rhos=(0.5, 0.7, 0.9, 0.99),
                                slack: float = 1e-9, limit_rtol: float = 0.02, grid=None, check_id=None):
    """``rho -> ||f_rho||`` is nondecreasing and ``||f_rho||`` at the last rho is close to ``||f||``."""
    t = time.perf_counter()
    vals = [norm_power(Dilation(f, rho), params, grid).value for rho in rhos]
    full = norm_power(f, params, grid).value
    steps = np.diff(vals)
    worst_step = float(steps.min()) if steps.size else 0.0
    failed = []
    if abs(vals[-1] - full) > limit_rtol * full:
        failed.append("limit_not_reached")
    rep = VerificationReport(
        check_id or "dilation_monotone", _inputs(f=f, params=params, rhos=list(rhos)), vals[-1], full,
        worst_step, slack * full, "inequality", [], {"values": vals, "failed_subchecks": failed},
    )
    return _finish(rep, t)


def check_alpha_monotonicity(f: DiscFunction, p: float, alphas=(0.25, 0.5, 0.75, 1.0, 1.5), grid=None,
                             check_id=None):
    """``alpha -> ||f||_{alpha,p}`` is nonincreasing."""
    t = time.perf_counter()
    res = [norm_power(f, SpaceParams(a, p), grid) for a in alphas]
    vals = [r.value for r in res]
    worst = float(-np.diff(vals).min())
    tol = 10 * max(r.error_estimate for r in res) + 1e-12 * vals[0]
    rep = VerificationReport(
        check_id or "alpha_monotone", _inputs(f=f, p=p, alphas=list(alphas)), vals[0], vals[-1], worst, tol,
        "inequality", [], {"values": vals},
    )
    return _finish(rep, t)


def check_phi_identities(f: DiscFunction, sigma: float, alpha_list=(0.5, 1.0, 2.0), phi_rtol: float = 1e-2,
                         mono_rtol: float = 1e-6, head_rtol: float = 1e-2, levelset_grid=None, grid=None,
                         check_id=None):
    """Level-set bundle for ``u = |f|^sigma (1-|z|^2)``.

    Headline: ``Phi(alpha, sigma, f)`` against ``||f||^{sigma alpha}_{alpha, sigma alpha}``
    for the worst alpha.  Sub-checks: ``g`` nonincreasing within
    ``mono_rtol * g(0+)``, ``g(0+)`` against ``||f||^sigma_{H^sigma}``, and the ordering
    ``Phi(beta)^{1/(sigma beta)} <= Phi(alpha)^{1/(sigma alpha)}`` for alpha < beta.
    """
    t = time.perf_counter()
    prof = level_set_profile(f, sigma, levelset_grid)
    H = norm_hardy(f, sigma).p_power_value
    rows = []
    for a in alpha_list:
        ph = phi_from_profile(prof, a)
        nv = norm_power(f, SpaceParams(a, sigma * a), grid).p_power_value
        rows.append((a, ph, nv))
    worst = max(rows, key=lambda x: abs(x[1] - x[2]) / x[2])
    viol = prof.g_monotonicity_violation()
    head_dev = (prof.g_head - H) / H
    roots = [ph ** (1.0 / (sigma * a)) for a, ph, _ in sorted(rows)]
    order_margin = min((roots[i] - roots[i + 1] for i in range(len(roots) - 1)), default=0.0)
    failed = []
    if viol > mono_rtol * prof.g_head:
        failed.append("g_not_nonincreasing")
    if abs(head_dev) > head_rtol:
        failed.append("g_head_vs_hardy")
    if order_margin < -phi_rtol * roots[0]:
        failed.append("phi_ordering")
    rep = VerificationReport(
        check_id or "phi_identities", _inputs(f=f, sigma=sigma, alphas=list(alpha_list)),
        worst[1], worst[2], worst[1] - worst[2], phi_rtol * worst[2], "identity", list(prof.flags),
        {"phi_vs_norm": [list(r) for r in rows], "g_violation": viol, "g_head": prof.g_head,
         "g_head_relative_deviation": head_dev, "hardy_sigma": H, "ordering_margin": order_margin, "t0": prof.t0,
         "failed_subchecks": failed},
    )
    return _finish(rep, t)


def check_zero_count(f: DiscFunction, sigma: float, n_true: int, tol: float = 0.1, levelset_grid=None,
                     check_id=None):
    """Zero count from the small-t asymptotics of ``mu``, against a known count."""
    t = time.perf_counter()
    est = zero_count_estimate(f, sigma, levelset_grid)
    failed = [] if abs(est.winding - n_true) < 0.5 else ["winding_number_disagrees"]
    rep = VerificationReport(
        check_id or "zero_count", _inputs(f=f, sigma=sigma, n_true=n_true), est.n, float(n_true),
        est.n - n_true, tol, "identity", list(est.flags),
        {"limit": est.limit, "winding": est.winding, "estimates": list(est.estimates), "failed_subchecks": failed},
    )
    return _finish(rep, t)


def check_besov_comparison(f: DiscFunction, params: SpaceParams, grid=None, check_id=None):
    """Ratio ``||f||_{A} / ||f||_{B}`` and the Dyakonov functional; reported, not asserted (constants are unknown)."""
    t = time.perf_counter()
    a = norm_power(f, params, grid)
    b = norm_besov(f, params, grid)
    notes = []
    dy = None
    if 0 < params.alpha < 1 and params.p >= 1:
        dy = dyakonov_functional(f, params)
    if not (math.isfinite(a.value) and math.isfinite(b.value)):
        notes.append("nonfinite_norm")
    rep = VerificationReport(
        check_id or "besov_comparison", _inputs(f=f, params=params), a.value, b.value, a.value / b.value - 1.0,
        1.0, "exploration", notes, {"dyakonov": dy},
    )
    return _finish(rep, t)


# ---------------------------------------------------------------------------
# L^p offset constant


def lp_offset_ratio(values, weights, p: float) -> float:
    """``(||f||_p^p - |int f|^p) / ||f - int f||_p^p`` for a discrete probability measure; nan if f is constant."""
    v = np.asarray(values, dtype=complex)
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    mean = complex(w @ v)
    den = float(w @ np.abs(v - mean) ** p)
    if den <= 1e-14 * float(w @ np.abs(v) ** p):
        return float("nan")
    return (float(w @ np.abs(v) ** p) - abs(mean) ** p) / den


def lp_offset_samples(seed: int = DEFAULT_SEED, n_steps: int = 40, n_trig: int = 20):
    """Step functions with random levels and breakpoints, and random trigonometric polynomials on [0, 1].

    Each sample is ``(values, weights)``: exact cell masses for steps, the
    uniform rule on 256 points for trigonometric samples.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_steps):
        k = int(rng.integers(2, 6))
        cuts = np.sort(rng.uniform(0, 1, k - 1))
        w = np.diff(np.concatenate([[0.0], cuts, [1.0]]))
        lev = rng.normal(size=k) + 1j * rng.normal(size=k) * (rng.uniform() < 0.5)
        out.append((lev, w))
    x = np.arange(256) / 256
    for _ in range(n_trig):
        deg = int(rng.integers(1, 8))
        c = rng.normal(size=2 * deg + 1) + 1j * rng.normal(size=2 * deg + 1)
        ks = np.arange(-deg, deg + 1)
        vals = np.exp(2j * np.pi * np.outer(x, ks)) @ c
        out.append((vals, np.full(x.size, 1 / 256)))
    return out


def two_level_search(p: float, starts: int = 12, seed: int = DEFAULT_SEED):
    """Maximise the offset ratio over real two-level steps ``1`` on ``[0, lam)`` and ``x`` on ``[lam, 1]``."""
    rng = np.random.default_rng(seed)

    def neg(v):
        lam = 1 / (1 + math.exp(-v[0]))
        r = lp_offset_ratio([1.0, v[1]], [lam, 1 - lam], p)
        return 0.0 if math.isnan(r) else -r

    best = (0.0, None)
    for _ in range(starts):
        x0 = [rng.uniform(-6, 2), rng.uniform(-2, 2)]
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if -res.fun > best[0]:
            lam = 1 / (1 + math.exp(-res.x[0]))
            best = (-res.fun, (lam, float(res.x[1])))
    return best


def estimate_lp_offset_constant(p: float, sample_functions=None, adversarial: bool = True) -> float:
    """Largest offset ratio over the samples (and the two-level search when ``adversarial``): a lower bound on ``C_p``."""
    if not 1 <= p <= 2:
        raise ValueError("the offset constant is studied for 1 <= p <= 2")
    samples = lp_offset_samples() if sample_functions is None else sample_functions
    ratios = [lp_offset_ratio(v, w, p) for v, w in samples]
    best = max(r for r in ratios if not math.isnan(r))
    if adversarial:
        best = max(best, two_level_search(p)[0])
    return best


def check_lp_offset(p: float, samples=None, check_id=None):
    """p = 2: every ratio is 1; p = 1: every ratio is at most 1; otherwise report the maximum and whether it exceeds 1."""
    t = time.perf_counter()
    samples = lp_offset_samples() if samples is None else samples
    ratios = np.array([lp_offset_ratio(v, w, p) for v, w in samples])
    ratios = ratios[~np.isnan(ratios)]
    inputs = _inputs(p=p, n_samples=len(samples))
    if p == 2:
        dev = float(np.max(np.abs(ratios - 1)))
        rep = VerificationReport(check_id or "lp_offset", inputs, float(ratios.max()), 1.0, dev, 1e-12, "identity")
    elif p == 1:
        rep = VerificationReport(check_id or "lp_offset", inputs, float(ratios.max()), 1.0, 1.0 - float(ratios.max()),
                                 1e-12, "inequality")
    else:
        best, arg = two_level_search(p)
        best = max(best, float(ratios.max()))
        notes = ["ratio_exceeds_one" if best > 1 else "ratio_not_above_one"]
        rep = VerificationReport(check_id or "lp_offset", inputs, best, 1.0, best - 1.0, 1e-12, "exploration", notes,
                                 {"two_level_argmax": arg})
    return _finish(rep, t)


# ---------------------------------------------------------------------------
# open problems


def explore_open_problems(f: DiscFunction, g: DiscFunction, alpha: float, p_grid, grid=None, pairs: int = 8,
                          seed: int = DEFAULT_SEED) -> list:
    """Evidence tables for two open questions; never pass/fail.

    Rows of kind ``p_sweep`` give ``||f||_{alpha,p}`` along ``p_grid`` and flag
    drops larger than three error estimates.  Rows of kind ``quasi_triangle``
    give ``||f+g|| / max(||f||, ||g||)`` for the given pair and for random
    polynomial pairs.
    """
    if not 0 < alpha < 1:
        raise ValueError("explorations use 0 < alpha < 1")
    rows = []
    prev = None
    for p in p_grid:
        r = norm_power(f, SpaceParams(alpha, float(p)), grid)
        finding = ""
        if prev is not None and r.value < prev.value - 3 * (r.error_estimate / max(r.p_power_value, 1e-300)
                                                            * r.value / p + prev.error_estimate):
            finding = "monotonicity_violation"
        rows.append({"kind": "p_sweep", "f": f.to_expr(), "alpha": alpha, "p": float(p), "value": r.value,
                     "error_estimate": r.error_estimate, "finding": finding})
        prev = r
    rng = np.random.default_rng(seed)
    cands = [(f, g)]
    for _ in range(pairs):
        d1, d2 = rng.integers(1, 6, size=2)
        c1 = rng.normal(size=d1 + 1) + 1j * rng.normal(size=d1 + 1)
        c2 = rng.normal(size=d2 + 1) + 1j * rng.normal(size=d2 + 1)
        cands.append((TaylorPoly(tuple(c1)), TaylorPoly(tuple(c2))))
    for p in p_grid:
        P = SpaceParams(alpha, float(p))
        for a, b in cands:
            na, nb = norm_power(a, P, grid).value, norm_power(b, P, grid).value
            ns = norm_power(Sum(a, b), P, grid).value
            rows.append({"kind": "quasi_triangle", "f": a.to_expr(), "g": b.to_expr(), "alpha": alpha, "p": float(p),
                         "ratio": ns / max(na, nb), "triangle_excess": ns - (na + nb),
                         "finding": "triangle_inequality_fails" if ns > (na + nb) * (1 + 1e-9) else ""})
    return rows


# ---------------------------------------------------------------------------
# suites


def _uniform(rng, lo, hi):
    return float(rng.uniform(lo, hi))


def contractive_cases(n: int = 200, seed: int = DEFAULT_SEED, suite=None):
    """Random ``(f, alpha, beta, sigma, is_kernel)`` cases; every fifth is an extremal kernel."""
    rng = np.random.default_rng(seed + 1)
    suite = polynomial_suite(seed=seed) if suite is None else suite
    out = []
    for i in range(n):
        alpha = _uniform(rng, 0.2, 1.2)
        beta = alpha * _uniform(rng, 1.3, 3.0)
        sigma = _uniform(rng, 0.5, 3.0)
        if i % 5 == 0:
            w = 0.7 * math.sqrt(rng.uniform()) * complex(np.exp(2j * math.pi * rng.uniform()))
            c = complex(rng.normal(), rng.normal())
            f = Product(Constant(c), KernelPower(w, 1.0 / sigma))
            out.append((f, alpha, beta, sigma, True))
        else:
            out.append((suite[int(rng.integers(len(suite)))], alpha, beta, sigma, False))
    return out


def inner_division_cases(n: int = 20, seed: int = DEFAULT_SEED, suite=None):
    """``(g, zeros, params)`` with ``g`` zero-free and one to three zeros of modulus at most 0.8."""
    rng = np.random.default_rng(seed + 2)
    suite = polynomial_suite(seed=seed) if suite is None else suite
    zf = suite[0::2]
    out = []
    for i in range(n):
        if i % 2 == 0:
            g = zf[(i // 2) % len(zf)]
        else:
            g = KernelPower(0.6 * complex(np.exp(2j * math.pi * rng.uniform())) * math.sqrt(rng.uniform()),
                            _uniform(rng, 0.1, 1.0))
        k = int(rng.integers(1, 4))
        zeros = [complex(0.8 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())) for _ in range(k)]
        params = SpaceParams(_uniform(rng, 0.2, 0.9), float(rng.choice([1.0, 1.5, 2.0, 3.0])))
        out.append((g, zeros, params))
    return out


def levelset_functions():
    """Functions analytic on the closed disc and zero-free on the circle; the first five are also zero-free inside."""
    return [
        TaylorPoly((2.0, 1.0)),
        Sum(KernelPower(0.4, 0.5), Constant(3.0)),
        KernelPower(0.5j, 1.0),
        TaylorPoly((1.0, 0.5, 0.25)),
        Product(TaylorPoly((1.5, -0.5j)), KernelPower(-0.3, 0.5)),
        TaylorPoly((0.0, 1.0)),
        Product(BlaschkeProduct((0.3, -0.5j)), Constant(2.0)),
        TaylorPoly((0.2, 1.0, 0.3)),
        Product(TaylorPoly((0.0, 1.0)), KernelPower(0.3, 0.5)),
        Constant(1.5),
    ]


def zero_count_cases():
    return [
        (KernelPower(0.3, 0.5), 0),
        (TaylorPoly((3.0, 1.0, 0.5)), 0),
        (Product(TaylorPoly((0.0, 1.0)), KernelPower(0.3, 0.5)), 1),
        (TaylorPoly((-0.4, 1.0)), 1),
        (Product(BlaschkeProduct((0.3, -0.5j)), Constant(2.0)), 2),
        (TaylorPoly((0.1, 0.0, 1.0)), 2),
    ]


def build_jobs(suite_name: str = "full", seed: int = DEFAULT_SEED, grid=None, levelset_grid=None):
    """``(check_id, callable)`` pairs for a named suite (``full`` or ``quick``)."""
    if suite_name not in ("full", "quick"):
        raise ValueError(f"unknown suite {suite_name!r}")
    quick = suite_name == "quick"
    suite = polynomial_suite(seed=seed)
    if quick:
        suite = suite[:4]
    zf = [f for i, f in enumerate(suite) if i % 2 == 0]
    jobs = []

    def add(cid, fn, *a, **kw):
        jobs.append((cid, lambda: fn(*a, check_id=cid, **kw)))

    ws = [0.2, 0.5 * complex(np.exp(1j * math.pi / 3)), 0.8]
    for i, w in enumerate(ws):
        for a, p in [(0.4, 1.0), (0.7, 2.0), (1.5, 3.0), (1.0, 2.0)]:
            add(f"kernel_closed_form/w{i}/a{a}/p{p}", check_kernel_closed_form, w, SpaceParams(a, p), grid=grid)
    for i, f in enumerate(suite):
        for a in (0.3, 0.5, 1.0, 1.7):
            add(f"route_agreement/f{i:02d}/a{a}", check_route_agreement, f, SpaceParams(a, 2.0), grid=grid)
    for i, f in enumerate(suite):
        for wi, w in enumerate((0.3, 0.6j)):
            ps = (1.0, 2.0, 3.0) if i % 2 == 0 else (2.0,)
            for p in ps:
                add(f"conformal_invariance/f{i:02d}/w{wi}/p{p}", check_conformal_invariance, f, w,
                    SpaceParams(0.5, p), grid=grid)
    cases = contractive_cases(40 if quick else 200, seed, suite)
    for i, (f, a, b, s, kern) in enumerate(cases):
        tag = "kernel" if kern else "poly"
        add(f"contractive/{i:03d}/{tag}", check_contractive, f, a, b, s, grid=grid)
    for i, f in enumerate(zf):
        for n in (2, 3):
            for a, p in ((0.5, 1.0), (0.7, 1.5)):
                add(f"power_trick/f{2 * i:02d}/n{n}/a{a}/p{p}", check_power_trick, f, SpaceParams(a, p), n, grid=grid)
    shift_funcs = [(f"f{i:02d}", f) for i, f in enumerate(suite)] + [("const1", Constant(1.0)),
                                                                      ("const2", Constant(2 - 1j))]
    for name, f in shift_funcs:
        for a, p in ((0.5, 2.0), (0.3, 1.0), (0.7, 3.0)):
            if p != 2 and name.startswith("f") and int(name[1:]) % 2 == 1:
                continue
            add(f"shift/{name}/a{a}/p{p}", check_shift, f, SpaceParams(a, p), grid=grid)
    for i, (g, zs, P) in enumerate(inner_division_cases(6 if quick else 20, seed, suite)):
        add(f"inner_division/{i:02d}", check_inner_division, g, zs, P, grid=grid)
    for i, f in enumerate(suite):
        for a in (0.5, 1.5):
            for p in (1.0, 1.5, 2.0):
                add(f"majorant_bound/f{i:02d}/a{a}/p{p}", check_majorant, SpaceParams(a, p), (0.3, 0.7, 0.95),
                    f=f, grid=grid)
    for a, p, r in ((1.0, 4.0, 0.5), (0.5, 3.0, 0.3), (0.3, 6.0, 0.8)):
        add(f"majorant_reversal/a{a}/p{p}/r{r}", check_majorant, SpaceParams(a, p), r, grid=grid)
    for i, f in enumerate(suite):
        add(f"dilation_monotone/f{i:02d}/a0.5/p2.0", check_dilation_monotonicity, f, SpaceParams(0.5, 2.0), grid=grid)
        if i % 2 == 0:
            add(f"dilation_monotone/f{i:02d}/a0.5/p1.0", check_dilation_monotonicity, f, SpaceParams(0.5, 1.0),
                grid=grid)
    for i, f in enumerate(zf[:4]):
        add(f"alpha_monotone/f{2 * i:02d}/p1.5", check_alpha_monotonicity, f, 1.5, grid=grid)
        add(f"boundary_decay/f{2 * i:02d}/a0.3/p1.0", check_boundary_decay, f, SpaceParams(0.3, 1.0))
        add(f"pointwise_bound/f{2 * i:02d}/a0.5/p1.5", check_pointwise_bound, f, SpaceParams(0.5, 1.5), seed=seed,
            grid=grid)
        add(f"besov_comparison/f{2 * i:02d}/a0.5/p1.5", check_besov_comparison, f, SpaceParams(0.5, 1.5), grid=grid)
    lsf = levelset_functions()
    for i, f in enumerate(lsf if not quick else lsf[:3]):
        alist = (0.5, 1.0, 2.0)
        add(f"phi_identities/l{i:02d}", check_phi_identities, f, 1.0 if i % 2 == 0 else 2.0, alist,
            levelset_grid=levelset_grid, grid=grid)
    for i, (f, n) in enumerate(zero_count_cases()):
        add(f"zero_count/{i:02d}/n{n}", check_zero_count, f, 1.0, n, levelset_grid=levelset_grid)
    for p in (1.0, 1.5, 2.0):
        add(f"lp_offset/p{p}", check_lp_offset, p)
    return jobs


def _threads() -> int:
    env = os.environ.get("DISCNORM_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


def run_jobs(jobs, threads: int | None = None) -> list:
    """Run ``(check_id, callable)`` jobs in a thread pool; reports come back sorted by check id."""
    threads = threads or _threads()
    if threads == 1:
        reps = [fn() for _, fn in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            reps = list(ex.map(lambda j: j[1](), jobs))
    return sorted(reps, key=lambda r: r.check_id)


def run_suite(suite_name: str = "full", seed: int = DEFAULT_SEED, grid=None, levelset_grid=None, threads=None):
    return run_jobs(build_jobs(suite_name, seed, grid, levelset_grid), threads)
