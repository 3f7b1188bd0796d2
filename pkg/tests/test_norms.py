import math

import numpy as np
import pytest
from scipy.special import gamma

from discnorm.funcrep import BlaschkeProduct, Constant, KernelPower, SpaceParams, TaylorPoly
from discnorm.norms import (
    METHODS, NormResult, dyakonov_functional, norm_all_routes, norm_apalpha, norm_besov, norm_hardy,
    shift_expansion_integral, shift_norm_closed_form, shift_norm_formula,
)
from discnorm.quadrature import QuadratureGrid


def coefficient_oracle(c, alpha):
    """sum |a_k|^2 / c_alpha(k) with c_alpha(k) = Gamma(k+alpha) / (Gamma(alpha) k!)."""
    k = np.arange(len(c))
    ca = gamma(k + alpha) / (gamma(alpha) * gamma(k + 1))
    return float(np.sum(np.abs(np.asarray(c)) ** 2 / ca))


@pytest.mark.parametrize("method", ["definition", "littlewood_paley", "coefficients"])
@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.2])
def test_z_has_norm_squared_one_over_alpha(method, alpha):
    r = norm_apalpha(TaylorPoly((0.0, 1.0)), SpaceParams(alpha, 2.0), method)
    assert math.isclose(r.p_power_value, 1 / alpha, rel_tol=1e-12)


@pytest.mark.parametrize("p", [0.7, 1.0, 3.0])
def test_constant_norm_is_modulus(p):
    for method in ("definition", "littlewood_paley"):
        r = norm_apalpha(Constant(2 - 1j), SpaceParams(0.6, p), method)
        assert math.isclose(r.value, abs(2 - 1j), rel_tol=1e-14)


def test_polynomial_against_coefficient_oracle():
    c = (1.0, 0.5 - 0.5j, 0.2, 0.0, -0.3j)
    for alpha in (0.4, 1.7):
        res = norm_all_routes(TaylorPoly(c), SpaceParams(alpha, 2.0))
        for r in res.values():
            assert math.isclose(r.p_power_value, coefficient_oracle(c, alpha), rel_tol=1e-10)
        if alpha > 1:
            assert "bergman" in res


@pytest.mark.parametrize("w,alpha,p", [(0.5, 0.5, 1.0), (0.3j, 1.2, 3.0), (0.7 * np.exp(1j), 0.8, 1.6)])
def test_kernel_closed_form(w, alpha, p):
    f = KernelPower(w, alpha / p)
    r = norm_apalpha(f, SpaceParams(alpha, p))
    assert math.isclose(r.p_power_value, (1 - abs(w) ** 2) ** -alpha, rel_tol=1e-8)
    assert r.error_estimate < 1e-8 * r.p_power_value


def test_route_preconditions():
    f = TaylorPoly((1.0, 1.0))
    with pytest.raises(ValueError):
        norm_apalpha(f, SpaceParams(0.5, 2.0), "bergman")
    with pytest.raises(ValueError):
        norm_apalpha(f, SpaceParams(0.5, 1.5), "coefficients")
    with pytest.raises(ValueError):
        norm_apalpha(f, SpaceParams(0.5, 1.5), "nonsense")
    assert set(METHODS) == {"definition", "littlewood_paley", "bergman", "coefficients"}


def test_norm_result_invariants():
    r = NormResult.from_power(8.0, 3.0, "definition", 1e-12)
    assert math.isclose(r.value, 2.0) and r.error_estimate >= 0


def _by_parts_oracle(f, alpha, p, breaks):
    """M(1) + (1-alpha) int_0^1 (M(1) - M(u)) (1-u)^(alpha-2) du with M(u) by nested adaptive quadrature."""
    from scipy import integrate

    def M(u):
        r = np.sqrt(u)
        val = integrate.quad(lambda th: abs(f(r * np.exp(1j * th))) ** p, 0, np.pi, points=[0.0, np.pi / 2],
                             epsabs=0, epsrel=1e-12, limit=200)[0]
        return val / np.pi

    M1 = M(1.0)
    edges = [0.0, *breaks, 1.0]
    return M1 + (1 - alpha) * sum(
        integrate.quad(lambda u: (M1 - M(u)) * (1 - u) ** (alpha - 2), a, b, epsabs=0, epsrel=1e-11, limit=200)[0]
        for a, b in zip(edges[:-1], edges[1:]))


def test_zeros_in_disc_against_nested_quadrature():
    # z^2 - 1/4 is even and real-symmetric, so half a circle suffices in the oracle
    f = TaylorPoly((-0.25, 0.0, 1.0))
    P = SpaceParams(0.7, 1.3)
    ref = _by_parts_oracle(lambda z: z * z - 0.25, 0.7, 1.3, [0.25])
    a = norm_apalpha(f, P, "definition")
    b = norm_apalpha(f, P, "littlewood_paley")
    assert math.isclose(a.p_power_value, ref, rel_tol=1e-10)
    assert abs(b.p_power_value - ref) <= b.error_estimate
    assert "zeros_in_disc_integrated_by_parts" in a.flags
    assert "zeros_in_disc_nonsmooth_integrand" in b.flags


def test_blaschke_factor_with_bergman_route():
    # p = 2, alpha = 2: |B|^2 Bergman area integral equals the coefficient series
    B = BlaschkeProduct((0.4,))
    res = norm_all_routes(B, SpaceParams(2.0, 2.0))
    assert math.isclose(res["bergman"].p_power_value, res["coefficients"].p_power_value, rel_tol=1e-9)


def test_hardy_norms():
    assert math.isclose(norm_hardy(TaylorPoly((1.0, 1.0)), 2.0).p_power_value, 2.0, rel_tol=1e-14)
    assert math.isclose(norm_hardy(BlaschkeProduct((0.3, 0.5j)), 1.3).value, 1.0, rel_tol=1e-9)
    # |kernel|^2 with 2 kappa = 1: sum |w|^{2k} = 1 / (1 - |w|^2)
    assert math.isclose(norm_hardy(KernelPower(0.6, 0.5), 2.0).p_power_value, 1 / 0.64, rel_tol=1e-12)


def test_besov_examples():
    assert math.isclose(norm_besov(Constant(3.0), SpaceParams(0.5, 2.0)).value, 3.0, rel_tol=1e-14)
    for alpha in (0.3, 1.0, 2.0):
        assert math.isclose(norm_besov(TaylorPoly((0.0, 1.0)), SpaceParams(alpha, 2.0)).p_power_value, 1.0,
                            rel_tol=1e-12)
    with pytest.raises(ValueError):
        norm_besov(Constant(1.0), SpaceParams(0.2, 0.5))


def test_dyakonov_functional():
    P = SpaceParams(0.5, 1.5)
    assert dyakonov_functional(Constant(1.0), P) == 0.0
    z = TaylorPoly((0.0, 1.0))
    lo, hi = dyakonov_functional(z, SpaceParams(0.3, 1.5)), dyakonov_functional(z, SpaceParams(0.7, 1.5))
    assert np.isfinite(lo) and 0 < hi < lo


@pytest.mark.parametrize("alpha,p", [(0.5, 2.0), (0.3, 1.0), (0.8, 3.5)])
def test_shift_formula_matches_closed_form(alpha, p):
    P = SpaceParams(alpha, p)
    assert math.isclose(shift_norm_formula(P), shift_norm_closed_form(P), rel_tol=1e-10)


def test_shift_norm_value_two():
    assert math.isclose(shift_norm_formula(SpaceParams(0.5, 2.0)) ** 2, 2.0, rel_tol=1e-8)


def test_shift_expansion_identity_for_polynomial():
    f = TaylorPoly((1.0, 0.5))
    P = SpaceParams(0.5, 2.0)
    diff = (norm_apalpha(f * TaylorPoly((0.0, 1.0)), P).p_power_value - norm_apalpha(f, P).p_power_value)
    assert math.isclose(diff, shift_expansion_integral(f, P), rel_tol=1e-9)


def test_error_estimate_bounds_grid_doubling():
    f = TaylorPoly((1.0, 0.8, 0.5, 0.2))
    P = SpaceParams(0.6, 1.4)
    r = norm_apalpha(f, P, grid=QuadratureGrid(128, 64))
    fine = norm_apalpha(f, P, grid=QuadratureGrid(256, 128))
    assert abs(r.p_power_value - fine.p_power_value) <= max(r.error_estimate, 1e-14 * r.p_power_value)
