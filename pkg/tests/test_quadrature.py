import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import beta as B

from discnorm.funcrep import KernelPower, TaylorPoly
from discnorm.quadrature import (
    QuadratureGrid, RadialWeight, area_integral, circle_mean, circle_means, graded_circle_means,
    graded_circle_rule, hardy_stein_derivative, jacobi_rule, omega_alpha,
)


@pytest.mark.parametrize("a,b", [(-0.6, 0.0), (0.3, 0.0), (1.5, 0.4)])
def test_jacobi_rule_integrates_monomials(a, b):
    u, w, _ = jacobi_rule(20, a, b)
    for k in range(0, 12):
        exact = B(k + b + 1, a + 1)
        assert math.isclose(np.sum(w * u**k), exact, rel_tol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
def test_omega_alpha_against_adaptive_quadrature(alpha):
    for x in (1e-4, 0.1, 0.5, 0.9, 0.999):
        # substitute 1 - r = v^(1/alpha) to remove the endpoint singularity
        ref = integrate.quad(lambda v: 1 / (alpha * (1 - v ** (1 / alpha))), 0, (1 - x) ** alpha,
                             epsabs=0, epsrel=1e-13, limit=200)[0]
        assert math.isclose(float(omega_alpha(alpha, x)), ref, rel_tol=1e-11)


def test_circle_means_closed_forms():
    f = TaylorPoly((1.0, 0.5))
    r = np.array([0.0, 0.4, 0.9])
    np.testing.assert_allclose(circle_means(f, 2.0, r), 1 + 0.25 * r**2, rtol=1e-14)
    # |kernel|^p mean at p = 2 / (2 kappa): sum |w|^{2k} r^{2k} = 1 / (1 - |w|^2 r^2)
    w = 0.6
    assert math.isclose(circle_mean(KernelPower(w, 0.5), 2.0, 0.7), 1 / (1 - (w * 0.7) ** 2), rel_tol=1e-13)


@pytest.mark.parametrize("beta", [-0.5, 0.0, 0.7])
def test_area_integral_radial_monomials(beta):
    # normalised area: int |z|^{2k} (1-|z|^2)^beta dm = B(k+1, beta+1)
    for k in (0, 1, 5):
        val = area_integral(lambda z: np.abs(z) ** (2 * k), RadialWeight.jacobi(beta), QuadratureGrid(32, 32))
        assert math.isclose(val, B(k + 1, beta + 1), rel_tol=1e-12)


def test_area_integral_omega_weight_littlewood_paley_for_z():
    # |f'|^2 = 1 for f = z, so (p^2/4) int omega_alpha dm at p = 2 equals ||z||^2 = 1/alpha
    for alpha in (0.4, 1.0, 2.0):
        val = area_integral(lambda z: np.ones(z.shape), RadialWeight.omega(alpha), QuadratureGrid(16, 64))
        assert math.isclose(val, 1 / alpha, rel_tol=1e-8)


def test_graded_rule_weights_sum_to_one():
    ang, wt = graded_circle_rule([0.3, 2.0], [1e-5, 0.01])
    assert math.isclose(wt.sum(), 1.0, rel_tol=1e-14)
    assert np.all(np.diff(ang) > 0)


def test_graded_means_near_a_zero():
    # |z - a| at p = 1: mean over |z| = r is a complete elliptic integral; compare to adaptive quad
    a = 0.5
    f = TaylorPoly((-a, 1.0))
    r = a + 1e-6
    ref = integrate.quad(lambda t: abs(r * np.exp(1j * t) - a), 0, 2 * np.pi, points=[0.0], limit=400)[0] / (2 * np.pi)
    got = graded_circle_means(f, 1.0, np.array([r]), [a])[0]
    assert math.isclose(got, ref, rel_tol=1e-10)


def test_hardy_stein_derivative_at_p2():
    # d/dr of M_2^2(r) for 1 + z is 2 r * (1/1) * |a1|^2 = 2 r / 4 for a1 = 1/2
    f = TaylorPoly((1.0, 0.5))
    r = np.array([0.3, 0.8])
    got = hardy_stein_derivative(f, 2.0, r, QuadratureGrid(64, 16))
    np.testing.assert_allclose(got, 2 * r * 0.25, rtol=1e-10)


def test_grid_halving_and_scaling():
    g = QuadratureGrid(256, 128)
    assert g.halved() == QuadratureGrid(128, 64)
    assert g.scaled(4).n_theta == 1024
