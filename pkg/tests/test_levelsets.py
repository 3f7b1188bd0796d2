import math

import numpy as np
import pytest

from discnorm.funcrep import Constant, KernelPower, TaylorPoly
from discnorm.levelsets import LevelSetGrid, level_set_profile, mu, phi, phi_from_profile, sup_profile, \
    zero_count_estimate
from discnorm.norms import norm_apalpha, norm_hardy
from discnorm.funcrep import SpaceParams

SMALL = LevelSetGrid(128, 128, t_grid_size=150)


@pytest.mark.parametrize("c,sigma", [(1.0, 1.0), (2.0, 0.5), (0.5j, 3.0)])
def test_mu_of_constant_closed_form(c, sigma):
    # {|c|^sigma (1-r^2) > t} is a disc of hyperbolic measure |c|^sigma / t - 1
    C = abs(c) ** sigma
    for t in (0.9 * C, 0.3 * C, 1e-3 * C):
        assert math.isclose(mu(Constant(c), sigma, t, SMALL), C / t - 1, rel_tol=1e-12)
    assert mu(Constant(c), sigma, 1.1 * C, SMALL) == 0.0


def test_sup_profile_of_kernel():
    # |k_w|^sigma (1-|z|^2) with kernel index 1/sigma peaks at z = w with value (1-|w|^2)^-1
    w, sigma = 0.4 + 0.2j, 2.0
    val, arg = sup_profile(KernelPower(w, 1 / sigma), sigma)[:2]
    assert math.isclose(val, 1 / (1 - abs(w) ** 2), rel_tol=1e-10)
    assert abs(arg - w) < 1e-5


def test_constant_profile_g_is_flat_and_phi_exact():
    prof = level_set_profile(Constant(1.5), 1.0, SMALL)
    np.testing.assert_allclose(prof.g_values, 1.5, rtol=1e-12)
    assert prof.g_monotonicity_violation() <= 1e-12
    assert math.isclose(phi_from_profile(prof, 0.7), 1.5**0.7, rel_tol=1e-10)


def test_kernel_profile_matches_norms():
    # the extremal kernel's distribution is the constant's, moved by an automorphism
    w, sigma = 0.5, 1.0
    f = KernelPower(w, 1 / sigma)
    prof = level_set_profile(f, sigma, SMALL)
    H = norm_hardy(f, sigma).p_power_value
    assert math.isclose(prof.g_head, H, rel_tol=1e-6)
    for alpha in (0.5, 1.0):
        nv = norm_apalpha(f, SpaceParams(alpha, sigma * alpha)).p_power_value
        assert math.isclose(phi_from_profile(prof, alpha), nv, rel_tol=1e-4)


def test_polynomial_phi_and_head():
    f = TaylorPoly((2.0, 0.5, 0.3))
    sigma = 1.0
    prof = level_set_profile(f, sigma, SMALL)
    assert prof.g_monotonicity_violation() <= 1e-6 * prof.g_head
    assert math.isclose(prof.g_head, norm_hardy(f, sigma).p_power_value, rel_tol=1e-2)
    nv = norm_apalpha(f, SpaceParams(1.0, 1.0)).p_power_value
    assert math.isclose(phi(f, sigma, 1.0, SMALL), nv, rel_tol=1e-2)


def test_profile_csv_round_trip():
    prof = level_set_profile(Constant(1.0), 1.0, LevelSetGrid(32, 32, t_grid_size=10))
    rows = prof.to_csv().strip().splitlines()
    assert rows[0] == "t,mu,g"
    vals = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    np.testing.assert_array_equal(vals[:, 0], prof.t_grid)


@pytest.mark.parametrize("f,n", [(TaylorPoly((2.0, 0.5)), 0), (TaylorPoly((0.2, 1.0)), 1)])
def test_zero_count(f, n):
    est = zero_count_estimate(f, 1.0, SMALL)
    assert abs(est.n - n) < 0.1
    assert abs(est.winding - n) < 1e-6


def test_grid_validation():
    with pytest.raises(ValueError):
        LevelSetGrid(8, 64)
    with pytest.raises(ValueError):
        LevelSetGrid(q=1.2)
    with pytest.raises(ValueError):
        mu(Constant(1.0), 1.0, 0.0)
