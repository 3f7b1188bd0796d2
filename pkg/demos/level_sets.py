"""
Distribution of |f|^sigma (1 - |z|^2)
=====================================

The hyperbolic measure ``mu(t)`` of the superlevel set ``{u > t}`` of
``u = |f|^sigma (1 - |z|^2)`` determines every norm on the slice
``p = sigma alpha``.  The profile ``g(t) = t (mu(t) + 1)`` is nonincreasing,
tends to ``||f||^sigma`` in the Hardy space as ``t -> 0``, and the small-t
behaviour of ``mu`` counts the zeros of ``f``.
"""
# %%
# A profile and the integral that recovers the norms
# --------------------------------------------------
from discnorm import SpaceParams, TaylorPoly, norm_apalpha, norm_hardy
from discnorm.levelsets import LevelSetGrid, level_set_profile, phi_from_profile, zero_count_estimate

grid = LevelSetGrid(256, 256)
f = TaylorPoly((1.0, 0.5, 0.25))
sigma = 1.0
prof = level_set_profile(f, sigma, grid)
print(f"sup u = {prof.t0:.10f} at z = {prof.argmax_z:.6f}")
print(f"g at smallest t = {prof.g_head:.8f},  Hardy norm^sigma = {norm_hardy(f, sigma).p_power_value:.8f}")
print(f"largest increase of g = {prof.g_monotonicity_violation():.2e}")
for alpha in (0.5, 1.0, 2.0):
    nv = norm_apalpha(f, SpaceParams(alpha, sigma * alpha)).p_power_value
    print(f"alpha={alpha:3.1f}: Phi = {phi_from_profile(prof, alpha):.8f}, norm^p = {nv:.8f}")

# %%
# Counting zeros
# --------------
# ``mu(t) - ||f||^sigma / t`` tends to ``-1 - sigma n / 2``.
for coeffs in [(3.0, 1.0, 0.5), (-0.4, 1.0), (0.1, 0.0, 1.0)]:
    est = zero_count_estimate(TaylorPoly(coeffs), 1.0, grid)
    print(f"poly{coeffs}: estimated zeros {est.n:.6f}, winding number {est.winding:.1f}")
