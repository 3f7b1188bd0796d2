"""
Offset ratio in L^p
===================

For a probability space the ratio
``(||f||_p^p - |E f|^p) / ||f - E f||_p^p`` equals 1 at ``p = 2`` and is at
most 1 at ``p = 1``.  In between, two-level step functions push it above 1.
"""
# %%
# The best two-level step for a range of exponents
# ------------------------------------------------
import numpy as np

from discnorm.verify import estimate_lp_offset_constant, two_level_search

print(f"{'p':>5} {'best ratio':>12} {'mass':>9} {'second level':>13}")
for p in np.linspace(1.0, 2.0, 6):
    best, (lam, x) = two_level_search(float(p), starts=6)
    print(f"{p:5.2f} {best:12.6f} {lam:9.2e} {x:13.6f}")

# %%
# Random samples and search together
# ----------------------------------
print(f"\nlower bound on the constant at p = 1.5: {estimate_lp_offset_constant(1.5):.6f}")
