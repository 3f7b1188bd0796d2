"""
Extremal kernels and the contractive comparison
===============================================

The norm ``||f||_{alpha,p}`` is invariant under the weighted automorphisms
of index ``kappa = alpha / p``.  Along a slice of fixed ``sigma = p / alpha``
the norm can only shrink as ``alpha`` grows, and the kernels
``(1 - conj(w) z)^(-2/sigma)`` keep it constant.
"""
# %%
# Kernel norms in closed form
# ---------------------------
# ``||(1 - conj(w) z)^(-2 alpha/p)||^p = (1 - |w|^2)^(-alpha)`` for every admissible pair.
import numpy as np

from discnorm import KernelPower, SpaceParams, TaylorPoly, norm_apalpha

w = 0.5 * np.exp(1j * np.pi / 3)
print(f"{'alpha':>6} {'p':>4} {'computed':>20} {'closed form':>20}")
for alpha, p in [(0.4, 1.0), (0.7, 2.0), (1.5, 3.0), (1.0, 2.0)]:
    res = norm_apalpha(KernelPower(w, alpha / p), SpaceParams(alpha, p))
    print(f"{alpha:6.2f} {p:4.1f} {res.p_power_value:20.15f} {(1 - abs(w) ** 2) ** -alpha:20.15f}")

# %%
# A slice of fixed sigma
# ----------------------
# Norms of a generic polynomial decrease strictly; the matching kernel is flat.
sigma = 2.0
f = TaylorPoly((1.0, 0.6, -0.3j, 0.2))
k = KernelPower(0.4j, 1 / sigma)
print(f"\n{'alpha':>6} {'||f||':>12} {'||kernel||':>14}")
for alpha in np.linspace(0.25, 2.0, 8):
    P = SpaceParams(alpha, sigma * alpha)
    print(f"{alpha:6.2f} {norm_apalpha(f, P).value:12.8f} {norm_apalpha(k, P).value:14.10f}")
