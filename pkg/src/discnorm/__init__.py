"""Norms of analytic functions on the unit disc in the Dirichlet-type range and checks of contractive inequalities."""

from .funcrep import (
    BlaschkeProduct,
    Constant,
    DiscDomainError,
    DiscFunction,
    KernelPower,
    SpaceParams,
    TaylorPoly,
    find_zeros,
    parse,
    taylor_coeffs,
)
from .norms import (
    NormResult,
    dyakonov_functional,
    norm_all_routes,
    norm_apalpha,
    norm_besov,
    norm_hardy,
    shift_expansion_integral,
    shift_norm_closed_form,
    shift_norm_formula,
)
from .quadrature import QuadratureGrid, RadialWeight, omega_alpha

__version__ = "0.1.0"

__all__ = [
    "BlaschkeProduct",
    "Constant",
    "DiscDomainError",
    "DiscFunction",
    "KernelPower",
    "SpaceParams",
    "TaylorPoly",
    "find_zeros",
    "parse",
    "taylor_coeffs",
    "NormResult",
    "dyakonov_functional",
    "norm_all_routes",
    "norm_apalpha",
    "norm_besov",
    "norm_hardy",
    "shift_expansion_integral",
    "shift_norm_closed_form",
    "shift_norm_formula",
    "QuadratureGrid",
    "RadialWeight",
    "omega_alpha",
]
