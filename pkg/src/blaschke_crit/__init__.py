"""Finite Blaschke products from prescribed critical points.

The construction goes through a charge equilibrium on the real line
(Cayley picture), the Stieltjes/Van Vleck polynomials of a Lame equation,
and an equivalent truncated power-moment problem.
"""
from .blaschke import (
    AnchorMinus,
    AnchorPlus,
    BlaschkeProduct,
    PartialFractionForm,
    critical_points_of_blaschke,
    halfplane_to_disc,
    hausdorff_distance,
    solve_blaschke,
    solve_pipeline,
)
from .equilibrium import (
    ChargeConfigurationInner,
    ChargeConfigurationOuter,
    SolveOptions,
    energy,
    energy_gradient,
    extend_equilibrium,
    solve_inner_equilibrium,
    weight_polynomial_P,
)
from .errors import BlaschkeError, InputError, NumericalError
from .moments import (
    MomentVector,
    canonical_lower,
    canonical_upper,
    inverse_nesterov,
    nesterov,
)
from .realpoly import RealPolynomial
from .transforms import cayley, inverse_cayley, lift_critical_points

__version__ = "0.1.0"

__all__ = [
    "AnchorMinus", "AnchorPlus", "BlaschkeError", "BlaschkeProduct",
    "ChargeConfigurationInner", "ChargeConfigurationOuter", "InputError",
    "MomentVector", "NumericalError", "PartialFractionForm", "RealPolynomial",
    "SolveOptions", "canonical_lower", "canonical_upper", "cayley",
    "critical_points_of_blaschke", "energy", "energy_gradient",
    "extend_equilibrium", "halfplane_to_disc", "hausdorff_distance",
    "inverse_cayley", "inverse_nesterov", "lift_critical_points", "nesterov",
    "solve_blaschke", "solve_inner_equilibrium", "solve_pipeline",
    "weight_polynomial_P",
]
