"""Left-invariant conic Finsler metrics on the two-dimensional non-Abelian Lie group.

Profiles ``f(t)`` with ``F = r sqrt(2 f(t))`` in polar coordinates of the Lie
algebra, their sprays and curvatures, ODE solvers for Landsberg and constant
flag curvature profiles, Berwald families, and a batch verifier.
"""

from .berwald import (
    BerwaldMatrix,
    CatalogParams,
    Indicatrix,
    QuadraticFit,
    berwald_pde_residual,
    catalog_matrix,
    catalog_norm,
    eta_quadratic_residual,
    expm2,
    fit_eta_quadratic,
    indicatrix_from_matrix,
    norm_from_indicatrix,
    seed_to_matrix,
)
from .errors import ConvexityError, DomainError, FinslerError, SingularityError, ValidationError
from .flow_oracles import (
    Trajectory,
    cartan_direct,
    flag_curvature,
    flag_curvature_lie,
    integrate_minus_eta,
    landsberg_scalar,
    landsberg_via_transport,
    parallel_transport,
    riemann_apply,
    transport_along,
    unit_coefficient,
    unit_normal,
)
from .harness import (
    RunConfig,
    SeedBox,
    TheoremDReport,
    batch_verify,
    curve_csv,
    dumps_report,
    sample_seeds,
    validate_report,
    verify_theorem_d,
)
from .invariants import Check, run_invariants
from .lie_spray import (
    CANONICAL,
    LieAlgebra2D,
    connection_N,
    d_eta,
    eta_at,
    eta_on_indicatrix,
    reorient,
    s_rate,
    spray_eta,
)
from .polar_norm import (
    NormCurve,
    NormJet,
    cartan_scalar,
    constant_curve,
    convexity_margin,
    gram_in_basis,
    indicatrix_point,
    indicatrix_tangent,
    norm_value,
    polar_gram,
)
from .solvers import SeedM, cfc_lambda, landsberg_first_integral, solve_cfc, solve_landsberg

__version__ = "0.1.0"
