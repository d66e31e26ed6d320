"""Guaranteed subgradients of nonsmooth bivariate functions from four
directional-derivative evaluations, plus the constructions built on top of
them: convex-set element location by support probing, parametric ODE cost
subgradients, optimal-value-function subgradients, and a subgradient method.
"""

from .catalog import (
    CatalogEntry,
    GradientHull,
    catalog,
    catalog_entry,
    clarke_membership_check,
    sample_limiting_gradients,
)
from .compass import (
    VerificationReport,
    basis_compass_difference,
    compass_difference,
    compass_from_psi,
    finite_difference_compass,
    univariate_clarke_interval,
    verification_points,
    verify_subgradient_inequality,
)
from .danskin import (
    ActiveSet,
    Box,
    FinitePointCloud,
    OptimalValueProblem,
    danskin_subgradient,
    optimal_value,
    psi,
    solve_inner,
)
from .expr import (
    ExprParseError,
    NonsmoothExpr,
    as_oracle,
    eval_dir_deriv,
    eval_value,
    format_expr,
    parse_expr,
)
from .geometry import (
    AmbiguityCertificate,
    IntervalHull,
    MembershipReport,
    MidpointResult,
    SupportOracle,
    interval_hull,
    membership_check,
    midpoint_element,
    polytope_support,
    three_probe_ambiguity,
)
from .odesens import (
    IntegrationConfig,
    IntegrationError,
    OdeProblem,
    SensitivityTrajectory,
    integrate_coupled,
    ode_cost_dirderiv,
    ode_cost_value,
    ode_subgradient,
)
from .optimize import (
    Constant,
    Diminishing,
    OptTrace,
    Polyak,
    StepRule,
    benchmark_suite,
    subgradient_method,
)
from .oracle import (
    GUARANTEED,
    UNGUARANTEED,
    CompassResult,
    DirectionalOracle,
    OracleError,
    Probe,
    UnivariateClarkeInterval,
    VectorOracle,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "AmbiguityCertificate",
    "Box",
    "CatalogEntry",
    "CompassResult",
    "Constant",
    "Diminishing",
    "DirectionalOracle",
    "ExprParseError",
    "FinitePointCloud",
    "GUARANTEED",
    "GradientHull",
    "IntegrationConfig",
    "IntegrationError",
    "IntervalHull",
    "MembershipReport",
    "MidpointResult",
    "NonsmoothExpr",
    "OdeProblem",
    "OptTrace",
    "OptimalValueProblem",
    "OracleError",
    "Polyak",
    "Probe",
    "SensitivityTrajectory",
    "StepRule",
    "SupportOracle",
    "UNGUARANTEED",
    "UnivariateClarkeInterval",
    "VectorOracle",
    "VerificationReport",
    "as_oracle",
    "basis_compass_difference",
    "benchmark_suite",
    "catalog",
    "catalog_entry",
    "clarke_membership_check",
    "compass_difference",
    "compass_from_psi",
    "danskin_subgradient",
    "eval_dir_deriv",
    "eval_value",
    "finite_difference_compass",
    "format_expr",
    "integrate_coupled",
    "interval_hull",
    "membership_check",
    "midpoint_element",
    "ode_cost_dirderiv",
    "ode_cost_value",
    "ode_subgradient",
    "optimal_value",
    "parse_expr",
    "polytope_support",
    "psi",
    "sample_limiting_gradients",
    "solve_inner",
    "subgradient_method",
    "three_probe_ambiguity",
    "univariate_clarke_interval",
    "verification_points",
    "verify_subgradient_inequality",
]
