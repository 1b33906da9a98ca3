"""Gaussian integral means of entire functions.

Computes M_{p,alpha}(f, r) — the ratio of the integrals of |f|^p and 1
against the weight e^{-alpha |z|^2} over the disk |z| <= r — and decides
when ln M_{p,alpha}(f, r) is convex or concave in ln r. The package has
four layers: quadrature for circle and radial integrals
(`integral_means`), the phi/g/ABCS special-function stack (`special_fn`),
the D-operator convexity machinery with theorem checkers
(`convexity_analysis`), and property suites that re-verify the
inequality chain behind those theorems on explicit grids
(`verification`). A CLI (`gaussmeans`) fronts all of it.
"""

from .convexity_analysis import (
    CriterionReport,
    CurvatureSummary,
    DeltaPair,
    FunctionJet,
    SlopeFunction,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    classify_curvature,
    corollary1_radius,
    curvature_tolerance,
    curvature_verdict,
    d_of_phi,
    d_operator,
    delta_both_ways,
    delta_from_parts,
    loglog_second_difference,
    theorem2_bound,
    y0_threshold,
)
from .functions import EntireFunction, parse_function_spec
from .integral_means import (
    CircleMean,
    MeanParams,
    MeanProfile,
    circle_mean,
    geometric_grid,
    h_values,
    monomial_mean_closed_form,
    radial_mean_profile,
)
from .special_fn import (
    AuxiliaryBundle,
    CancellationFault,
    ConvergenceError,
    DomainFault,
    RootResult,
    aux_abcs,
    aux_g,
    lower_incomplete_gamma,
    phi,
    sign_tolerance,
    solve_t0,
    x0_of_alpha,
)
from .verification import (
    GridSpec,
    SuiteReport,
    d3_chain_facts,
    verify_d_chain,
    verify_delta_boundary,
    verify_lemma4,
    verify_lemma5,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # functions
    "EntireFunction",
    "parse_function_spec",
    # special functions
    "AuxiliaryBundle",
    "RootResult",
    "ConvergenceError",
    "DomainFault",
    "CancellationFault",
    "phi",
    "aux_g",
    "aux_abcs",
    "solve_t0",
    "x0_of_alpha",
    "lower_incomplete_gamma",
    "sign_tolerance",
    # integral means
    "MeanParams",
    "CircleMean",
    "MeanProfile",
    "circle_mean",
    "radial_mean_profile",
    "monomial_mean_closed_form",
    "geometric_grid",
    "h_values",
    # convexity analysis
    "FunctionJet",
    "SlopeFunction",
    "DeltaPair",
    "CriterionReport",
    "CurvatureSummary",
    "d_operator",
    "d_of_phi",
    "delta_from_parts",
    "delta_both_ways",
    "y0_threshold",
    "theorem2_bound",
    "corollary1_radius",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "loglog_second_difference",
    "curvature_tolerance",
    "classify_curvature",
    "curvature_verdict",
    # verification
    "GridSpec",
    "SuiteReport",
    "verify_lemma4",
    "verify_lemma5",
    "verify_d_chain",
    "verify_delta_boundary",
    "d3_chain_facts",
]
