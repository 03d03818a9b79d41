"""Maximal correlation of bivariate laws with polynomial regression."""

from .errors import (
    DegenerateMarginal,
    DegenerateSupport,
    DegenerateVariance,
    DegreeOutOfRange,
    InvalidSpec,
    LancasterError,
    MomentMatrixNotPSD,
    NegativeProduct,
    NoConvergenceWarning,
    OutOfSupport,
    QuadratureFailure,
    SeriesNotTerminated,
    UnsupportedFamily,
)
from .families import (
    BetaType,
    BivariateGamma,
    BivariateNormal,
    ExponentialRecords,
    FamilySpec,
    FinitePopOrderStats,
    RegressionCoeffs,
    UniformOrderStats,
    closed_form_R,
    conditional_moment,
    joint_pmf,
    marginal_moments,
    regression_coeffs,
    sample_joint,
)
from .joint import DiscreteJoint
from .maxcorr import (
    LancasterSequence,
    MaxCorrReport,
    lancaster_sequence,
    maximal_correlation,
    splitting_record_bound,
)
from .oracle import AceResult, ace_maxcorr, discretize, svd_maxcorr, verify_diagonal
from .orthopoly import (
    FourierCoeffs,
    MomentSequence,
    PolySystem,
    build_ops,
    build_ops_from_rule,
    eval_poly,
    fourier_coeffs,
)

__all__ = [
    "AceResult",
    "BetaType",
    "BivariateGamma",
    "BivariateNormal",
    "DegenerateMarginal",
    "DegenerateSupport",
    "DegenerateVariance",
    "DegreeOutOfRange",
    "DiscreteJoint",
    "ExponentialRecords",
    "FamilySpec",
    "FinitePopOrderStats",
    "FourierCoeffs",
    "InvalidSpec",
    "LancasterError",
    "LancasterSequence",
    "MaxCorrReport",
    "MomentMatrixNotPSD",
    "MomentSequence",
    "NegativeProduct",
    "NoConvergenceWarning",
    "OutOfSupport",
    "PolySystem",
    "QuadratureFailure",
    "RegressionCoeffs",
    "SeriesNotTerminated",
    "UniformOrderStats",
    "UnsupportedFamily",
    "ace_maxcorr",
    "build_ops",
    "build_ops_from_rule",
    "closed_form_R",
    "conditional_moment",
    "discretize",
    "eval_poly",
    "fourier_coeffs",
    "joint_pmf",
    "lancaster_sequence",
    "marginal_moments",
    "maximal_correlation",
    "regression_coeffs",
    "sample_joint",
    "splitting_record_bound",
    "svd_maxcorr",
    "verify_diagonal",
]

__version__ = "0.1.0"
