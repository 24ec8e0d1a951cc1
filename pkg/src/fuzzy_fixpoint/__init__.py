"""Fuzzy seminormed spaces over R^d and a certified averaged fixed-point iteration."""

from .contraction import (
    AffineMap,
    ContractionCertificate,
    RegisteredMap,
    apply_map,
    certify_affine_contraction,
    check_contractive,
    check_implication,
    operator_lipschitz,
    register_map,
)
from .errors import (
    CertificationRefused,
    DomainError,
    FuzzyFixpointError,
    NotAContraction,
    SingularSystemError,
    UnknownMapError,
)
from .fuzzy_space import FuzzyBall, FuzzySeminorm, ball_contains, check_fuzzy_axioms, fuzzy_eval
from .seminorms import (
    EllipsoidGauge,
    SeminormFamily,
    WeightedAbs,
    WeightedSup,
    is_separating,
    minkowski_functional,
    seminorm_eval,
)
from .solver import (
    FixedPointResult,
    IterationTrace,
    LambdaSchedule,
    SolverConfig,
    Termination,
    cauchy_diagnostic,
    iterate,
    oracle_affine_fixed_point,
    residual_monotonicity,
    uniqueness_probe,
    verify_fixed_point,
)
from .tnorm import AxiomReport, TNorm, check_tnorm_axioms, tnorm_eval

__version__ = "0.1.0"
