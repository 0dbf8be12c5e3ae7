"""Soft cone metric spaces over finite parameter sets, with certified fixed-point solvers."""

from .cone import Cone, Relation, compare, cone_property_check, orthant_cone, sup_pair
from .convergence import (
    SoftSequence,
    Verdict,
    converges_to,
    is_cauchy,
    norm_equivalence_check,
    unique_limit_check,
)
from .core import (
    Order,
    ParameterSet,
    SoftElement,
    SoftReal,
    SoftSet,
    soft_elements_of,
    soft_real_arith,
    soft_real_compare,
    soft_set_from_elements,
    soft_set_op,
)
from .fixed_point import (
    ContractionSpec,
    Family,
    FixedPointCertificate,
    SelfMap,
    Stop,
    cross_check_uniqueness,
    iterate,
    matrix_affine,
    scalar_affine,
    solve,
    solve_power,
    verify_contraction,
)
from .metric import (
    SoftConeMetric,
    check_axioms,
    example_metric,
    from_crisp,
    from_family,
    slice_metric,
)
from .space import (
    Ball,
    SoftNorm,
    SoftVector,
    ball_contains,
    check_norm_axioms,
    norm,
    norm_cauchy_check,
    norm_metric,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "ball_contains",
    "check_axioms",
    "check_norm_axioms",
    "compare",
    "Cone",
    "cone_property_check",
    "ContractionSpec",
    "converges_to",
    "cross_check_uniqueness",
    "example_metric",
    "Family",
    "FixedPointCertificate",
    "from_crisp",
    "from_family",
    "is_cauchy",
    "iterate",
    "matrix_affine",
    "norm",
    "norm_cauchy_check",
    "norm_equivalence_check",
    "norm_metric",
    "Order",
    "orthant_cone",
    "ParameterSet",
    "Relation",
    "scalar_affine",
    "SelfMap",
    "slice_metric",
    "soft_elements_of",
    "soft_real_arith",
    "soft_real_compare",
    "soft_set_from_elements",
    "soft_set_op",
    "SoftConeMetric",
    "SoftElement",
    "SoftNorm",
    "SoftReal",
    "SoftSequence",
    "SoftSet",
    "SoftVector",
    "solve",
    "solve_power",
    "Stop",
    "sup_pair",
    "unique_limit_check",
    "Verdict",
    "verify_contraction",
]
