"""Margin-bounds lab: multi-class margin complexities, bounds, and checks.

The package computes empirical Rademacher complexities of multi-class
margin hypothesis classes (exact enumeration and seeded Monte Carlo),
evaluates margin-based risk bounds with their additive term breakdowns,
tabulates competitor order terms, and numerically verifies the margin
class's subadditivity and its linear-in-k lower-bound construction.
"""
from .core import (
    CapExceeded,
    LabeledDataset,
    RademacherEstimate,
    SupOracle,
    TabulatedClass,
)
from .rademacher import (
    exact_empirical_rademacher,
    mc_empirical_rademacher,
    trial_sign_block,
)
from .margin import (
    MarginClassSpec,
    ScoreMatrix,
    empirical_margin_cdf,
    margin,
    margin_distribution,
    margins,
    materialize_margin_class,
    partial_margin,
    predict,
    verify_lemma1,
)
from .kernel import KernelSpec, gram, kernel_rad_bounds, parse_kernel_spec
from .bounds import (
    BoundInput,
    BoundReport,
    compare_bounds,
    table1_term,
    theorem1_bound,
    theorem2_bound,
)
from .lowerbound import (
    IntervalClassSpec,
    LowerBoundConfig,
    brute_force_interval_sup,
    interval_sup_dp,
    restricted_rademacher,
    select_t,
    star_class_sup,
    sweep_theorem3,
    theorem3_margin_sup,
    verify_theorem3,
)
from .synth import GeneratorSpec, generate, train_ova_ridge

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CapExceeded",
    "LabeledDataset",
    "RademacherEstimate",
    "SupOracle",
    "TabulatedClass",
    "exact_empirical_rademacher",
    "mc_empirical_rademacher",
    "trial_sign_block",
    "MarginClassSpec",
    "ScoreMatrix",
    "empirical_margin_cdf",
    "margin",
    "margin_distribution",
    "margins",
    "materialize_margin_class",
    "partial_margin",
    "predict",
    "verify_lemma1",
    "KernelSpec",
    "gram",
    "kernel_rad_bounds",
    "parse_kernel_spec",
    "BoundInput",
    "BoundReport",
    "compare_bounds",
    "table1_term",
    "theorem1_bound",
    "theorem2_bound",
    "IntervalClassSpec",
    "LowerBoundConfig",
    "brute_force_interval_sup",
    "interval_sup_dp",
    "restricted_rademacher",
    "select_t",
    "star_class_sup",
    "sweep_theorem3",
    "theorem3_margin_sup",
    "verify_theorem3",
    "GeneratorSpec",
    "generate",
    "train_ova_ridge",
]
