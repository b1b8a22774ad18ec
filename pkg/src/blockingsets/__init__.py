"""Blocking sets and linear sets in finite projective spaces."""

__version__ = "0.1.0"

from .fields import (
    FieldElement,
    FieldSpec,
    conway_polynomial,
    conway_table_version,
    make_field,
)
from .projspace import (
    PointSet,
    ProjPoint,
    ProjectiveSpace,
    Subspace,
    SubspaceChart,
    gaussian_binomial,
    meet,
    project,
    span,
    subspace_traces,
)
from .spreads import SpreadContext, spread_context
from .blocking import (
    BlockingReport,
    GapClassification,
    IntersectionSpectrum,
    SecantReport,
    blocking_report,
    classify_small_large,
    classify_trace,
    exponent,
    gap_thresholds,
    is_k_blocking,
    is_minimal,
    is_redei,
    is_small,
    is_trivial,
    nonsecant_point_count,
    one_mod_p0_applicable,
    secant_analysis,
    spectrum,
    tangent_counts,
    traces_of,
)
from .linearsets import (
    LinearSetWitness,
    SublineMeetReport,
    build_family,
    build_family_witness,
    build_linear_set,
    enumerate_sublines,
    is_linear,
    secant_linearity_check,
    subline_meet_check,
    subline_patterns,
)
from .reconstruct import (
    ReconstructionResult,
    SecantBoundReport,
    check_span_lemma,
    reconstruct,
    secant_count_bounds,
)
from .harness import (
    CHECK_IDS,
    Instance,
    LemmaCheck,
    counting_identities,
    load_catalogue,
    load_instance,
    run_suite,
    scorecard,
)
from .formats import read_pointset, write_pointset
from .catalogue import CATALOGUE, load_shipped

__all__ = [
    "FieldElement",
    "FieldSpec",
    "conway_polynomial",
    "conway_table_version",
    "make_field",
    "PointSet",
    "ProjPoint",
    "ProjectiveSpace",
    "Subspace",
    "SubspaceChart",
    "gaussian_binomial",
    "meet",
    "project",
    "span",
    "subspace_traces",
    "SpreadContext",
    "spread_context",
    "BlockingReport",
    "GapClassification",
    "IntersectionSpectrum",
    "SecantReport",
    "blocking_report",
    "classify_small_large",
    "classify_trace",
    "exponent",
    "gap_thresholds",
    "is_k_blocking",
    "is_minimal",
    "is_redei",
    "is_small",
    "is_trivial",
    "nonsecant_point_count",
    "one_mod_p0_applicable",
    "secant_analysis",
    "spectrum",
    "tangent_counts",
    "traces_of",
    "LinearSetWitness",
    "SublineMeetReport",
    "build_family",
    "build_family_witness",
    "build_linear_set",
    "enumerate_sublines",
    "is_linear",
    "secant_linearity_check",
    "subline_meet_check",
    "subline_patterns",
    "ReconstructionResult",
    "SecantBoundReport",
    "check_span_lemma",
    "reconstruct",
    "secant_count_bounds",
    "CHECK_IDS",
    "Instance",
    "LemmaCheck",
    "counting_identities",
    "load_catalogue",
    "load_instance",
    "run_suite",
    "scorecard",
    "read_pointset",
    "write_pointset",
    "CATALOGUE",
    "load_shipped",
    "__version__",
]
