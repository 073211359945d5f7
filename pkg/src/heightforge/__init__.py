"""heightforge: exact canonical heights and preperiodicity certificates for
one-parameter families f_t(z) = F(z^e, t) over the rationals.

The package computes certified enclosures of canonical heights and local
Green's functions by exact rational arithmetic (no floating-point error in
any comparison that decides a certificate), assembles the explicit
constants behind uniform height lower bounds for weighted homogeneous
families, and certifies rational points as preperiodic or wandering.
"""

from .arith import (
    INF,
    LocalValue,
    LogSum,
    Place,
    format_rational,
    padic_valuation,
    parse_rational,
    support,
)
from .constants import (
    ConstantsReport,
    EpsilonSymbolic,
    MKConstants,
    ResultantBound,
    exceptional_places,
    mk_a,
    mk_b,
    mk_mvt,
    model_resultant,
    pigeonhole_delta,
    resultant_bound_check,
    theorem1_constants,
)
from .errors import (
    BudgetExceeded,
    DomainError,
    HeightforgeError,
    NormalizationUnavailable,
    PrecisionLoss,
    SpecError,
)
from .family import (
    CoverAnalysis,
    EGeneralResult,
    Family,
    PoleGroup,
    analyze_cover,
    build_family,
    evaluate_cover,
    is_e_general,
    monic_normalize,
    required_pole_count,
    specialize,
)
from .heights import (
    GreenResult,
    Infinity,
    arakelov_green,
    canonical_height,
    conductor_count,
    height_defect_bound,
    l1_l2_split,
    lambda_local,
    local_green,
    naive_height,
)
from .preperiodic import (
    Certificate,
    CriterionResult,
    CycleFound,
    EscapeCertified,
    Finding,
    ObstructionRecord,
    OrbitRecord,
    OrbitTruncated,
    ScanReport,
    bad_place_obstruction,
    certify_point,
    find_nonpower_place,
    iterate_orbit,
    power_criterion,
    scan,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # arithmetic
    "INF", "LocalValue", "LogSum", "Place",
    "format_rational", "padic_valuation", "parse_rational", "support",
    # families and covers
    "CoverAnalysis", "EGeneralResult", "Family", "PoleGroup",
    "analyze_cover", "build_family", "evaluate_cover", "is_e_general",
    "monic_normalize", "required_pole_count", "specialize",
    # heights and Green's functions
    "GreenResult", "Infinity", "arakelov_green", "canonical_height",
    "conductor_count", "height_defect_bound", "l1_l2_split", "lambda_local",
    "local_green", "naive_height",
    # explicit constants
    "ConstantsReport", "EpsilonSymbolic", "MKConstants", "ResultantBound",
    "exceptional_places", "mk_a", "mk_b", "mk_mvt", "model_resultant",
    "pigeonhole_delta", "resultant_bound_check", "theorem1_constants",
    # certificates, filters, scans
    "Certificate", "CriterionResult", "CycleFound", "EscapeCertified",
    "Finding", "ObstructionRecord", "OrbitRecord", "OrbitTruncated",
    "ScanReport", "bad_place_obstruction", "certify_point",
    "find_nonpower_place", "iterate_orbit", "power_criterion", "scan",
    # errors
    "BudgetExceeded", "DomainError", "HeightforgeError",
    "NormalizationUnavailable", "PrecisionLoss", "SpecError",
]
