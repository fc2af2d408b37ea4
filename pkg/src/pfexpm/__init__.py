"""Matrix exponentials of Hermitian matrices via partial fractions.

exp(A) and exp(A) v are approximated by R_n(A), the rational function
R_n(z) = 1/exp_n(-z) built from the degree-n Taylor polynomial of exp.  Its
partial-fraction expansion turns the evaluation into n/2 independent shifted
solves (one per conjugate root pair), which parallelize trivially and carry
rigorous a priori error bounds for Hermitian arguments.
"""

from .bench import (
    FAMILY_LAP1D,
    FAMILY_LAP2D,
    FAMILY_RANDOM,
    BenchRecord,
    MatrixSpec,
    ScalarRow,
    emit_csv,
    emit_plotdata,
    emit_scalar_csv,
    gen_matrix,
    parse_csv,
    run_matrix_suite,
    run_scalar_suite,
)
from .ddreal import DoubleDouble, DoubleDoubleComplex
from .engine import (
    MODE_ACTION,
    MODE_FULL,
    ExpOptions,
    ExpResult,
    apriori_bound,
    matexp_action,
    matexp_full,
    matexp_shifted,
)
from .errors import (
    BadSpec,
    ConditionViolated,
    ConvergenceFailure,
    InvariantViolation,
    IterationLimitExceeded,
    OrderOutOfRange,
    OrderTooSmall,
    OrderTooSmallWarning,
    Overflow,
    ParseError,
    PfexpmError,
    PoleHit,
    SingularSystem,
)
from .linalg import (
    HermitianMatrix,
    SpectralBounds,
    eig_hermitian,
    exp_oracle,
    gershgorin_bounds,
    norm2,
    shifted_inverse,
    shifted_solve,
    solve_residual_bound,
)
from .roots import (
    SEPARATION,
    ExclusionReport,
    RootTable,
    build_table,
    check_exclusion_regions,
    compute_coeffs,
    compute_roots,
    default_table,
    load_table,
    save_table,
    table_from_text,
    table_to_text,
)
from .scalar import (
    GAMMA,
    DigitModel,
    ErrorBudget,
    FnReport,
    PartialFraction,
    approx_error,
    bound_m1,
    bound_m2,
    check_fn_inequalities,
    err_max_location,
    error_budget,
    eval_pf,
    eval_pf_dd,
    eval_reciprocal,
    eval_reciprocal_dd,
    exp_trunc,
    partial_fraction,
    series_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "BadSpec",
    "BenchRecord",
    "ConditionViolated",
    "ConvergenceFailure",
    "DigitModel",
    "DoubleDouble",
    "DoubleDoubleComplex",
    "ErrorBudget",
    "ExclusionReport",
    "ExpOptions",
    "ExpResult",
    "FAMILY_LAP1D",
    "FAMILY_LAP2D",
    "FAMILY_RANDOM",
    "FnReport",
    "GAMMA",
    "HermitianMatrix",
    "InvariantViolation",
    "IterationLimitExceeded",
    "MODE_ACTION",
    "MODE_FULL",
    "MatrixSpec",
    "OrderOutOfRange",
    "OrderTooSmall",
    "OrderTooSmallWarning",
    "Overflow",
    "ParseError",
    "PartialFraction",
    "PfexpmError",
    "PoleHit",
    "RootTable",
    "SEPARATION",
    "ScalarRow",
    "SingularSystem",
    "SpectralBounds",
    "apriori_bound",
    "approx_error",
    "bound_m1",
    "bound_m2",
    "build_table",
    "check_exclusion_regions",
    "check_fn_inequalities",
    "compute_coeffs",
    "compute_roots",
    "default_table",
    "eig_hermitian",
    "emit_csv",
    "emit_plotdata",
    "emit_scalar_csv",
    "err_max_location",
    "error_budget",
    "eval_pf",
    "eval_pf_dd",
    "eval_reciprocal",
    "eval_reciprocal_dd",
    "exp_oracle",
    "exp_trunc",
    "gen_matrix",
    "gershgorin_bounds",
    "load_table",
    "matexp_action",
    "matexp_full",
    "matexp_shifted",
    "norm2",
    "parse_csv",
    "partial_fraction",
    "run_matrix_suite",
    "run_scalar_suite",
    "save_table",
    "series_coefficients",
    "shifted_inverse",
    "shifted_solve",
    "solve_residual_bound",
    "table_from_text",
    "table_to_text",
]
