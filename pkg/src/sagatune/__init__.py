"""Mini-batch SAGA with b-nice sampling and closed-form tuning of the
step size and mini-batch size from expected-smoothness bounds."""

from .bernstein import (
    BernsteinReport,
    MatrixEnsemble,
    bernstein_check,
    center_ensemble,
    jacobi_eigenvalues,
    variance_statistic,
)
from .data import (
    Dataset,
    generate_artificial,
    parse_libsvm,
    rotate,
    standardize_features,
    write_libsvm,
)
from .errors import (
    DimensionError,
    IntractableError,
    NumericalError,
    ParseError,
    SagatuneError,
    ValidationError,
)
from .expsmooth import (
    SmoothnessCurve,
    bernstein_bound,
    closed_form_curve,
    exact_curve,
    exact_expected_smoothness,
    practical_estimate,
    simple_bound,
)
from .glm import (
    GLMProblem,
    curvature_bound,
    full_gradient,
    loss_value,
    sample_gradient,
)
from .smoothness import (
    SmoothnessProfile,
    compute_profile,
    lambda_extreme_gram,
    subset_smoothness,
)
from .solver import (
    ReferenceSolution,
    SolverConfig,
    SolverState,
    Trace,
    bnice_sample,
    compute_reference_solution,
    initial_state,
    run_saga,
    saga_step,
    unbiasedness_check,
)
from .tuning import (
    brute_force_optimal_b,
    complexity,
    complexity_components,
    defazio_step_size,
    hofmann_step_size,
    optimal_b_bernstein,
    optimal_b_practical,
    optimal_b_simple,
    step_size,
)

__version__ = "0.1.0"

__all__ = [
    "BernsteinReport",
    "Dataset",
    "DimensionError",
    "GLMProblem",
    "IntractableError",
    "MatrixEnsemble",
    "NumericalError",
    "ParseError",
    "ReferenceSolution",
    "SagatuneError",
    "SmoothnessCurve",
    "SmoothnessProfile",
    "SolverConfig",
    "SolverState",
    "Trace",
    "ValidationError",
    "bernstein_bound",
    "bernstein_check",
    "bnice_sample",
    "brute_force_optimal_b",
    "center_ensemble",
    "closed_form_curve",
    "complexity",
    "complexity_components",
    "compute_profile",
    "compute_reference_solution",
    "curvature_bound",
    "defazio_step_size",
    "exact_curve",
    "exact_expected_smoothness",
    "full_gradient",
    "generate_artificial",
    "hofmann_step_size",
    "initial_state",
    "jacobi_eigenvalues",
    "lambda_extreme_gram",
    "loss_value",
    "optimal_b_bernstein",
    "optimal_b_practical",
    "optimal_b_simple",
    "parse_libsvm",
    "practical_estimate",
    "rotate",
    "run_saga",
    "saga_step",
    "sample_gradient",
    "simple_bound",
    "standardize_features",
    "step_size",
    "subset_smoothness",
    "unbiasedness_check",
    "variance_statistic",
    "write_libsvm",
]
