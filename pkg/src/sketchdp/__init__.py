"""Differentially private low-rank matrix approximation via
sketch-then-project, with non-private and input-perturbation baselines,
coherence measurement, privacy accounting, and a reconstruction-attack lab.
"""

from .attack import (
    AttackReport,
    attack,
    encode_database,
    identity_mechanism,
    make_constant_mechanism,
    make_gaussian_noise_mechanism,
    make_pfp_mechanism,
    make_rr_mechanism,
    round_to_bits,
)
from .coherence import (
    CoherenceReport,
    LinfBoundCheck,
    TruncationCheck,
    c_coherence,
    coherence_report,
    linf_basis_bound_check,
    mu0_coherence,
    prune_entries,
    truncation_error_check,
)
from .experiment import (
    ALGORITHMS,
    RECORD_FIELDS,
    ExperimentRecord,
    records_to_csv,
    run_experiment,
    sweep,
)
from .generators import KINDS, GeneratorSpec, generate
from .linalg import (
    SVD_SIZE_LIMIT,
    SvdResult,
    as_matrix,
    frobenius_norm,
    gram_schmidt,
    matrix_rank,
    optimal_rank_k_error,
    project_onto_range,
    spectral_norm,
    svd_oracle,
    truncate_to_rank,
)
from .matio import MatrixFormatError, format_matrix, load_matrix, parse_matrix, save_matrix
from .privacy import (
    NoiseCalibration,
    PrivacyBudget,
    advanced_composition,
    gaussian_calibration,
    gaussian_mechanism_sigma,
    randomized_response,
)
from .rng import gaussian_matrix, gaussian_vector, uniform_stream
from .sketch import (
    ApproxResult,
    RangeResult,
    SketchParams,
    hmt_low_rank,
    pfp,
    private_projection,
    private_range_finder,
    projection_noise_scale,
    range_noise_scale,
    rr_low_rank_baseline,
    select_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "ApproxResult",
    "AttackReport",
    "CoherenceReport",
    "ExperimentRecord",
    "GeneratorSpec",
    "KINDS",
    "LinfBoundCheck",
    "MatrixFormatError",
    "NoiseCalibration",
    "PrivacyBudget",
    "RECORD_FIELDS",
    "RangeResult",
    "SVD_SIZE_LIMIT",
    "SketchParams",
    "SvdResult",
    "TruncationCheck",
    "advanced_composition",
    "as_matrix",
    "attack",
    "c_coherence",
    "coherence_report",
    "encode_database",
    "format_matrix",
    "frobenius_norm",
    "gaussian_calibration",
    "gaussian_matrix",
    "gaussian_mechanism_sigma",
    "gaussian_vector",
    "generate",
    "gram_schmidt",
    "hmt_low_rank",
    "identity_mechanism",
    "linf_basis_bound_check",
    "load_matrix",
    "make_constant_mechanism",
    "make_gaussian_noise_mechanism",
    "make_pfp_mechanism",
    "make_rr_mechanism",
    "matrix_rank",
    "mu0_coherence",
    "optimal_rank_k_error",
    "parse_matrix",
    "pfp",
    "private_projection",
    "private_range_finder",
    "project_onto_range",
    "projection_noise_scale",
    "prune_entries",
    "randomized_response",
    "range_noise_scale",
    "records_to_csv",
    "round_to_bits",
    "rr_low_rank_baseline",
    "run_experiment",
    "save_matrix",
    "select_alpha",
    "spectral_norm",
    "svd_oracle",
    "sweep",
    "truncate_to_rank",
    "truncation_error_check",
    "uniform_stream",
]
