"""Random simplicial faces of the elliptope: certificates, estimates, bounds and oracles."""

from .bounds import (
    C_THM3,
    ChernoffParams,
    MomentReport,
    OliveiraParams,
    SigmaCheck,
    bound_thm1,
    bound_thm2,
    bound_thm3,
    build_sigma_check,
    chernoff_span_bound,
    exact_second_moment_w,
    exact_second_moment_y,
    exact_second_moment_z,
    hyper_h_bound,
    oliveira_span_bound,
)
from .cutgeom import (
    CutMatrix,
    CutVector,
    cut_matrix,
    cut_vector_from_subset,
    is_correlation_matrix,
    lower_triangle_embed,
    simplicial_dim_feasible,
)
from .errors import ConsistencyError, InputError
from .lpcert import (
    Certificate,
    CertificateMatrices,
    Verdict,
    build_certificate_matrices,
    certify_simplicial,
    check_general_position,
    is_full_column_rank,
)
from .maxcut import (
    ElliptopeFactor,
    Graph,
    best_cut_value,
    bm_elliptope_solve,
    brute_force_maxcut,
    check_approx_sandwich,
    cut_weight,
    hyperplane_round,
    laplacian,
)
from .randmodel import (
    DEFAULT_SEED,
    BalanceParam,
    FaceCandidate,
    MonteCarloEstimate,
    estimate_face_probability,
    log_face_count_estimate,
    make_stream,
    sample_face_candidate,
    sample_sbern_vector,
)

__version__ = "0.1.0"
