"""Polar-code construction and analysis on the binary erasure channel."""

from .codec import (
    DecodeResult,
    SimResult,
    exact_block_error,
    polar_encode,
    sc_decode_bec,
    simulate,
    wilson_interval,
)
from .construction import (
    CodeSpec,
    ConstructionReport,
    construct_multipocket,
    load_codespec,
    pocket_weights,
    save_codespec,
    select_classical,
    union_bound,
)
from .criterion import (
    CandidateH,
    GridFunction,
    binary_entropy,
    binary_entropy_inv,
    estimate_mu,
    iterate_g,
    mu_star_from_ratio,
    ratio_curve,
    sup_ratio,
)
from .erasure import (
    ChannelPath,
    LogErasure,
    RootChannel,
    channel_erasure,
    complement_log2,
    level_erasures,
    level_log_table,
    polar_better,
    polar_worse,
    polarize_prob,
)
from .errors import (
    DecodingInconsistencyError,
    DegenerateFitError,
    EmptyCodeError,
    InfeasibleTargetError,
    InvalidCandidateError,
    LevelTooLargeError,
    PolarBECError,
)
from .frontier import (
    CorollaryReport,
    FrontierPoint,
    RegionQuery,
    conjectured_intercept,
    discretization_margin,
    gamma_tradeoff,
    is_achievable,
    max_beta,
    trace_frontier,
    verify_corollaries,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateH",
    "ChannelPath",
    "CodeSpec",
    "ConstructionReport",
    "CorollaryReport",
    "DecodeResult",
    "DecodingInconsistencyError",
    "DegenerateFitError",
    "EmptyCodeError",
    "FrontierPoint",
    "GridFunction",
    "InfeasibleTargetError",
    "InvalidCandidateError",
    "LevelTooLargeError",
    "LogErasure",
    "PolarBECError",
    "RegionQuery",
    "RootChannel",
    "SimResult",
    "binary_entropy",
    "binary_entropy_inv",
    "channel_erasure",
    "complement_log2",
    "conjectured_intercept",
    "construct_multipocket",
    "discretization_margin",
    "estimate_mu",
    "exact_block_error",
    "gamma_tradeoff",
    "is_achievable",
    "iterate_g",
    "level_erasures",
    "level_log_table",
    "load_codespec",
    "max_beta",
    "mu_star_from_ratio",
    "pocket_weights",
    "polar_better",
    "polar_encode",
    "polar_worse",
    "polarize_prob",
    "ratio_curve",
    "save_codespec",
    "sc_decode_bec",
    "select_classical",
    "simulate",
    "sup_ratio",
    "trace_frontier",
    "union_bound",
    "verify_corollaries",
    "wilson_interval",
]
