"""Expurgated-exponent computation and random-code expurgation experiments.

Computes random-coding and expurgated error exponents for discrete
memoryless channels and verifies, by seeded Monte-Carlo over
pairwise-independent codebooks, that expurgating a small fraction of a
random mother code leaves a code whose codewords all clear the expurgated
threshold with probability approaching 1.
"""

from .channel import (
    BhattMatrix,
    Channel,
    bhattacharyya,
    bhattacharyya_matrix,
    bhattacharyya_seq,
    bsc,
    erasure,
    load_channel,
    save_channel,
    sequence_likelihood,
    validate_channel,
)
from .ensembles import (
    Codebook,
    EnsembleSpec,
    codebook_size,
    nearest_composition,
    sample_codebook,
)
from .exponents import (
    ExponentSolution,
    GammaKind,
    InputDistribution,
    Schedule,
    ex_limit,
    ex_multi_letter_exact,
    ex_single_letter,
    gallager_e0,
    n0_threshold,
    optimize_rho,
    random_coding_exponent,
    schedule,
)
from .expurgation import (
    CodewordEval,
    ExpurgatedCode,
    TrialCensus,
    census,
    codeword_exponent,
    evaluate_codebook,
    exact_ml_error,
    exact_ml_errors,
    expurgate,
    is_good_mother_code,
    union_bhattacharyya_bound,
)
from .harness import (
    CheckResult,
    ExperimentConfig,
    ExperimentResult,
    ExponentHistogram,
    NBlockResult,
    concentration_histogram,
    lemma1_report,
    mean_phi_report,
    result_csv,
    run_experiment,
    run_trial,
    wilson_interval,
    write_run,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "BhattMatrix",
    "Channel",
    "CheckResult",
    "Codebook",
    "CodewordEval",
    "EnsembleSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "ExponentHistogram",
    "ExponentSolution",
    "ExpurgatedCode",
    "GammaKind",
    "InputDistribution",
    "KERNEL_BACKEND",
    "NBlockResult",
    "Schedule",
    "TrialCensus",
    "bhattacharyya",
    "bhattacharyya_matrix",
    "bhattacharyya_seq",
    "bsc",
    "census",
    "codebook_size",
    "codeword_exponent",
    "concentration_histogram",
    "erasure",
    "evaluate_codebook",
    "ex_limit",
    "ex_multi_letter_exact",
    "ex_single_letter",
    "exact_ml_error",
    "exact_ml_errors",
    "expurgate",
    "gallager_e0",
    "is_good_mother_code",
    "lemma1_report",
    "load_channel",
    "mean_phi_report",
    "n0_threshold",
    "nearest_composition",
    "optimize_rho",
    "random_coding_exponent",
    "result_csv",
    "run_experiment",
    "run_trial",
    "sample_codebook",
    "save_channel",
    "schedule",
    "sequence_likelihood",
    "union_bhattacharyya_bound",
    "validate_channel",
    "wilson_interval",
    "write_run",
]
