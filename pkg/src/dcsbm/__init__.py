"""Degree-corrected stochastic block model: generation, evidence and order selection."""
from .core import (
    LabelError,
    Labels,
    ModelParams,
    Network,
    NetworkError,
    SuffStats,
    compute_stats,
    omega_membership,
    validate_params,
)
from .likelihood import (
    BudgetExceeded,
    ProfileResult,
    log_c,
    log_joint,
    log_profile_sup,
    mle_params,
    search_profile_labels,
)
from .marginal import (
    EvidenceResult,
    log_ABC,
    log_marginal_bracket,
    log_marginal_exact,
    log_marginal_partitions,
)
from .sampler import (
    GeneratorConfig,
    generate,
    sample_labels,
    sample_network,
    sample_params,
    split_seed,
)
from .selection import SelectionReport, penalty, select_k

__version__ = "0.1.0"
