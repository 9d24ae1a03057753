"""Prequential comparison of Gaussian time-series models under log and Hyvarinen scores."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConfigError,
    ContaminationIndexError,
    DegenerateInputError,
    EmptyResultsError,
    InvalidModelError,
    NonstationaryModelError,
    PrequentialError,
    ReplicationError,
    SeriesTooShortError,
)
from .models import (  # noqa: E402
    GaussianPredictive,
    ProcessModel,
    conditional_predictive,
    contaminate,
    load_series,
    make_rng,
    save_series,
    simulate_series,
    stationary_distribution,
)
from .scoring import (  # noqa: E402
    Decision,
    DeltaPath,
    classify,
    cumulative_delta,
    delta_hyv_step,
    delta_log_step,
    hyvarinen_fd_oracle,
    hyvarinen_score,
    log_score,
)
from .linearity import (  # noqa: E402
    AffineCase,
    AffineRelation,
    affine_relation,
    empirical_affine_residual,
    fit_affine,
)
from .experiment import (  # noqa: E402
    ClassificationSummary,
    Contamination,
    ExperimentConfig,
    ReplicationResult,
    paper_default_config,
    replication_series,
    run_experiment,
    summarize,
)
