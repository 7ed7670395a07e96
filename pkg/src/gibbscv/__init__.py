"""Gibbs point process simulation and cross-validation-based estimation."""

from .core import (
    InvalidRetentionError,
    Point,
    PointPattern,
    RngStream,
    UNIT_SQUARE,
    Window,
    distance,
    load_pattern,
    save_pattern,
    thin_independent,
)
from .estimation import (
    CvConfig,
    DegeneratePatternError,
    InconsistentQuadratureError,
    LossSpec,
    NoFeasiblePointError,
    ParamGrid,
    QuadratureScheme,
    TestFunctionSpec,
    WeightScheme,
    build_quadrature,
    fit_ppl,
    fit_tf,
    grid_search,
    hardcore_adaptive_grid,
    innovation,
    loss,
    ppl_weight,
    prediction_error,
    test_function,
    tf_limit_experiment,
)
from .experiments import (
    InsufficientDataError,
    StudyConfig,
    StudyError,
    StudyResult,
    StudyRow,
    gnz_check,
    mse_decompose,
    run_study,
    scenario_config,
)
from .models import (
    GeyerModel,
    HardCoreModel,
    IntensityEvaluator,
    ModelSpec,
    PoissonModel,
    StraussModel,
    conditional_intensity,
    local_stability_bound,
    log_interaction,
    model_from_dict,
    model_from_json,
    model_to_json,
    neighbor_count,
)
from .sampling import (
    CvRound,
    EnvelopeViolationError,
    InvalidPartitionError,
    InvalidProbabilitiesError,
    McmcConfig,
    cv_block,
    cv_generalized_multinomial,
    cv_monte_carlo,
    cv_multinomial_kfold,
    grid_partition,
    sample_gibbs,
    sample_model,
    sample_poisson,
)

__version__ = "0.1.0"
