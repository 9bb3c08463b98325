"""Learning classifiers from unpaired sequences by fitting a Markov output prior.

The library covers the full desk-scale experiment pipeline: a seeded Markov
benchmark observed through a hidden permutation, the unsupervised objective
(sequence-prior fitness plus a generative reconstruction regularizer) with
analytic gradients, training loops, and the diagnostics used to study the
loss landscape, the rank-1 trivial solutions, and robustness to prior noise.
"""

from .diagnostics import (
    LandscapeProbe,
    OracleResult,
    landscape_line,
    max_prediction_tv,
    permutation_oracle,
    random_line_endpoint,
    rank1_score,
    singular_values,
    test_error,
)
from .linear_models import (
    GeneratorParams,
    OneHotSequence,
    PredictorParams,
    generate_log_dist,
    init_weights,
    predict_dist,
    prediction_matrix,
)
from .objective import (
    GradientPair,
    ObjectiveBreakdown,
    analytic_gradient,
    fitness_term,
    regularization_term,
    supervised_cross_entropy,
    supervised_gradient,
    unsupervised_objective,
)
from .sequence_prior import (
    ConvergenceError,
    TransitionModel,
    default_prior,
    estimate_transition,
    perturb_transition,
    sample_chain,
    stationary_distribution,
)
from .synthetic_data import SyntheticDataset, make_dataset, random_permutation
from .trainer import TrainConfig, TrainTrace, TrainingDiverged, train_supervised, train_unsupervised

__all__ = [
    "ConvergenceError",
    "GeneratorParams",
    "GradientPair",
    "LandscapeProbe",
    "ObjectiveBreakdown",
    "OneHotSequence",
    "OracleResult",
    "PredictorParams",
    "SyntheticDataset",
    "TrainConfig",
    "TrainTrace",
    "TrainingDiverged",
    "TransitionModel",
    "analytic_gradient",
    "default_prior",
    "estimate_transition",
    "fitness_term",
    "generate_log_dist",
    "init_weights",
    "landscape_line",
    "make_dataset",
    "max_prediction_tv",
    "permutation_oracle",
    "perturb_transition",
    "predict_dist",
    "prediction_matrix",
    "random_line_endpoint",
    "random_permutation",
    "rank1_score",
    "regularization_term",
    "sample_chain",
    "singular_values",
    "stationary_distribution",
    "supervised_cross_entropy",
    "supervised_gradient",
    "test_error",
    "train_supervised",
    "train_unsupervised",
    "unsupervised_objective",
]
