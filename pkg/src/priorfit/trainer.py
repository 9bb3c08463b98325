"""Gradient-ascent training loops with per-epoch trace recording.

Plain constant-step ascent, full-batch by default.  Window mode steps over
contiguous chunks and drops the coupling terms across chunk seams, which is
the stochastic-gradient variant for this objective.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import diagnostics, objective
from .linear_models import GeneratorParams, OneHotSequence, PredictorParams, init_weights
from .sequence_prior import TransitionModel

TRACE_COLUMNS = (
    "epoch",
    "fitness",
    "regularization",
    "total",
    "test_error",
    "rank1_score",
    "grad_norm",
)


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 30.0
    learning_rate: float = 0.1
    epochs: int = 2000
    window_length: int | str = "full"
    gamma_d: float = 1.0
    gamma_g: float = 1.0
    init_scheme: str = "gaussian"
    init_sigma: float = 0.1
    init_seed: int = 0
    shuffle_seed: int = 0
    eval_every: int = 100

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.window_length != "full" and int(self.window_length) < 1:
            raise ValueError("window_length must be 'full' or a positive integer")
        if self.gamma_d <= 0 or self.gamma_g <= 0:
            raise ValueError("sharpness values must be positive")
        if self.eval_every < 1:
            raise ValueError("eval_every must be positive")


class TraceRow(NamedTuple):
    epoch: int
    fitness: float
    regularization: float
    total: float
    test_error: float
    rank1_score: float
    grad_norm: float


@dataclass
class TrainTrace:
    rows: list[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow) -> None:
        if self.rows and row.epoch <= self.rows[-1].epoch:
            raise ValueError("trace rows must be ordered by epoch")
        self.rows.append(row)

    def column(self, name: str) -> np.ndarray:
        i = TRACE_COLUMNS.index(name)
        return np.array([row[i] for row in self.rows])

    def final(self) -> TraceRow:
        return self.rows[-1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for row in self.rows:
                writer.writerow([row.epoch] + [repr(float(v)) for v in row[1:]])


class TrainingDiverged(RuntimeError):
    """The objective became non-finite; carries the trace up to the last finite epoch."""

    def __init__(self, message: str, trace: TrainTrace):
        super().__init__(message)
        self.trace = trace


def _windows(total: int, window_length: int | str) -> list[tuple[int, int]]:
    if window_length == "full" or int(window_length) >= total:
        return [(0, total)]
    w = int(window_length)
    return [(s, min(s + w, total)) for s in range(0, total, w)]


def _rank1_or_nan(weights: np.ndarray) -> float:
    sv = diagnostics.singular_values(weights)
    if sv[0] == 0.0:
        return float("nan")
    return float(sv[1] / sv[0])


def train_unsupervised(
    config: TrainConfig,
    observations: OneHotSequence,
    prior: TransitionModel,
    eval_pairs: tuple[OneHotSequence, OneHotSequence] | None = None,
) -> tuple[PredictorParams, GeneratorParams, TrainTrace]:
    """Gradient ascent on the combined unsupervised objective.

    Returns the final parameters and a trace recorded at epoch 0, every
    ``eval_every`` epochs, and the final epoch.  Deterministic for fixed
    config; raises TrainingDiverged (with the partial trace) if the weights
    or the objective stop being finite.
    """
    if len(observations) < 2:
        raise ValueError("need at least two observations")
    c, m = prior.num_classes, observations.dimension
    d_seed, g_seed = np.random.SeedSequence(config.init_seed).spawn(2)
    w_d = init_weights((c, m), config.init_scheme, seed=d_seed, sigma=config.init_sigma)
    w_g = init_weights((m, c), config.init_scheme, seed=g_seed, sigma=config.init_sigma)
    windows = _windows(len(observations), config.window_length)
    shuffle_rng = np.random.default_rng(config.shuffle_seed)

    trace = TrainTrace()

    def record(epoch: int) -> None:
        pred = PredictorParams(w_d, config.gamma_d)
        gen = GeneratorParams(w_g, config.gamma_g)
        breakdown = objective.unsupervised_objective(pred, gen, observations, prior, config.lam)
        grad = objective.analytic_gradient(pred, gen, observations, prior, config.lam)
        err = (
            diagnostics.test_error(pred, eval_pairs[0], eval_pairs[1])
            if eval_pairs is not None
            else float("nan")
        )
        row = TraceRow(
            epoch=epoch,
            fitness=breakdown.fitness,
            regularization=breakdown.regularization,
            total=breakdown.total,
            test_error=err,
            rank1_score=_rank1_or_nan(w_d),
            grad_norm=float(
                np.sqrt(np.sum(grad.d_predictor**2) + np.sum(grad.d_generator**2))
            ),
        )
        if not np.isfinite(row.total):
            raise TrainingDiverged(f"objective became non-finite at epoch {epoch}", trace)
        trace.append(row)

    record(0)
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(windows)) if len(windows) > 1 else [0]
        for k in order:
            s, e = windows[k]
            window = OneHotSequence(observations.indices[s:e], m)
            grad = objective.analytic_gradient(
                PredictorParams(w_d, config.gamma_d),
                GeneratorParams(w_g, config.gamma_g),
                window,
                prior,
                config.lam,
                include_initial_term=(s == 0),
            )
            # Steps use the per-position mean gradient so the learning rate is
            # independent of sequence length; recorded values stay raw sums.
            step = config.learning_rate / (e - s)
            w_d = w_d + step * grad.d_predictor
            w_g = w_g + step * grad.d_generator
        if not (np.all(np.isfinite(w_d)) and np.all(np.isfinite(w_g))):
            raise TrainingDiverged(f"weights became non-finite at epoch {epoch}", trace)
        if epoch % config.eval_every == 0 or epoch == config.epochs:
            record(epoch)
    return (
        PredictorParams(w_d, config.gamma_d),
        GeneratorParams(w_g, config.gamma_g),
        trace,
    )


def train_supervised(
    config: TrainConfig,
    inputs: OneHotSequence,
    labels: OneHotSequence,
    eval_pairs: tuple[OneHotSequence, OneHotSequence] | None = None,
) -> tuple[PredictorParams, TrainTrace]:
    """Gradient ascent on the paired-data reference objective.

    Trace rows reuse the shared schema: fitness and total both hold the
    supervised objective and the regularization column is zero.
    """
    if len(inputs) != len(labels):
        raise ValueError("inputs and labels must have the same length")
    c, m = labels.dimension, inputs.dimension
    (d_seed,) = np.random.SeedSequence(config.init_seed).spawn(1)
    w_d = init_weights((c, m), config.init_scheme, seed=d_seed, sigma=config.init_sigma)
    windows = _windows(len(inputs), config.window_length)
    shuffle_rng = np.random.default_rng(config.shuffle_seed)

    trace = TrainTrace()

    def record(epoch: int) -> None:
        pred = PredictorParams(w_d, config.gamma_d)
        value = objective.supervised_cross_entropy(pred, inputs, labels)
        grad = objective.supervised_gradient(pred, inputs, labels)
        err = (
            diagnostics.test_error(pred, eval_pairs[0], eval_pairs[1])
            if eval_pairs is not None
            else float("nan")
        )
        row = TraceRow(
            epoch=epoch,
            fitness=value,
            regularization=0.0,
            total=value,
            test_error=err,
            rank1_score=_rank1_or_nan(w_d),
            grad_norm=float(np.sqrt(np.sum(grad**2))),
        )
        if not np.isfinite(row.total):
            raise TrainingDiverged(f"objective became non-finite at epoch {epoch}", trace)
        trace.append(row)

    record(0)
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(windows)) if len(windows) > 1 else [0]
        for k in order:
            s, e = windows[k]
            grad = objective.supervised_gradient(
                PredictorParams(w_d, config.gamma_d),
                OneHotSequence(inputs.indices[s:e], m),
                OneHotSequence(labels.indices[s:e], c),
            )
            w_d = w_d + (config.learning_rate / (e - s)) * grad
        if not np.all(np.isfinite(w_d)):
            raise TrainingDiverged(f"weights became non-finite at epoch {epoch}", trace)
        if epoch % config.eval_every == 0 or epoch == config.epochs:
            record(epoch)
    return PredictorParams(w_d, config.gamma_d), trace
