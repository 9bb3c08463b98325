"""The unsupervised training objective and its analytic gradients.

The objective has two parts, both expected log-probabilities under the
predictor's output distributions and therefore nonpositive:

  fitness        q_1' ln(pi) + sum_t q_t' ln(P) q_{t-1}
  regularization sum_t sum_j q_t(j) ln p(x_t | class j, generator)

with q_t the predicted class distribution at input x_t.  Because q_t depends
on x_t only through its hot index m_t, every sum over t collapses to counts
over (m_t, m_{t-1}) pairs.  That form is exact, O(C^2) per evaluation after
one O(T) counting pass, and keeps rounding error independent of T (the
convexity diagnostics rely on this).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linear_models import (
    GeneratorParams,
    OneHotSequence,
    PredictorParams,
    generation_log_matrix,
    prediction_log_matrix,
    prediction_matrix,
)
from .sequence_prior import TransitionModel


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Value of the combined cost: total = fitness + lam * regularization."""

    fitness: float
    regularization: float
    lam: float
    total: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if abs(self.total - (self.fitness + self.lam * self.regularization)) > 1e-12 * max(
            1.0, abs(self.total)
        ):
            raise ValueError("total is inconsistent with fitness + lam * regularization")

    @classmethod
    def from_terms(cls, fitness: float, regularization: float, lam: float) -> "ObjectiveBreakdown":
        return cls(
            fitness=float(fitness),
            regularization=float(regularization),
            lam=float(lam),
            total=float(fitness + lam * regularization),
        )


@dataclass(frozen=True)
class GradientPair:
    """Ascent gradients of the total objective for both weight matrices."""

    d_predictor: np.ndarray  # (num_classes, num_inputs)
    d_generator: np.ndarray  # (num_inputs, num_classes)


def _check_dims(predictor: PredictorParams, inputs: OneHotSequence, prior: TransitionModel | None):
    if len(inputs) == 0:
        raise ValueError("input sequence must be nonempty")
    if inputs.dimension != predictor.num_inputs:
        raise ValueError(
            f"predictor expects {predictor.num_inputs} input symbols, "
            f"sequence has dimension {inputs.dimension}"
        )
    if prior is not None and prior.num_classes != predictor.num_classes:
        raise ValueError(
            f"predictor has {predictor.num_classes} classes, prior has {prior.num_classes}"
        )


def _pair_counts(indices: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-symbol counts and N[a, b] = #{t >= 1 : m_t = a and m_{t-1} = b}."""
    cnt = np.bincount(indices, minlength=dim).astype(float)
    if indices.size > 1:
        pairs = np.bincount(indices[1:] * dim + indices[:-1], minlength=dim * dim)
        n = pairs.reshape(dim, dim).astype(float)
    else:
        n = np.zeros((dim, dim))
    return cnt, n


def fitness_term(
    predictor: PredictorParams, inputs: OneHotSequence, prior: TransitionModel
) -> float:
    """Expected log-probability of the predicted output sequence under the prior.

    Exact closed form of the expectation: predictions at different positions
    are independent given the inputs, so each ln p(y_t | y_{t-1}) term reduces
    to the bilinear form q_t' ln(P) q_{t-1}, and the first position contributes
    q_1' ln(pi).
    """
    _check_dims(predictor, inputs, prior)
    q = prediction_matrix(predictor)
    cnt, n = _pair_counts(inputs.indices, inputs.dimension)
    bilinear = q.T @ prior.log_matrix @ q  # [a, b] = q_a' ln(P) q_b
    return float(q[:, inputs.indices[0]] @ prior.log_initial + np.sum(n * bilinear))


def regularization_term(
    predictor: PredictorParams, generator: GeneratorParams, inputs: OneHotSequence
) -> float:
    """Expected log-probability that the generator reconstructs each input.

    sum_t sum_j q_t(j) * ln p(x_t | class j); ties predictions to inputs, so
    input-independent predictors score poorly once the generator is trained.
    """
    _check_dims(predictor, inputs, None)
    if generator.num_inputs != inputs.dimension or generator.num_classes != predictor.num_classes:
        raise ValueError("generator shape does not match predictor/input dimensions")
    q = prediction_matrix(predictor)  # (C, M)
    g = generation_log_matrix(generator)  # (M, C)
    cnt, _ = _pair_counts(inputs.indices, inputs.dimension)
    per_symbol = np.einsum("jm,mj->m", q, g)
    return float(cnt @ per_symbol)


def unsupervised_objective(
    predictor: PredictorParams,
    generator: GeneratorParams,
    inputs: OneHotSequence,
    prior: TransitionModel,
    lam: float,
) -> ObjectiveBreakdown:
    """Combined cost: fitness plus lam times the generative regularizer."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    return ObjectiveBreakdown.from_terms(
        fitness=fitness_term(predictor, inputs, prior),
        regularization=regularization_term(predictor, generator, inputs),
        lam=lam,
    )


def supervised_cross_entropy(
    predictor: PredictorParams, inputs: OneHotSequence, labels: OneHotSequence
) -> float:
    """Paired-data reference objective: sum_t ln q_t(y_t), to be maximized."""
    _check_dims(predictor, inputs, None)
    if len(labels) != len(inputs):
        raise ValueError("inputs and labels must have the same length")
    if labels.dimension != predictor.num_classes:
        raise ValueError("label dimension does not match predictor classes")
    log_q = prediction_log_matrix(predictor)
    c, m = log_q.shape
    joint = np.bincount(labels.indices * m + inputs.indices, minlength=c * m)
    return float(np.sum(joint.reshape(c, m) * log_q))


def supervised_gradient(
    predictor: PredictorParams, inputs: OneHotSequence, labels: OneHotSequence
) -> np.ndarray:
    """Ascent gradient of the supervised objective with respect to the weights."""
    _check_dims(predictor, inputs, None)
    if len(labels) != len(inputs):
        raise ValueError("inputs and labels must have the same length")
    q = prediction_matrix(predictor)
    c, m = q.shape
    joint = np.bincount(labels.indices * m + inputs.indices, minlength=c * m)
    joint = joint.reshape(c, m).astype(float)
    cnt = joint.sum(axis=0)
    return predictor.sharpness * (joint - q * cnt)


def analytic_gradient(
    predictor: PredictorParams,
    generator: GeneratorParams,
    inputs: OneHotSequence,
    prior: TransitionModel,
    lam: float,
    include_initial_term: bool = True,
) -> GradientPair:
    """Ascent gradients of the total objective for both weight matrices.

    ``include_initial_term=False`` drops the q_1' ln(pi) contribution; windowed
    training uses it for every window that does not start the sequence.
    """
    _check_dims(predictor, inputs, prior)
    if generator.num_inputs != inputs.dimension or generator.num_classes != predictor.num_classes:
        raise ValueError("generator shape does not match predictor/input dimensions")
    if lam < 0:
        raise ValueError("lam must be nonnegative")

    q = prediction_matrix(predictor)  # (C, M)
    log_p = prior.log_matrix  # (C, C)
    g = generation_log_matrix(generator)  # (M, C)
    cnt, n = _pair_counts(inputs.indices, inputs.dimension)

    # a[:, m] accumulates d(total)/d(q_m) summed over the positions where
    # input symbol m occurs.
    a = log_p @ (q @ n.T) + log_p.T @ (q @ n) + lam * (g.T * cnt[None, :])
    if include_initial_term:
        a[:, inputs.indices[0]] += prior.log_initial

    # Chain rule through the softmax: J_m = diag(q_m) - q_m q_m'.
    d_pred = predictor.sharpness * (q * a - q * np.sum(q * a, axis=0, keepdims=True))

    if lam == 0:
        d_gen = np.zeros_like(generator.weights)
    else:
        r = np.exp(g)  # (M, C) reconstruction distributions
        weighted = (q * cnt[None, :]).T  # (M, C): [m, j] = cnt[m] q_m(j)
        mass = q @ cnt  # (C,): total predicted mass per class
        d_gen = lam * generator.sharpness * (weighted - r * mass[None, :])
    return GradientPair(d_predictor=d_pred, d_generator=d_gen)
