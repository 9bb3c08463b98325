"""Sharpened-softmax linear predictor and generator over one-hot indices.

Inputs and outputs are one-hot, so they are represented by their hot index;
applying a weight matrix to a one-hot vector just selects a column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _softmax_columns(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=0, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=0, keepdims=True)


def _log_softmax_columns(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=0, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=0, keepdims=True))


def _check_weights(weights: np.ndarray, sharpness: float) -> np.ndarray:
    w = np.array(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError(f"weights must be a 2-D matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if not (sharpness > 0):
        raise ValueError("sharpness must be positive")
    return w


@dataclass(frozen=True)
class PredictorParams:
    """Classifier p(class | input index) = softmax(sharpness * column of weights)."""

    weights: np.ndarray  # (num_classes, num_inputs)
    sharpness: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights, self.sharpness))

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def num_inputs(self) -> int:
        return self.weights.shape[1]

    def to_json_dict(self) -> dict:
        return weights_to_json(self.weights, self.sharpness)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PredictorParams":
        w, gamma = weights_from_json(doc)
        return cls(weights=w, sharpness=gamma)


@dataclass(frozen=True)
class GeneratorParams:
    """Reconstruction model p(input index | class) = softmax(sharpness * column of weights)."""

    weights: np.ndarray  # (num_inputs, num_classes)
    sharpness: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights, self.sharpness))

    @property
    def num_inputs(self) -> int:
        return self.weights.shape[0]

    @property
    def num_classes(self) -> int:
        return self.weights.shape[1]

    def to_json_dict(self) -> dict:
        return weights_to_json(self.weights, self.sharpness)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GeneratorParams":
        w, gamma = weights_from_json(doc)
        return cls(weights=w, sharpness=gamma)


@dataclass(frozen=True)
class OneHotSequence:
    """A sequence of one-hot vectors stored as hot indices in [0, dimension)."""

    indices: np.ndarray
    dimension: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if idx.size and (idx.min() < 0 or idx.max() >= self.dimension):
            raise ValueError(f"indices must lie in [0, {self.dimension})")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.size


def predict_dist(params: PredictorParams, input_index: int) -> np.ndarray:
    """Predicted class distribution for one input index."""
    if not 0 <= input_index < params.num_inputs:
        raise IndexError(f"input index {input_index} out of range [0, {params.num_inputs})")
    return _softmax_columns(params.sharpness * params.weights[:, [input_index]])[:, 0]


def prediction_matrix(params: PredictorParams) -> np.ndarray:
    """All predicted distributions at once; column m is predict_dist(params, m)."""
    return _softmax_columns(params.sharpness * params.weights)


def prediction_log_matrix(params: PredictorParams) -> np.ndarray:
    """Elementwise log of prediction_matrix, computed in stable log-sum-exp form."""
    return _log_softmax_columns(params.sharpness * params.weights)


def generate_log_dist(params: GeneratorParams, label_index: int) -> np.ndarray:
    """Log-distribution over input indices that the generator assigns to one class."""
    if not 0 <= label_index < params.num_classes:
        raise IndexError(f"label index {label_index} out of range [0, {params.num_classes})")
    return _log_softmax_columns(params.sharpness * params.weights[:, [label_index]])[:, 0]


def generation_log_matrix(params: GeneratorParams) -> np.ndarray:
    """All generator log-distributions; column j is generate_log_dist(params, j)."""
    return _log_softmax_columns(params.sharpness * params.weights)


def init_weights(
    shape: tuple[int, int],
    scheme: str = "gaussian",
    seed=0,
    sigma: float = 0.1,
    permutation=None,
    scale: float = 1.0,
) -> np.ndarray:
    """Seeded weight initialization.

    scheme "gaussian": iid N(0, sigma^2) entries.
    scheme "zeros": all-zero matrix.
    scheme "permutation": scale * (permutation matrix), i.e. entry
        [permutation[j], j] = scale; builds idealized hard classifiers.
    """
    rows, cols = shape
    if scheme == "zeros":
        return np.zeros((rows, cols))
    if scheme == "gaussian":
        rng = np.random.default_rng(seed)
        return rng.normal(0.0, sigma, size=(rows, cols))
    if scheme == "permutation":
        perm = np.asarray(permutation, dtype=np.int64)
        if perm.shape != (cols,) or sorted(perm.tolist()) != list(range(rows)):
            raise ValueError("permutation must be a bijection matching the shape")
        w = np.zeros((rows, cols))
        w[perm, np.arange(cols)] = scale
        return w
    raise ValueError(f"unknown init scheme {scheme!r}")


def weights_to_json(weights: np.ndarray, sharpness: float) -> dict:
    return {
        "rows": int(weights.shape[0]),
        "cols": int(weights.shape[1]),
        "data": np.asarray(weights, dtype=float).ravel().tolist(),
        "sharpness": float(sharpness),
    }


def weights_from_json(doc: dict) -> tuple[np.ndarray, float]:
    rows, cols = int(doc["rows"]), int(doc["cols"])
    data = np.array(doc["data"], dtype=float)
    if data.size != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {data.size}")
    return data.reshape(rows, cols), float(doc["sharpness"])
