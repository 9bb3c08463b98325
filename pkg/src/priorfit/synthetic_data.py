"""The benchmark generator: a Markov label sequence observed through a fixed permutation.

Labels y_t are sampled from the prior; observations are x_t = sigma(y_t) for a
hidden permutation sigma drawn once per dataset.  The learner-facing view
never includes the paired labels, only the observations plus an independently
sampled unpaired label sequence for prior estimation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linear_models import OneHotSequence
from .sequence_prior import TransitionModel, sample_chain

DEFAULT_LENGTH = 10_000
DEFAULT_TRAIN_FRACTION = 0.8
DEFAULT_UNPAIRED_LENGTH = 10_000


def random_permutation(size: int, seed) -> np.ndarray:
    """Uniformly random bijection on [0, size), deterministic per seed."""
    if size < 1:
        raise ValueError("size must be >= 1")
    return np.random.default_rng(seed).permutation(size)


@dataclass(frozen=True)
class SyntheticDataset:
    """Paired labels/observations with the hidden permutation kept for evaluation."""

    labels: OneHotSequence
    observations: OneHotSequence
    permutation: np.ndarray  # observation index = permutation[label index]
    split: int  # first ``split`` positions are the training portion
    unpaired_labels: OneHotSequence  # independent sample for prior estimation

    def __post_init__(self):
        perm = np.asarray(self.permutation, dtype=np.int64)
        c = self.labels.dimension
        if sorted(perm.tolist()) != list(range(c)):
            raise ValueError("permutation must be a bijection on the label classes")
        if len(self.labels) != len(self.observations):
            raise ValueError("labels and observations must have equal length")
        if not np.array_equal(perm[self.labels.indices], self.observations.indices):
            raise ValueError("observations are not the permuted labels")
        if not 0 <= self.split <= len(self.labels):
            raise ValueError("split out of range")
        object.__setattr__(self, "permutation", perm)

    @property
    def inverse_permutation(self) -> np.ndarray:
        """Maps observation index back to the true class: the ground-truth classifier."""
        return np.argsort(self.permutation)

    def learner_view(self) -> tuple[OneHotSequence, OneHotSequence]:
        """(training observations, unpaired label corpus) — no paired labels."""
        train = OneHotSequence(
            self.observations.indices[: self.split], self.observations.dimension
        )
        return train, self.unpaired_labels

    def eval_view(self) -> tuple[OneHotSequence, OneHotSequence]:
        """(held-out observations, their true labels) for test-error computation."""
        obs = OneHotSequence(self.observations.indices[self.split :], self.observations.dimension)
        lab = OneHotSequence(self.labels.indices[self.split :], self.labels.dimension)
        return obs, lab

    def to_json_dict(self) -> dict:
        return {
            "labels": self.labels.indices.tolist(),
            "observations": self.observations.indices.tolist(),
            "permutation": self.permutation.tolist(),
            "split": int(self.split),
        }

    @classmethod
    def from_json_dict(cls, doc: dict, unpaired_labels: OneHotSequence | None = None):
        perm = np.array(doc["permutation"], dtype=np.int64)
        c = perm.size
        labels = OneHotSequence(np.array(doc["labels"], dtype=np.int64), c)
        if unpaired_labels is None:
            unpaired_labels = OneHotSequence(np.empty(0, dtype=np.int64), c)
        return cls(
            labels=labels,
            observations=OneHotSequence(np.array(doc["observations"], dtype=np.int64), c),
            permutation=perm,
            split=int(doc["split"]),
            unpaired_labels=unpaired_labels,
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SyntheticDataset":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def make_dataset(
    prior: TransitionModel,
    length: int = DEFAULT_LENGTH,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    seed=0,
    unpaired_length: int = DEFAULT_UNPAIRED_LENGTH,
    permutation: np.ndarray | None = None,
) -> SyntheticDataset:
    """Sample a benchmark dataset; the permutation and the unpaired corpus use
    sub-seeds derived from ``seed`` so one integer reproduces everything.

    ``permutation`` overrides the random draw (test hook; identity gives
    observations equal to labels).
    """
    if length < 2:
        raise ValueError("length must be >= 2")
    if not 0 < train_fraction <= 1:
        raise ValueError("train_fraction must lie in (0, 1]")
    label_ss, perm_ss, unpaired_ss = np.random.SeedSequence(seed).spawn(3)
    labels = sample_chain(prior, length, label_ss)
    if permutation is None:
        permutation = random_permutation(prior.num_classes, perm_ss)
    unpaired = sample_chain(prior, unpaired_length, unpaired_ss)
    return SyntheticDataset(
        labels=OneHotSequence(labels, prior.num_classes),
        observations=OneHotSequence(
            np.asarray(permutation, dtype=np.int64)[labels], prior.num_classes
        ),
        permutation=permutation,
        split=int(np.floor(train_fraction * length)),
        unpaired_labels=OneHotSequence(unpaired, prior.num_classes),
    )
