"""Landscape probes, rank-1 analysis, the exhaustive permutation oracle, and test error."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .linear_models import OneHotSequence, PredictorParams, prediction_matrix
from .sequence_prior import ConvergenceError, TransitionModel

JACOBI_SWEEP_CAP = 100
JACOBI_OFFDIAG_TOL = 1e-14  # relative to the Frobenius norm of the Gram matrix

ORACLE_MAX_CLASSES = 8


@dataclass(frozen=True)
class LandscapeProbe:
    """Negative-objective values of labeled curves along a 1-D parameter line."""

    ts: np.ndarray
    curves: dict[str, np.ndarray]

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        if ts.size == 0 or np.any(np.diff(ts) <= 0):
            raise ValueError("t grid must be nonempty and strictly increasing")
        for label, values in self.curves.items():
            if np.asarray(values).shape != ts.shape:
                raise ValueError(f"curve {label!r} is not defined at every grid point")
        object.__setattr__(self, "ts", ts)

    def to_csv(self, path) -> None:
        labels = list(self.curves)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + labels)
            for i, t in enumerate(self.ts):
                writer.writerow([repr(float(t))] + [repr(float(self.curves[k][i])) for k in labels])


def landscape_line(
    endpoint_a: np.ndarray,
    endpoint_b: np.ndarray,
    grid: Sequence[float],
    evaluators: Sequence[tuple[str, Callable[[np.ndarray], float]]],
) -> LandscapeProbe:
    """Record the negative of each labeled objective along t*A + (1-t)*B.

    Evaluation at t = 0 and t = 1 uses the endpoint matrices themselves, so the
    endpoint values are exact.
    """
    a = np.asarray(endpoint_a, dtype=float)
    b = np.asarray(endpoint_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"endpoint shapes differ: {a.shape} vs {b.shape}")
    ts = np.asarray(list(grid), dtype=float)
    curves: dict[str, list[float]] = {label: [] for label, _ in evaluators}
    for t in ts:
        if t == 1.0:
            w = a
        elif t == 0.0:
            w = b
        else:
            w = t * a + (1.0 - t) * b
        for label, fn in evaluators:
            curves[label].append(-float(fn(w)))
    return LandscapeProbe(ts=ts, curves={k: np.array(v) for k, v in curves.items()})


def random_line_endpoint(anchor: np.ndarray, scale: float, seed) -> np.ndarray:
    """anchor + scale * G with iid standard Gaussian G; endpoint_b for lines through anchor."""
    anchor = np.asarray(anchor, dtype=float)
    if scale == 0:
        return anchor.copy()
    rng = np.random.default_rng(seed)
    return anchor + scale * rng.standard_normal(anchor.shape)


def singular_values(matrix: np.ndarray) -> np.ndarray:
    """Singular values in descending order via cyclic Jacobi sweeps.

    One-sided (Hestenes) form: column rotations diagonalize the Gram matrix
    implicitly, without ever forming it, so small singular values keep full
    relative accuracy (forming A'A explicitly would square the condition
    number and turn exact rank-1 inputs into sigma_2 ~ sqrt(eps) * sigma_1).
    Small dense matrices only; raises ConvergenceError if some Gram
    off-diagonal is still above tolerance after the sweep cap.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if a.shape[1] > a.shape[0]:
        a = a.T  # rotate the smaller index set; singular values are unchanged
    else:
        a = a.copy()
    n = a.shape[1]

    def max_rel_offdiag(b: np.ndarray) -> float:
        worst = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                denom = np.sqrt(b[:, p] @ b[:, p]) * np.sqrt(b[:, q] @ b[:, q])
                if denom > 0:
                    worst = max(worst, abs(b[:, p] @ b[:, q]) / denom)
        return worst

    for _ in range(JACOBI_SWEEP_CAP):
        if max_rel_offdiag(a) <= JACOBI_OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p] @ a[:, q]
                if apq == 0.0:
                    continue
                diff = a[:, q] @ a[:, q] - a[:, p] @ a[:, p]
                if abs(apq) * 1e15 < abs(diff):
                    t = apq / diff  # tiny rotation angle; avoids overflow in theta
                else:
                    theta = diff / (2.0 * apq)
                    t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = c * a[:, p] - s * a[:, q]
                col_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = col_p, col_q
    if max_rel_offdiag(a) > JACOBI_OFFDIAG_TOL:
        raise ConvergenceError(f"Jacobi iteration did not converge in {JACOBI_SWEEP_CAP} sweeps")
    return np.sort(np.sqrt(np.sum(a**2, axis=0)))[::-1]


def rank1_score(matrix: np.ndarray) -> float:
    """sigma_2 / sigma_1; values near 0 flag an input-independent (trapped) classifier."""
    sv = singular_values(matrix)
    if sv[0] == 0.0:
        raise ValueError("rank1_score is undefined for the zero matrix")
    return float(sv[1] / sv[0])


class OracleResult(NamedTuple):
    best_permutation: tuple[int, ...]
    table: list[tuple[tuple[int, ...], float]]
    margin: float  # best score minus second-best score


def permutation_oracle(observations: OneHotSequence, prior: TransitionModel) -> OracleResult:
    """Score every hard-decision classifier (a bijection observation -> class).

    The score of bijection R is the fitness term of the saturated predictor
    q_t = e_{R(m_t)}: ln pi[R(m_1)] plus the floored log transition for every
    consecutive pair.  Certifies which labeling the prior selects as the
    global optimum, independent of any softmax sharpness.
    """
    c = prior.num_classes
    if observations.dimension != c:
        raise ValueError("observation dimension must equal the number of classes")
    if c > ORACLE_MAX_CLASSES:
        raise ValueError(f"exhaustive oracle supports at most {ORACLE_MAX_CLASSES} classes")
    if len(observations) == 0:
        raise ValueError("observations must be nonempty")
    m = observations.indices
    pair_counts = np.bincount(m[1:] * c + m[:-1], minlength=c * c).reshape(c, c).astype(float)
    log_p = prior.log_matrix
    log_pi = prior.log_initial
    table: list[tuple[tuple[int, ...], float]] = []
    for perm in itertools.permutations(range(c)):
        r = np.array(perm)
        # sum over pairs (a, b): count * ln P[R(a) | R(b)]
        score = float(np.sum(pair_counts * log_p[np.ix_(r, r)]) + log_pi[r[m[0]]])
        table.append((perm, score))
    scores = np.array([s for _, s in table])
    best_idx = int(np.argmax(scores))
    order = np.sort(scores)[::-1]
    margin = float(order[0] - order[1]) if scores.size > 1 else float("inf")
    return OracleResult(best_permutation=table[best_idx][0], table=table, margin=margin)


def oracle_table_to_csv(result: OracleResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["permutation", "score"])
        for perm, score in result.table:
            writer.writerow([",".join(str(i) for i in perm), repr(score)])


def test_error(
    predictor: PredictorParams, observations: OneHotSequence, labels: OneHotSequence
) -> float:
    """Fraction of positions where the argmax prediction misses the true label.

    Argmax ties break toward the lowest class index, so the value is
    deterministic.
    """
    if len(observations) != len(labels):
        raise ValueError("observations and labels must have the same length")
    if len(observations) == 0:
        raise ValueError("cannot evaluate on an empty sequence")
    decisions = np.argmax(prediction_matrix(predictor), axis=0)
    return float(np.mean(decisions[observations.indices] != labels.indices))


def max_prediction_tv(predictor: PredictorParams) -> float:
    """Largest total-variation distance between predictions for any two inputs.

    Near 0 means the classifier ignores its input (the trivial solution).
    """
    q = prediction_matrix(predictor)
    dists = 0.5 * np.sum(np.abs(q[:, :, None] - q[:, None, :]), axis=0)
    return float(dists.max())
