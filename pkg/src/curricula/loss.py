"""Error matrices and the four guiding functions.

All losses take an :class:`ErrorSummary` whose columns are already arranged in
curriculum order (column 0 is the easiest target) and return a value in
``[0, 1]`` that is zero exactly when the error matrix is all zero.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .bitdata import BitMatrix

LOSS_NAMES = ("l1", "lw", "llh", "lgh")


class Curriculum(tuple):
    """Permutation of target indices, easiest first."""

    def __new__(cls, order):
        order = tuple(int(x) for x in order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"{order} is not a permutation of 0..{len(order) - 1}")
        return super().__new__(cls, order)

    @classmethod
    def identity(cls, m: int) -> "Curriculum":
        return cls(range(m))


@dataclass(frozen=True)
class ErrorSummary:
    """Error matrix in curriculum order plus per-target error counts."""

    error_matrix: BitMatrix
    error_counts: np.ndarray

    @property
    def n_examples(self) -> int:
        return self.error_matrix.rows

    @property
    def n_targets(self) -> int:
        return self.error_matrix.cols

    @property
    def per_target_error(self) -> np.ndarray:
        """Mean error of each target (the row means δ)."""
        return self.error_counts / self.n_examples


def error_summary(targets: BitMatrix, predictions: BitMatrix, curriculum=None) -> ErrorSummary:
    if targets.shape != predictions.shape:
        raise ValueError(f"targets {targets.shape} and predictions {predictions.shape} differ in shape")
    if curriculum is None:
        curriculum = Curriculum.identity(targets.cols)
    if len(curriculum) != targets.cols:
        raise ValueError(f"curriculum has {len(curriculum)} entries for {targets.cols} targets")
    err = targets ^ predictions
    if tuple(curriculum) != tuple(range(targets.cols)):
        err = err.take_cols(list(curriculum))
    return ErrorSummary(err, err.column_popcounts())


def error_summary_from_array(errors) -> ErrorSummary:
    """Summary of a raw 0/1 error matrix taken to be in curriculum order already."""
    em = BitMatrix.from_array(np.atleast_2d(np.asarray(errors, dtype=np.uint8)))
    return ErrorSummary(em, em.column_popcounts())


def _check(es: ErrorSummary):
    if es.n_examples < 1:
        raise ValueError("loss of an empty example set is undefined")
    if es.n_targets < 1:
        raise ValueError("loss over zero targets is undefined")


def loss_l1(es: ErrorSummary) -> float:
    _check(es)
    return int(es.error_counts.sum()) / (es.n_examples * es.n_targets)


def loss_lw(es: ErrorSummary) -> float:
    """Linearly weighted mean: target ``k`` (1-based) weighs ``m - k + 1``.

    Normalised by the total weight so the all-one matrix scores 1.
    """
    _check(es)
    m, n = es.n_targets, es.n_examples
    weights = np.arange(m, 0, -1, dtype=np.int64)
    return int(weights @ es.error_counts) / (n * m * (m + 1) // 2)


def loss_llh(es: ErrorSummary) -> float:
    """Per-example hierarchy: once an example errs on a target it counts as wrong on all later ones."""
    _check(es)
    e = es.error_matrix.to_array()
    a = np.logical_or.accumulate(e, axis=1)
    return int(a.sum()) / (es.n_examples * es.n_targets)


def loss_lgh(es: ErrorSummary) -> float:
    """Across-example hierarchy over the per-target mean errors.

    A target contributes its mean error only while every earlier target is
    error-free over all examples; afterwards each target contributes 1.
    """
    _check(es)
    n, m = es.n_examples, es.n_targets
    # sum of b_k scaled by n, kept integral so the zero tests are exact
    total = 0
    broken = False
    for count in es.error_counts.tolist():
        if broken:
            total += n
        else:
            total += count
            broken = count > 0
    return total / (n * m)


LOSSES = {
    "l1": loss_l1,
    "lw": loss_lw,
    "llh": loss_llh,
    "lgh": loss_lgh,
}


def get_loss(name: str):
    try:
        return LOSSES[name]
    except KeyError:
        raise ValueError(f"unknown loss {name!r}; choose from {', '.join(LOSS_NAMES)}") from None
