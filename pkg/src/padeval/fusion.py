"""Score-level fusion: per-detector min-max normalization, weighted sum.

Normalization parameters are fitted on the very scores being fused (one
fit per detector), mapping each detector's observed range onto [0, 1];
the fused score is then a convex combination of the two normalized
scores.  Joining is by sample id, so the two detectors may list samples
in different orders but must cover exactly the same samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    EmptySetError,
    PolarityMismatchError,
    ScoreRecord,
    ScoreSet,
    ValidationError,
    validate_score_set,
)

__all__ = [
    "WeightError",
    "IdMismatchError",
    "MinMaxParams",
    "minmax_fit",
    "minmax_apply",
    "fuse",
]


class WeightError(ValidationError):
    """Fusion weights are negative, non-finite, or do not sum to one."""


class IdMismatchError(ValidationError):
    """The two score sets do not cover the same sample ids."""


@dataclass(frozen=True)
class MinMaxParams:
    """Observed score range; degenerate when the range is empty."""

    lo: float
    hi: float

    @property
    def degenerate(self) -> bool:
        return not (self.hi > self.lo)


def minmax_fit(scores: Sequence[float]) -> MinMaxParams:
    """Range of the given scores.

    Raises:
        EmptySetError: no scores.
        ValidationError: a score is non-finite.
    """
    values = [float(s) for s in scores]
    if not values:
        raise EmptySetError("cannot fit min-max parameters on no scores")
    if not all(math.isfinite(v) for v in values):
        raise ValidationError("scores contain a non-finite value")
    return MinMaxParams(lo=min(values), hi=max(values))


def minmax_apply(params: MinMaxParams, score: float) -> float:
    """Map ``score`` onto [0, 1] under ``params``, clamping out-of-range input.

    Degenerate parameters (``hi == lo``) carry no scale information, so
    every score maps to the neutral value 0.5.
    """
    score = float(score)
    if not math.isfinite(score):
        raise ValidationError(f"score must be finite, got {score!r}")
    if params.degenerate:
        return 0.5
    t = (score - params.lo) / (params.hi - params.lo)
    return min(max(t, 0.0), 1.0)


def fuse(a: ScoreSet, b: ScoreSet, w_a: float = 0.5, w_b: float = 0.5) -> ScoreSet:
    """Weighted sum of the per-set min-max-normalized scores.

    Records are matched by sample id; the output keeps ``a``'s ordering,
    labels, and polarity.  ``w_a + w_b`` must equal one (within 1e-9) with
    both weights non-negative.

    Raises:
        IdMismatchError: ``a`` and ``b`` cover different sample ids.
        PolarityMismatchError: the sets declare different polarities.
        WeightError: weights invalid.
    """
    validate_score_set(a)
    validate_score_set(b)
    if a.polarity is not b.polarity:
        raise PolarityMismatchError(
            f"cannot fuse polarity {a.polarity.value!r} with {b.polarity.value!r}"
        )
    w_a, w_b = float(w_a), float(w_b)
    if not (math.isfinite(w_a) and math.isfinite(w_b)) or w_a < 0.0 or w_b < 0.0:
        raise WeightError(f"weights must be non-negative and finite, got {w_a!r}, {w_b!r}")
    if abs((w_a + w_b) - 1.0) > 1e-9:
        raise WeightError(f"weights must sum to 1, got {w_a!r} + {w_b!r}")
    ids_a = set(a.ids())
    ids_b = set(b.ids())
    if ids_a != ids_b:
        odd = sorted(ids_a.symmetric_difference(ids_b))[0]
        raise IdMismatchError(f"score sets cover different samples (first difference: {odd!r})")
    params_a = minmax_fit(a.scores())
    params_b = minmax_fit(b.scores())
    b_by_id = {r.sample_id: r.score for r in b}
    records = tuple(
        ScoreRecord(
            sample_id=r.sample_id,
            label=r.label,
            score=w_a * minmax_apply(params_a, r.score) + w_b * minmax_apply(params_b, b_by_id[r.sample_id]),
        )
        for r in a
    )
    return ScoreSet(records=records, polarity=a.polarity)
