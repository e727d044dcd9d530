"""Threshold-based error rates for PAD and recognition vulnerability.

Decision rule
-------------
A score ``s`` is classified *positive* (bona fide, or match) exactly when
``s >= tau``; ties on the threshold are accepted.  All rates are computed
from integer counts under this rule:

* ``FMR``    fraction of non-mated scores ``>= tau`` (false matches)
* ``FNMR``   fraction of mated scores ``< tau`` (false non-matches)
* ``IAPMR``  fraction of attack-mated scores ``>= tau``
* ``APCER``  fraction of attack-presentation scores ``>= tau``
* ``BPCER``  fraction of bona fide scores ``< tau``

Candidate thresholds
--------------------
Every sweep in this module walks one deterministic grid: the midpoints
between consecutive distinct sorted scores, plus one sentinel below the
minimum (``min - 1``) and one above the maximum (``max + 1``).  This grid
realises every confusion matrix the given scores can produce.  Operations
that constrain a single rate (``threshold_at_fmr``, ``bpcer_at_apcer``)
build the grid from the scores of the constrained class only; both-class
sweeps (``d_eer``, ``det_curve``) pool the two score lists first.

Rates and their comparisons are carried out in exact integer/rational
arithmetic over counts and converted to float only at the boundary, so
results are reproducible bit-for-bit across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .core import (
    EmptySetError,
    Polarity,
    PolarityMismatchError,
    PresentationLabel,
    ScoreSet,
    TrialLabel,
    ValidationError,
    validate_score_set,
)

__all__ = [
    "Threshold",
    "InvalidTargetError",
    "DetAxes",
    "DetCurve",
    "PadReport",
    "VulnReport",
    "candidate_thresholds",
    "fmr",
    "fnmr",
    "iapmr",
    "apcer",
    "bpcer",
    "threshold_at_fmr",
    "d_eer",
    "bpcer_at_apcer",
    "det_curve",
    "evaluate_pad",
    "evaluate_vuln",
]

#: Decision thresholds are plain finite floats.
Threshold = float


class InvalidTargetError(ValidationError):
    """A target rate lies outside the open interval (0, 1)."""


class DetAxes(Enum):
    """Which rate pair a DET curve plots: PAD rates or recognition rates."""

    APCER_BPCER = "apcer_bpcer"
    FMR_FNMR = "fmr_fnmr"


@dataclass(eq=False)
class DetCurve:
    """A full detection-error trade-off sweep.

    ``x_rates[i]`` (APCER or FMR) is non-increasing and ``y_rates[i]``
    (BPCER or FNMR) non-decreasing along the strictly increasing
    ``thresholds``.
    """

    thresholds: np.ndarray
    x_rates: np.ndarray
    y_rates: np.ndarray
    axes: DetAxes

    def __post_init__(self) -> None:
        for name in ("thresholds", "x_rates", "y_rates"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            setattr(self, name, arr)

    def __len__(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class PadReport:
    """PAD evaluation summary: D-EER plus the two fixed operating points."""

    d_eer: float
    eer_threshold: Threshold
    bpcer10: float  # BPCER at the lowest sweep point with APCER <= 10%
    bpcer20: float  # BPCER at the lowest sweep point with APCER <= 5%
    bpcer10_threshold: Threshold
    bpcer20_threshold: Threshold
    n_bonafide: int
    n_attack: int


@dataclass(frozen=True)
class VulnReport:
    """Vulnerability summary: per-target decision thresholds and IAPMR."""

    thresholds: Mapping[float, Threshold]
    iapmr: Mapping[float, float]
    n_mated: int
    n_nonmated: int
    n_attack: int


# ---------------------------------------------------------------------------
# input handling


def _as_scores(scores: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{what} must be a flat sequence of scores")
    if arr.size == 0:
        raise EmptySetError(f"{what} is empty")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{what} contains a non-finite score")
    return arr


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not np.isfinite(tau):
        raise ValidationError(f"threshold must be finite, got {tau!r}")
    return tau


def _check_target(target: float) -> float:
    target = float(target)
    if not (0.0 < target < 1.0) or not np.isfinite(target):
        raise InvalidTargetError(f"target rate must lie in (0, 1), got {target!r}")
    return target


def _count_ge(sorted_scores: np.ndarray, taus: np.ndarray | float) -> np.ndarray | int:
    """Number of scores >= tau, exact, for scalar or vector tau."""
    found = np.searchsorted(sorted_scores, taus, side="left")
    return sorted_scores.size - found


def _count_lt(sorted_scores: np.ndarray, taus: np.ndarray | float) -> np.ndarray | int:
    return np.searchsorted(sorted_scores, taus, side="left")


def _rate(count: int, n: int) -> float:
    # int / int division is correctly rounded, i.e. float(Fraction(count, n))
    return int(count) / int(n)


def _floor_times(target: float, n: int) -> int:
    """floor(target * n) computed exactly from the binary value of target."""
    as_frac = Fraction(target)
    return (as_frac.numerator * n) // as_frac.denominator


# ---------------------------------------------------------------------------
# point metrics


def fmr(nonmated_scores: Sequence[float], tau: Threshold) -> float:
    """False match rate: fraction of non-mated scores at or above ``tau``."""
    arr = _as_scores(nonmated_scores, "nonmated_scores")
    tau = _check_tau(tau)
    return _rate(_count_ge(np.sort(arr), tau), arr.size)


def fnmr(mated_scores: Sequence[float], tau: Threshold) -> float:
    """False non-match rate: fraction of mated scores below ``tau``."""
    arr = _as_scores(mated_scores, "mated_scores")
    tau = _check_tau(tau)
    return _rate(_count_lt(np.sort(arr), tau), arr.size)


def iapmr(attack_scores: Sequence[float], tau: Threshold) -> float:
    """Impostor attack presentation match rate at ``tau``.

    The fraction of attack-versus-target comparison scores that reach the
    decision threshold, i.e. attacks accepted as matches.
    """
    arr = _as_scores(attack_scores, "attack_scores")
    tau = _check_tau(tau)
    return _rate(_count_ge(np.sort(arr), tau), arr.size)


def apcer(attack_scores: Sequence[float], tau: Threshold) -> float:
    """Attack presentation classification error rate at ``tau``."""
    arr = _as_scores(attack_scores, "attack_scores")
    tau = _check_tau(tau)
    return _rate(_count_ge(np.sort(arr), tau), arr.size)


def bpcer(bonafide_scores: Sequence[float], tau: Threshold) -> float:
    """Bona fide presentation classification error rate at ``tau``."""
    arr = _as_scores(bonafide_scores, "bonafide_scores")
    tau = _check_tau(tau)
    return _rate(_count_lt(np.sort(arr), tau), arr.size)


# ---------------------------------------------------------------------------
# threshold sweeps


def candidate_thresholds(scores: Sequence[float]) -> np.ndarray:
    """Deterministic sweep grid for the given scores.

    Midpoints between consecutive distinct sorted values, with one sentinel
    below the minimum and one above the maximum, deduplicated.  Every
    achievable accept/reject split of ``scores`` is realised by exactly one
    grid point.
    """
    distinct = np.unique(_as_scores(scores, "scores"))
    mids = distinct[:-1] + (distinct[1:] - distinct[:-1]) / 2.0
    grid = np.concatenate(([distinct[0] - 1.0], mids, [distinct[-1] + 1.0]))
    return np.unique(grid)


def threshold_at_fmr(nonmated_scores: Sequence[float], target: float) -> Threshold:
    """Smallest sweep threshold whose FMR does not exceed ``target``.

    The sweep grid is built from the non-mated scores alone.  Because FMR
    is non-increasing in the threshold, the result is the most permissive
    operating point satisfying the constraint.
    """
    arr = np.sort(_as_scores(nonmated_scores, "nonmated_scores"))
    target = _check_target(target)
    grid = candidate_thresholds(arr)
    counts = np.asarray(_count_ge(arr, grid), dtype=np.int64)
    allowed = _floor_times(target, arr.size)  # count <= allowed  <=>  rate <= target
    feasible = np.flatnonzero(counts <= allowed)
    # the above-max sentinel has count 0, so a feasible point always exists
    return float(grid[feasible[0]])


def d_eer(bonafide_scores: Sequence[float], attack_scores: Sequence[float]) -> tuple[float, Threshold]:
    """Detection equal error rate over the pooled sweep grid.

    Picks the grid threshold minimising ``|APCER - BPCER|`` (ties resolved
    toward the smallest threshold; comparisons done on exact integer
    cross-products) and returns ``((APCER + BPCER) / 2, threshold)``.
    """
    bona = np.sort(_as_scores(bonafide_scores, "bonafide_scores"))
    att = np.sort(_as_scores(attack_scores, "attack_scores"))
    grid = candidate_thresholds(np.concatenate((bona, att)))
    n_b, n_a = bona.size, att.size
    c_apcer = np.asarray(_count_ge(att, grid), dtype=np.int64)
    c_bpcer = np.asarray(_count_lt(bona, grid), dtype=np.int64)
    # |APCER - BPCER| compared on the common denominator n_a * n_b
    gap = np.abs(c_apcer * n_b - c_bpcer * n_a)
    best = int(np.argmin(gap))
    eer = (Fraction(int(c_apcer[best]), n_a) + Fraction(int(c_bpcer[best]), n_b)) / 2
    return float(eer), float(grid[best])


def bpcer_at_apcer(
    bonafide_scores: Sequence[float],
    attack_scores: Sequence[float],
    target_apcer: float,
) -> tuple[float, Threshold]:
    """BPCER at the smallest sweep threshold with APCER at most ``target_apcer``.

    The sweep grid is built from the attack scores (the constrained class);
    BPCER is then evaluated at the selected threshold.
    """
    bona = np.sort(_as_scores(bonafide_scores, "bonafide_scores"))
    att = np.sort(_as_scores(attack_scores, "attack_scores"))
    target_apcer = _check_target(target_apcer)
    grid = candidate_thresholds(att)
    counts = np.asarray(_count_ge(att, grid), dtype=np.int64)
    allowed = _floor_times(target_apcer, att.size)
    feasible = np.flatnonzero(counts <= allowed)
    tau = float(grid[feasible[0]])
    return _rate(_count_lt(bona, tau), bona.size), tau


def det_curve(
    positive_scores: Sequence[float],
    negative_scores: Sequence[float],
    axes: DetAxes,
) -> DetCurve:
    """Full error trade-off sweep over the pooled candidate grid.

    ``positive_scores`` belong to the class that should be accepted (bona
    fide presentations, or mated trials); ``negative_scores`` to the class
    that should be rejected (attacks, or non-mated trials).  ``x_rates``
    holds the negative-class acceptance rate (APCER/FMR) and ``y_rates``
    the positive-class rejection rate (BPCER/FNMR) at each threshold.
    """
    if not isinstance(axes, DetAxes):
        raise ValidationError(f"axes must be a DetAxes, got {axes!r}")
    pos = np.sort(_as_scores(positive_scores, "positive_scores"))
    neg = np.sort(_as_scores(negative_scores, "negative_scores"))
    grid = candidate_thresholds(np.concatenate((pos, neg)))
    x = np.asarray(_count_ge(neg, grid), dtype=np.int64) / neg.size
    y = np.asarray(_count_lt(pos, grid), dtype=np.int64) / pos.size
    return DetCurve(thresholds=grid, x_rates=x, y_rates=y, axes=axes)


# ---------------------------------------------------------------------------
# set-level evaluations


def _checked_scores(score_set: ScoreSet, expected_label, expected_polarity: Polarity, role: str) -> list[float]:
    validate_score_set(score_set)
    if score_set.polarity is not expected_polarity:
        raise PolarityMismatchError(
            f"{role} scores must declare polarity {expected_polarity.value!r}, "
            f"got {score_set.polarity.value!r}"
        )
    off_label = [r.sample_id for r in score_set if r.label is not expected_label]
    if off_label:
        raise ValidationError(
            f"{role} set must contain only {expected_label.value!r} records; "
            f"found other labels (first: {off_label[0]!r})"
        )
    return score_set.scores()


def evaluate_pad(bonafide: ScoreSet, attack: ScoreSet) -> PadReport:
    """PAD evaluation of one detector: D-EER, BPCER10, BPCER20.

    Both sets must declare ``HIGHER_IS_BONA_FIDE`` polarity and carry only
    their own presentation label, which guards against swapped inputs.
    """
    bona_scores = _checked_scores(
        bonafide, PresentationLabel.BONA_FIDE, Polarity.HIGHER_IS_BONA_FIDE, "bonafide"
    )
    att_scores = _checked_scores(
        attack, PresentationLabel.ATTACK, Polarity.HIGHER_IS_BONA_FIDE, "attack"
    )
    eer, eer_tau = d_eer(bona_scores, att_scores)
    b10, tau10 = bpcer_at_apcer(bona_scores, att_scores, 0.10)
    b20, tau20 = bpcer_at_apcer(bona_scores, att_scores, 0.05)
    return PadReport(
        d_eer=eer,
        eer_threshold=eer_tau,
        bpcer10=b10,
        bpcer20=b20,
        bpcer10_threshold=tau10,
        bpcer20_threshold=tau20,
        n_bonafide=len(bona_scores),
        n_attack=len(att_scores),
    )


def evaluate_vuln(
    mated: ScoreSet,
    nonmated: ScoreSet,
    attack: ScoreSet,
    fmr_targets: Sequence[float],
) -> VulnReport:
    """Recognition-vulnerability evaluation at fixed-FMR operating points.

    For each target the decision threshold is set on the non-mated scores
    via :func:`threshold_at_fmr`, then IAPMR is measured on the
    attack-mated scores at that threshold.  All three sets must declare
    ``HIGHER_IS_MATCH`` polarity.
    """
    mated_scores = _checked_scores(mated, TrialLabel.MATED, Polarity.HIGHER_IS_MATCH, "mated")
    nonmated_scores = _checked_scores(
        nonmated, TrialLabel.NONMATED, Polarity.HIGHER_IS_MATCH, "nonmated"
    )
    attack_scores = _checked_scores(
        attack, TrialLabel.ATTACK_MATED, Polarity.HIGHER_IS_MATCH, "attack"
    )
    targets = [_check_target(t) for t in fmr_targets]
    if not targets:
        raise ValidationError("at least one FMR target is required")
    thresholds: dict[float, Threshold] = {}
    rates: dict[float, float] = {}
    for t in targets:
        tau = threshold_at_fmr(nonmated_scores, t)
        thresholds[t] = tau
        rates[t] = iapmr(attack_scores, tau)
    return VulnReport(
        thresholds=thresholds,
        iapmr=rates,
        n_mated=len(mated_scores),
        n_nonmated=len(nonmated_scores),
        n_attack=len(attack_scores),
    )
