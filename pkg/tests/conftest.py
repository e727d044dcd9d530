from __future__ import annotations

from hypothesis import HealthCheck, settings

from padeval import Polarity, PresentationLabel, ScoreRecord, ScoreSet

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def make_score_set(
    scores,
    label=PresentationLabel.BONA_FIDE,
    polarity=Polarity.HIGHER_IS_BONA_FIDE,
    prefix="s",
):
    """ScoreSet with generated ids and one label for every record."""
    records = tuple(
        ScoreRecord(sample_id=f"{prefix}{k:05d}", label=label, score=float(s))
        for k, s in enumerate(scores)
    )
    return ScoreSet(records=records, polarity=polarity)
