"""Conversion of error annotations into penalty scores.

Accuracy and fluency spans are counted per whitespace token (punctuation
stays attached to its token), style spans count once per span. A major
error unit costs 5 points, a minor one costs 1; a dimension score is the
weighted sum of its error units and the total is the sum of the three
dimension scores.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from statistics import mean, median
from typing import Mapping, Optional, Sequence

from .taxonomy import (
    SEVERITY_WEIGHTS,
    Dimension,
    ErrorCounts,
    MqmScore,
    Severity,
    UnitAnnotation,
)

__all__ = ["count_errors", "score_unit", "score_dataset", "ScoreReport", "span_units"]


def span_units(span_text: str, dimension: Dimension) -> int:
    """Error units contributed by one span.

    Whitespace tokens for accuracy/fluency, exactly 1 for style. Tokens
    are whatever ``str.split`` yields, so punctuation-only tokens count.
    """
    if dimension is Dimension.STYLE:
        return 1
    return len(span_text.split())


def count_errors(ann: UnitAnnotation, dimension: Dimension) -> ErrorCounts:
    """Tally major/minor error units for one dimension of one unit."""
    major = 0
    minor = 0
    for error in ann.for_dimension(dimension):
        units = span_units(error.span_text, dimension)
        if error.severity is Severity.MAJOR:
            major += units
        else:
            minor += units
    return ErrorCounts(major_units=major, minor_units=minor)


def score_unit(
    ann: UnitAnnotation,
    weights: Optional[Mapping[Severity, int]] = None,
) -> MqmScore:
    """Weighted penalty score per dimension plus the implied total.

    ``weights`` defaults to major=5, minor=1; other weightings are
    supported but fall outside the published scoring scheme.
    """
    weights = SEVERITY_WEIGHTS if weights is None else weights
    per_dim = {}
    for dimension in Dimension:
        counts = count_errors(ann, dimension)
        per_dim[dimension] = (
            weights[Severity.MAJOR] * counts.major_units
            + weights[Severity.MINOR] * counts.minor_units
        )
    return MqmScore(
        accuracy=per_dim[Dimension.ACCURACY],
        fluency=per_dim[Dimension.FLUENCY],
        style=per_dim[Dimension.STYLE],
    )


@dataclass(frozen=True)
class ScoreReport:
    """Per-unit scores plus dataset-level aggregates."""

    unit_ids: tuple[str, ...]
    scores: tuple[MqmScore, ...]
    means: dict[str, float] = field(default_factory=dict)
    medians: dict[str, float] = field(default_factory=dict)
    histograms: dict[str, dict[int, int]] = field(default_factory=dict)
    frequent_error_types: tuple[tuple[str, str, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "units": [
                {"unit_id": uid, **score.to_dict()}
                for uid, score in zip(self.unit_ids, self.scores)
            ],
            "means": self.means,
            "medians": self.medians,
            "histograms": {
                key: {str(score): count for score, count in hist.items()}
                for key, hist in self.histograms.items()
            },
            "frequent_error_types": [
                {"subtype": subtype, "dimension": dimension, "count": count}
                for subtype, dimension, count in self.frequent_error_types
            ],
        }


_KEYS = ("accuracy", "fluency", "style", "total")


def _components(score: MqmScore) -> dict[str, int]:
    return {
        "accuracy": score.accuracy,
        "fluency": score.fluency,
        "style": score.style,
        "total": score.total,
    }


def score_dataset(
    anns: Sequence[UnitAnnotation],
    weights: Optional[Mapping[Severity, int]] = None,
    top_k: int = 5,
) -> ScoreReport:
    """Score every unit and aggregate distribution statistics.

    Output is deterministic: per-unit scores follow input order and the
    frequency table breaks count ties by subtype/dimension name.
    """
    scores = [score_unit(ann, weights) for ann in anns]
    means: dict[str, float] = {}
    medians: dict[str, float] = {}
    histograms: dict[str, dict[int, int]] = {}
    for key in _KEYS:
        values = [_components(s)[key] for s in scores]
        means[key] = mean(values) if values else 0.0
        medians[key] = float(median(values)) if values else 0.0
        histograms[key] = dict(sorted(Counter(values).items()))

    type_counts: Counter[tuple[str, str]] = Counter()
    for ann in anns:
        for error in ann.errors:
            type_counts[(error.subtype.label, error.dimension.value)] += 1
    ranked = sorted(type_counts.items(), key=lambda item: (-item[1], item[0]))
    frequent = tuple(
        (subtype, dimension, count) for (subtype, dimension), count in ranked[:top_k]
    )

    return ScoreReport(
        unit_ids=tuple(ann.unit_id for ann in anns),
        scores=tuple(scores),
        means=means,
        medians=medians,
        histograms=histograms,
        frequent_error_types=frequent,
    )
