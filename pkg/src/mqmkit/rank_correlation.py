"""Kendall rank correlation for meta-evaluation.

Two variants are provided. The default (``eq5``) divides the concordant
minus discordant pair difference by the number of untied pairs only; the
tie-corrected ``tau_b`` variant divides by
``sqrt((n0 - n1) * (n0 - n2))`` where ``n0`` is the total pair count and
``n1``/``n2`` are the pair counts tied in x/y. Penalty scores are heavily
tied, so both are reported side by side in CLI output.

Pair counting uses a merge-sort inversion count (Knight's algorithm); the
test suite checks it against an exhaustive O(n^2) pair enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

__all__ = [
    "CorrelationResult",
    "DegenerateInput",
    "LengthMismatch",
    "SampleTooSmall",
    "kendall_tau",
    "tau_significance",
    "correlation_matrix",
    "agreement_report",
]

VARIANTS = ("eq5", "tau_b")

#: Two-sided p-value thresholds and their star strings, tightest first.
STAR_THRESHOLDS = ((0.001, "***"), (0.01, "**"), (0.05, "*"))

MIN_SIGNIFICANCE_N = 10


class LengthMismatch(ValueError):
    pass


class DegenerateInput(ValueError):
    """No untied pairs (or no rank variation): tau is undefined."""


class SampleTooSmall(ValueError):
    """Normal approximation needs n >= 10."""


@dataclass(frozen=True)
class CorrelationResult:
    tau: float
    concordant: int
    discordant: int
    tied_x: int
    tied_y: int
    n: int
    variant: str
    p_value: Optional[float] = None
    stars: str = ""

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "concordant": self.concordant,
            "discordant": self.discordant,
            "tied_x": self.tied_x,
            "tied_y": self.tied_y,
            "n": self.n,
            "variant": self.variant,
            "p_value": self.p_value,
            "stars": self.stars,
        }


def _tie_pairs(values: Sequence[float]) -> int:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _merge_count(values: list[float]) -> int:
    """Count strict inversions (i < j with values[i] > values[j])."""
    n = len(values)
    if n < 2:
        return 0
    mid = n // 2
    left, right = values[:mid], values[mid:]
    inversions = _merge_count(left) + _merge_count(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            j += 1
            inversions += len(left) - i
    merged.extend(left[i:])
    merged.extend(right[j:])
    values[:] = merged
    return inversions


def pair_counts(x: Sequence[float], y: Sequence[float]) -> tuple[int, int, int, int, int]:
    """Classify all n(n-1)/2 pairs: (concordant, discordant, tied_x, tied_y, n0).

    Tie counts are pair counts; pairs tied in both coordinates appear in
    both tie totals.
    """
    if len(x) != len(y):
        raise LengthMismatch(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    n0 = n * (n - 1) // 2
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    xs = [x[i] for i in order]
    ys = [y[i] for i in order]

    tied_x = _tie_pairs(xs)
    tied_y = _tie_pairs(ys)
    tied_both = _tie_pairs(list(zip(xs, ys)))
    discordant = _merge_count(ys)
    untied = n0 - tied_x - tied_y + tied_both
    concordant = untied - discordant
    return concordant, discordant, tied_x, tied_y, n0


def kendall_tau(
    x: Sequence[float], y: Sequence[float], variant: str = "eq5"
) -> CorrelationResult:
    """Rank correlation of two aligned score lists.

    Ties in either coordinate are excluded from both the concordant and
    discordant counts. Raises :class:`DegenerateInput` when the selected
    variant's denominator vanishes (tau undefined, deliberately not 0).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if len(x) < 2:
        raise DegenerateInput("need at least 2 observations")
    c, d, tied_x, tied_y, n0 = pair_counts(x, y)
    if variant == "eq5":
        if c + d == 0:
            raise DegenerateInput("all pairs tied: tau undefined under eq5")
        tau = (c - d) / (c + d)
    else:
        denom = math.sqrt((n0 - tied_x) * (n0 - tied_y))
        if denom == 0:
            raise DegenerateInput("one input is constant: tau-b undefined")
        tau = (c - d) / denom
    return CorrelationResult(
        tau=tau,
        concordant=c,
        discordant=d,
        tied_x=tied_x,
        tied_y=tied_y,
        n=len(x),
        variant=variant,
    )


def stars_for_p(p_value: float) -> str:
    for threshold, stars in STAR_THRESHOLDS:
        if p_value < threshold:
            return stars
    return ""


def tau_significance(result: CorrelationResult) -> CorrelationResult:
    """Fill in a two-sided p-value and significance stars.

    Uses the large-sample normal approximation
    ``z = 3 * tau * sqrt(n * (n - 1)) / sqrt(2 * (2n + 5))``.
    """
    n = result.n
    if n < MIN_SIGNIFICANCE_N:
        raise SampleTooSmall(f"normal approximation needs n >= {MIN_SIGNIFICANCE_N}, got {n}")
    z = 3.0 * result.tau * math.sqrt(n * (n - 1)) / math.sqrt(2.0 * (2 * n + 5))
    p_value = math.erfc(abs(z) / math.sqrt(2.0))
    return replace(result, p_value=p_value, stars=stars_for_p(p_value))


def _with_significance(result: CorrelationResult) -> CorrelationResult:
    if result.n >= MIN_SIGNIFICANCE_N:
        return tau_significance(result)
    return result


def correlation_matrix(
    columns: Mapping[str, Sequence[float]],
    variant: str = "eq5",
    inverse: Sequence[str] = (),
) -> dict[str, dict[str, CorrelationResult]]:
    """Pairwise correlations between named score columns.

    The matrix is symmetric with diagonal tau fixed at 1.0 by convention.
    Columns named in ``inverse`` are negated before correlating (for
    quality metrics where higher is better, against penalty scores where
    higher is worse); under both variants this exactly negates tau.
    Significance is attached whenever the sample is large enough.
    """
    names = list(columns)
    lengths = {name: len(columns[name]) for name in names}
    if len(set(lengths.values())) > 1:
        raise LengthMismatch(f"columns differ in length: {lengths}")
    inverse_set = set(inverse)
    data = {
        name: [-v for v in columns[name]] if name in inverse_set else list(columns[name])
        for name in names
    }

    matrix: dict[str, dict[str, CorrelationResult]] = {name: {} for name in names}
    for i, a in enumerate(names):
        n = lengths[a]
        diagonal = CorrelationResult(
            tau=1.0,
            concordant=n * (n - 1) // 2,
            discordant=0,
            tied_x=0,
            tied_y=0,
            n=n,
            variant=variant,
        )
        matrix[a][a] = _with_significance(diagonal)
        for b in names[i + 1 :]:
            cell = _with_significance(kendall_tau(data[a], data[b], variant=variant))
            matrix[a][b] = cell
            matrix[b][a] = cell
    return matrix


def agreement_report(
    primary: Mapping[str, Mapping[str, float]],
    validators: Sequence[Mapping[str, Mapping[str, float]]],
    variant: str = "eq5",
) -> dict[str, CorrelationResult]:
    """Correlate a primary annotator against the mean of cross-validators.

    Inputs map dimension name -> unit id -> score. Validator scores are
    averaged per unit per dimension before correlating. All annotators must
    cover the same unit ids per dimension.
    """
    if not validators:
        raise ValueError("need at least one validator")
    report: dict[str, CorrelationResult] = {}
    for dimension, primary_scores in primary.items():
        ids = sorted(primary_scores)
        for k, validator in enumerate(validators):
            if dimension not in validator:
                raise ValueError(f"validator {k} lacks dimension {dimension!r}")
            missing = set(ids).symmetric_difference(validator[dimension])
            if missing:
                raise ValueError(
                    f"validator {k} misaligned on {dimension!r}: units {sorted(missing)}"
                )
        primary_list = [primary_scores[uid] for uid in ids]
        averaged = [
            sum(validator[dimension][uid] for validator in validators) / len(validators)
            for uid in ids
        ]
        report[dimension] = _with_significance(
            kendall_tau(primary_list, averaged, variant=variant)
        )
    return report
