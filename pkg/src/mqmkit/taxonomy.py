"""Domain types for span-level translation-error annotation.

The error taxonomy has three dimensions (accuracy, fluency, style), each
with a fixed set of sub-error types, and two severity levels (major = 5
penalty points, minor = 1). Annotated spans are stored as surface strings;
omission spans live in the source sentence, everything else in the
hypothesis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional


class Corpus(Enum):
    """Origin corpus of a translation pair."""

    GLOBAL_VOICES = "global_voices"
    TED_TALKS_2020 = "ted_talks_2020"

    @property
    def short_code(self) -> str:
        return {Corpus.GLOBAL_VOICES: "gv", Corpus.TED_TALKS_2020: "ted"}[self]

    @classmethod
    def from_token(cls, token: str) -> "Corpus":
        key = _normalize_token(token)
        for corpus in cls:
            if key in (_normalize_token(corpus.value), corpus.short_code):
                return corpus
        raise ValueError(f"unknown corpus: {token!r}")


class Dimension(Enum):
    ACCURACY = "accuracy"
    FLUENCY = "fluency"
    STYLE = "style"

    @property
    def label(self) -> str:
        """Capitalized name as it appears on annotation dimension lines."""
        return self.value.capitalize()


class Severity(Enum):
    MAJOR = "major"
    MINOR = "minor"

    @property
    def weight(self) -> int:
        return SEVERITY_WEIGHTS[self]


#: Penalty weight per severity level. There is no critical level.
SEVERITY_WEIGHTS = {Severity.MAJOR: 5, Severity.MINOR: 1}


class SubErrorType(Enum):
    # accuracy
    ADDITION = "addition"
    OMISSION = "omission"
    SHIFT_IN_MEANING = "shift in meaning"
    MISTRANSLATION = "mistranslation"
    # fluency
    GRAMMAR = "grammar"
    SPELLING = "spelling"
    PUNCTUATION = "punctuation"
    ENCODING = "encoding"
    FORMATTING = "formatting"
    UNNATURALNESS = "unnaturalness"
    # accuracy and fluency
    UNTRANSLATED_TEXT = "untranslated text"
    # style
    FORMALITY = "formality"
    STRUCTURE = "structure"

    @property
    def label(self) -> str:
        """Canonical lower-case label with spaces, as serialized."""
        return self.value

    @classmethod
    def from_token(cls, token: str) -> "SubErrorType":
        """Parse a subtype name, ignoring case, spaces and underscores."""
        key = _normalize_token(token)
        try:
            return _SUBTYPE_BY_KEY[key]
        except KeyError:
            raise ValueError(f"unknown sub-error type: {token!r}") from None


def _normalize_token(token: str) -> str:
    return re.sub(r"[\s_]+", "", token.strip().lower())


_SUBTYPE_BY_KEY = {_normalize_token(t.value): t for t in SubErrorType}

#: Sub-error types permitted per dimension. Untranslated text is the one
#: type shared between accuracy and fluency.
DIMENSION_SUBTYPES = {
    Dimension.ACCURACY: frozenset(
        {
            SubErrorType.ADDITION,
            SubErrorType.OMISSION,
            SubErrorType.SHIFT_IN_MEANING,
            SubErrorType.MISTRANSLATION,
            SubErrorType.UNTRANSLATED_TEXT,
        }
    ),
    Dimension.FLUENCY: frozenset(
        {
            SubErrorType.GRAMMAR,
            SubErrorType.SPELLING,
            SubErrorType.PUNCTUATION,
            SubErrorType.ENCODING,
            SubErrorType.FORMATTING,
            SubErrorType.UNNATURALNESS,
            SubErrorType.UNTRANSLATED_TEXT,
        }
    ),
    Dimension.STYLE: frozenset({SubErrorType.FORMALITY, SubErrorType.STRUCTURE}),
}


def permitted_dimensions(subtype: SubErrorType) -> frozenset[Dimension]:
    return frozenset(d for d, types in DIMENSION_SUBTYPES.items() if subtype in types)


class SpanSide(Enum):
    HYPOTHESIS = "hypothesis"
    SOURCE = "source"


@dataclass(frozen=True)
class TranslationUnit:
    """One source/hypothesis pair, optionally with a reference translation.

    ``hypothesis`` may be None only while a dataset is being built (before
    the generation pipeline has filled it); every annotation, scoring and
    feature operation requires it. ``corpus`` may be None for units
    reconstructed from the plain annotation text format, which does not
    record provenance.
    """

    id: str
    source: str
    hypothesis: Optional[str] = None
    reference: Optional[str] = None
    corpus: Optional[Corpus] = None

    def __post_init__(self) -> None:
        if not self.source.strip():
            raise ValueError(f"unit {self.id!r}: empty source")
        if self.hypothesis is not None and not self.hypothesis.strip():
            raise ValueError(f"unit {self.id!r}: empty hypothesis")

    def require_hypothesis(self) -> str:
        if self.hypothesis is None:
            raise ValueError(f"unit {self.id!r} has no hypothesis")
        return self.hypothesis

    def text_for_side(self, side: SpanSide) -> str:
        return self.source if side is SpanSide.SOURCE else self.require_hypothesis()


@dataclass(frozen=True)
class ErrorAnnotation:
    """One annotated error span.

    Deliberately permissive: invariants (non-empty span, subtype valid for
    dimension, side rules) are checked by :func:`validate_annotation` so
    that boundary code can report violations instead of crashing.
    """

    dimension: Dimension
    subtype: SubErrorType
    severity: Severity
    span_text: str
    span_side: SpanSide = SpanSide.HYPOTHESIS

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension.value,
            "subtype": self.subtype.label,
            "severity": self.severity.value,
            "span_text": self.span_text,
            "span_side": self.span_side.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ErrorAnnotation":
        return cls(
            dimension=Dimension(str(data["dimension"]).strip().lower()),
            subtype=SubErrorType.from_token(str(data["subtype"])),
            severity=Severity(str(data["severity"]).strip().lower()),
            span_text=str(data["span_text"]),
            span_side=SpanSide(str(data.get("span_side", "hypothesis")).strip().lower()),
        )


@dataclass(frozen=True)
class UnitAnnotation:
    """All error annotations for one translation unit (possibly none)."""

    unit_id: str
    errors: tuple[ErrorAnnotation, ...] = ()

    def __init__(self, unit_id: str, errors: Iterable[ErrorAnnotation] = ()) -> None:
        object.__setattr__(self, "unit_id", unit_id)
        object.__setattr__(self, "errors", tuple(errors))

    def for_dimension(self, dimension: Dimension) -> tuple[ErrorAnnotation, ...]:
        return tuple(e for e in self.errors if e.dimension is dimension)

    def to_dict(self) -> dict:
        return {"unit_id": self.unit_id, "errors": [e.to_dict() for e in self.errors]}

    @classmethod
    def from_dict(cls, data: dict) -> "UnitAnnotation":
        return cls(
            unit_id=str(data["unit_id"]),
            errors=[ErrorAnnotation.from_dict(e) for e in data.get("errors", [])],
        )


@dataclass(frozen=True)
class ErrorCounts:
    """Severity-weighted error units for one dimension.

    Units are whitespace tokens for accuracy/fluency spans and whole spans
    for style (see :mod:`mqmkit.scoring`).
    """

    major_units: int = 0
    minor_units: int = 0

    def __post_init__(self) -> None:
        if self.major_units < 0 or self.minor_units < 0:
            raise ValueError("error counts must be non-negative")


@dataclass(frozen=True)
class MqmScore:
    """Penalty points per dimension. Higher means a worse translation."""

    accuracy: int
    fluency: int
    style: int

    def __post_init__(self) -> None:
        if min(self.accuracy, self.fluency, self.style) < 0:
            raise ValueError("scores are non-negative penalty points")

    @property
    def total(self) -> int:
        return self.accuracy + self.fluency + self.style

    def as_vector(self) -> tuple[int, int, int]:
        return (self.accuracy, self.fluency, self.style)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "fluency": self.fluency,
            "style": self.style,
            "total": self.total,
        }


class ViolationCode(Enum):
    EMPTY_SPAN = "EMPTY_SPAN"
    SUBTYPE_DIMENSION_MISMATCH = "SUBTYPE_DIMENSION_MISMATCH"
    SPAN_NOT_FOUND = "SPAN_NOT_FOUND"
    SOURCE_SIDE_NOT_OMISSION = "SOURCE_SIDE_NOT_OMISSION"
    UNIT_MISMATCH = "UNIT_MISMATCH"
    OVERLAPPING_SPANS = "OVERLAPPING_SPANS"


#: Codes reported as warnings rather than hard violations.
WARNING_CODES = frozenset({ViolationCode.OVERLAPPING_SPANS})


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    message: str
    span_text: str = ""

    @property
    def is_warning(self) -> bool:
        return self.code in WARNING_CODES

    def to_dict(self) -> dict:
        return {
            "code": self.code.value,
            "message": self.message,
            "span_text": self.span_text,
            "warning": self.is_warning,
        }


def validate_annotation(unit: TranslationUnit, ann: UnitAnnotation) -> list[Violation]:
    """Check an annotation against the taxonomy and the unit's text.

    Returns an empty list iff every error satisfies the type invariants and
    every span occurs verbatim in the text of its side. Overlapping spans
    within one dimension are reported as warnings, not violations; callers
    that only care about hard errors should filter on ``is_warning``.
    Deterministic and side-effect free.
    """
    violations: list[Violation] = []
    if ann.unit_id != unit.id:
        violations.append(
            Violation(
                ViolationCode.UNIT_MISMATCH,
                f"annotation is for unit {ann.unit_id!r}, not {unit.id!r}",
            )
        )

    for error in ann.errors:
        if not error.span_text.strip():
            violations.append(
                Violation(ViolationCode.EMPTY_SPAN, "span text is empty", error.span_text)
            )
            continue
        if error.subtype not in DIMENSION_SUBTYPES[error.dimension]:
            violations.append(
                Violation(
                    ViolationCode.SUBTYPE_DIMENSION_MISMATCH,
                    f"{error.subtype.label!r} is not a {error.dimension.value} sub-error type",
                    error.span_text,
                )
            )
        if error.span_side is SpanSide.SOURCE and not (
            error.dimension is Dimension.ACCURACY and error.subtype is SubErrorType.OMISSION
        ):
            violations.append(
                Violation(
                    ViolationCode.SOURCE_SIDE_NOT_OMISSION,
                    "only accuracy/omission spans may sit in the source",
                    error.span_text,
                )
            )
        if error.span_text not in unit.text_for_side(error.span_side):
            violations.append(
                Violation(
                    ViolationCode.SPAN_NOT_FOUND,
                    f"span not found in {error.span_side.value} text",
                    error.span_text,
                )
            )

    violations.extend(_overlap_warnings(unit, ann))
    return violations


def is_valid(unit: TranslationUnit, ann: UnitAnnotation) -> bool:
    """True when validation yields no hard violations (warnings allowed)."""
    return not any(not v.is_warning for v in validate_annotation(unit, ann))


def _overlap_warnings(unit: TranslationUnit, ann: UnitAnnotation) -> list[Violation]:
    # The guideline forbids one word under two subtypes of the same
    # dimension; occurrence ranges come from leftmost first-occurrence
    # matching since spans are stored as surface strings.
    warnings: list[Violation] = []
    for dimension in Dimension:
        located = []
        for error in ann.for_dimension(dimension):
            text = unit.text_for_side(error.span_side)
            start = text.find(error.span_text)
            if start >= 0 and error.span_text:
                located.append((error, start, start + len(error.span_text)))
        for i in range(len(located)):
            for j in range(i + 1, len(located)):
                (a, a0, a1), (b, b0, b1) = located[i], located[j]
                if a.span_side is not b.span_side:
                    continue
                if a0 < b1 and b0 < a1:
                    warnings.append(
                        Violation(
                            ViolationCode.OVERLAPPING_SPANS,
                            f"spans {a.span_text!r} and {b.span_text!r} overlap "
                            f"within {dimension.value}",
                            a.span_text,
                        )
                    )
    return warnings
