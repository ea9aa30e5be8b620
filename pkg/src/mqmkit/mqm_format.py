"""Parser and serializer for the plain-text annotation format.

One block per translation unit::

    [1-th translation unit]
    And demonstrations also occurred in Ni'lin.
    Ni'lin은 또한 시위가 일어나는 것을 목격했습니다.

    Accuracy: Ni'lin(untranslated text/major), And(omission/minor)
    Fluency: -
    Style: -

Dimension lines appear in the fixed order Accuracy, Fluency, Style; a body
of ``-`` means no errors in that dimension. Each entry is
``span(subtype/severity)``. Spans may contain commas and parentheses, so
entries are split on the delimiter ``"), "`` (the closing parenthesis is
restored afterwards) and the metadata boundary is the last ``(`` of the
entry. The grammar is documented in docs/annotation_format.md; spans that
themselves contain ``"), "`` are not representable.
"""

from __future__ import annotations

import re
from typing import Optional

from .taxonomy import (
    DIMENSION_SUBTYPES,
    Dimension,
    ErrorAnnotation,
    Severity,
    SpanSide,
    SubErrorType,
    TranslationUnit,
    UnitAnnotation,
    validate_annotation,
)

__all__ = [
    "MqmFormatError",
    "MalformedEntry",
    "MalformedBlock",
    "InvalidAnnotation",
    "parse_entry",
    "parse_document",
    "serialize_document",
]

_HEADER_RE = re.compile(
    r"\[\s*(\d+)\s*(?:-?\s*(?:st|nd|rd|th))?\s+translation\s+unit\s*\]\s*$",
    re.IGNORECASE,
)
_ENTRY_DELIMITER = "), "


class MqmFormatError(ValueError):
    """Base error for annotation-format problems."""

    def __init__(self, message: str, line_number: Optional[int] = None,
                 block_index: Optional[int] = None):
        self.line_number = line_number
        self.block_index = block_index
        prefix = ""
        if block_index is not None:
            prefix += f"block {block_index}: "
        if line_number is not None:
            prefix += f"line {line_number}: "
        super().__init__(prefix + message)


class MalformedEntry(MqmFormatError):
    """A single ``span(subtype/severity)`` entry could not be parsed."""


class MalformedBlock(MqmFormatError):
    """A unit block is structurally broken (header or dimension lines)."""


class InvalidAnnotation(MqmFormatError):
    """Annotations rejected at serialization time."""


def parse_entry(
    text: str,
    dimension: Dimension,
    hypothesis: Optional[str] = None,
) -> ErrorAnnotation:
    """Parse one dimension-line entry into an :class:`ErrorAnnotation`.

    The span is everything before the final parenthetical, which must hold
    ``subtype/severity``. Subtype and severity tokens are matched
    case-insensitively with spaces and underscores normalized. The span
    side is the source exactly when the entry is an accuracy omission whose
    span does not occur in ``hypothesis`` (omissions name missing source
    words); with no hypothesis given, omissions default to the source side.
    """
    entry = text.strip()
    if not entry.endswith(")"):
        raise MalformedEntry(f"entry does not end with a parenthetical: {entry!r}")
    meta_start = entry.rfind("(")
    if meta_start < 0:
        raise MalformedEntry(f"entry has no parenthetical: {entry!r}")
    span_text = entry[:meta_start]
    meta = entry[meta_start + 1 : -1]
    if not span_text:
        raise MalformedEntry(f"entry has an empty span: {entry!r}")
    sep = meta.rfind("/")
    if sep < 0:
        raise MalformedEntry(f"parenthetical lacks a subtype/severity separator: {entry!r}")
    subtype_token, severity_token = meta[:sep], meta[sep + 1 :]
    try:
        subtype = SubErrorType.from_token(subtype_token)
    except ValueError as exc:
        raise MalformedEntry(str(exc)) from None
    try:
        severity = Severity(severity_token.strip().lower())
    except ValueError:
        raise MalformedEntry(f"unknown severity: {severity_token!r}") from None
    if subtype not in DIMENSION_SUBTYPES[dimension]:
        raise MalformedEntry(
            f"{subtype.label!r} is not a valid {dimension.value} sub-error type"
        )

    side = SpanSide.HYPOTHESIS
    if dimension is Dimension.ACCURACY and subtype is SubErrorType.OMISSION:
        if hypothesis is None or span_text not in hypothesis:
            side = SpanSide.SOURCE
    return ErrorAnnotation(
        dimension=dimension,
        subtype=subtype,
        severity=severity,
        span_text=span_text,
        span_side=side,
    )


def _split_entries(body: str) -> list[str]:
    parts = body.split(_ENTRY_DELIMITER)
    return [part + ")" for part in parts[:-1]] + [parts[-1]]


def parse_document(text: str) -> list[tuple[TranslationUnit, UnitAnnotation]]:
    """Parse a whole annotation document into unit/annotation pairs.

    Returned units are skeletons: ids are assigned from document order
    (``unit-1``, ``unit-2``, ...) because the header ordinal is not
    trusted, and corpus/reference are unknown to this format.
    """
    lines = text.splitlines()
    results: list[tuple[TranslationUnit, UnitAnnotation]] = []
    pos = 0
    block_index = 0

    def skip_blank(i: int) -> int:
        while i < len(lines) and not lines[i].strip():
            i += 1
        return i

    while True:
        pos = skip_blank(pos)
        if pos >= len(lines):
            break
        block_index += 1
        header_line = pos + 1
        if not _HEADER_RE.match(lines[pos].strip()):
            raise MalformedBlock(
                f"expected unit header, got {lines[pos]!r}",
                line_number=header_line,
                block_index=block_index,
            )
        pos += 1
        if pos >= len(lines) or not lines[pos].strip():
            raise MalformedBlock(
                "missing source line", line_number=pos + 1, block_index=block_index
            )
        source = lines[pos].rstrip("\n").strip()
        pos += 1
        if pos >= len(lines) or not lines[pos].strip():
            raise MalformedBlock(
                "missing hypothesis line", line_number=pos + 1, block_index=block_index
            )
        hypothesis = lines[pos].rstrip("\n").strip()
        pos += 1

        errors: list[ErrorAnnotation] = []
        for dimension in (Dimension.ACCURACY, Dimension.FLUENCY, Dimension.STYLE):
            pos = skip_blank(pos)
            prefix = dimension.label + ":"
            if pos >= len(lines) or not lines[pos].strip().startswith(prefix):
                found = lines[pos].strip() if pos < len(lines) else "<end of document>"
                raise MalformedBlock(
                    f"expected {prefix!r} line, got {found!r}",
                    line_number=pos + 1,
                    block_index=block_index,
                )
            body = lines[pos].strip()[len(prefix) :].strip()
            if not body:
                raise MalformedBlock(
                    f"empty {dimension.label} line; use '-' for no errors",
                    line_number=pos + 1,
                    block_index=block_index,
                )
            if body != "-":
                for entry in _split_entries(body):
                    try:
                        errors.append(parse_entry(entry, dimension, hypothesis))
                    except MalformedEntry as exc:
                        raise MalformedEntry(
                            str(exc), line_number=pos + 1, block_index=block_index
                        ) from None
            pos += 1

        unit = TranslationUnit(
            id=f"unit-{block_index}", source=source, hypothesis=hypothesis
        )
        results.append((unit, UnitAnnotation(unit_id=unit.id, errors=errors)))
    return results


def _render_entry(error: ErrorAnnotation) -> str:
    return f"{error.span_text}({error.subtype.label}/{error.severity.value})"


def serialize_document(items: list[tuple[TranslationUnit, UnitAnnotation]]) -> str:
    """Render unit/annotation pairs back into the canonical text layout.

    Entry order within a dimension line is preserved as given. Raises
    :class:`InvalidAnnotation` for annotations that fail validation or that
    the format cannot represent (spans containing the entry delimiter or
    line breaks).
    """
    blocks: list[str] = []
    for index, (unit, ann) in enumerate(items, start=1):
        hypothesis = unit.require_hypothesis()
        violations = [v for v in validate_annotation(unit, ann) if not v.is_warning]
        if violations:
            raise InvalidAnnotation(
                f"unit {unit.id!r}: " + "; ".join(v.message for v in violations),
                block_index=index,
            )
        for text, what in ((unit.source, "source"), (hypothesis, "hypothesis")):
            if "\n" in text:
                raise InvalidAnnotation(
                    f"unit {unit.id!r}: {what} contains a line break", block_index=index
                )
        for error in ann.errors:
            if _ENTRY_DELIMITER in error.span_text or "\n" in error.span_text:
                raise InvalidAnnotation(
                    f"unit {unit.id!r}: span {error.span_text!r} is not representable",
                    block_index=index,
                )

        dim_lines = []
        for dimension in (Dimension.ACCURACY, Dimension.FLUENCY, Dimension.STYLE):
            entries = [_render_entry(e) for e in ann.for_dimension(dimension)]
            body = ", ".join(entries) if entries else "-"
            dim_lines.append(f"{dimension.label}: {body}")
        blocks.append(
            f"[{index}-th translation unit]\n"
            f"{unit.source}\n"
            f"{hypothesis}\n"
            "\n" + "\n".join(dim_lines) + "\n"
        )
    return "\n".join(blocks)
