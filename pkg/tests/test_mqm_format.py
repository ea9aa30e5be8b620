import random
import re

import pytest

from conftest import NILIN_DOCUMENT, make_fixture_corpus
from mqmkit.mqm_format import (
    InvalidAnnotation,
    MalformedBlock,
    MalformedEntry,
    parse_document,
    parse_entry,
    serialize_document,
)
from mqmkit.taxonomy import (
    Dimension,
    ErrorAnnotation,
    Severity,
    SpanSide,
    SubErrorType,
    TranslationUnit,
    UnitAnnotation,
)

A, F, S = Dimension.ACCURACY, Dimension.FLUENCY, Dimension.STYLE


# -- parse_entry -----------------------------------------------------------


def test_entry_omission_defaults_to_source_side():
    ann = parse_entry("And(omission/minor)", A)
    assert ann.subtype is SubErrorType.OMISSION
    assert ann.severity is Severity.MINOR
    assert ann.span_text == "And"
    assert ann.span_side is SpanSide.SOURCE


def test_entry_korean_span_with_trailing_period():
    ann = parse_entry("목격했습니다.(mistranslation/major)", A)
    assert ann.span_text == "목격했습니다."
    assert ann.subtype is SubErrorType.MISTRANSLATION
    assert ann.severity is Severity.MAJOR
    assert ann.span_side is SpanSide.HYPOTHESIS


def test_entry_unknown_severity():
    with pytest.raises(MalformedEntry):
        parse_entry("word(grammar/critical)", F)


def test_entry_unknown_subtype():
    with pytest.raises(MalformedEntry):
        parse_entry("word(wordiness/major)", F)


def test_entry_subtype_invalid_for_dimension():
    with pytest.raises(MalformedEntry):
        parse_entry("word(structure/major)", A)


def test_entry_missing_parenthetical():
    with pytest.raises(MalformedEntry):
        parse_entry("just a span", A)


def test_entry_span_containing_parenthetical():
    ann = parse_entry("(Mohammed Ghannouchi)(untranslated text/minor)", A)
    assert ann.span_text == "(Mohammed Ghannouchi)"
    assert ann.subtype is SubErrorType.UNTRANSLATED_TEXT


def test_entry_subtype_normalization():
    ann = parse_entry("word(Untranslated_Text/MAJOR)", F)
    assert ann.subtype is SubErrorType.UNTRANSLATED_TEXT
    assert ann.severity is Severity.MAJOR


def test_entry_omission_found_in_hypothesis_stays_hypothesis_side():
    ann = parse_entry("Twitter(omission/minor)", A, hypothesis="Twitter에서 공유한")
    assert ann.span_side is SpanSide.HYPOTHESIS


# -- parse_document ---------------------------------------------------------


def test_nilin_block_parses_to_six_annotations():
    items = parse_document(NILIN_DOCUMENT)
    assert len(items) == 1
    unit, ann = items[0]
    assert unit.source == "And demonstrations also occurred in Ni'lin."
    assert len(ann.errors) == 6
    assert len(ann.for_dimension(A)) == 3
    assert len(ann.for_dimension(F)) == 2
    assert len(ann.for_dimension(S)) == 1


def test_hyphen_lines_mean_no_errors():
    doc = (
        "[1-th translation unit]\n"
        "A source sentence.\n"
        "가설 문장입니다.\n"
        "\n"
        "Accuracy: -\n"
        "Fluency: -\n"
        "Style: -\n"
    )
    items = parse_document(doc)
    assert len(items) == 1
    assert items[0][1].errors == ()


def test_two_blocks_preserve_order():
    doc = NILIN_DOCUMENT + "\n" + (
        "[2-th translation unit]\n"
        "Second source.\n"
        "두번째 문장.\n"
        "\n"
        "Accuracy: -\n"
        "Fluency: -\n"
        "Style: -\n"
    )
    items = parse_document(doc)
    assert [unit.id for unit, _ in items] == ["unit-1", "unit-2"]
    assert len(items[0][1].errors) == 6
    assert len(items[1][1].errors) == 0


def test_missing_dimension_line_is_malformed():
    doc = (
        "[1-th translation unit]\n"
        "A source sentence.\n"
        "가설 문장입니다.\n"
        "\n"
        "Accuracy: -\n"
        "Style: -\n"
    )
    with pytest.raises(MalformedBlock) as excinfo:
        parse_document(doc)
    assert "Fluency" in str(excinfo.value)


def test_malformed_entry_reports_block_and_line():
    doc = (
        "[1-th translation unit]\n"
        "A source sentence.\n"
        "가설 문장입니다.\n"
        "\n"
        "Accuracy: 가설(mistranslation/fatal)\n"
        "Fluency: -\n"
        "Style: -\n"
    )
    with pytest.raises(MalformedEntry) as excinfo:
        parse_document(doc)
    assert excinfo.value.block_index == 1
    assert excinfo.value.line_number == 5


def test_bad_header_is_malformed():
    with pytest.raises(MalformedBlock):
        parse_document("totally not a header\nsrc\nhyp\n\nAccuracy: -\nFluency: -\nStyle: -\n")


def test_empty_document():
    assert parse_document("") == []
    assert parse_document("\n\n") == []


def test_entries_split_on_delimiter_with_commas_in_span():
    doc = (
        "[1-th translation unit]\n"
        "carrying sticks and shields, and wearing helmets.\n"
        "막대기와 방패를 들고, 헬멧을 쓰고 있습니다.\n"
        "\n"
        "Accuracy: 막대기와 방패를 들고, 헬멧을(mistranslation/major), 있습니다.(mistranslation/minor)\n"
        "Fluency: -\n"
        "Style: -\n"
    )
    items = parse_document(doc)
    spans = [e.span_text for e in items[0][1].errors]
    assert spans == ["막대기와 방패를 들고, 헬멧을", "있습니다."]


# -- serialize_document ------------------------------------------------------


def test_serialize_empty_annotation_uses_hyphens():
    unit = TranslationUnit(id="u", source="A source.", hypothesis="한 문장.")
    text = serialize_document([(unit, UnitAnnotation("u", []))])
    assert "Accuracy: -\n" in text
    assert "Fluency: -\n" in text
    assert text.rstrip().endswith("Style: -")


def test_serialize_nilin_contains_expected_entry(nilin):
    text = serialize_document([(nilin["unit"], nilin["annotation"])])
    assert "Ni'lin(untranslated text/major)" in text


def test_nilin_round_trip_is_byte_identical():
    assert serialize_document(parse_document(NILIN_DOCUMENT)) == NILIN_DOCUMENT


def test_serialize_rejects_invalid_annotation():
    unit = TranslationUnit(id="u", source="A source.", hypothesis="한 문장.")
    bad = UnitAnnotation(
        "u",
        [ErrorAnnotation(A, SubErrorType.MISTRANSLATION, Severity.MAJOR, "없는구간")],
    )
    with pytest.raises(InvalidAnnotation):
        serialize_document([(unit, bad)])


def test_serialize_rejects_unrepresentable_span():
    unit = TranslationUnit(id="u", source="a", hypothesis="x), y z")
    ann = UnitAnnotation(
        "u", [ErrorAnnotation(F, SubErrorType.GRAMMAR, Severity.MINOR, "x), y")]
    )
    with pytest.raises(InvalidAnnotation):
        serialize_document([(unit, ann)])


# -- randomized round trips ---------------------------------------------------


def _sorted_by_dimension(ann: UnitAnnotation) -> tuple:
    ordered = []
    for dim in (A, F, S):
        ordered.extend(ann.for_dimension(dim))
    return tuple(ordered)


def _content(items):
    return [
        (unit.source, unit.hypothesis, _sorted_by_dimension(ann)) for unit, ann in items
    ]


def test_random_corpus_round_trip():
    corpus = make_fixture_corpus(50, seed=11)
    text = serialize_document(corpus)
    parsed = parse_document(text)
    assert _content(parsed) == _content(corpus)
    assert serialize_document(parsed) == text


def test_thousand_document_round_trip():
    rng = random.Random(99)
    corpus = make_fixture_corpus(1000, seed=23)
    for start in range(0, 1000, 50):
        items = corpus[start : start + rng.randint(10, 50)]
        text = serialize_document(items)
        parsed = parse_document(text)
        assert _content(parsed) == _content(items)
        assert serialize_document(parsed) == text


def test_no_entries_lost():
    corpus = make_fixture_corpus(80, seed=5)
    text = serialize_document(corpus)
    groups = 0
    for line in text.splitlines():
        if line.startswith(("Accuracy:", "Fluency:", "Style:")):
            groups += len(re.findall(r"\([^()/]*/[^()/]*\)", line))
    total = sum(len(ann.errors) for _, ann in corpus)
    assert groups == total
