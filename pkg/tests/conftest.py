"""Shared fixtures: golden-scored units, fixture corpora, synthetic data."""

from __future__ import annotations

import random

import pytest

from mqmkit.taxonomy import (
    Corpus,
    Dimension,
    ErrorAnnotation,
    Severity,
    SpanSide,
    SubErrorType,
    TranslationUnit,
    UnitAnnotation,
)

A = Dimension.ACCURACY
F = Dimension.FLUENCY
S = Dimension.STYLE
MAJ = Severity.MAJOR
MIN = Severity.MINOR
HYP = SpanSide.HYPOTHESIS
SRC = SpanSide.SOURCE


def _err(dim, subtype, sev, span, side=HYP):
    return ErrorAnnotation(
        dimension=dim, subtype=subtype, severity=sev, span_text=span, span_side=side
    )


NILIN_DOCUMENT = """[1-th translation unit]
And demonstrations also occurred in Ni'lin.
Ni'lin은 또한 시위가 일어나는 것을 목격했습니다.

Accuracy: Ni'lin(untranslated text/major), And(omission/minor), 목격했습니다.(mistranslation/major)
Fluency: Ni'lin(untranslated text/major), 또한(unnaturalness/minor)
Style: Ni'lin은 또한 시위가 일어나는 것을 목격했습니다.(structure/major)
"""


def _golden(key, source, hypothesis, errors, expected):
    unit = TranslationUnit(id=key, source=source, hypothesis=hypothesis)
    ann = UnitAnnotation(unit_id=key, errors=errors)
    return {"key": key, "unit": unit, "annotation": ann, "expected": expected}


#: Units with published golden scores. ``expected`` holds only the
#: published components; missing keys were not published for that unit.
GOLDEN_FIXTURES = [
    _golden(
        "nilin",
        "And demonstrations also occurred in Ni'lin.",
        "Ni'lin은 또한 시위가 일어나는 것을 목격했습니다.",
        [
            _err(A, SubErrorType.UNTRANSLATED_TEXT, MAJ, "Ni'lin"),
            _err(A, SubErrorType.OMISSION, MIN, "And", SRC),
            _err(A, SubErrorType.MISTRANSLATION, MAJ, "목격했습니다."),
            _err(F, SubErrorType.UNTRANSLATED_TEXT, MAJ, "Ni'lin"),
            _err(F, SubErrorType.UNNATURALNESS, MIN, "또한"),
            _err(S, SubErrorType.STRUCTURE, MAJ, "Ni'lin은 또한 시위가 일어나는 것을 목격했습니다."),
        ],
        {"accuracy": 11, "fluency": 6, "style": 5, "total": 22},
    ),
    _golden(
        "his-report",
        "His report matches this photograph shared by Kareem Fahim on Twitter, "
        "which shows Morsi supporters, carrying sticks and shields, and wearing helmets.",
        "그가 제시한 보고서는 Kareem Fahim이 Twitter에서 공유한 사진과 일치합니다. "
        "이미지는 헬멧을 쓰고 방패와 막대기를 들고 있는 무르시 지지자들을 묘사합니다.",
        [
            _err(A, SubErrorType.UNTRANSLATED_TEXT, MAJ, "Kareem Fahim이 Twitter"),
            _err(F, SubErrorType.UNTRANSLATED_TEXT, MAJ, "Kareem Fahim이 Twitter"),
        ],
        {"accuracy": 15, "fluency": 15, "total": 30},
    ),
    _golden(
        "got-myself-together",
        "And when I got myself together and I looked at her, I realized, this isn't about me.",
        "정신을 차리고 그녀를 관찰한 결과 상황이 내 중심으로 돌아가는 것이 아니라는 사실을 깨달았다.",
        [
            _err(A, SubErrorType.MISTRANSLATION, MIN, "관찰한"),
            _err(A, SubErrorType.MISTRANSLATION, MAJ, "상황이 내 중심으로 돌아가는"),
        ],
        {"total": 21},
    ),
    _golden(
        "coming-of-age",
        "It's a coming of age for bringing data into the humanitarian world.",
        "인도주의 분야는 데이터 통합의 중추적 순간을 경험하고 있습니다.",
        [
            _err(A, SubErrorType.MISTRANSLATION, MAJ, "분야는"),
            _err(A, SubErrorType.MISTRANSLATION, MAJ, "중추적 순간을"),
            _err(S, SubErrorType.STRUCTURE, MAJ, "인도주의 분야는 데이터 통합의 중추적 순간을 경험하고 있습니다."),
        ],
        {"total": 20},
    ),
    _golden(
        "we-have-babies",
        "We have babies.",
        "우리 가족에게는 신생아가 있습니다.",
        [
            _err(A, SubErrorType.ADDITION, MAJ, "가족에게는"),
            _err(S, SubErrorType.STRUCTURE, MAJ, "우리 가족에게는 신생아가 있습니다."),
        ],
        {"total": 10},
    ),
    _golden(
        "ghannouchi",
        "The authorities have declared a state of emergency while the Prime Minister "
        "Mohammed Ghannouchi announced on state television that he was taking over as "
        "interim President.",
        "모하메드 간누치(Mohammed Ghannouchi) 총리가 국영 TV에서 그가 임시 대통령의 역할을 "
        "맡을 것이라고 선언한 것과 함께 비상사태가 관리들에 의해 발표되었습니다.",
        [
            _err(A, SubErrorType.UNTRANSLATED_TEXT, MIN, "(Mohammed Ghannouchi)"),
            _err(F, SubErrorType.UNTRANSLATED_TEXT, MIN, "(Mohammed Ghannouchi)"),
            _err(S, SubErrorType.STRUCTURE, MAJ, "비상사태가 관리들에 의해 발표되었습니다."),
        ],
        {"accuracy": 2, "fluency": 2},
    ),
    _golden(
        "guinea",
        "Does Guinea even have a blogosphere to speak of?",
        "기니에 중요한 블로깅 커뮤니티가 있습니까?",
        [
            _err(A, SubErrorType.ADDITION, MAJ, "중요한"),
            _err(A, SubErrorType.MISTRANSLATION, MIN, "블로깅"),
            _err(A, SubErrorType.OMISSION, MAJ, "to speak of", SRC),
        ],
        {"accuracy": 21},
    ),
]


@pytest.fixture
def golden_fixtures():
    return GOLDEN_FIXTURES


@pytest.fixture
def nilin():
    return GOLDEN_FIXTURES[0]


# -- synthetic corpora -----------------------------------------------------

EN_WORDS = (
    "the report matches this photograph shared protests occurred city data world "
    "emergency television support against quality review people babies sticks news"
).split()
KO_WORDS = (
    "정신을 차리고 그녀를 관찰한 결과 상황이 중심으로 돌아가는 사실을 깨달았다 "
    "시위가 일어나는 목격했습니다 데이터 통합의 인도주의 분야는 경험하고 있습니다 "
    "관리들에 의해 발표되었습니다 커뮤니티가 총리가 국영 비상사태가"
).split()
LATIN_WORDS = "Twitter Kareem Fahim OPUS Morsi Guinea".split()


def make_unit(i: int, rng: random.Random, corpus: Corpus) -> TranslationUnit:
    """Random unit with enough surface variety to spread every feature."""
    src_tokens = [rng.choice(EN_WORDS) for _ in range(rng.randint(5, 14))]
    if rng.random() < 0.4:
        src_tokens.append(str(rng.randint(1, 9999)))

    hyp_tokens = [rng.choice(KO_WORDS) for _ in range(rng.randint(4, 13))]
    if rng.random() < 0.35:
        hyp_tokens.insert(rng.randrange(len(hyp_tokens)), rng.choice(LATIN_WORDS))
    if rng.random() < 0.25 and any(t.isdigit() for t in src_tokens):
        hyp_tokens.append(next(t for t in src_tokens if t.isdigit()))
    if rng.random() < 0.6:
        hyp_tokens[-1] += "."

    ref_tokens = list(hyp_tokens)
    for _ in range(rng.randint(0, 4)):
        if len(ref_tokens) > 2 and rng.random() < 0.5:
            ref_tokens.pop(rng.randrange(len(ref_tokens)))
        else:
            ref_tokens.insert(rng.randrange(len(ref_tokens) + 1), rng.choice(KO_WORDS))

    return TranslationUnit(
        id=f"{corpus.short_code}-{i}",
        source=" ".join(src_tokens),
        hypothesis=" ".join(hyp_tokens),
        reference=" ".join(ref_tokens),
        corpus=corpus,
    )


def make_synthetic_units(n: int, seed: int = 0) -> list[TranslationUnit]:
    """n units alternating between the two corpora (balanced when n even)."""
    rng = random.Random(seed)
    corpora = (Corpus.GLOBAL_VOICES, Corpus.TED_TALKS_2020)
    return [make_unit(i, rng, corpora[i % 2]) for i in range(1, n + 1)]


# subtype weights mirroring the published frequency ordering: mistranslation
# first, then unnaturalness, structure, untranslated text, omission
_SUBTYPE_POOL = (
    [(A, SubErrorType.MISTRANSLATION)] * 8
    + [(F, SubErrorType.UNNATURALNESS)] * 6
    + [(S, SubErrorType.STRUCTURE)] * 5
    + [(A, SubErrorType.UNTRANSLATED_TEXT)] * 2
    + [(F, SubErrorType.UNTRANSLATED_TEXT)] * 2
    + [(A, SubErrorType.OMISSION)] * 3
    + [(A, SubErrorType.ADDITION)] * 2
    + [(F, SubErrorType.GRAMMAR)] * 2
    + [(F, SubErrorType.SPELLING)]
    + [(S, SubErrorType.FORMALITY)]
)


def annotate_unit(unit: TranslationUnit, rng: random.Random) -> UnitAnnotation:
    """Random valid annotation whose spans come from the unit's own text."""
    hyp_tokens = unit.hypothesis.split()
    errors = []
    for dim, max_errors in ((A, 3), (F, 2), (S, 1)):
        candidates = [(d, t) for d, t in _SUBTYPE_POOL if d is dim]
        for _ in range(rng.randint(0, max_errors)):
            _, subtype = rng.choice(candidates)
            severity = MAJ if rng.random() < 0.45 else MIN
            if subtype is SubErrorType.OMISSION:
                src_candidates = [
                    t for t in unit.source.split() if t not in unit.hypothesis
                ]
                if not src_candidates:
                    continue
                errors.append(_err(dim, subtype, severity, rng.choice(src_candidates), SRC))
            elif dim is S:
                errors.append(_err(dim, subtype, severity, unit.hypothesis))
            else:
                start = rng.randrange(len(hyp_tokens))
                length = min(rng.randint(1, 2), len(hyp_tokens) - start)
                span = " ".join(hyp_tokens[start : start + length])
                errors.append(_err(dim, subtype, severity, span))
    return UnitAnnotation(unit_id=unit.id, errors=errors)


def make_fixture_corpus(
    n: int = 100, seed: int = 7
) -> list[tuple[TranslationUnit, UnitAnnotation]]:
    rng = random.Random(seed)
    units = make_synthetic_units(n, seed=seed)
    return [(unit, annotate_unit(unit, rng)) for unit in units]


def linear_fixture(n: int, seed: int, noise: float = 0.1, mode: str = "mte"):
    """Units whose 3-component targets are linear in the extracted features
    plus Gaussian noise. Weights are drawn large enough that the noise does
    not swamp rank order (the tau ceiling stays near 0.99)."""
    import numpy as np

    from mqmkit.features import FeatureExtractor

    rng = np.random.RandomState(seed)
    units = make_synthetic_units(n, seed=seed)
    X = FeatureExtractor(mode).transform(units)
    w_true = rng.uniform(1.5, 9.0, size=(3, X.shape[1]))
    targets = X @ w_true.T + 5.0
    if noise:
        targets = targets + rng.normal(0.0, noise, size=targets.shape)
    return units, targets
