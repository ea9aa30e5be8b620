"""Hand-engineered features for quality regression.

Two configurations mirror the two evaluation setups: ``qe`` features use
only the source and hypothesis (reference-free), ``mte`` appends three
reference-aware features on top of the identical qe values, so the qe
feature set is a strict prefix of the mte one. A constant bias component
is always the last entry.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .metrics import BleuConfig, ChrfConfig, chrf, sentence_bleu
from .taxonomy import TranslationUnit

__all__ = [
    "MODES",
    "FeatureVector",
    "MissingReference",
    "extract_features",
    "feature_names",
    "FeatureExtractor",
]

MODES = ("mte", "qe")

QE_FEATURE_NAMES = (
    "len_ratio_hyp_src",
    "latin_ratio",
    "digit_copy",
    "punct_diff",
    "mean_word_len",
    "token_repetition",
    "hangul_ratio",
)
MTE_EXTRA_NAMES = ("chrf_hyp_ref", "bleu_hyp_ref", "len_ratio_hyp_ref")
BIAS_NAME = "bias"


class MissingReference(ValueError):
    """mte-mode features need a reference translation."""


@dataclass(frozen=True)
class FeatureVector:
    mode: str
    names: tuple[str, ...]
    values: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __getitem__(self, name: str) -> float:
        return self.values[self.names.index(name)]


def feature_names(mode: str) -> tuple[str, ...]:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    names = QE_FEATURE_NAMES
    if mode == "mte":
        names = names + MTE_EXTRA_NAMES
    return names + (BIAS_NAME,)


@lru_cache(maxsize=4096)
def _char_script(ch: str) -> str:
    if not ch.isalpha():
        return ""
    name = unicodedata.name(ch, "")
    if name.startswith("LATIN"):
        return "latin"
    if name.startswith("HANGUL"):
        return "hangul"
    return "other"


def _script_ratio(text: str, script: str) -> float:
    alphabetic = [ch for ch in text if ch.isalpha()]
    if not alphabetic:
        return 0.0
    return sum(1 for ch in alphabetic if _char_script(ch) == script) / len(alphabetic)


def _digit_runs(text: str) -> list[str]:
    runs = []
    current = ""
    for ch in text:
        if ch.isdigit():
            current += ch
        elif current:
            runs.append(current)
            current = ""
    if current:
        runs.append(current)
    return runs


def _digit_copy_agreement(source: str, hypothesis: str) -> float:
    """Dice overlap of digit-run multisets; 1.0 when neither side has digits."""
    src_runs = _digit_runs(source)
    hyp_runs = _digit_runs(hypothesis)
    if not src_runs and not hyp_runs:
        return 1.0
    overlap = 0
    remaining = list(src_runs)
    for run in hyp_runs:
        if run in remaining:
            remaining.remove(run)
            overlap += 1
    return 2.0 * overlap / (len(src_runs) + len(hyp_runs))


def _punct_count(text: str) -> int:
    return sum(1 for ch in text if unicodedata.category(ch).startswith("P"))


def extract_features(unit: TranslationUnit, mode: str = "qe") -> FeatureVector:
    """Deterministic, locale-independent feature computation for one unit.

    The latin/hangul ratios are taken over alphabetic characters of the
    hypothesis only; length ratios count whitespace tokens.
    """
    names = feature_names(mode)
    hypothesis = unit.require_hypothesis()
    src_tokens = unit.source.split()
    hyp_tokens = hypothesis.split()

    values = [
        len(hyp_tokens) / len(src_tokens),
        _script_ratio(hypothesis, "latin"),
        _digit_copy_agreement(unit.source, hypothesis),
        float(_punct_count(hypothesis) - _punct_count(unit.source)),
        sum(len(t) for t in hyp_tokens) / len(hyp_tokens),
        1.0 - len(set(hyp_tokens)) / len(hyp_tokens),
        _script_ratio(hypothesis, "hangul"),
    ]
    if mode == "mte":
        if unit.reference is None or not unit.reference.strip():
            raise MissingReference(f"unit {unit.id!r} has no reference")
        values.extend(
            [
                chrf(hypothesis, unit.reference, ChrfConfig()),
                sentence_bleu(hypothesis, unit.reference, BleuConfig()),
                len(hyp_tokens) / len(unit.reference.split()),
            ]
        )
    values.append(1.0)
    return FeatureVector(mode=mode, names=names, values=tuple(values))


class FeatureExtractor(BaseEstimator, TransformerMixin):
    """Stateless transformer from translation units to a feature matrix."""

    def __init__(self, mode: str = "qe"):
        self.mode = mode

    def fit(self, X: Iterable[TranslationUnit], y=None) -> "FeatureExtractor":
        feature_names(self.mode)  # validates the mode
        return self

    def transform(self, X: Sequence[TranslationUnit]) -> np.ndarray:
        return np.array(
            [extract_features(unit, self.mode).values for unit in X], dtype=np.float64
        )

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(feature_names(self.mode), dtype=object)
