"""Sentence-level BLEU and chrF.

Both metrics live in [0, 1] and are used two ways: negated as comparison
columns against penalty scores (higher metric = better, higher penalty =
worse) and directly as reference-aware regression features. These are
clean textbook implementations; no attempt is made to match any particular
released scorer's signature.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["BleuConfig", "ChrfConfig", "EmptyReference", "sentence_bleu", "chrf"]


class EmptyReference(ValueError):
    pass


@dataclass(frozen=True)
class BleuConfig:
    """``tokenizer`` is "whitespace" (eojeol units for Korean) or
    "character" (each non-space character becomes a token)."""

    max_ngram_order: int = 4
    smoothing_epsilon: float = 0.1
    tokenizer: str = "whitespace"

    def __post_init__(self) -> None:
        if self.max_ngram_order < 1:
            raise ValueError("max_ngram_order must be >= 1")
        if self.smoothing_epsilon <= 0:
            raise ValueError("smoothing_epsilon must be positive")
        if self.tokenizer not in ("whitespace", "character"):
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")


@dataclass(frozen=True)
class ChrfConfig:
    char_ngram_order: int = 6
    beta: float = 2.0

    def __post_init__(self) -> None:
        if self.char_ngram_order < 1:
            raise ValueError("char_ngram_order must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be positive")


def _tokenize(text: str, tokenizer: str) -> list[str]:
    if tokenizer == "character":
        return [ch for ch in text if not ch.isspace()]
    return text.split()


def _ngram_counts(tokens: Sequence[str], order: int) -> Counter:
    return Counter(tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1))


def sentence_bleu(hypothesis: str, reference: str, cfg: BleuConfig = BleuConfig()) -> float:
    """Smoothed sentence BLEU: geometric mean of clipped n-gram precisions
    times a brevity penalty.

    Zero clipped counts are floored at ``smoothing_epsilon``; orders longer
    than the hypothesis are skipped (effective order). The brevity penalty
    is ``exp(1 - r/c)`` when the hypothesis is shorter than the reference.
    """
    ref_tokens = _tokenize(reference, cfg.tokenizer)
    if not ref_tokens:
        raise EmptyReference("reference has no tokens")
    hyp_tokens = _tokenize(hypothesis, cfg.tokenizer)
    if not hyp_tokens:
        return 0.0

    log_precisions = []
    for order in range(1, cfg.max_ngram_order + 1):
        total = len(hyp_tokens) - order + 1
        if total <= 0:
            break
        hyp_counts = _ngram_counts(hyp_tokens, order)
        ref_counts = _ngram_counts(ref_tokens, order)
        clipped = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        numerator = clipped if clipped > 0 else cfg.smoothing_epsilon
        log_precisions.append(math.log(numerator / total))

    score = math.exp(sum(log_precisions) / len(log_precisions))
    c, r = len(hyp_tokens), len(ref_tokens)
    brevity_penalty = math.exp(1.0 - r / c) if c < r else 1.0
    return score * brevity_penalty


def chrf(hypothesis: str, reference: str, cfg: ChrfConfig = ChrfConfig()) -> float:
    """Character n-gram F-score with recall weighted by ``beta``.

    Whitespace is removed before n-gram extraction. Precision and recall
    are averaged over n-gram orders 1..N (orders where neither side has
    any n-grams are skipped), then combined as an F_beta score.
    """
    ref_chars = "".join(reference.split())
    if not ref_chars:
        raise EmptyReference("reference has no characters")
    hyp_chars = "".join(hypothesis.split())

    precisions = []
    recalls = []
    for order in range(1, cfg.char_ngram_order + 1):
        hyp_total = len(hyp_chars) - order + 1
        ref_total = len(ref_chars) - order + 1
        if hyp_total <= 0 and ref_total <= 0:
            continue
        hyp_counts = _ngram_counts(hyp_chars, order)
        ref_counts = _ngram_counts(ref_chars, order)
        overlap = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        precisions.append(overlap / hyp_total if hyp_total > 0 else 0.0)
        recalls.append(overlap / ref_total if ref_total > 0 else 0.0)

    if not precisions:
        return 0.0
    precision = sum(precisions) / len(precisions)
    recall = sum(recalls) / len(recalls)
    beta_sq = cfg.beta * cfg.beta
    denominator = beta_sq * precision + recall
    if denominator == 0.0:
        return 0.0
    return (1.0 + beta_sq) * precision * recall / denominator
