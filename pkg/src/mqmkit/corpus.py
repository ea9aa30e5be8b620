"""Dataset ingestion, balanced sampling/splitting and corpus statistics.

Datasets are JSONL (one unit per line, fields ``id``, ``corpus``,
``source``, ``reference``, ``hypothesis``; the last two optional) or TSV.
Splits keep an equal per-corpus count in every part, and the train part is
interleaved corpus by corpus so that any prefix of it stays balanced --
that is what lets training-size subsets be taken by simple truncation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .taxonomy import Corpus, TranslationUnit, UnitAnnotation

__all__ = [
    "DEFAULT_SIZES",
    "ParseError",
    "EncodingError",
    "InsufficientUnits",
    "Split",
    "CorpusRow",
    "CorpusStats",
    "load_parallel",
    "save_jsonl",
    "load_annotated_jsonl",
    "save_annotated_jsonl",
    "unit_to_dict",
    "unit_from_dict",
    "sample_and_split",
    "corpus_stats",
]

DEFAULT_SIZES = (1000, 100, 100)


class ParseError(ValueError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


class EncodingError(ParseError):
    pass


class InsufficientUnits(ValueError):
    pass


def unit_to_dict(unit: TranslationUnit) -> dict:
    record: dict = {"id": unit.id, "source": unit.source}
    if unit.corpus is not None:
        record["corpus"] = unit.corpus.value
    if unit.reference is not None:
        record["reference"] = unit.reference
    if unit.hypothesis is not None:
        record["hypothesis"] = unit.hypothesis
    return record


def unit_from_dict(record: dict, fallback_corpus: Optional[Corpus] = None) -> TranslationUnit:
    corpus = fallback_corpus
    if record.get("corpus"):
        corpus = Corpus.from_token(str(record["corpus"]))
    return TranslationUnit(
        id=str(record["id"]),
        source=str(record["source"]),
        hypothesis=record.get("hypothesis"),
        reference=record.get("reference"),
        corpus=corpus,
    )


def _auto_id(corpus: Optional[Corpus], line_number: int) -> str:
    prefix = corpus.short_code if corpus is not None else "unit"
    return f"{prefix}-{line_number}"


def _check_unique_ids(units: Sequence[TranslationUnit]) -> None:
    seen: set[str] = set()
    for unit in units:
        if unit.id in seen:
            raise ParseError(f"duplicate unit id {unit.id!r}")
        seen.add(unit.id)


def load_parallel(
    path: Union[str, Path],
    fmt: str = "jsonl",
    corpus: Optional[Corpus] = None,
) -> list[TranslationUnit]:
    """Load translation units from a JSONL or TSV file.

    TSV columns by arity: 2 = (source, reference), 3 = (source, reference,
    hypothesis), 4 = (id, source, reference, hypothesis); TSV needs the
    ``corpus`` argument since the format has no corpus column. Missing ids
    are assigned as ``<corpus>-<line>``.
    """
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path} is not valid UTF-8: {exc}") from None

    units: list[TranslationUnit] = []
    if fmt == "jsonl":
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_number) from None
            if "source" not in record:
                raise ParseError("missing field 'source'", line_number)
            if "id" not in record:
                line_corpus = corpus
                if record.get("corpus"):
                    line_corpus = Corpus.from_token(str(record["corpus"]))
                record = {**record, "id": _auto_id(line_corpus, line_number)}
            try:
                units.append(unit_from_dict(record, fallback_corpus=corpus))
            except ValueError as exc:
                raise ParseError(str(exc), line_number) from None
    elif fmt == "tsv":
        if corpus is None:
            raise ValueError("TSV import needs an explicit corpus")
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            columns = line.rstrip("\n").split("\t")
            if len(columns) == 2:
                uid, source, reference, hypothesis = None, columns[0], columns[1], None
            elif len(columns) == 3:
                uid, (source, reference, hypothesis) = None, columns
            elif len(columns) == 4:
                uid, source, reference, hypothesis = columns
            else:
                raise ParseError(f"expected 2-4 columns, got {len(columns)}", line_number)
            try:
                units.append(
                    TranslationUnit(
                        id=uid or _auto_id(corpus, line_number),
                        source=source,
                        reference=reference,
                        hypothesis=hypothesis,
                        corpus=corpus,
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), line_number) from None
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'jsonl' or 'tsv'")

    _check_unique_ids(units)
    return units


def save_jsonl(units: Sequence[TranslationUnit], path: Union[str, Path]) -> None:
    lines = [json.dumps(unit_to_dict(unit), ensure_ascii=False) for unit in units]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_annotated_jsonl(
    path: Union[str, Path],
) -> list[tuple[TranslationUnit, Optional[UnitAnnotation]]]:
    """Load a dataset whose lines may embed an ``annotation`` object."""
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path} is not valid UTF-8: {exc}") from None
    pairs: list[tuple[TranslationUnit, Optional[UnitAnnotation]]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line_number) from None
        if "source" not in record or "id" not in record:
            raise ParseError("annotated lines need 'id' and 'source'", line_number)
        try:
            unit = unit_from_dict(record)
            annotation = None
            if record.get("annotation") is not None:
                annotation = UnitAnnotation.from_dict(record["annotation"])
        except (ValueError, KeyError) as exc:
            raise ParseError(str(exc), line_number) from None
        pairs.append((unit, annotation))
    _check_unique_ids([unit for unit, _ in pairs])
    return pairs


def save_annotated_jsonl(
    pairs: Sequence[tuple[TranslationUnit, Optional[UnitAnnotation]]],
    path: Union[str, Path],
) -> None:
    lines = []
    for unit, annotation in pairs:
        record = unit_to_dict(unit)
        if annotation is not None:
            record["annotation"] = annotation.to_dict()
        lines.append(json.dumps(record, ensure_ascii=False))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


@dataclass(frozen=True)
class Split:
    train: tuple[TranslationUnit, ...]
    validation: tuple[TranslationUnit, ...]
    test: tuple[TranslationUnit, ...]
    seed: int

    @property
    def parts(self) -> dict[str, tuple[TranslationUnit, ...]]:
        return {"train": self.train, "validation": self.validation, "test": self.test}


def _corpus_key(unit: TranslationUnit) -> str:
    return unit.corpus.value if unit.corpus is not None else ""


def _scaled_sizes(n_units: int) -> tuple[int, int, int]:
    total_default = sum(DEFAULT_SIZES)
    if n_units >= total_default:
        return DEFAULT_SIZES
    return tuple(max(1, size * n_units // total_default) for size in DEFAULT_SIZES)


def sample_and_split(
    units: Sequence[TranslationUnit],
    seed: int = 0,
    sizes: Optional[Sequence[int]] = None,
) -> Split:
    """Seeded balanced split into train/validation/test.

    Units are grouped per corpus, shuffled (after sorting by id, so the
    result does not depend on input order), and allocated round-robin so
    every part holds an equal per-corpus count (within 1 when a part size
    is not divisible). Deterministic given the seed. ``sizes`` defaults to
    (1000, 100, 100), scaled down proportionally for smaller inputs.
    """
    if sizes is None:
        part_sizes = _scaled_sizes(len(units))
    else:
        if len(sizes) != 3:
            raise ValueError("sizes must have exactly 3 entries (train, validation, test)")
        part_sizes = tuple(int(s) for s in sizes)

    groups: dict[str, list[TranslationUnit]] = {}
    for unit in units:
        groups.setdefault(_corpus_key(unit), []).append(unit)
    corpus_order = sorted(groups)

    rng = random.Random(seed)
    for key in corpus_order:
        groups[key].sort(key=lambda u: u.id)
        rng.shuffle(groups[key])

    # per-part per-corpus quotas: equal share, remainder to the first corpora
    quotas: list[dict[str, int]] = []
    for size in part_sizes:
        base, remainder = divmod(size, len(corpus_order))
        quotas.append(
            {key: base + (1 if i < remainder else 0) for i, key in enumerate(corpus_order)}
        )
    for key in corpus_order:
        needed = sum(quota[key] for quota in quotas)
        if needed > len(groups[key]):
            raise InsufficientUnits(
                f"corpus {key or '<none>'}: need {needed} units, have {len(groups[key])}"
            )

    cursors = {key: 0 for key in corpus_order}
    parts: list[tuple[TranslationUnit, ...]] = []
    for quota in quotas:
        part: list[TranslationUnit] = []
        remaining = dict(quota)
        while any(remaining.values()):
            for key in corpus_order:
                if remaining[key] > 0:
                    part.append(groups[key][cursors[key]])
                    cursors[key] += 1
                    remaining[key] -= 1
        parts.append(tuple(part))

    return Split(train=parts[0], validation=parts[1], test=parts[2], seed=seed)


@dataclass(frozen=True)
class CorpusRow:
    total_pairs: int
    sampled_pairs: int
    avg_source_len: Optional[float]
    avg_reference_len: Optional[float]
    avg_hypothesis_len: Optional[float]

    def to_dict(self) -> dict:
        return {
            "total_pairs": self.total_pairs,
            "sampled_pairs": self.sampled_pairs,
            "avg_source_len": self.avg_source_len,
            "avg_reference_len": self.avg_reference_len,
            "avg_hypothesis_len": self.avg_hypothesis_len,
        }


@dataclass(frozen=True)
class CorpusStats:
    rows: dict[str, CorpusRow]

    def to_dict(self) -> dict:
        return {key: row.to_dict() for key, row in self.rows.items()}


def _average_tokens(texts: list[Optional[str]]) -> Optional[float]:
    present = [text for text in texts if text is not None]
    if not present:
        return None
    return sum(len(text.split()) for text in present) / len(present)


def corpus_stats(
    units: Sequence[TranslationUnit],
    sampled: Optional[Sequence[TranslationUnit]] = None,
) -> CorpusStats:
    """Whitespace-token length averages per corpus.

    ``sampled`` (defaulting to ``units``) is the subset whose size goes in
    the sampled-pairs column; averages are over ``sampled``. Units without
    a reference or hypothesis are excluded from that field's average, and
    an average with no data is reported as None rather than 0.
    """
    sampled = units if sampled is None else sampled
    keys = sorted({_corpus_key(u) for u in units} | {_corpus_key(u) for u in sampled})
    rows = {}
    for key in keys:
        total = [u for u in units if _corpus_key(u) == key]
        chosen = [u for u in sampled if _corpus_key(u) == key]
        rows[key or "<unknown>"] = CorpusRow(
            total_pairs=len(total),
            sampled_pairs=len(chosen),
            avg_source_len=_average_tokens([u.source for u in chosen]),
            avg_reference_len=_average_tokens([u.reference for u in chosen]),
            avg_hypothesis_len=_average_tokens([u.hypothesis for u in chosen]),
        )
    return CorpusStats(rows=rows)
