"""Dataset persistence and gold labeling.

Datasets are line-delimited JSON ("coquad.v1"): a header line carrying the
format version followed by one query record per line. Unknown fields are
preserved round-trip. Span labeling applies the inclusive ±10% rule
against the gold count, computed exactly (``10·|c − g| ≤ g``) so boundary
cases never depend on float rounding.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .jsonio import canonical_dumps
from .providers.base import AnswerSpan
from .quantity import Quantity, parse_quantity
from .textutil import default_measurement_units, sentence_spans, token_set

FORMAT_VERSION = "coquad.v1"

_RECORD_FIELDS = ("id", "query", "provenance", "gold_count", "gold_instances", "passages")
_PASSAGE_FIELDS = ("id", "rank", "url", "text")


class CorpusError(ValueError):
    """Malformed dataset content; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


class Provenance(str, Enum):
    KG = "kg"
    FEATURED_SNIPPET = "featured_snippet"
    MANUAL = "manual"
    UNLABELED = "unlabeled"


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Passage:
    id: str
    rank: int
    text: str
    url: str = ""
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class QueryRecord:
    id: str
    query: str
    passages: tuple[Passage, ...] = ()
    gold_count: Quantity | None = None
    gold_instances: tuple[str, ...] | None = None
    provenance: Provenance = Provenance.UNLABELED
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ranks = sorted(p.rank for p in self.passages)
        if ranks != list(range(1, len(ranks) + 1)):
            raise CorpusError(
                f"record {self.id!r}: passage ranks must be unique and contiguous "
                f"from 1, got {ranks}"
            )
        if self.gold_instances is not None and len(self.gold_instances) == 0:
            raise CorpusError(f"record {self.id!r}: gold_instances present but empty")


@dataclass(frozen=True)
class SpanLabel:
    span: AnswerSpan
    quantity: Quantity
    label: Label


def within_ten_percent(count: float, gold: float) -> bool:
    """Inclusive ±10% band, evaluated without dividing (exact on integers)."""
    return 10 * abs(count - gold) <= gold


# --- (de)serialization ----------------------------------------------------


def record_to_dict(record: QueryRecord) -> dict:
    out: dict = {"id": record.id, "query": record.query}
    if record.provenance != Provenance.UNLABELED:
        out["provenance"] = record.provenance.value
    if record.gold_count is not None:
        out["gold_count"] = record.gold_count.to_dict()
    if record.gold_instances is not None:
        out["gold_instances"] = list(record.gold_instances)
    out["passages"] = []
    for p in record.passages:
        pd: dict = {"id": p.id, "rank": p.rank}
        if p.url:
            pd["url"] = p.url
        pd["text"] = p.text
        for k in sorted(p.extra):
            pd.setdefault(k, p.extra[k])
        out["passages"].append(pd)
    for k in sorted(record.extra):
        out.setdefault(k, record.extra[k])
    return out


def record_from_dict(data: dict, lineno: int | None = None) -> QueryRecord:
    try:
        passages = []
        for praw in data.get("passages", []):
            passages.append(
                Passage(
                    id=str(praw["id"]),
                    rank=int(praw["rank"]),
                    text=praw["text"],
                    url=praw.get("url", ""),
                    extra={k: v for k, v in praw.items() if k not in _PASSAGE_FIELDS},
                )
            )
        gold_raw = data.get("gold_count")
        gold_instances = data.get("gold_instances")
        return QueryRecord(
            id=str(data["id"]),
            query=data["query"],
            passages=tuple(passages),
            gold_count=Quantity.from_dict(gold_raw) if gold_raw is not None else None,
            gold_instances=tuple(gold_instances) if gold_instances is not None else None,
            provenance=Provenance(data.get("provenance", "unlabeled")),
            extra={k: v for k, v in data.items() if k not in _RECORD_FIELDS},
        )
    except CorpusError as exc:
        raise CorpusError(str(exc), lineno) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"bad record: {exc}", lineno) from exc


def load(path: str | Path) -> list[QueryRecord]:
    """Read a dataset file; the header line is validated when present."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON: {exc.msg}", lineno) from exc
            if not isinstance(data, dict):
                raise CorpusError("each line must hold a JSON object", lineno)
            if "format" in data and "id" not in data:
                version = data["format"]
                if version != FORMAT_VERSION:
                    raise CorpusError(
                        f"unsupported format version {version!r} "
                        f"(expected {FORMAT_VERSION!r})",
                        lineno,
                    )
                continue
            records.append(record_from_dict(data, lineno))
    return records


def store(records: Iterable[QueryRecord], path: str | Path) -> None:
    """Write a dataset file with the canonical field order and a header line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": FORMAT_VERSION}) + "\n")
        for record in records:
            fh.write(canonical_dumps(record_to_dict(record), indent=None) + "\n")


# --- labeling and filtering -------------------------------------------------


def label_spans(record: QueryRecord, units: frozenset[str] | None = None) -> list[SpanLabel]:
    """Label every parsable count span in every passage against the gold count.

    A span is positive when its count lies within ±10% of the gold,
    boundary inclusive.
    """
    if record.gold_count is None:
        raise ValueError(f"record {record.id!r} has no gold count to label against")
    if units is None:
        units = default_measurement_units()
    gold = record.gold_count.value
    labels = []
    for passage in record.passages:
        for start, end in sentence_spans(passage.text):
            sentence = passage.text[start:end]
            quantity = parse_quantity(sentence, units)
            if quantity is None:
                continue
            span = AnswerSpan(
                passage_id=passage.id,
                char_start=start,
                char_end=end,
                text=sentence,
                confidence=0.0,
                parent_sentence=sentence,
            )
            verdict = Label.POSITIVE if within_ten_percent(quantity.value, gold) else Label.NEGATIVE
            labels.append(SpanLabel(span=span, quantity=quantity, label=verdict))
    return labels


def filter_measurement_queries(
    records: Sequence[QueryRecord], units: frozenset[str] | None = None
) -> list[QueryRecord]:
    """Drop queries whose text contains a measurement term ("how many km ...")."""
    if units is None:
        units = default_measurement_units()
    return [r for r in records if not (token_set(r.query) & units)]


def split_records(
    records: Sequence[QueryRecord], train_fraction: float, seed: int
) -> tuple[list[QueryRecord], list[QueryRecord]]:
    """Seeded random train/test split."""
    if not 0.0 <= train_fraction <= 1.0:
        raise ValueError("train_fraction must be in [0, 1]")
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    cut = round(len(shuffled) * train_fraction)
    return shuffled[:cut], shuffled[cut:]
