"""Provider boundary: types and the interface every provider implements.

A provider bundles the four learned capabilities the pipeline depends on
(answer-span prediction, text similarity, NER, entailment). Implementations
are the deterministic offline fallback, the remote client speaking the
inference-service protocol, and wrappers (cache, degrade).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Protocol, Sequence, runtime_checkable

logger = logging.getLogger(__name__)


class ProviderError(Exception):
    """A provider could not produce a result (transport, protocol, remote failure)."""


class SpanMode(str, Enum):
    COUNT = "count"
    INSTANCE = "instance"


@runtime_checkable
class PassageLike(Protocol):
    id: str
    text: str


@dataclass(frozen=True)
class AnswerSpan:
    """A contiguous passage substring proposed as an answer."""

    passage_id: str
    char_start: int
    char_end: int
    text: str
    confidence: float
    parent_sentence: str

    def __post_init__(self):
        if not 0 <= self.char_start < self.char_end:
            raise ValueError(f"bad span offsets [{self.char_start}, {self.char_end})")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"span confidence must be in [0, 1], got {self.confidence}")
        if self.text not in self.parent_sentence:
            raise ValueError("span text must lie within its parent sentence")

    @classmethod
    def from_passage(
        cls,
        passage: PassageLike,
        char_start: int,
        char_end: int,
        confidence: float,
        parent_sentence: str | None = None,
    ) -> "AnswerSpan":
        if char_end > len(passage.text):
            raise ValueError("span extends past the end of the passage")
        text = passage.text[char_start:char_end]
        return cls(
            passage_id=passage.id,
            char_start=char_start,
            char_end=char_end,
            text=text,
            confidence=confidence,
            parent_sentence=parent_sentence if parent_sentence is not None else text,
        )

    def to_dict(self) -> dict:
        return {
            "passage_id": self.passage_id,
            "char_start": self.char_start,
            "char_end": self.char_end,
            "text": self.text,
            "confidence": self.confidence,
        }


class Mention(NamedTuple):
    """An entity mention with offsets into the text it was found in."""

    text: str
    type: str
    start: int
    end: int


class ProviderMode(str, Enum):
    OFFLINE = "offline"
    REMOTE = "remote"


@dataclass(frozen=True)
class ProviderConfig:
    mode: ProviderMode = ProviderMode.OFFLINE
    endpoint: str | None = None
    timeout: float = 30.0
    max_in_flight: int = 4

    def __post_init__(self):
        if (self.mode == ProviderMode.REMOTE) != (self.endpoint is not None):
            raise ValueError("endpoint must be set exactly when mode is 'remote'")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be positive")


class Provider:
    """Interface of the learned capabilities; subclasses implement each."""

    name = "abstract"

    def predict_spans(
        self, query: str, passage: PassageLike, mode: SpanMode = SpanMode.COUNT
    ) -> list[AnswerSpan]:
        return self.predict_spans_many(query, [passage], mode)

    def predict_spans_many(
        self, query: str, passages: Sequence[PassageLike], mode: SpanMode = SpanMode.COUNT
    ) -> list[AnswerSpan]:
        raise NotImplementedError

    def similarity(self, a: str, b: str) -> float:
        raise NotImplementedError

    def ner(self, text: str) -> list[Mention]:
        raise NotImplementedError

    def entail(self, premise: str, hypothesis: str) -> float:
        raise NotImplementedError


def clamp(x: float, lo: float, hi: float, what: str = "value") -> float:
    """Clamp out-of-range provider outputs; logged, never propagated raw."""
    if x < lo or x > hi:
        logger.warning("%s %r outside [%s, %s]; clamped", what, x, lo, hi)
        return min(hi, max(lo, x))
    return float(x)
