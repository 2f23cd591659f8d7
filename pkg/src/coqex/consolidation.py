"""Consolidating noisy per-passage count candidates into one prediction.

Four strategies are supported: the single highest-confidence candidate,
the most frequent value, the lower median, and the confidence-weighted
median. Every strategy returns a value that occurs in the input, is
invariant under reordering of the candidates, and breaks ties
deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from .providers.base import AnswerSpan


class Strategy(str, Enum):
    MOST_CONFIDENT = "most_confident"
    MOST_FREQUENT = "most_frequent"
    MEDIAN = "median"
    WEIGHTED_MEDIAN = "weighted_median"


@dataclass(frozen=True)
class CountCandidate:
    """One count observation with the span model's confidence."""

    value: float
    confidence: float
    passage_id: str = ""
    passage_rank: int = 0
    span: "AnswerSpan | None" = field(default=None, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.value < 0:
            raise ValueError(f"count value must be nonnegative, got {self.value}")
        if self.passage_rank < 0:
            raise ValueError(f"passage rank must be nonnegative, got {self.passage_rank}")


@dataclass(frozen=True)
class Prediction:
    value: float
    strategy: Strategy
    support: tuple[CountCandidate, ...]


def consolidate(
    candidates: Iterable[CountCandidate], strategy: Strategy | str
) -> Prediction | None:
    """Reduce candidates to one predicted count; ``None`` on empty input."""
    strategy = Strategy(strategy)
    cands = _stable_order(candidates)
    if not cands:
        return None
    if strategy == Strategy.MOST_CONFIDENT:
        value, support = _most_confident(cands)
    elif strategy == Strategy.MOST_FREQUENT:
        value, support = _most_frequent(cands)
    elif strategy == Strategy.MEDIAN:
        value, support = _median(cands)
    else:
        value, support = _weighted_median(cands)
    return Prediction(value=value, strategy=strategy, support=tuple(support))


def _stable_order(candidates: Iterable[CountCandidate]) -> list[CountCandidate]:
    """Deterministic processing order regardless of input order."""
    return sorted(
        candidates,
        key=lambda c: (c.value, -c.confidence, c.passage_rank, _span_pos(c)),
    )


def _span_pos(c: CountCandidate) -> int:
    return c.span.char_start if c.span is not None else -1


def _most_confident(cands: Sequence[CountCandidate]):
    best = min(cands, key=lambda c: (-c.confidence, c.passage_rank, c.value, _span_pos(c)))
    return best.value, [best]


def _most_frequent(cands: Sequence[CountCandidate]):
    groups: dict[float, list[CountCandidate]] = {}
    for c in cands:
        groups.setdefault(c.value, []).append(c)
    # Most members; ties to the larger confidence mass, then the smaller value.
    best_value = min(
        groups,
        key=lambda v: (-len(groups[v]), -math.fsum(c.confidence for c in groups[v]), v),
    )
    return best_value, groups[best_value]


def _median(cands: Sequence[CountCandidate]):
    values = sorted(c.value for c in cands)
    value = values[(len(values) - 1) // 2]  # lower median: stays an observed value
    return value, [c for c in cands if c.value == value]


def _weighted_median(cands: Sequence[CountCandidate]):
    total = math.fsum(c.confidence for c in cands)
    if total == 0.0:
        return _median(cands)
    half = total / 2.0
    ordered_values = sorted({c.value for c in cands})
    acc: list[float] = []
    for v in ordered_values:
        acc.extend(c.confidence for c in cands if c.value == v)
        if math.fsum(acc) >= half:
            return v, [c for c in cands if c.value == v]
    # Unreachable: the full sum equals total >= half.
    raise AssertionError("weighted median scan exhausted input")
