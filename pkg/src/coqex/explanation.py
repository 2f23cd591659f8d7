"""Grounding a predicted count in ranked instance entities.

The count query is rewritten into a "which" query, entity mentions are
pulled out of the resulting answer spans, merged across passages by a
normalized key, and ranked by one of four strategies (single best passage,
mention frequency, summed span confidence, or entailment-based type
compatibility).
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .providers.base import AnswerSpan, Mention
from .textutil import noun_phrase_after, normalize_mention_key

NerFn = Callable[[str], "list[Mention]"]
EntailFn = Callable[[str, str], float]

_HOW_MANY_RE = re.compile(r"how\s+many", re.IGNORECASE)
_WHICH_START_RE = re.compile(r"^\s*which\b", re.IGNORECASE)


class RankingStrategy(str, Enum):
    NO_CONSOLIDATION = "no_consolidation"
    CONTEXT_FREQUENCY = "context_frequency"
    SUMMED_CONFIDENCE = "summed_confidence"
    TYPE_COMPATIBILITY = "type_compatibility"


class UnusableStrategyError(ValueError):
    """The chosen ranking strategy cannot be applied to this query."""


@dataclass(frozen=True)
class Occurrence:
    """One sighting of an instance mention inside an answer span."""

    span: AnswerSpan
    confidence: float
    sentence: str
    mention_offset: int  # offset of the mention within the span text

    @property
    def passage_position(self) -> int:
        return self.span.char_start + self.mention_offset


@dataclass(frozen=True)
class InstanceCandidate:
    """An entity mention aggregated across answer spans."""

    surface: str
    key: str
    occurrences: tuple[Occurrence, ...]
    type_score: float | None = None

    def __post_init__(self):
        if not self.key:
            raise ValueError("instance key must be nonempty")
        if not self.occurrences:
            raise ValueError("instance must have at least one occurrence")

    @property
    def frequency(self) -> int:
        return len(self.occurrences)

    @property
    def summed_confidence(self) -> float:
        return sum(o.confidence for o in self.occurrences)


@dataclass(frozen=True)
class RankedInstances:
    strategy: RankingStrategy
    items: tuple[InstanceCandidate, ...]


def rewrite_query(query: str) -> str:
    """Turn a count query into the matching "which" query.

    The first "how many" (any case) becomes "which"; queries without it get
    "which" prepended unless they already start with it. Idempotent.
    """
    if _WHICH_START_RE.match(query):
        return query
    m = _HOW_MANY_RE.search(query)
    if m is not None:
        replacement = "Which" if m.group(0).split()[0] == "How" else "which"
        return query[:m.start()] + replacement + query[m.end():]
    return f"which {query}"


def answer_type(query: str) -> str:
    """The noun phrase a count query asks to enumerate, e.g. "languages".

    Read greedily after "how many"; empty when the query has no count
    intent marker.
    """
    m = _HOW_MANY_RE.search(query)
    if m is None:
        return ""
    return noun_phrase_after(query, m.end())


def extract_instances(spans: Sequence[AnswerSpan], ner: NerFn) -> list[InstanceCandidate]:
    """Entity mentions from all spans, merged by normalized key.

    The longest observed surface form wins; candidates come back in order
    of first occurrence.
    """
    surfaces: dict[str, str] = {}
    occurrences: dict[str, list[Occurrence]] = {}
    order: list[str] = []
    for span in spans:
        for mention in ner(span.text):
            key = normalize_mention_key(mention.text)
            if not key:
                continue
            if key not in occurrences:
                occurrences[key] = []
                surfaces[key] = mention.text
                order.append(key)
            elif len(mention.text) > len(surfaces[key]):
                surfaces[key] = mention.text
            occurrences[key].append(
                Occurrence(
                    span=span,
                    confidence=span.confidence,
                    sentence=span.parent_sentence,
                    mention_offset=mention.start,
                )
            )
    return [
        InstanceCandidate(surface=surfaces[k], key=k, occurrences=tuple(occurrences[k]))
        for k in order
    ]


def rank(
    candidates: Iterable[InstanceCandidate],
    strategy: RankingStrategy | str,
    query_type: str = "",
    nli: EntailFn | None = None,
) -> RankedInstances:
    """Order instance candidates under the chosen strategy.

    Score ties break to the larger summed confidence, then the
    lexicographically smaller key.
    """
    strategy = RankingStrategy(strategy)
    cands = list(candidates)
    if strategy == RankingStrategy.NO_CONSOLIDATION:
        items = _single_passage_order(cands)
    elif strategy == RankingStrategy.TYPE_COMPATIBILITY:
        if not query_type:
            raise UnusableStrategyError(
                "type compatibility needs an answer type, and none could be "
                "read off this query"
            )
        if nli is None:
            raise ValueError("type compatibility requires an entailment provider")
        scored = [
            dataclasses.replace(c, type_score=_type_score(c, query_type, nli)) for c in cands
        ]
        items = _by_score(scored, lambda c: c.type_score)
    elif strategy == RankingStrategy.CONTEXT_FREQUENCY:
        items = _by_score(cands, lambda c: c.frequency)
    else:
        items = _by_score(cands, lambda c: c.summed_confidence)
    return RankedInstances(strategy=strategy, items=tuple(items))


def _type_score(candidate: InstanceCandidate, query_type: str, nli: EntailFn) -> float:
    hypothesis = f"{candidate.surface} is a {query_type}"
    return sum(nli(o.sentence, hypothesis) for o in candidate.occurrences)


def _by_score(cands: Sequence[InstanceCandidate], score) -> list[InstanceCandidate]:
    return sorted(cands, key=lambda c: (-score(c), -c.summed_confidence, c.key))


def _single_passage_order(cands: Sequence[InstanceCandidate]) -> list[InstanceCandidate]:
    """Candidates from the passage holding the most confident span, in passage order."""
    best: Occurrence | None = None
    for c in cands:
        for occ in c.occurrences:
            if best is None or _occ_order(occ) < _occ_order(best):
                best = occ
    if best is None:
        return []
    pid = best.span.passage_id
    kept = []
    for c in cands:
        local = [o for o in c.occurrences if o.span.passage_id == pid]
        if local:
            kept.append((min(o.passage_position for o in local), c.key, c))
    return [c for _, _, c in sorted(kept, key=lambda t: (t[0], t[1]))]


def _occ_order(occ: Occurrence) -> tuple:
    return (-occ.confidence, occ.span.passage_id, occ.span.char_start)
