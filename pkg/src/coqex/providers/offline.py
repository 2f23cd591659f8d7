"""Deterministic offline provider.

Rule-based stand-ins for the learned capabilities, bit-stable across runs
and platforms. They exist so the whole pipeline runs hermetically: span
prediction scores sentences by query-token overlap, similarity is a
character-trigram cosine, NER takes capitalized token runs, and entailment
is lexical coverage of the hypothesis by the premise.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Sequence

from ..quantity import parse_quantity
from ..textutil import (
    content_tokens,
    default_measurement_units,
    default_stopwords,
    sentence_spans,
    word_token_spans,
)
from .base import AnswerSpan, Mention, PassageLike, Provider, SpanMode


class OfflineProvider(Provider):
    name = "offline"

    def __init__(self, stopwords=None, units=None):
        self.stopwords = default_stopwords() if stopwords is None else stopwords
        self.units = default_measurement_units() if units is None else units

    # -- span prediction ----------------------------------------------

    def predict_spans_many(
        self, query: str, passages: Sequence[PassageLike], mode: SpanMode = SpanMode.COUNT
    ) -> list[AnswerSpan]:
        mode = SpanMode(mode)
        query_terms = content_tokens(query, self.stopwords)
        spans: list[AnswerSpan] = []
        for passage in passages:
            for start, end in sentence_spans(passage.text):
                sentence = passage.text[start:end]
                if mode == SpanMode.COUNT:
                    if parse_quantity(sentence, self.units) is None:
                        continue
                elif not self._capitalized_mentions(sentence):
                    continue
                confidence = self._overlap(query_terms, sentence)
                if confidence <= 0.0:
                    continue  # a sentence sharing no query terms is no answer
                spans.append(
                    AnswerSpan(
                        passage_id=passage.id,
                        char_start=start,
                        char_end=end,
                        text=sentence,
                        confidence=confidence,
                        parent_sentence=sentence,
                    )
                )
        return spans

    def _overlap(self, query_terms: set[str], sentence: str) -> float:
        if not query_terms:
            return 0.0
        sentence_terms = {t.casefold() for t, _, _ in word_token_spans(sentence)}
        return len(query_terms & sentence_terms) / len(query_terms)

    # -- similarity -----------------------------------------------------

    def similarity(self, a: str, b: str) -> float:
        """Character-trigram cosine, rescaled from [0, 1] to [-1, 1]."""
        cos = _trigram_cosine(_normalize(a), _normalize(b))
        return max(-1.0, min(1.0, 2.0 * cos - 1.0))  # shave float noise at the edges

    # -- NER --------------------------------------------------------------

    def ner(self, text: str) -> list[Mention]:
        """Maximal runs of capitalized tokens, skipping sentence-initial stopwords."""
        mentions = []
        for start, end in sentence_spans(text):
            mentions.extend(self._capitalized_mentions(text[start:end], offset=start))
        return mentions

    def _capitalized_mentions(self, sentence: str, offset: int = 0) -> list[Mention]:
        toks = word_token_spans(sentence)
        runs: list[list[tuple[str, int, int]]] = []
        current: list[tuple[str, int, int]] = []
        for i, (tok, a, b) in enumerate(toks):
            initial_stopword = i == 0 and tok.casefold() in self.stopwords
            adjacent = not current or sentence[current[-1][2]:a].strip() == ""
            if tok[0].isupper() and not initial_stopword and adjacent:
                current.append((tok, a, b))
            else:
                if current:
                    runs.append(current)
                current = [(tok, a, b)] if tok[0].isupper() and not initial_stopword else []
        if current:
            runs.append(current)
        return [
            Mention(
                text=sentence[run[0][1]:run[-1][2]],
                type="ENT",
                start=offset + run[0][1],
                end=offset + run[-1][2],
            )
            for run in runs
        ]

    # -- entailment ------------------------------------------------------

    def entail(self, premise: str, hypothesis: str) -> float:
        """Fraction of hypothesis content tokens present in the premise."""
        if not hypothesis.strip():
            raise ValueError("hypothesis must be nonempty")
        terms = content_tokens(hypothesis, self.stopwords)
        if not terms:
            return 1.0  # nothing left to verify
        premise_terms = {t.casefold() for t, _, _ in word_token_spans(premise)}
        return len(terms & premise_terms) / len(terms)


_WS_RE = re.compile(r"\s+")


def _normalize(text: str) -> str:
    return _WS_RE.sub(" ", text.casefold().strip())


def _trigram_cosine(a: str, b: str) -> float:
    fa, fb = _trigrams(a), _trigrams(b)
    if not fa and not fb:
        return 1.0
    if not fa or not fb:
        return 0.0
    dot = sum(n * fb[g] for g, n in fa.items() if g in fb)
    if dot == 0:
        return 0.0
    return dot / (_norm(fa) * _norm(fb))


def _trigrams(text: str) -> Counter:
    if not text:
        return Counter()
    if len(text) < 3:
        return Counter([text])
    return Counter(text[i:i + 3] for i in range(len(text) - 2))


def _norm(counts: Counter) -> float:
    return math.sqrt(sum(n * n for n in counts.values()))
