"""Qualifying a predicted count with count-modified noun phrases.

One CNP is chosen to represent the predicted count (highest confidence
inside the relative tolerance band ``alpha``); every other CNP is then
classified relative to it as a synonym (similar phrase, count in band),
a subgroup (similar phrase, smaller count), or incomparable (unrelated
phrase, or a larger out-of-band count).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .consolidation import Prediction
from .quantity import Quantity

SimilarityFn = Callable[[str, str], float]


class Category(str, Enum):
    REPRESENTATIVE = "representative"
    SYNONYM = "synonym"
    SUBGROUP = "subgroup"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class CNP:
    """A count-modified noun phrase with the span model's confidence."""

    quantity: Quantity
    modifier_phrase: str
    confidence: float
    category: Category | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")

    @property
    def value(self) -> float:
        return self.quantity.value

    @property
    def text(self) -> str:
        """Display form, e.g. ``"estimated 700 languages"``."""
        return f"{self.quantity.surface} {self.modifier_phrase}".strip()

    def with_category(self, category: Category | None) -> "CNP":
        return dataclasses.replace(self, category=category)


@dataclass(frozen=True)
class ContextualizedAnswer:
    prediction: Prediction
    cnp_rep: CNP | None
    synonyms: tuple[CNP, ...]
    subgroups: tuple[CNP, ...]
    incomparables: tuple[CNP, ...]
    uncategorized: tuple[CNP, ...]
    alpha: float
    similarity_threshold: float


def _in_band(value: float, prediction_value: float, alpha: float) -> bool:
    return abs(value - prediction_value) <= alpha * prediction_value


def select_representative(
    cnps: Iterable[CNP], prediction: Prediction, alpha: float
) -> CNP | None:
    """Highest-confidence CNP whose count lies within ±alpha of the prediction.

    Ties go to the count closest to the prediction, then the smaller count,
    then the lexicographically smaller phrase. ``None`` when no CNP
    qualifies.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    qualifying = [c for c in cnps if _in_band(c.value, prediction.value, alpha)]
    if not qualifying:
        return None
    return min(
        qualifying,
        key=lambda c: (
            -c.confidence,
            abs(c.value - prediction.value),
            c.value,
            c.modifier_phrase,
            c.text,
        ),
    )


def classify(
    cnp: CNP,
    cnp_rep: CNP,
    prediction: Prediction,
    alpha: float,
    similarity: SimilarityFn,
    similarity_threshold: float = 0.0,
) -> Category:
    """Category of ``cnp`` relative to the representative CNP.

    Phrases less similar than the threshold are incomparable outright;
    related phrases are synonyms inside the count band, subgroups below it,
    and incomparable above it.
    """
    score = similarity(cnp.modifier_phrase, cnp_rep.modifier_phrase)
    if score < similarity_threshold:
        return Category.INCOMPARABLE
    if _in_band(cnp.value, prediction.value, alpha):
        return Category.SYNONYM
    if cnp.value < prediction.value:
        return Category.SUBGROUP
    return Category.INCOMPARABLE


def contextualize(
    cnps: Sequence[CNP],
    prediction: Prediction,
    alpha: float,
    similarity: SimilarityFn,
    similarity_threshold: float = 0.0,
) -> ContextualizedAnswer:
    """Select the representative CNP and classify all the others.

    Without a qualifying representative, classification is skipped and all
    CNPs are reported uncategorized rather than forcing a bad qualifier
    onto the answer.
    """
    rep = select_representative(cnps, prediction, alpha)
    if rep is None:
        return ContextualizedAnswer(
            prediction=prediction,
            cnp_rep=None,
            synonyms=(),
            subgroups=(),
            incomparables=(),
            uncategorized=tuple(c.with_category(None) for c in cnps),
            alpha=alpha,
            similarity_threshold=similarity_threshold,
        )
    buckets: dict[Category, list[CNP]] = {
        Category.SYNONYM: [],
        Category.SUBGROUP: [],
        Category.INCOMPARABLE: [],
    }
    rep_seen = False
    for cnp in cnps:
        if not rep_seen and cnp is rep:
            rep_seen = True
            continue
        category = classify(cnp, rep, prediction, alpha, similarity, similarity_threshold)
        buckets[category].append(cnp.with_category(category))
    return ContextualizedAnswer(
        prediction=prediction,
        cnp_rep=rep.with_category(Category.REPRESENTATIVE),
        synonyms=tuple(buckets[Category.SYNONYM]),
        subgroups=tuple(buckets[Category.SUBGROUP]),
        incomparables=tuple(buckets[Category.INCOMPARABLE]),
        uncategorized=(),
        alpha=alpha,
        similarity_threshold=similarity_threshold,
    )
