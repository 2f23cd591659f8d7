"""Parsing of count expressions out of free text.

Turns surface forms like "approximately 180", "85 million", "five children"
or "150 to 180 songs" into a normalized :class:`Quantity`, and splits an
answer span into the count plus the noun phrase it modifies
(:class:`CountSpan`). Numbers immediately followed by a measurement unit
("50 km", "30%") are treated as measurements, not counts.

All functions are pure; absence of a quantity is returned as ``None``,
never raised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from .textutil import (
    default_measurement_units,
    noun_phrase_after,
    noun_phrase_before,
    word_token_spans,
)

if TYPE_CHECKING:
    from .providers.base import AnswerSpan


class Modifier(str, Enum):
    EXACT = "exact"
    APPROXIMATE = "approximate"
    AT_LEAST = "at_least"
    AT_MOST = "at_most"
    RANGE = "range"


@dataclass(frozen=True)
class Quantity:
    """A normalized, dimensionless count with an uncertainty modifier."""

    value: float
    modifier: Modifier = Modifier.EXACT
    range_bounds: tuple[float, float] | None = None
    surface: str = ""

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"count value must be nonnegative, got {self.value}")
        if (self.modifier == Modifier.RANGE) != (self.range_bounds is not None):
            raise ValueError("range_bounds must be present exactly when modifier is 'range'")
        if self.range_bounds is not None:
            lo, hi = self.range_bounds
            if lo > hi:
                raise ValueError(f"range bounds out of order: {lo} > {hi}")
            if self.value != _midpoint(lo, hi):
                raise ValueError("range value must be the midpoint of its bounds")

    @classmethod
    def from_range(cls, lo: float, hi: float, surface: str = "") -> "Quantity":
        return cls(_midpoint(lo, hi), Modifier.RANGE, (lo, hi), surface)

    def to_dict(self) -> dict:
        out = {"value": self.value, "modifier": self.modifier.value, "surface": self.surface}
        if self.range_bounds is not None:
            out["range_bounds"] = list(self.range_bounds)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Quantity":
        bounds = data.get("range_bounds")
        return cls(
            value=data["value"],
            modifier=Modifier(data.get("modifier", "exact")),
            range_bounds=tuple(bounds) if bounds is not None else None,
            surface=data.get("surface", ""),
        )


@dataclass(frozen=True)
class CountSpan:
    """A count plus the noun phrase it modifies, cut out of one answer span."""

    quantity: Quantity
    modifier_phrase: str
    source_span: "AnswerSpan | None" = field(default=None, compare=False)

    @property
    def text(self) -> str:
        """Canonical phrase form, e.g. ``"estimated 700 languages"``."""
        return f"{self.quantity.surface} {self.modifier_phrase}".strip()


def _midpoint(lo: float, hi: float):
    total = lo + hi
    half = total / 2
    return _as_count(half)


def _as_count(x: float):
    """Collapse integral floats to int so that arithmetic stays exact."""
    if isinstance(x, int):
        return x
    return int(x) if x == int(x) else x


# --- number grammars ------------------------------------------------------

_UNITS_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4,
    "five": 5, "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS_WORDS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS_WORDS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_SCALE_WORDS = {"hundred": 100, "thousand": 1_000, "million": 10**6, "billion": 10**9}

_ALL_NUMBER_WORDS = sorted(
    set(_UNITS_WORDS) | set(_TEENS_WORDS) | set(_TENS_WORDS) | set(_SCALE_WORDS),
    key=len,
    reverse=True,
)
_NUM_WORD = r"(?:" + "|".join(_ALL_NUMBER_WORDS) + r")"
_WORD_RUN_RE = re.compile(
    rf"\b{_NUM_WORD}(?:(?:[\s\-]|\s+and\s+){_NUM_WORD})*\b", re.IGNORECASE
)

_DIGIT_NUM_RE = re.compile(r"(?<![\w.,])(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?!\w)")

_SCALE_SUFFIX_RE = re.compile(
    r"[\s\-]+(hundred|thousand|million|billion)s?\b", re.IGNORECASE
)

# "A to B" for any number form; dash ranges only between digit forms.
_RANGE_TO_RE = re.compile(r"\s+to\s+", re.IGNORECASE)
_RANGE_DASH_RE = re.compile(r"\s*[\-–—]\s*")

_APPROX_WORDS = {
    "approximately", "about", "around", "roughly", "almost",
    "nearly", "estimated", "some", "circa",
}
_AT_LEAST_WORDS = {"over"}
_AT_MOST_WORDS = {"under"}
_PAIR_HEDGES = {
    ("more", "than"): Modifier.AT_LEAST,
    ("greater", "than"): Modifier.AT_LEAST,
    ("at", "least"): Modifier.AT_LEAST,
    ("fewer", "than"): Modifier.AT_MOST,
    ("less", "than"): Modifier.AT_MOST,
    ("up", "to"): Modifier.AT_MOST,
    ("at", "most"): Modifier.AT_MOST,
}

_CURRENCY_CHARS = "$€£¥₹"


def _eval_word_run(run: str) -> int:
    tokens = re.split(r"[\s\-]+", run.casefold())
    total = 0
    current = 0
    seen_numeral = False
    for tok in tokens:
        if tok == "and":
            continue
        if tok in _UNITS_WORDS:
            current += _UNITS_WORDS[tok]
            seen_numeral = True
        elif tok in _TEENS_WORDS:
            current += _TEENS_WORDS[tok]
            seen_numeral = True
        elif tok in _TENS_WORDS:
            current += _TENS_WORDS[tok]
            seen_numeral = True
        elif tok == "hundred":
            current = (current if seen_numeral else 1) * 100
            seen_numeral = True
        else:
            total += (current if seen_numeral else 1) * _SCALE_WORDS[tok]
            current = 0
            seen_numeral = True
    return total + current


@dataclass(frozen=True)
class _NumberMatch:
    value: float
    start: int
    end: int
    is_digit: bool
    scale_only: bool = False


def _digit_value(token: str) -> float:
    plain = token.replace(",", "")
    return float(plain) if "." in plain else int(plain)


def _next_number(text: str, pos: int) -> _NumberMatch | None:
    """Earliest digit number or word-number run at or after ``pos``."""
    dm = _DIGIT_NUM_RE.search(text, pos)
    wm = _WORD_RUN_RE.search(text, pos)
    if dm is None and wm is None:
        return None
    if wm is None or (dm is not None and dm.start() <= wm.start()):
        return _NumberMatch(_digit_value(dm.group(0)), dm.start(), dm.end(), True)
    value = _eval_word_run(wm.group(0))
    tokens = re.split(r"[\s\-]+", wm.group(0).casefold())
    scale_only = all(t in _SCALE_WORDS or t == "and" for t in tokens)
    return _NumberMatch(_as_count(value), wm.start(), wm.end(), False, scale_only)


def _consume_scales(text: str, value: float, end: int) -> tuple[float, int]:
    while True:
        m = _SCALE_SUFFIX_RE.match(text, end)
        if m is None:
            return _as_count(value), end
        value = value * _SCALE_WORDS[m.group(1).casefold()]
        end = m.end()


def _preceded_by_article(text: str, start: int) -> bool:
    before = text[:start].rstrip()
    return bool(re.search(r"\b(?:a|an)$", before, re.IGNORECASE))


def _hedge_before(text: str, start: int) -> tuple[Modifier, int] | None:
    """Hedge phrase ending right before ``start``; returns (modifier, hedge_start)."""
    prefix = text[:start]
    stripped = prefix.rstrip()
    if stripped.endswith("~"):
        return Modifier.APPROXIMATE, len(stripped) - 1
    tokens = [(t.casefold(), a, b) for (t, a, b) in word_token_spans(stripped)]
    if not tokens:
        return None
    last, last_a, last_b = tokens[-1]
    if last_b != len(stripped):
        return None
    if len(tokens) >= 2:
        prev, prev_a, prev_b = tokens[-2]
        if stripped[prev_b:last_a].strip() == "" and (prev, last) in _PAIR_HEDGES:
            return _PAIR_HEDGES[(prev, last)], prev_a
    if last in _APPROX_WORDS:
        return Modifier.APPROXIMATE, last_a
    if last in _AT_LEAST_WORDS:
        return Modifier.AT_LEAST, last_a
    if last in _AT_MOST_WORDS:
        return Modifier.AT_MOST, last_a
    return None


def _unit_after(text: str, end: int, units: frozenset[str]) -> bool:
    m = re.match(r"\s*(%|[A-Za-z]+)(?![\w])", text[end:])
    if m is None:
        return False
    return m.group(1).casefold() in units


def _currency_before(text: str, start: int) -> bool:
    before = text[:start].rstrip()
    return bool(before) and before[-1] in _CURRENCY_CHARS


def _match_quantity(text: str, units: frozenset[str]) -> tuple[Quantity, int, int] | None:
    pos = 0
    while True:
        num = _next_number(text, pos)
        if num is None:
            return None
        if num.scale_only and not _preceded_by_article(text, num.start):
            pos = num.end
            continue
        break

    value, end = num.value, num.end
    if num.is_digit:
        value, end = _consume_scales(text, value, end)

    # Range extension: "150 to 180" for any form, "150-180" for digits.
    bounds = None
    m = _RANGE_TO_RE.match(text, end)
    if m is None and num.is_digit:
        m = _RANGE_DASH_RE.match(text, end)
        if m is not None and not _DIGIT_NUM_RE.match(text, m.end()):
            m = None
    if m is not None:
        second = _next_number(text, m.end())
        if second is not None and second.start == m.end() and not second.scale_only:
            hi, hi_end = second.value, second.end
            if second.is_digit:
                hi, hi_end = _consume_scales(text, hi, hi_end)
            if hi >= value:
                bounds = (value, hi)
                end = hi_end

    if _unit_after(text, end, units) or _currency_before(text, num.start):
        return None

    if bounds is not None:
        surface = text[num.start:end]
        return Quantity.from_range(bounds[0], bounds[1], surface), num.start, end

    start = num.start
    modifier = Modifier.EXACT
    hedge = _hedge_before(text, num.start)
    if hedge is not None:
        modifier, start = hedge
    surface = text[start:end]
    return Quantity(_as_count(value), modifier, None, surface), start, end


def parse_quantity(text: str, units: frozenset[str] | None = None) -> Quantity | None:
    """First count-like quantity in ``text``, or ``None``.

    The first number found wins; if it is immediately followed by a
    measurement-unit token (or preceded by a currency symbol) the text is
    treated as holding no count. Later numbers stay reachable by calling
    again on the remaining suffix.
    """
    if units is None:
        units = default_measurement_units()
    found = _match_quantity(text, units)
    return found[0] if found else None


def split_cnp(span_text: str, units: frozenset[str] | None = None) -> CountSpan | None:
    """Split an answer span into its count and the noun phrase it modifies.

    The phrase is read greedily after the count (preferred) or before it,
    with leading articles and hedge words stripped; empty when the span is
    a bare number.
    """
    if units is None:
        units = default_measurement_units()
    found = _match_quantity(span_text, units)
    if found is None:
        return None
    quantity, start, end = found
    phrase = noun_phrase_after(span_text, end)
    if not phrase:
        phrase = noun_phrase_before(span_text, start)
    return CountSpan(quantity=quantity, modifier_phrase=phrase)
