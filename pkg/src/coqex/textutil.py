"""Shared text helpers: tokenization, sentence splitting, stopwords, key normalization.

Everything here is pure and deterministic; the offline providers and the
phrase heuristics are built on top of these primitives.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['’\-][A-Za-z0-9]+)*")

# Rough sentence boundary: terminal punctuation followed by whitespace.
# Newlines always terminate a sentence. Good enough for snippet text.
_SENT_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s)|[.!?]+$|\n+")

# Tokens that terminate a noun phrase when scanning outward from a count:
# determiners, prepositions, conjunctions, pronouns, auxiliaries/modals and
# a few connectives that in practice never sit inside a count-modified
# noun phrase.
NP_BOUNDARY = frozenset(
    """
    a an the and or but nor so yet if that which who whom whose when where
    while than as of in on at by for with from to into onto over under
    about above below after before between during through across against
    among around per within without via upon
    is are was were be been being am has have had do does did
    can could will would shall should may might must
    there here it its they them their he him his she her hers we us our
    you your i not no this these those each every some any all both
    more most other such only also even just still too very
    according including compared based
    """.split()
)

_ARTICLES = frozenset({"a", "an", "the"})


def word_token_spans(text: str) -> list[tuple[str, int, int]]:
    """Word tokens with their (start, end) character offsets."""
    return [(m.group(0), m.start(), m.end()) for m in WORD_RE.finditer(text)]


def word_tokens(text: str) -> list[str]:
    return WORD_RE.findall(text)


def token_set(text: str) -> set[str]:
    """Casefolded set of word tokens."""
    return {t.casefold() for t in WORD_RE.findall(text)}


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(_load_wordlist("stopwords.txt"))


@lru_cache(maxsize=None)
def default_measurement_units() -> frozenset[str]:
    return frozenset(_load_wordlist("measurement_units.txt"))


def _load_wordlist(name: str) -> list[str]:
    data = resources.files("coqex.data").joinpath(name).read_text(encoding="utf-8")
    return parse_wordlist(data)


def parse_wordlist(data: str) -> list[str]:
    """One token per line, '#' starts a comment, blanks ignored."""
    out = []
    for line in data.splitlines():
        token = line.split("#", 1)[0].strip()
        if token:
            out.append(token.casefold())
    return out


def load_wordlist_file(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(parse_wordlist(fh.read()))


def content_tokens(text: str, stopwords: frozenset[str] | None = None) -> set[str]:
    """Casefolded word tokens minus the stopword list."""
    stop = default_stopwords() if stopwords is None else stopwords
    return {t for t in token_set(text) if t not in stop}


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) offsets of sentences, trimmed of surrounding whitespace."""
    spans = []
    pos = 0
    for m in _SENT_BOUNDARY_RE.finditer(text):
        end = m.end()
        span = _trimmed_span(text, pos, end)
        if span is not None:
            spans.append(span)
        pos = end
    span = _trimmed_span(text, pos, len(text))
    if span is not None:
        spans.append(span)
    return spans


def _trimmed_span(text: str, start: int, end: int) -> tuple[int, int] | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return (start, end)


def sentences(text: str) -> list[str]:
    return [text[a:b] for a, b in sentence_spans(text)]


def _gap_is_plain(text: str, a: int, b: int) -> bool:
    """True when text[a:b] contains nothing but whitespace."""
    return text[a:b].strip() == ""


def _has_digit(token: str) -> bool:
    return any(c.isdigit() for c in token)


def noun_phrase_after(text: str, pos: int, max_tokens: int = 4) -> str:
    """Greedy noun-phrase read starting at ``pos``.

    Leading articles are skipped; collection stops at punctuation, at an
    NP-boundary token, at a digit-bearing token, or after ``max_tokens``.
    """
    toks = [(t, a, b) for (t, a, b) in word_token_spans(text) if a >= pos]
    out: list[str] = []
    prev_end = pos
    for tok, a, b in toks:
        if not _gap_is_plain(text, prev_end, a):
            break
        low = tok.casefold()
        if not out and low in _ARTICLES:
            prev_end = b
            continue
        if low in NP_BOUNDARY or _has_digit(tok):
            break
        out.append(tok)
        prev_end = b
        if len(out) >= max_tokens:
            break
    return " ".join(out)


def noun_phrase_before(text: str, pos: int, max_tokens: int = 4) -> str:
    """Like :func:`noun_phrase_after` but scanning right-to-left before ``pos``.

    The gap adjacent to ``pos`` may carry one separator (":", "-", ","),
    which is how a preceding noun phrase typically introduces its count.
    """
    toks = [(t, a, b) for (t, a, b) in word_token_spans(text) if b <= pos]
    out: list[str] = []
    prev_start = pos
    first = True
    for tok, a, b in reversed(toks):
        gap_ok = (
            _gap_is_plain(text, b, prev_start)
            or (first and text[b:prev_start].strip() in {":", "-", "–", "—", ","})
        )
        first = False
        if not gap_ok:
            break
        low = tok.casefold()
        if low in NP_BOUNDARY or low in _ARTICLES or _has_digit(tok):
            break
        out.append(tok)
        prev_start = a
        if len(out) >= max_tokens:
            break
    return " ".join(reversed(out))


_EDGE_PUNCT = "\"'‘’“”.,;:!?()[]{}"


def normalize_mention_key(text: str) -> str:
    """Canonical identity of an entity mention.

    Casefolds, trims edge punctuation, strips one leading article, and
    collapses internal whitespace. "The Beatles" and "beatles" share a key.
    """
    t = text.casefold().strip().strip(_EDGE_PUNCT).strip()
    t = re.sub(r"\s+", " ", t)
    for art in ("the ", "a ", "an "):
        if t.startswith(art):
            t = t[len(art):]
            break
    return t.strip()
