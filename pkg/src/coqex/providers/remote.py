"""HTTP client for the inference-service protocol.

Talks UTF-8 JSON to a sidecar exposing /v1/spans, /v1/embed, /v1/ner,
/v1/entail and /v1/health. All failures (transport, timeout, non-2xx,
malformed payloads) surface as :class:`ProviderError`; out-of-range scores
are clamped and logged, never propagated raw.
"""

from __future__ import annotations

import logging
import math
import threading
from typing import Sequence

import requests

from ..textutil import sentence_spans
from .base import (
    AnswerSpan,
    Mention,
    PassageLike,
    Provider,
    ProviderConfig,
    ProviderError,
    SpanMode,
    clamp,
)

logger = logging.getLogger(__name__)


class RemoteProvider(Provider):
    name = "remote"

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None):
        if config.endpoint is None:
            raise ValueError("remote provider requires an endpoint")
        self.config = config
        self.endpoint = config.endpoint.rstrip("/")
        self._session = session or requests.Session()
        self._gate = threading.Semaphore(config.max_in_flight)

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.endpoint}{path}"
        try:
            with self._gate:
                resp = self._session.post(url, json=payload, timeout=self.config.timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"request to {url} failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(f"{url} returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ProviderError(f"{url} returned invalid JSON") from exc

    def health(self) -> dict:
        url = f"{self.endpoint}/v1/health"
        try:
            resp = self._session.get(url, timeout=self.config.timeout)
        except requests.RequestException as exc:
            raise ProviderError(f"request to {url} failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(f"{url} returned HTTP {resp.status_code}")
        return resp.json()

    def predict_spans_many(
        self, query: str, passages: Sequence[PassageLike], mode: SpanMode = SpanMode.COUNT
    ) -> list[AnswerSpan]:
        payload = {
            "query": query,
            "passages": [{"id": p.id, "text": p.text} for p in passages],
            "mode": SpanMode(mode).value,
        }
        data = self._post("/v1/spans", payload)
        by_id = {p.id: p.text for p in passages}
        spans = []
        for item in _expect_list(data, "spans"):
            try:
                pid = item["passage_id"]
                start, end = int(item["start"]), int(item["end"])
                confidence = clamp(float(item["confidence"]), 0.0, 1.0, "span confidence")
            except (KeyError, TypeError, ValueError) as exc:
                raise ProviderError(f"malformed span item: {item!r}") from exc
            text = by_id.get(pid)
            if text is None or not 0 <= start < end <= len(text):
                raise ProviderError(f"span does not resolve to a passage: {item!r}")
            spans.append(
                AnswerSpan(
                    passage_id=pid,
                    char_start=start,
                    char_end=end,
                    text=text[start:end],
                    confidence=confidence,
                    parent_sentence=_enclosing_sentence(text, start, end),
                )
            )
        return spans

    def similarity(self, a: str, b: str) -> float:
        data = self._post("/v1/embed", {"texts": [a, b]})
        vectors = _expect_list(data, "vectors")
        if len(vectors) != 2:
            raise ProviderError(f"expected 2 vectors, got {len(vectors)}")
        return clamp(_cosine(vectors[0], vectors[1]), -1.0, 1.0, "similarity")

    def ner(self, text: str) -> list[Mention]:
        data = self._post("/v1/ner", {"texts": [text]})
        groups = _expect_list(data, "mentions")
        if len(groups) != 1:
            raise ProviderError(f"expected 1 mention group, got {len(groups)}")
        mentions = []
        for item in groups[0]:
            try:
                mentions.append(
                    Mention(item["text"], item.get("type", ""), int(item["start"]), int(item["end"]))
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ProviderError(f"malformed mention: {item!r}") from exc
        return mentions

    def entail(self, premise: str, hypothesis: str) -> float:
        if not hypothesis.strip():
            raise ValueError("hypothesis must be nonempty")
        data = self._post("/v1/entail", {"pairs": [{"premise": premise, "hypothesis": hypothesis}]})
        probs = _expect_list(data, "probabilities")
        if len(probs) != 1:
            raise ProviderError(f"expected 1 probability, got {len(probs)}")
        try:
            return clamp(float(probs[0]), 0.0, 1.0, "entailment probability")
        except (TypeError, ValueError) as exc:
            raise ProviderError(f"malformed probability: {probs[0]!r}") from exc


def _expect_list(data: dict, key: str) -> list:
    value = data.get(key)
    if not isinstance(value, list):
        raise ProviderError(f"response missing list field {key!r}")
    return value


def _cosine(u: Sequence[float], v: Sequence[float]) -> float:
    if len(u) != len(v):
        raise ProviderError(f"embedding lengths differ: {len(u)} vs {len(v)}")
    try:
        dot = sum(float(x) * float(y) for x, y in zip(u, v))
        nu = math.sqrt(sum(float(x) ** 2 for x in u))
        nv = math.sqrt(sum(float(y) ** 2 for y in v))
    except (TypeError, ValueError) as exc:
        raise ProviderError("non-numeric embedding component") from exc
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def _enclosing_sentence(passage_text: str, start: int, end: int) -> str:
    for a, b in sentence_spans(passage_text):
        if a <= start and end <= b:
            return passage_text[a:b]
    return passage_text[start:end]
