"""Provider wrappers: on-disk response cache and fallback degradation."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Sequence

from ..jsonio import canonical_dumps
from .base import AnswerSpan, Mention, PassageLike, Provider, ProviderError, SpanMode

logger = logging.getLogger(__name__)


class CachedProvider(Provider):
    """Caches provider outputs as one JSON file per request, keyed by content hash.

    The key covers the operation, the wrapped provider's endpoint label and
    the full request payload, so replaying a run against the same cache
    directory reproduces it without recomputation or network access.
    """

    def __init__(self, inner: Provider, cache_dir: str | Path, endpoint_label: str | None = None):
        self.inner = inner
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.endpoint_label = endpoint_label or getattr(
            inner, "endpoint", getattr(inner, "name", "provider")
        )

    @property
    def name(self):  # type: ignore[override]
        return f"cached({getattr(self.inner, 'name', 'provider')})"

    def _lookup(self, op: str, payload: dict):
        key_src = canonical_dumps(
            {"op": op, "endpoint": self.endpoint_label, "payload": payload}, indent=None
        )
        digest = hashlib.sha256(key_src.encode("utf-8")).hexdigest()[:24]
        return self.cache_dir / f"{op}-{digest}.json", key_src

    def _cached(self, op: str, payload: dict, compute):
        path, key_src = self._lookup(op, payload)
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)["result"]
        result = compute()
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_dumps({"key": json.loads(key_src), "result": result}))
            fh.write("\n")
        tmp.replace(path)
        return result

    def predict_spans_many(
        self, query: str, passages: Sequence[PassageLike], mode: SpanMode = SpanMode.COUNT
    ) -> list[AnswerSpan]:
        payload = {
            "query": query,
            "passages": [{"id": p.id, "text": p.text} for p in passages],
            "mode": SpanMode(mode).value,
        }

        def compute():
            spans = self.inner.predict_spans_many(query, passages, mode)
            return [
                {
                    "passage_id": s.passage_id,
                    "char_start": s.char_start,
                    "char_end": s.char_end,
                    "confidence": s.confidence,
                    "parent_sentence": s.parent_sentence,
                }
                for s in spans
            ]

        by_id = {p.id: p.text for p in passages}
        return [
            AnswerSpan(
                passage_id=item["passage_id"],
                char_start=item["char_start"],
                char_end=item["char_end"],
                text=by_id[item["passage_id"]][item["char_start"]:item["char_end"]],
                confidence=item["confidence"],
                parent_sentence=item["parent_sentence"],
            )
            for item in self._cached("spans", payload, compute)
        ]

    def similarity(self, a: str, b: str) -> float:
        return self._cached("similarity", {"a": a, "b": b}, lambda: self.inner.similarity(a, b))

    def ner(self, text: str) -> list[Mention]:
        raw = self._cached(
            "ner",
            {"text": text},
            lambda: [list(m) for m in self.inner.ner(text)],
        )
        return [Mention(*item) for item in raw]

    def entail(self, premise: str, hypothesis: str) -> float:
        return self._cached(
            "entail",
            {"premise": premise, "hypothesis": hypothesis},
            lambda: self.inner.entail(premise, hypothesis),
        )


class DegradingProvider(Provider):
    """Falls back to a second provider once the primary raises a ProviderError.

    After the first failure all traffic goes to the fallback: a dead remote
    endpoint should not be retried on every span of every passage.
    """

    def __init__(self, primary: Provider, fallback: Provider):
        self.primary = primary
        self.fallback = fallback
        self.degraded = False

    @property
    def name(self):  # type: ignore[override]
        return f"degrading({getattr(self.primary, 'name', '?')}->{getattr(self.fallback, 'name', '?')})"

    def _call(self, method: str, *args):
        if not self.degraded:
            try:
                return getattr(self.primary, method)(*args)
            except ProviderError as exc:
                logger.warning("primary provider failed (%s); degrading to fallback", exc)
                self.degraded = True
        return getattr(self.fallback, method)(*args)

    def predict_spans_many(self, query, passages, mode=SpanMode.COUNT):
        return self._call("predict_spans_many", query, passages, mode)

    def similarity(self, a, b):
        return self._call("similarity", a, b)

    def ner(self, text):
        return self._call("ner", text)

    def entail(self, premise, hypothesis):
        return self._call("entail", premise, hypothesis)
