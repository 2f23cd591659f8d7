"""Model backends.

``StubBackend`` is rule-based and bit-deterministic: feature-hashed
character trigrams for embeddings, lexical coverage for entailment,
sentence heuristics for spans, capitalized runs for NER. It exists so the
protocol can be served, tested and integrated against without any weights.

``TransformersBackend`` loads pretrained checkpoints lazily (one model per
capability, shared read-only, evaluation mode). A capability whose model
cannot be loaded stays unavailable; requests against it get a 503 from the
app layer.
"""

from __future__ import annotations

import hashlib
import math
import re
import threading
from dataclasses import dataclass

from .config import ServiceConfig

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['’\-][A-Za-z0-9]+)*")
_SENT_RE = re.compile(r"[^.!?\n]+[.!?]?")

EMBED_DIM = 64


class CapabilityUnavailable(RuntimeError):
    def __init__(self, capability: str, reason: str):
        self.capability = capability
        super().__init__(f"capability {capability!r} unavailable: {reason}")


@dataclass
class SpanOut:
    passage_id: str
    start: int
    end: int
    text: str
    confidence: float


@dataclass
class MentionOut:
    text: str
    type: str
    start: int
    end: int


def _clamp01(x: float) -> float:
    if math.isnan(x):
        return 0.0
    return min(1.0, max(0.0, float(x)))


def _sentences(text: str) -> list[tuple[int, int]]:
    spans = []
    for m in _SENT_RE.finditer(text):
        a, b = m.start(), m.end()
        while a < b and text[a].isspace():
            a += 1
        while b > a and text[b - 1].isspace():
            b -= 1
        if a < b:
            spans.append((a, b))
    return spans


class StubBackend:
    """Deterministic stand-in used for tests and model-free deployments."""

    name = "stub"

    def __init__(self, config: ServiceConfig):
        self.config = config

    def available(self, capability: str) -> bool:
        return True

    def load_error(self, capability: str) -> str | None:
        return None

    # -- spans ----------------------------------------------------------

    def spans(self, query: str, passages: list[dict], mode: str) -> list[SpanOut]:
        query_tokens = {t.casefold() for t in _WORD_RE.findall(query)}
        out: list[SpanOut] = []
        for passage in passages:
            text = passage["text"]
            for a, b in _sentences(text):
                sentence = text[a:b]
                if mode == "count":
                    if not any(ch.isdigit() for ch in sentence):
                        continue
                elif not any(t[0].isupper() for t in _WORD_RE.findall(sentence)):
                    continue
                tokens = {t.casefold() for t in _WORD_RE.findall(sentence)}
                if not query_tokens:
                    continue
                confidence = _clamp01(len(tokens & query_tokens) / len(query_tokens))
                if confidence == 0.0:
                    continue
                out.append(
                    SpanOut(
                        passage_id=passage["id"],
                        start=a,
                        end=b,
                        text=sentence,
                        confidence=confidence,
                    )
                )
        return out

    # -- embeddings -------------------------------------------------------

    def embed(self, texts: list[str]) -> list[list[float]]:
        return [self._embed_one(t) for t in texts]

    def _embed_one(self, text: str) -> list[float]:
        vec = [0.0] * EMBED_DIM
        norm_text = re.sub(r"\s+", " ", text.casefold().strip())
        grams = (
            [norm_text[i:i + 3] for i in range(len(norm_text) - 2)]
            if len(norm_text) >= 3
            else ([norm_text] if norm_text else [])
        )
        if not grams:
            vec[0] = 1.0  # fixed unit vector for empty input, still normalizable
            return vec
        for gram in grams:
            digest = hashlib.sha256(gram.encode("utf-8")).digest()
            index = int.from_bytes(digest[:4], "big") % EMBED_DIM
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[index] += sign
        norm = math.sqrt(sum(x * x for x in vec))
        if norm == 0.0:
            vec[0] = 1.0
            return vec
        return [x / norm for x in vec]

    # -- NER -----------------------------------------------------------------

    def ner(self, texts: list[str]) -> list[list[MentionOut]]:
        return [self._ner_one(t) for t in texts]

    def _ner_one(self, text: str) -> list[MentionOut]:
        mentions = []
        run: list[tuple[int, int]] = []
        last_end = None
        for m in _WORD_RE.finditer(text):
            tok = m.group(0)
            adjacent = last_end is not None and text[last_end:m.start()].strip() == ""
            if tok[0].isupper():
                if run and not adjacent:
                    mentions.append(run)
                    run = []
                run.append((m.start(), m.end()))
            elif run:
                mentions.append(run)
                run = []
            last_end = m.end()
        if run:
            mentions.append(run)
        return [
            MentionOut(text=text[r[0][0]:r[-1][1]], type="ENT", start=r[0][0], end=r[-1][1])
            for r in mentions
        ]

    # -- entailment --------------------------------------------------------------

    def entail(self, pairs: list[dict]) -> list[float]:
        return [self._entail_one(p["premise"], p["hypothesis"]) for p in pairs]

    def _entail_one(self, premise: str, hypothesis: str) -> float:
        hyp = {t.casefold() for t in _WORD_RE.findall(hypothesis)}
        if not hyp:
            return 0.0
        prem = {t.casefold() for t in _WORD_RE.findall(premise)}
        return _clamp01(len(hyp & prem) / len(hyp))


class TransformersBackend:
    """Pretrained checkpoints behind the same interface, loaded lazily."""

    name = "transformers"

    def __init__(self, config: ServiceConfig):
        self.config = config
        self._lock = threading.Lock()
        self._pipelines: dict[str, object] = {}
        self._errors: dict[str, str] = {}

    def available(self, capability: str) -> bool:
        return self._get(capability) is not None

    def load_error(self, capability: str) -> str | None:
        self._get(capability)
        return self._errors.get(capability)

    def _get(self, capability: str):
        with self._lock:
            if capability in self._pipelines:
                return self._pipelines[capability]
            if capability in self._errors:
                return None
            try:
                self._pipelines[capability] = self._load(capability)
            except Exception as exc:  # model missing, no network, bad revision
                self._errors[capability] = str(exc)
                return None
            return self._pipelines[capability]

    def _load(self, capability: str):
        from transformers import pipeline  # imported lazily; heavy

        pin = self.config.models[capability]
        kwargs = {"model": pin.model_id, "revision": pin.revision, "device": -1}
        if capability == "span":
            return pipeline("question-answering", **kwargs)
        if capability == "embed":
            return pipeline("feature-extraction", **kwargs)
        if capability == "ner":
            return pipeline("token-classification", aggregation_strategy="simple", **kwargs)
        return pipeline("text-classification", top_k=None, **kwargs)

    def _require(self, capability: str):
        impl = self._get(capability)
        if impl is None:
            raise CapabilityUnavailable(capability, self._errors[capability])
        return impl

    def spans(self, query: str, passages: list[dict], mode: str) -> list[SpanOut]:
        qa = self._require("span")
        prefix = "which" if mode == "instance" else "how many"
        out = []
        for passage in passages:
            if not passage["text"].strip():
                continue
            result = qa(question=f"{prefix}: {query}", context=passage["text"])
            if not result.get("answer"):
                continue
            out.append(
                SpanOut(
                    passage_id=passage["id"],
                    start=int(result["start"]),
                    end=int(result["end"]),
                    text=result["answer"],
                    confidence=_clamp01(result.get("score", 0.0)),
                )
            )
        return out

    def embed(self, texts: list[str]) -> list[list[float]]:
        extractor = self._require("embed")
        vectors = []
        for text in texts:
            features = extractor(text if text else " ")
            token_vectors = features[0]
            dim = len(token_vectors[0])
            mean = [
                sum(tv[i] for tv in token_vectors) / len(token_vectors) for i in range(dim)
            ]
            vectors.append([float(x) for x in mean])
        return vectors

    def ner(self, texts: list[str]) -> list[list[MentionOut]]:
        tagger = self._require("ner")
        out = []
        for text in texts:
            mentions = []
            if text.strip():
                for ent in tagger(text):
                    mentions.append(
                        MentionOut(
                            text=ent["word"],
                            type=ent.get("entity_group", ""),
                            start=int(ent["start"]),
                            end=int(ent["end"]),
                        )
                    )
            out.append(mentions)
        return out

    def entail(self, pairs: list[dict]) -> list[float]:
        classifier = self._require("nli")
        probs = []
        for pair in pairs:
            scores = classifier({"text": pair["premise"], "text_pair": pair["hypothesis"]})
            entail_score = 0.0
            for item in scores if isinstance(scores, list) else [scores]:
                if str(item.get("label", "")).upper().startswith("ENTAIL"):
                    entail_score = item.get("score", 0.0)
            probs.append(_clamp01(entail_score))
        return probs


def make_backend(config: ServiceConfig):
    if config.backend == "transformers":
        return TransformersBackend(config)
    return StubBackend(config)
