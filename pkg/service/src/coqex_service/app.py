"""The HTTP app: four batched model endpoints plus health.

Responses align 1:1 with request order; scores are clamped into [0, 1]
before leaving the process. Schema violations get a 400-class response
(FastAPI validation), capability outages a 503.
"""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .backends import CapabilityUnavailable
from .config import ServiceConfig, from_env, stub_config
from .registry import ModelRegistry


class PassageIn(BaseModel):
    id: str
    text: str


class SpansRequest(BaseModel):
    query: str
    passages: list[PassageIn]
    mode: Literal["count", "instance"]


class SpanOutModel(BaseModel):
    passage_id: str
    start: int
    end: int
    text: str
    confidence: float


class SpansResponse(BaseModel):
    spans: list[SpanOutModel]


class EmbedRequest(BaseModel):
    texts: list[str]


class EmbedResponse(BaseModel):
    vectors: list[list[float]]


class NerRequest(BaseModel):
    texts: list[str]


class MentionOutModel(BaseModel):
    text: str
    type: str
    start: int
    end: int


class NerResponse(BaseModel):
    mentions: list[list[MentionOutModel]]


class PairIn(BaseModel):
    premise: str
    hypothesis: str = Field(min_length=1)


class EntailRequest(BaseModel):
    pairs: list[PairIn]


class EntailResponse(BaseModel):
    probabilities: list[float]


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, float(x)))


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config if config is not None else from_env()
    registry = ModelRegistry(config)
    app = FastAPI(title="coqex-inference-service", version="0.1.0")
    app.state.registry = registry

    def check_batch(n: int):
        if n > config.max_batch:
            raise HTTPException(
                status_code=400,
                detail=f"batch of {n} exceeds max_batch={config.max_batch}",
            )

    def check_texts(texts):
        for text in texts:
            if len(text) > config.max_text_length:
                raise HTTPException(
                    status_code=400,
                    detail=f"text of {len(text)} chars exceeds "
                    f"max_text_length={config.max_text_length}",
                )

    def require(capability: str):
        try:
            return registry.require(capability)
        except CapabilityUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health():
        return registry.health()

    @app.post("/v1/spans", response_model=SpansResponse)
    def serve_spans(request: SpansRequest):
        check_batch(len(request.passages))
        check_texts([p.text for p in request.passages])
        backend = require("span")
        spans = backend.spans(
            request.query,
            [{"id": p.id, "text": p.text} for p in request.passages],
            request.mode,
        )
        return SpansResponse(
            spans=[
                SpanOutModel(
                    passage_id=s.passage_id,
                    start=s.start,
                    end=s.end,
                    text=s.text,
                    confidence=_clamp01(s.confidence),
                )
                for s in spans
            ]
        )

    @app.post("/v1/embed", response_model=EmbedResponse)
    def serve_embed(request: EmbedRequest):
        check_batch(len(request.texts))
        check_texts(request.texts)
        backend = require("embed")
        vectors = backend.embed(list(request.texts))
        if len(vectors) != len(request.texts):
            raise HTTPException(status_code=500, detail="backend misaligned embed batch")
        return EmbedResponse(vectors=vectors)

    @app.post("/v1/ner", response_model=NerResponse)
    def serve_ner(request: NerRequest):
        check_batch(len(request.texts))
        check_texts(request.texts)
        backend = require("ner")
        groups = backend.ner(list(request.texts))
        if len(groups) != len(request.texts):
            raise HTTPException(status_code=500, detail="backend misaligned ner batch")
        return NerResponse(
            mentions=[
                [
                    MentionOutModel(text=m.text, type=m.type, start=m.start, end=m.end)
                    for m in group
                ]
                for group in groups
            ]
        )

    @app.post("/v1/entail", response_model=EntailResponse)
    def serve_entail(request: EntailRequest):
        check_batch(len(request.pairs))
        check_texts([p.premise for p in request.pairs])
        check_texts([p.hypothesis for p in request.pairs])
        backend = require("nli")
        probs = backend.entail(
            [{"premise": p.premise, "hypothesis": p.hypothesis} for p in request.pairs]
        )
        if len(probs) != len(request.pairs):
            raise HTTPException(status_code=500, detail="backend misaligned entail batch")
        return EntailResponse(probabilities=[_clamp01(p) for p in probs])

    return app


def create_stub_app() -> FastAPI:
    """App wired to the deterministic stub backend (tests, local dev)."""
    return create_app(stub_config())
