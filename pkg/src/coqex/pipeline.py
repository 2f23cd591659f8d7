"""End-to-end wiring: spans → counts → consolidation → context → instances.

This is the code path shared by the CLI commands and the serve mode, so
the same inputs and configuration yield byte-identical JSON everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .consolidation import CountCandidate, Prediction, Strategy, consolidate
from .contextualization import CNP, ContextualizedAnswer, contextualize
from .corpus import Passage, QueryRecord
from .explanation import (
    RankedInstances,
    RankingStrategy,
    UnusableStrategyError,
    answer_type,
    extract_instances,
    rank,
    rewrite_query,
)
from .providers import (
    AnswerSpan,
    CachedProvider,
    DegradingProvider,
    OfflineProvider,
    Provider,
    ProviderConfig,
    ProviderMode,
    RemoteProvider,
    SpanMode,
)
from .quantity import split_cnp

DEFAULT_ALPHA = 0.30
DEFAULT_SIMILARITY_THRESHOLD = 0.0
DEFAULT_K = 10


@dataclass(frozen=True)
class PipelineConfig:
    """Defaults match the best-performing operating point."""

    strategy: Strategy = Strategy.WEIGHTED_MEDIAN
    alpha: float = DEFAULT_ALPHA
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    explanation_strategy: RankingStrategy = RankingStrategy.CONTEXT_FREQUENCY
    k: int = DEFAULT_K
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    allow_degrade: bool = False
    cache_dir: str | None = None


@dataclass(frozen=True)
class AnswerPackage:
    query: str
    prediction: Prediction | None
    contextualized: ContextualizedAnswer | None
    instances: RankedInstances | None
    evidence: tuple[dict, ...]  # per-passage snippets with char offsets


def build_provider(config: PipelineConfig) -> Provider:
    if config.provider.mode == ProviderMode.REMOTE:
        provider: Provider = RemoteProvider(config.provider)
        if config.allow_degrade:
            provider = DegradingProvider(provider, OfflineProvider())
    else:
        provider = OfflineProvider()
    if config.cache_dir:
        provider = CachedProvider(provider, config.cache_dir)
    return provider


def count_stage(
    query: str,
    passages: Sequence[Passage],
    provider: Provider,
    strategy: Strategy = Strategy.WEIGHTED_MEDIAN,
) -> tuple[Prediction | None, list[CNP], list[AnswerSpan]]:
    """Predict count spans, parse them, and consolidate into one count."""
    spans = provider.predict_spans_many(query, passages, SpanMode.COUNT)
    rank_of = {p.id: p.rank for p in passages}
    candidates = []
    cnps = []
    for span in spans:
        count_span = split_cnp(span.text)
        if count_span is None:
            continue
        candidates.append(
            CountCandidate(
                value=count_span.quantity.value,
                confidence=span.confidence,
                passage_id=span.passage_id,
                passage_rank=rank_of.get(span.passage_id, 0),
                span=span,
            )
        )
        cnps.append(
            CNP(
                quantity=count_span.quantity,
                modifier_phrase=count_span.modifier_phrase,
                confidence=span.confidence,
            )
        )
    return consolidate(candidates, strategy), cnps, spans


def context_stage(
    cnps: Sequence[CNP],
    prediction: Prediction | None,
    provider: Provider,
    alpha: float = DEFAULT_ALPHA,
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
) -> ContextualizedAnswer | None:
    if prediction is None:
        return None
    return contextualize(
        cnps, prediction, alpha, provider.similarity, similarity_threshold
    )


def explanation_stage(
    query: str,
    passages: Sequence[Passage],
    provider: Provider,
    strategy: RankingStrategy = RankingStrategy.CONTEXT_FREQUENCY,
    k: int = DEFAULT_K,
) -> RankedInstances:
    """Rank instance entities for the "which" form of the query."""
    which_query = rewrite_query(query)
    spans = provider.predict_spans_many(which_query, passages, SpanMode.INSTANCE)
    candidates = extract_instances(spans, provider.ner)
    ranked = rank(candidates, strategy, query_type=answer_type(query), nli=provider.entail)
    if k > 0:
        ranked = replace(ranked, items=ranked.items[:k])
    return ranked


def run_pipeline(
    query: str,
    passages: Sequence[Passage],
    config: PipelineConfig,
    provider: Provider | None = None,
    *,
    with_context: bool = True,
    with_instances: bool = True,
) -> AnswerPackage:
    if provider is None:
        provider = build_provider(config)
    prediction, cnps, spans = count_stage(query, passages, provider, config.strategy)
    contextualized = None
    if with_context:
        contextualized = context_stage(
            cnps, prediction, provider, config.alpha, config.similarity_threshold
        )
    instances = None
    if with_instances:
        instances = explanation_stage(
            query, passages, provider, config.explanation_strategy, config.k
        )
    return AnswerPackage(
        query=query,
        prediction=prediction,
        contextualized=contextualized,
        instances=instances,
        evidence=_evidence(passages, spans),
    )


def _evidence(passages: Sequence[Passage], spans: Sequence[AnswerSpan]) -> tuple[dict, ...]:
    by_passage: dict[str, list[AnswerSpan]] = {}
    for span in spans:
        by_passage.setdefault(span.passage_id, []).append(span)
    out = []
    for passage in passages:
        cited = sorted(by_passage.get(passage.id, []), key=lambda s: s.char_start)
        if not cited:
            continue
        out.append(
            {
                "passage_id": passage.id,
                "rank": passage.rank,
                "snippets": [s.to_dict() for s in cited],
            }
        )
    return tuple(out)


# --- JSON shaping -------------------------------------------------------------


def prediction_to_dict(prediction: Prediction | None) -> dict | None:
    if prediction is None:
        return None
    return {
        "value": prediction.value,
        "strategy": prediction.strategy.value,
        "support": [
            {
                "value": c.value,
                "confidence": c.confidence,
                "passage_id": c.passage_id,
                "passage_rank": c.passage_rank,
            }
            for c in prediction.support
        ],
    }


def _cnp_to_dict(cnp: CNP) -> dict:
    return {
        "text": cnp.text,
        "quantity": cnp.quantity.to_dict(),
        "modifier_phrase": cnp.modifier_phrase,
        "confidence": cnp.confidence,
        "category": cnp.category.value if cnp.category is not None else None,
    }


def contextualized_to_dict(ctx: ContextualizedAnswer | None) -> dict | None:
    if ctx is None:
        return None
    return {
        "cnp_rep": _cnp_to_dict(ctx.cnp_rep) if ctx.cnp_rep is not None else None,
        "synonyms": [_cnp_to_dict(c) for c in ctx.synonyms],
        "subgroups": [_cnp_to_dict(c) for c in ctx.subgroups],
        "incomparables": [_cnp_to_dict(c) for c in ctx.incomparables],
        "uncategorized": [_cnp_to_dict(c) for c in ctx.uncategorized],
        "alpha": ctx.alpha,
        "similarity_threshold": ctx.similarity_threshold,
    }


def instances_to_dict(ranked: RankedInstances | None) -> dict | None:
    if ranked is None:
        return None
    return {
        "strategy": ranked.strategy.value,
        "items": [
            {
                "surface": c.surface,
                "key": c.key,
                "frequency": c.frequency,
                "summed_confidence": c.summed_confidence,
                "type_score": c.type_score,
                "passages": sorted({o.span.passage_id for o in c.occurrences}),
            }
            for c in ranked.items
        ],
    }


def package_to_dict(package: AnswerPackage) -> dict:
    return {
        "query": package.query,
        "prediction": prediction_to_dict(package.prediction),
        "contextualization": contextualized_to_dict(package.contextualized),
        "instances": instances_to_dict(package.instances),
        "evidence": list(package.evidence),
    }


def record_passages(record: QueryRecord) -> list[Passage]:
    return sorted(record.passages, key=lambda p: p.rank)


__all__ = [
    "AnswerPackage",
    "PipelineConfig",
    "UnusableStrategyError",
    "build_provider",
    "context_stage",
    "count_stage",
    "explanation_stage",
    "instances_to_dict",
    "package_to_dict",
    "prediction_to_dict",
    "contextualized_to_dict",
    "record_passages",
    "run_pipeline",
]
