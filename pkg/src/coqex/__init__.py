"""coqex: answering count queries over text passages.

Given a query like "How many languages are spoken in Indonesia?" and a set
of retrieved passages, the pipeline extracts count candidates from
predicted answer spans, consolidates them into one prediction, qualifies
the prediction with categorized count-modified noun phrases, and grounds
it in ranked instance entities. Learned capabilities (span prediction,
similarity, NER, entailment) sit behind a pluggable provider boundary
with deterministic offline fallbacks.
"""

from .consolidation import CountCandidate, Prediction, Strategy, consolidate
from .contextualization import (
    CNP,
    Category,
    ContextualizedAnswer,
    classify,
    contextualize,
    select_representative,
)
from .corpus import (
    CorpusError,
    Label,
    Passage,
    Provenance,
    QueryRecord,
    SpanLabel,
    filter_measurement_queries,
    label_spans,
    load,
    split_records,
    store,
)
from .explanation import (
    InstanceCandidate,
    RankedInstances,
    RankingStrategy,
    UnusableStrategyError,
    answer_type,
    extract_instances,
    rank,
    rewrite_query,
)
from .metrics import (
    CountEvalResult,
    InstanceEvalResult,
    cnp_accuracy,
    count_metrics,
    coverage,
    instance_metrics,
    relaxed_precision,
)
from .pipeline import (
    AnswerPackage,
    PipelineConfig,
    build_provider,
    package_to_dict,
    run_pipeline,
)
from .providers import (
    AnswerSpan,
    CachedProvider,
    DegradingProvider,
    Mention,
    OfflineProvider,
    Provider,
    ProviderConfig,
    ProviderError,
    ProviderMode,
    RemoteProvider,
    SpanMode,
)
from .quantity import CountSpan, Modifier, Quantity, parse_quantity, split_cnp

__version__ = "0.1.0"
