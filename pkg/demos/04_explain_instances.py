"""Walk-through: grounding a count in ranked instance entities.

Run with: python demos/04_explain_instances.py
"""

import json
from importlib import resources

from coqex import OfflineProvider, RankingStrategy, answer_type, rewrite_query
from coqex.corpus import Passage
from coqex.explanation import extract_instances, rank
from coqex.providers import SpanMode

FIXTURES = resources.files("coqex.data").joinpath("fixtures")
fixture = json.loads(FIXTURES.joinpath("lennon_passages.json").read_text(encoding="utf-8"))
passages = [Passage(id=p["id"], rank=p["rank"], text=p["text"]) for p in fixture["passages"]]
query = fixture["query"]

provider = OfflineProvider()
which_query = rewrite_query(query)
print(f"query:         {query}")
print(f"rewritten:     {which_query}")
print(f"answer type:   {answer_type(query)!r}")

spans = provider.predict_spans_many(which_query, passages, SpanMode.INSTANCE)
candidates = extract_instances(spans, provider.ner)

for strategy in (
    RankingStrategy.NO_CONSOLIDATION,
    RankingStrategy.CONTEXT_FREQUENCY,
    RankingStrategy.SUMMED_CONFIDENCE,
    RankingStrategy.TYPE_COMPATIBILITY,
):
    ranked = rank(candidates, strategy, query_type=answer_type(query), nli=provider.entail)
    print(f"\n{strategy.value}:")
    for item in ranked.items[:5]:
        extra = f" type_score={item.type_score:.2f}" if item.type_score is not None else ""
        print(
            f"  {item.surface:30} freq={item.frequency} "
            f"conf={item.summed_confidence:.2f}{extra}"
        )
