"""Walk-through: qualifying a predicted count with categorized noun phrases.

Uses the bundled Indonesia fixture and a fixture similarity function so the
categories come out as in the docs; swap in OfflineProvider().similarity or
a remote provider for live behavior.

Run with: python demos/03_contextualize.py
"""

from importlib import resources

from coqex import OfflineProvider, load
from coqex.pipeline import PipelineConfig, record_passages, run_pipeline

FIXTURES = resources.files("coqex.data").joinpath("fixtures")


class FixtureSimilarity(OfflineProvider):
    SIMS = {
        ("dialects", "languages"): 0.6,
        ("major regional languages", "languages"): 0.6,
        ("official languages", "languages"): 0.6,
        ("ethnic groups", "languages"): -0.2,
        ("native speakers", "languages"): -0.3,
    }

    def similarity(self, a, b):
        return 1.0 if a == b else self.SIMS.get((a, b), super().similarity(a, b))


record = load(str(FIXTURES.joinpath("indonesia.jsonl")))[0]
package = run_pipeline(
    record.query,
    record_passages(record),
    PipelineConfig(alpha=0.30),
    provider=FixtureSimilarity(),
    with_instances=False,
)

ctx = package.contextualized
print(f"query:      {record.query}")
print(f"prediction: {package.prediction.value} via {package.prediction.strategy.value}")
print(f"CNP_rep:    {ctx.cnp_rep.text}")
print(f"synonyms:   {[c.text for c in ctx.synonyms]}")
print(f"subgroups:  {[c.text for c in ctx.subgroups]}")
print(f"incomparable: {[c.text for c in ctx.incomparables]}")
