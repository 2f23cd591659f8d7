"""Walk-through: scoring the pipeline over the bundled 10-query corpus.

Run with: python demos/05_evaluate_corpus.py
"""

from importlib import resources

from coqex import load
from coqex.metrics import count_metrics, instance_metrics, metrics_report_table
from coqex.pipeline import PipelineConfig, record_passages, run_pipeline

FIXTURES = resources.files("coqex.data").joinpath("fixtures")
records = load(str(FIXTURES.joinpath("coquad10.jsonl")))
config = PipelineConfig()

preds, golds, rankings, gold_instances = [], [], [], []
for record in records:
    package = run_pipeline(
        record.query,
        record_passages(record),
        config,
        with_context=False,
        with_instances=record.gold_instances is not None,
    )
    value = package.prediction.value if package.prediction else None
    preds.append(value)
    golds.append(record.gold_count.value)
    marker = "?" if value is None else value
    print(f"  {record.id}  gold={record.gold_count.value:>8}  predicted={marker}")
    if record.gold_instances is not None:
        rankings.append([c.surface for c in package.instances.items])
        gold_instances.append(list(record.gold_instances))

print()
print(
    metrics_report_table(
        count_metrics(preds, golds),
        instance_metrics(rankings, gold_instances, ks=(1, 5, 10)),
    )
)
