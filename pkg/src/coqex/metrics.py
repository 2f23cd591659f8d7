"""Evaluation metrics for count predictions and instance rankings.

Count predictions are scored with Relaxed Precision (fraction of answered
queries whose prediction falls within the inclusive ±10% band around the
gold) and Coverage (fraction of queries answered at all). Instance
rankings get the standard order-sensitive retrieval metrics, macro-averaged
over queries that have gold instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .contextualization import Category
from .corpus import within_ten_percent
from .textutil import normalize_mention_key


@dataclass(frozen=True)
class CountEvalResult:
    relaxed_precision: float | None  # over answered queries; None when nothing answered
    relaxed_precision_all: float  # over all queries, unanswered counted as misses
    coverage: float
    n_queries: int
    n_answered: int
    n_correct: int

    def to_dict(self) -> dict:
        return {
            "relaxed_precision": self.relaxed_precision,
            "relaxed_precision_all": self.relaxed_precision_all,
            "coverage": self.coverage,
            "n_queries": self.n_queries,
            "n_answered": self.n_answered,
            "n_correct": self.n_correct,
        }


@dataclass(frozen=True)
class InstanceEvalResult:
    precision_at: dict[int, float]
    recall_at: dict[int, float]
    hit_at: dict[int, float]
    mrr: float
    n_queries: int

    def to_dict(self) -> dict:
        return {
            "precision_at": {str(k): v for k, v in self.precision_at.items()},
            "recall_at": {str(k): v for k, v in self.recall_at.items()},
            "hit_at": {str(k): v for k, v in self.hit_at.items()},
            "mrr": self.mrr,
            "n_queries": self.n_queries,
        }


def relaxed_precision(
    predictions: Sequence[float | None], golds: Sequence[float]
) -> float | None:
    """Fraction of answered queries within ±10% of gold; None if none answered."""
    _check_aligned(predictions, golds)
    answered = [(p, g) for p, g in zip(predictions, golds) if p is not None]
    if not answered:
        return None
    correct = sum(1 for p, g in answered if within_ten_percent(p, g))
    return correct / len(answered)


def coverage(predictions: Sequence[float | None]) -> float:
    """Fraction of queries with any prediction at all."""
    if not predictions:
        return 0.0
    return sum(1 for p in predictions if p is not None) / len(predictions)


def count_metrics(
    predictions: Sequence[float | None], golds: Sequence[float]
) -> CountEvalResult:
    _check_aligned(predictions, golds)
    answered = [(p, g) for p, g in zip(predictions, golds) if p is not None]
    n_correct = sum(1 for p, g in answered if within_ten_percent(p, g))
    n = len(predictions)
    return CountEvalResult(
        relaxed_precision=(n_correct / len(answered)) if answered else None,
        relaxed_precision_all=(n_correct / n) if n else 0.0,
        coverage=coverage(predictions),
        n_queries=n,
        n_answered=len(answered),
        n_correct=n_correct,
    )


def _check_aligned(predictions, golds):
    if len(predictions) != len(golds):
        raise ValueError(
            f"predictions and golds must align: {len(predictions)} vs {len(golds)}"
        )


# --- instance ranking metrics ---------------------------------------------


def _dedupe_keys(items: Sequence[str]) -> list[str]:
    seen = set()
    out = []
    for item in items:
        key = normalize_mention_key(item)
        if key and key not in seen:
            seen.add(key)
            out.append(key)
    return out


def instance_metrics(
    rankings: Sequence[Sequence[str]],
    gold_instances: Sequence[Sequence[str]],
    ks: Sequence[int] = (1, 5, 10),
) -> InstanceEvalResult:
    """Precision@k, Recall@k, Hit@k and MRR, macro-averaged.

    Ranked surfaces and golds are matched on normalized-key equality after
    per-query deduplication; queries without gold instances are skipped.
    P@k divides by min(k, #returned) so short result lists are not punished
    for honesty.
    """
    _check_aligned(rankings, gold_instances)
    ks = sorted(set(int(k) for k in ks))
    if any(k < 1 for k in ks):
        raise ValueError(f"cutoffs must be positive, got {ks}")
    per_p: dict[int, list[float]] = {k: [] for k in ks}
    per_r: dict[int, list[float]] = {k: [] for k in ks}
    per_h: dict[int, list[float]] = {k: [] for k in ks}
    rr: list[float] = []
    n_scored = 0
    for ranked_raw, gold_raw in zip(rankings, gold_instances):
        gold = set(_dedupe_keys(gold_raw))
        if not gold:
            continue
        n_scored += 1
        ranked = _dedupe_keys(ranked_raw)
        hits = [r in gold for r in ranked]
        first_hit = next((i for i, h in enumerate(hits) if h), None)
        rr.append(1.0 / (first_hit + 1) if first_hit is not None else 0.0)
        for k in ks:
            top_hits = sum(hits[:k])
            per_p[k].append(top_hits / min(k, len(ranked)) if ranked else 0.0)
            per_r[k].append(top_hits / len(gold))
            per_h[k].append(1.0 if top_hits > 0 else 0.0)
    return InstanceEvalResult(
        precision_at={k: _mean(per_p[k]) for k in ks},
        recall_at={k: _mean(per_r[k]) for k in ks},
        hit_at={k: _mean(per_h[k]) for k in ks},
        mrr=_mean(rr),
        n_queries=n_scored,
    )


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs) if xs else 0.0


# --- CNP classification accuracy -------------------------------------------


def cnp_accuracy(
    predicted: Sequence[Category | None], labeled: Sequence[Category]
) -> dict[str, float]:
    """Per-category accuracy of CNP classification against human labels."""
    _check_aligned(predicted, labeled)
    totals: dict[str, int] = {}
    matches: dict[str, int] = {}
    for pred, gold in zip(predicted, labeled):
        name = Category(gold).value
        totals[name] = totals.get(name, 0) + 1
        if pred is not None and Category(pred) == Category(gold):
            matches[name] = matches.get(name, 0) + 1
    return {name: matches.get(name, 0) / totals[name] for name in sorted(totals)}


# --- reporting ---------------------------------------------------------------


def format_table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    """Aligned plain-text table."""
    table = [list(header)] + [list(r) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def metrics_report_table(
    count_result: CountEvalResult | None,
    instance_result: InstanceEvalResult | None,
    ks: Sequence[int] = (1, 5, 10),
) -> str:
    rows = []
    if count_result is not None:
        rp = count_result.relaxed_precision
        rows.append(("relaxed_precision", "-" if rp is None else f"{rp:.4f}"))
        rows.append(("relaxed_precision_all", f"{count_result.relaxed_precision_all:.4f}"))
        rows.append(("coverage", f"{count_result.coverage:.4f}"))
        rows.append(("n_queries", str(count_result.n_queries)))
        rows.append(("n_answered", str(count_result.n_answered)))
    if instance_result is not None:
        for k in sorted(set(int(k) for k in ks)):
            rows.append((f"precision@{k}", f"{instance_result.precision_at[k]:.4f}"))
            rows.append((f"recall@{k}", f"{instance_result.recall_at[k]:.4f}"))
            rows.append((f"hit@{k}", f"{instance_result.hit_at[k]:.4f}"))
        rows.append(("mrr", f"{instance_result.mrr:.4f}"))
        rows.append(("instance_queries", str(instance_result.n_queries)))
    return format_table(rows, header=("metric", "value"))
