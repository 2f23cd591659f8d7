"""Dataset round-trips, the ±10% labeling rule, and query filtering."""

from __future__ import annotations

import json

import pytest

from coqex.corpus import (
    CorpusError,
    Label,
    Passage,
    Provenance,
    QueryRecord,
    filter_measurement_queries,
    label_spans,
    load,
    record_from_dict,
    split_records,
    store,
    within_ten_percent,
)
from coqex.quantity import Quantity


def make_record(rid="q1", gold=200, texts=("There are 200 items.",), query="how many items"):
    passages = tuple(
        Passage(id=f"{rid}-p{i + 1}", rank=i + 1, text=t) for i, t in enumerate(texts)
    )
    return QueryRecord(
        id=rid,
        query=query,
        passages=passages,
        gold_count=Quantity(value=gold, surface=str(gold)) if gold is not None else None,
    )


# --- load/store -----------------------------------------------------------------


def test_empty_file_loads_empty(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert load(path) == []


def test_round_trip_identity(tmp_path):
    records = [
        make_record("q1"),
        QueryRecord(
            id="q2",
            query="how many lakes in finland",
            passages=(Passage(id="q2-p1", rank=1, text="Finland has 187,888 lakes.", url="http://x"),),
            gold_count=Quantity(value=187888, surface="187,888"),
            gold_instances=("Saimaa", "Inari"),
            provenance=Provenance.KG,
        ),
    ]
    path = tmp_path / "data.jsonl"
    store(records, path)
    assert load(path) == records
    # stored bytes are stable
    once = path.read_bytes()
    store(load(path), path)
    assert path.read_bytes() == once


def test_header_line_written_and_validated(tmp_path):
    path = tmp_path / "data.jsonl"
    store([make_record()], path)
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert json.loads(first) == {"format": "coquad.v1"}
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"format": "coquad.v99"}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match="line 1"):
        load(bad)


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text('{"format": "coquad.v1"}\n{not json}\n', encoding="utf-8")
    with pytest.raises(CorpusError, match="line 2"):
        load(path)


def test_duplicate_passage_rank_rejected():
    with pytest.raises(CorpusError, match="rank"):
        QueryRecord(
            id="q1",
            query="how many",
            passages=(
                Passage(id="a", rank=1, text="x"),
                Passage(id="b", rank=1, text="y"),
            ),
        )


def test_ranks_must_be_contiguous_from_one():
    with pytest.raises(CorpusError):
        QueryRecord(
            id="q1",
            query="how many",
            passages=(Passage(id="a", rank=2, text="x"),),
        )


def test_gold_instances_nonempty_when_present():
    with pytest.raises(CorpusError):
        QueryRecord(id="q1", query="q", gold_instances=())


def test_unknown_fields_preserved(tmp_path):
    raw = {
        "id": "q9",
        "query": "how many moons",
        "passages": [{"id": "p1", "rank": 1, "text": "95 moons.", "retrieved_at": "2024-01-01"}],
        "source_tag": "demo",
    }
    record = record_from_dict(raw)
    assert record.extra == {"source_tag": "demo"}
    assert record.passages[0].extra == {"retrieved_at": "2024-01-01"}
    path = tmp_path / "data.jsonl"
    store([record], path)
    reloaded = load(path)[0]
    assert reloaded.extra == {"source_tag": "demo"}
    assert reloaded.passages[0].extra == {"retrieved_at": "2024-01-01"}


# --- labeling ---------------------------------------------------------------------


def test_label_boundary_inclusive():
    assert within_ten_percent(180, 200) is True  # |180-200| = 20 <= 20
    assert within_ten_percent(179, 200) is False
    assert within_ten_percent(220, 200) is True
    assert within_ten_percent(221, 200) is False
    assert within_ten_percent(200, 200) is True


def test_label_spans_over_passages():
    record = make_record(
        gold=200,
        texts=(
            "The set holds 180 pieces. Early counts said 179 pieces.",
            "Exactly 200 pieces are catalogued.",
        ),
    )
    labels = label_spans(record)
    got = [(sl.quantity.value, sl.label) for sl in labels]
    assert got == [
        (180, Label.POSITIVE),
        (179, Label.NEGATIVE),
        (200, Label.POSITIVE),
    ]
    for sl in labels:
        assert sl.span.text in record.passages[0].text + record.passages[1].text


def test_label_spans_requires_gold():
    record = make_record(gold=None)
    with pytest.raises(ValueError):
        label_spans(record)


# --- filtering and splitting --------------------------------------------------------


def test_filter_measurement_queries():
    keep = make_record("q1", query="how many lakes are in finland")
    drop1 = make_record("q2", query="how many kilometers is the nile")
    drop2 = make_record("q3", query="how many years did the war last")
    assert filter_measurement_queries([keep, drop1, drop2]) == [keep]
    assert filter_measurement_queries([]) == []


def test_split_records_seeded():
    records = [make_record(f"q{i}") for i in range(10)]
    train1, test1 = split_records(records, 0.8, seed=7)
    train2, test2 = split_records(records, 0.8, seed=7)
    assert train1 == train2 and test1 == test2
    assert len(train1) == 8 and len(test1) == 2
    assert {r.id for r in train1} | {r.id for r in test1} == {r.id for r in records}
