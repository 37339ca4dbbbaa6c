from __future__ import annotations

import json

import pytest

from conftest import make_paper
from spectraqa.corpus import CorpusStore, paper_from_dict, paper_to_dict, validate_paper


def test_validate_ok_paper() -> None:
    assert validate_paper(make_paper()) == []


def test_validate_empty_abstract() -> None:
    paper = make_paper(abstract="")
    assert validate_paper(paper) == ["abstract: empty"]


def test_validate_duplicate_preprocessing_entry() -> None:
    paper = make_paper(preprocessing=("SNV", "SNV"))
    errors = validate_paper(paper)
    assert errors == ["label_b.preprocessing_methods: duplicate 'SNV'"]


def test_validate_empty_spectral_methods() -> None:
    paper = make_paper(methods=())
    assert "label_a.spectral_methods: empty" in validate_paper(paper)


def test_validate_year_range() -> None:
    assert "year: outside [1900, 2100]" in validate_paper(make_paper(year=1800))
    assert validate_paper(make_paper(year=1900)) == []
    assert validate_paper(make_paper(year=2100)) == []


def test_validate_reports_every_violation_once() -> None:
    paper = make_paper(abstract="", preprocessing=("SNV", "SNV"), year=2500)
    errors = validate_paper(paper)
    assert len(errors) == 3
    assert len(set(errors)) == 3


def test_ingest_accepts_valid_lines() -> None:
    store = CorpusStore()
    lines = [json.dumps(paper_to_dict(make_paper(f"P{i}"))) for i in range(3)]
    report = store.ingest_lines(lines)
    assert report.accepted == 3
    assert report.rejected == []
    assert len(store) == 3


def test_ingest_rejects_missing_label_a() -> None:
    store = CorpusStore()
    good = [json.dumps(paper_to_dict(make_paper(f"P{i}"))) for i in range(2)]
    bad = dict(paper_to_dict(make_paper("P9")))
    del bad["label_a"]
    report = store.ingest_lines(good + [json.dumps(bad)])
    assert report.accepted == 2
    assert len(report.rejected) == 1
    assert "label_a" in report.rejected[0].reason
    assert len(store) == 2


def test_ingest_same_file_twice_rejects_duplicates() -> None:
    store = CorpusStore()
    lines = [json.dumps(paper_to_dict(make_paper(f"P{i}"))) for i in range(3)]
    first = store.ingest_lines(lines)
    second = store.ingest_lines(lines)
    assert first.accepted == 3
    assert second.accepted == 0
    assert [r.reason for r in second.rejected] == ["duplicate id"] * 3


def test_ingest_duplicate_within_batch_rejected() -> None:
    store = CorpusStore()
    line = json.dumps(paper_to_dict(make_paper("P1")))
    report = store.ingest_lines([line, line])
    assert report.accepted == 1
    assert report.rejected[0].reason == "duplicate id"


def test_ingest_malformed_line_rejected_with_parse_reason() -> None:
    store = CorpusStore()
    report = store.ingest_lines(["{not json"])
    assert report.accepted == 0
    assert "invalid JSON" in report.rejected[0].reason


def test_rejected_records_leave_store_untouched() -> None:
    store = CorpusStore()
    bad = paper_to_dict(make_paper("PX", abstract=""))
    report = store.ingest_lines([json.dumps(bad)])
    assert report.accepted == 0
    assert len(store) == 0
    assert store.get("PX") is None


def test_revision_counts_mutating_batches() -> None:
    store = CorpusStore()
    start = store.revision
    store.ingest_lines([json.dumps(paper_to_dict(make_paper("P1")))])
    store.ingest_lines([json.dumps(paper_to_dict(make_paper("P2")))])
    store.ingest_lines(["{broken"])  # nothing accepted, no revision bump
    assert store.revision == start + 2


def test_get_paper_known_and_unknown() -> None:
    store = CorpusStore()
    store.add_papers([make_paper("DOI:10.1/a.b")])
    assert store.get("DOI:10.1/a.b") is not None
    assert store.get("nope") is None


def test_get_paper_ids_case_sensitive() -> None:
    store = CorpusStore()
    store.add_papers([make_paper("Paper-1")])
    assert store.get("paper-1") is None
    assert store.get("Paper-1") is not None


def test_get_paper_malformed_id_faults() -> None:
    store = CorpusStore()
    with pytest.raises(ValueError):
        store.get("")


def test_roundtrip_ingest_export() -> None:
    store = CorpusStore()
    papers = [make_paper("B"), make_paper("A", outcome=None), make_paper("C", preprocessing=())]
    store.add_papers(papers)
    exported = store.export_jsonl()
    second = CorpusStore()
    second.ingest_lines(exported.splitlines())
    assert {json.dumps(paper_to_dict(p)) for p in second.snapshot()} == {
        json.dumps(paper_to_dict(p)) for p in papers
    }


def test_export_is_byte_stable_and_sorted_by_id() -> None:
    store = CorpusStore()
    store.add_papers([make_paper("B"), make_paper("A")])
    first = store.export_jsonl()
    second = store.export_jsonl()
    assert first == second
    ids = [json.loads(line)["id"] for line in first.splitlines()]
    assert ids == sorted(ids)


def test_outcome_summary_omitted_when_absent() -> None:
    record = paper_to_dict(make_paper(outcome=None))
    assert "outcome_summary" not in record["label_a"]
    rebuilt = paper_from_dict(record)
    assert rebuilt.label_a.outcome_summary is None


def test_snapshot_isolated_from_later_ingest() -> None:
    store = CorpusStore()
    store.add_papers([make_paper("P1")])
    snap = store.snapshot()
    store.add_papers([make_paper("P2")])
    assert [p.id for p in snap] == ["P1"]
