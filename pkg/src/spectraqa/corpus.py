"""Labeled-paper data model, validation, ingestion, and JSONL persistence.

A paper carries two label tiers: spectral-experiment metadata (research
object, measured property, spectral methods, outcome summary) and
chemometrics metadata (preprocessing, feature processing, models, reported
metrics). The store is the single mutable structure in the package; every
index is built from an immutable snapshot of it.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

PaperId = str


@dataclass
class MetricValue:
    metric_name: str
    value_text: str


@dataclass
class LabelA:
    research_object: str
    measured_property: str
    spectral_methods: List[str]
    outcome_summary: Optional[str] = None


@dataclass
class LabelB:
    preprocessing_methods: List[str] = field(default_factory=list)
    feature_processing_methods: List[str] = field(default_factory=list)
    models: List[str] = field(default_factory=list)
    metrics_and_outcomes: List[MetricValue] = field(default_factory=list)


@dataclass
class Paper:
    id: PaperId
    title: str
    year: int
    abstract: str
    label_a: LabelA
    label_b: LabelB


@dataclass
class RejectedRecord:
    index: int
    reason: str


@dataclass
class IngestReport:
    accepted: int
    rejected: List[RejectedRecord]


def _check_string_list(errors: List[str], prefix: str, values: List[str]) -> None:
    seen = set()
    for i, value in enumerate(values):
        trimmed = value.strip() if isinstance(value, str) else ""
        if not trimmed:
            errors.append(f"{prefix}[{i}]: empty")
            continue
        if trimmed in seen:
            errors.append(f"{prefix}: duplicate {trimmed!r}")
        seen.add(trimmed)


def validate_paper(paper: Paper) -> List[str]:
    """Return every violated invariant, one message per rule; empty list means ok."""
    errors: List[str] = []
    if not paper.id or not paper.id.strip():
        errors.append("id: empty")
    if not isinstance(paper.year, int) or isinstance(paper.year, bool) or not 1900 <= paper.year <= 2100:
        errors.append("year: outside [1900, 2100]")
    if not paper.abstract or not paper.abstract.strip():
        errors.append("abstract: empty")
    if not paper.label_a.spectral_methods:
        errors.append("label_a.spectral_methods: empty")
    else:
        _check_string_list(errors, "label_a.spectral_methods", paper.label_a.spectral_methods)
    _check_string_list(errors, "label_b.preprocessing_methods", paper.label_b.preprocessing_methods)
    _check_string_list(errors, "label_b.feature_processing_methods", paper.label_b.feature_processing_methods)
    _check_string_list(errors, "label_b.models", paper.label_b.models)
    seen_metrics = set()
    for i, metric in enumerate(paper.label_b.metrics_and_outcomes):
        if not metric.metric_name.strip():
            errors.append(f"label_b.metrics_and_outcomes[{i}].metric_name: empty")
        if not metric.value_text.strip():
            errors.append(f"label_b.metrics_and_outcomes[{i}].value_text: empty")
        key = (metric.metric_name.strip(), metric.value_text.strip())
        if key in seen_metrics:
            errors.append(f"label_b.metrics_and_outcomes: duplicate {metric.metric_name!r}")
        seen_metrics.add(key)
    return errors


def paper_from_dict(record: Dict[str, Any]) -> Paper:
    """Build a Paper from the external JSONL record shape. Raises on missing fields."""
    for key in ("id", "title", "year", "abstract", "label_a", "label_b"):
        if key not in record:
            raise ValueError(f"missing field {key!r}")
    la = record["label_a"]
    lb = record["label_b"]
    if not isinstance(la, dict):
        raise ValueError("label_a: not an object")
    if not isinstance(lb, dict):
        raise ValueError("label_b: not an object")
    for key in ("research_object", "measured_property", "spectral_methods"):
        if key not in la:
            raise ValueError(f"missing field 'label_a.{key}'")
    metrics = []
    for entry in lb.get("metrics_and_outcomes", []):
        if not isinstance(entry, dict) or "metric_name" not in entry or "value_text" not in entry:
            raise ValueError("label_b.metrics_and_outcomes: entries need metric_name and value_text")
        metrics.append(MetricValue(str(entry["metric_name"]), str(entry["value_text"])))
    year = record["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        raise ValueError("year: not an integer")
    return Paper(
        id=str(record["id"]),
        title=str(record["title"]),
        year=year,
        abstract=str(record["abstract"]),
        label_a=LabelA(
            research_object=str(la["research_object"]),
            measured_property=str(la["measured_property"]),
            spectral_methods=[str(m) for m in la["spectral_methods"]],
            outcome_summary=None if la.get("outcome_summary") is None else str(la["outcome_summary"]),
        ),
        label_b=LabelB(
            preprocessing_methods=[str(m) for m in lb.get("preprocessing_methods", [])],
            feature_processing_methods=[str(m) for m in lb.get("feature_processing_methods", [])],
            models=[str(m) for m in lb.get("models", [])],
            metrics_and_outcomes=metrics,
        ),
    )


def paper_to_dict(paper: Paper) -> Dict[str, Any]:
    """Serialize with a fixed field order so exports are byte-stable."""
    label_a: Dict[str, Any] = {
        "research_object": paper.label_a.research_object,
        "measured_property": paper.label_a.measured_property,
        "spectral_methods": list(paper.label_a.spectral_methods),
    }
    if paper.label_a.outcome_summary is not None:
        label_a["outcome_summary"] = paper.label_a.outcome_summary
    return {
        "id": paper.id,
        "title": paper.title,
        "year": paper.year,
        "abstract": paper.abstract,
        "label_a": label_a,
        "label_b": {
            "preprocessing_methods": list(paper.label_b.preprocessing_methods),
            "feature_processing_methods": list(paper.label_b.feature_processing_methods),
            "models": list(paper.label_b.models),
            "metrics_and_outcomes": [
                {"metric_name": m.metric_name, "value_text": m.value_text}
                for m in paper.label_b.metrics_and_outcomes
            ],
        },
    }


class CorpusStore:
    """Id-keyed paper collection with a revision stamp that increases on every mutation.

    Readers may run concurrently; a batch ingest is atomic with respect to
    them. Snapshots are plain lists that never observe later mutations.
    """

    def __init__(self) -> None:
        self._papers: Dict[PaperId, Paper] = {}
        self._revision = 0
        self._lock = threading.RLock()

    @property
    def revision(self) -> int:
        with self._lock:
            return self._revision

    def __len__(self) -> int:
        with self._lock:
            return len(self._papers)

    def ids(self) -> List[PaperId]:
        with self._lock:
            return sorted(self._papers)

    def get(self, paper_id: PaperId) -> Optional[Paper]:
        """Exact, case-sensitive lookup. Raises on a malformed (empty) id."""
        if not isinstance(paper_id, str) or not paper_id:
            raise ValueError("paper id must be a non-empty string")
        with self._lock:
            return self._papers.get(paper_id)

    def snapshot(self) -> List[Paper]:
        """Papers sorted by id; safe to index from without holding the lock."""
        with self._lock:
            return [self._papers[pid] for pid in sorted(self._papers)]

    def add_papers(self, papers: Iterable[Paper]) -> IngestReport:
        return self._ingest([(i, p, None) for i, p in enumerate(papers)])

    def ingest_records(self, records: Iterable[Dict[str, Any]]) -> IngestReport:
        parsed: List[Tuple[int, Optional[Paper], Optional[str]]] = []
        for i, record in enumerate(records):
            try:
                parsed.append((i, paper_from_dict(record), None))
            except (ValueError, TypeError) as exc:
                parsed.append((i, None, str(exc)))
        return self._ingest(parsed)

    def ingest_lines(self, lines: Iterable[str]) -> IngestReport:
        """Ingest line-delimited JSON records; blank lines are skipped."""
        parsed: List[Tuple[int, Optional[Paper], Optional[str]]] = []
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                parsed.append((i, None, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(record, dict):
                parsed.append((i, None, "record is not an object"))
                continue
            try:
                parsed.append((i, paper_from_dict(record), None))
            except (ValueError, TypeError) as exc:
                parsed.append((i, None, str(exc)))
        return self._ingest(parsed)

    def _ingest(self, parsed: List[Tuple[int, Optional[Paper], Optional[str]]]) -> IngestReport:
        with self._lock:
            accepted: List[Paper] = []
            rejected: List[RejectedRecord] = []
            batch_ids = set()
            for index, paper, parse_error in parsed:
                if parse_error is not None:
                    rejected.append(RejectedRecord(index, parse_error))
                    continue
                assert paper is not None
                errors = validate_paper(paper)
                if errors:
                    rejected.append(RejectedRecord(index, "; ".join(errors)))
                    continue
                if paper.id in self._papers or paper.id in batch_ids:
                    rejected.append(RejectedRecord(index, "duplicate id"))
                    continue
                batch_ids.add(paper.id)
                accepted.append(paper)
            for paper in accepted:
                self._papers[paper.id] = paper
            if accepted:
                self._revision += 1
            return IngestReport(accepted=len(accepted), rejected=rejected)

    def export_jsonl(self) -> str:
        """Deterministic export: fixed field order, records sorted by id."""
        lines = [
            json.dumps(paper_to_dict(paper), ensure_ascii=False)
            for paper in self.snapshot()
        ]
        return "\n".join(lines) + ("\n" if lines else "")
