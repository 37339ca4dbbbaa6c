from __future__ import annotations

import pytest

from conftest import make_paper
from spectraqa.corpus import CorpusStore
from spectraqa.knowledge import abstract_fallback, assemble, render_field
from spectraqa.qparse import ParsedQuestion, QuestionObjective, TaskIndicator
from spectraqa.retrieval import RankedHit


def _hits(*ids: str) -> list[RankedHit]:
    return [RankedHit(paper_id=pid, score=1.0 - 0.1 * i, rank=i + 1) for i, pid in enumerate(ids)]


def _cat1(obj: str = "apples", prop: str = "sweetness") -> ParsedQuestion:
    return ParsedQuestion(
        research_object=obj,
        measured_property=prop,
        task=TaskIndicator.SPECTRAL_METHOD_SELECTION,
        raw_question="q",
    )


def _cat2(objective: QuestionObjective, method: str = "NIR") -> ParsedQuestion:
    return ParsedQuestion(
        research_object="apples",
        measured_property="sweetness",
        spectral_method=method,
        question_objective=objective,
        task=TaskIndicator.CHEMOMETRICS_WORKFLOW,
        raw_question="q",
    )


def test_render_field_joins_lists_and_metrics() -> None:
    paper = make_paper(preprocessing=("SNV", "MSC"), metrics=(("R2", "0.94"), ("RMSE", "0.31")))
    assert render_field(paper, "preprocessing_methods") == "SNV; MSC"
    assert render_field(paper, "metrics_and_outcomes") == "R2: 0.94; RMSE: 0.31"
    assert render_field(paper, "abstract") == paper.abstract


def test_render_field_empty_returns_none() -> None:
    paper = make_paper(preprocessing=())
    assert render_field(paper, "preprocessing_methods") is None


def test_category1_emits_method_and_outcome_snippets_in_rank_order(store: CorpusStore) -> None:
    bundle = assemble(_cat1(), _hits("P1", "P2", "P3"), store)
    kinds = [(s.paper_id, s.field_of_origin) for s in bundle.snippets]
    assert kinds == [
        ("P1", "spectral_methods"),
        ("P1", "outcome_summary"),
        ("P2", "spectral_methods"),
        ("P2", "outcome_summary"),
        ("P3", "spectral_methods"),
    ]


def test_category2_emits_only_objective_field(store: CorpusStore) -> None:
    bundle = assemble(_cat2(QuestionObjective.PREPROCESSING), _hits("P1", "P2", "P3"), store)
    assert [s.field_of_origin for s in bundle.snippets] == ["preprocessing_methods"] * 2
    assert bundle.snippets[0].paper_id == "P1"
    assert bundle.snippets[0].text == "SNV; MSC"
    # P2 is a Raman paper: excluded by the spectral-method filter
    assert all(s.paper_id != "P2" for s in bundle.snippets)


def test_category2_method_filter_is_alias_normalized(store: CorpusStore) -> None:
    bundle = assemble(
        _cat2(QuestionObjective.PREPROCESSING, method="near-infrared"),
        _hits("P1", "P2", "P3"),
        store,
    )
    assert {s.paper_id for s in bundle.snippets} == {"P1", "P3"}


def test_category2_empty_target_fields_fall_back_to_abstracts(store: CorpusStore) -> None:
    # P2 is the only Raman paper and has no preprocessing labels
    bundle = assemble(_cat2(QuestionObjective.PREPROCESSING, method="Raman"), _hits("P1", "P2"), store)
    assert [s.field_of_origin for s in bundle.snippets] == ["abstract", "abstract"]
    assert {s.paper_id for s in bundle.snippets} == {"P1", "P2"}


def test_category2_unknown_method_falls_back_to_abstracts(store: CorpusStore) -> None:
    bundle = assemble(_cat2(QuestionObjective.MODEL, method="LIBS"), _hits("P1", "P2"), store)
    assert [s.field_of_origin for s in bundle.snippets] == ["abstract", "abstract"]


def test_abstract_fallback_one_snippet_per_paper(store: CorpusStore) -> None:
    snippets = abstract_fallback(_cat1(), _hits("P1", "P2", "P3"), store, k=1)
    assert len(snippets) == 1
    assert snippets[0].paper_id == "P1"
    assert snippets[0].field_of_origin == "abstract"


def test_abstract_fallback_empty_hits(store: CorpusStore) -> None:
    assert abstract_fallback(_cat1(), [], store, k=3) == []


def test_empty_hits_yield_empty_bundle(store: CorpusStore) -> None:
    bundle = assemble(_cat1(), [], store)
    assert bundle.snippets == []
    assert bundle.retrieval_trace == []


def test_max_snippets_truncates(store: CorpusStore) -> None:
    bundle = assemble(_cat1(), _hits("P1", "P2", "P3"), store, max_snippets=2)
    assert len(bundle.snippets) == 2


def test_limits_must_be_positive(store: CorpusStore) -> None:
    with pytest.raises(ValueError):
        assemble(_cat1(), _hits("P1"), store, k_papers=0)
    with pytest.raises(ValueError):
        assemble(_cat1(), _hits("P1"), store, max_snippets=0)


def test_unsorted_hits_fault(store: CorpusStore) -> None:
    hits = [RankedHit("P1", 0.5, 2), RankedHit("P2", 0.9, 1)]
    with pytest.raises(ValueError):
        assemble(_cat1(), hits, store)


def test_provenance_closure(store: CorpusStore) -> None:
    for parsed in (_cat1(), _cat2(QuestionObjective.MODEL), _cat2(QuestionObjective.METRICS)):
        bundle = assemble(parsed, _hits("P1", "P2", "P3"), store)
        trace_ids = {h.paper_id for h in bundle.retrieval_trace}
        assert {s.paper_id for s in bundle.snippets} <= trace_ids


def test_category2_routing_exclusivity(store: CorpusStore) -> None:
    bundle = assemble(_cat2(QuestionObjective.MODEL), _hits("P1", "P2", "P3"), store)
    allowed = {"models", "abstract"}
    assert all(s.field_of_origin in allowed for s in bundle.snippets)


def test_assemble_is_deterministic(store: CorpusStore) -> None:
    first = assemble(_cat1(), _hits("P1", "P2", "P3"), store)
    second = assemble(_cat1(), _hits("P1", "P2", "P3"), store)
    assert first.snippets == second.snippets
