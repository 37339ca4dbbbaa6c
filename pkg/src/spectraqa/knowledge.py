"""Routes a parsed question to the right label fields of retrieved papers and
assembles a provenance-carrying knowledge bundle, with abstract fallback.

Method-selection questions draw the spectral-method and outcome labels of the
top-ranked papers. Chemometrics questions draw only the label field matching
the question objective, restricted to papers that actually use the asked
spectral method; when that field is empty everywhere, full abstracts stand in.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .corpus import CorpusStore, Paper, PaperId
from .qparse import ParsedQuestion, QuestionObjective, TaskIndicator
from .retrieval import RankedHit
from .textproc import normalize_term

# snippet ordering within one paper follows this field order
FIELD_ORDER = (
    "spectral_methods",
    "outcome_summary",
    "preprocessing_methods",
    "feature_processing_methods",
    "models",
    "metrics_and_outcomes",
    "abstract",
)

OBJECTIVE_FIELD = {
    QuestionObjective.PREPROCESSING: "preprocessing_methods",
    QuestionObjective.FEATURE_PROCESSING: "feature_processing_methods",
    QuestionObjective.MODEL: "models",
    QuestionObjective.METRICS: "metrics_and_outcomes",
}


@dataclass(frozen=True)
class KnowledgeSnippet:
    paper_id: PaperId
    field_of_origin: str
    text: str


@dataclass
class KnowledgeBundle:
    question: ParsedQuestion
    snippets: List[KnowledgeSnippet] = field(default_factory=list)
    retrieval_trace: List[RankedHit] = field(default_factory=list)


def render_field(paper: Paper, field_name: str) -> Optional[str]:
    """Serialize one label field verbatim; None when the field is empty."""
    if field_name == "spectral_methods":
        return "; ".join(paper.label_a.spectral_methods) or None
    if field_name == "outcome_summary":
        return paper.label_a.outcome_summary or None
    if field_name == "preprocessing_methods":
        return "; ".join(paper.label_b.preprocessing_methods) or None
    if field_name == "feature_processing_methods":
        return "; ".join(paper.label_b.feature_processing_methods) or None
    if field_name == "models":
        return "; ".join(paper.label_b.models) or None
    if field_name == "metrics_and_outcomes":
        return (
            "; ".join(f"{m.metric_name}: {m.value_text}" for m in paper.label_b.metrics_and_outcomes)
            or None
        )
    if field_name == "abstract":
        return paper.abstract or None
    raise ValueError(f"unknown field {field_name!r}")


def _snippet(paper: Paper, field_name: str) -> Optional[KnowledgeSnippet]:
    text = render_field(paper, field_name)
    if text is None:
        return None
    return KnowledgeSnippet(paper_id=paper.id, field_of_origin=field_name, text=text)


def abstract_fallback(
    parsed: ParsedQuestion, hits: List[RankedHit], store: CorpusStore, k: int
) -> List[KnowledgeSnippet]:
    """One abstract snippet per paper for the top-k hits."""
    snippets: List[KnowledgeSnippet] = []
    for hit in hits[:k]:
        paper = store.get(hit.paper_id)
        if paper is None:
            continue
        snippet = _snippet(paper, "abstract")
        if snippet is not None:
            snippets.append(snippet)
    return snippets


def assemble(
    parsed: ParsedQuestion,
    hits: List[RankedHit],
    store: CorpusStore,
    k_papers: int = 10,
    max_snippets: int = 5,
) -> KnowledgeBundle:
    """Build the knowledge bundle for a parsed question from ranked hits.

    Deterministic in its inputs; an empty hit list yields an empty bundle
    (generation handles the no-knowledge case).
    """
    if k_papers < 1 or max_snippets < 1:
        raise ValueError("limits must be positive")
    if any(hits[i].rank > hits[i + 1].rank for i in range(len(hits) - 1)):
        raise ValueError("hits must be sorted by rank")

    snippets: List[KnowledgeSnippet] = []
    if parsed.task is TaskIndicator.SPECTRAL_METHOD_SELECTION:
        for hit in hits[:k_papers]:
            paper = store.get(hit.paper_id)
            if paper is None:
                continue
            for field_name in ("spectral_methods", "outcome_summary"):
                snippet = _snippet(paper, field_name)
                if snippet is not None:
                    snippets.append(snippet)
    else:
        assert parsed.question_objective is not None and parsed.spectral_method is not None
        target_field = OBJECTIVE_FIELD[parsed.question_objective]
        wanted = normalize_term(parsed.spectral_method)
        candidates = []
        for hit in hits:
            paper = store.get(hit.paper_id)
            if paper is None:
                continue
            if any(normalize_term(m) == wanted for m in paper.label_a.spectral_methods):
                candidates.append(paper)
        for paper in candidates[:k_papers]:
            snippet = _snippet(paper, target_field)
            if snippet is not None:
                snippets.append(snippet)
        if not snippets:
            snippets = abstract_fallback(parsed, hits, store, min(k_papers, max_snippets))

    return KnowledgeBundle(
        question=parsed,
        snippets=snippets[:max_snippets],
        retrieval_trace=list(hits),
    )
