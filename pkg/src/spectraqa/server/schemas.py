"""Pydantic request/response models for the HTTP API."""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel


class AskRequest(BaseModel):
    question: str
    retriever: Optional[str] = None
    k: Optional[int] = None


class ParsedQuestionModel(BaseModel):
    research_object: str
    measured_property: Optional[str] = None
    spectral_method: Optional[str] = None
    question_objective: Optional[str] = None
    task: str
    raw_question: str


class RankedHitModel(BaseModel):
    paper_id: str
    score: float
    rank: int


class SnippetModel(BaseModel):
    paper_id: str
    field_of_origin: str
    text: str


class AnswerModel(BaseModel):
    text: str
    citations: List[str]
    bundle_fingerprint: str


class AskResponse(BaseModel):
    answer: AnswerModel
    parsed: ParsedQuestionModel
    hits: List[RankedHitModel]
    snippets: List[SnippetModel]
    timing: Dict[str, float]


class RetrieveRequest(BaseModel):
    question: Optional[str] = None
    query_terms: Optional[str] = None
    retriever: str = "tfidf"
    k: int = 10


class RetrieveResponse(BaseModel):
    hits: List[RankedHitModel]


class MetricValueModel(BaseModel):
    metric_name: str
    value_text: str


class LabelAModel(BaseModel):
    research_object: str
    measured_property: str
    spectral_methods: List[str]
    outcome_summary: Optional[str] = None


class LabelBModel(BaseModel):
    preprocessing_methods: List[str]
    feature_processing_methods: List[str]
    models: List[str]
    metrics_and_outcomes: List[MetricValueModel]


class PaperModel(BaseModel):
    id: str
    title: str
    year: int
    abstract: str
    label_a: LabelAModel
    label_b: LabelBModel


class IngestRequest(BaseModel):
    records: List[dict]


class RejectionModel(BaseModel):
    index: int
    reason: str


class IngestResponse(BaseModel):
    accepted: int
    rejected: List[RejectionModel]
    corpus_revision: int


class StatusResponse(BaseModel):
    corpus_revision: int
    index_revision: int
    index_ready: bool
    num_papers: int
    default_retriever: str


class MetricsItem(BaseModel):
    candidate: str
    reference: str


class MetricsRequest(BaseModel):
    items: List[MetricsItem]


class MetricsRow(BaseModel):
    bleu: float
    rouge1_f: float
    meteor: float


class MetricsResponse(BaseModel):
    items: List[MetricsRow]
    aggregate: MetricsRow
