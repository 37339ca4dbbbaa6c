"""HTTP service exposing the full pipeline plus corpus and evaluation endpoints.

Every answer carries its full trace (parse result, ranked hits, snippets,
timing) so a client can walk each citation back to the paper record. Ingest
triggers an asynchronous index rebuild published by atomic swap; clients poll
/api/status for the index revision.
"""
from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .. import evalkit
from ..corpus import CorpusStore, paper_to_dict
from ..errors import ExtractionMalformedError, PipelineStageError
from ..gateway import CitationEchoGateway, GatewayConfig, HttpGateway
from ..pipeline import PipelineConfig, QaPipeline
from ..retrieval import RetrieverKind
from . import schemas


def _parse_kind(name: Optional[str]) -> Optional[RetrieverKind]:
    if name is None:
        return None
    try:
        return RetrieverKind(name)
    except ValueError:
        raise HTTPException(status_code=400, detail=f"unknown retriever {name!r}")


def create_app(
    store: Optional[CorpusStore] = None,
    gateway=None,
    config: Optional[PipelineConfig] = None,
    gateway_config: Optional[GatewayConfig] = None,
) -> FastAPI:
    store = store or CorpusStore()
    if gateway is None:
        gateway = HttpGateway(gateway_config) if gateway_config else CitationEchoGateway()
    pipeline = QaPipeline(store, gateway, config=config)
    rebuild_lock = threading.Lock()

    app = FastAPI(title="spectraqa", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.pipeline = pipeline

    def _rebuild() -> None:
        with rebuild_lock:
            pipeline.rebuild()

    @app.post("/api/ask", response_model=schemas.AskResponse)
    def ask(request: schemas.AskRequest) -> schemas.AskResponse:
        if not request.question or not request.question.strip():
            raise HTTPException(status_code=400, detail="question must be non-empty")
        kind = _parse_kind(request.retriever)
        if request.k is not None and request.k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        try:
            outcome = pipeline.ask(request.question, retriever=kind, k=request.k)
        except ExtractionMalformedError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "extraction-malformed", "raw_output": exc.raw_output},
            )
        except PipelineStageError as exc:
            raise HTTPException(
                status_code=502, detail={"stage": exc.stage, "error": str(exc.cause)}
            )
        return schemas.AskResponse(
            answer=schemas.AnswerModel(
                text=outcome.answer.text,
                citations=outcome.answer.citations,
                bundle_fingerprint=outcome.answer.bundle_fingerprint,
            ),
            parsed=schemas.ParsedQuestionModel(
                research_object=outcome.parsed.research_object,
                measured_property=outcome.parsed.measured_property,
                spectral_method=outcome.parsed.spectral_method,
                question_objective=(
                    outcome.parsed.question_objective.value
                    if outcome.parsed.question_objective
                    else None
                ),
                task=outcome.parsed.task.value,
                raw_question=outcome.parsed.raw_question,
            ),
            hits=[
                schemas.RankedHitModel(paper_id=h.paper_id, score=h.score, rank=h.rank)
                for h in outcome.hits
            ],
            snippets=[
                schemas.SnippetModel(
                    paper_id=s.paper_id, field_of_origin=s.field_of_origin, text=s.text
                )
                for s in outcome.bundle.snippets
            ],
            timing=outcome.timing,
        )

    @app.post("/api/retrieve", response_model=schemas.RetrieveResponse)
    def retrieve(request: schemas.RetrieveRequest) -> schemas.RetrieveResponse:
        if not request.question and not request.query_terms:
            raise HTTPException(status_code=400, detail="question or query_terms required")
        if request.k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        kind = _parse_kind(request.retriever)
        try:
            hits = pipeline.retrieve(
                question=request.question,
                query_terms=request.query_terms,
                kind=kind,
                k=request.k,
            )
        except ExtractionMalformedError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "extraction-malformed", "raw_output": exc.raw_output},
            )
        return schemas.RetrieveResponse(
            hits=[
                schemas.RankedHitModel(paper_id=h.paper_id, score=h.score, rank=h.rank)
                for h in hits
            ]
        )

    @app.get("/api/papers/{paper_id}", response_model=schemas.PaperModel)
    def get_paper(paper_id: str) -> schemas.PaperModel:
        paper = store.get(paper_id)
        if paper is None:
            raise HTTPException(status_code=404, detail=f"paper {paper_id!r} not found")
        return schemas.PaperModel(**paper_to_dict(paper))

    @app.post("/api/papers:ingest", response_model=schemas.IngestResponse)
    def ingest(request: schemas.IngestRequest) -> schemas.IngestResponse:
        report = store.ingest_records(request.records)
        if report.accepted:
            threading.Thread(target=_rebuild, daemon=True).start()
        return schemas.IngestResponse(
            accepted=report.accepted,
            rejected=[
                schemas.RejectionModel(index=r.index, reason=r.reason) for r in report.rejected
            ],
            corpus_revision=store.revision,
        )

    @app.post("/api/eval:metrics", response_model=schemas.MetricsResponse)
    def eval_metrics(request: schemas.MetricsRequest) -> schemas.MetricsResponse:
        if not request.items:
            raise HTTPException(status_code=400, detail="items must be non-empty")
        try:
            report = evalkit.evaluate_items([item.model_dump() for item in request.items])
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return schemas.MetricsResponse(
            items=[schemas.MetricsRow(**row) for row in report["items"]],
            aggregate=schemas.MetricsRow(**report["aggregate"]),
        )

    @app.get("/api/status", response_model=schemas.StatusResponse)
    def status() -> schemas.StatusResponse:
        corpus_revision = store.revision
        index_revision = pipeline.index_revision
        return schemas.StatusResponse(
            corpus_revision=corpus_revision,
            index_revision=index_revision,
            index_ready=index_revision == corpus_revision,
            num_papers=len(store),
            default_retriever=pipeline.config.retriever.value,
        )

    return app
