"""The question-answering pipeline: parse, retrieve, assemble, generate.

Holds one immutable index per retriever kind, rebuilt from store snapshots and
swapped atomically, so concurrent asks never observe a half-built index.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .corpus import CorpusStore
from .errors import CitationMissingError, GatewayError, PipelineStageError
from .generation import GeneratedAnswer, build_prompt, generate
from .knowledge import KnowledgeBundle, assemble
from .qparse import Extractor, ParsedQuestion, RuleBasedExtractor, extract_entities
from .retrieval import Bm25Params, Index, RankedHit, RetrieverKind, build_index, retrieve_top_k
from .textproc import TokenStream, normalize_term, tokenize


@dataclass
class PipelineConfig:
    retriever: RetrieverKind = RetrieverKind.TFIDF
    k: int = 10
    k_papers: int = 10
    max_snippets: int = 5
    bm25_params: Bm25Params = field(default_factory=Bm25Params)


@dataclass
class AskOutcome:
    parsed: ParsedQuestion
    hits: List[RankedHit]
    bundle: KnowledgeBundle
    answer: GeneratedAnswer
    timing: Dict[str, float]


def entity_query(parsed: ParsedQuestion) -> TokenStream:
    """Retrieval query built from the extracted entities, method canonicalized."""
    parts = [parsed.research_object]
    if parsed.measured_property:
        parts.append(parsed.measured_property)
    if parsed.spectral_method:
        parts.append(normalize_term(parsed.spectral_method))
    return tokenize(" ".join(parts))


class QaPipeline:
    def __init__(
        self,
        store: CorpusStore,
        gateway,
        extractor: Optional[Extractor] = None,
        config: Optional[PipelineConfig] = None,
    ):
        self.store = store
        self.gateway = gateway
        self.extractor = extractor or RuleBasedExtractor()
        self.config = config or PipelineConfig()
        self._indexes: Dict[RetrieverKind, Index] = {}
        self.rebuild()

    def rebuild(self) -> None:
        """Re-index the current snapshot; published as one atomic reference swap."""
        snapshot = self.store.snapshot()
        revision = self.store.revision
        fresh = {
            kind: build_index(
                snapshot,
                kind,
                params=self.config.bm25_params if kind is RetrieverKind.BM25 else None,
                revision=revision,
            )
            for kind in RetrieverKind
        }
        self._indexes = fresh

    @property
    def indexes(self) -> Dict[RetrieverKind, Index]:
        """The currently published index set; grab once for a consistent view."""
        return self._indexes

    @property
    def index_revision(self) -> int:
        indexes = self._indexes
        return next(iter(indexes.values())).built_from_revision if indexes else -1

    def index_for(self, kind: RetrieverKind) -> Index:
        return self._indexes[kind]

    def retrieve(
        self,
        question: Optional[str] = None,
        query_terms: Optional[str] = None,
        kind: Optional[RetrieverKind] = None,
        k: Optional[int] = None,
    ) -> List[RankedHit]:
        """Rank documents for a raw term string or a parsed question."""
        kind = kind or self.config.retriever
        k = k or self.config.k
        if query_terms is not None:
            tokens = tokenize(query_terms)
        elif question is not None:
            tokens = entity_query(extract_entities(question, self.extractor))
        else:
            raise ValueError("either question or query_terms is required")
        return retrieve_top_k(self.index_for(kind), tokens, k)

    def ask(
        self,
        question: str,
        retriever: Optional[RetrieverKind] = None,
        k: Optional[int] = None,
    ) -> AskOutcome:
        """Run the three stages in order and return the full trace."""
        if not question or not question.strip():
            raise ValueError("question must be non-empty")
        kind = retriever or self.config.retriever
        k = k or self.config.k
        timing: Dict[str, float] = {}

        started = time.perf_counter()
        try:
            parsed = extract_entities(question, self.extractor)
        except GatewayError as exc:
            raise PipelineStageError("extraction", exc) from exc
        timing["parse"] = time.perf_counter() - started

        started = time.perf_counter()
        hits = retrieve_top_k(self.index_for(kind), entity_query(parsed), k)
        timing["retrieve"] = time.perf_counter() - started

        started = time.perf_counter()
        bundle = assemble(
            parsed,
            hits,
            self.store,
            k_papers=self.config.k_papers,
            max_snippets=self.config.max_snippets,
        )
        timing["assemble"] = time.perf_counter() - started

        started = time.perf_counter()
        try:
            answer = generate(build_prompt(question, bundle), bundle, self.gateway)
        except (GatewayError, CitationMissingError) as exc:
            raise PipelineStageError("generation", exc) from exc
        timing["generate"] = time.perf_counter() - started

        return AskOutcome(parsed=parsed, hits=hits, bundle=bundle, answer=answer, timing=timing)
