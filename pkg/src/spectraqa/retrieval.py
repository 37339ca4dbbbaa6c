"""Lexical retrievers behind one contract: bag-of-words cosine, BM25, TF-IDF cosine.

All three score a tokenized query against per-document term-frequency
postings built from the same indexed text (title + abstract + label strings,
spectral methods alias-normalized). Query terms unseen at build time are
dropped from the query vector for every scorer, so the brute-force reference
used in tests and this implementation share one definition.

Weighting:
  TF-IDF    weight(t, x) = tf(t, x) * (ln((1 + N) / (1 + df(t))) + 1), cosine
  BM25      idf(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5)),
            score  = sum over unique query terms of
                     idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
  BoW       cosine over raw term counts, no idf
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .corpus import Paper, PaperId
from .textproc import TermStats, TokenStream, build_stats, normalize_term, tokenize


class RetrieverKind(str, Enum):
    BOW = "bow"
    BM25 = "bm25"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 <= 0:
            raise ValueError("k1 must be > 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")


@dataclass(frozen=True)
class RankedHit:
    paper_id: PaperId
    score: float
    rank: int


@dataclass(frozen=True)
class Index:
    kind: RetrieverKind
    stats: TermStats
    postings: Dict[PaperId, Dict[str, int]]
    params: Optional[Bm25Params]
    built_from_revision: int
    # cached per-document vector norms keyed by doc id; idf maps keyed by term
    tfidf_idf: Dict[str, float]
    bm25_idf: Dict[str, float]
    tfidf_norms: Dict[PaperId, float]
    bow_norms: Dict[PaperId, float]


def paper_index_text(paper: Paper) -> str:
    """Concatenate every retrievable field of a paper into one indexable string."""
    parts = [paper.title, paper.abstract]
    parts.extend(normalize_term(m) for m in paper.label_a.spectral_methods)
    parts.append(paper.label_a.research_object)
    parts.append(paper.label_a.measured_property)
    if paper.label_a.outcome_summary:
        parts.append(paper.label_a.outcome_summary)
    parts.extend(paper.label_b.preprocessing_methods)
    parts.extend(paper.label_b.feature_processing_methods)
    parts.extend(paper.label_b.models)
    parts.extend(f"{m.metric_name} {m.value_text}" for m in paper.label_b.metrics_and_outcomes)
    return " ".join(parts)


def tfidf_weight(num_docs: int, doc_freq: int) -> float:
    return math.log((1 + num_docs) / (1 + doc_freq)) + 1.0


def bm25_weight(num_docs: int, doc_freq: int) -> float:
    return math.log(1 + (num_docs - doc_freq + 0.5) / (doc_freq + 0.5))


def build_index(
    papers: Sequence[Paper],
    kind: RetrieverKind,
    params: Optional[Bm25Params] = None,
    revision: int = 0,
) -> Index:
    """Build an immutable index over a corpus snapshot; deterministic per snapshot."""
    docs: List[Tuple[str, TokenStream]] = [
        (paper.id, tokenize(paper_index_text(paper))) for paper in sorted(papers, key=lambda p: p.id)
    ]
    return build_index_from_tokens(docs, kind, params=params, revision=revision)


def build_index_from_tokens(
    docs: Sequence[Tuple[str, TokenStream]],
    kind: RetrieverKind,
    params: Optional[Bm25Params] = None,
    revision: int = 0,
) -> Index:
    stats = build_stats(docs)
    postings = {doc_id: dict(Counter(tokens)) for doc_id, tokens in docs}
    n = stats.num_docs
    tfidf_idf = {t: tfidf_weight(n, df) for t, df in stats.doc_freq.items()}
    bm25_idf = {t: bm25_weight(n, df) for t, df in stats.doc_freq.items()}
    tfidf_norms = {
        doc_id: math.sqrt(sum((tf * tfidf_idf[t]) ** 2 for t, tf in terms.items()))
        for doc_id, terms in postings.items()
    }
    bow_norms = {
        doc_id: math.sqrt(sum(tf * tf for tf in terms.values()))
        for doc_id, terms in postings.items()
    }
    if kind is RetrieverKind.BM25:
        params = params or Bm25Params()
    return Index(
        kind=kind,
        stats=stats,
        postings=postings,
        params=params,
        built_from_revision=revision,
        tfidf_idf=tfidf_idf,
        bm25_idf=bm25_idf,
        tfidf_norms=tfidf_norms,
        bow_norms=bow_norms,
    )


def _query_counts(index: Index, query: TokenStream) -> Dict[str, int]:
    vocab = index.stats.vocabulary
    return {t: c for t, c in Counter(query).items() if t in vocab}


def score_tfidf_cosine(index: Index, query: TokenStream, doc_id: PaperId) -> float:
    if index.kind is not RetrieverKind.TFIDF:
        raise ValueError(f"index kind is {index.kind.value}, expected tfidf")
    counts = _query_counts(index, query)
    if not counts:
        return 0.0
    terms = index.postings.get(doc_id)
    if terms is None:
        return 0.0
    dot = 0.0
    qnorm_sq = 0.0
    for t, qc in sorted(counts.items()):
        w_q = qc * index.tfidf_idf[t]
        qnorm_sq += w_q * w_q
        tf = terms.get(t)
        if tf:
            dot += w_q * tf * index.tfidf_idf[t]
    dnorm = index.tfidf_norms[doc_id]
    if dot == 0.0 or dnorm == 0.0 or qnorm_sq == 0.0:
        return 0.0
    return dot / (math.sqrt(qnorm_sq) * dnorm)


def score_bm25(index: Index, query: TokenStream, doc_id: PaperId) -> float:
    if index.kind is not RetrieverKind.BM25:
        raise ValueError(f"index kind is {index.kind.value}, expected bm25")
    terms = index.postings.get(doc_id)
    if terms is None:
        return 0.0
    params = index.params or Bm25Params()
    stats = index.stats
    length_norm = params.k1 * (
        1 - params.b + params.b * stats.doc_lengths[doc_id] / stats.avg_doc_len
    ) if stats.avg_doc_len > 0 else params.k1
    score = 0.0
    for t in sorted(set(query)):
        idf = index.bm25_idf.get(t)
        if idf is None:
            continue
        tf = terms.get(t, 0)
        if tf == 0:
            continue
        score += idf * tf * (params.k1 + 1) / (tf + length_norm)
    return score


def score_bow(index: Index, query: TokenStream, doc_id: PaperId) -> float:
    if index.kind is not RetrieverKind.BOW:
        raise ValueError(f"index kind is {index.kind.value}, expected bow")
    counts = _query_counts(index, query)
    if not counts:
        return 0.0
    terms = index.postings.get(doc_id)
    if terms is None:
        return 0.0
    dot = 0.0
    qnorm_sq = 0.0
    for t, qc in sorted(counts.items()):
        qnorm_sq += qc * qc
        tf = terms.get(t)
        if tf:
            dot += qc * tf
    dnorm = index.bow_norms[doc_id]
    if dot == 0.0 or dnorm == 0.0 or qnorm_sq == 0.0:
        return 0.0
    return dot / (math.sqrt(qnorm_sq) * dnorm)


_SCORERS = {
    RetrieverKind.TFIDF: score_tfidf_cosine,
    RetrieverKind.BM25: score_bm25,
    RetrieverKind.BOW: score_bow,
}


def score(index: Index, query: TokenStream, doc_id: PaperId) -> float:
    return _SCORERS[index.kind](index, query, doc_id)


def retrieve_top_k(index: Index, query: TokenStream, k: int) -> List[RankedHit]:
    """The k highest-scoring documents with positive score; ties broken by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scorer = _SCORERS[index.kind]
    scored = [
        (doc_id, s)
        for doc_id in index.postings
        if (s := scorer(index, query, doc_id)) > 0.0
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [
        RankedHit(paper_id=doc_id, score=s, rank=rank)
        for rank, (doc_id, s) in enumerate(scored[:k], start=1)
    ]


def retrieval_accuracy(
    index: Index,
    queries: Sequence[Tuple[TokenStream, Set[PaperId]]],
    k: int,
) -> float:
    """Mean over queries of |top-k hits that are relevant| / |relevant|."""
    if not queries:
        raise ValueError("query list must be non-empty")
    total = 0.0
    for query, relevant in queries:
        if not relevant:
            raise ValueError("relevant set must be non-empty")
        hits = retrieve_top_k(index, query, k)
        retrieved = {h.paper_id for h in hits}
        total += len(retrieved & relevant) / len(relevant)
    return total / len(queries)
