"""Independent dense brute-force scorers: the oracle side of the dual-route
retrieval checks.

Everything here evaluates the weighting formulas directly over dense numpy
matrices built from token lists; nothing is shared with the package's sparse
implementation beyond the formulas themselves.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np


class DenseReference:
    def __init__(self, docs: Sequence[Tuple[str, Sequence[str]]], k1: float = 1.5, b: float = 0.75):
        self.doc_ids = [doc_id for doc_id, _ in docs]
        vocab = sorted({t for _, tokens in docs for t in tokens})
        self.vocab = {t: i for i, t in enumerate(vocab)}
        self.tf = np.zeros((len(docs), len(vocab)))
        for row, (_, tokens) in enumerate(docs):
            for t in tokens:
                self.tf[row, self.vocab[t]] += 1
        self.df = (self.tf > 0).sum(axis=0)
        self.num_docs = len(docs)
        self.doc_len = self.tf.sum(axis=1)
        self.avgdl = float(self.doc_len.mean()) if self.num_docs else 0.0
        self.k1 = k1
        self.b = b

    def _query_vector(self, query: Sequence[str]) -> np.ndarray:
        vector = np.zeros(len(self.vocab))
        for t in query:
            idx = self.vocab.get(t)
            if idx is not None:
                vector[idx] += 1
        return vector

    def tfidf_scores(self, query: Sequence[str]) -> Dict[str, float]:
        idf = np.log((1 + self.num_docs) / (1 + self.df)) + 1.0
        doc_matrix = self.tf * idf
        query_vec = self._query_vector(query) * idf
        query_norm = float(np.linalg.norm(query_vec))
        scores: Dict[str, float] = {}
        for row, doc_id in enumerate(self.doc_ids):
            doc_norm = float(np.linalg.norm(doc_matrix[row]))
            dot = float(doc_matrix[row] @ query_vec)
            scores[doc_id] = dot / (query_norm * doc_norm) if dot and query_norm and doc_norm else 0.0
        return scores

    def bow_scores(self, query: Sequence[str]) -> Dict[str, float]:
        query_vec = self._query_vector(query)
        query_norm = float(np.linalg.norm(query_vec))
        scores: Dict[str, float] = {}
        for row, doc_id in enumerate(self.doc_ids):
            doc_norm = float(np.linalg.norm(self.tf[row]))
            dot = float(self.tf[row] @ query_vec)
            scores[doc_id] = dot / (query_norm * doc_norm) if dot and query_norm and doc_norm else 0.0
        return scores

    def bm25_scores(self, query: Sequence[str]) -> Dict[str, float]:
        idf = np.log(1 + (self.num_docs - self.df + 0.5) / (self.df + 0.5))
        unique_terms = sorted({t for t in query if t in self.vocab})
        scores: Dict[str, float] = {}
        for row, doc_id in enumerate(self.doc_ids):
            norm = self.k1 * (1 - self.b + self.b * self.doc_len[row] / self.avgdl)
            total = 0.0
            for t in unique_terms:
                tf = self.tf[row, self.vocab[t]]
                if tf > 0:
                    total += float(idf[self.vocab[t]]) * tf * (self.k1 + 1) / (tf + norm)
            scores[doc_id] = total
        return scores

    def scores(self, kind: str, query: Sequence[str]) -> Dict[str, float]:
        return {"tfidf": self.tfidf_scores, "bm25": self.bm25_scores, "bow": self.bow_scores}[kind](query)

    def top_k(self, kind: str, query: Sequence[str], k: int) -> List[Tuple[str, float]]:
        positive = [(doc_id, s) for doc_id, s in self.scores(kind, query).items() if s > 0.0]
        positive.sort(key=lambda item: (-item[1], item[0]))
        return positive[:k]
