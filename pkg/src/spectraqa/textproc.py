"""Deterministic tokenization, term normalization, and corpus-level term statistics.

Every retriever shares this module, so the rules here are deliberately frozen:
lowercase, split on any non-alphanumeric character, drop tokens shorter than
two characters, keep purely numeric tokens. No stemming, no stop words.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

TokenStream = List[str]

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
MIN_TOKEN_LEN = 2

# Canonical spellings for spectral-method names. Applied at index and match
# time only; stored records keep their original wording.
METHOD_ALIASES: Dict[str, str] = {
    "near-infrared": "nir",
    "near infrared": "nir",
    "near-infrared spectroscopy": "nir",
    "near infrared spectroscopy": "nir",
    "near-infrared spectrum": "nir",
    "nirs": "nir",
    "ultraviolet": "uv",
    "ultraviolet spectrum": "uv",
    "uv-vis": "uv",
    "uv-visible": "uv",
    "mid-infrared": "mir",
    "mid infrared": "mir",
    "fourier transform infrared": "ftir",
    "fourier-transform infrared": "ftir",
    "ft-ir": "ftir",
    "raman spectroscopy": "raman",
    "laser-induced breakdown spectroscopy": "libs",
    "laser induced breakdown spectroscopy": "libs",
    "hyperspectral imaging": "hyperspectral",
    "hsi": "hyperspectral",
    "fluorescence spectroscopy": "fluorescence",
    "terahertz": "thz",
    "terahertz spectroscopy": "thz",
}


def normalize_term(text: str) -> str:
    """Lowercase, trim, and map known aliases to their canonical form."""
    cleaned = text.strip().lower()
    return METHOD_ALIASES.get(cleaned, cleaned)


def tokenize(text: str) -> TokenStream:
    """Split text into lowercase alphanumeric tokens, dropping tokens shorter than 2 chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN]


@dataclass(frozen=True)
class TermStats:
    """Immutable corpus statistics consumed by the scorers."""

    vocabulary: Dict[str, int]
    doc_freq: Dict[str, int]
    doc_lengths: Dict[str, int]
    num_docs: int
    avg_doc_len: float


def build_stats(docs: Iterable[Tuple[str, Sequence[str]]]) -> TermStats:
    """Compute document frequencies and lengths over pre-tokenized documents.

    Each document counts a term once toward its document frequency, however
    often the term repeats inside it. Duplicate doc ids are a caller bug.
    """
    doc_freq: Dict[str, int] = {}
    doc_lengths: Dict[str, int] = {}
    for doc_id, tokens in docs:
        if doc_id in doc_lengths:
            raise ValueError(f"duplicate doc id: {doc_id!r}")
        doc_lengths[doc_id] = len(tokens)
        for term in set(tokens):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    num_docs = len(doc_lengths)
    total = sum(doc_lengths.values())
    avg = total / num_docs if num_docs else 0.0
    vocabulary = {term: i for i, term in enumerate(sorted(doc_freq))}
    return TermStats(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        doc_lengths=doc_lengths,
        num_docs=num_docs,
        avg_doc_len=avg,
    )
