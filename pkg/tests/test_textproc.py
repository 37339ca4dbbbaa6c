from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectraqa.textproc import build_stats, normalize_term, tokenize


def test_tokenize_lowercases_and_splits_on_nonalnum() -> None:
    assert tokenize("NIR spectra of Apples!") == ["nir", "spectra", "of", "apples"]


def test_tokenize_empty_input() -> None:
    assert tokenize("") == []


def test_tokenize_splits_compound_punctuation() -> None:
    assert tokenize("SNV+MSC pre-processing") == ["snv", "msc", "pre", "processing"]


def test_tokenize_drops_short_tokens_keeps_numeric() -> None:
    assert tokenize("a r2 of 0.94 I x") == ["r2", "of", "94"]
    assert tokenize("2024 samples") == ["2024", "samples"]


@given(st.text(max_size=200))
def test_tokenize_idempotent_on_own_output(text: str) -> None:
    tokens = tokenize(text)
    assert tokenize(" ".join(tokens)) == tokens


@given(st.text(max_size=200))
def test_tokenize_tokens_are_lowercase_nonempty(text: str) -> None:
    for token in tokenize(text):
        assert token
        assert token == token.lower()
        assert " " not in token


def test_normalize_term_applies_alias_map() -> None:
    assert normalize_term("  Near-Infrared ") == "nir"
    assert normalize_term("NIR") == "nir"
    assert normalize_term("Raman") == "raman"
    assert normalize_term("unknown thing") == "unknown thing"


def test_build_stats_hand_count() -> None:
    stats = build_stats([("d1", ["a", "b"]), ("d2", ["a", "a"])])
    assert stats.doc_freq == {"a": 2, "b": 1}
    assert stats.num_docs == 2
    assert stats.avg_doc_len == 2.0
    assert stats.doc_lengths == {"d1": 2, "d2": 2}


def test_build_stats_empty() -> None:
    stats = build_stats([])
    assert stats.num_docs == 0
    assert stats.vocabulary == {}
    assert stats.avg_doc_len == 0.0


def test_build_stats_df_counts_once_per_document() -> None:
    stats = build_stats([("d1", ["nir", "nir", "nir"])])
    assert stats.doc_freq["nir"] == 1
    assert stats.doc_lengths["d1"] == 3


def test_build_stats_duplicate_doc_id_faults() -> None:
    with pytest.raises(ValueError, match="duplicate doc id"):
        build_stats([("d1", ["a"]), ("d1", ["b"])])


@given(
    st.lists(
        st.lists(st.sampled_from(["aa", "bb", "cc", "dd"]), min_size=0, max_size=12),
        min_size=1,
        max_size=8,
    )
)
def test_build_stats_invariants(token_lists: list[list[str]]) -> None:
    docs = [(f"d{i}", tokens) for i, tokens in enumerate(token_lists)]
    stats = build_stats(docs)
    for term, df in stats.doc_freq.items():
        assert 1 <= df <= stats.num_docs
    assert abs(stats.avg_doc_len * stats.num_docs - sum(stats.doc_lengths.values())) < 1e-9
