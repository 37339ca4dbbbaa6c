from __future__ import annotations

import random
import sys
from pathlib import Path
from typing import List, Tuple

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spectraqa.corpus import CorpusStore, LabelA, LabelB, MetricValue, Paper


def make_paper(
    pid: str = "P1",
    obj: str = "apples",
    prop: str = "sweetness",
    methods: Tuple[str, ...] = ("NIR",),
    abstract: str = "NIR spectra of apples were used to predict sweetness.",
    preprocessing: Tuple[str, ...] = ("SNV", "MSC"),
    features: Tuple[str, ...] = ("PCA",),
    models: Tuple[str, ...] = ("PLS",),
    metrics: Tuple[Tuple[str, str], ...] = (("R2", "0.94"),),
    outcome: str | None = "NIR with PLS predicted sweetness reliably.",
    year: int = 2020,
) -> Paper:
    return Paper(
        id=pid,
        title=f"Assessment of {prop} in {obj}",
        year=year,
        abstract=abstract,
        label_a=LabelA(
            research_object=obj,
            measured_property=prop,
            spectral_methods=list(methods),
            outcome_summary=outcome,
        ),
        label_b=LabelB(
            preprocessing_methods=list(preprocessing),
            feature_processing_methods=list(features),
            models=list(models),
            metrics_and_outcomes=[MetricValue(n, v) for n, v in metrics],
        ),
    )


@pytest.fixture
def store() -> CorpusStore:
    s = CorpusStore()
    s.add_papers(
        [
            make_paper("P1", "apples", "sweetness", ("NIR",)),
            make_paper(
                "P2",
                "apples",
                "firmness",
                ("Raman",),
                abstract="Raman spectra of apples were used to assess firmness.",
                preprocessing=(),
                models=("SVM",),
            ),
            make_paper(
                "P3",
                "wheat",
                "protein",
                ("NIR", "near-infrared"),
                abstract="NIR spectra of wheat kernels quantify protein.",
                preprocessing=("Savitzky-Golay smoothing",),
                features=(),
                outcome=None,
            ),
        ]
    )
    return s


def random_token_corpus(
    rng: random.Random, max_docs: int = 20, max_vocab: int = 50
) -> List[Tuple[str, List[str]]]:
    """Random token lists over a random vocabulary, for oracle-equivalence runs."""
    vocab = [f"t{i}" for i in range(rng.randint(2, max_vocab))]
    num_docs = rng.randint(1, max_docs)
    docs = []
    for d in range(num_docs):
        length = rng.randint(1, 40)
        docs.append((f"d{d:02d}", [rng.choice(vocab) for _ in range(length)]))
    return docs


def random_query(rng: random.Random, docs: List[Tuple[str, List[str]]]) -> List[str]:
    vocab = sorted({t for _, tokens in docs for t in tokens})
    terms = [rng.choice(vocab) for _ in range(rng.randint(1, 6))]
    if rng.random() < 0.3:
        terms.append("unseen-term")
    return terms
