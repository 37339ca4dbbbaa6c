"""Synthetic corpora, entity-keyword query benchmarks, and scripted question
suites for offline end-to-end runs.

The benchmark synthesizes papers from (object x property x method)
combinations plus distractor vocabulary shared across every abstract, derives
queries with known relevant sets, and reports recall@k per retrieval method.
Queries mimic extracted entity keywords: they carry the object and property
terms plus generic domain words that occur in every paper, which is exactly
the regime where unweighted bag-of-words cosine breaks down and idf-weighted
scoring does not.
"""
from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .corpus import LabelA, LabelB, MetricValue, Paper
from .qparse import TaskIndicator
from .retrieval import Bm25Params, RetrieverKind, build_index, retrieval_accuracy
from .textproc import TokenStream, normalize_term, tokenize

OBJECTS = [
    "apples", "wheat", "soil", "milk", "grapes", "tea leaves", "maize", "rice",
    "beef", "honey", "tomatoes", "olive oil", "potatoes", "coffee beans",
    "barley", "cheese", "mangoes", "peanuts", "cotton", "wine",
]

PROPERTIES = [
    "sweetness", "protein content", "moisture", "acidity", "firmness",
    "fat content", "nitrogen", "chlorophyll", "starch", "adulteration",
    "ripeness", "hardness",
]

METHODS = ["NIR", "Raman", "UV", "FTIR", "LIBS", "fluorescence", "hyperspectral imaging", "MIR"]

PREPROCESSING = [
    "SNV", "MSC", "Savitzky-Golay smoothing", "first derivative",
    "second derivative", "detrending", "normalization",
]

FEATURES = ["PCA", "CARS", "SPA", "UVE", "GA wavelength selection"]

MODELS = ["PLS", "PLSR", "SVM", "SVR", "RF", "ANN", "CNN", "ELM"]

METRIC_NAMES = ["R2", "RMSE", "RPD"]

# Short filler sentences packed with the generic vocabulary that also rides
# along in entity-keyword queries; every abstract contains these words at
# least once, so their document frequency is the corpus size.
_FILLER_SENTENCES = [
    "The spectra of the samples support detection and analysis.",
    "Detection and analysis of the samples rely on the spectra.",
    "The analysis of the spectra guides the detection of samples.",
    "Samples and spectra drive the detection analysis.",
    "The detection analysis covers the spectra of the samples.",
]

# keyword lines found in survey-style abstracts; near-pure generic vocabulary
_SURVEY_LINES = [
    "Keywords: spectra, samples, detection, analysis, study, method.",
    "Scope: detection analysis, spectra screening, samples survey, method study.",
    "Topics: spectra acquisition, samples handling, detection analysis, method design, study scope.",
]

_GENERIC_QUERY_TERMS = ["samples", "detection", "spectra", "analysis", "study", "method"]


def _combo_key(obj: str, prop: str) -> Tuple[str, str]:
    return (obj, prop)


def synth_corpus(num_papers: int, seed: int, id_prefix: str = "S") -> List[Paper]:
    """Deterministic corpus of labeled papers built from entity combinations."""
    rng = random.Random(seed)
    papers: List[Paper] = []
    width = len(str(num_papers))
    for i in range(num_papers):
        obj = rng.choice(OBJECTS)
        prop = rng.choice(PROPERTIES)
        methods = rng.sample(METHODS, rng.choice((1, 1, 2)))
        prep = rng.sample(PREPROCESSING, rng.randint(0, 3))
        feats = rng.sample(FEATURES, rng.randint(0, 2))
        models = rng.sample(MODELS, rng.randint(1, 2))
        metrics = [
            MetricValue(name, f"0.{rng.randint(70, 99)}")
            for name in rng.sample(METRIC_NAMES, rng.randint(1, 2))
        ]
        method_phrase = " and ".join(methods)
        sentences = [
            f"{method_phrase} spectra of {obj} were collected to assess {prop}.",
            f"A calibration set of {obj} samples was measured for {prop} detection.",
            f"The {models[0]} model predicted {prop} with good accuracy in this analysis.",
            "This study reports a spectral method workflow for routine detection.",
        ]
        # survey-flavored records carry long generic passages and keyword
        # lines; focused studies stay terse, so raw-count profiles diverge
        # from actual relevance
        is_survey = rng.random() < 0.35
        filler_n = rng.randint(2, 6) if is_survey else rng.randint(0, 2)
        for _ in range(filler_n):
            sentences.append(rng.choice(_FILLER_SENTENCES))
        if is_survey:
            for _ in range(rng.randint(1, 3)):
                sentences.append(rng.choice(_SURVEY_LINES))
        rng.shuffle(sentences)
        outcome = (
            f"{method_phrase} combined with {models[0]} predicted {prop} in {obj} reliably."
            if rng.random() < 0.8
            else None
        )
        papers.append(
            Paper(
                id=f"{id_prefix}{i + 1:0{width}d}",
                title=f"Spectral assessment of {prop} in {obj} using {method_phrase}",
                year=rng.randint(2014, 2023),
                abstract=" ".join(sentences),
                label_a=LabelA(
                    research_object=obj,
                    measured_property=prop,
                    spectral_methods=methods,
                    outcome_summary=outcome,
                ),
                label_b=LabelB(
                    preprocessing_methods=prep,
                    feature_processing_methods=feats,
                    models=models,
                    metrics_and_outcomes=metrics,
                ),
            )
        )
    return papers


DEMO_SEED = 1405


def demo_corpus() -> List[Paper]:
    """The 50-paper corpus used by offline runs; fully deterministic."""
    return synth_corpus(50, seed=DEMO_SEED, id_prefix="P")


def bench_queries(
    papers: Sequence[Paper], num_queries: int, seed: int
) -> List[Tuple[TokenStream, Set[str]]]:
    """Entity-keyword queries with known relevant sets drawn from the corpus.

    Relevance means an exact (object, property) label match, plus the method
    when the query names one. Combinations with more than five matching
    papers are skipped so recall@10 is attainable.
    """
    rng = random.Random(seed + 1)
    by_combo: Dict[Tuple[str, str], List[Paper]] = {}
    for paper in papers:
        key = _combo_key(paper.label_a.research_object, paper.label_a.measured_property)
        by_combo.setdefault(key, []).append(paper)
    combos = sorted(key for key, members in by_combo.items() if len(members) <= 5)
    queries: List[Tuple[TokenStream, Set[str]]] = []
    while len(queries) < num_queries:
        obj, prop = combos[rng.randrange(len(combos))]
        members = by_combo[(obj, prop)]
        use_method = rng.random() < 0.33
        if use_method:
            method = rng.choice(members[0].label_a.spectral_methods)
            canon = normalize_term(method)
            relevant = {
                p.id
                for p in members
                if any(normalize_term(m) == canon for m in p.label_a.spectral_methods)
            }
            text = f"{obj} {prop} {canon} " + " ".join(_GENERIC_QUERY_TERMS)
        else:
            relevant = {p.id for p in members}
            text = f"{obj} {prop} " + " ".join(_GENERIC_QUERY_TERMS)
        queries.append((tokenize(text), relevant))
    return queries


METHOD_LABELS = {
    RetrieverKind.BOW: "Bag-of-Words model",
    RetrieverKind.BM25: "BM25",
    RetrieverKind.TFIDF: "TF-IDF cosine similarity retrieval method",
}

_BENCH_ORDER = (RetrieverKind.BOW, RetrieverKind.BM25, RetrieverKind.TFIDF)


def run_benchmark(
    num_docs: int = 200,
    num_queries: int = 100,
    seed: int = 42,
    k: int = 10,
    bm25_params: Optional[Bm25Params] = None,
) -> Dict[str, object]:
    """Synthesize a corpus and queries, then report recall@k per retrieval method."""
    papers = synth_corpus(num_docs, seed=seed)
    queries = bench_queries(papers, num_queries, seed=seed)
    rows = []
    for kind in _BENCH_ORDER:
        index = build_index(papers, kind, params=bm25_params if kind is RetrieverKind.BM25 else None)
        accuracy = retrieval_accuracy(index, queries, k)
        rows.append(
            {
                "method": METHOD_LABELS[kind],
                "retriever": kind.value,
                "recall_at_k": accuracy,
                "accuracy_percent": f"{100 * accuracy:.2f}",
            }
        )
    return {
        "seed": seed,
        "num_papers": num_docs,
        "num_queries": num_queries,
        "k": k,
        "methods": rows,
    }


_CAT1_TEMPLATES = [
    "In the related study on the prediction of {prop} in {obj}, which spectral method is suitable?",
    "What spectral technique fits {prop} in {obj}?",
]

_CAT2_TEMPLATES = [
    ("Which preprocessing methods are used with {method} spectra to predict {prop} in {obj}?", "preprocessing"),
    ("For the detection of {prop} in {obj} using {method} spectroscopy, which model performs best?", "model"),
    ("Which feature processing methods help to predict {prop} in {obj} using {method} spectra?", "feature_processing"),
    ("What performance is reported for the prediction of {prop} in {obj} using {method} spectroscopy?", "metrics"),
]


def scripted_questions(
    papers: Sequence[Paper], count: int, seed: int
) -> List[Tuple[str, TaskIndicator]]:
    """In-grammar questions derived from corpus labels, balanced across the two
    task categories; every question is guaranteed to have retrievable entities."""
    rng = random.Random(seed)
    questions: List[Tuple[str, TaskIndicator]] = []
    while len(questions) < count:
        paper = papers[rng.randrange(len(papers))]
        obj = paper.label_a.research_object
        prop = paper.label_a.measured_property
        method = normalize_term(rng.choice(paper.label_a.spectral_methods))
        if len(questions) % 2 == 0:
            template = _CAT1_TEMPLATES[rng.randrange(len(_CAT1_TEMPLATES))]
            questions.append(
                (template.format(prop=prop, obj=obj), TaskIndicator.SPECTRAL_METHOD_SELECTION)
            )
        else:
            template, _objective = _CAT2_TEMPLATES[rng.randrange(len(_CAT2_TEMPLATES))]
            questions.append(
                (
                    template.format(prop=prop, obj=obj, method=method),
                    TaskIndicator.CHEMOMETRICS_WORKFLOW,
                )
            )
    return questions
