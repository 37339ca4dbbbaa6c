"""Question parsing: research object/property, the mentioned spectral method,
and the dichotomous task indicator.

Two extractor backends share one contract: a deterministic rule-based pattern
library and an LLM-backed extractor speaking strict JSON through the gateway.
Every parse released by `extract_entities` satisfies the field-presence rule:
a chemometrics-workflow question always carries a spectral method and an
objective; a method-selection question needs neither.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Protocol, Sequence

from . import assets, evalkit
from .errors import ExtractionMalformedError
from .textproc import METHOD_ALIASES, normalize_term, tokenize


class TaskIndicator(str, Enum):
    SPECTRAL_METHOD_SELECTION = "spectral_method_selection"
    CHEMOMETRICS_WORKFLOW = "chemometrics_workflow"


class QuestionObjective(str, Enum):
    PREPROCESSING = "preprocessing"
    FEATURE_PROCESSING = "feature_processing"
    MODEL = "model"
    METRICS = "metrics"


@dataclass
class ParsedQuestion:
    research_object: str
    task: TaskIndicator
    raw_question: str
    measured_property: Optional[str] = None
    spectral_method: Optional[str] = None
    question_objective: Optional[QuestionObjective] = None


def check_parsed(parsed: ParsedQuestion) -> ParsedQuestion:
    """Enforce the task-conditional field-presence invariant; raises when violated."""
    problems = []
    if not parsed.research_object or not parsed.research_object.strip():
        problems.append("research_object empty")
    if parsed.task is TaskIndicator.CHEMOMETRICS_WORKFLOW:
        if not parsed.spectral_method:
            problems.append("chemometrics question without spectral_method")
        if parsed.question_objective is None:
            problems.append("chemometrics question without question_objective")
    if problems:
        raise ExtractionMalformedError("; ".join(problems), raw_output=parsed.raw_question)
    return parsed


# --- rule-based pattern library -------------------------------------------

_PHRASE = r"[a-z][a-z0-9 \-]*?"
_STOP = r"(?=[,.;:?!]|$| using\b| with\b| by\b| via\b| through\b| which\b| what\b| and\b)"

_OBJECT_PATTERNS = [
    re.compile(
        r"\b(?:prediction|estimation|determination|assessment|quantification|detection|measurement)"
        rf" of (?P<prop>{_PHRASE}) in (?P<obj>{_PHRASE}){_STOP}"
    ),
    re.compile(
        r"\b(?:predict|detect|measure|estimate|assess|determine|quantify)(?:ing)?"
        rf" (?P<prop>{_PHRASE}) in (?P<obj>{_PHRASE}){_STOP}"
    ),
    re.compile(rf"\b(?:for|fits?|suits?) (?P<prop>{_PHRASE}) in (?P<obj>{_PHRASE}){_STOP}"),
]

_METHOD_DISPLAY = {
    "nir": "NIR",
    "uv": "UV",
    "mir": "MIR",
    "ftir": "FTIR",
    "raman": "Raman",
    "libs": "LIBS",
    "hyperspectral": "hyperspectral imaging",
    "fluorescence": "fluorescence",
    "thz": "terahertz",
}

_OBJECTIVE_KEYWORDS = [
    (QuestionObjective.PREPROCESSING, ("preprocess", "pre-process", "pretreat", "pre-treat")),
    (
        QuestionObjective.FEATURE_PROCESSING,
        ("feature", "wavelength selection", "variable selection", "band selection"),
    ),
    (QuestionObjective.MODEL, ("model", "algorithm", "regression", "classifier", "machine learning")),
    (
        QuestionObjective.METRICS,
        ("metric", "performance", "rmse", "r2", "outcome", "how accurate", "how well"),
    ),
]

_SELECTION_CUES = (
    "which spectral",
    "what spectral",
    "which spectroscopy",
    "what spectroscopy",
    "spectral method",
    "spectral technique",
    "spectroscopic technique",
    "suitable",
    "appropriate",
)


def find_spectral_method(question: str) -> Optional[str]:
    """Scan a lowercased question for a known method alias; longest alias wins."""
    for alias in sorted(METHOD_ALIASES, key=len, reverse=True):
        if re.search(rf"\b{re.escape(alias)}\b", question):
            canon = METHOD_ALIASES[alias]
            return _METHOD_DISPLAY.get(canon, canon)
    for canon, display in _METHOD_DISPLAY.items():
        if re.search(rf"\b{re.escape(canon)}\b", question):
            return display
    return None


def find_objective(question: str) -> Optional[QuestionObjective]:
    for objective, keywords in _OBJECTIVE_KEYWORDS:
        if any(kw in question for kw in keywords):
            return objective
    return None


def classify_task(
    objective: Optional[QuestionObjective], has_selection_cue: bool
) -> TaskIndicator:
    """Objective keywords dominate; method-selection cues are the fallback reading."""
    if objective is not None:
        return TaskIndicator.CHEMOMETRICS_WORKFLOW
    return TaskIndicator.SPECTRAL_METHOD_SELECTION


def rule_based_extract(question: str) -> Optional[ParsedQuestion]:
    """Apply the ordered pattern library; None when the grammar does not cover the question.

    A question with a chemometrics objective but no recognizable spectral
    method is treated as no-match rather than emitting an invalid parse.
    """
    if not question or not question.strip():
        return None
    lowered = question.lower()
    match = None
    for pattern in _OBJECT_PATTERNS:
        match = pattern.search(lowered)
        if match:
            break
    if match is None:
        return None
    objective = find_objective(lowered)
    method = find_spectral_method(lowered)
    task = classify_task(objective, any(cue in lowered for cue in _SELECTION_CUES))
    if task is TaskIndicator.CHEMOMETRICS_WORKFLOW and method is None:
        return None
    return ParsedQuestion(
        research_object=match.group("obj").strip(),
        measured_property=match.group("prop").strip(),
        spectral_method=method,
        question_objective=objective if task is TaskIndicator.CHEMOMETRICS_WORKFLOW else None,
        task=task,
        raw_question=question,
    )


class Extractor(Protocol):
    def parse(self, question: str) -> ParsedQuestion: ...


class RuleBasedExtractor:
    """Deterministic extractor; raises extraction-malformed on out-of-grammar questions."""

    def parse(self, question: str) -> ParsedQuestion:
        parsed = rule_based_extract(question)
        if parsed is None:
            raise ExtractionMalformedError(
                "question did not match the extraction grammar", raw_output=question
            )
        return parsed


def validate_prompt_template(template: str, slot: str = "question") -> str:
    if template.count("{" + slot + "}") != 1:
        raise ValueError(f"template must contain the {{{slot}}} slot exactly once")
    return template


class LlmExtractor:
    """Extractor backed by a chat gateway speaking a strict JSON protocol.

    One repair reprompt is attempted on malformed output before surfacing
    an extraction-malformed error carrying the raw reply.
    """

    def __init__(self, gateway, template: Optional[str] = None, temperature: float = 0.0):
        self.gateway = gateway
        self.template = validate_prompt_template(template or assets.load_text("extraction_prompt.txt"))
        self.temperature = temperature

    def parse(self, question: str) -> ParsedQuestion:
        prompt = self.template.format(question=question)
        raw = self.gateway.complete(prompt, temperature=self.temperature).text
        parsed = self._decode(raw, question)
        if parsed is not None:
            return parsed
        repair = (
            prompt
            + "\n\nThe previous reply was not a valid JSON object with the required"
            " keys. Reply again with only the JSON object."
        )
        raw = self.gateway.complete(repair, temperature=self.temperature).text
        parsed = self._decode(raw, question)
        if parsed is None:
            raise ExtractionMalformedError("extractor returned unusable output", raw_output=raw)
        return parsed

    @staticmethod
    def _decode(raw: str, question: str) -> Optional[ParsedQuestion]:
        candidate = raw
        try:
            data = json.loads(candidate)
        except json.JSONDecodeError:
            block = re.search(r"\{.*\}", raw, re.DOTALL)
            if not block:
                return None
            try:
                data = json.loads(block.group(0))
            except json.JSONDecodeError:
                return None
        if not isinstance(data, dict):
            return None
        task_raw = data.get("task")
        if task_raw in (1, "1"):
            task_raw = TaskIndicator.SPECTRAL_METHOD_SELECTION.value
        elif task_raw in (2, "2"):
            task_raw = TaskIndicator.CHEMOMETRICS_WORKFLOW.value
        try:
            task = TaskIndicator(task_raw)
        except ValueError:
            return None
        objective_raw = data.get("question_objective")
        objective = None
        if objective_raw is not None:
            try:
                objective = QuestionObjective(objective_raw)
            except ValueError:
                return None
        obj = data.get("research_object")
        if not isinstance(obj, str) or not obj.strip():
            return None
        parsed = ParsedQuestion(
            research_object=obj.strip(),
            measured_property=(data.get("measured_property") or None),
            spectral_method=(data.get("spectral_method") or None),
            question_objective=objective,
            task=task,
            raw_question=question,
        )
        try:
            return check_parsed(parsed)
        except ExtractionMalformedError:
            return None


class FallbackExtractor:
    """LLM extraction with a rule-based fallback when the model path fails."""

    def __init__(self, primary: Extractor, fallback: Extractor):
        self.primary = primary
        self.fallback = fallback

    def parse(self, question: str) -> ParsedQuestion:
        try:
            return self.primary.parse(question)
        except ExtractionMalformedError:
            return self.fallback.parse(question)


def extract_entities(question: str, extractor: Extractor) -> ParsedQuestion:
    """Run the backend and enforce the parse invariants on its output."""
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    return check_parsed(extractor.parse(question))


_EVAL_FIELDS = ("research_object", "measured_property", "spectral_method", "question_objective", "task")


def _field_text(parsed: ParsedQuestion, field_name: str) -> str:
    value = getattr(parsed, field_name)
    if value is None:
        return ""
    if isinstance(value, Enum):
        return value.value
    return str(value)


def evaluate_extraction(
    predictions: Sequence[ParsedQuestion], gold: Sequence[ParsedQuestion]
) -> Dict[str, Dict[str, float]]:
    """Per-field BLEU / ROUGE-1 / METEOR / exact-match accuracy of aligned parses.

    Accuracy compares alias-normalized field strings over every pair; the
    lexical metrics skip pairs whose gold field is empty (no reference).
    """
    if not predictions or len(predictions) != len(gold):
        raise ValueError("predictions and gold must be non-empty and aligned")
    table: Dict[str, Dict[str, float]] = {}
    for field_name in _EVAL_FIELDS:
        matches = 0
        bleu_scores: List[float] = []
        rouge_scores: List[float] = []
        meteor_scores: List[float] = []
        for pred, ref in zip(predictions, gold):
            pred_text = _field_text(pred, field_name)
            ref_text = _field_text(ref, field_name)
            if normalize_term(pred_text) == normalize_term(ref_text):
                matches += 1
            if ref_text:
                cand_tokens = tokenize(pred_text)
                ref_tokens = tokenize(ref_text)
                bleu_scores.append(evalkit.bleu(cand_tokens, ref_tokens))
                rouge_scores.append(evalkit.rouge1_f(cand_tokens, ref_tokens))
                meteor_scores.append(evalkit.meteor(cand_tokens, ref_tokens))
        table[field_name] = {
            "accuracy": matches / len(predictions),
            "bleu": sum(bleu_scores) / len(bleu_scores) if bleu_scores else 0.0,
            "rouge1_f": sum(rouge_scores) / len(rouge_scores) if rouge_scores else 0.0,
            "meteor": sum(meteor_scores) / len(meteor_scores) if meteor_scores else 0.0,
        }
    return table
