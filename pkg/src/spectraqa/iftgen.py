"""Instruction-data factory: focus taxonomy, two-part question templating,
label-grounded answer generation, and rule-based cleaning.

Questions are deterministic template fills; answers come from a gateway that
is constrained to the paper's own label content, verified by a verbatim
containment check. The shipped offline answerer makes the whole factory run
without a model endpoint.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import assets
from .corpus import CorpusStore, Paper, PaperId
from .errors import AnswerUnfaithfulError
from .gateway import Completion


class QuestionFocus(str, Enum):
    SPECTRAL_METHOD = "spectral_method"
    PREPROCESSING = "preprocessing"
    FEATURE_PROCESSING = "feature_processing"
    METRICS_AND_OUTCOMES = "metrics_and_outcomes"
    MODEL = "model"


@dataclass
class QuestionTemplates:
    part_a: str
    part_b: Dict[QuestionFocus, List[str]]

    def __post_init__(self) -> None:
        if self.part_a.count("{object}") != 1:
            raise ValueError("part_a must contain the {object} slot exactly once")


@dataclass
class IftItem:
    question: str
    answer: str
    source_paper: PaperId
    focus: QuestionFocus


def default_templates() -> QuestionTemplates:
    data = assets.load_json("ift_templates.json")
    return QuestionTemplates(
        part_a=data["part_a"],
        part_b={QuestionFocus(k): list(v) for k, v in data["part_b"].items()},
    )


def focus_payload(paper: Paper, focus: QuestionFocus) -> List[str]:
    """The verbatim label strings an answer for this focus must contain."""
    if focus is QuestionFocus.SPECTRAL_METHOD:
        return list(paper.label_a.spectral_methods)
    if focus is QuestionFocus.PREPROCESSING:
        return list(paper.label_b.preprocessing_methods)
    if focus is QuestionFocus.FEATURE_PROCESSING:
        return list(paper.label_b.feature_processing_methods)
    if focus is QuestionFocus.MODEL:
        return list(paper.label_b.models)
    return [f"{m.metric_name}: {m.value_text}" for m in paper.label_b.metrics_and_outcomes]


def generate_questions(
    paper: Paper,
    templates: Optional[QuestionTemplates] = None,
    focuses: Optional[Sequence[QuestionFocus]] = None,
) -> List[Tuple[str, QuestionFocus]]:
    """Fill part A with the paper's research object, then append each part-B variant.

    Deterministic in template order. A requested focus without a template is
    a fault.
    """
    templates = templates or default_templates()
    if focuses is None:
        focuses = list(QuestionFocus)
    prefix = templates.part_a.format(
        object=paper.label_a.research_object,
        property=paper.label_a.measured_property,
    )
    questions: List[Tuple[str, QuestionFocus]] = []
    for focus in focuses:
        variants = templates.part_b.get(focus)
        if not variants:
            raise ValueError(f"no template for focus {focus.value!r}")
        for variant in variants:
            questions.append((f"{prefix} {variant}", focus))
    return questions


@dataclass
class ParaphrasedQuestion:
    question: str
    focus: QuestionFocus
    generated: bool = True


def paraphrase_questions(
    questions: Sequence[Tuple[str, QuestionFocus]], gateway
) -> List[ParaphrasedQuestion]:
    """Opt-in gateway pass that adds one reworded variant per question.

    Variants are flagged as generated; the deterministic template fills stay
    the canonical surface forms, so offline runs never depend on this.
    """
    variants: List[ParaphrasedQuestion] = []
    for question, focus in questions:
        prompt = (
            "Reword the following question once, preserving its exact meaning."
            f" Reply with only the reworded question.\nQuestion: {question}"
        )
        text = gateway.complete(prompt, temperature=0.7).text.strip()
        if text and text != question:
            variants.append(ParaphrasedQuestion(question=text, focus=focus))
    return variants


_ANSWER_PROMPT = (
    "Write a short factual answer to the question, using only the grounding items.\n"
    "Question: {question}\n"
    "Grounding items: {items}\n"
    "Context: {context}\n"
    "Every grounding item must appear verbatim in the answer."
)


def _answer_prompt(question: str, paper: Paper, payload: Sequence[str]) -> str:
    context = (
        f"predict {paper.label_a.measured_property} in {paper.label_a.research_object}"
    )
    return _ANSWER_PROMPT.format(question=question, items=" | ".join(payload), context=context)


class OfflineAnswerer:
    """Deterministic answer backend: reads the grounding lines of the prompt
    and states them in a single sentence."""

    def complete(self, prompt: str, temperature: Optional[float] = None) -> Completion:
        items_match = re.search(r"^Grounding items: (.*)$", prompt, re.MULTILINE)
        context_match = re.search(r"^Context: (.*)$", prompt, re.MULTILINE)
        items = items_match.group(1).split(" | ") if items_match else []
        context = context_match.group(1) if context_match else "the stated task"
        text = f"This study used {', '.join(items)} to {context}."
        return Completion(text=text, prompt_tokens=len(prompt.split()), completion_tokens=len(text.split()))


def generate_answer(question: str, paper: Paper, focus: QuestionFocus, gateway) -> str:
    """Gateway answer constrained to the focus labels; one corrective retry on
    a containment failure, then answer-unfaithful."""
    payload = focus_payload(paper, focus)
    if not payload:
        raise ValueError(f"paper {paper.id} has no labels for focus {focus.value!r}")
    prompt = _answer_prompt(question, paper, payload)
    answer = gateway.complete(prompt, temperature=0.0).text
    missing = [item for item in payload if item not in answer]
    if missing:
        corrective = (
            prompt
            + "\nThe previous answer omitted: "
            + " | ".join(missing)
            + ". Include every grounding item verbatim."
        )
        answer = gateway.complete(corrective, temperature=0.0).text
        missing = [item for item in payload if item not in answer]
        if missing:
            raise AnswerUnfaithfulError(
                f"answer dropped {len(missing)} grounding item(s)", missing=missing
            )
    return answer


@dataclass
class CleaningRule:
    pattern: re.Pattern
    replacement: str


def default_cleaning_rules() -> List[CleaningRule]:
    data = assets.load_json("cleaning_rules.json")
    return [CleaningRule(re.compile(entry["pattern"]), entry["replacement"]) for entry in data]


def clean_text(text: str, rules: Optional[Sequence[CleaningRule]] = None) -> str:
    if rules is None:
        rules = default_cleaning_rules()
    for rule in rules:
        text = rule.pattern.sub(rule.replacement, text)
    return text


def clean_item(item: IftItem, rules: Optional[Sequence[CleaningRule]] = None) -> IftItem:
    """Apply the ordered rewrite rules to the answer; idempotent for the shipped set."""
    return IftItem(
        question=item.question,
        answer=clean_text(item.answer, rules),
        source_paper=item.source_paper,
        focus=item.focus,
    )


def item_errors(
    item: IftItem,
    paper: Optional[Paper],
    rules: Optional[Sequence[CleaningRule]] = None,
) -> List[str]:
    errors: List[str] = []
    if paper is None:
        errors.append("source paper not found")
        return errors
    for label in focus_payload(paper, item.focus):
        if label not in item.answer:
            errors.append(f"missing label {label!r}")
    if clean_text(item.answer, rules) != item.answer:
        errors.append("answer is not a cleaning fixpoint")
    return errors


def generate_items(
    papers: Sequence[Paper],
    gateway=None,
    templates: Optional[QuestionTemplates] = None,
    focuses: Optional[Sequence[QuestionFocus]] = None,
    rules: Optional[Sequence[CleaningRule]] = None,
) -> List[IftItem]:
    """Run the full factory over a corpus; focuses without labels are skipped."""
    gateway = gateway or OfflineAnswerer()
    templates = templates or default_templates()
    rules = default_cleaning_rules() if rules is None else rules
    items: List[IftItem] = []
    for paper in papers:
        wanted = [f for f in (focuses or list(QuestionFocus)) if focus_payload(paper, f)]
        for question, focus in generate_questions(paper, templates, wanted):
            answer = generate_answer(question, paper, focus, gateway)
            items.append(
                clean_item(
                    IftItem(question=question, answer=answer, source_paper=paper.id, focus=focus),
                    rules,
                )
            )
    return items


def export_ift(
    items: Sequence[IftItem],
    papers: Mapping[PaperId, Paper] | CorpusStore,
    rules: Optional[Sequence[CleaningRule]] = None,
) -> str:
    """Byte-stable JSONL sorted by (source_paper, focus); faults on invalid items."""
    lookup = papers.get if isinstance(papers, CorpusStore) else papers.get
    for index, item in enumerate(items):
        errors = item_errors(item, lookup(item.source_paper), rules)
        if errors:
            raise ValueError(f"item {index} violates invariants: {'; '.join(errors)}")
    ordered = sorted(enumerate(items), key=lambda pair: (pair[1].source_paper, pair[1].focus.value, pair[0]))
    lines = [
        json.dumps(
            {
                "question": item.question,
                "answer": item.answer,
                "source_paper": item.source_paper,
                "focus": item.focus.value,
            },
            ensure_ascii=False,
        )
        for _, item in ordered
    ]
    return "\n".join(lines) + ("\n" if lines else "")
