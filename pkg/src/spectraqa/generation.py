"""Answer generation: splice question and knowledge into the prompt, call the
gateway, and attach mechanically verified citations.

The provenance contract is enforced here, never trusted to the model: bracket
tags parsed from the answer are filtered to ids that actually appear in the
bundle's snippets. An answer that cites nothing valid triggers one corrective
retry, then a citation-missing error.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import List, Optional

from . import assets
from .errors import CitationMissingError
from .knowledge import KnowledgeBundle
from .corpus import PaperId

NO_KNOWLEDGE_MARKER = "no retrieved knowledge"
NO_KNOWLEDGE_ANSWER = "No supporting literature was found in the corpus for this question."

_CITE_RE = re.compile(r"(?<!\\)\[([^\[\]\\]+)\]")


@dataclass
class GeneratedAnswer:
    text: str
    citations: List[PaperId]
    bundle_fingerprint: str


def _escape(text: str) -> str:
    """Keep snippet text from breaking the bracket-tag grammar of the block."""
    flat = text.replace("\n", " ")
    return flat.replace("\\", "\\\\").replace("[", "\\[").replace("]", "\\]")


def knowledge_block(bundle: KnowledgeBundle) -> str:
    if not bundle.snippets:
        return NO_KNOWLEDGE_MARKER
    return "\n".join(
        f"[{s.paper_id}] ({s.field_of_origin}): {_escape(s.text)}" for s in bundle.snippets
    )


def bundle_fingerprint(bundle: KnowledgeBundle) -> str:
    hasher = hashlib.sha256()
    hasher.update(bundle.question.raw_question.encode("utf-8"))
    for snippet in bundle.snippets:
        hasher.update(b"\x00")
        hasher.update(snippet.paper_id.encode("utf-8"))
        hasher.update(b"\x01")
        hasher.update(snippet.field_of_origin.encode("utf-8"))
        hasher.update(b"\x02")
        hasher.update(snippet.text.encode("utf-8"))
    return hasher.hexdigest()


def build_prompt(
    question: str,
    bundle: KnowledgeBundle,
    template: Optional[str] = None,
    style_instructions: Optional[str] = None,
) -> str:
    """Render the generation prompt; each slot is filled exactly once."""
    template = template or assets.load_text("generation_prompt.txt")
    style = style_instructions or assets.load_text("style_instructions.txt")
    for slot in ("question", "knowledge_block", "style_instructions"):
        if template.count("{" + slot + "}") != 1:
            raise ValueError(f"generation template must contain {{{slot}}} exactly once")
    return template.format(
        question=question,
        knowledge_block=knowledge_block(bundle),
        style_instructions=style.strip(),
    )


def parse_citations(answer_text: str) -> List[str]:
    """Bracket-tagged ids in order of first appearance, deduplicated."""
    seen: List[str] = []
    for tag in _CITE_RE.findall(answer_text):
        if tag not in seen:
            seen.append(tag)
    return seen


def generate(
    rendered_prompt: str,
    bundle: KnowledgeBundle,
    gateway,
    temperature: Optional[float] = None,
) -> GeneratedAnswer:
    """Obtain the answer and enforce the provenance contract on its citations."""
    fingerprint = bundle_fingerprint(bundle)
    if not bundle.snippets:
        return GeneratedAnswer(text=NO_KNOWLEDGE_ANSWER, citations=[], bundle_fingerprint=fingerprint)

    valid_ids = {s.paper_id for s in bundle.snippets}
    completion = gateway.complete(rendered_prompt, temperature=temperature)
    citations = [pid for pid in parse_citations(completion.text) if pid in valid_ids]
    if not citations:
        corrective = (
            rendered_prompt
            + "\n\nThe previous answer cited no retrieved paper. Tag every claim with"
            " one of the bracketed ids from the knowledge block."
        )
        completion = gateway.complete(corrective, temperature=temperature)
        citations = [pid for pid in parse_citations(completion.text) if pid in valid_ids]
        if not citations:
            raise CitationMissingError(
                "answer cited no id present in the bundle", answer_text=completion.text
            )
    return GeneratedAnswer(
        text=completion.text, citations=citations, bundle_fingerprint=fingerprint
    )
