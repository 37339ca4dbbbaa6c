"""Text-generation metrics: BLEU, ROUGE-1 F, a simplified exact-match METEOR,
and an LLM-judge scorer.

BLEU uses modified n-gram precision with add-one smoothing for n >= 2 only,
a geometric mean over orders, and the standard brevity penalty. METEOR is the
exact-match variant (no stems, synonyms, or paraphrase tables): greedy
left-to-right alignment preferring the fewest chunks, harmonic mean weighted
9:1 toward recall, fragmentation penalty 0.5 * (chunks / matches)^3.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import assets
from .errors import JudgeMalformedError
from .textproc import TokenStream, tokenize


@dataclass
class MetricReport:
    bleu: float
    rouge1_f: float
    meteor: float
    ai_score: Optional[float] = None


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: TokenStream, reference: TokenStream, max_n: int = 4) -> float:
    if not reference:
        raise ValueError("reference must be non-empty")
    if not candidate:
        return 0.0
    log_precisions = 0.0
    for n in range(1, max_n + 1):
        cand_ngrams = _ngrams(candidate, n)
        ref_ngrams = _ngrams(reference, n)
        matched = sum(min(count, ref_ngrams[gram]) for gram, count in cand_ngrams.items())
        total = sum(cand_ngrams.values())
        if n == 1:
            if matched == 0:
                return 0.0
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_precisions += math.log(precision)
    geo_mean = math.exp(log_precisions / max_n)
    c, r = len(candidate), len(reference)
    brevity = 1.0 if c > r else math.exp(1 - r / c)
    return brevity * geo_mean


def rouge1_f(candidate: TokenStream, reference: TokenStream) -> float:
    if not reference:
        raise ValueError("reference must be non-empty")
    if not candidate:
        return 0.0
    cand_counts = Counter(candidate)
    ref_counts = Counter(reference)
    overlap = sum(min(count, ref_counts[t]) for t, count in cand_counts.items())
    if overlap == 0:
        return 0.0
    precision = overlap / len(candidate)
    recall = overlap / len(reference)
    return 2 * precision * recall / (precision + recall)


def _align(candidate: TokenStream, reference: TokenStream) -> Tuple[int, int]:
    """Greedy left-to-right exact alignment; returns (matches, chunks).

    When a candidate token occurs at several unused reference positions, the
    position adjacent to the previous match is preferred so runs stay in one
    chunk.
    """
    positions: Dict[str, List[int]] = {}
    for i, token in enumerate(reference):
        positions.setdefault(token, []).append(i)
    used = set()
    matches = 0
    chunks = 0
    prev = -2
    for token in candidate:
        available = [i for i in positions.get(token, []) if i not in used]
        if not available:
            continue
        pick = prev + 1 if prev + 1 in available else available[0]
        used.add(pick)
        matches += 1
        if pick != prev + 1:
            chunks += 1
        prev = pick
    return matches, chunks


def meteor(candidate: TokenStream, reference: TokenStream) -> float:
    if not reference:
        raise ValueError("reference must be non-empty")
    if not candidate:
        return 0.0
    matches, chunks = _align(candidate, reference)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (chunks / matches) ** 3
    return f_mean * (1 - penalty)


def score_pair(candidate_text: str, reference_text: str) -> MetricReport:
    cand = tokenize(candidate_text)
    ref = tokenize(reference_text)
    return MetricReport(
        bleu=bleu(cand, ref),
        rouge1_f=rouge1_f(cand, ref),
        meteor=meteor(cand, ref),
    )


def evaluate_items(items: Sequence[Dict[str, str]]) -> Dict[str, object]:
    """Batch evaluation of {candidate, reference} pairs; returns per-item rows and means."""
    if not items:
        raise ValueError("items must be non-empty")
    rows = []
    for item in items:
        report = score_pair(item["candidate"], item["reference"])
        rows.append({"bleu": report.bleu, "rouge1_f": report.rouge1_f, "meteor": report.meteor})
    aggregate = {
        key: sum(row[key] for row in rows) / len(rows) for key in ("bleu", "rouge1_f", "meteor")
    }
    return {"items": rows, "aggregate": aggregate}


_SCORE_RE = re.compile(r"(\d+(?:\.\d+)?)")


@dataclass
class JudgeResult:
    score: float
    rationale: str


def ai_judge(
    question: str,
    answer: str,
    knowledge_text: str,
    gateway,
    rubric: Optional[str] = None,
) -> JudgeResult:
    """Send rubric + QA pair + knowledge to the gateway and parse a 1-5 score.

    Out-of-range or non-numeric output triggers one reprompt before a
    judge-malformed error.
    """
    rubric = rubric or assets.load_text("judge_rubric.txt")
    prompt = (
        f"{rubric}\n\nQuestion: {question}\n\nKnowledge:\n{knowledge_text}\n\n"
        f"Answer to evaluate:\n{answer}\n"
    )
    raw = gateway.complete(prompt, temperature=0.0).text
    parsed = _parse_score(raw)
    if parsed is None:
        raw = gateway.complete(
            prompt + "\nReply with a line of the form 'Score: N' where N is 1-5.",
            temperature=0.0,
        ).text
        parsed = _parse_score(raw)
        if parsed is None:
            raise JudgeMalformedError("judge returned no usable 1-5 score", raw_output=raw)
    return JudgeResult(score=parsed, rationale=raw)


def _parse_score(raw: str) -> Optional[float]:
    match = _SCORE_RE.search(raw)
    if not match:
        return None
    value = float(match.group(1))
    if not 1.0 <= value <= 5.0:
        return None
    return value
