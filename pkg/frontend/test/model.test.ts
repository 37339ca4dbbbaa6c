import { describe, expect, it } from "vitest";

import type { AskResponse } from "../src/api.js";
import {
  answerSegments,
  citationChips,
  formatScore,
  parseTraceRows,
  sharedPaperIds,
  taskLabel,
} from "../src/model.js";

function payload(citations: string[], snippetIds: string[]): AskResponse {
  return {
    answer: { text: "answer", citations, bundle_fingerprint: "f" },
    parsed: {
      research_object: "apples",
      measured_property: "sweetness",
      spectral_method: null,
      question_objective: null,
      task: "spectral_method_selection",
      raw_question: "q",
    },
    hits: snippetIds.map((id, i) => ({ paper_id: id, score: 1 - i * 0.1, rank: i + 1 })),
    snippets: snippetIds.map((id) => ({ paper_id: id, field_of_origin: "abstract", text: "t" })),
    timing: {},
  };
}

describe("citationChips", () => {
  it("renders one chip per citation present in the payload", () => {
    const chips = citationChips(payload(["P2", "P1"], ["P1", "P2", "P3"]));
    expect(chips).toEqual([
      { paperId: "P2", ordinal: 1 },
      { paperId: "P1", ordinal: 2 },
    ]);
  });

  it("never fabricates a chip for an id missing from the payload", () => {
    // intercepted payload where the answer cites an id the server never returned
    const chips = citationChips(payload(["GHOST", "P1"], ["P1"]));
    expect(chips.map((c) => c.paperId)).toEqual(["P1"]);
  });

  it("is empty for an answer without citations", () => {
    expect(citationChips(payload([], ["P1"]))).toEqual([]);
  });
});

describe("sharedPaperIds", () => {
  it("highlights ids present in more than one column", () => {
    const shared = sharedPaperIds([
      { retriever: "bow", hits: [{ paper_id: "A", score: 1, rank: 1 }] },
      { retriever: "bm25", hits: [{ paper_id: "A", score: 1, rank: 1 }, { paper_id: "B", score: 0.5, rank: 2 }] },
      { retriever: "tfidf", hits: [{ paper_id: "C", score: 1, rank: 1 }] },
    ]);
    expect(shared).toEqual(new Set(["A"]));
  });

  it("ignores failed columns and duplicate ids within a column", () => {
    const shared = sharedPaperIds([
      { retriever: "bow", hits: [], error: "boom" },
      {
        retriever: "bm25",
        hits: [
          { paper_id: "A", score: 1, rank: 1 },
          { paper_id: "A", score: 0.9, rank: 2 },
        ],
      },
      { retriever: "tfidf", hits: [{ paper_id: "A", score: 1, rank: 1 }] },
    ]);
    expect(shared).toEqual(new Set(["A"]));
  });

  it("is empty when columns do not overlap", () => {
    const shared = sharedPaperIds([
      { retriever: "bow", hits: [{ paper_id: "A", score: 1, rank: 1 }] },
      { retriever: "bm25", hits: [{ paper_id: "B", score: 1, rank: 1 }] },
      { retriever: "tfidf", hits: [] },
    ]);
    expect(shared.size).toBe(0);
  });
});

describe("answerSegments", () => {
  it("turns verified citation tags into chips and keeps the rest as text", () => {
    const segments = answerSegments("Use NIR [P1] not [GHOST].", new Set(["P1"]));
    expect(segments).toEqual([
      { kind: "text", value: "Use NIR " },
      { kind: "chip", value: "P1" },
      { kind: "text", value: " not " },
      { kind: "text", value: "[GHOST]" },
      { kind: "text", value: "." },
    ]);
  });

  it("passes through text without tags", () => {
    expect(answerSegments("plain", new Set())).toEqual([{ kind: "text", value: "plain" }]);
  });
});

describe("display helpers", () => {
  it("formats scores to four decimals", () => {
    expect(formatScore(0.25)).toBe("0.2500");
    expect(formatScore(0.732359)).toBe("0.7324");
  });

  it("labels both task categories", () => {
    expect(taskLabel("spectral_method_selection")).toContain("category 1");
    expect(taskLabel("chemometrics_workflow")).toContain("category 2");
  });

  it("builds parse-trace rows omitting empty fields", () => {
    const rows = parseTraceRows({
      research_object: "apples",
      measured_property: null,
      spectral_method: "NIR",
      question_objective: "model",
      task: "chemometrics_workflow",
      raw_question: "q",
    });
    expect(rows).toEqual([
      ["research object", "apples"],
      ["spectral method", "NIR"],
      ["objective", "model"],
      ["task", "chemometrics workflow (category 2)"],
    ]);
  });
});
