// Pure view-model builders; everything rendered is derived from API payloads here.

import type { AskResponse, ParsedQuestion, RankedHit, Retriever } from "./api.js";

export interface CitationChip {
  paperId: string;
  ordinal: number;
}

/**
 * Citation chips for an answer. A chip is emitted only for ids that the same
 * payload actually returned as snippet sources: the console never fabricates
 * a citation, even against a misbehaving server.
 */
export function citationChips(response: AskResponse): CitationChip[] {
  const snippetIds = new Set(response.snippets.map((s) => s.paper_id));
  return response.answer.citations
    .filter((id) => snippetIds.has(id))
    .map((paperId, index) => ({ paperId, ordinal: index + 1 }));
}

export interface CompareColumn {
  retriever: Retriever;
  hits: RankedHit[];
  error?: string;
}

/** Paper ids that appear in more than one successful column. */
export function sharedPaperIds(columns: CompareColumn[]): Set<string> {
  const counts = new Map<string, number>();
  for (const column of columns) {
    if (column.error) continue;
    for (const id of new Set(column.hits.map((h) => h.paper_id))) {
      counts.set(id, (counts.get(id) ?? 0) + 1);
    }
  }
  return new Set([...counts.entries()].filter(([, n]) => n > 1).map(([id]) => id));
}

export function formatScore(score: number): string {
  return score.toFixed(4);
}

export function taskLabel(task: string): string {
  if (task === "spectral_method_selection") return "spectral method selection (category 1)";
  if (task === "chemometrics_workflow") return "chemometrics workflow (category 2)";
  return task;
}

/** Rows for the parse-trace panel; empty fields are omitted. */
export function parseTraceRows(parsed: ParsedQuestion): Array<[string, string]> {
  const rows: Array<[string, string]> = [["research object", parsed.research_object]];
  if (parsed.measured_property) rows.push(["measured property", parsed.measured_property]);
  if (parsed.spectral_method) rows.push(["spectral method", parsed.spectral_method]);
  if (parsed.question_objective) rows.push(["objective", parsed.question_objective]);
  rows.push(["task", taskLabel(parsed.task)]);
  return rows;
}

/**
 * Answer text split into plain-text and citation-tag segments, so tags can be
 * rendered as chips inline. Tags that are not verified citations stay text.
 */
export function answerSegments(
  text: string,
  validIds: ReadonlySet<string>,
): Array<{ kind: "text" | "chip"; value: string }> {
  const segments: Array<{ kind: "text" | "chip"; value: string }> = [];
  const pattern = /\[([^\[\]]+)\]/g;
  let cursor = 0;
  for (const match of text.matchAll(pattern)) {
    const start = match.index ?? 0;
    if (start > cursor) segments.push({ kind: "text", value: text.slice(cursor, start) });
    if (validIds.has(match[1])) {
      segments.push({ kind: "chip", value: match[1] });
    } else {
      segments.push({ kind: "text", value: match[0] });
    }
    cursor = start + match[0].length;
  }
  if (cursor < text.length) segments.push({ kind: "text", value: text.slice(cursor) });
  return segments;
}
