// Researcher console: ask questions, inspect cited answers, click citations
// through to paper records, and compare the three retrievers side by side.

import {
  ApiClient,
  ApiRequestError,
  AskResponse,
  PaperRecord,
  RETRIEVERS,
  Retriever,
} from "./api.js";
import {
  CompareColumn,
  answerSegments,
  citationChips,
  formatScore,
  parseTraceRows,
  sharedPaperIds,
} from "./model.js";
import { SessionEntry, SessionHistory } from "./session.js";

const api = new ApiClient();
const history = new SessionHistory(window.localStorage);

const viewRoot = document.querySelector<HTMLDivElement>("#view")!;
const paperPanel = document.querySelector<HTMLDivElement>("#paper-panel")!;
const navAsk = document.querySelector<HTMLButtonElement>("#nav-ask")!;
const navCompare = document.querySelector<HTMLButtonElement>("#nav-compare")!;

// one in-flight controller per view; navigation cancels pending requests
let inflight: AbortController | null = null;

function resetInflight(): AbortSignal {
  inflight?.abort();
  inflight = new AbortController();
  return inflight.signal;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function errorBox(err: unknown): HTMLElement {
  if (err instanceof ApiRequestError) {
    const where = err.stage ? ` (failing stage: ${err.stage})` : "";
    return el("div", "error", `Request failed with ${err.status}${where}: ${err.message}`);
  }
  return el("div", "error", `Request failed: ${String(err)}`);
}

async function showPaper(id: string): Promise<void> {
  paperPanel.replaceChildren(el("p", "muted", `Loading ${id}...`));
  let paper: PaperRecord;
  try {
    paper = await api.getPaper(id);
  } catch (err) {
    paperPanel.replaceChildren(errorBox(err));
    return;
  }
  const box = el("div", "paper-detail");
  box.append(el("h3", undefined, `${paper.id}: ${paper.title} (${paper.year})`));
  const labels = el("dl");
  const addRow = (name: string, value: string) => {
    if (!value) return;
    labels.append(el("dt", undefined, name), el("dd", undefined, value));
  };
  addRow("research object", paper.label_a.research_object);
  addRow("measured property", paper.label_a.measured_property);
  addRow("spectral methods", paper.label_a.spectral_methods.join("; "));
  addRow("outcome", paper.label_a.outcome_summary ?? "");
  addRow("preprocessing", paper.label_b.preprocessing_methods.join("; "));
  addRow("feature processing", paper.label_b.feature_processing_methods.join("; "));
  addRow("models", paper.label_b.models.join("; "));
  addRow(
    "metrics",
    paper.label_b.metrics_and_outcomes.map((m) => `${m.metric_name}: ${m.value_text}`).join("; "),
  );
  box.append(labels, el("h4", undefined, "Abstract"), el("p", undefined, paper.abstract));
  paperPanel.replaceChildren(box);
}

function chipButton(id: string): HTMLButtonElement {
  const chip = el("button", "chip", id);
  chip.addEventListener("click", () => void showPaper(id));
  return chip;
}

function renderAnswer(container: HTMLElement, response: AskResponse): void {
  const chips = citationChips(response);
  const chipIds = new Set(chips.map((c) => c.paperId));

  const answer = el("div", "answer");
  const text = el("p", "answer-text");
  for (const segment of answerSegments(response.answer.text, chipIds)) {
    if (segment.kind === "chip") text.append(chipButton(segment.value));
    else text.append(segment.value);
  }
  answer.append(text);

  const chipRow = el("div", "chip-row");
  chipRow.append(el("span", "muted", "citations: "));
  if (chips.length === 0) chipRow.append(el("span", "muted", "none"));
  for (const chip of chips) chipRow.append(chipButton(chip.paperId));
  answer.append(chipRow);

  const trace = el("dl", "trace");
  for (const [name, value] of parseTraceRows(response.parsed)) {
    trace.append(el("dt", undefined, name), el("dd", undefined, value));
  }
  answer.append(el("h4", undefined, "Parse trace"), trace);

  const hits = el("ol", "hits");
  for (const hit of response.hits) {
    const item = el("li");
    item.append(chipButton(hit.paper_id), el("span", "muted", ` score ${formatScore(hit.score)}`));
    hits.append(item);
  }
  answer.append(el("h4", undefined, `Retrieved papers (${response.hits.length})`), hits);
  container.append(answer);
}

function renderAskView(): void {
  resetInflight();
  const form = el("form", "ask-form");
  const input = el("input");
  input.type = "text";
  input.placeholder = "e.g. Which preprocessing methods are used with NIR spectra to predict sweetness in apples?";
  const retrieverSelect = el("select");
  retrieverSelect.append(new Option("default retriever", ""));
  for (const r of RETRIEVERS) retrieverSelect.append(new Option(r, r));
  const submit = el("button", undefined, "Ask");
  submit.type = "submit";
  const feedback = el("div");
  form.append(input, retrieverSelect, submit);

  const results = el("div");
  const historyBox = el("div", "history");

  const renderHistory = (entries: SessionEntry[]) => {
    historyBox.replaceChildren(el("h4", undefined, "Session history"));
    for (const entry of [...entries].reverse()) {
      const row = el("button", "history-row", entry.question);
      row.addEventListener("click", () => {
        results.replaceChildren();
        renderAnswer(results, entry.response);
      });
      historyBox.append(row);
    }
  };
  renderHistory(history.load());

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = input.value.trim();
    feedback.replaceChildren();
    if (!question) {
      feedback.append(el("div", "error", "Enter a question first."));
      return;
    }
    const retriever = (retrieverSelect.value || undefined) as Retriever | undefined;
    const signal = resetInflight();
    results.replaceChildren(el("p", "muted", "Asking..."));
    api
      .ask(question, retriever, undefined, signal)
      .then((response) => {
        results.replaceChildren();
        renderAnswer(results, response);
        renderHistory(
          history.add({
            question,
            retriever: retriever ?? "default",
            timestamp: Date.now(),
            response,
          }),
        );
      })
      .catch((err) => {
        if (signal.aborted) return;
        results.replaceChildren(errorBox(err));
      });
  });

  viewRoot.replaceChildren(form, feedback, results, historyBox);
}

function renderCompareView(): void {
  resetInflight();
  const form = el("form", "ask-form");
  const input = el("input");
  input.type = "text";
  input.placeholder = "question or raw query terms, e.g. apples sweetness nir";
  const submit = el("button", undefined, "Compare retrievers");
  submit.type = "submit";
  const feedback = el("div");
  form.append(input, submit);
  const board = el("div", "compare-board");

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const terms = input.value.trim();
    feedback.replaceChildren();
    if (!terms) {
      feedback.append(el("div", "error", "Enter query terms first."));
      return;
    }
    const signal = resetInflight();
    board.replaceChildren(el("p", "muted", "Running all three retrievers..."));
    Promise.all(
      RETRIEVERS.map((retriever) =>
        api
          .retrieve(terms, retriever, 10, signal)
          .then((body): CompareColumn => ({ retriever, hits: body.hits }))
          .catch((err): CompareColumn => ({ retriever, hits: [], error: String(err) })),
      ),
    ).then((columns) => {
      if (signal.aborted) return;
      const shared = sharedPaperIds(columns);
      board.replaceChildren();
      for (const column of columns) {
        const col = el("div", "compare-column");
        col.append(el("h4", undefined, column.retriever));
        if (column.error) {
          col.append(errorBox(new Error(column.error)));
        } else if (column.hits.length === 0) {
          col.append(el("p", "muted", "no hits"));
        } else {
          const list = el("ol");
          for (const hit of column.hits) {
            const item = el("li", shared.has(hit.paper_id) ? "shared" : undefined);
            item.append(
              chipButton(hit.paper_id),
              el("span", "muted", ` ${formatScore(hit.score)}`),
            );
            list.append(item);
          }
          col.append(list);
        }
        board.append(col);
      }
    });
  });

  viewRoot.replaceChildren(form, feedback, board);
}

navAsk.addEventListener("click", () => renderAskView());
navCompare.addEventListener("click", () => renderCompareView());
renderAskView();

void api
  .status()
  .then((status) => {
    const banner = document.querySelector<HTMLSpanElement>("#status")!;
    banner.textContent = `${status.num_papers} papers indexed, default retriever ${status.default_retriever}`;
  })
  .catch(() => {
    const banner = document.querySelector<HTMLSpanElement>("#status")!;
    banner.textContent = "server unreachable";
  });
