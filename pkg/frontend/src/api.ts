// Typed client for the spectraqa HTTP API.

export interface ParsedQuestion {
  research_object: string;
  measured_property: string | null;
  spectral_method: string | null;
  question_objective: string | null;
  task: string;
  raw_question: string;
}

export interface RankedHit {
  paper_id: string;
  score: number;
  rank: number;
}

export interface Snippet {
  paper_id: string;
  field_of_origin: string;
  text: string;
}

export interface Answer {
  text: string;
  citations: string[];
  bundle_fingerprint: string;
}

export interface AskResponse {
  answer: Answer;
  parsed: ParsedQuestion;
  hits: RankedHit[];
  snippets: Snippet[];
  timing: Record<string, number>;
}

export interface MetricValue {
  metric_name: string;
  value_text: string;
}

export interface PaperRecord {
  id: string;
  title: string;
  year: number;
  abstract: string;
  label_a: {
    research_object: string;
    measured_property: string;
    spectral_methods: string[];
    outcome_summary?: string | null;
  };
  label_b: {
    preprocessing_methods: string[];
    feature_processing_methods: string[];
    models: string[];
    metrics_and_outcomes: MetricValue[];
  };
}

export interface StatusResponse {
  corpus_revision: number;
  index_revision: number;
  index_ready: boolean;
  num_papers: number;
  default_retriever: string;
}

export const RETRIEVERS = ["bow", "bm25", "tfidf"] as const;
export type Retriever = (typeof RETRIEVERS)[number];

/** API failure with the failing pipeline stage when the server names one. */
export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly stage?: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

declare global {
  interface Window {
    SPECTRAQA_API_BASE?: string;
  }
}

/** Base URL: build/runtime global, then localStorage override, then same origin. */
export function resolveApiBase(): string {
  if (typeof window !== "undefined") {
    if (window.SPECTRAQA_API_BASE) return window.SPECTRAQA_API_BASE;
    try {
      const stored = window.localStorage.getItem("spectraqa.apiBase");
      if (stored) return stored;
    } catch {
      // storage unavailable (private mode); fall through to same origin
    }
  }
  return "";
}

async function raiseForStatus(response: Response): Promise<never> {
  let stage: string | undefined;
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    const detail = body?.detail;
    if (typeof detail === "string") {
      message = detail;
    } else if (detail && typeof detail === "object") {
      stage = typeof detail.stage === "string" ? detail.stage : undefined;
      message = detail.error ?? detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status message
  }
  throw new ApiRequestError(response.status, message, stage);
}

export class ApiClient {
  constructor(
    readonly base: string = resolveApiBase(),
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!response.ok) await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, { signal });
    if (!response.ok) await raiseForStatus(response);
    return (await response.json()) as T;
  }

  ask(question: string, retriever?: Retriever, k?: number, signal?: AbortSignal): Promise<AskResponse> {
    return this.post<AskResponse>("/api/ask", { question, retriever, k }, signal);
  }

  retrieve(
    queryTerms: string,
    retriever: Retriever,
    k = 10,
    signal?: AbortSignal,
  ): Promise<{ hits: RankedHit[] }> {
    return this.post("/api/retrieve", { query_terms: queryTerms, retriever, k }, signal);
  }

  retrieveByQuestion(
    question: string,
    retriever: Retriever,
    k = 10,
    signal?: AbortSignal,
  ): Promise<{ hits: RankedHit[] }> {
    return this.post("/api/retrieve", { question, retriever, k }, signal);
  }

  getPaper(id: string, signal?: AbortSignal): Promise<PaperRecord> {
    return this.get(`/api/papers/${encodeURIComponent(id)}`, signal);
  }

  status(signal?: AbortSignal): Promise<StatusResponse> {
    return this.get("/api/status", signal);
  }
}
