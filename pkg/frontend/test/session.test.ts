import { describe, expect, it } from "vitest";

import type { AskResponse } from "../src/api.js";
import { SessionEntry, SessionHistory } from "../src/session.js";

class MemoryStorage {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

const response: AskResponse = {
  answer: { text: "a", citations: [], bundle_fingerprint: "f" },
  parsed: {
    research_object: "apples",
    measured_property: null,
    spectral_method: null,
    question_objective: null,
    task: "spectral_method_selection",
    raw_question: "q",
  },
  hits: [],
  snippets: [],
  timing: {},
};

function entry(question: string, timestamp: number): SessionEntry {
  return { question, retriever: "default", timestamp, response };
}

describe("SessionHistory", () => {
  it("persists entries across instances sharing storage", () => {
    const storage = new MemoryStorage();
    new SessionHistory(storage).add(entry("q1", 10));
    const reloaded = new SessionHistory(storage).load();
    expect(reloaded.map((e) => e.question)).toEqual(["q1"]);
  });

  it("keeps entries ordered by time", () => {
    const storage = new MemoryStorage();
    const history = new SessionHistory(storage);
    history.add(entry("later", 20));
    history.add(entry("earlier", 5));
    expect(history.load().map((e) => e.question)).toEqual(["earlier", "later"]);
  });

  it("trims to the configured limit", () => {
    const storage = new MemoryStorage();
    const history = new SessionHistory(storage, 2);
    history.add(entry("a", 1));
    history.add(entry("b", 2));
    history.add(entry("c", 3));
    expect(history.load().map((e) => e.question)).toEqual(["b", "c"]);
  });

  it("survives corrupted storage content", () => {
    const storage = new MemoryStorage();
    storage.setItem("spectraqa.history", "{nonsense");
    expect(new SessionHistory(storage).load()).toEqual([]);
  });

  it("clear removes everything", () => {
    const storage = new MemoryStorage();
    const history = new SessionHistory(storage);
    history.add(entry("a", 1));
    history.clear();
    expect(history.load()).toEqual([]);
  });
});
