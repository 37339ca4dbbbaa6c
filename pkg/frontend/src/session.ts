// Client-local session history; survives reload through localStorage.

import type { AskResponse, Retriever } from "./api.js";

export interface SessionEntry {
  question: string;
  retriever: Retriever | "default";
  timestamp: number;
  response: AskResponse;
}

type StorageLike = Pick<Storage, "getItem" | "setItem" | "removeItem">;

const KEY = "spectraqa.history";

export class SessionHistory {
  constructor(
    private readonly storage: StorageLike,
    private readonly limit = 50,
  ) {}

  load(): SessionEntry[] {
    try {
      const raw = this.storage.getItem(KEY);
      if (!raw) return [];
      const parsed = JSON.parse(raw);
      if (!Array.isArray(parsed)) return [];
      return parsed
        .filter((e) => e && typeof e.question === "string" && typeof e.timestamp === "number")
        .sort((a, b) => a.timestamp - b.timestamp);
    } catch {
      return [];
    }
  }

  add(entry: SessionEntry): SessionEntry[] {
    const entries = this.load();
    entries.push(entry);
    const trimmed = entries.slice(-this.limit);
    this.storage.setItem(KEY, JSON.stringify(trimmed));
    return trimmed;
  }

  clear(): void {
    this.storage.removeItem(KEY);
  }
}
