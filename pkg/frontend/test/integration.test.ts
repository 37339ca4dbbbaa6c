// Drives the console's client code against a real spectraqa server running
// with the mock gateway. Skipped when the server CLI is not on PATH.
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError, RETRIEVERS } from "../src/api.js";
import { CompareColumn, citationChips, sharedPaperIds } from "../src/model.js";

const PORT = 8900 + (process.pid % 97);
const BASE = `http://127.0.0.1:${PORT}`;

const serverAvailable = spawnSync("spectraqa", ["--help"], { stdio: "ignore" }).status === 0;

describe.skipIf(!serverAvailable)("console against a running server", () => {
  let server: ChildProcess;
  const api = new ApiClient(BASE);

  beforeAll(async () => {
    server = spawn("spectraqa", ["serve", "--mock", "--port", String(PORT)], {
      stdio: "ignore",
    });
    const deadline = Date.now() + 30_000;
    while (Date.now() < deadline) {
      try {
        const status = await api.status();
        if (status.index_ready) return;
      } catch {
        // not up yet
      }
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error("server did not become ready");
  }, 40_000);

  afterAll(() => {
    server?.kill();
  });

  it("answers a question and every citation chip resolves to a paper record", async () => {
    const response = await api.ask(
      "In the related study on the prediction of sweetness in apples, which spectral method is suitable?",
    );
    const chips = citationChips(response);
    expect(chips.length).toBeGreaterThan(0);

    const payloadIds = new Set(response.snippets.map((s) => s.paper_id));
    for (const chip of chips) {
      expect(payloadIds.has(chip.paperId)).toBe(true);
      const paper = await api.getPaper(chip.paperId);
      expect(paper.id).toBe(chip.paperId);
      expect(paper.abstract.length).toBeGreaterThan(0);
      expect(paper.label_a.spectral_methods.length).toBeGreaterThan(0);
    }
  }, 20_000);

  it("compare view gets three method columns from the API", async () => {
    const columns: CompareColumn[] = await Promise.all(
      RETRIEVERS.map(async (retriever) => ({
        retriever,
        hits: (await api.retrieve("apples sweetness samples", retriever, 10)).hits,
      })),
    );
    expect(columns.map((c) => c.retriever)).toEqual(["bow", "bm25", "tfidf"]);
    for (const column of columns) {
      expect(column.hits.length).toBeGreaterThan(0);
      expect(column.hits.map((h) => h.rank)).toEqual(
        Array.from({ length: column.hits.length }, (_v, i) => i + 1),
      );
    }
    // the demo corpus guarantees overlap on a broad entity query
    expect(sharedPaperIds(columns).size).toBeGreaterThan(0);
  }, 20_000);

  it("surfaces the failing stage for server-side errors", async () => {
    await expect(api.ask("hello there")).rejects.toSatisfy((err: unknown) => {
      return err instanceof ApiRequestError && err.status === 422;
    });
  }, 20_000);

  it("unknown papers yield a 404 the panel can report", async () => {
    await expect(api.getPaper("NOPE")).rejects.toSatisfy(
      (err: unknown) => err instanceof ApiRequestError && err.status === 404,
    );
  }, 20_000);
});
