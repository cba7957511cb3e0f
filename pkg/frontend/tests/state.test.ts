import { describe, expect, it } from "vitest";

import type {
  AnnotationApi,
  CandidateRow,
  CommitResult,
  NextWord,
} from "../src/api.js";
import { ApiError } from "../src/api.js";
import { SessionStore, type WordView } from "../src/state.js";

const ROWS: Record<string, CandidateRow[]> = {
  puppy: [
    { synset_id: "s3", words: ["dog"], score: 0.99, rank: 1 },
    { synset_id: "s2", words: ["animal"], score: 0.81, rank: 2 },
  ],
  kitten: [{ synset_id: "s4", words: ["cat"], score: 0.97, rank: 1 }],
};

/**
 * In-memory stand-in for the service: a word queue, decision bookkeeping,
 * and failure switches the tests flip per scenario.
 */
class FakeApi {
  queue: string[] = ["puppy", "kitten"];
  decisions: Array<{ word: string; synsetId: string; verdict: string }> = [];
  commits: string[] = [];
  failNextWord = false;
  failDecide: Error | null = null;
  failCommit: Error | null = null;
  pendingCommit: (() => void) | null = null;

  async nextWord(): Promise<NextWord | null> {
    if (this.failNextWord) throw new TypeError("fetch failed");
    const word = this.queue[0];
    if (word === undefined) return null;
    return { word, remaining_count: this.queue.length };
  }

  async candidates(word: string): Promise<CandidateRow[]> {
    const rows = ROWS[word];
    if (!rows) throw new ApiError(422, `cannot resolve '${word}'`);
    return rows;
  }

  async decide(
    word: string,
    synsetId: string,
    verdict: string,
  ): Promise<void> {
    if (this.failDecide) throw this.failDecide;
    this.decisions.push({ word, synsetId, verdict });
  }

  async commit(word: string): Promise<CommitResult> {
    if (this.pendingCommit) {
      await new Promise<void>((resolve) => {
        this.pendingCommit = resolve;
      });
    }
    if (this.failCommit) throw this.failCommit;
    this.commits.push(word);
    this.queue = this.queue.filter((w) => w !== word);
    return { new_synset_id: "new-1" };
  }

  exportUrl(): string {
    return "http://svc/taxonomy/export";
  }
}

function makeStore(api: FakeApi): SessionStore {
  return new SessionStore(api as unknown as AnnotationApi, "tester");
}

function word(store: SessionStore): WordView {
  const v = store.view;
  if (v.kind !== "word") throw new Error(`expected word view, got ${v.kind}`);
  return v;
}

describe("SessionStore", () => {
  it("loads the first word with rows in server order", async () => {
    const store = makeStore(new FakeApi());
    await store.start();
    const v = word(store);
    expect(v.word).toBe("puppy");
    expect(v.position).toBe(1);
    expect(v.total).toBe(2);
    expect(v.rows.map((r) => r.synsetId)).toEqual(["s3", "s2"]);
    expect(v.rows.every((r) => r.verdict === "undecided")).toBe(true);
  });

  it("shows the done screen when the queue is empty", async () => {
    const api = new FakeApi();
    api.queue = [];
    const store = makeStore(api);
    await store.start();
    expect(store.view).toEqual({ kind: "done", committed: 0 });
  });

  it("shows the banner when the service is unreachable", async () => {
    const api = new FakeApi();
    api.failNextWord = true;
    const store = makeStore(api);
    await store.start();
    expect(store.view).toEqual({
      kind: "disconnected",
      message: "fetch failed",
    });
  });

  it("applies a verdict optimistically and persists it", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    expect(word(store).rows[0]?.verdict).toBe("accepted");
    expect(api.decisions).toEqual([
      { word: "puppy", synsetId: "s3", verdict: "accept" },
    ]);
  });

  it("rolls back and surfaces the error when the service refuses", async () => {
    const api = new FakeApi();
    api.failDecide = new ApiError(404, "unknown synset 's3'");
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    const v = word(store);
    expect(v.rows[0]?.verdict).toBe("undecided");
    expect(v.error).toBe("unknown synset 's3'");
  });

  it("reject then accept ends accepted", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "reject");
    await store.decide(0, "accept");
    expect(word(store).rows[0]?.verdict).toBe("accepted");
    expect(api.decisions.map((d) => d.verdict)).toEqual([
      "reject",
      "accept",
    ]);
  });

  it("repeating the same verdict sends nothing", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    await store.decide(0, "accept");
    expect(api.decisions).toHaveLength(1);
  });

  it("blocks commit with zero accepted rows", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.commit();
    expect(api.commits).toEqual([]);
    expect(word(store).word).toBe("puppy");
  });

  it("commit advances to the next word and counts it", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    await store.commit();
    const v = word(store);
    expect(api.commits).toEqual(["puppy"]);
    expect(v.word).toBe("kitten");
    expect(v.position).toBe(2);
    expect(v.total).toBe(2);
  });

  it("finishing the queue reaches the done screen with the count", async () => {
    const api = new FakeApi();
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    await store.commit();
    await store.decide(0, "accept");
    await store.commit();
    expect(store.view).toEqual({ kind: "done", committed: 2 });
  });

  it("a second commit while one is in flight is dropped", async () => {
    const api = new FakeApi();
    api.pendingCommit = () => undefined;
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    const first = store.commit();
    expect(word(store).committing).toBe(true);
    const second = store.commit();
    const release = api.pendingCommit;
    api.pendingCommit = null;
    if (release) release();
    await Promise.all([first, second]);
    expect(api.commits).toEqual(["puppy"]);
  });

  it("commit refusal keeps the word and shows the reason", async () => {
    const api = new FakeApi();
    api.failCommit = new ApiError(409, "'puppy' already committed");
    const store = makeStore(api);
    await store.start();
    await store.decide(0, "accept");
    await store.commit();
    const v = word(store);
    expect(v.word).toBe("puppy");
    expect(v.committing).toBe(false);
    expect(v.error).toBe("'puppy' already committed");
  });

  it("selection moves within bounds", async () => {
    const store = makeStore(new FakeApi());
    await store.start();
    store.moveSelection(1);
    expect(word(store).selected).toBe(1);
    store.moveSelection(1);
    expect(word(store).selected).toBe(1);
    store.moveSelection(-5);
    expect(word(store).selected).toBe(0);
    store.select(1);
    expect(word(store).selected).toBe(1);
  });

  it("notifies subscribers and honours unsubscribe", async () => {
    const store = makeStore(new FakeApi());
    const seen: string[] = [];
    const off = store.onChange((v) => seen.push(v.kind));
    await store.start();
    expect(seen).toEqual(["loading", "word"]);
    off();
    await store.decide(0, "accept");
    expect(seen).toEqual(["loading", "word"]);
  });
});
