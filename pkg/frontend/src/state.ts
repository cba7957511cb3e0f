/**
 * Session state machine for the annotation loop.
 *
 * The store holds exactly one view at a time and mutates it only through
 * user actions; every server write is applied optimistically and rolled
 * back if the service refuses it, so after any action sequence the local
 * state matches what a refetch would return.
 */

import type { AnnotationApi, Verdict } from "./api.js";

export type RowVerdict = "undecided" | "accepted" | "rejected";

/** One candidate as shown to the annotator: server row + local verdict. */
export interface UiRow {
  synsetId: string;
  words: string[];
  score: number;
  rank: number;
  verdict: RowVerdict;
}

export interface WordView {
  kind: "word";
  word: string;
  /** 1-based position in the queue as first seen, e.g. "1 of 2". */
  position: number;
  total: number;
  rows: UiRow[];
  selected: number;
  /** True while a commit request is in flight; blocks a second one. */
  committing: boolean;
  /** Last action error, shown as a toast until the next action. */
  error: string | null;
}

export type View =
  | { kind: "loading" }
  | WordView
  | { kind: "done"; committed: number }
  | { kind: "disconnected"; message: string };

export type Listener = (view: View) => void;

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

export class SessionStore {
  private current: View = { kind: "loading" };
  private listeners: Listener[] = [];
  private committed = 0;
  private total = 0;

  constructor(
    private readonly api: AnnotationApi,
    private readonly annotator: string,
  ) {}

  get view(): View {
    return this.current;
  }

  /** Subscribe to view changes; returns an unsubscribe function. */
  onChange(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(view: View): void {
    this.current = view;
    for (const listener of this.listeners) listener(view);
  }

  /** Fetch the current word and its candidates; entry point and retry. */
  async start(): Promise<void> {
    this.committed = 0;
    this.total = 0;
    this.set({ kind: "loading" });
    await this.loadCurrent();
  }

  private async loadCurrent(): Promise<void> {
    let next;
    try {
      next = await this.api.nextWord();
    } catch (err) {
      this.set({ kind: "disconnected", message: message(err) });
      return;
    }
    if (next === null) {
      this.set({ kind: "done", committed: this.committed });
      return;
    }
    if (this.total === 0) this.total = next.remaining_count;
    let rows;
    try {
      rows = await this.api.candidates(next.word);
    } catch (err) {
      // Unreachable service and unresolvable word both dead-end the loop;
      // the banner's message tells them apart.
      this.set({ kind: "disconnected", message: message(err) });
      return;
    }
    this.set({
      kind: "word",
      word: next.word,
      position: this.total - next.remaining_count + 1,
      total: this.total,
      // Server order is the display order; never reordered locally.
      rows: rows.map((r) => ({
        synsetId: r.synset_id,
        words: r.words,
        score: r.score,
        rank: r.rank,
        verdict: "undecided",
      })),
      selected: 0,
      committing: false,
      error: null,
    });
  }

  /** Move row selection by delta, clamped to the table. */
  moveSelection(delta: number): void {
    const v = this.current;
    if (v.kind !== "word" || v.rows.length === 0) return;
    const selected = Math.min(
      v.rows.length - 1,
      Math.max(0, v.selected + delta),
    );
    this.set({ ...v, selected });
  }

  select(index: number): void {
    const v = this.current;
    if (v.kind !== "word" || index < 0 || index >= v.rows.length) return;
    this.set({ ...v, selected: index });
  }

  /**
   * Accept or reject one row. The verdict is shown immediately; if the
   * service refuses, the row snaps back and the error becomes a toast.
   */
  async decide(index: number, verdict: Verdict): Promise<void> {
    const v = this.current;
    if (v.kind !== "word" || v.committing) return;
    const row = v.rows[index];
    if (row === undefined) return;
    const after: RowVerdict = verdict === "accept" ? "accepted" : "rejected";
    if (row.verdict === after) return;
    const before = row.verdict;

    const patch = (verdictNow: RowVerdict, error: string | null): void => {
      const live = this.current;
      if (live.kind !== "word" || live.word !== v.word) return;
      this.set({
        ...live,
        rows: live.rows.map((r, i) =>
          i === index ? { ...r, verdict: verdictNow } : r,
        ),
        error,
      });
    };

    patch(after, null);
    try {
      await this.api.decide(v.word, row.synsetId, verdict, this.annotator);
    } catch (err) {
      patch(before, message(err));
    }
  }

  /**
   * Commit the word under its accepted rows and advance the queue.
   * A no-op when nothing is accepted or a commit is already in flight.
   */
  async commit(): Promise<void> {
    const v = this.current;
    if (v.kind !== "word" || v.committing) return;
    if (!v.rows.some((r) => r.verdict === "accepted")) return;
    this.set({ ...v, committing: true, error: null });
    try {
      await this.api.commit(v.word);
    } catch (err) {
      const live = this.current;
      if (live.kind === "word" && live.word === v.word) {
        this.set({ ...live, committing: false, error: message(err) });
      }
      return;
    }
    this.committed += 1;
    await this.loadCurrent();
  }
}
