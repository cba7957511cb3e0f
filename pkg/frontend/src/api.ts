/**
 * Typed client for the annotation service.
 *
 * All methods throw ApiError on a non-2xx response (with the server's
 * detail message) and let network failures propagate as TypeError, so
 * callers can tell "service said no" from "service unreachable".
 */

/** The word the annotator should work on next. */
export interface NextWord {
  word: string;
  remaining_count: number;
}

/** One ranked candidate synset, exactly as the service sent it. */
export interface CandidateRow {
  synset_id: string;
  words: string[];
  score: number;
  rank: number;
}

export interface CommitResult {
  new_synset_id: string;
}

export type Verdict = "accept" | "reject";

/** A non-2xx HTTP response, carrying the server's detail message. */
export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `HTTP ${resp.status}`;
}

export class AnnotationApi {
  private readonly base: string;
  private readonly fetchFn: typeof fetch;

  /**
   * @param baseUrl service origin, e.g. "http://127.0.0.1:8570"
   * @param fetchFn injectable for tests; defaults to the global fetch
   */
  constructor(baseUrl: string, fetchFn: typeof fetch = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(`${this.base}${path}`, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return resp;
  }

  /** Next pending word, or null when the queue is empty. */
  async nextWord(): Promise<NextWord | null> {
    try {
      const resp = await this.request("/words/next");
      return (await resp.json()) as NextWord;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  /** Ranked candidates for a word, in server order. */
  async candidates(word: string, k?: number): Promise<CandidateRow[]> {
    const params = new URLSearchParams({ word });
    if (k !== undefined) params.set("k", String(k));
    const resp = await this.request(`/candidates?${params}`);
    return (await resp.json()) as CandidateRow[];
  }

  /** Record an accept/reject verdict for one candidate. */
  async decide(
    word: string,
    synsetId: string,
    verdict: Verdict,
    annotator: string,
  ): Promise<void> {
    await this.request("/decision", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        word,
        synset_id: synsetId,
        verdict,
        annotator,
      }),
    });
  }

  /** Graft the word under its accepted parents. */
  async commit(word: string): Promise<CommitResult> {
    const resp = await this.request("/commit", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ word }),
    });
    return (await resp.json()) as CommitResult;
  }

  /** Where the current taxonomy can be downloaded as JSON Lines. */
  exportUrl(): string {
    return `${this.base}/taxonomy/export`;
  }
}
