/**
 * Offline verdict queue.
 *
 * A verdict that cannot reach the server (network failure, not a semantic
 * rejection) is queued here and replayed in submission order once the
 * connection returns. Replays are safe to repeat: the server supersedes
 * per (report, keyword, arbiter), so flushing the same queue twice lands
 * in the same state.
 */

import type { Verdict } from "./types.js";

export interface QueueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_KEY = "radlabel.verdictQueue";

export class VerdictQueue {
  private pending: { sessionId: string; verdict: Verdict }[] = [];

  constructor(private readonly storage?: QueueStorage) {
    this.load();
  }

  get size(): number {
    return this.pending.length;
  }

  enqueue(sessionId: string, verdict: Verdict): void {
    this.pending.push({ sessionId, verdict });
    this.persist();
  }

  peekAll(): readonly { sessionId: string; verdict: Verdict }[] {
    return this.pending;
  }

  /**
   * Send queued verdicts oldest-first through `submit`. Stops at the first
   * network failure (the rest stay queued); a semantic rejection from the
   * server drops that verdict and continues, reporting it to `onRejected`.
   * Returns the number of verdicts delivered.
   */
  async flush(
    submit: (sessionId: string, verdict: Verdict) => Promise<unknown>,
    onRejected?: (verdict: Verdict, error: unknown) => void,
  ): Promise<number> {
    let delivered = 0;
    while (this.pending.length > 0) {
      const head = this.pending[0];
      try {
        await submit(head.sessionId, head.verdict);
        delivered += 1;
      } catch (error) {
        if (isNetworkError(error)) {
          this.persist();
          return delivered; // still offline; keep the rest in order
        }
        onRejected?.(head.verdict, error);
      }
      this.pending.shift();
      this.persist();
    }
    return delivered;
  }

  private load(): void {
    if (!this.storage) return;
    try {
      const raw = this.storage.getItem(STORAGE_KEY);
      if (raw) this.pending = JSON.parse(raw);
    } catch (error) {
      console.warn("verdict queue: could not restore persisted queue", error);
      this.pending = [];
    }
  }

  private persist(): void {
    if (!this.storage) return;
    try {
      this.storage.setItem(STORAGE_KEY, JSON.stringify(this.pending));
    } catch (error) {
      console.warn("verdict queue: could not persist", error);
    }
  }
}

/** fetch throws (TypeError and friends) on network failure; ApiError is not one. */
export function isNetworkError(error: unknown): boolean {
  return !(error instanceof Object && (error as { name?: string }).name === "ApiError");
}
