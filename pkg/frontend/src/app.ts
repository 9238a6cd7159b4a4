/**
 * Session orchestration: one keyword under review at a time, verdicts
 * posted optimistically, offline verdicts queued and replayed in order,
 * interval rows updated only from service responses.
 */

import { ApiClient, ApiError } from "./api.js";
import { VerdictQueue, isNetworkError } from "./queue.js";
import {
  renderCompletionPanel,
  renderIntervalChart,
  renderItemPanel,
  renderStatusBar,
} from "./render.js";
import type { CiRow, NextItem, ReviewItem } from "./types.js";

export interface AppElements {
  item: HTMLElement;
  chart: HTMLElement;
  status: HTMLElement;
}

export class ReviewApp {
  sessionId = "";
  keywords: string[] = [];
  activeIndex = 0;
  current: ReviewItem | null = null;
  exhausted = new Set<string>();
  intervals = new Map<string, CiRow>();
  progress = new Map<string, string>();
  online = true;
  toast: string | null = null;
  arbiterId: string;

  constructor(
    private readonly client: ApiClient,
    private readonly queue: VerdictQueue,
    private readonly elements: AppElements,
    private readonly doc: Document,
    arbiterId = "reviewer",
  ) {
    this.arbiterId = arbiterId;
  }

  get activeKeyword(): string {
    return this.keywords[this.activeIndex];
  }

  async start(keywords: string[], n: number, seed: number): Promise<void> {
    const session = await this.client.createSession(keywords, n, seed);
    this.sessionId = session.session_id;
    this.keywords = Object.keys(session.samples);
    this.activeIndex = 0;
    for (const kw of this.keywords) this.progress.set(kw, `0/${session.samples[kw]}`);
    await this.refreshSummary();
    await this.fetchNext();
  }

  /** y/n keystroke: post the verdict (or queue it) and advance. */
  async verdict(correct: boolean): Promise<void> {
    if (!this.current) return;
    const item = this.current;
    const verdict = {
      report_id: item.report_id,
      keyword: item.keyword,
      correct,
      arbiter_id: this.arbiterId,
    };
    try {
      const row = await this.client.submitVerdict(this.sessionId, verdict);
      this.intervals.set(row.keyword, row);
      this.progress.set(row.keyword, `${row.n_sampled}/${item.total}`);
      this.toast = null;
    } catch (error) {
      if (error instanceof ApiError) {
        // semantic rejection: keep the item on screen for a second look
        this.toast = `rejected: ${error.message}`;
        this.render();
        return;
      }
      // network failure: queue for replay and move on optimistically
      this.queue.enqueue(this.sessionId, verdict);
      this.online = false;
      this.toast = "offline — verdict queued";
    }
    await this.fetchNext();
  }

  /** s keystroke: rotate to the next keyword that still has items. */
  async skip(): Promise<void> {
    if (this.keywords.length <= 1) {
      this.toast = "only one keyword in this session";
      this.render();
      return;
    }
    this.activeIndex = (this.activeIndex + 1) % this.keywords.length;
    await this.fetchNext();
  }

  /** Replay queued verdicts oldest-first, then resume the session. */
  async flushQueue(): Promise<number> {
    const delivered = await this.queue.flush(
      async (sessionId, verdict) => {
        const row = await this.client.submitVerdict(sessionId, verdict);
        this.intervals.set(row.keyword, row);
        return row;
      },
      (verdict, error) => {
        this.toast = `rejected during replay: ${(error as Error).message} (${verdict.report_id})`;
      },
    );
    if (this.queue.size === 0) {
      this.online = true;
      if (delivered > 0) this.toast = `${delivered} queued verdict(s) synced`;
      await this.refreshSummary();
      await this.fetchNext();
    } else {
      this.render();
    }
    return delivered;
  }

  async fetchNext(): Promise<void> {
    try {
      const item: NextItem = await this.client.nextItem(this.sessionId, this.activeKeyword);
      this.online = true;
      if (item.exhausted) {
        this.exhausted.add(item.keyword);
        this.intervals.set(item.keyword, item.summary);
        this.progress.set(item.keyword, `${item.summary.n_sampled}/${item.total}`);
        this.current = null;
        const unfinished = this.keywords.findIndex((kw) => !this.exhausted.has(kw));
        if (unfinished >= 0 && this.keywords[unfinished] !== this.activeKeyword) {
          this.activeIndex = unfinished;
          await this.fetchNext();
          return;
        }
      } else {
        this.current = item;
        this.progress.set(item.keyword, `${item.total - item.remaining}/${item.total}`);
      }
    } catch (error) {
      if (isNetworkError(error)) {
        this.online = false;
        this.current = null;
      } else {
        this.toast = `error: ${(error as Error).message}`;
      }
    }
    this.render();
  }

  async refreshSummary(): Promise<void> {
    try {
      for (const row of await this.client.summary(this.sessionId)) {
        this.intervals.set(row.keyword, row);
      }
    } catch (error) {
      if (isNetworkError(error)) this.online = false;
    }
  }

  render(): void {
    const doc = this.doc;
    this.elements.item.replaceChildren();
    if (this.current) {
      this.elements.item.appendChild(renderItemPanel(doc, this.current));
    } else if (!this.online) {
      const panel = doc.createElement("div");
      panel.className = "offline-panel";
      panel.textContent = "offline — queued verdicts will sync on reconnect";
      this.elements.item.appendChild(panel);
    } else if (this.keywords.length > 0 && this.keywords.every((kw) => this.exhausted.has(kw))) {
      const kw = this.activeKeyword;
      const row = this.intervals.get(kw);
      if (row) this.elements.item.appendChild(renderCompletionPanel(doc, kw, row));
    }

    const rows = this.keywords
      .map((kw) => this.intervals.get(kw))
      .filter((row): row is CiRow => row !== undefined);
    this.elements.chart.replaceChildren(renderIntervalChart(doc, rows, this.progress));
    this.elements.status.replaceChildren(
      renderStatusBar(doc, this.online, this.queue.size, this.toast),
    );
  }
}
