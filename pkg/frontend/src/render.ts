/**
 * DOM rendering. Pure functions from state to elements; every statistic
 * shown comes verbatim from a service response (`display` strings), never
 * from arithmetic done here. Raw bounds are used only to size the interval
 * bars.
 */

import type { CiRow, EvidenceSpan, ReviewItem } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/**
 * Report text with evidence spans wrapped in <mark>. Spans that fall
 * outside the text are skipped with a console warning, per contract.
 */
export function renderReportText(doc: Document, text: string, spans: EvidenceSpan[]): HTMLElement {
  const container = el(doc, "div", "report-text");
  const valid = spans
    .filter((s) => {
      const ok = s.start >= 0 && s.end <= text.length && s.start < s.end;
      if (!ok) console.warn("evidence span out of range, rendering without highlight", s);
      return ok;
    })
    .sort((a, b) => a.start - b.start);

  let pos = 0;
  for (const span of valid) {
    if (span.start < pos) continue; // overlapping spans: first wins
    container.appendChild(doc.createTextNode(text.slice(pos, span.start)));
    const mark = el(doc, "mark", "evidence", text.slice(span.start, span.end));
    mark.dataset.sentenceIndex = String(span.sentence_index);
    container.appendChild(mark);
    pos = span.end;
  }
  container.appendChild(doc.createTextNode(text.slice(pos)));
  return container;
}

export function renderItemPanel(doc: Document, item: ReviewItem): HTMLElement {
  const panel = el(doc, "div", "item-panel");
  const header = el(doc, "div", "item-header");
  header.appendChild(el(doc, "span", "item-keyword", item.keyword));
  header.appendChild(
    el(doc, "span", "item-progress", `${item.position} of ${item.total} (${item.remaining} remaining)`),
  );
  header.appendChild(el(doc, "span", "item-report-id", item.report_id));
  panel.appendChild(header);
  panel.appendChild(renderReportText(doc, item.text, item.evidence));
  panel.appendChild(
    el(doc, "div", "item-help", "y = correct · n = incorrect · s = next keyword"),
  );
  return panel;
}

export function renderCompletionPanel(doc: Document, keyword: string, row: CiRow): HTMLElement {
  const panel = el(doc, "div", "completion-panel");
  panel.appendChild(el(doc, "h2", undefined, `${keyword}: sample complete`));
  panel.appendChild(
    el(
      doc,
      "p",
      "final-interval",
      `${row.n_correct}/${row.n_sampled} correct — interval ${row.display.interval}`,
    ),
  );
  return panel;
}

/** One row per keyword: progress, p-hat, interval text, and a bar. */
export function renderIntervalChart(doc: Document, rows: CiRow[], progress: Map<string, string>): HTMLElement {
  const chart = el(doc, "div", "interval-chart");
  for (const row of rows) {
    const line = el(doc, "div", "interval-row");
    line.dataset.keyword = row.keyword;
    line.appendChild(el(doc, "span", "interval-keyword", row.keyword));
    line.appendChild(el(doc, "span", "interval-progress", progress.get(row.keyword) ?? ""));

    const bar = el(doc, "div", "interval-bar");
    if (row.ci_lower !== null && row.ci_upper !== null) {
      const fill = el(doc, "div", "interval-fill");
      fill.style.left = `${(row.ci_lower * 100).toFixed(1)}%`;
      fill.style.width = `${(Math.max(row.ci_upper - row.ci_lower, 0.005) * 100).toFixed(1)}%`;
      bar.appendChild(fill);
    }
    line.appendChild(bar);

    const label =
      row.n_sampled === 0
        ? "no verdicts yet"
        : `p̂ ${row.display.p_hat} · ${row.display.interval}`;
    line.appendChild(el(doc, "span", "interval-text", label));
    chart.appendChild(line);
  }
  return chart;
}

export function renderStatusBar(
  doc: Document,
  online: boolean,
  unsynced: number,
  toast: string | null,
): HTMLElement {
  const bar = el(doc, "div", online ? "status-bar online" : "status-bar offline");
  bar.appendChild(el(doc, "span", "status-net", online ? "online" : "offline"));
  const badge = el(doc, "span", "status-unsynced", unsynced > 0 ? `${unsynced} unsynced` : "");
  badge.dataset.count = String(unsynced);
  bar.appendChild(badge);
  if (toast) bar.appendChild(el(doc, "span", "status-toast", toast));
  return bar;
}
