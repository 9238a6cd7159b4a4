import { describe, expect, it, vi } from "vitest";

import { renderCompletionPanel, renderIntervalChart, renderReportText } from "../src/render.js";
import type { CiRow } from "../src/types.js";

function row(partial: Partial<CiRow> = {}): CiRow {
  return {
    keyword: "hemorrhage",
    n_positive: 3678,
    n_sampled: 33,
    n_correct: 31,
    p_hat: 31 / 33,
    se: 0.2376,
    ci_lower: 0.855,
    ci_upper: 1.0,
    point_only: false,
    display: { p_hat: "0.939", interval: "[0.855, 1.000]" },
    ...partial,
  };
}

describe("renderReportText", () => {
  it("wraps one evidence span in one mark", () => {
    const text = "Query for hemorrhage. Hemorrhage is present.";
    const node = renderReportText(document, text, [
      { sentence_index: 1, start: 22, end: 32 },
    ]);
    const marks = node.querySelectorAll("mark");
    expect(marks.length).toBe(1);
    expect(marks[0].textContent).toBe("Hemorrhage");
    expect(node.textContent).toBe(text);
  });

  it("renders plain text with zero spans", () => {
    const node = renderReportText(document, "No spans here.", []);
    expect(node.querySelectorAll("mark").length).toBe(0);
    expect(node.textContent).toBe("No spans here.");
  });

  it("skips out-of-range spans with a warning", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const node = renderReportText(document, "short", [
      { sentence_index: 0, start: 2, end: 99 },
    ]);
    expect(node.querySelectorAll("mark").length).toBe(0);
    expect(node.textContent).toBe("short");
    expect(warn).toHaveBeenCalledOnce();
    warn.mockRestore();
  });

  it("keeps multiple spans in order", () => {
    const text = "aaa bbb ccc";
    const node = renderReportText(document, text, [
      { sentence_index: 0, start: 8, end: 11 },
      { sentence_index: 0, start: 0, end: 3 },
    ]);
    const marks = [...node.querySelectorAll("mark")].map((m) => m.textContent);
    expect(marks).toEqual(["aaa", "ccc"]);
    expect(node.textContent).toBe(text);
  });
});

describe("renderIntervalChart", () => {
  it("shows service display strings verbatim", () => {
    const chart = renderIntervalChart(
      document,
      [row({ display: { p_hat: "0.77777", interval: "[weird, strings]" } })],
      new Map([["hemorrhage", "5/33"]]),
    );
    const text = chart.querySelector(".interval-text")!.textContent!;
    expect(text).toContain("0.77777");
    expect(text).toContain("[weird, strings]");
    expect(chart.querySelector(".interval-progress")!.textContent).toBe("5/33");
  });

  it("marks unsampled keywords without fabricating numbers", () => {
    const chart = renderIntervalChart(
      document,
      [row({ n_sampled: 0, ci_lower: null, ci_upper: null })],
      new Map(),
    );
    expect(chart.querySelector(".interval-text")!.textContent).toBe("no verdicts yet");
    expect(chart.querySelector(".interval-fill")).toBeNull();
  });
});

describe("renderCompletionPanel", () => {
  it("shows the final interval from the service", () => {
    const panel = renderCompletionPanel(document, "hemorrhage", row());
    expect(panel.textContent).toContain("hemorrhage: sample complete");
    expect(panel.textContent).toContain("31/33 correct");
    expect(panel.textContent).toContain("[0.855, 1.000]");
  });
});
