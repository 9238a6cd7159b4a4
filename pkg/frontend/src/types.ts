/** Wire types mirroring the review service's JSON shapes. */

export interface EvidenceSpan {
  sentence_index: number;
  start: number;
  end: number;
}

export interface SessionInfo {
  session_id: string;
  stage: string;
  samples: Record<string, number>;
  skipped: Record<string, string>;
}

export interface ReviewItem {
  exhausted: false;
  report_id: string;
  keyword: string;
  text: string;
  evidence: EvidenceSpan[];
  position: number;
  total: number;
  remaining: number;
}

export interface ExhaustedItem {
  exhausted: true;
  keyword: string;
  total: number;
  remaining: 0;
  summary: CiRow;
}

export type NextItem = ReviewItem | ExhaustedItem;

/**
 * One keyword's interval row. `display` strings are rendered server-side;
 * the UI shows them verbatim and never recomputes statistics.
 */
export interface CiRow {
  keyword: string;
  n_positive: number;
  n_sampled: number;
  n_correct: number;
  p_hat: number | null;
  se: number | null;
  ci_lower: number | null;
  ci_upper: number | null;
  point_only: boolean | null;
  display: { p_hat: string; interval: string };
  superseded_previous?: boolean;
}

export interface Verdict {
  report_id: string;
  keyword: string;
  correct: boolean;
  arbiter_id: string;
}
