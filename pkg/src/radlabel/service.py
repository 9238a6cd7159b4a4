"""HTTP service driving a live spot-check session.

Serves the next unarbitrated sampled report with its evidence spans,
accepts verdicts into the append-only arbitration log, and returns the
continuously updated per-keyword confidence interval. The log plus the
sessions file are the only durable state: restarting the service over the
same files reconstructs every session exactly.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .corpus import ArbitrationRecord, Corpus, LabelRecord, append_arbitration, load_arbitrations
from .deid import has_fiducials
from .errors import RadlabelError
from .stats import (
    CiParams,
    SampleSpec,
    SummaryRow,
    draw_sample,
    effective_verdicts,
    per_keyword_seed,
    positive_population,
    summarize,
)


@dataclass
class ReviewSession:
    session_id: str
    keywords: list[str]
    sample_size: int
    seed: int
    samples: dict[str, list[str]] = field(default_factory=dict)  # keyword -> draw order
    skipped: dict[str, str] = field(default_factory=dict)        # keyword -> reason


class CreateSessionRequest(BaseModel):
    keywords: list[str] = Field(min_length=1)
    n: int = 33
    seed: int = 0


class VerdictRequest(BaseModel):
    report_id: str
    keyword: str
    correct: bool
    arbiter_id: str = "anonymous"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ReviewState:
    """All mutable service state; log appends serialized by one lock."""

    def __init__(
        self,
        corpus: Corpus,
        labels: list[LabelRecord],
        log_path: str | Path,
        sessions_path: str | Path | None = None,
        stage: str = "final",
        params: CiParams = CiParams(),
    ):
        self.corpus = corpus
        self.labels = labels
        self.stage = stage
        self.params = params
        self.log_path = Path(log_path)
        self.sessions_path = (
            Path(sessions_path) if sessions_path is not None else Path(str(log_path) + ".sessions")
        )
        self.populations = positive_population(labels, stage)
        self.evidence = {
            (rec.report_id, rec.keyword): rec.evidence
            for rec in labels
            if rec.final_status == "positive" or rec.nlp_status == "positive"
        }
        self.lock = threading.Lock()
        self.arbitrations: list[ArbitrationRecord] = (
            load_arbitrations(self.log_path) if self.log_path.exists() else []
        )
        self.sessions: dict[str, ReviewSession] = {}
        self._load_sessions()

    # -- session persistence ------------------------------------------------

    def _load_sessions(self) -> None:
        if not self.sessions_path.exists():
            return
        with open(self.sessions_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                session = self._build_session(
                    obj["session_id"], obj["keywords"], obj["n"], obj["seed"]
                )
                self.sessions[session.session_id] = session

    def _persist_session(self, session: ReviewSession) -> None:
        with open(self.sessions_path, "a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "session_id": session.session_id,
                        "keywords": session.keywords,
                        "n": session.sample_size,
                        "seed": session.seed,
                    }
                )
                + "\n"
            )

    def _build_session(self, session_id: str, keywords: list[str], n: int, seed: int) -> ReviewSession:
        session = ReviewSession(session_id, keywords, n, seed)
        for keyword in keywords:
            population = self.populations.get(keyword)
            if population is None:
                session.skipped[keyword] = "keyword not present in labels"
                continue
            if not population:
                session.skipped[keyword] = f"no {self.stage}-positive reports"
                continue
            size = min(n, len(population))
            spec = SampleSpec(keyword, len(population), size, per_keyword_seed(seed, keyword))
            session.samples[keyword] = draw_sample(spec, population)
        return session

    # -- session operations ---------------------------------------------------

    def create_session(self, keywords: list[str], n: int, seed: int) -> ReviewSession:
        with self.lock:
            session = self._build_session("s-" + uuid.uuid4().hex[:12], keywords, n, seed)
            if not session.samples:
                raise RadlabelError(
                    "no sampleable keywords: " + "; ".join(f"{k}: {v}" for k, v in session.skipped.items())
                )
            self.sessions[session.session_id] = session
            self._persist_session(session)
            return session

    def session(self, session_id: str) -> ReviewSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def arbitrated_pairs(self) -> dict[tuple[str, str], bool]:
        return effective_verdicts(self.arbitrations)

    def next_item(self, session: ReviewSession, keyword: str) -> dict:
        if keyword not in session.samples:
            reason = session.skipped.get(keyword, "keyword not part of this session")
            raise KeyError(reason)
        done = self.arbitrated_pairs()
        order = session.samples[keyword]
        for position, report_id in enumerate(order):
            if (report_id, keyword) in done:
                continue
            report = self.corpus.get(report_id)
            evidence = self.evidence.get((report_id, keyword), ())
            return {
                "exhausted": False,
                "report_id": report_id,
                "keyword": keyword,
                "text": report.text,
                "evidence": [
                    {"sentence_index": e.sentence_index, "start": e.start, "end": e.end}
                    for e in evidence
                ],
                "position": position + 1,
                "total": len(order),
                "remaining": sum(1 for rid in order if (rid, keyword) not in done),
            }
        return {
            "exhausted": True,
            "keyword": keyword,
            "total": len(order),
            "remaining": 0,
            "summary": self.keyword_summary(keyword),
        }

    def submit_verdict(
        self, session: ReviewSession, report_id: str, keyword: str, correct: bool, arbiter_id: str
    ) -> dict:
        if keyword not in session.samples:
            raise ValueError(f"keyword {keyword!r} is not part of this session")
        if report_id not in session.samples[keyword]:
            raise ValueError(f"report {report_id!r} is not in the drawn sample for {keyword!r}")
        record = ArbitrationRecord(report_id, keyword, correct, arbiter_id, _now())
        with self.lock:
            superseded = any(
                r.report_id == report_id and r.keyword == keyword and r.arbiter_id == arbiter_id
                for r in self.arbitrations
            )
            self.arbitrations.append(record)
            append_arbitration(record, self.log_path)
        result = self.keyword_summary(keyword)
        result["superseded_previous"] = superseded
        return result

    def keyword_summary(self, keyword: str) -> dict:
        rows = self._summary_rows()
        for row in rows:
            if row.keyword == keyword:
                return _row_payload(row)
        raise KeyError(keyword)

    def _summary_rows(self) -> list[SummaryRow]:
        with self.lock:
            log = list(self.arbitrations)
        return summarize(self.labels, log, self.params, self.stage)

    def summary(self, session: ReviewSession) -> list[dict]:
        keywords = set(session.samples)
        return [_row_payload(r) for r in self._summary_rows() if r.keyword in keywords]


def _row_payload(row: SummaryRow) -> dict:
    payload = {
        "keyword": row.keyword,
        "n_positive": row.n_positive,
        "n_sampled": row.n_sampled,
        "n_correct": row.n_correct,
        "p_hat": row.ci.p_hat if row.ci else None,
        "se": row.ci.se if row.ci else None,
        "ci_lower": row.ci.lower if row.ci else None,
        "ci_upper": row.ci.upper if row.ci else None,
        "point_only": row.ci.point_only if row.ci else None,
        "display": {
            "p_hat": row.csv_fields()[4],
            "interval": row.interval_display(),
        },
    }
    return payload


def create_app(
    corpus: Corpus,
    labels: list[LabelRecord],
    log_path: str | Path,
    sessions_path: str | Path | None = None,
    stage: str = "final",
    params: CiParams = CiParams(),
    allow_raw: bool = False,
) -> FastAPI:
    if not allow_raw and not has_fiducials(corpus):
        raise RadlabelError(
            "corpus carries no de-identification markers; run `radlabel deid` first "
            "or pass --allow-raw if this corpus is genuinely PHI-free"
        )
    state = ReviewState(corpus, labels, log_path, sessions_path, stage, params)
    app = FastAPI(title="radlabel review service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.review = state

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest) -> dict:
        for keyword in body.keywords:
            if keyword not in state.populations:
                raise HTTPException(404, f"unknown keyword {keyword!r}")
        try:
            session = state.create_session(body.keywords, body.n, body.seed)
        except RadlabelError as exc:
            raise HTTPException(409, str(exc)) from exc
        return {
            "session_id": session.session_id,
            "stage": state.stage,
            "samples": {k: len(v) for k, v in session.samples.items()},
            "skipped": session.skipped,
        }

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, keyword: str) -> dict:
        try:
            session = state.session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}") from None
        try:
            return state.next_item(session, keyword)
        except KeyError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.post("/sessions/{session_id}/verdicts")
    def submit_verdict(session_id: str, body: VerdictRequest) -> dict:
        try:
            session = state.session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}") from None
        try:
            return state.submit_verdict(
                session, body.report_id, body.keyword, body.correct, body.arbiter_id
            )
        except ValueError as exc:
            raise HTTPException(409, str(exc)) from None

    @app.get("/sessions/{session_id}/summary")
    def session_summary(session_id: str) -> list[dict]:
        try:
            session = state.session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}") from None
        return state.summary(session)

    return app
