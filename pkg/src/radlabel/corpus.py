"""Line-oriented persistence for reports, labels, and arbitration logs.

Every file format is JSON Lines with a fixed field order so that loading
and re-writing the same data is byte-identical. Report text is stored
verbatim (JSON escapes the newlines); nothing here splits sentences.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusError

log = logging.getLogger(__name__)

NLP_STATUSES = ("positive", "negative", "irrelevant")
FINAL_STATUSES = ("positive", "unmarked")


@dataclass(frozen=True)
class Report:
    report_id: str
    site: str
    text: str
    metadata: tuple[tuple[str, str], ...] = ()

    def metadata_dict(self) -> dict[str, str]:
        return dict(self.metadata)


@dataclass
class Corpus:
    reports: list[Report]
    source_path: str = "<memory>"

    def __post_init__(self) -> None:
        self.reports.sort(key=lambda r: r.report_id)
        self._by_id = {r.report_id: r for r in self.reports}

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self) -> Iterator[Report]:
        return iter(self.reports)

    def get(self, report_id: str) -> Report:
        try:
            return self._by_id[report_id]
        except KeyError:
            raise CorpusError(f"unknown report_id: {report_id!r}") from None

    def __contains__(self, report_id: str) -> bool:
        return report_id in self._by_id


@dataclass(frozen=True)
class Evidence:
    sentence_index: int
    start: int
    end: int


@dataclass(frozen=True)
class LabelRecord:
    report_id: str
    keyword: str
    condition: str
    nlp_status: str   # positive | negative | irrelevant
    final_status: str  # positive | unmarked
    evidence: tuple[Evidence, ...] = ()


@dataclass(frozen=True)
class ArbitrationRecord:
    report_id: str
    keyword: str
    correct: bool
    arbiter_id: str
    timestamp: str


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _require(obj: dict, key: str, path: str | Path, lineno: int) -> object:
    if key not in obj:
        raise CorpusError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def load_corpus(path: str | Path) -> Corpus:
    """Read a reports file; sorted by report_id, duplicate ids rejected."""
    reports: list[Report] = []
    seen: set[str] = set()
    for lineno, obj in _iter_jsonl(path):
        report_id = _require(obj, "report_id", path, lineno)
        text = _require(obj, "text", path, lineno)
        if not isinstance(report_id, str) or not report_id:
            raise CorpusError(f"{path}:{lineno}: report_id must be a nonempty string")
        if not isinstance(text, str) or not text:
            raise CorpusError(f"{path}:{lineno}: text must be a nonempty string")
        if report_id in seen:
            raise CorpusError(f"{path}:{lineno}: duplicate report_id {report_id!r}")
        seen.add(report_id)
        meta_obj = obj.get("metadata") or {}
        if not isinstance(meta_obj, dict):
            raise CorpusError(f"{path}:{lineno}: metadata must be an object")
        metadata = tuple((str(k), str(v)) for k, v in meta_obj.items())
        reports.append(Report(report_id, str(obj.get("site", "")), text, metadata))
    if not reports:
        log.warning("%s: empty corpus", path)
    return Corpus(reports, source_path=str(path))


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in corpus:
            obj: dict = {"report_id": r.report_id, "site": r.site, "text": r.text}
            if r.metadata:
                obj["metadata"] = dict(r.metadata)
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_labels(path: str | Path) -> list[LabelRecord]:
    records: list[LabelRecord] = []
    for lineno, obj in _iter_jsonl(path):
        nlp_status = _require(obj, "nlp_status", path, lineno)
        final_status = _require(obj, "final_status", path, lineno)
        if nlp_status not in NLP_STATUSES:
            raise CorpusError(f"{path}:{lineno}: bad nlp_status {nlp_status!r}")
        if final_status not in FINAL_STATUSES:
            raise CorpusError(f"{path}:{lineno}: bad final_status {final_status!r}")
        evidence = tuple(
            Evidence(int(e["sentence_index"]), int(e["start"]), int(e["end"]))
            for e in obj.get("evidence", [])
        )
        records.append(
            LabelRecord(
                report_id=str(_require(obj, "report_id", path, lineno)),
                keyword=str(_require(obj, "keyword", path, lineno)),
                condition=str(obj.get("condition", "")),
                nlp_status=str(nlp_status),
                final_status=str(final_status),
                evidence=evidence,
            )
        )
    return records


def write_labels(records: list[LabelRecord], path: str | Path) -> None:
    """One line per record; caller must pass them sorted by (report_id, keyword)."""
    keys = [(r.report_id, r.keyword) for r in records]
    if keys != sorted(keys):
        raise CorpusError("label records must be sorted by (report_id, keyword)")
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {
                "report_id": r.report_id,
                "keyword": r.keyword,
                "condition": r.condition,
                "nlp_status": r.nlp_status,
                "final_status": r.final_status,
                "evidence": [
                    {"sentence_index": e.sentence_index, "start": e.start, "end": e.end}
                    for e in r.evidence
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_arbitrations(path: str | Path) -> list[ArbitrationRecord]:
    records: list[ArbitrationRecord] = []
    for lineno, obj in _iter_jsonl(path):
        correct = _require(obj, "correct", path, lineno)
        if not isinstance(correct, bool):
            raise CorpusError(f"{path}:{lineno}: correct must be a boolean")
        records.append(
            ArbitrationRecord(
                report_id=str(_require(obj, "report_id", path, lineno)),
                keyword=str(_require(obj, "keyword", path, lineno)),
                correct=correct,
                arbiter_id=str(_require(obj, "arbiter_id", path, lineno)),
                timestamp=str(obj.get("timestamp", "")),
            )
        )
    return records


def append_arbitration(record: ArbitrationRecord, path: str | Path) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "report_id": record.report_id,
                    "keyword": record.keyword,
                    "correct": record.correct,
                    "arbiter_id": record.arbiter_id,
                    "timestamp": record.timestamp,
                },
                ensure_ascii=False,
            )
            + "\n"
        )


SUMMARY_HEADER = ["keyword", "n_positive", "n_sampled", "n_correct", "p_hat", "ci_lower", "ci_upper"]


def write_summary_csv(rows: Iterable[tuple[str, ...]], path: str | Path) -> None:
    """Rows are pre-formatted 7-tuples matching SUMMARY_HEADER."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in rows:
            if len(row) != len(SUMMARY_HEADER):
                raise CorpusError(f"summary row has {len(row)} fields, expected {len(SUMMARY_HEADER)}")
            writer.writerow(row)


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_provenance(output_path: str | Path, info: dict) -> None:
    """Deterministic sidecar recording how an output file was produced."""
    side = Path(str(output_path) + ".prov.json")
    side.write_text(json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8")
