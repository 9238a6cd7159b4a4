"""Keyword mention detection and assertion status.

Transparent stand-in for the concept-extraction layer: every keyword seen
in a report is classified positive or negative from trigger scoping, and
keywords never mentioned are irrelevant. An external annotation file
produced by a heavier concept extractor can replace this layer verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, Report
from .errors import AnnotationError
from .lexicon import Keyword, Lexicon
from .sentences import Sentence, split_sentences
from .textutil import find_token_sequences, phrase_tokens, tokenize

POSITIVE = "positive"
NEGATIVE = "negative"
IRRELEVANT = "irrelevant"

AFFIRMED = "affirmed"
NEGATED = "negated"

_COORDINATORS = {"and", "or"}


@dataclass(frozen=True)
class Mention:
    keyword: str
    sentence_index: int
    start: int
    end: int


@dataclass
class NlpAnnotation:
    report_id: str
    status: dict[str, str]              # keyword surface -> POSITIVE/NEGATIVE/IRRELEVANT
    mentions: list[Mention] = field(default_factory=list)


def find_mentions(text: str, lexicon: Lexicon) -> list[Mention]:
    """All non-overlapping keyword occurrences, case-insensitive, on token
    boundaries, with a trailing plural on the final token allowed."""
    tokens = tokenize(text)
    sentences = split_sentences(text)
    mentions: list[Mention] = []
    for kw in lexicon.keywords:
        spans: list[tuple[int, int]] = []
        for form in lexicon.mention_forms(kw):
            for m in find_token_sequences(tokens, form, plural_last=True):
                spans.append((m.start, m.end))
        # variants may re-find the same span; keep first, leftmost
        taken: list[tuple[int, int]] = []
        for start, end in sorted(set(spans)):
            if taken and start < taken[-1][1]:
                continue
            taken.append((start, end))
            mentions.append(Mention(kw.surface, _sentence_index(sentences, start), start, end))
    mentions.sort(key=lambda m: (m.start, m.keyword))
    return mentions


def _sentence_index(sentences: list[Sentence], offset: int) -> int:
    for s in sentences:
        if s.start <= offset < s.end:
            return s.index
    # offsets inside inter-sentence whitespace cannot hold a token
    return len(sentences) - 1 if sentences else 0


def classify_assertion(mention: Mention, sentence: Sentence, text: str, lexicon: Lexicon) -> str:
    """AFFIRMED unless a negation trigger precedes the mention in-sentence,
    within the scope window, with no scope breaker between.

    The window counts intervening word tokens, skipping coordinators
    ("and"/"or"); a semicolon or a breaker token ("but"/"however") between
    trigger and mention cuts the scope.
    """
    tokens = [t for t in tokenize(text) if sentence.start <= t.start and t.end <= sentence.end]
    trigger_forms = sorted(
        (phrase_tokens(t) for t in lexicon.negation_triggers), key=len, reverse=True
    )
    breakers = set(lexicon.scope_breakers)

    occurrences: list[tuple[int, int]] = []  # (char_end, last_token_idx)
    claimed: set[int] = set()
    for form in trigger_forms:
        for m in find_token_sequences(tokens, form):
            if any(i in claimed for i in range(m.first_token, m.last_token + 1)):
                continue  # already part of a longer trigger
            claimed.update(range(m.first_token, m.last_token + 1))
            occurrences.append((m.end, m.last_token))

    for trig_end, trig_last in occurrences:
        if trig_end > mention.start:
            continue
        if ";" in text[trig_end: mention.start]:
            continue
        between = [
            t for t in tokens[trig_last + 1:] if t.end <= mention.start
        ]
        if any(t.text in breakers for t in between):
            continue
        distance = sum(1 for t in between if t.text not in _COORDINATORS)
        if distance <= lexicon.scope_window:
            return NEGATED
    return AFFIRMED


def annotate_report(report: Report, lexicon: Lexicon) -> NlpAnnotation:
    """Positive if any mention is affirmed, negative if all mentions are
    negated, irrelevant with no mention at all."""
    sentences = split_sentences(report.text)
    mentions = find_mentions(report.text, lexicon)
    status = {kw.surface: IRRELEVANT for kw in lexicon.keywords}
    for mention in mentions:
        sentence = sentences[mention.sentence_index]
        verdict = classify_assertion(mention, sentence, report.text, lexicon)
        if verdict == AFFIRMED:
            status[mention.keyword] = POSITIVE
        elif status[mention.keyword] == IRRELEVANT:
            status[mention.keyword] = NEGATIVE
    return NlpAnnotation(report.report_id, status, mentions)


def ingest_external_annotations(
    path: str | Path, corpus: Corpus, lexicon: Lexicon
) -> list[NlpAnnotation]:
    """Adopt per-keyword statuses from an external concept extractor.

    File format: JSON Lines of {report_id, keyword, status, spans?}.
    Statuses are taken verbatim; unlisted keywords stay irrelevant.
    """
    by_report: dict[str, NlpAnnotation] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationError(f"{path}:{lineno}: malformed JSON: {exc.msg}") from exc
            report_id = str(obj.get("report_id", ""))
            keyword = str(obj.get("keyword", "")).lower()
            status = str(obj.get("status", "")).lower()
            if report_id not in corpus:
                raise AnnotationError(f"{path}:{lineno}: unknown report_id {report_id!r}")
            if keyword not in lexicon:
                raise AnnotationError(f"{path}:{lineno}: unknown keyword {keyword!r}")
            if status not in (POSITIVE, NEGATIVE, IRRELEVANT):
                raise AnnotationError(f"{path}:{lineno}: bad status {status!r}")
            ann = by_report.get(report_id)
            if ann is None:
                ann = NlpAnnotation(report_id, {kw.surface: IRRELEVANT for kw in lexicon.keywords})
                by_report[report_id] = ann
            ann.status[keyword] = status
            for span in obj.get("spans", []):
                ann.mentions.append(
                    Mention(
                        keyword,
                        int(span.get("sentence_index", 0)),
                        int(span["start"]),
                        int(span["end"]),
                    )
                )
    return [by_report[rid] for rid in sorted(by_report)]
