"""Sentence-level false-positive reduction.

A report is marked final-positive for a keyword iff some sentence contains
the keyword and none of the excluded words applicable to it. Reports are
never marked negative at this stage: everything else stays unmarked.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Evidence, LabelRecord, Report
from .lexicon import Lexicon
from .nlp import POSITIVE, NlpAnnotation
from .sentences import Sentence, history_blocks, in_any_block, split_sentences
from .textutil import Token, find_token_sequences, tokenize

FINAL_POSITIVE = "positive"
UNMARKED = "unmarked"

POSITIVE_EVIDENCE = "positive_evidence"
EXCLUDED = "excluded"
ABSENT = "absent"


@dataclass(frozen=True)
class SentenceVerdict:
    verdict: str                      # POSITIVE_EVIDENCE | EXCLUDED | ABSENT
    matched_span: tuple[int, int] | None = None
    excluded_by: tuple[str, ...] = ()


@dataclass(frozen=True)
class EvidenceSentence:
    keyword: str
    sentence_index: int
    matched_span: tuple[int, int]


def _sentence_tokens(sentence: Sentence, text: str) -> list[Token]:
    return [t for t in tokenize(text) if sentence.start <= t.start and t.end <= sentence.end]


def _keyword_span(tokens: list[Token], keyword: str, lexicon: Lexicon) -> tuple[int, int] | None:
    kw = lexicon.keyword(keyword)
    best: tuple[int, int] | None = None
    for form in lexicon.mention_forms(kw):
        for m in find_token_sequences(tokens, form, plural_last=True):
            if best is None or m.start < best[0]:
                best = (m.start, m.end)
            break
    return best


def _excluded_words_present(tokens: list[Token], sentence_text: str, keyword: str, lexicon: Lexicon) -> list[str]:
    hits: list[str] = []
    for word in sorted(lexicon.applicable_exclusions(keyword)):
        if word == "?":
            if "?" in sentence_text:
                hits.append(word)
            continue
        for form in lexicon.exclusion_match_forms(word):
            if next(find_token_sequences(tokens, form), None) is not None:
                hits.append(word)
                break
    return hits


def sentence_verdict(sentence: Sentence, keyword: str, lexicon: Lexicon, text: str | None = None) -> SentenceVerdict:
    """Judge one sentence for one keyword.

    Absent without a keyword mention; excluded if any applicable excluded
    word (or "?") occurs anywhere in the sentence; positive evidence
    otherwise. History-block suppression is applied by the caller, which
    has the whole-report context.
    """
    body = text if text is not None else sentence.text
    if text is None:
        # standalone sentence: offsets are relative to its own text
        sentence = Sentence(sentence.index, 0, len(body), body)
    tokens = _sentence_tokens(sentence, body)
    span = _keyword_span(tokens, keyword, lexicon)
    if span is None:
        return SentenceVerdict(ABSENT)
    excluded_by = _excluded_words_present(tokens, sentence.text, keyword, lexicon)
    if excluded_by:
        return SentenceVerdict(EXCLUDED, span, tuple(excluded_by))
    return SentenceVerdict(POSITIVE_EVIDENCE, span)


def reduce_report(annotation: NlpAnnotation, report: Report, lexicon: Lexicon) -> list[LabelRecord]:
    """Apply the sentence filter to every NLP-positive keyword of one report.

    Emits one record per lexicon keyword, sorted by keyword; keywords that
    are not NLP-positive come out unmarked, untouched by this stage.
    """
    if annotation.report_id != report.report_id:
        raise ValueError(
            f"annotation {annotation.report_id!r} does not belong to report {report.report_id!r}"
        )
    sentences = split_sentences(report.text)
    blocks = history_blocks(report.text, sentences, lexicon.history_markers)

    records: list[LabelRecord] = []
    for kw in sorted(lexicon.keywords, key=lambda k: k.surface):
        nlp_status = annotation.status.get(kw.surface, "irrelevant")
        evidence: list[Evidence] = []
        if nlp_status == POSITIVE:
            for sentence in sentences:
                if in_any_block(sentence.start, blocks):
                    continue
                v = sentence_verdict(sentence, kw.surface, lexicon, report.text)
                if v.verdict == POSITIVE_EVIDENCE and v.matched_span is not None:
                    evidence.append(Evidence(sentence.index, v.matched_span[0], v.matched_span[1]))
        final = FINAL_POSITIVE if evidence else UNMARKED
        records.append(
            LabelRecord(
                report_id=report.report_id,
                keyword=kw.surface,
                condition=kw.condition,
                nlp_status=nlp_status,
                final_status=final,
                evidence=tuple(evidence),
            )
        )
    return records


def explain_report(report: Report, keyword: str, lexicon: Lexicon) -> list[str]:
    """Human-readable trace of every sentence's verdict for one keyword."""
    lexicon.keyword(keyword)  # raises on unknown keyword
    sentences = split_sentences(report.text)
    blocks = history_blocks(report.text, sentences, lexicon.history_markers)
    lines = [f"report {report.report_id!r}, keyword {keyword!r}:"]
    for sentence in sentences:
        v = sentence_verdict(sentence, keyword, lexicon, report.text)
        shown = sentence.text if len(sentence.text) <= 100 else sentence.text[:97] + "..."
        if in_any_block(sentence.start, blocks):
            tag = "EXCLUDED (history block)"
            if v.verdict == EXCLUDED:
                tag += f" + words: {', '.join(v.excluded_by)}"
        elif v.verdict == ABSENT:
            tag = "absent"
        elif v.verdict == EXCLUDED:
            tag = f"EXCLUDED by: {', '.join(v.excluded_by)}"
        else:
            tag = "POSITIVE EVIDENCE"
        lines.append(f"  [{sentence.index + 1}] {shown!r} -> {tag}")
    return lines
