"""Sentence segmentation for report text.

Boundaries are deliberately primitive: a period followed by a blank space
or a newline ends a sentence, as does a colon immediately followed by a
newline (a bare section header line). Nothing else does -- "3.5 cm" stays
intact and a header like "FINDINGS:There is ..." stays fused to its text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .textutil import tokenize

# period before a blank/newline, or a colon ending its line
_BOUNDARY_RE = re.compile(r"\.(?=[ \n])|:(?=\n)")

# a line that opens a new report section: "Findings: ..." / "IMPRESSION"
_HEADER_LINE_RE = re.compile(r"^\s*[A-Za-z][A-Za-z ./-]{0,40}:")


@dataclass(frozen=True)
class Sentence:
    index: int
    start: int
    end: int
    text: str


def split_sentences(text: str) -> list[Sentence]:
    """Split ``text`` into sentences; a final unterminated fragment counts.

    Sentence spans cover the content including the terminal period/colon;
    whitespace between sentences belongs to neither, so interleaving the
    original gaps reconstructs the text exactly.
    """
    sentences: list[Sentence] = []
    pos = 0
    for m in _BOUNDARY_RE.finditer(text):
        _append(sentences, text, pos, m.end())
        pos = m.end()
    _append(sentences, text, pos, len(text))
    return sentences


def _append(sentences: list[Sentence], text: str, start: int, end: int) -> None:
    chunk = text[start:end]
    stripped = chunk.strip()
    if not stripped:
        return
    lead = len(chunk) - len(chunk.lstrip())
    trail = len(chunk) - len(chunk.rstrip())
    sentences.append(Sentence(len(sentences), start + lead, end - trail, stripped))


def _is_header_line(line: str) -> bool:
    if _HEADER_LINE_RE.match(line):
        return True
    stripped = line.strip()
    letters = [c for c in stripped if c.isalpha()]
    return len(letters) >= 3 and stripped == stripped.upper() and bool(stripped)


def history_blocks(
    text: str, sentences: list[Sentence], markers: tuple[str, ...]
) -> list[tuple[int, int]]:
    """Character ranges covered by history blocks.

    A block opens at a sentence whose leading tokens match a marker and
    runs to the start of the next header-looking line strictly below the
    marker's own line (or to end of text). Detection is line-based: fused
    sentences like "CLINICAL INDICATION:CVA? <nl> PREVIOUS:None <nl>
    FINDINGS:..." must not drag the whole findings section into the block.
    """
    if not markers:
        return []
    marker_seqs = [tuple(m.split()) for m in markers]

    line_starts: list[int] = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)
    header_starts = [
        ls
        for ls in line_starts
        if _is_header_line(text[ls: text.find("\n", ls) if text.find("\n", ls) != -1 else len(text)])
    ]

    blocks: list[tuple[int, int]] = []
    for sent in sentences:
        lead = [t.text for t in tokenize(sent.text)[:3]]
        if not any(tuple(lead[: len(seq)]) == seq for seq in marker_seqs):
            continue
        # line containing the sentence start
        own_line = max(ls for ls in line_starts if ls <= sent.start)
        end = len(text)
        for hs in header_starts:
            if hs > own_line:
                end = hs
                break
        blocks.append((sent.start, end))

    # merge overlaps so membership tests are simple
    merged: list[tuple[int, int]] = []
    for start, end in sorted(blocks):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def in_any_block(offset: int, blocks: list[tuple[int, int]]) -> bool:
    return any(start <= offset < end for start, end in blocks)
