"""Tokenization and phrase matching primitives.

Everything downstream (mention finding, trigger scoping, excluded-word
matching) agrees on one definition of a token: a maximal run of letters,
digits, and apostrophes. Hyphens and all other punctuation separate tokens,
so "sub-acute" yields ["sub", "acute"] and "don't" stays one token.
"""

from __future__ import annotations

import re
from typing import Iterator, NamedTuple

_TOKEN_RE = re.compile(r"[A-Za-z0-9']+")


class Token(NamedTuple):
    text: str  # lowercased
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Lowercased word tokens with character offsets into ``text``."""
    return [Token(m.group(0).lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def phrase_tokens(phrase: str) -> tuple[str, ...]:
    """Normalize a lexicon phrase to its token sequence."""
    return tuple(t.text for t in tokenize(phrase))


class PhraseMatch(NamedTuple):
    start: int  # offset of first token
    end: int    # offset past last token
    first_token: int
    last_token: int


def find_token_sequences(
    tokens: list[Token],
    phrase: tuple[str, ...],
    *,
    plural_last: bool = False,
) -> Iterator[PhraseMatch]:
    """Yield non-overlapping occurrences of ``phrase`` in ``tokens``.

    With ``plural_last`` the final token also matches with a trailing
    "s" or "es" ("fracture" -> "fractures").
    """
    if not phrase:
        return
    n = len(phrase)
    i = 0
    while i + n <= len(tokens):
        if _seq_matches(tokens, i, phrase, plural_last):
            yield PhraseMatch(tokens[i].start, tokens[i + n - 1].end, i, i + n - 1)
            i += n
        else:
            i += 1


def _seq_matches(tokens: list[Token], i: int, phrase: tuple[str, ...], plural_last: bool) -> bool:
    for j, want in enumerate(phrase):
        got = tokens[i + j].text
        if j == len(phrase) - 1 and plural_last:
            if got != want and got != want + "s" and got != want + "es":
                return False
        elif got != want:
            return False
    return True


def contains_phrase(tokens: list[Token], phrase: tuple[str, ...], *, plural_last: bool = False) -> bool:
    return next(find_token_sequences(tokens, phrase, plural_last=plural_last), None) is not None
