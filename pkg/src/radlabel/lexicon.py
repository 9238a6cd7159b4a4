"""Condition/keyword lexicon and excluded-word taxonomy.

The default shipment (data/default_lexicon.toml) carries 33 keywords over
11 general conditions, seven universal exclusion categories, eight
keyword-specific ones, assertion triggers, and history-block markers.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import LexiconError
from .textutil import phrase_tokens

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

UNIVERSAL = "universal"
KEYWORD_SPECIFIC = "specific"


@dataclass(frozen=True)
class Keyword:
    surface: str          # lowercase, possibly multi-word
    condition: str
    variants: tuple[str, ...] = ()  # extra surfaces counting as mentions


@dataclass(frozen=True)
class ExclusionCategory:
    name: str
    words: frozenset[str]
    scope: str                      # UNIVERSAL or KEYWORD_SPECIFIC
    keywords: frozenset[str] = frozenset()  # scoped keywords when specific


@dataclass
class Lexicon:
    keywords: list[Keyword]
    exclusions: list[ExclusionCategory]
    negation_triggers: list[str]
    scope_window: int = 6
    scope_breakers: tuple[str, ...] = ("but", "however")
    exclusion_variants: dict[str, tuple[str, ...]] = field(default_factory=dict)
    history_markers: tuple[str, ...] = ()
    source_path: str = "<builtin>"

    def __post_init__(self) -> None:
        self._by_surface = {kw.surface: kw for kw in self.keywords}

    @property
    def conditions(self) -> list[str]:
        seen: dict[str, None] = {}
        for kw in self.keywords:
            seen.setdefault(kw.condition, None)
        return list(seen)

    def keyword(self, surface: str) -> Keyword:
        try:
            return self._by_surface[surface]
        except KeyError:
            raise LexiconError(f"unknown keyword: {surface!r}") from None

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def keyword_surfaces(self) -> list[str]:
        return [kw.surface for kw in self.keywords]

    def mention_forms(self, keyword: Keyword) -> list[tuple[str, ...]]:
        """Token sequences that count as a mention of ``keyword``."""
        return [phrase_tokens(keyword.surface)] + [phrase_tokens(v) for v in keyword.variants]

    def applicable_exclusions(self, surface: str) -> frozenset[str]:
        """Union of universal categories and the specific ones scoping ``surface``."""
        kw = self.keyword(surface)  # raises on unknown keyword
        words: set[str] = set()
        for cat in self.exclusions:
            if cat.scope == UNIVERSAL or kw.surface in cat.keywords:
                words |= cat.words
        return frozenset(words)

    def exclusion_match_forms(self, word: str) -> list[tuple[str, ...]]:
        """Token sequences matching an excluded word, stem variants included."""
        forms = [phrase_tokens(word)]
        for v in self.exclusion_variants.get(word, ()):
            forms.append(phrase_tokens(v))
        return forms


def applicable_exclusions(lexicon: Lexicon, keyword: str) -> frozenset[str]:
    return lexicon.applicable_exclusions(keyword)


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Parse and validate a lexicon file; ``None`` loads the default shipment."""
    if path is None:
        raw = resources.files("radlabel.data").joinpath("default_lexicon.toml").read_bytes()
        source = "<builtin>"
    else:
        raw = Path(path).read_bytes()
        source = str(path)
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise LexiconError(f"{source}: not valid TOML: {exc}") from exc
    return _build(doc, source)


def _build(doc: dict, source: str) -> Lexicon:
    conditions = doc.get("conditions")
    if not isinstance(conditions, dict) or not conditions:
        raise LexiconError(f"{source}: missing [conditions] section")

    variant_map = {k.lower(): tuple(v) for k, v in doc.get("keyword_variants", {}).items()}
    keywords: list[Keyword] = []
    seen: set[str] = set()
    for condition, surfaces in conditions.items():
        if not surfaces:
            raise LexiconError(f"{source}: condition {condition!r} has no keywords")
        for surface in surfaces:
            surface = surface.strip().lower()
            if not surface:
                raise LexiconError(f"{source}: empty keyword under {condition!r}")
            if surface in seen:
                raise LexiconError(f"{source}: keyword {surface!r} mapped to more than one condition")
            seen.add(surface)
            keywords.append(Keyword(surface, condition, variant_map.get(surface, ())))

    for name in variant_map:
        if name not in seen:
            raise LexiconError(f"{source}: keyword_variants references unknown keyword {name!r}")

    exclusions: list[ExclusionCategory] = []
    raw_exc = doc.get("exclusions", {})
    for scope_kind in (UNIVERSAL, KEYWORD_SPECIFIC):
        for name, body in raw_exc.get(scope_kind, {}).items():
            words = [w.strip().lower() for w in body.get("words", [])]
            if not words or any(not w for w in words):
                raise LexiconError(f"{source}: exclusion category {name!r} is empty")
            scoped: frozenset[str] = frozenset()
            if scope_kind == KEYWORD_SPECIFIC:
                scoped_list = [k.strip().lower() for k in body.get("scope", [])]
                if not scoped_list:
                    raise LexiconError(f"{source}: specific category {name!r} lacks a scope list")
                for k in scoped_list:
                    if k not in seen:
                        raise LexiconError(
                            f"{source}: category {name!r} scoped to unknown keyword {k!r}"
                        )
                scoped = frozenset(scoped_list)
            cat = ExclusionCategory(name, frozenset(words), scope_kind, scoped)
            exclusions.append(cat)

    # A keyword must never be an excluded word of a category applied to it.
    for cat in exclusions:
        targets = seen if cat.scope == UNIVERSAL else cat.keywords
        clash = cat.words & targets
        if clash:
            raise LexiconError(
                f"{source}: category {cat.name!r} excludes its own keyword(s): {sorted(clash)}"
            )

    triggers = [t.strip().lower() for t in doc.get("negation_triggers", {}).get("triggers", [])]
    if not triggers:
        raise LexiconError(f"{source}: missing [negation_triggers] triggers list")

    assertion = doc.get("assertion", {})
    exclusion_variants = {
        k.lower(): tuple(v) for k, v in doc.get("exclusion_variants", {}).items()
    }
    markers = tuple(m.lower() for m in doc.get("history_blocks", {}).get("markers", []))

    return Lexicon(
        keywords=keywords,
        exclusions=exclusions,
        negation_triggers=triggers,
        scope_window=int(assertion.get("scope_window", 6)),
        scope_breakers=tuple(assertion.get("scope_breakers", ["but", "however"])),
        exclusion_variants=exclusion_variants,
        history_markers=markers,
        source_path=source,
    )
