"""Two-pass de-identification.

Pass one identifies PHI from the metadata sidecar and from pattern
recognizers over the text, parsing each hit into a structured canonical
form that accumulates in a store across runs. Pass two replaces every
occurrence of a stored entity -- observed surface or generated layout
variant -- with a category fiducial such as ``{{DATETIME}}``.

Recognizer layouts live in data/deid_patterns.json so sites can extend
them without code changes.
"""

from __future__ import annotations

import calendar
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import Corpus, Report
from .errors import CorpusError


class PhiCategory(Enum):
    PERSON_NAME = "PersonName"
    INSTITUTION = "Institution"
    ADDRESS = "Address"
    AGE = "Age"
    DATE = "Date"
    TIME = "Time"
    PHONE = "Phone"
    ACCESSION_NUMBER = "AccessionNumber"
    MEDICAL_RECORD_NUMBER = "MedicalRecordNumber"


FIDUCIALS = {
    PhiCategory.PERSON_NAME: "{{NAME}}",
    PhiCategory.INSTITUTION: "{{INSTITUTION}}",
    PhiCategory.ADDRESS: "{{ADDRESS}}",
    PhiCategory.AGE: "{{AGE}}",
    PhiCategory.DATE: "{{DATETIME}}",
    PhiCategory.TIME: "{{DATETIME}}",
    PhiCategory.PHONE: "{{PHONE}}",
    PhiCategory.ACCESSION_NUMBER: "{{ACCESSION}}",
    PhiCategory.MEDICAL_RECORD_NUMBER: "{{MRN}}",
}

ALL_FIDUCIALS = tuple(sorted(set(FIDUCIALS.values())))

SOURCE_TEXT = "ReportText"
SOURCE_SIDECAR = "MetadataSidecar"

_MONTHS = [
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
]
_MONTH_NUM = {name: i + 1 for i, name in enumerate(_MONTHS)}
_MONTH_NUM.update({name[:3]: i + 1 for i, name in enumerate(_MONTHS)})
_MONTH_NUM["sept"] = 9


@dataclass
class PhiEntity:
    category: PhiCategory
    canonical: dict
    surfaces: set[str] = field(default_factory=set)
    sources: set[str] = field(default_factory=set)

    def key(self) -> tuple[str, str]:
        return (self.category.value, json.dumps(self.canonical, sort_keys=True))


class PhiStore:
    """Entities deduplicated by (category, canonical); merges are unions."""

    def __init__(self) -> None:
        self._entities: dict[tuple[str, str], PhiEntity] = {}
        self._generation = 0

    def __len__(self) -> int:
        return len(self._entities)

    def entities(self) -> list[PhiEntity]:
        return [self._entities[k] for k in sorted(self._entities)]

    def add(self, entity: PhiEntity) -> PhiEntity:
        if not entity.surfaces:
            raise ValueError("PHI entity must carry at least one surface form")
        existing = self._entities.get(entity.key())
        if existing is None:
            self._entities[entity.key()] = entity
        else:
            existing.surfaces |= entity.surfaces
            existing.sources |= entity.sources
            entity = existing
        self._generation += 1
        return entity

    def merge(self, other: "PhiStore") -> "PhiStore":
        for entity in other.entities():
            self.add(
                PhiEntity(entity.category, dict(entity.canonical), set(entity.surfaces), set(entity.sources))
            )
        return self

    @property
    def generation(self) -> int:
        return self._generation


def load_store(path: str | Path) -> PhiStore:
    store = PhiStore()
    p = Path(path)
    if not p.exists():
        return store
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed PHI entity: {exc.msg}") from exc
            store.add(
                PhiEntity(
                    PhiCategory(obj["category"]),
                    obj["canonical"],
                    set(obj.get("surfaces", [])),
                    set(obj.get("sources", [])),
                )
            )
    return store


def write_store(store: PhiStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entity in store.entities():
            fh.write(
                json.dumps(
                    {
                        "category": entity.category.value,
                        "canonical": entity.canonical,
                        "surfaces": sorted(entity.surfaces),
                        "sources": sorted(entity.sources),
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


# ---------------------------------------------------------------------------
# Canonical parsers
# ---------------------------------------------------------------------------

def parse_person_name(value: str) -> dict | None:
    """Accepts DICOM caret form, "Family, Given M.", or "Given M. Family"."""
    value = value.strip()
    if not value:
        return None
    if "^" in value:
        parts = [p.strip() for p in value.split("^")]
        family = parts[0]
        given = parts[1] if len(parts) > 1 else ""
        middle = parts[2] if len(parts) > 2 else ""
    elif "," in value:
        family, _, rest = value.partition(",")
        family = family.strip()
        rest_parts = rest.split()
        given = rest_parts[0] if rest_parts else ""
        middle = " ".join(rest_parts[1:])
    else:
        parts = value.split()
        if len(parts) == 1:
            family, given, middle = parts[0], "", ""
        else:
            family = parts[-1]
            given = parts[0]
            middle = " ".join(parts[1:-1])
    family = family.strip(".")
    given = given.strip(".")
    middle = middle.strip(".").replace(".", "")
    if not family:
        return None
    return {"family": family.title(), "given": given.title(), "middle": middle.title()}


def _valid_date(year: int, month: int, day: int) -> bool:
    if not (1 <= month <= 12 and 1900 <= year <= 2100):
        return False
    return 1 <= day <= calendar.monthrange(year, month)[1]


def parse_date_groups(groups: dict) -> dict | None:
    month_raw = groups["month"].rstrip(".").lower()
    month = _MONTH_NUM.get(month_raw) if not month_raw.isdigit() else int(month_raw)
    if month is None:
        return None
    year, day = int(groups["year"]), int(groups["day"])
    if not _valid_date(year, month, day):
        return None
    return {"year": year, "month": month, "day": day}


def parse_date_value(value: str) -> dict | None:
    value = value.strip()
    m = re.fullmatch(r"(\d{4})(\d{2})(\d{2})", value)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return {"year": y, "month": mo, "day": d} if _valid_date(y, mo, d) else None
    m = re.fullmatch(r"(\d{4})[-/](\d{1,2})[-/](\d{1,2})", value)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        return {"year": y, "month": mo, "day": d} if _valid_date(y, mo, d) else None
    return None


def parse_time_groups(groups: dict) -> dict | None:
    hour, minute = int(groups["hour"]), int(groups["minute"])
    second = int(groups["second"]) if groups.get("second") else None
    ampm = (groups.get("ampm") or "").replace(".", "").lower()
    if ampm:
        if not 1 <= hour <= 12:
            return None
        hour = hour % 12 + (12 if ampm == "pm" else 0)
    elif not 0 <= hour <= 23:
        return None
    if not 0 <= minute <= 59 or (second is not None and not 0 <= second <= 59):
        return None
    return {"hour": hour, "minute": minute, "second": second}


def parse_time_value(value: str) -> dict | None:
    value = value.strip()
    m = re.fullmatch(r"(\d{2})(\d{2})(\d{2})(?:\.\d+)?", value)
    if m:
        h, mi, s = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if 0 <= h <= 23 and 0 <= mi <= 59 and 0 <= s <= 59:
            return {"hour": h, "minute": mi, "second": s}
        return None
    m = re.fullmatch(r"(\d{1,2}):(\d{2})(?::(\d{2}))?", value)
    if m:
        return parse_time_groups(
            {"hour": m.group(1), "minute": m.group(2), "second": m.group(3), "ampm": ""}
        )
    return None


def parse_age_groups(groups: dict) -> dict | None:
    years = int(groups["years"])
    return {"years": years} if 0 < years <= 130 else None


def parse_age_value(value: str) -> dict | None:
    m = re.fullmatch(r"0*(\d{1,3})\s*[Yy]?", value.strip())
    if not m:
        return None
    return parse_age_groups({"years": m.group(1)})


def parse_phone_value(value: str) -> dict | None:
    digits = re.sub(r"\D", "", value)
    if len(digits) == 11 and digits.startswith("1"):
        digits = digits[1:]
    return {"digits": digits} if len(digits) >= 7 else None


def _normalize_surface(value: str) -> str:
    return re.sub(r"\s+", " ", value.strip())


# ---------------------------------------------------------------------------
# Pattern tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Recognizer:
    category: PhiCategory
    parser: str
    pattern: re.Pattern


class PatternTable:
    def __init__(self, doc: dict):
        self.text_recognizers = [
            Recognizer(PhiCategory(r["category"]), r["parser"], re.compile(r["regex"]))
            for r in doc["text_recognizers"]
        ]
        self.sidecar_keys = {
            key: (PhiCategory(spec["category"]), spec["parser"])
            for key, spec in doc["sidecar_keys"].items()
        }


@lru_cache(maxsize=1)
def _default_patterns() -> PatternTable:
    raw = resources.files("radlabel.data").joinpath("deid_patterns.json").read_text("utf-8")
    return PatternTable(json.loads(raw))


def load_patterns(path: str | Path | None = None) -> PatternTable:
    if path is None:
        return _default_patterns()
    return PatternTable(json.loads(Path(path).read_text("utf-8")))


def _parse_sidecar(parser: str, value: str) -> dict | None:
    if parser == "person_name":
        return parse_person_name(value)
    if parser == "date_value":
        return parse_date_value(value)
    if parser == "time_value":
        return parse_time_value(value)
    if parser == "age_value":
        return parse_age_value(value)
    if parser == "phone_value":
        return parse_phone_value(value)
    if parser in ("id_value", "surface_value"):
        v = _normalize_surface(value)
        return {"value": v} if v else None
    raise ValueError(f"unknown sidecar parser {parser!r}")


def _parse_text_match(parser: str, m: re.Match) -> tuple[dict | None, str]:
    """Returns (canonical, surface) for a text recognizer hit."""
    if parser == "date_groups":
        return parse_date_groups(m.groupdict()), m.group(0)
    if parser == "time_groups":
        return parse_time_groups(m.groupdict()), m.group(0)
    if parser == "age_groups":
        return parse_age_groups(m.groupdict()), m.group(0)
    if parser == "phone_value":
        return parse_phone_value(m.group(0)), m.group(0)
    if parser == "id_group":
        value = m.group("value")
        return {"value": _normalize_surface(value)}, value
    if parser == "name_group":
        name = m.group("name")
        return parse_person_name(name), name
    if parser == "surface_value":
        surface = m.group(0)
        return {"value": _normalize_surface(surface)}, surface
    raise ValueError(f"unknown text parser {parser!r}")


# ---------------------------------------------------------------------------
# Variant generation
# ---------------------------------------------------------------------------

def _ordinal(day: int) -> str:
    if 10 <= day % 100 <= 20:
        return f"{day}th"
    return f"{day}{({1: 'st', 2: 'nd', 3: 'rd'}.get(day % 10, 'th'))}"


def generate_variants(entity: PhiEntity) -> set[str]:
    """Every textual form of an entity that pass two will replace."""
    variants = {s for s in (_normalize_surface(s) for s in entity.surfaces) if s}
    c = entity.canonical
    if entity.category == PhiCategory.PERSON_NAME:
        family, given, middle = c.get("family", ""), c.get("given", ""), c.get("middle", "")
        if family:
            variants.add(family)
        if family and given:
            mid_initial = middle[:1]
            variants.add(f"{given} {family}")
            variants.add(f"{family}, {given}")
            variants.add(f"{given[0]}. {family}")
            variants.add(f"{given[0]} {family}")
            if middle:
                variants.add(f"{given} {middle} {family}")
                variants.add(f"{given} {mid_initial}. {family}")
                variants.add(f"{given} {mid_initial} {family}")
                variants.add(f"{family}, {given} {mid_initial}.")
                variants.add(f"{family}, {given} {middle}")
                variants.add(f"{given[0]}. {mid_initial}. {family}")
            variants.add(f"{family.upper()}^{given.upper()}^{middle.upper()}".rstrip("^"))
    elif entity.category == PhiCategory.DATE:
        y, mo, d = c["year"], c["month"], c["day"]
        month_name = _MONTHS[mo - 1].capitalize()
        month_abbr = month_name[:3]
        variants |= {
            f"{month_name} {d}, {y}", f"{month_name} {d} {y}",
            f"{month_abbr} {d}, {y}", f"{month_abbr}. {d}, {y}",
            f"{month_name} {_ordinal(d)}, {y}",
            f"{d} {month_name} {y}", f"{d} {month_abbr} {y}",
            f"{y}-{mo:02d}-{d:02d}", f"{y}/{mo:02d}/{d:02d}",
            f"{y}-{mo}-{d}",
            f"{mo:02d}/{d:02d}/{y}", f"{mo}/{d}/{y}",
            f"{mo:02d}-{d:02d}-{y}",
            f"{d:02d}-{month_abbr}-{y}", f"{d}-{month_abbr}-{y}",
            f"{y}{mo:02d}{d:02d}",
        }
    elif entity.category == PhiCategory.TIME:
        h, mi, s = c["hour"], c["minute"], c.get("second")
        variants |= {f"{h:02d}:{mi:02d}", f"{h}:{mi:02d}"}
        if s is not None:
            variants |= {f"{h:02d}:{mi:02d}:{s:02d}", f"{h}:{mi:02d}:{s:02d}"}
        h12 = h % 12 or 12
        half = "AM" if h < 12 else "PM"
        variants |= {
            f"{h12}:{mi:02d} {half}", f"{h12}:{mi:02d} {half.lower()}",
            f"{h12}:{mi:02d}{half}", f"{h12}:{mi:02d} {half[0].lower()}.{half[1].lower()}.",
        }
    elif entity.category == PhiCategory.AGE:
        years = c["years"]
        variants |= {
            f"{years}-year-old", f"{years} year old", f"{years} years old",
            f"{years}-years-old", f"{years} yo", f"{years} y/o", f"age {years}",
            f"{years:03d}Y",
        }
    elif entity.category == PhiCategory.PHONE:
        digits = c["digits"]
        if len(digits) == 10:
            a, b, d4 = digits[:3], digits[3:6], digits[6:]
            variants |= {
                f"({a}) {b}-{d4}", f"({a}){b}-{d4}", f"{a}-{b}-{d4}",
                f"{a}.{b}.{d4}", f"{a} {b} {d4}", digits, f"+1 {a}-{b}-{d4}",
            }
        else:
            variants.add(digits)
    elif entity.category in (
        PhiCategory.INSTITUTION,
        PhiCategory.ADDRESS,
        PhiCategory.ACCESSION_NUMBER,
        PhiCategory.MEDICAL_RECORD_NUMBER,
    ):
        if c.get("value"):
            variants.add(c["value"])
    return {v for v in variants if v}


# ---------------------------------------------------------------------------
# Pass one
# ---------------------------------------------------------------------------

def first_pass(
    corpus: Corpus,
    store: PhiStore | None = None,
    patterns: PatternTable | None = None,
    *,
    use_sidecar: bool = True,
) -> PhiStore:
    """Accumulate structured PHI from sidecar fields and text recognizers."""
    store = store if store is not None else PhiStore()
    patterns = patterns or load_patterns()

    for report in corpus:
        if use_sidecar:
            for key, value in report.metadata:
                spec = patterns.sidecar_keys.get(key)
                if spec is None or not value.strip():
                    continue
                category, parser = spec
                canonical = _parse_sidecar(parser, value)
                if canonical is not None:
                    store.add(PhiEntity(category, canonical, {value.strip()}, {SOURCE_SIDECAR}))

        for rec in patterns.text_recognizers:
            for m in rec.pattern.finditer(report.text):
                canonical, surface = _parse_text_match(rec.parser, m)
                if canonical is not None:
                    store.add(
                        PhiEntity(rec.category, canonical, {_normalize_surface(surface)}, {SOURCE_TEXT})
                    )

    # Seeded names/institutions: record the variants actually observed in text.
    seeded = [
        e
        for e in store.entities()
        if e.category in (PhiCategory.PERSON_NAME, PhiCategory.INSTITUTION)
    ]
    for entity in seeded:
        pattern = _variant_pattern(generate_variants(entity))
        if pattern is None:
            continue
        for report in corpus:
            for m in pattern.finditer(report.text):
                entity.surfaces.add(_normalize_surface(m.group(0)))
    return store


# ---------------------------------------------------------------------------
# Pass two
# ---------------------------------------------------------------------------

def _variant_regex(variant: str) -> str:
    tokens = [re.escape(t) for t in variant.split()]
    return r"\s+".join(tokens)


def _variant_pattern(variants: set[str]) -> re.Pattern | None:
    if not variants:
        return None
    ordered = sorted(variants, key=len, reverse=True)
    body = "|".join(_variant_regex(v) for v in ordered)
    return re.compile(rf"(?<![A-Za-z0-9])(?:{body})(?![A-Za-z0-9])", re.IGNORECASE)


class _Replacer:
    """Category-combined variant patterns, rebuilt when the store changes."""

    def __init__(self, store: PhiStore):
        self.generation = store.generation
        self.patterns: list[tuple[PhiCategory, re.Pattern]] = []
        by_category: dict[PhiCategory, set[str]] = {}
        for entity in store.entities():
            by_category.setdefault(entity.category, set()).update(generate_variants(entity))
        for category in PhiCategory:
            pattern = _variant_pattern(by_category.get(category, set()))
            if pattern is not None:
                self.patterns.append((category, pattern))

    def scrub(self, text: str) -> str:
        matches: list[tuple[int, int, PhiCategory]] = []
        for category, pattern in self.patterns:
            for m in pattern.finditer(text):
                matches.append((m.start(), m.end(), category))
        # earliest start wins; at a tie the longest match wins
        matches.sort(key=lambda t: (t[0], -(t[1] - t[0])))
        out: list[str] = []
        pos = 0
        for start, end, category in matches:
            if start < pos:
                continue
            out.append(text[pos:start])
            out.append(FIDUCIALS[category])
            pos = end
        out.append(text[pos:])
        return "".join(out)


def _replacer_for(store: PhiStore) -> _Replacer:
    cached = getattr(store, "_replacer", None)
    if cached is None or cached.generation != store.generation:
        cached = _Replacer(store)
        store._replacer = cached  # type: ignore[attr-defined]
    return cached


def second_pass(report: Report, store: PhiStore, patterns: PatternTable | None = None) -> Report:
    """Replace every stored surface/variant with its category fiducial.

    Metadata values under PHI-flagged keys are replaced too, so the output
    record leaks nothing through the sidecar.
    """
    patterns = patterns or load_patterns()
    replacer = _replacer_for(store)
    new_text = replacer.scrub(report.text)
    new_metadata = tuple(
        (key, FIDUCIALS[patterns.sidecar_keys[key][0]] if key in patterns.sidecar_keys else value)
        for key, value in report.metadata
    )
    return Report(report.report_id, report.site, new_text, new_metadata)


def has_fiducials(corpus: Corpus) -> bool:
    return any(marker in report.text for report in corpus for marker in ALL_FIDUCIALS)
