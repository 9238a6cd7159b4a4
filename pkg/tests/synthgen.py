"""Seeded synthetic report generator for property and acceptance tests.

Produces head-CT-flavored reports mixing affirmed, negated, and
excluded-context keyword sentences, optionally with planted PHI whose
exact surface strings are recorded so de-identification can be audited
independently of the implementation's own variant generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from radlabel.corpus import Report

AFFIRMED_TEMPLATES = [
    "There is {kw}.",
    "{kw} is present.",
    "Findings are consistent with {kw}.",
    "A small {kw} is seen in the left frontal lobe.",
    "Interval increase in the {kw}.",
    "There is evidence of {kw} involving the right hemisphere.",
]

NEGATED_TEMPLATES = [
    "There is no {kw}.",
    "No evidence of {kw}.",
    "The study is negative for {kw}.",
    "Examination without {kw}.",
    "Patient denies {kw}.",
]

EXCLUDED_TEMPLATES = [
    "Query for {kw}.",
    "Rule out {kw}.",
    "Known history of {kw}.",
    "Family history of {kw}.",
    "Prior {kw} was treated.",
    "Mother had {kw}.",
    "The {kw} has resolved.",
    "Previous {kw} noted on the earlier examination.",
]

FILLER = [
    "The ventricles are stable.",
    "Gray-white differentiation is preserved.",
    "Paranasal sinuses are clear.",
    "The orbits are unremarkable.",
    "Soft tissue windows show nothing remarkable.",
    "Craniocervical junction is within normal limits.",
    "The posterior fossa is unremarkable.",
    "Midline structures are preserved.",
]

FAMILY_NAMES = [
    "Abara", "Bennett", "Castellanos", "Donnelly", "Ferreira",
    "Grimaldi", "Hoffman", "Ivanov", "Jablonski", "Kowalczyk",
    "Lindqvist", "Moreau", "Nakamura", "Okafor", "Petrov",
]
GIVEN_NAMES = [
    "Alice", "Bruno", "Carmen", "Derek", "Elena",
    "Farid", "Greta", "Hugo", "Irene", "Jonas",
    "Katya", "Liam", "Mona", "Nils", "Olga",
]
INSTITUTIONS = [
    "Lakeside General Hospital", "Riverview Medical Centre",
    "Northgate Imaging", "Westbrook Health Centre",
]
STREETS = ["Maple Street", "Oak Avenue", "Birch Road", "Cedar Lane", "Elm Drive"]


def make_label_report(
    rng: random.Random,
    report_id: str,
    keywords: list[str],
    site: str = "synth",
    max_sentences: int = 12,
) -> Report:
    """A report of 1..max_sentences sentences over randomly chosen keywords."""
    n_sentences = rng.randint(1, max_sentences)
    sentences: list[str] = []
    for _ in range(n_sentences):
        roll = rng.random()
        if roll < 0.35:
            sentences.append(rng.choice(FILLER))
        else:
            kw = rng.choice(keywords)
            pool = (
                AFFIRMED_TEMPLATES
                if roll < 0.60
                else NEGATED_TEMPLATES
                if roll < 0.80
                else EXCLUDED_TEMPLATES
            )
            sentences.append(rng.choice(pool).format(kw=kw))
    sep = lambda: "\n" if rng.random() < 0.3 else " "
    text = sentences[0]
    for s in sentences[1:]:
        text += sep() + s
    return Report(report_id, site, text)


@dataclass(frozen=True)
class PlantedPhi:
    category: str   # PhiCategory value string
    surface: str    # exact text planted in the report body
    in_text: bool   # False when it exists only in the sidecar


_DATE_LAYOUTS = [
    lambda y, m, d, name, abbr: f"{name} {d}, {y}",
    lambda y, m, d, name, abbr: f"{abbr} {d}, {y}",
    lambda y, m, d, name, abbr: f"{abbr}. {d}, {y}",
    lambda y, m, d, name, abbr: f"{d} {name} {y}",
    lambda y, m, d, name, abbr: f"{y}-{m:02d}-{d:02d}",
    lambda y, m, d, name, abbr: f"{m:02d}/{d:02d}/{y}",
    lambda y, m, d, name, abbr: f"{d:02d}-{abbr}-{y}",
]

_MONTHS = [
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
]


def make_phi_report(
    rng: random.Random, report_id: str, keywords: list[str]
) -> tuple[Report, list[PlantedPhi]]:
    """A report with keyword content plus planted PHI in all nine categories.

    Every instance is also represented in the metadata sidecar where DICOM
    would carry it, so sidecar+text fusion has something to fuse.
    """
    plants: list[PlantedPhi] = []
    metadata: list[tuple[str, str]] = []
    sentences: list[str] = []

    family = rng.choice(FAMILY_NAMES)
    given = rng.choice(GIVEN_NAMES)
    middle = rng.choice("ABCDEFGHJKLMNPRST")
    metadata.append(("PatientName", f"{family.upper()}^{given.upper()}^{middle}"))
    # one title-cued occurrence (text recognizers can see it) and one bare
    # family occurrence (only sidecar seeding can catch it)
    sentences.append(f"Dr. {given} {middle}. {family} reviewed the images.")
    plants.append(PlantedPhi("PersonName", f"{given} {middle}. {family}", True))
    sentences.append(f"Findings were discussed with {family}.")
    plants.append(PlantedPhi("PersonName", family, True))

    inst = rng.choice(INSTITUTIONS)
    metadata.append(("InstitutionName", inst))
    sentences.append(f"Study performed at {inst}.")
    plants.append(PlantedPhi("Institution", inst, True))

    addr = f"{rng.randint(10, 999)} {rng.choice(STREETS)}"
    metadata.append(("InstitutionAddress", addr))
    sentences.append(f"Requisition received from {addr}.")
    plants.append(PlantedPhi("Address", addr, True))

    age = rng.randint(18, 99)
    metadata.append(("PatientAge", f"{age:03d}Y"))
    sentences.append(f"The patient is a {age}-year-old.")
    plants.append(PlantedPhi("Age", f"{age}-year-old", True))

    y, m, d = rng.randint(2001, 2020), rng.randint(1, 12), rng.randint(1, 28)
    metadata.append(("StudyDate", f"{y}{m:02d}{d:02d}"))
    layout = rng.choice(_DATE_LAYOUTS)
    date_str = layout(y, m, d, _MONTHS[m - 1], _MONTHS[m - 1][:3])
    sentences.append(f"Comparison: {date_str}.")
    plants.append(PlantedPhi("Date", date_str, True))

    hh, mm, ss = rng.randint(0, 23), rng.randint(0, 59), rng.randint(0, 59)
    metadata.append(("StudyTime", f"{hh:02d}{mm:02d}{ss:02d}"))
    time_str = f"{hh:02d}:{mm:02d}"
    sentences.append(f"Acquired at {time_str}.")
    plants.append(PlantedPhi("Time", time_str, True))

    phone = f"90{rng.randint(0, 9)}-555-{rng.randint(0, 9999):04d}"
    metadata.append(("PatientTelephoneNumbers", phone))
    sentences.append(f"Contact {phone} with questions.")
    plants.append(PlantedPhi("Phone", phone, True))

    mrn = f"{rng.randint(10 ** 6, 10 ** 7 - 1)}"
    metadata.append(("PatientID", mrn))
    sentences.append(f"MRN: {mrn}.")
    plants.append(PlantedPhi("MedicalRecordNumber", mrn, True))

    acc = f"A{rng.randint(10 ** 5, 10 ** 6 - 1)}"
    metadata.append(("AccessionNumber", acc))
    sentences.append(f"Accession: {acc}.")
    plants.append(PlantedPhi("AccessionNumber", acc, True))

    kw = rng.choice(keywords)
    sentences.append(f"There is {kw}.")
    kw2 = rng.choice(keywords)
    sentences.append(f"No evidence of {kw2}.")
    sentences.extend(rng.sample(FILLER, 2))

    rng.shuffle(sentences)
    return Report(report_id, "synth", " ".join(sentences), tuple(metadata)), plants
