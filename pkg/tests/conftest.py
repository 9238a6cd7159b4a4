import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make synthgen importable

from radlabel.corpus import load_corpus
from radlabel.lexicon import load_lexicon

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def snippet_corpus():
    return load_corpus(DATA_DIR / "negating_situations.jsonl")


# (report_id -> keyword) the paper's eight negating situations discuss
SNIPPET_KEYWORDS = {
    "ns1": "stroke",        # patient history
    "ns2": "cva",           # intent of scan
    "ns3": "infarct",       # inconclusive diagnosis
    "ns4": "tumor",         # family information
    "ns5": "malformation",  # low sensitivity/resolution
    "ns6": "tumor",         # tumor-specific negators
    "ns7": "aneurysm",      # aneurysm-specific negators
    "ns8": "stroke",        # treatment already administered
}
