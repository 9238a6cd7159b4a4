"""Exception types shared across the package.

All data-level failures derive from RadlabelError so the CLI can map them
to exit code 2 (usage errors exit 1).
"""


class RadlabelError(Exception):
    """Base class for all radlabel data errors."""


class CorpusError(RadlabelError):
    """Malformed or inconsistent reports/labels/arbitration files."""


class LexiconError(RadlabelError):
    """Invalid lexicon configuration."""


class AnnotationError(RadlabelError):
    """Bad external NLP annotation input."""


class SamplingError(RadlabelError):
    """Invalid sampling request (e.g. n > population size)."""


class ArbitrationError(RadlabelError):
    """Arbitration record referencing an unknown or unlabeled pair."""
