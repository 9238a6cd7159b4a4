"""Spot-check statistics: seeded sampling, arbitration bookkeeping, and
finite-population t confidence intervals for per-keyword label precision.

The interval for a sampled proportion p_hat is

    p_hat +/- t * SE(p_hat) / sqrt(n),   SE = sqrt(p_hat (1 - p_hat)) * fpc
    fpc = sqrt((N - n) / (N - 1))

with t fixed at 2.04 (95% confidence, sample sizes near 30) unless the
df-exact mode is enabled. Samples smaller than 20 get a point estimate
only.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from .corpus import ArbitrationRecord, LabelRecord
from .errors import ArbitrationError, SamplingError

DEFAULT_T = 2.04
DEFAULT_SAMPLE_SIZE = 33
POINT_ONLY_BELOW = 20


@dataclass(frozen=True)
class SampleSpec:
    keyword: str
    population_size: int
    sample_size: int = DEFAULT_SAMPLE_SIZE
    seed: int = 0


@dataclass(frozen=True)
class CiParams:
    t: float = DEFAULT_T
    confidence_level: float = 0.95
    df_exact: bool = False

    def t_for(self, n: int) -> float:
        if not self.df_exact or n < 2:
            return self.t
        from scipy.stats import t as t_dist

        return float(t_dist.ppf(0.5 + self.confidence_level / 2.0, n - 1))


@dataclass(frozen=True)
class CiResult:
    keyword: str
    population_size: int
    sample_size: int
    hits: int
    p_hat: float
    se: float
    lower: float
    upper: float
    point_only: bool


def per_keyword_seed(seed: int, keyword: str) -> int:
    """Stable sub-seed so multi-keyword runs and single draws agree."""
    digest = hashlib.sha256(f"{seed}:{keyword}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def draw_sample(spec: SampleSpec, population: list[str]) -> list[str]:
    """n distinct ids, uniform without replacement, in draw order."""
    if len(population) != spec.population_size:
        raise SamplingError(
            f"population has {len(population)} ids, spec says {spec.population_size}"
        )
    if spec.sample_size <= 0:
        raise SamplingError("sample size must be positive")
    if spec.sample_size > spec.population_size:
        raise SamplingError(
            f"cannot sample {spec.sample_size} from {spec.population_size} positives; "
            "review the whole population as a point-only check instead"
        )
    rng = random.Random(spec.seed)
    return rng.sample(sorted(population), spec.sample_size)


def fpc(population_size: int, sample_size: int) -> float:
    """Finite population correction sqrt((N - n) / (N - 1))."""
    if population_size < 2:
        raise SamplingError("finite population correction undefined for N < 2")
    if not 1 <= sample_size <= population_size:
        raise SamplingError(f"need 1 <= n <= N, got n={sample_size} N={population_size}")
    return math.sqrt((population_size - sample_size) / (population_size - 1))


def confidence_interval(
    population_size: int,
    sample_size: int,
    hits: int,
    params: CiParams = CiParams(),
    keyword: str = "",
) -> CiResult:
    if sample_size <= 0:
        raise SamplingError("cannot build an interval from an empty sample")
    if not 0 <= hits <= sample_size <= population_size:
        raise SamplingError(
            f"need 0 <= hits <= n <= N, got hits={hits} n={sample_size} N={population_size}"
        )
    p_hat = hits / sample_size
    if sample_size < POINT_ONLY_BELOW:
        se = (
            math.sqrt(p_hat * (1.0 - p_hat)) * fpc(population_size, sample_size)
            if population_size >= 2
            else 0.0
        )
        return CiResult(keyword, population_size, sample_size, hits, p_hat, se, p_hat, p_hat, True)
    se = math.sqrt(p_hat * (1.0 - p_hat)) * fpc(population_size, sample_size)
    half = params.t_for(sample_size) * se / math.sqrt(sample_size)
    lower = max(0.0, p_hat - half)
    upper = min(1.0, p_hat + half)
    return CiResult(keyword, population_size, sample_size, hits, p_hat, se, lower, upper, False)


def effective_verdicts(records: list[ArbitrationRecord]) -> dict[tuple[str, str], bool]:
    """Resolve the append-only log: per (report, keyword, arbiter) the later
    entry supersedes, then the latest effective entry decides the pair."""
    per_arbiter: dict[tuple[str, str, str], tuple[int, ArbitrationRecord]] = {}
    for seq, rec in enumerate(records):
        per_arbiter[(rec.report_id, rec.keyword, rec.arbiter_id)] = (seq, rec)
    latest: dict[tuple[str, str], tuple[int, bool]] = {}
    for (report_id, keyword, _arbiter), (seq, rec) in per_arbiter.items():
        key = (report_id, keyword)
        if key not in latest or seq > latest[key][0]:
            latest[key] = (seq, rec.correct)
    return {key: correct for key, (_seq, correct) in latest.items()}


@dataclass(frozen=True)
class SummaryRow:
    keyword: str
    n_positive: int
    n_sampled: int
    n_correct: int
    ci: CiResult | None

    def csv_fields(self) -> tuple[str, ...]:
        if self.n_positive == 0:
            tail = ("N/A", "N/A", "N/A")
        elif self.n_sampled == 0:
            tail = ("unsampled", "unsampled", "unsampled")
        else:
            assert self.ci is not None
            tail = (fmt3(self.ci.p_hat), fmt3(self.ci.lower), fmt3(self.ci.upper))
        return (self.keyword, str(self.n_positive), str(self.n_sampled), str(self.n_correct)) + tail

    def interval_display(self) -> str:
        if self.n_positive == 0:
            return "N/A"
        if self.n_sampled == 0:
            return "unsampled"
        assert self.ci is not None
        if self.ci.point_only:
            return fmt3(self.ci.p_hat)
        return f"[{fmt3(self.ci.lower)}, {fmt3(self.ci.upper)}]"


def fmt3(x: float) -> str:
    return f"{x:.3f}"


def positive_population(labels: list[LabelRecord], stage: str = "final") -> dict[str, list[str]]:
    """keyword -> sorted report_ids labeled positive at the given stage."""
    if stage not in ("nlp", "final"):
        raise ValueError(f"stage must be 'nlp' or 'final', got {stage!r}")
    pops: dict[str, set[str]] = {}
    for rec in labels:
        pops.setdefault(rec.keyword, set())
        status = rec.nlp_status if stage == "nlp" else rec.final_status
        if status == "positive":
            pops[rec.keyword].add(rec.report_id)
    return {kw: sorted(ids) for kw, ids in pops.items()}


def summarize(
    labels: list[LabelRecord],
    arbitrations: list[ArbitrationRecord],
    params: CiParams = CiParams(),
    stage: str = "final",
) -> list[SummaryRow]:
    """One row per keyword: population size, arbitrated sample, interval.

    Keywords with no positives get N/A; positive keywords nobody has
    arbitrated yet are flagged unsampled.
    """
    pops = positive_population(labels, stage)
    verdicts = effective_verdicts(arbitrations)

    counts: dict[str, tuple[int, int]] = {kw: (0, 0) for kw in pops}
    for (report_id, keyword), correct in sorted(verdicts.items()):
        if keyword not in pops:
            raise ArbitrationError(f"arbitration for unknown keyword {keyword!r}")
        if report_id not in pops[keyword]:
            raise ArbitrationError(
                f"arbitration references ({report_id!r}, {keyword!r}) "
                f"which is not {stage}-positive"
            )
        n, hits = counts[keyword]
        counts[keyword] = (n + 1, hits + (1 if correct else 0))

    rows: list[SummaryRow] = []
    for keyword in sorted(pops):
        population = len(pops[keyword])
        n, hits = counts[keyword]
        ci = None
        if population > 0 and n > 0:
            ci = confidence_interval(population, n, hits, params, keyword=keyword)
        rows.append(SummaryRow(keyword, population, n, hits, ci))
    return rows
