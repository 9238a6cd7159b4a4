"""End-to-end pipeline orchestration.

Stage order is fixed: de-identification, mention/assertion annotation,
sentence-level reduction, then sampling and the summary table. Reports
are independent inside each stage, so stages parallelize with a process
pool and re-emit results in report_id order; serial and parallel runs
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, corpus as corpus_io, deid as deid_mod
from .corpus import Corpus, LabelRecord, Report
from .errors import RadlabelError
from .fpr import reduce_report
from .lexicon import Lexicon, load_lexicon
from .nlp import NlpAnnotation, annotate_report
from .stats import CiParams, SampleSpec, draw_sample, per_keyword_seed, positive_population, summarize

log = logging.getLogger(__name__)

_WORKER_LEXICON: Lexicon | None = None
_WORKER_STORE: deid_mod.PhiStore | None = None


@dataclass
class PipelineConfig:
    corpus_path: str
    outdir: str
    lexicon_path: str | None = None
    seed: int = 0
    jobs: int = 0  # 0 -> all cores
    ci_params: CiParams = field(default_factory=CiParams)
    skip_deid: bool = False
    sample_size: int = 33

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


def _init_label_worker(lexicon_path: str | None) -> None:
    global _WORKER_LEXICON
    _WORKER_LEXICON = load_lexicon(lexicon_path)


def _label_one(report: Report) -> list[LabelRecord]:
    assert _WORKER_LEXICON is not None
    annotation = annotate_report(report, _WORKER_LEXICON)
    return reduce_report(annotation, report, _WORKER_LEXICON)


def label_corpus(
    corpus: Corpus,
    lexicon: Lexicon,
    *,
    jobs: int = 1,
    annotations: list[NlpAnnotation] | None = None,
) -> list[LabelRecord]:
    """NLP + reduction for every report, sorted by (report_id, keyword)."""
    records: list[LabelRecord] = []
    if annotations is not None:
        by_id = {a.report_id: a for a in annotations}
        for report in corpus:
            ann = by_id.get(report.report_id)
            if ann is None:
                ann = annotate_report(report, lexicon)
            records.extend(reduce_report(ann, report, lexicon))
    elif jobs <= 1 or len(corpus) < 4:
        for report in corpus:
            annotation = annotate_report(report, lexicon)
            records.extend(reduce_report(annotation, report, lexicon))
    else:
        path = None if lexicon.source_path == "<builtin>" else lexicon.source_path
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_label_worker, initargs=(path,)
        ) as pool:
            for result in pool.map(_label_one, corpus.reports, chunksize=16):
                records.extend(result)
    records.sort(key=lambda r: (r.report_id, r.keyword))
    return records


def _init_deid_worker(store_path: str) -> None:
    global _WORKER_STORE
    _WORKER_STORE = deid_mod.load_store(store_path)


def _deid_one(report: Report) -> Report:
    assert _WORKER_STORE is not None
    return deid_mod.second_pass(report, _WORKER_STORE)


def deid_corpus(corpus: Corpus, store: deid_mod.PhiStore, *, jobs: int = 1, store_path: str | None = None) -> Corpus:
    """Second pass over every report; pure given an immutable store."""
    if jobs <= 1 or len(corpus) < 4 or store_path is None:
        reports = [deid_mod.second_pass(r, store) for r in corpus]
    else:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_deid_worker, initargs=(store_path,)
        ) as pool:
            reports = list(pool.map(_deid_one, corpus.reports, chunksize=16))
    return Corpus(reports, source_path=corpus.source_path + "#deid")


def _lexicon_fingerprint(lexicon_path: str | None) -> str:
    if lexicon_path is None:
        from importlib import resources

        raw = resources.files("radlabel.data").joinpath("default_lexicon.toml").read_bytes()
    else:
        raw = Path(lexicon_path).read_bytes()
    return hashlib.sha256(raw).hexdigest()


class StageError(RadlabelError):
    """A pipeline stage failed; carries the stage name for the abort message."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def run_pipeline(config: PipelineConfig) -> dict[str, str]:
    """Run every stage, returning the paths of the files written."""
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = config.effective_jobs()

    source = _stage("load", corpus_io.load_corpus, config.corpus_path)
    lexicon = _stage("load", load_lexicon, config.lexicon_path)
    provenance = {
        "corpus_sha256": corpus_io.file_sha256(config.corpus_path),
        "lexicon_sha256": _lexicon_fingerprint(config.lexicon_path),
        "seed": config.seed,
        "tool_version": __version__,
    }

    outputs: dict[str, str] = {}
    working = source
    if not config.skip_deid:
        store_path = outdir / "phi.jsonl"
        store = _stage("deid", deid_mod.first_pass, source, deid_mod.load_store(store_path))
        deid_mod.write_store(store, store_path)
        corpus_io.write_provenance(store_path, provenance)
        working = _stage("deid", deid_corpus, source, store, jobs=jobs, store_path=str(store_path))
        deid_path = outdir / "reports.deid.jsonl"
        corpus_io.write_corpus(working, deid_path)
        corpus_io.write_provenance(deid_path, provenance)
        outputs["phi_store"] = str(store_path)
        outputs["deid_corpus"] = str(deid_path)

    labels = _stage("label", label_corpus, working, lexicon, jobs=jobs)
    labels_path = outdir / "labels.jsonl"
    corpus_io.write_labels(labels, labels_path)
    corpus_io.write_provenance(labels_path, provenance)
    outputs["labels"] = str(labels_path)

    samples_path = outdir / "samples.jsonl"
    _stage("sample", _write_samples, labels, config, samples_path)
    corpus_io.write_provenance(samples_path, provenance)
    outputs["samples"] = str(samples_path)

    rows = _stage("summary", summarize, labels, [], config.ci_params, stage="final")
    summary_path = outdir / "summary.csv"
    corpus_io.write_summary_csv((r.csv_fields() for r in rows), summary_path)
    corpus_io.write_provenance(summary_path, provenance)
    outputs["summary"] = str(summary_path)

    from .figures import render_summary_figure

    figure_path = outdir / "summary.png"
    render_summary_figure(rows, figure_path)
    corpus_io.write_provenance(figure_path, provenance)
    outputs["figure"] = str(figure_path)
    return outputs


def _write_samples(labels: list[LabelRecord], config: PipelineConfig, path: Path) -> None:
    import json

    pops = positive_population(labels, stage="final")
    with open(path, "w", encoding="utf-8") as fh:
        for keyword in sorted(pops):
            population = pops[keyword]
            if not population:
                continue
            n = min(config.sample_size, len(population))
            spec = SampleSpec(keyword, len(population), n, per_keyword_seed(config.seed, keyword))
            drawn = draw_sample(spec, population)
            fh.write(
                json.dumps(
                    {
                        "keyword": keyword,
                        "population_size": len(population),
                        "sample_size": n,
                        "seed": config.seed,
                        "draw_order": drawn,
                        "sorted": sorted(drawn),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def nlp_and_final_counts(labels: list[LabelRecord]) -> list[tuple[str, int, int]]:
    """Per keyword: (keyword, nlp_positive_count, final_positive_count)."""
    nlp_pops = positive_population(labels, stage="nlp")
    final_pops = positive_population(labels, stage="final")
    return [(kw, len(nlp_pops[kw]), len(final_pops.get(kw, []))) for kw in sorted(nlp_pops)]
