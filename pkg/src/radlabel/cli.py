"""Command-line interface.

Subcommands mirror the pipeline stages: deid, label, sample, ci, serve,
run, explain. Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, corpus as corpus_io
from .deid import first_pass, load_patterns, load_store, write_store
from .errors import RadlabelError
from .fpr import explain_report
from .lexicon import load_lexicon
from .nlp import ingest_external_annotations
from .pipeline import PipelineConfig, deid_corpus, label_corpus, nlp_and_final_counts, run_pipeline
from .stats import CiParams, SampleSpec, draw_sample, per_keyword_seed, positive_population, summarize

log = logging.getLogger("radlabel")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radlabel", description=__doc__)
    parser.add_argument("--version", action="version", version=f"radlabel {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deid", help="two-pass de-identification")
    p.add_argument("--in", dest="infile", required=True, help="reports JSONL")
    p.add_argument("--store", required=True, help="PHI store JSONL (accumulates across runs)")
    p.add_argument("--out", help="de-identified reports JSONL")
    p.add_argument("--passes", choices=["1", "2", "both"], default="both")
    p.add_argument("--patterns", help="recognizer pattern table (JSON)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("label", help="annotate and reduce a corpus to label records")
    p.add_argument("--in", dest="infile", required=True, help="reports JSONL (normally de-identified)")
    p.add_argument("--lexicon", help="lexicon TOML (default: built-in)")
    p.add_argument("--stage", choices=["nlp", "final"], default="final")
    p.add_argument("--out", required=True, help="labels JSONL")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--external-nlp", help="external concept annotations JSONL to ingest")

    p = sub.add_parser("sample", help="draw a seeded review sample for a keyword")
    p.add_argument("--labels", required=True)
    p.add_argument("--keyword", action="append", required=True, help="repeatable")
    p.add_argument("--n", type=int, default=33)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stage", choices=["nlp", "final"], default="final")
    p.add_argument("--out", help="samples JSONL (draw order logged here)")

    p = sub.add_parser("ci", help="summary table with confidence intervals")
    p.add_argument("--labels", required=True)
    p.add_argument("--arbitrations", help="arbitration log JSONL")
    p.add_argument("--stage", choices=["nlp", "final"], default="final")
    p.add_argument("--t", type=float, default=2.04)
    p.add_argument("--df-exact", action="store_true", help="use the exact t quantile for each n")
    p.add_argument("--out", required=True, help="summary CSV")
    p.add_argument("--no-figure", action="store_true", help="skip the interval figure")

    p = sub.add_parser("serve", help="run the arbitration review service")
    p.add_argument("--labels", required=True)
    p.add_argument("--corpus", required=True, help="de-identified reports JSONL")
    p.add_argument("--log", required=True, help="append-only arbitration log")
    p.add_argument("--sessions", help="sessions file (default: <log>.sessions)")
    p.add_argument("--stage", choices=["nlp", "final"], default="final")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--t", type=float, default=2.04)
    p.add_argument("--allow-raw", action="store_true", help="serve a corpus without deid markers")

    p = sub.add_parser("run", help="end-to-end: deid, label, sample, summary")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=0, help="0 = all cores")
    p.add_argument("--t", type=float, default=2.04)
    p.add_argument("--skip-deid", action="store_true")
    p.add_argument("--sample-size", type=int, default=33)

    p = sub.add_parser("explain", help="per-sentence verdict trace for one report/keyword")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon")
    p.add_argument("report_id")
    p.add_argument("keyword")
    return parser


def _cmd_deid(args) -> int:
    corpus = corpus_io.load_corpus(args.infile)
    patterns = load_patterns(args.patterns)
    store = load_store(args.store)
    if args.passes in ("1", "both"):
        store = first_pass(corpus, store, patterns)
        write_store(store, args.store)
        log.info("PHI store now holds %d entities", len(store))
    if args.passes in ("2", "both"):
        if not args.out:
            raise RadlabelError("--out is required when running pass 2")
        scrubbed = deid_corpus(corpus, store, jobs=args.jobs, store_path=args.store)
        corpus_io.write_corpus(scrubbed, args.out)
        log.info("wrote %d de-identified reports to %s", len(scrubbed), args.out)
    return 0


def _cmd_label(args) -> int:
    corpus = corpus_io.load_corpus(args.infile)
    lexicon = load_lexicon(args.lexicon)
    annotations = None
    if args.external_nlp:
        annotations = ingest_external_annotations(args.external_nlp, corpus, lexicon)
    records = label_corpus(corpus, lexicon, jobs=args.jobs, annotations=annotations)
    if args.stage == "nlp":
        records = [
            corpus_io.LabelRecord(r.report_id, r.keyword, r.condition, r.nlp_status, "unmarked", ())
            for r in records
        ]
    corpus_io.write_labels(records, args.out)
    for keyword, nlp_n, final_n in nlp_and_final_counts(records):
        log.info("%-24s NLP-pos=%-6d final-pos=%d", keyword, nlp_n, final_n)
    return 0


def _cmd_sample(args) -> int:
    labels = corpus_io.load_labels(args.labels)
    pops = positive_population(labels, args.stage)
    out = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        for keyword in args.keyword:
            population = pops.get(keyword)
            if population is None:
                raise RadlabelError(f"keyword {keyword!r} does not appear in the labels file")
            spec = SampleSpec(keyword, len(population), args.n, per_keyword_seed(args.seed, keyword))
            drawn = draw_sample(spec, population)
            print(f"# {keyword}: {args.n} of {len(population)} {args.stage}-positive (seed {args.seed})")
            for report_id in sorted(drawn):
                print(report_id)
            if out:
                out.write(
                    json.dumps(
                        {
                            "keyword": keyword,
                            "population_size": len(population),
                            "sample_size": args.n,
                            "seed": args.seed,
                            "draw_order": drawn,
                            "sorted": sorted(drawn),
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    finally:
        if out:
            out.close()
    return 0


def _cmd_ci(args) -> int:
    labels = corpus_io.load_labels(args.labels)
    arbitrations = corpus_io.load_arbitrations(args.arbitrations) if args.arbitrations else []
    params = CiParams(t=args.t, df_exact=args.df_exact)
    rows = summarize(labels, arbitrations, params, args.stage)
    corpus_io.write_summary_csv((r.csv_fields() for r in rows), args.out)
    if not args.no_figure:
        from .figures import render_summary_figure

        figure_path = str(Path(args.out).with_suffix(".png"))
        render_summary_figure(rows, figure_path)
        log.info("figure written to %s", figure_path)
    print(f"{'keyword':<24} {'N':>7} {'precision':>10} {'C.I.':>16}")
    for row in rows:
        precision = f"{row.n_correct}/{row.n_sampled}" if row.n_sampled else "-"
        print(f"{row.keyword:<24} {row.n_positive:>7} {precision:>10} {row.interval_display():>16}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    corpus = corpus_io.load_corpus(args.corpus)
    labels = corpus_io.load_labels(args.labels)
    app = create_app(
        corpus,
        labels,
        args.log,
        args.sessions,
        stage=args.stage,
        params=CiParams(t=args.t),
        allow_raw=args.allow_raw,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_run(args) -> int:
    config = PipelineConfig(
        corpus_path=args.infile,
        outdir=args.outdir,
        lexicon_path=args.lexicon,
        seed=args.seed,
        jobs=args.jobs,
        ci_params=CiParams(t=args.t),
        skip_deid=args.skip_deid,
        sample_size=args.sample_size,
    )
    outputs = run_pipeline(config)
    labels = corpus_io.load_labels(outputs["labels"])
    print(f"{'keyword':<24} {'NLP-pos.':>9} {'Final-pos.':>11}")
    for keyword, nlp_n, final_n in nlp_and_final_counts(labels):
        print(f"{keyword:<24} {nlp_n:>9} {final_n:>11}")
    for kind, path in sorted(outputs.items()):
        print(f"{kind}: {path}")
    return 0


def _cmd_explain(args) -> int:
    corpus = corpus_io.load_corpus(args.corpus)
    lexicon = load_lexicon(args.lexicon)
    report = corpus.get(args.report_id)
    for line in explain_report(report, args.keyword, lexicon):
        print(line)
    return 0


_COMMANDS = {
    "deid": _cmd_deid,
    "label": _cmd_label,
    "sample": _cmd_sample,
    "ci": _cmd_ci,
    "serve": _cmd_serve,
    "run": _cmd_run,
    "explain": _cmd_explain,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except RadlabelError as exc:
        log.error("%s", exc)
        return 2
    except OSError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
