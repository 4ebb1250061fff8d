"""Command-line entry point: gen, ingest, extract, graph build/stats, query, eval."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus, extract, kgraph, retrieval
from .bm25 import Bm25Params
from .errors import LegalKGError
from .synth import GeneratorParams, generate_corpus

logger = logging.getLogger("legalkg")


def _emit(obj, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, ensure_ascii=False, indent=2))
        return
    if isinstance(obj, dict):
        for key, value in obj.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, ensure_ascii=False)
            print(f"{key}\t{value}")
    else:
        for item in obj:
            print(item)


def _match_cfg(args) -> extract.LawMatchConfig:
    return extract.LawMatchConfig(score_threshold=args.threshold, tie_break=args.tie_break)


def _markers(args) -> corpus.SectionMarkerConfig:
    return corpus.SectionMarkerConfig(**(getattr(args, "markers", None) or {}))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> None:
    params = GeneratorParams(
        cases=args.cases, laws=args.laws, domains=args.domains, courts=args.courts,
        mean_citations=args.mean_citations, noise=args.noise, group_size=args.group_size,
    )
    params.validate()
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise LegalKGError(f"cannot create output directory {out}: {exc.strerror}") from None
    synth = generate_corpus(args.seed, params)
    corpus.save_cases(synth.cases, out / "cases.jsonl")
    corpus.save_laws(synth.laws, out / "laws.jsonl")
    corpus.save_gold(synth.gold, out / "gold.jsonl")
    logger.info("wrote %d cases, %d laws to %s", len(synth.cases), len(synth.laws), out)


def cmd_ingest(args) -> None:
    cases = corpus.load_cases(args.cases, _markers(args))
    laws = corpus.load_laws(args.laws) if args.laws else None
    summary = {"cases": len(cases)}
    if laws is not None:
        summary["laws"] = len(laws)
    if args.gold:
        gold = corpus.load_gold(args.gold, laws)
        unknown = sorted(set(gold) - {c.case_id for c in cases})
        if unknown:
            raise LegalKGError(f"gold references unknown case {unknown[0]!r}")
        summary["gold"] = len(gold)
    if args.out:
        corpus.save_cases(cases, args.out)
    _emit(summary, args.format)


def cmd_extract(args) -> None:
    cases = corpus.load_cases(args.cases, _markers(args))
    laws = corpus.load_laws(args.laws)
    cfg = _match_cfg(args)
    matcher = extract.LawMatcher(laws, cfg)
    records = [extract.extract_all(c, matcher, cfg) for c in cases]
    extract.save_records(records, args.out)
    logger.info("extracted %d records to %s", len(records), args.out)


def cmd_graph_build(args) -> None:
    records = extract.load_records(args.records)
    laws = corpus.load_laws(args.laws)
    known = {law.law_id for law in laws}
    for rec in records:
        bad = sorted(rec.cited_laws - known)
        if bad:
            raise LegalKGError(f"record {rec.case_id!r} cites unknown law {bad[0]!r}")
    g = kgraph.build_graph(records, laws)
    kgraph.export_graph(g, args.out)
    logger.info("graph: %d nodes, %d edges -> %s", len(g.nodes), len(g.edges), args.out)


def cmd_graph_stats(args) -> None:
    g = kgraph.import_graph(args.graph)
    stats = kgraph.graph_stats(g).to_dict()
    if not args.undirected_density:
        stats.pop("undirected_density")
    _emit(stats, args.format)


def _read_query_case(path: str, markers) -> corpus.CaseRecord:
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise LegalKGError(f"{path}: empty case file")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        # A JSONL file: take its first record.
        try:
            obj = json.loads(text.splitlines()[0])
        except json.JSONDecodeError as exc:
            raise LegalKGError(f"{path}: malformed JSON ({exc.msg})") from None
    return corpus.case_from_dict(obj, markers=markers)


def cmd_query(args) -> None:
    case = _read_query_case(args.case, _markers(args))
    params = Bm25Params(args.k1, args.b)
    if args.method in (1, 2):
        law_index = retrieval.build_law_index(corpus.load_laws(args.laws))
        if args.method == 1:
            pred = retrieval.method1_case_law(case, args.section, law_index, params)
        else:
            pred = retrieval.method2_mixed(case, law_index, args.agg, params)
    else:
        if not args.graph or not args.cases:
            raise LegalKGError("methods 3 and 4 need --graph and --cases")
        g = kgraph.import_graph(args.graph)
        graph_case_ids = set(g.nodes_of_type(kgraph.NodeType.CASE))
        pool = [c for c in corpus.load_cases(args.cases, _markers(args)) if c.case_id in graph_case_ids]
        missing = graph_case_ids - {c.case_id for c in pool}
        if missing:
            raise LegalKGError(f"graph case {sorted(missing)[0]!r} not found in {args.cases}")
        case_index = retrieval.build_case_index(pool)
        if args.method == 3:
            pred = retrieval.method3_case_case(case, case_index, g, args.k, args.agg, params)
        else:
            pred = retrieval.method4_domain_case_case(case, case_index, g, args.k, args.agg, params)
    if args.format == "json":
        _emit({"case_id": case.case_id, "method": args.method, "predicted_laws": sorted(pred)}, "json")
    else:
        _emit(sorted(pred), "tsv")


def _parse_runs(spec: str) -> list[retrieval.RunSpec]:
    if spec == "all":
        return list(retrieval.RUNS)
    try:
        wanted = {int(x) for x in spec.split(",")}
    except ValueError:
        raise LegalKGError(f"--runs must be 'all' or a comma list of 1..11, got {spec!r}") from None
    bad = wanted - {r.run for r in retrieval.RUNS}
    if bad:
        raise LegalKGError(f"unknown run(s) {sorted(bad)}")
    return [r for r in retrieval.RUNS if r.run in wanted]


def cmd_eval(args) -> None:
    runs = _parse_runs(args.runs)
    cases = corpus.load_cases(args.cases, _markers(args))
    laws = corpus.load_laws(args.laws)
    gold = corpus.load_gold(args.gold, laws)
    if not 0 < args.holdout < len(cases):
        raise LegalKGError(f"holdout size {args.holdout} must be smaller than the corpus ({len(cases)})")
    split = retrieval.select_holdout([c.case_id for c in cases], args.holdout, args.seed)
    params = retrieval.HarnessParams(bm25=Bm25Params(args.k1, args.b), match=_match_cfg(args))
    report = retrieval.run_all(cases, laws, gold, split, params, runs)
    rows = report.rows()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.tsv").write_text(retrieval.format_results(rows, "tsv"), encoding="utf-8")
        (out / "results.json").write_text(retrieval.format_results(rows, "json") + "\n", encoding="utf-8")
        retrieval.write_predictions(report.prediction_rows(), out / "predictions.jsonl")
        # The graph actually used, so holdout integrity can be audited afterwards.
        kgraph.export_graph(report.graph, out / "graph")
    sys.stdout.write(retrieval.format_results(rows, args.format))
    if args.format == "json":
        sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="FILE", default=default,
                        help="JSON file of option defaults (keys are option names)")
    parser.add_argument("--format", choices=("json", "tsv"), default=default if suppress else "tsv")
    parser.add_argument("--quiet", action="store_true", default=default if suppress else False)


def _bm25_flags(p):
    p.add_argument("--k1", type=float, default=1.5)
    p.add_argument("--b", type=float, default=0.75)


def _match_flags(p):
    p.add_argument("--threshold", type=float, default=0.6, help="law match score threshold")
    p.add_argument("--tie-break", choices=("latest_year", "lexicographic"), default="latest_year")


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="legalkg", description=__doc__)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--laws", type=int, default=225)
    p.add_argument("--domains", type=int, default=6)
    p.add_argument("--courts", type=int, default=40)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--mean-citations", type=float, default=3.96)
    p.add_argument("--group-size", type=int, default=4, help="cases per paraphrase group")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen, stage="gen")

    p = sub.add_parser("ingest", parents=[common], help="validate and normalize input files")
    p.add_argument("--cases", required=True)
    p.add_argument("--laws")
    p.add_argument("--gold")
    p.add_argument("--out", help="write normalized (segmented) cases.jsonl here")
    p.set_defaults(func=cmd_ingest, stage="ingest")

    p = sub.add_parser("extract", parents=[common], help="extract attributes and cited laws")
    p.add_argument("--cases", required=True)
    p.add_argument("--laws", required=True)
    p.add_argument("--out", required=True, help="records.jsonl")
    _match_flags(p)
    p.set_defaults(func=cmd_extract, stage="extract")

    p = sub.add_parser("graph", parents=[common], help="build the graph or report its statistics")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    q = gsub.add_parser("build", parents=[common])
    q.add_argument("--records", required=True)
    q.add_argument("--laws", required=True)
    q.add_argument("--out", required=True, help="directory for nodes.jsonl and edges.jsonl")
    q.set_defaults(func=cmd_graph_build, stage="graph build")
    q = gsub.add_parser("stats", parents=[common])
    q.add_argument("--graph", required=True, help="directory holding nodes.jsonl and edges.jsonl")
    q.add_argument("--undirected-density", action="store_true",
                   help="also report 2|E| / (|V|(|V|-1))")
    q.set_defaults(func=cmd_graph_stats, stage="graph stats")

    p = sub.add_parser("query", parents=[common], help="predict relevant laws for one case")
    p.add_argument("--method", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--case", required=True, help="JSON file holding one case record")
    p.add_argument("--laws", help="laws.jsonl (methods 1 and 2)")
    p.add_argument("--graph", help="graph directory (methods 3 and 4)")
    p.add_argument("--cases", help="cases.jsonl holding the graph's cases (methods 3 and 4)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--agg", choices=("union", "intersection"), default="union")
    p.add_argument("--section", choices=("content", "judgment", "decision"), default="decision")
    _bm25_flags(p)
    p.set_defaults(func=cmd_query, stage="query")

    p = sub.add_parser("eval", parents=[common], help="run the 11-run evaluation")
    p.add_argument("--cases", required=True)
    p.add_argument("--laws", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--runs", default="all")
    p.add_argument("--holdout", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for results.tsv, results.json, predictions.jsonl and graph/")
    _bm25_flags(p)
    _match_flags(p)
    p.set_defaults(func=cmd_eval, stage="eval")

    if config:
        defaults = {k.replace("-", "_"): v for k, v in config.items()}
        for subparser in [*sub.choices.values(), *gsub.choices.values()]:
            subparser.set_defaults(**defaults)
        parser.set_defaults(**{k: v for k, v in defaults.items() if k in ("format", "quiet")})
    return parser


def _load_config(argv) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise LegalKGError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise LegalKGError(f"config {known.config} must hold a JSON object")
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = _load_config(argv)
    except LegalKGError as exc:
        print(f"legalkg: error: {exc}", file=sys.stderr)
        return 1
    args = build_parser(config).parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (LegalKGError, ValueError, OSError) as exc:
        print(f"legalkg {args.stage}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
