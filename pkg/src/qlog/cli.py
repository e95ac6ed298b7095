"""Command-line entry points: qlog ingest | run | summarize | compare | serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .cluster import Dendrogram, LINKAGES
from .features import RuleConfig
from .metrics import adjusted_rand, entanglement
from .registry import DigestRegistry


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format",
        choices=pipeline.INGEST_FORMATS,
        default="sql-lines",
        help="input log format (default: sql-lines)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlog", description="Summarize SQL query logs into labeled clusters."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a log and report statement statistics")
    p.add_argument("path")
    _add_format(p)
    p.add_argument("--out", help="write normalized records as JSONL here")

    p = sub.add_parser("run", help="run the full pipeline and persist a run directory")
    p.add_argument("path")
    _add_format(p)
    p.add_argument("--linkage", choices=LINKAGES, default="average")
    p.add_argument("--cut-k", type=int, default=None)
    p.add_argument("--cut-height", type=float, default=None)
    p.add_argument("--tau", type=float, default=0.8)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--prune-file", help="file of TAG@depth prune patterns, one per line")
    p.add_argument("--registry", help="existing registry file to continue from")
    p.add_argument("--out", required=True, help="run directory to write")

    p = sub.add_parser("summarize", help="print cluster summaries of a saved run")
    p.add_argument("rundir")
    p.add_argument("--tau", type=float, default=None, help="recompute at this threshold")

    p = sub.add_parser("compare", help="entanglement or ARI between two exports")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-p", "--norm", type=float, default=2.0, help="norm order for entanglement")

    p = sub.add_parser("serve", help="serve a run directory over HTTP")
    p.add_argument("rundir")
    p.add_argument("--bind", default="127.0.0.1:8321", help="host:port")
    p.add_argument("--static", default=None, help="directory of explorer UI assets")

    return parser


def cmd_ingest(args) -> int:
    stats = pipeline.IngestStats()
    kinds: dict[str, int] = {}
    out_fh = open(args.out, "w", encoding="utf-8") if args.out else None
    from . import frontend

    parsable = 0
    for record in pipeline.ingest(args.path, args.format, stats):
        kind = frontend.classify(record.sql)
        kinds[kind] = kinds.get(kind, 0) + 1
        outcome = frontend.parse(record.sql)
        if outcome.ast is not None:
            parsable += 1
        if out_fh:
            out_fh.write(
                json.dumps(
                    {
                        "sql": record.sql,
                        "timestamp": record.timestamp,
                        "user": record.user,
                        "session": record.session,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    if out_fh:
        out_fh.close()
    print(f"lines:      {stats.lines}")
    print(f"records:    {stats.records}")
    print(f"skipped:    {stats.skipped}")
    print(f"parsable:   {parsable}")
    print(f"unparsable: {stats.records - parsable}")
    for kind in sorted(kinds):
        print(f"  {kind:<8} {kinds[kind]}")
    return 0


def cmd_run(args) -> int:
    rules = RuleConfig(max_depth=args.max_depth)
    if args.prune_file:
        patterns = tuple(
            line.strip()
            for line in Path(args.prune_file).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.strip().startswith("#")
        )
        rules = RuleConfig(max_depth=args.max_depth, prune_patterns=patterns)
    config = pipeline.PipelineConfig(
        rules=rules,
        linkage=args.linkage,
        cut_k=args.cut_k,
        cut_height=args.cut_height,
        tau=args.tau,
    )
    registry = DigestRegistry.load(args.registry) if args.registry else None
    records = pipeline.ingest(args.path, args.format)
    run = pipeline.run_pipeline(records, config, registry)
    pipeline.save_run(run, args.out)
    print(f"run {run.run_id} written to {args.out}")
    print(f"records:   {run.counts['total_records']}")
    print(f"skeletons: {run.counts['skeletons']}")
    print(f"clusters:  {run.flat.k if run.flat else 0}")
    for phase in ("preprocess", "relabel", "cluster", "fptree"):
        print(f"  {phase:<10} {run.timings_ms[phase]:10.1f} ms")
    return 0


def cmd_summarize(args) -> int:
    run = pipeline.load_run(args.rundir)
    if args.tau is not None:
        from .summarize import summarize_cluster

        for cid, summary in sorted(run.summaries.items()):
            fresh = summarize_cluster(
                cid, run.corpus, summary.member_ids, run.registry, args.tau
            )
            fresh.label = summary.label
            run.summaries[cid] = fresh
        pipeline.save_run(run, args.rundir)
    for cid, summary in sorted(run.summaries.items()):
        print(
            f"[{cid}] label={summary.label} skeletons={summary.n_skeletons} "
            f"queries={summary.n_queries}"
        )
        for line in summary.explanation.splitlines():
            print(f"    {line}")
    return 0


def _load_compare_input(path: str):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict) and "merges" in data:
        return "dendrogram", Dendrogram.from_json(json.dumps(data)).leaf_order()
    if isinstance(data, dict) and "labels" in data:
        return "labels", list(data["labels"])
    if isinstance(data, list):
        return "labels", list(data)
    raise ValueError(f"{path}: expected a dendrogram export or a label list")


def cmd_compare(args) -> int:
    kind_a, a = _load_compare_input(args.a)
    kind_b, b = _load_compare_input(args.b)
    if kind_a != kind_b:
        print("error: inputs must both be dendrograms or both be label files", file=sys.stderr)
        return 2
    if kind_a == "dendrogram":
        score = entanglement(a, b, p=args.norm)
        print(f"entanglement (p={args.norm:g}): {score:.4f}")
    else:
        print(f"adjusted rand index: {adjusted_rand(a, b):.4f}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    host, _, port = args.bind.partition(":")
    serve(args.rundir, host=host or "127.0.0.1", port=int(port or 8321), static_dir=args.static)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "ingest": cmd_ingest,
        "run": cmd_run,
        "summarize": cmd_summarize,
        "compare": cmd_compare,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
