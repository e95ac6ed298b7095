"""End-to-end batch pipeline: ingest -> skeletons -> vectors -> clusters -> summaries.

The four phases are timed independently and a whole run round-trips through
a directory layout of plain JSON/text files, so analyses can be persisted,
re-served, and re-elaborated later.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from . import frontend
from .cluster import (
    Dendrogram,
    DistanceMatrix,
    FlatClustering,
    SkeletonCorpus,
    build_matrix,
    cut,
    hierarchical_cluster,
)
from .features import QuerySkeleton, RuleConfig, extract, skeletonize
from .registry import DigestRegistry
from .summarize import LABELS, ClusterSummary, summarize_cluster, visualize

RUN_FORMAT = "qlogrun v1"

INGEST_FORMATS = ("sql-lines", "tsv", "jsonl")


class RunNotFoundError(FileNotFoundError):
    pass


class RunFormatError(Exception):
    pass


@dataclass
class LogRecord:
    sql: str
    timestamp: str | None = None
    user: str | None = None
    session: str | None = None


@dataclass
class IngestStats:
    lines: int = 0
    records: int = 0
    skipped: int = 0


def ingest(
    path, format: str = "sql-lines", stats: IngestStats | None = None
) -> Iterator[LogRecord]:
    """Stream records from a log file; malformed lines are counted and skipped.

    Formats: 'sql-lines' (one statement per line), 'tsv'
    (timestamp<TAB>user<TAB>sql), 'jsonl' (objects with sql / timestamp /
    user / session keys).
    """
    if format not in INGEST_FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {INGEST_FORMATS}")
    stats = stats if stats is not None else IngestStats()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            stats.lines += 1
            line = line.rstrip("\n")
            if not line.strip():
                stats.skipped += 1
                continue
            if format == "sql-lines":
                record = LogRecord(sql=line.strip())
            elif format == "tsv":
                parts = line.split("\t", 2)
                if len(parts) != 3 or not parts[2].strip():
                    stats.skipped += 1
                    continue
                record = LogRecord(
                    sql=parts[2].strip(),
                    timestamp=parts[0] or None,
                    user=parts[1] or None,
                )
            else:
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError:
                    stats.skipped += 1
                    continue
                sql = obj.get("sql")
                if not isinstance(sql, str) or not sql.strip():
                    stats.skipped += 1
                    continue
                record = LogRecord(
                    sql=sql.strip(),
                    timestamp=obj.get("timestamp"),
                    user=obj.get("user"),
                    session=obj.get("session"),
                )
            stats.records += 1
            yield record


def anonymize_constants(sql: str) -> str:
    """Replace each constant token with a SHA-256 digest of its text.

    Display-side redaction only; skeletons are unaffected since constants
    are abstracted anyway.  Unparseable text is returned unchanged.
    """
    try:
        tokens = frontend.tokenize(sql)
    except frontend.SqlSyntaxError:
        return sql
    parts = []
    for kind, value, _ in tokens:
        if kind in ("num", "str"):
            digest = hashlib.sha256(value.encode("utf-8")).hexdigest()[:16]
            parts.append(f"'{digest}'")
        else:
            parts.append(value)
    return " ".join(parts)


@dataclass
class PipelineConfig:
    rules: RuleConfig = field(default_factory=RuleConfig)
    linkage: str = "average"
    cut_k: int | None = None
    cut_height: float | None = None
    tau: float = 0.8
    include_kinds: tuple[str, ...] = ("SELECT",)
    anonymize: bool = False

    def to_dict(self) -> dict:
        return {
            "rules": self.rules.to_dict(),
            "linkage": self.linkage,
            "cut_k": self.cut_k,
            "cut_height": self.cut_height,
            "tau": self.tau,
            "include_kinds": list(self.include_kinds),
            "anonymize": self.anonymize,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        return cls(
            rules=RuleConfig.from_dict(data.get("rules", {})),
            linkage=data.get("linkage", "average"),
            cut_k=data.get("cut_k"),
            cut_height=data.get("cut_height"),
            tau=data.get("tau", 0.8),
            include_kinds=tuple(data.get("include_kinds", ("SELECT",))),
            anonymize=data.get("anonymize", False),
        )


@dataclass
class AnalysisRun:
    run_id: str
    config: PipelineConfig
    registry: DigestRegistry
    corpus: SkeletonCorpus
    dendrogram: Dendrogram | None
    flat: FlatClustering | None
    summaries: dict[int, ClusterSummary]
    timings_ms: dict[str, float]
    counts: dict

    def cluster_members(self) -> dict[int, list[int]]:
        if self.flat is None:
            return {}
        out: dict[int, list[int]] = {}
        for skeleton, cluster in enumerate(self.flat.labels):
            out.setdefault(cluster, []).append(skeleton)
        return out


def _default_cut_k(n: int) -> int:
    # square-root rule of thumb when the analyst gave no cut criterion
    return max(1, min(n, round(n**0.5)))


def run_pipeline(
    records: Iterable[LogRecord],
    config: PipelineConfig | None = None,
    registry: DigestRegistry | None = None,
) -> AnalysisRun:
    """Execute the four phases (preprocess, relabel, cluster, summarize).

    Only statements whose kind is in config.include_kinds enter clustering;
    a log with no eligible parsable statements yields an explicit empty run.
    """
    config = config or PipelineConfig()
    registry = registry or DigestRegistry()
    timings: dict[str, float] = {}
    kind_hist: dict[str, int] = {}
    total = 0
    unparsable = 0
    excluded = 0

    t0 = time.perf_counter()
    # dedupe inline so memory tracks the distinct-skeleton count, not the log
    by_text: dict[str, QuerySkeleton] = {}
    parsable = 0
    include = frozenset(config.include_kinds)
    for record in records:
        total += 1
        sql = anonymize_constants(record.sql) if config.anonymize else record.sql
        try:
            tokens = frontend.tokenize(sql)
            kind = frontend.classify_tokens(tokens)
        except frontend.SqlSyntaxError:
            tokens, kind = None, "OTHER"
        kind_hist[kind] = kind_hist.get(kind, 0) + 1
        if kind not in include:
            excluded += 1
            continue
        outcome = frontend.parse_tokens(tokens, len(sql))
        if outcome.ast is None:
            unparsable += 1
            continue
        parsable += 1
        sk = skeletonize(outcome.ast)
        kept = by_text.get(sk.canonical_text)
        if kept is None:
            by_text[sk.canonical_text] = sk
        else:
            kept.count += 1
    corpus = SkeletonCorpus(skeletons=list(by_text.values()), total_queries=parsable)
    timings["preprocess"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    for sk in corpus.skeletons:
        sk.vector = extract(sk, config.rules, registry)
    timings["relabel"] = (time.perf_counter() - t0) * 1000.0

    counts = {
        "total_records": total,
        "parsable": corpus.total_queries,
        "unparsable": unparsable,
        "excluded_kinds": excluded,
        "kind_histogram": dict(sorted(kind_hist.items())),
        "skeletons": len(corpus),
    }

    t0 = time.perf_counter()
    dendrogram: Dendrogram | None = None
    flat: FlatClustering | None = None
    dists: DistanceMatrix | None = None
    if len(corpus) > 0:
        dists = build_matrix(corpus)
        dendrogram = hierarchical_cluster(dists, linkage=config.linkage)
        if config.cut_height is not None:
            flat = cut(dendrogram, height=config.cut_height)
        else:
            k = config.cut_k if config.cut_k is not None else _default_cut_k(len(corpus))
            flat = cut(dendrogram, k=min(k, len(corpus)))
    timings["cluster"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    summaries: dict[int, ClusterSummary] = {}
    if flat is not None:
        members_by_cluster: dict[int, list[int]] = {}
        for skeleton, cluster in enumerate(flat.labels):
            members_by_cluster.setdefault(cluster, []).append(skeleton)
        for cid in sorted(members_by_cluster):
            summaries[cid] = summarize_cluster(
                cid, corpus, members_by_cluster[cid], registry, config.tau, dists
            )
    timings["fptree"] = (time.perf_counter() - t0) * 1000.0

    digest = hashlib.sha256()
    digest.update(json.dumps(config.to_dict(), sort_keys=True).encode())
    for sk in corpus.skeletons:
        digest.update(f"{sk.canonical_text}\x00{sk.count}\n".encode())
    run_id = digest.hexdigest()[:12]

    return AnalysisRun(
        run_id=run_id,
        config=config,
        registry=registry,
        corpus=corpus,
        dendrogram=dendrogram,
        flat=flat,
        summaries=summaries,
        timings_ms=timings,
        counts=counts,
    )


def timing_plot_data(runs: Iterable[AnalysisRun]) -> list[dict]:
    """Rows of per-phase timings against log size, for external plotting."""
    rows = []
    for run in runs:
        row = {
            "queries": run.counts["total_records"],
            "skeletons": run.counts["skeletons"],
        }
        row.update({f"{phase}_ms": ms for phase, ms in sorted(run.timings_ms.items())})
        rows.append(row)
    return rows


def re_elaborate(run: AnalysisRun, k: int) -> dict:
    """Re-cut only the unknown-labeled portion of a run at finer granularity.

    Skeletons in unknown clusters are re-clustered into (up to) k new
    clusters, which take fresh ids; safe/unsafe clusters and their summaries
    are left untouched.  Returns {"new": [...], "retired": [...]}.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if run.flat is None:
        return {"new": [], "retired": []}
    unknown_cids = sorted(
        cid for cid, s in run.summaries.items() if s.label == "unknown"
    )
    if not unknown_cids:
        return {"new": [], "retired": []}
    members: list[int] = []
    for cid in unknown_cids:
        members.extend(run.summaries[cid].member_ids)
    members.sort()

    sub = SkeletonCorpus(
        skeletons=[run.corpus.skeletons[i] for i in members],
        total_queries=sum(run.corpus.skeletons[i].count for i in members),
    )
    sub_dists = build_matrix(sub)
    sub_dend = hierarchical_cluster(sub_dists, linkage=run.config.linkage)
    sub_flat = cut(sub_dend, k=min(k, len(sub)))

    next_id = max(run.summaries) + 1 if run.summaries else 0
    groups: dict[int, list[int]] = {}
    for local, cluster in enumerate(sub_flat.labels):
        groups.setdefault(cluster, []).append(members[local])
    new_ids = []
    for local_cid in sorted(groups):
        cid = next_id + local_cid
        new_ids.append(cid)
        run.summaries[cid] = summarize_cluster(
            cid, run.corpus, groups[local_cid], run.registry, run.config.tau
        )
        for skeleton in groups[local_cid]:
            run.flat.labels[skeleton] = cid
    for cid in unknown_cids:
        del run.summaries[cid]
    run.flat.k = len(run.summaries)
    return {"new": new_ids, "retired": unknown_cids}


# -- persistence ---------------------------------------------------------------


def _dump_json(obj, path: Path) -> None:
    path.write_text(
        json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def save_run(run: AnalysisRun, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    run.registry.save(directory / "registry.qlogreg")

    with open(directory / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for i, sk in enumerate(run.corpus.skeletons):
            fh.write(
                json.dumps(
                    {
                        "id": i,
                        "text": sk.canonical_text,
                        "count": sk.count,
                        "ast": sk.skeleton_ast.to_dict(),
                        "vector": {str(k): v for k, v in sorted(sk.vector.items())}
                        if sk.vector
                        else {},
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                + "\n"
            )

    if run.dendrogram is not None:
        (directory / "dendrogram.json").write_text(
            run.dendrogram.to_json() + "\n", encoding="utf-8"
        )
    else:
        _dump_json({"format": "qlog-dendrogram v1", "n": 0, "merges": [], "leaves": []},
                   directory / "dendrogram.json")

    assignments = (
        {str(i): c for i, c in enumerate(run.flat.labels)} if run.flat else {}
    )
    _dump_json(
        {
            "k": run.flat.k if run.flat else 0,
            "assignments": assignments,
            "linkage": run.config.linkage,
        },
        directory / "clusters.json",
    )

    summaries_dir = directory / "summaries"
    if summaries_dir.exists():
        shutil.rmtree(summaries_dir)
    summaries_dir.mkdir()
    for cid in sorted(run.summaries):
        summary = run.summaries[cid]
        (summaries_dir / f"{cid}.json").write_text(
            summary.to_json(run.corpus, run.registry), encoding="utf-8"
        )
        (summaries_dir / f"{cid}.dot").write_text(
            visualize(summary, run.corpus, run.registry, run.config.tau),
            encoding="utf-8",
        )

    _dump_json(
        {str(cid): run.summaries[cid].label for cid in sorted(run.summaries)},
        directory / "labels.json",
    )
    _dump_json(run.timings_ms, directory / "timings.json")
    _dump_json(
        {
            "format": RUN_FORMAT,
            "run_id": run.run_id,
            "config": run.config.to_dict(),
            "counts": run.counts,
        },
        directory / "run.json",
    )


def save_labels(run: AnalysisRun, directory) -> None:
    _dump_json(
        {str(cid): run.summaries[cid].label for cid in sorted(run.summaries)},
        Path(directory) / "labels.json",
    )


def load_run(directory) -> AnalysisRun:
    directory = Path(directory)
    if not directory.is_dir():
        raise RunNotFoundError(f"run directory {directory} does not exist")
    meta = json.loads((directory / "run.json").read_text(encoding="utf-8"))
    if meta.get("format") != RUN_FORMAT:
        raise RunFormatError(
            f"unsupported run format {meta.get('format')!r} (expected {RUN_FORMAT!r})"
        )
    config = PipelineConfig.from_dict(meta["config"])
    registry = DigestRegistry.load(directory / "registry.qlogreg")

    skeletons: list[QuerySkeleton] = []
    total = 0
    with open(directory / "corpus.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            sk = QuerySkeleton(
                skeleton_ast=frontend.LabeledAst.from_dict(obj["ast"]),
                canonical_text=obj["text"],
                count=obj["count"],
                vector=Counter({int(k): v for k, v in obj["vector"].items()}),
            )
            skeletons.append(sk)
            total += sk.count
    corpus = SkeletonCorpus(skeletons=skeletons, total_queries=total)

    dend_data = json.loads((directory / "dendrogram.json").read_text(encoding="utf-8"))
    dendrogram = (
        Dendrogram.from_json(json.dumps(dend_data)) if dend_data["n"] > 0 else None
    )

    clusters = json.loads((directory / "clusters.json").read_text(encoding="utf-8"))
    flat = None
    if clusters["assignments"]:
        labels = [0] * len(skeletons)
        for sid, cid in clusters["assignments"].items():
            labels[int(sid)] = int(cid)
        flat = FlatClustering(labels=labels, k=clusters["k"])

    label_map = json.loads((directory / "labels.json").read_text(encoding="utf-8"))
    timings = json.loads((directory / "timings.json").read_text(encoding="utf-8"))

    summaries: dict[int, ClusterSummary] = {}
    if flat is not None:
        members_by_cluster: dict[int, list[int]] = {}
        for skeleton, cluster in enumerate(flat.labels):
            members_by_cluster.setdefault(cluster, []).append(skeleton)
        for cid in sorted(members_by_cluster):
            summary = summarize_cluster(
                cid, corpus, members_by_cluster[cid], registry, config.tau
            )
            summary.label = label_map.get(str(cid), "unknown")
            summaries[cid] = summary

    return AnalysisRun(
        run_id=meta["run_id"],
        config=config,
        registry=registry,
        corpus=corpus,
        dendrogram=dendrogram,
        flat=flat,
        summaries=summaries,
        timings_ms=timings,
        counts=meta["counts"],
    )


def set_label(run: AnalysisRun, cluster_id: int, label: str, directory=None) -> None:
    if label not in LABELS:
        raise ValueError(f"label must be one of {LABELS}")
    if cluster_id not in run.summaries:
        raise KeyError(f"no cluster {cluster_id}")
    run.summaries[cluster_id].label = label
    if directory is not None:
        directory = Path(directory)
        save_labels(run, directory)
        (directory / "summaries" / f"{cluster_id}.json").write_text(
            run.summaries[cluster_id].to_json(run.corpus, run.registry),
            encoding="utf-8",
        )
