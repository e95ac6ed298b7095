"""qlog: compress SQL query logs into clustered, human-readable summaries."""

from .cluster import (
    Dendrogram,
    DistanceMatrix,
    FlatClustering,
    SkeletonCorpus,
    build_matrix,
    cut,
    dedupe,
    distance,
    hierarchical_cluster,
)
from .features import (
    DisjunctiveClause,
    QuerySkeleton,
    RuleConfig,
    cnf_features,
    cnf_normalize,
    equality_skeleton_features,
    extract,
    skeletonize,
    wl_base_features,
)
from .frontend import LabeledAst, ParseOutcome, classify, parse, to_sql
from .metrics import adjusted_rand, entanglement
from .pipeline import (
    AnalysisRun,
    LogRecord,
    PipelineConfig,
    ingest,
    load_run,
    re_elaborate,
    run_pipeline,
    save_run,
)
from .registry import DigestRegistry, RegistryError, RegistryFormatError
from .summarize import (
    ClusterSummary,
    FPTree,
    build_fptree,
    common_features,
    render_feature,
    summarize_cluster,
    visualize,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisRun",
    "ClusterSummary",
    "Dendrogram",
    "DigestRegistry",
    "DisjunctiveClause",
    "DistanceMatrix",
    "FPTree",
    "FlatClustering",
    "LabeledAst",
    "LogRecord",
    "ParseOutcome",
    "PipelineConfig",
    "QuerySkeleton",
    "RegistryError",
    "RegistryFormatError",
    "RuleConfig",
    "SkeletonCorpus",
    "adjusted_rand",
    "build_fptree",
    "build_matrix",
    "classify",
    "cnf_features",
    "cnf_normalize",
    "common_features",
    "cut",
    "dedupe",
    "distance",
    "entanglement",
    "equality_skeleton_features",
    "extract",
    "hierarchical_cluster",
    "ingest",
    "load_run",
    "parse",
    "re_elaborate",
    "render_feature",
    "run_pipeline",
    "save_run",
    "skeletonize",
    "summarize_cluster",
    "to_sql",
    "visualize",
    "wl_base_features",
]
