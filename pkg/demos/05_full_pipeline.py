"""The four-phase batch pipeline, persisted to a run directory.

Run:  python demos/05_full_pipeline.py
Then explore it live:  qlog serve /tmp/qlog-demo-run
"""

import tempfile
from pathlib import Path

from qlog import PipelineConfig, load_run, re_elaborate, run_pipeline, save_run
from qlog.pipeline import LogRecord
from qlog.synth import generate_log

run_dir = Path(tempfile.gettempdir()) / "qlog-demo-run"

print("=== running the pipeline on 20,000 synthetic queries ===")
records = (LogRecord(sql=sql) for sql in generate_log(20_000, 120, seed=5))
run = run_pipeline(records, PipelineConfig(cut_k=8))
for phase in ("preprocess", "relabel", "cluster", "fptree"):
    print(f"  {phase:<11} {run.timings_ms[phase]:9.1f} ms")
print(f"  records:   {run.counts['total_records']}")
print(f"  skeletons: {run.counts['skeletons']}")
print(f"  clusters:  {run.flat.k}")

save_run(run, run_dir)
print(f"\nrun {run.run_id} saved to {run_dir}")

print()
print("=== cluster overview ===")
for cid, summary in sorted(run.summaries.items()):
    head = summary.explanation.splitlines()[1] if "\n" in summary.explanation else ""
    print(f"  [{cid}] {summary.n_skeletons:>3} skeletons {summary.n_queries:>6} queries  {head[:60]}")

print()
print("=== the analyst loop: label, then re-elaborate the unknowns ===")
from qlog.pipeline import set_label

set_label(run, 0, "safe", run_dir)
set_label(run, 1, "unsafe", run_dir)
result = re_elaborate(run, k=6)
print(f"  retired unknown clusters: {result['retired']}")
print(f"  new finer clusters:       {result['new']}")
print(f"  safe/unsafe clusters untouched: 0 -> {run.summaries[0].label}, 1 -> {run.summaries[1].label}")

print()
print("=== reload round-trip ===")
again = load_run(run_dir)
print(f"  run id {again.run_id}, {len(again.corpus)} skeletons, {len(again.summaries)} summaries")
print(f"\nServe the explorer UI with:  qlog serve {run_dir}")
