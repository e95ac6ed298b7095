"""Phase timings against growing log size: plot-ready data.

Emits one row per truncation with per-phase milliseconds; feed the CSV to
any plotting tool to see preprocessing grow roughly linearly with queries
while clustering grows super-linearly with skeletons.

Run:  python demos/06_scaling_probe.py
"""

import csv
import sys

from qlog.pipeline import LogRecord, run_pipeline, timing_plot_data
from qlog.synth import generate_log

SIZES = [(5_000, 150), (10_000, 300), (20_000, 600), (40_000, 1200)]

runs = []
for n_queries, n_templates in SIZES:
    records = (LogRecord(sql=s) for s in generate_log(n_queries, n_templates, seed=6))
    run = run_pipeline(records)
    runs.append(run)
    print(
        f"queries={n_queries:>6}  skeletons={run.counts['skeletons']:>5}  "
        + "  ".join(f"{p}={run.timings_ms[p]:8.1f}ms" for p in ("preprocess", "relabel", "cluster", "fptree"))
    )

rows = timing_plot_data(runs)
writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
print()
writer.writeheader()
for row in rows:
    writer.writerow({k: round(v, 1) if isinstance(v, float) else v for k, v in row.items()})
