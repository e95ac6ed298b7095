"""HTTP API over a persisted analysis run, serving the explorer UI.

Read endpoints expose clusters, summaries, FP-trees, and DOT graphs; label
assignment and re-elaboration mutate the run and persist immediately.  Label
mutations are serialized by a per-run lock; reads are concurrent.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, PlainTextResponse
from pydantic import BaseModel

from . import pipeline
from .summarize import LABELS, visualize


class LabelRequest(BaseModel):
    label: str


class ReElaborateRequest(BaseModel):
    k: int


def create_app(run_dir, static_dir=None) -> FastAPI:
    run_dir = Path(run_dir)
    run = pipeline.load_run(run_dir)
    lock = threading.Lock()
    app = FastAPI(title="qlog explorer API")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def summary_or_404(cluster_id: int):
        summary = run.summaries.get(cluster_id)
        if summary is None:
            raise HTTPException(status_code=404, detail=f"no cluster {cluster_id}")
        return summary

    @app.get("/api/run")
    def get_run():
        label_hist: dict[str, int] = {name: 0 for name in LABELS}
        for summary in run.summaries.values():
            label_hist[summary.label] += 1
        return {
            "run_id": run.run_id,
            "counts": run.counts,
            "timings_ms": run.timings_ms,
            "k": run.flat.k if run.flat else 0,
            "skeletons": len(run.corpus),
            "total_queries": run.corpus.total_queries,
            "labels": label_hist,
        }

    @app.get("/api/clusters")
    def get_clusters():
        return [
            {
                "id": cid,
                "label": summary.label,
                "skeletons": summary.n_skeletons,
                "queries": summary.n_queries,
            }
            for cid, summary in sorted(run.summaries.items())
        ]

    @app.get("/api/clusters/{cluster_id}")
    def get_cluster(cluster_id: int):
        summary = summary_or_404(cluster_id)
        return summary.to_dict(run.corpus, run.registry)

    @app.get("/api/clusters/{cluster_id}/fptree")
    def get_fptree(cluster_id: int):
        summary = summary_or_404(cluster_id)
        return summary.fptree.to_dict(run.registry)

    @app.get("/api/clusters/{cluster_id}/dot", response_class=PlainTextResponse)
    def get_dot(cluster_id: int):
        summary = summary_or_404(cluster_id)
        return visualize(summary, run.corpus, run.registry, run.config.tau)

    @app.post("/api/clusters/{cluster_id}/label")
    def post_label(cluster_id: int, body: LabelRequest):
        summary_or_404(cluster_id)
        if body.label not in LABELS:
            raise HTTPException(
                status_code=400, detail=f"label must be one of {LABELS}"
            )
        with lock:
            pipeline.set_label(run, cluster_id, body.label, run_dir)
        return {"id": cluster_id, "label": body.label}

    @app.post("/api/re-elaborate")
    def post_re_elaborate(body: ReElaborateRequest):
        if body.k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        with lock:
            result = pipeline.re_elaborate(run, body.k)
            summaries_dir = run_dir / "summaries"
            for cid in result["retired"]:
                for ext in ("json", "dot"):
                    path = summaries_dir / f"{cid}.{ext}"
                    if path.exists():
                        path.unlink()
            for cid in result["new"]:
                summary = run.summaries[cid]
                (summaries_dir / f"{cid}.json").write_text(
                    summary.to_json(run.corpus, run.registry), encoding="utf-8"
                )
                (summaries_dir / f"{cid}.dot").write_text(
                    visualize(summary, run.corpus, run.registry, run.config.tau),
                    encoding="utf-8",
                )
            assignments = {str(i): c for i, c in enumerate(run.flat.labels)}
            pipeline._dump_json(
                {
                    "k": run.flat.k,
                    "assignments": assignments,
                    "linkage": run.config.linkage,
                },
                run_dir / "clusters.json",
            )
            pipeline.save_labels(run, run_dir)
        return result

    if static_dir is not None and Path(static_dir).is_dir():
        static_dir = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_dir / "index.html")

        @app.get("/{asset_path:path}")
        def asset(asset_path: str):
            target = (static_dir / asset_path).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                raise HTTPException(status_code=404, detail="not found")
            return FileResponse(target)

    return app


def serve(run_dir, host: str = "127.0.0.1", port: int = 8321, static_dir=None) -> None:
    import uvicorn

    app = create_app(run_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
