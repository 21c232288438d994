"""Report server: hosts one generated report, persists ignore decisions, and
re-runs the de-dup/ignore/filter stages on demand."""
from __future__ import annotations

import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .capture import BundleError, load_bundle
from .config import PipelineConfig
from .figures import write_summary_csv
from .grouping import SimilarityScorer, Storyboard, build_storyboard
from .ignores import IgnoreStore, category_ignore, check_ignore, issue_ignore, screen_ignore
from .report import assemble_report

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>a11yreport</title></head>
<body>
<h1>a11yreport server</h1>
<p>No UI bundle is mounted. The JSON API is live:</p>
<ul>
<li>GET /api/report</li>
<li>GET /api/screens/{capture_id}.png</li>
<li>GET /api/ignores · POST /api/ignores · DELETE /api/ignores/{id}</li>
<li>POST /api/regenerate · POST /api/bugs</li>
</ul>
</body></html>
"""


class ServerState:
    """Everything one served report needs; mutations run under one lock."""

    def __init__(self, report_dir: str | Path, ignore_file: str | Path,
                 config: PipelineConfig | None = None, bundle_dir: str | Path | None = None):
        self.report_dir = Path(report_dir)
        self.report_path = self.report_dir / "report.json"
        if not self.report_path.is_file():
            raise FileNotFoundError(f"no report.json under {self.report_dir}")
        try:
            self.report_doc = json.loads(self.report_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValueError(f"corrupt report document {self.report_path}: {exc}") from exc
        self.store = IgnoreStore(ignore_file)
        self.config = config or PipelineConfig()
        self.lock = threading.Lock()
        self.bugs_path = self.report_dir / "bugs.jsonl"

        self.bundle = None
        self.bundle_error = None
        candidate = bundle_dir or self.report_doc.get("bundle_dir")
        if candidate:
            try:
                self.bundle = load_bundle(candidate)
                self.bundle_dir = str(candidate)
            except (BundleError, OSError) as exc:
                self.bundle_error = str(exc)
        else:
            self.bundle_error = "report carries no bundle_dir"

    # -- helpers ----------------------------------------------------------

    def require_bundle(self):
        if self.bundle is None:
            raise HTTPException(
                status_code=409,
                detail=f"source bundle unavailable: {self.bundle_error}",
            )
        return self.bundle

    def find_issue_doc(self, unique_id: str) -> dict:
        doc = self.report_doc
        for group in doc.get("groups", []):
            for checks in group.get("issues", {}).values():
                for issues in checks.values():
                    for issue in issues:
                        if issue["unique_id"] == unique_id:
                            return issue
        for section in ("ignored", "hidden"):
            for issue in doc.get(section, []):
                if issue["unique_id"] == unique_id:
                    return issue
        raise HTTPException(status_code=404, detail=f"unknown unique issue '{unique_id}'")

    def regenerate(self, full: bool = False) -> dict:
        bundle = self.require_bundle()
        scorer = SimilarityScorer(
            mode=self.report_doc["similarity"]["mode"],
            threshold=self.report_doc["similarity"]["threshold"],
            resize_width=self.config.pixel_resize_width,
        )
        if full:
            storyboard = build_storyboard(bundle, scorer)
        else:
            storyboard = Storyboard.from_json(self.report_doc["storyboard"])
        report = assemble_report(
            bundle,
            storyboard,
            ignore_store=self.store,
            config=self.config,
            scorer=scorer,
            bundle_dir=self.report_doc.get("bundle_dir"),
        )
        doc = report.to_json()
        tmp = self.report_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2), encoding="utf-8")
        os.replace(tmp, self.report_path)
        write_summary_csv(report, self.report_dir / "summary.csv")
        self.report_doc = doc
        return doc


def create_app(state: ServerState, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="a11yreport", docs_url=None, redoc_url=None)

    @app.get("/api/report")
    def get_report():
        return JSONResponse(state.report_doc)

    @app.get("/api/screens/{capture_id}.png")
    def get_screen(capture_id: str):
        path = state.report_dir / "screens" / f"{capture_id}.png"
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"no screenshot for '{capture_id}'")
        return FileResponse(path, media_type="image/png")

    @app.get("/api/ignores")
    def get_ignores():
        records = state.store.list_ignores()
        return [
            {
                "ignore_id": r.ignore_id,
                "app_id": r.app_id,
                "scope": r.scope,
                "check_name": r.check_name,
                "category": r.category,
                "active": r.active,
                "created_at": r.created_at,
                "has_fingerprint": r.fingerprint is not None,
                "snapshot_capture_id": r.snapshot.capture_id if r.snapshot else None,
            }
            for r in records
        ]

    @app.post("/api/ignores", status_code=201)
    def post_ignore(payload: dict = Body(...)):
        scope = payload.get("scope")
        app_id = state.report_doc.get("app_id", "")
        with state.lock:
            if scope == "category":
                category = payload.get("category")
                if not category:
                    raise HTTPException(status_code=422, detail="category scope needs 'category'")
                record = category_ignore(app_id, category)
            elif scope == "check_name":
                check_name = payload.get("check_name")
                if not check_name:
                    raise HTTPException(status_code=422, detail="check_name scope needs 'check_name'")
                record = check_ignore(app_id, check_name, payload.get("category"))
            elif scope == "screen":
                bundle = state.require_bundle()
                capture_id = payload.get("capture_id")
                if not capture_id and payload.get("group_id") is not None:
                    for group in state.report_doc["storyboard"]["groups"]:
                        if group["group_id"] == payload["group_id"]:
                            capture_id = group["representative_id"]
                if not capture_id:
                    raise HTTPException(status_code=422,
                                        detail="screen scope needs 'capture_id' or 'group_id'")
                try:
                    record = screen_ignore(app_id, bundle.capture(capture_id))
                except KeyError:
                    raise HTTPException(status_code=404, detail=f"unknown capture '{capture_id}'")
            elif scope == "issue":
                bundle = state.require_bundle()
                unique_id = payload.get("unique_id")
                if not unique_id:
                    raise HTTPException(status_code=422, detail="issue scope needs 'unique_id'")
                issue = state.find_issue_doc(unique_id)
                detection_id = issue["anchor"]["detection_id"]
                if detection_id is None:
                    raise HTTPException(
                        status_code=422,
                        detail="issue has no anchored element; ignore its check_name instead",
                    )
                capture = bundle.capture(issue["anchor"]["capture_id"])
                record = issue_ignore(
                    app_id, capture, capture.detection(detection_id),
                    issue["check_name"], issue["category"],
                )
            else:
                raise HTTPException(status_code=422, detail=f"unknown scope '{scope}'")
            ignore_id = state.store.add_ignore(record)
        return {"ignore_id": ignore_id, "scope": scope}

    @app.delete("/api/ignores/{ignore_id}")
    def delete_ignore(ignore_id: str):
        with state.lock:
            try:
                state.store.remove_ignore(ignore_id)
            except KeyError:
                raise HTTPException(status_code=404, detail=f"unknown ignore id '{ignore_id}'")
        return {"removed": ignore_id}

    @app.post("/api/regenerate")
    def post_regenerate(payload: dict = Body(default={})):
        with state.lock:
            doc = state.regenerate(full=bool(payload.get("full")))
        return {"summary": doc["summary"], "generated_at": doc["generated_at"]}

    @app.post("/api/bugs", status_code=201)
    def post_bug(payload: dict = Body(...)):
        unique_id = payload.get("unique_id")
        if not unique_id:
            raise HTTPException(status_code=422, detail="bug stub needs 'unique_id'")
        state.find_issue_doc(unique_id)
        record = {
            "bug_id": uuid.uuid4().hex[:12],
            "unique_id": unique_id,
            "title": payload.get("title", ""),
            "notes": payload.get("notes", ""),
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with state.lock:
            with state.bugs_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
        return record

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def serve(report_dir, ignore_file, host: str = "127.0.0.1", port: int = 8077,
          config: PipelineConfig | None = None, ui_dir=None) -> None:
    import uvicorn

    state = ServerState(report_dir, ignore_file, config=config)
    app = create_app(state, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
