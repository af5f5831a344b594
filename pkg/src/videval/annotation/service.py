"""HTTP surface for the rating study.

Rater-facing payloads (next-task, acks, media) are blinded: they carry task
ids only, never model identity. Export and progress are study-runner
endpoints; the export necessarily restores model_id because the alignment
fit consumes it.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from ..alignment import ASPECTS
from ..errors import ValidationError
from .store import AnnotationStore, DuplicateRating


def _task_payload(store: AnnotationStore, item) -> dict:
    return {
        "task_id": item.task_id,
        "prompt_text": item.prompt_text,
        "video_url": f"/media/{item.task_id}/video",
        "reference_urls": [f"/media/{item.task_id}/ref/{k}" for k in (1, 2, 3)],
        "aspects": list(ASPECTS),
        "instructions": store.study.instructions,
    }


def create_app(store: AnnotationStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="rating study service", docs_url=None, redoc_url=None)

    @app.exception_handler(ValidationError)
    async def handle_validation(request: Request, exc: ValidationError):
        detail = {"detail": str(exc)}
        if exc.field:
            detail["field"] = exc.field
        status = 404 if "unknown rater" in str(exc) or "unknown task" in str(exc) else 400
        return JSONResponse(status_code=status, content=detail)

    @app.post("/api/raters")
    async def register_rater(body: dict):
        rater_id = body.get("rater_id", "")
        store.register_rater(rater_id)
        return {"rater_id": rater_id, "registered": True}

    @app.get("/api/raters/{rater_id}/next-task")
    async def next_task(rater_id: str):
        item = store.next_task(rater_id)
        if item is None:
            return {"task": None, "done": True}
        return {"task": _task_payload(store, item), "done": False}

    @app.post("/api/ratings")
    async def submit_rating(body: dict):
        try:
            ack = store.submit_rating(
                rater_id=body.get("rater_id", ""),
                task_id=body.get("task_id", ""),
                scores=body.get("scores", {}),
            )
        except DuplicateRating as exc:
            return JSONResponse(
                status_code=409,
                content={
                    "detail": "rating already stored",
                    "ack_id": exc.original.ack_id,
                    "task_id": exc.original.task_id,
                    "rater_id": exc.original.rater_id,
                },
            )
        return {"ack_id": ack.ack_id, "task_id": ack.task_id, "rater_id": ack.rater_id}

    @app.get("/api/studies/{study_id}/progress")
    async def progress(study_id: str):
        if study_id != store.study.study_id:
            raise HTTPException(status_code=404, detail=f"unknown study {study_id!r}")
        return store.progress()

    @app.get("/api/studies/{study_id}/export")
    async def export(study_id: str):
        if study_id != store.study.study_id:
            raise HTTPException(status_code=404, detail=f"unknown study {study_id!r}")
        return PlainTextResponse(store.export_text(), media_type="application/x-ndjson")

    def _media_file(task_id: str, path: str) -> FileResponse:
        file_path = Path(path)
        if not file_path.is_file():
            raise HTTPException(status_code=404, detail=f"media for task {task_id} unavailable")
        return FileResponse(file_path)

    @app.get("/media/{task_id}/video")
    async def video(task_id: str):
        return _media_file(task_id, store.item(task_id).video_path)

    @app.get("/media/{task_id}/ref/{index}")
    async def reference(task_id: str, index: int):
        item = store.item(task_id)
        if not 1 <= index <= len(item.reference_paths):
            raise HTTPException(status_code=404, detail="no such reference image")
        return _media_file(task_id, item.reference_paths[index - 1])

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
