"""HTTP JSON API for rating sessions, consumed by the browser rater client.

Endpoints:
    POST /sessions {rater_id, seed}            -> {session_id, total}
    GET  /sessions/{id}/next                   -> face bundle | {complete: true}
    POST /sessions/{id}/ratings {face_id,cues} -> {status: ok} | error {cue, reason}
    GET  /sessions/{id}/progress               -> {cursor, total}
    GET  /images/{face_id}/{name}              -> image bytes
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from .core import CUE_FIELDS, CueRatings, RatingScale
from .rating import (
    ImageStore,
    OutOfOrderError,
    RatingValueError,
    ResubmitConflictError,
    SessionError,
    SessionManager,
    next_face,
)


class OpenSessionRequest(BaseModel):
    rater_id: str
    seed: int


class SubmitRatingRequest(BaseModel):
    face_id: str
    cues: dict[str, float] | None = None
    skip: bool = False


def _error(status: int, reason: str, cue: str | None = None) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"cue": cue, "reason": reason}})


def create_app(manager: SessionManager, store: ImageStore) -> FastAPI:
    app = FastAPI(title="fatiguescope rating service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_session(session_id: str):
        session = manager.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    def open_session(req: OpenSessionRequest):
        try:
            session_id, session = manager.open(req.rater_id, req.seed)
        except SessionError as exc:
            return _error(409, str(exc))
        return {"session_id": session_id, "total": session.total}

    @app.get("/sessions/{session_id}/next")
    def get_next(session_id: str):
        session = get_session(session_id)
        bundle = next_face(session, store)
        if bundle is None:
            return {"complete": True, "cursor": session.cursor, "total": session.total}
        return {
            "complete": False,
            "face_id": bundle.face_id,
            "primary": f"/images/{bundle.face_id}/{bundle.primary}",
            "references": [f"/images/{bundle.face_id}/{n}" for n in bundle.references],
            "cues": list(bundle.cues),
            "insufficient_references": bundle.insufficient_references,
            "cursor": session.cursor,
            "total": session.total,
        }

    @app.post("/sessions/{session_id}/ratings")
    def submit(session_id: str, req: SubmitRatingRequest):
        get_session(session_id)
        if req.skip:
            try:
                manager.skip(session_id, req.face_id)
            except (SessionError, KeyError) as exc:
                return _error(409, str(exc))
            return {"status": "ok", "skipped": True}
        if req.cues is None:
            return _error(400, "cues are required unless skip is set")
        missing = [c for c in CUE_FIELDS if c not in req.cues]
        if missing:
            return _error(400, "missing cue value", cue=missing[0])
        unknown = [c for c in req.cues if c not in CUE_FIELDS]
        if unknown:
            return _error(400, "unknown cue", cue=unknown[0])
        ratings = CueRatings.from_values(
            [req.cues[c] for c in CUE_FIELDS], scale=RatingScale.RATER_0_4
        )
        try:
            fresh = manager.submit(session_id, req.face_id, ratings)
        except RatingValueError as exc:
            return _error(400, exc.reason, cue=exc.cue)
        except OutOfOrderError as exc:
            return _error(409, str(exc))
        except ResubmitConflictError as exc:
            return _error(409, str(exc))
        except SessionError as exc:
            return _error(409, str(exc))
        session = manager.sessions[session_id]
        return {
            "status": "ok",
            "duplicate": not fresh,
            "cursor": session.cursor,
            "total": session.total,
        }

    @app.get("/sessions/{session_id}/progress")
    def progress(session_id: str):
        session = get_session(session_id)
        return {"cursor": session.cursor, "total": session.total}

    @app.get("/images/{face_id}/{name}")
    def image(face_id: str, name: str):
        if "/" in face_id or ".." in face_id or ".." in name:
            raise HTTPException(status_code=400, detail="bad path")
        path = store.path(face_id, name)
        if not path.is_file():
            # Serve by bare index if the client asked without an extension.
            matches = sorted(path.parent.glob(f"{name}.*")) if path.parent.is_dir() else []
            if not matches:
                raise HTTPException(status_code=404, detail="image not found")
            path = matches[0]
        return FileResponse(path)

    return app


def serve(
    manager: SessionManager,
    store: ImageStore,
    host: str = "127.0.0.1",
    port: int = 8600,
) -> None:
    import uvicorn

    uvicorn.run(create_app(manager, store), host=host, port=port, log_level="warning")
