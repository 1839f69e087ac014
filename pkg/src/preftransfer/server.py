"""HTTP session API for human-in-the-loop (and emulated) transfer runs.

One pending query per session, pull-based: the UI polls
GET /sessions/{id}/query and answers with POST /sessions/{id}/selection.
Each session's engine advances on a background thread; selection
submission is checked and applied atomically under the session lock.
"""

import json
import threading
import uuid

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .config import ConfigError, parse_run_config
from .selection import ConstraintViolation
from .serialize import trajectory_to_json


class SessionHandle:
    def __init__(self, engine):
        self.engine = engine
        self.lock = threading.Lock()
        self.thread = None
        self.error = None
        self.query_archive = {}   # episode -> candidate payload (for rendering)

    def start(self):
        self.thread = threading.Thread(target=self._drive, daemon=True)
        self.thread.start()

    def _drive(self):
        try:
            eng = self.engine
            if getattr(eng.oracle, "kind", None) == "emulated":
                while eng.session.status == "running":
                    eng.advance()
                    self._archive_current()
                    outcome = eng.oracle.select(eng.candidates,
                                                episode=eng.session.episode)
                    eng._apply_outcome(outcome)
            else:
                eng.advance()
                self._archive_current()
        except Exception as exc:   # surfaced through GET /sessions/{id}
            self.error = f"{type(exc).__name__}: {exc}"

    def _archive_current(self):
        eng = self.engine
        if eng.candidates is not None:
            self.query_archive[eng.session.episode] = [
                json.loads(trajectory_to_json(t, eng.env.name))
                for t in eng.candidates]


def create_app(base_cfg):
    app = FastAPI(title="preftransfer sessions")
    sessions = {}
    registry_lock = threading.Lock()

    def _get(session_id):
        handle = sessions.get(session_id)
        if handle is None:
            return None, JSONResponse({"error": "unknown session"}, status_code=404)
        return handle, None

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(body: dict = None):
        data = base_cfg.effective_dict()
        if body:
            for key, value in body.items():
                if isinstance(value, dict) and isinstance(data.get(key), dict):
                    data[key].update(value)
                else:
                    data[key] = value
        try:
            cfg = parse_run_config(data)
        except ConfigError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session_id = uuid.uuid4().hex[:12]
        from .runner import build_engine
        engine = build_engine(cfg, session_id=session_id)
        handle = SessionHandle(engine)
        with registry_lock:
            sessions[session_id] = handle
        handle.start()
        return {"id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        handle, err = _get(session_id)
        if err:
            return err
        sess = handle.engine.session
        out = {"id": session_id, "status": sess.status, "episode": sess.episode,
               "history": sess.history}
        if handle.error:
            out["error"] = handle.error
        return out

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        handle, err = _get(session_id)
        if err:
            return err
        payload = handle.engine.pending_query()
        if payload is None:
            return JSONResponse({"error": "no pending query"}, status_code=404)
        return payload

    @app.post("/sessions/{session_id}/selection")
    def post_selection(session_id: str, body: dict):
        handle, err = _get(session_id)
        if err:
            return err
        kept = body.get("kept")
        dropped = body.get("dropped")
        if kept is None or dropped is None:
            return JSONResponse({"error": "body must carry kept and dropped index lists"},
                                status_code=400)
        with handle.lock:
            if handle.engine.session.status != "awaiting_preference":
                return JSONResponse(
                    {"error": "no pending query; selection already recorded"},
                    status_code=409)
            try:
                handle.engine.submit_selection(kept, dropped)
            except ConstraintViolation as exc:
                return JSONResponse({"error": str(exc), "max_drops":
                                     len(handle.engine.candidates) // 2},
                                    status_code=400)
            if handle.engine.session.status == "running":
                handle.start()   # fit the next episode in the background
        return {"status": handle.engine.session.status,
                "episode": handle.engine.session.episode}

    @app.get("/sessions/{session_id}/trajectories/{episode}")
    def get_trajectories(session_id: str, episode: int):
        handle, err = _get(session_id)
        if err:
            return err
        payload = handle.query_archive.get(episode)
        if payload is None:
            return JSONResponse({"error": f"no recorded candidates for episode {episode}"},
                                status_code=404)
        return {"episode": episode, "candidates": payload}

    return app
