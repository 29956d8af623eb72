"""HTTP facade for the conversion review workflow.

Each converted regex lives in a session: the source text, the current
pattern (original conversion plus any applied suggestions), the pending
suggestions, and the latest differential report.  Sessions are cached in
memory and appended snapshot-by-snapshot to one JSONL file each, so a
restarted service picks up exactly where it stopped.

Suggestion application is a toggle.  The browser client renders chips
that select and deselect; rather than a separate undo endpoint, applying
an already-applied suggestion reverts it and the current pattern is
recomputed from the original conversion plus the still-selected set.

Per-session operations are serialized with a lock, which also bounds the
service to one in-flight optimization per session.  Different sessions do
not contend.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .convert import IMPOSSIBLE, ConversionResult, UnsupportedFeature, convert
from .dpl.nodes import DplPattern, pattern_from_json, pattern_to_json, serialize_with_spans
from .dpl.syntax import validate_syntax
from .optimize import (
    LlmClient,
    LlmConfig,
    SchemaError,
    Suggestion,
    TransportError,
    apply_suggestion,
    suggest,
)
from .rx.matcher import DEFAULT_STEP_BUDGET
from .rx.parser import RegexSyntaxError, parse_regex
from .validate import DEFAULT_MAX_LEN, generate_suite, run_differential

import json as _json


@dataclass
class Session:
    session_id: str
    regex: str
    conversion: ConversionResult
    pattern: DplPattern
    suggestions: list[Suggestion] = field(default_factory=list)
    applied: set[int] = field(default_factory=set)
    report: dict | None = None
    revision: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def strategies(self) -> dict[int, str | None]:
        out: dict[int, str | None] = {}
        for note in self.conversion.fragment_notes:
            if note.index is not None and note.index not in out:
                out[note.index] = note.strategy
        return out

    def view(self) -> dict:
        """The documented session JSON: conversion result plus review state."""
        text, spans = ("", [])
        fragments: list[dict] = []
        if self.pattern.fragments:
            text, spans = serialize_with_spans(self.pattern)
            strategies = self.strategies()
            edited = {self.suggestions[i].fragment_index for i in self.applied}
            for i, frag in enumerate(self.pattern.fragments):
                fragments.append(
                    {
                        "span": list(frag.origin_span) if frag.origin_span else None,
                        "dpl_span": list(spans[i]),
                        "text": text[spans[i][0] : spans[i][1]],
                        "strategy": None if i in edited else strategies.get(i),
                        "unsafe_reason": frag.unsafe_reason,
                    }
                )
        return {
            "session": self.session_id,
            "regex": self.regex,
            "classification": self.conversion.classification,
            "dpl": text,
            "fragments": fragments,
            "notes": [n.to_json() for n in self.conversion.fragment_notes],
            "suggestions": [s.to_json() for s in self.suggestions],
            "applied": sorted(self.applied),
            "report": self.report,
            "revision": self.revision,
        }

    def snapshot(self) -> dict:
        return {**self.view(), "pattern": pattern_to_json(self.pattern)}


class SessionStore:
    """In-memory sessions with an append-only JSONL snapshot per session."""

    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self._sessions: dict[str, Session] = {}
        self._mutex = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._restore()

    def _restore(self) -> None:
        for path in sorted(self.data_dir.glob("*.jsonl")):
            last = None
            for line in path.read_text().splitlines():
                if line.strip():
                    last = line
            if last is None:
                continue
            snap = _json.loads(last)
            base = convert(parse_regex(snap["regex"]))
            session = Session(
                session_id=snap["session"],
                regex=snap["regex"],
                conversion=base,
                pattern=pattern_from_json(snap["pattern"]),
                suggestions=[Suggestion.from_json(d) for d in snap["suggestions"]],
                applied=set(snap.get("applied", [])),
                report=snap.get("report"),
                revision=snap["revision"],
            )
            self._sessions[session.session_id] = session

    def create(self, regex: str, conversion: ConversionResult) -> Session:
        assert conversion.pattern is not None
        session = Session(
            session_id=uuid.uuid4().hex[:12],
            regex=regex,
            conversion=conversion,
            pattern=conversion.pattern,
        )
        with self._mutex:
            self._sessions[session.session_id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Session | None:
        with self._mutex:
            return self._sessions.get(session_id)

    def count(self) -> int:
        with self._mutex:
            return len(self._sessions)

    def persist(self, session: Session) -> None:
        if self.data_dir is None:
            return
        path = self.data_dir / ("%s.jsonl" % session.session_id)
        with path.open("a") as fh:
            fh.write(_json.dumps(session.snapshot()) + "\n")


def _error(status: int, kind: str, message: str, **extra: Any) -> JSONResponse:
    return JSONResponse({"error": kind, "message": message, **extra}, status_code=status)


def create_app(
    data_dir: str | Path | None = None,
    alphabet: str | None = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
    llm_config: LlmConfig | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="regex2dpl")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(data_dir)
    app.state.store = store

    async def body_of(request: Request) -> dict | JSONResponse:
        try:
            data = await request.json()
        except Exception:
            return _error(400, "bad-request", "body is not valid JSON")
        if not isinstance(data, dict):
            return _error(400, "bad-request", "body must be a JSON object")
        return data

    def find_session(data: dict):
        session_id = data.get("session")
        if not isinstance(session_id, str) or store.get(session_id) is None:
            return None
        return store.get(session_id)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "sessions": store.count()}

    @app.post("/api/convert")
    async def convert_endpoint(request: Request):
        data = await body_of(request)
        if isinstance(data, JSONResponse):
            return data
        regex = data.get("regex")
        if not isinstance(regex, str) or not regex:
            return _error(400, "bad-request", "field 'regex' must be a non-empty string")
        try:
            ast = parse_regex(regex)
        except RegexSyntaxError as exc:
            return _error(400, "syntax", str(exc), position=exc.position)
        try:
            result = convert(ast)
        except UnsupportedFeature as exc:
            return _error(422, "impossible", "unsupported feature", reason=str(exc))
        if result.classification == IMPOSSIBLE or result.pattern is None:
            return _error(
                422, "impossible", "no non-backtracking equivalent",
                reason=result.impossible_reason,
            )
        session = store.create(regex, result)
        return session.view()

    @app.post("/api/validate")
    async def validate_endpoint(request: Request):
        data = await body_of(request)
        if isinstance(data, JSONResponse):
            return data
        session = find_session(data)
        if session is None:
            return _error(404, "unknown-session", "no such session: %r" % data.get("session"))
        n_pos = int(data.get("n_pos", 50))
        n_neg = int(data.get("n_neg", 50))
        seed = int(data.get("seed", 0))

        def work():
            # the lock lives in the worker thread: per-session calls
            # serialize there while other sessions proceed in parallel
            with session.lock:
                ast = parse_regex(session.regex)
                try:
                    suite = generate_suite(
                        ast, n_pos, n_neg, seed, max_len=DEFAULT_MAX_LEN, universe=alphabet
                    )
                except ValueError as exc:
                    return _error(400, "bad-request", str(exc))
                shim = ConversionResult(session.pattern, session.conversion.classification)
                report = run_differential(ast, shim, suite, step_budget=step_budget)
                session.report = report.to_json(include_passing=True)
                session.revision += 1
                store.persist(session)
                return {"session": session.session_id, "revision": session.revision, **session.report}

        return await run_in_threadpool(work)

    @app.post("/api/optimize")
    async def optimize_endpoint(request: Request):
        data = await body_of(request)
        if isinstance(data, JSONResponse):
            return data
        session = find_session(data)
        if session is None:
            return _error(404, "unknown-session", "no such session: %r" % data.get("session"))
        config = llm_config if llm_config is not None else LlmConfig.from_env()
        client = LlmClient(config) if config is not None else None

        def work():
            # holding the lock across the whole exchange keeps optimization
            # single-flight per session
            with session.lock:
                try:
                    suggestions, diagnostics = suggest(session.pattern, client)
                except (TransportError, SchemaError) as exc:
                    return _error(502, "llm-failure", str(exc))
                session.suggestions = suggestions
                session.applied = set()
                session.revision += 1
                store.persist(session)
                return {
                    "session": session.session_id,
                    "revision": session.revision,
                    "suggestions": [s.to_json() for s in suggestions],
                    "diagnostics": diagnostics,
                }

        return await run_in_threadpool(work)

    @app.post("/api/apply")
    async def apply_endpoint(request: Request):
        data = await body_of(request)
        if isinstance(data, JSONResponse):
            return data
        session = find_session(data)
        if session is None:
            return _error(404, "unknown-session", "no such session: %r" % data.get("session"))
        index = data.get("suggestion")

        def work():
            with session.lock:
                if not isinstance(index, int) or not 0 <= index < len(session.suggestions):
                    return _error(
                        409, "unknown-suggestion",
                        "no pending suggestion %r (have %d)" % (index, len(session.suggestions)),
                    )
                before = set(session.applied)
                if index in session.applied:
                    session.applied.discard(index)
                else:
                    session.applied.add(index)
                pattern = session.conversion.pattern
                assert pattern is not None
                for i in sorted(session.applied):
                    pattern = apply_suggestion(pattern, session.suggestions[i])
                # the edited pattern is re-checked automatically before acceptance
                problems = validate_syntax(pattern)
                if problems:
                    session.applied = before
                    return _error(422, "invalid-pattern", "; ".join(problems))
                session.pattern = pattern
                session.revision += 1
                store.persist(session)
                return {**session.view(), "syntax": problems}

        return await run_in_threadpool(work)

    @app.get("/api/session/{session_id}")
    def session_endpoint(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "unknown-session", "no such session: %r" % session_id)
        return session.view()

    return app


def serve(
    port: int = 8000,
    data_dir: str | Path | None = None,
    alphabet: str | None = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
    host: str = "127.0.0.1",
) -> None:
    import uvicorn

    app = create_app(data_dir=data_dir, alphabet=alphabet, step_budget=step_budget)
    uvicorn.run(app, host=host, port=port, log_level="warning")
