"""HTTP API around the two-stage pipeline.

Solves run as background jobs on a bounded worker pool; clients poll the
job id for progress (elapsed seconds and the incumbent objective trace).
Edits carry the client's revision number for optimistic concurrency.
Every phase transition snapshots the session to the store, so a restart
loses nothing that was finalized."""

from __future__ import annotations

import datetime as dt
import itertools
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, HTTPException, Request
from pydantic import BaseModel

from . import pipeline
from .catalog.ids import Stage
from .catalog.registry import catalog_listing
from .encoder import LP_TEXT, encode_stage, write_instance
from .io_config import (
    GRID_CSV,
    STRUCTURED_JSONLIKE,
    IoError,
    SessionStore,
    export_roster,
    load_condition_file,
    load_wish_table,
)
from .pipeline import Phase, PipelineError, ProbeFailure, Session
from .shifts import parse_shift
from .solving.probe import probe_hard

DATA_DIR_ENV = "ROSTRA_DATA_DIR"
TOKEN_ENV = "ROSTRA_TOKEN"


# ---------------------------------------------------------------------------
# Jobs
# ---------------------------------------------------------------------------


@dataclass
class JobHandle:
    job_id: str
    kind: str                    # PROBE | NIGHT_SOLVE | DAY_SOLVE
    session_id: str
    status: str = "queued"       # queued | running | done | failed
    trace: list = field(default_factory=list)
    error: str | None = None
    result: dict | None = None

    def as_dict(self):
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "session_id": self.session_id,
            "status": self.status,
            "progress": {
                "points": len(self.trace),
                "incumbent": self.trace[-1][1] if self.trace else None,
                "elapsed": self.trace[-1][0] if self.trace else 0.0,
                "trace": self.trace,
            },
            "error": self.error,
            "result": self.result,
        }


class CreateSessionBody(BaseModel):
    condition_file: str
    wish_table: str
    session_id: str | None = None
    symbol_map: dict[str, str] | None = None


class SolveBody(BaseModel):
    time_limit: float = 60.0
    seed: int = 0
    solver: str = "heuristic"
    acknowledge_probe: bool = False


class ProbeBody(BaseModel):
    stage: str = "night"
    time_limit: float = 120.0


class EditCell(BaseModel):
    nurse: str
    date: dt.date
    shift: str


class EditsBody(BaseModel):
    revision: int
    edits: list[EditCell]


@dataclass
class _Entry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    busy_job: str | None = None
    warnings: list = field(default_factory=list)
    last_probe: dict | None = None


def create_app(data_dir: str | None = None,
               token: str | None = None,
               max_workers: int = 2) -> FastAPI:
    data_dir = data_dir or os.environ.get(DATA_DIR_ENV) or ".rostra-data"
    token = token if token is not None else os.environ.get(TOKEN_ENV)
    store = SessionStore(data_dir)
    app = FastAPI(title="rostra", version="0.1.0")
    pool = ThreadPoolExecutor(max_workers=max_workers)
    sessions: dict[str, _Entry] = {}
    jobs: dict[str, JobHandle] = {}
    seq = itertools.count(1)

    def auth(request: Request):
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="bad token")

    def entry(sid: str) -> _Entry:
        e = sessions.get(sid)
        if e is None:
            revived = store.load_latest(sid)
            if revived is None:
                raise HTTPException(status_code=404,
                                    detail=f"unknown session {sid}")
            e = sessions[sid] = _Entry(session=revived)
        return e

    def conflict_if_busy(e: _Entry):
        if e.busy_job is not None:
            raise HTTPException(
                status_code=409,
                detail=f"session busy with job {e.busy_job}")

    def phase_conflict(exc: PipelineError):
        return HTTPException(status_code=409, detail=str(exc))

    def submit(kind: str, e: _Entry, fn) -> JobHandle:
        job = JobHandle(job_id=f"job-{next(seq)}", kind=kind,
                        session_id=e.session.session_id)
        jobs[job.job_id] = job
        e.busy_job = job.job_id

        def run():
            job.status = "running"
            try:
                job.result = fn(job)
                job.status = "done"
                store.save(e.session)
            except ProbeFailure as exc:
                job.status = "failed"
                job.error = "probe found hard conflicts"
                job.result = _probe_dict(exc.report)
            except Exception as exc:  # surfaced to the poller
                job.status = "failed"
                job.error = str(exc)
            finally:
                e.busy_job = None

        pool.submit(run)
        return job

    # -- session lifecycle ---------------------------------------------------

    @app.post("/sessions")
    def create_session(body: CreateSessionBody, _=Depends(auth)):
        try:
            cfg, cfg_warnings = load_condition_file(
                body.condition_file.encode())
            wishes, wish_warnings = load_wish_table(
                body.wish_table.encode(), cfg.calendar,
                symbol_map=body.symbol_map)
        except IoError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        listed = {n.id for n in cfg.nurses}
        missing = listed - set(wishes.nurse_ids)
        extra = set(wishes.nurse_ids) - listed
        if missing or extra:
            raise HTTPException(
                status_code=422,
                detail=f"wish rows do not match the ward: missing={sorted(missing)}, "
                       f"unknown={sorted(extra)}")
        sid = body.session_id or f"s-{len(store.list_sessions()) + 1}"
        if sid in sessions or store.load_latest(sid) is not None:
            raise HTTPException(status_code=409,
                                detail=f"session {sid} already exists")
        session = pipeline.new_session(cfg, wishes, sid)
        e = _Entry(session=session, warnings=cfg_warnings + wish_warnings)
        sessions[sid] = e
        store.save(session)
        return {"session_id": sid, "warnings": e.warnings,
                "phase": session.phase.value}

    @app.get("/sessions")
    def list_sessions(_=Depends(auth)):
        known = set(sessions) | set(store.list_sessions())
        return {"sessions": sorted(known)}

    @app.get("/sessions/{sid}")
    def session_info(sid: str, _=Depends(auth)):
        e = entry(sid)
        s = e.session
        return {
            "session_id": sid,
            "phase": s.phase.value,
            "revision": s.revision,
            "month": f"{s.cfg.calendar.year:04d}-{s.cfg.calendar.month:02d}",
            "nurses": [n.id for n in s.cfg.nurses],
            "edits": len(s.audit),
            "busy_job": e.busy_job,
            "warnings": e.warnings,
        }

    @app.get("/sessions/{sid}/catalog")
    def catalog(sid: str, stage: str = "night", _=Depends(auth)):
        e = entry(sid)
        rows = catalog_listing(_stage(stage), e.session.cfg)
        return {"constraints": [
            {"id": str(cid), "enabled": enabled, "description": desc}
            for cid, enabled, desc in rows
        ]}

    # -- jobs -------------------------------------------------------------------

    def _stage(name: str) -> Stage:
        low = name.lower()
        if low == "night":
            return Stage.NIGHT
        if low == "day":
            return Stage.DAY
        raise HTTPException(status_code=422, detail=f"unknown stage {name}")

    def _probe_dict(report):
        return {
            "clean": report.clean,
            "records": [
                {"constraint": str(r.constraint), "nurse": r.nurse,
                 "date": r.date.isoformat() if r.date else None,
                 "magnitude": float(r.magnitude), "note": r.note}
                for r in report.records
            ],
            "suggestions": [
                {"nurse": nid, "date": d.isoformat()}
                for nid, d in report.suggestions
            ],
            "rendered": report.render(),
        }

    @app.post("/sessions/{sid}/probe")
    def start_probe(sid: str, body: ProbeBody, _=Depends(auth)):
        e = entry(sid)
        conflict_if_busy(e)
        stage = _stage(body.stage)

        def work(_job):
            wishes = (e.session.edited if stage is Stage.DAY
                      and e.session.edited is not None else e.session.wishes)
            report = probe_hard(e.session.cfg, wishes, stage,
                                time_limit=body.time_limit)
            result = _probe_dict(report)
            e.last_probe = result
            return result

        return submit("PROBE", e, work).as_dict()

    @app.post("/sessions/{sid}/solve/night")
    def start_night(sid: str, body: SolveBody, _=Depends(auth)):
        e = entry(sid)
        conflict_if_busy(e)

        def work(job):
            try:
                result = pipeline.run_night_stage(
                    e.session, solver=body.solver, time_limit=body.time_limit,
                    seed=body.seed, acknowledge_probe=body.acknowledge_probe,
                    progress_hook=lambda p: job.trace.append(p))
            except PipelineError as exc:
                if isinstance(exc, ProbeFailure):
                    raise
                raise HTTPException(status_code=409, detail=str(exc))
            job.trace[:] = result.report.trace
            return _stage_result_dict(result)

        return submit("NIGHT_SOLVE", e, work).as_dict()

    @app.post("/sessions/{sid}/post-process")
    def post_process(sid: str, _=Depends(auth)):
        e = entry(sid)
        conflict_if_busy(e)
        try:
            notes = pipeline.post_process_longday(e.session)
        except PipelineError as exc:
            raise phase_conflict(exc)
        store.save(e.session)
        return {"notes": notes, "phase": e.session.phase.value}

    @app.post("/sessions/{sid}/solve/day")
    def start_day(sid: str, body: SolveBody, _=Depends(auth)):
        e = entry(sid)
        conflict_if_busy(e)
        if e.session.phase is not Phase.DAY_READY:
            raise HTTPException(
                status_code=409,
                detail=f"day solve requires phase day_ready, session is "
                       f"{e.session.phase.value}")

        def work(job):
            result = pipeline.run_day_stage(
                e.session, solver=body.solver, time_limit=body.time_limit,
                seed=body.seed, acknowledge_probe=body.acknowledge_probe,
                progress_hook=lambda p: job.trace.append(p))
            job.trace[:] = result.report.trace
            return _stage_result_dict(result)

        return submit("DAY_SOLVE", e, work).as_dict()

    @app.get("/jobs/{job_id}")
    def poll_job(job_id: str, _=Depends(auth)):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown job {job_id}")
        return job.as_dict()

    # -- roster and edits ---------------------------------------------------------

    def _stage_result_dict(result):
        rep = result.report
        return {
            "stage": result.stage.name.lower(),
            "status": rep.status.value,
            "objective": float(rep.objective),
            "hard_violations": rep.hard_violations,
            "violations": [
                {"constraint": str(r.constraint), "nurse": r.nurse,
                 "date": r.date.isoformat() if r.date else None,
                 "magnitude": float(r.magnitude), "note": r.note}
                for r in result.violations
            ],
            "feedback": result.feedback,
            "trace": rep.trace,
        }

    @app.get("/sessions/{sid}/roster")
    def get_roster(sid: str, _=Depends(auth)):
        e = entry(sid)
        s = e.session
        roster = s.current_roster()
        import json as _json

        return {
            "phase": s.phase.value,
            "revision": s.revision,
            "roster": _json.loads(
                export_roster(roster, STRUCTURED_JSONLIKE).decode()),
        }

    @app.post("/sessions/{sid}/edits")
    def submit_edits(sid: str, body: EditsBody, _=Depends(auth)):
        e = entry(sid)
        conflict_if_busy(e)
        with e.lock:
            if body.revision != e.session.revision:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale revision {body.revision}; session is at "
                           f"{e.session.revision}")
            try:
                edits = [(c.nurse, c.date, parse_shift(c.shift))
                         for c in body.edits]
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            try:
                warnings = pipeline.apply_edits(e.session, edits)
            except PipelineError as exc:
                raise phase_conflict(exc)
            store.save(e.session)
            return {
                "revision": e.session.revision,
                "phase": e.session.phase.value,
                "warnings": [
                    {"constraint": str(r.constraint), "nurse": r.nurse,
                     "date": r.date.isoformat() if r.date else None,
                     "magnitude": float(r.magnitude), "note": r.note}
                    for r in warnings
                ],
            }

    # -- reports and exports ------------------------------------------------------

    @app.get("/sessions/{sid}/reports/probe")
    def report_probe(sid: str, _=Depends(auth)):
        e = entry(sid)
        if e.last_probe is None:
            raise HTTPException(status_code=404, detail="no probe has run")
        return e.last_probe

    @app.get("/sessions/{sid}/reports/feedback")
    def report_feedback(sid: str, _=Depends(auth)):
        e = entry(sid)
        if e.session.night_result is None:
            raise HTTPException(status_code=404, detail="night stage not run")
        return {
            "night": _stage_result_dict(e.session.night_result),
            "day": (_stage_result_dict(e.session.day_result)
                    if e.session.day_result else None),
            "post_step_notes": e.session.post_step_notes,
        }

    @app.get("/sessions/{sid}/reports/final")
    def report_final(sid: str, _=Depends(auth)):
        e = entry(sid)
        try:
            doc = pipeline.final_report(e.session)
        except PipelineError as exc:
            raise phase_conflict(exc)
        store.save(e.session)
        return {"document": doc,
                "rendered": pipeline.render_final_report(doc)}

    @app.get("/sessions/{sid}/export/roster.csv")
    def export_csv(sid: str, _=Depends(auth)):
        from fastapi.responses import PlainTextResponse

        e = entry(sid)
        data = export_roster(e.session.current_roster(), GRID_CSV)
        return PlainTextResponse(content=data.decode(), media_type="text/csv")

    @app.get("/sessions/{sid}/export/instance.lp")
    def export_instance(sid: str, stage: str = "night", _=Depends(auth)):
        from fastapi.responses import PlainTextResponse

        e = entry(sid)
        s = e.session
        st = _stage(stage)
        wishes = (s.edited if st is Stage.DAY and s.edited is not None
                  else s.wishes)
        inst = encode_stage(st, s.cfg, wishes)
        return PlainTextResponse(
            content=write_instance(inst, LP_TEXT).decode(),
            media_type="text/plain")

    return app


def main():
    import uvicorn

    app = create_app()
    uvicorn.run(app, host=os.environ.get("ROSTRA_HOST", "127.0.0.1"),
                port=int(os.environ.get("ROSTRA_PORT", "8077")))


if __name__ == "__main__":
    main()
