"""
sg-alg HTTP service: upload a game → background solve → progress over SSE → report.

  SG_ALG_REPORT_TTL_MIN=30     # minutes an idle job is kept
  SG_ALG_THREADS=0             # parallelism inside each solve

Run locally with `python main.py` (uvicorn).
"""

from __future__ import annotations

import asyncio
import json
import logging
import uuid
from datetime import datetime, timedelta
from fractions import Fraction
from typing import Any, Dict, Optional

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .algsolve import solve_discounted
from .config import configure_logging, load_settings
from .errors import AmbiguityError, CertificateError, SgAlgError
from .game import Mode, StochasticGame, classify, parse_game, parse_matrix
from .limit import solve_limit
from .matrix_game import solve_matrix_game
from .report import limit_document, matrix_document, render_text, solve_document
from .shapley import DiscountFactor

configure_logging(load_settings())
log = logging.getLogger("sgalg.service")

MAX_UPLOAD_BYTES = 1024 * 1024


def _status_for(exc: SgAlgError) -> int:
    if isinstance(exc, (AmbiguityError, CertificateError)):
        return 422
    if exc.exit_code in (1, 2):
        return 400
    return 500


# ───────────────────────────────────────────────────────────────────────────────
# Job model
# ───────────────────────────────────────────────────────────────────────────────

class JobStatus:
    UPLOADED = "uploaded"
    QUEUED = "queued"
    SOLVING = "solving"
    DONE = "done"
    ERROR = "error"


class Command:
    SOLVE = "solve"
    LIMIT = "limit"
    ALL = (SOLVE, LIMIT)


class Job:
    def __init__(self, job_id: str, filename: str, game: StochasticGame):
        self.job_id = job_id
        self.filename = filename
        self.game = game

        self.command: Optional[str] = None
        self.beta: Optional[str] = None
        self.mode: str = Mode.NORMALIZED
        self.precision: Optional[str] = None

        self.status: str = JobStatus.UPLOADED
        self.report: Optional[Dict[str, Any]] = None
        self.error: Optional[str] = None
        self.error_status: int = 500
        self.created_at = datetime.utcnow()
        self.expiry: Optional[datetime] = None
        self.cleanup_task: Optional[asyncio.Task] = None

    @property
    def report_url(self) -> Optional[str]:
        if self.status != JobStatus.DONE:
            return None
        return f"/report/{self.job_id}"


jobs: Dict[str, Job] = {}


def _run(job: Job) -> Dict[str, Any]:
    settings = load_settings()
    if job.command == Command.LIMIT:
        report = solve_limit(job.game, job.precision, settings)
        return limit_document(job.filename, report)
    beta = DiscountFactor.parse(job.beta or "").beta
    report = solve_discounted(job.game, beta, job.mode, job.precision, settings)
    return solve_document(job.filename, report)


async def run_job(job: Job) -> None:
    try:
        job.status = JobStatus.SOLVING
        job.report = await asyncio.to_thread(_run, job)
        job.status = JobStatus.DONE
        log.info("Job %s finished", job.job_id)
    except SgAlgError as exc:
        log.warning("Job %s failed: %s", job.job_id, exc)
        job.error = str(exc)
        job.error_status = _status_for(exc)
        job.status = JobStatus.ERROR
    except Exception as exc:
        log.exception("Job %s failed: %s", job.job_id, exc)
        job.error = "internal error"
        job.status = JobStatus.ERROR
    schedule_cleanup(job)


def schedule_cleanup(job: Job) -> None:
    """(Re)start the expiry clock of job; a running solve is never expired."""
    if job.cleanup_task is not None:
        job.cleanup_task.cancel()
    ttl = load_settings().report_ttl_min
    job.expiry = datetime.utcnow() + timedelta(minutes=ttl)
    job.cleanup_task = asyncio.create_task(cleanup_job(job.job_id))


def hold_job(job: Job) -> None:
    if job.cleanup_task is not None:
        job.cleanup_task.cancel()
        job.cleanup_task = None
    job.expiry = None


async def cleanup_job(job_id: str) -> None:
    while True:
        job = jobs.get(job_id)
        if not job or not job.expiry:
            return
        delay = (job.expiry - datetime.utcnow()).total_seconds()
        if delay <= 0:
            break
        # expiry may move while sleeping
        await asyncio.sleep(delay)
    jobs.pop(job_id, None)
    log.info("Cleaned up job %s", job_id)


# ───────────────────────────────────────────────────────────────────────────────
# FastAPI app
# ───────────────────────────────────────────────────────────────────────────────

app = FastAPI(title="sg-alg")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"], allow_credentials=True, allow_methods=["*"], allow_headers=["*"],
)


async def _read_upload(file: UploadFile) -> bytes:
    data = await file.read(MAX_UPLOAD_BYTES + 1)
    if len(data) > MAX_UPLOAD_BYTES:
        raise HTTPException(400, "File exceeds 1MB limit")
    return data


@app.head("/")
async def head_root() -> JSONResponse:
    return JSONResponse({"ok": True})


@app.post("/upload")
async def upload_game(file: UploadFile = File(...)) -> JSONResponse:
    data = await _read_upload(file)
    try:
        game = parse_game(data)
    except SgAlgError as exc:
        raise HTTPException(400, str(exc))
    job_id = str(uuid.uuid4())
    job = Job(job_id, file.filename or "upload.game", game)
    jobs[job_id] = job
    schedule_cleanup(job)
    log.info("Uploaded game %s with %d states", job_id, game.N)
    return JSONResponse(
        {
            "job_id": job_id,
            "status": JobStatus.UPLOADED,
            "states": game.N,
            "classes": list(classify(game)),
        }
    )


@app.post("/solve")
async def start_solve(
    job_id: str = Form(...),
    command: str = Form(Command.SOLVE),
    beta: Optional[str] = Form(None),
    mode: str = Form(Mode.NORMALIZED),
    precision: Optional[str] = Form(None),
) -> JSONResponse:
    job = jobs.get(job_id)
    if not job:
        raise HTTPException(400, "Invalid job ID")
    if job.status not in (JobStatus.UPLOADED, JobStatus.DONE, JobStatus.ERROR):
        raise HTTPException(400, "Job already running")
    if command not in Command.ALL:
        raise HTTPException(400, f"Unknown command: {command}")
    if mode not in Mode.ALL:
        raise HTTPException(400, f"Unknown mode: {mode}")
    if command == Command.SOLVE:
        try:
            DiscountFactor.parse(beta or "")
        except SgAlgError as exc:
            raise HTTPException(400, str(exc))
    if precision is not None:
        try:
            if Fraction(precision) <= 0:
                raise ValueError(precision)
        except (ValueError, ZeroDivisionError):
            raise HTTPException(400, f"Invalid precision: {precision}")
    job.command, job.beta, job.mode, job.precision = command, beta, mode, precision
    hold_job(job)
    job.status = JobStatus.QUEUED
    job.report = job.error = None
    asyncio.create_task(run_job(job))
    return JSONResponse({"job_id": job_id, "status": job.status})


@app.get("/events/{job_id}")
async def job_events(job_id: str):
    async def gen(jid: str):
        last_status = None
        while True:
            job = jobs.get(jid)
            if not job:
                yield f"data: {json.dumps({'status': JobStatus.ERROR, 'message': 'Job not found'})}\n\n"
                break
            if job.status != last_status:
                payload: Dict[str, Any] = {"status": job.status}
                if job.status == JobStatus.DONE:
                    payload["report_url"] = job.report_url
                if job.status == JobStatus.ERROR:
                    payload["message"] = job.error
                yield f"data: {json.dumps(payload)}\n\n"
                last_status = job.status
                if job.status in {JobStatus.DONE, JobStatus.ERROR}:
                    break
            await asyncio.sleep(0.2)
    return StreamingResponse(gen(job_id), media_type="text/event-stream")


@app.get("/report/{job_id}")
async def get_report(job_id: str, format: str = "json"):
    job = jobs.get(job_id)
    if not job:
        raise HTTPException(404, "Job not found")
    if job.status == JobStatus.ERROR:
        raise HTTPException(job.error_status, job.error or "Job failed")
    if job.status != JobStatus.DONE or job.report is None:
        raise HTTPException(400, "Report not ready")
    if job.expiry and datetime.utcnow() > job.expiry:
        raise HTTPException(410, "Report expired")
    if format == "text":
        return PlainTextResponse(render_text(job.report))
    return JSONResponse(job.report)


@app.post("/matrix-value")
async def matrix_value(file: UploadFile = File(...)) -> JSONResponse:
    data = await _read_upload(file)
    try:
        A = parse_matrix(data)
    except SgAlgError as exc:
        raise HTTPException(400, str(exc))
    doc = await asyncio.to_thread(lambda: matrix_document(file.filename or "matrix", A, solve_matrix_game(A)))
    return JSONResponse(doc)


@app.get("/healthz")
async def health() -> Dict[str, str]:
    return {"status": "ok"}
