"""HTTP API backing the interactive room configurator.

Endpoints cover scenario editing, live acoustic previews, and generation job
control. Jobs run one at a time on a background thread with FIFO queueing;
progress is exposed for polling and cancellation flushes a valid partial
manifest. Preview responses are bounded (RIR capped at 1 s) so the UI can
refresh in real time while parameters are dragged.
"""

from __future__ import annotations

import base64
import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Form, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import __version__
from .audio_io import read_wav_bytes, resample, wav_bytes
from .dataset import (
    HEADER_NAME,
    MANIFEST_NAME,
    discover_noise_pools,
    generate_dataset,
    ingest_corpus,
    load_noise_pool,
)
from .geometry import (
    Issue,
    RoomConfig,
    ScenarioConfig,
    ValidationReport,
    WALL_MARGIN_M,
    estimate_t60,
    validate_room,
    validate_scenario,
)
from .mixer import RirCache, render_utterance
from .presets import load_preset
from .rir import (
    DegenerateGeometryError,
    compute_rir,
    decay_time,
    default_max_lattice_radius,
    energy_decay_curve,
)

log = logging.getLogger("roomforge.service")

PREVIEW_MAX_SECONDS = 1.0
EDC_MAX_POINTS = 1024
JOB_QUEUE_LIMIT = 16


@dataclass
class Job:
    id: str
    state: str = "queued"  # queued -> running -> done | failed | cancelled
    processed: int = 0
    total: int = 0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    error: Optional[str] = None
    failures: list = field(default_factory=list)
    out_dir: str = ""
    request: dict = field(default_factory=dict)
    cancel_event: threading.Event = field(default_factory=threading.Event)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "processed": self.processed,
            "total": self.total,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "error": self.error,
            "failures": self.failures,
            "out_dir": self.out_dir,
        }


class JobRegistry:
    """FIFO job queue with a single consumer thread and cooperative cancel."""

    def __init__(self) -> None:
        self.jobs: dict[str, Job] = {}
        self.queue: list[str] = []
        self.cond = threading.Condition()
        self.worker = threading.Thread(target=self._run, name="roomforge-jobs", daemon=True)
        self.worker.start()

    def submit(self, request: dict) -> Job:
        job = Job(id=uuid.uuid4().hex[:12], request=request, out_dir=request["out_dir"])
        with self.cond:
            if len(self.queue) >= JOB_QUEUE_LIMIT:
                raise QueueFullError(f"job queue is full (limit {JOB_QUEUE_LIMIT})")
            self.jobs[job.id] = job
            self.queue.append(job.id)
            self.cond.notify()
        return job

    def get(self, job_id: str) -> Optional[Job]:
        with self.cond:
            return self.jobs.get(job_id)

    def cancel(self, job_id: str) -> Optional[Job]:
        with self.cond:
            job = self.jobs.get(job_id)
            if job is None:
                return None
            if job.state == "queued":
                self.queue.remove(job.id)
                job.state = "cancelled"
                job.finished_at = time.time()
            elif job.state == "running":
                job.cancel_event.set()
            return job

    def _next(self) -> Job:
        with self.cond:
            while not self.queue:
                self.cond.wait()
            job = self.jobs[self.queue.pop(0)]
            job.state = "running"
            job.started_at = time.time()
            return job

    def _run(self) -> None:
        while True:
            job = self._next()
            try:
                self._execute(job)
            except Exception as exc:  # noqa: BLE001 - job isolation
                log.exception("job %s failed", job.id)
                job.error = str(exc)
                job.state = "failed"
                self._ensure_partial_manifest(job)
            finally:
                if job.finished_at is None:
                    job.finished_at = time.time()

    def _execute(self, job: Job) -> None:
        req = job.request
        scenario = ScenarioConfig.from_dict(req["scenario"])
        clean_root = Path(req["clean_root"])
        layout = req.get("clean_layout") or ("flat" if any(clean_root.glob("*.wav")) else "nested")
        clean = ingest_corpus(clean_root, layout=layout)
        pools = discover_noise_pools(req["noise_root"], sorted({s.pool for s in scenario.noise_sources}))

        def on_progress(done: int, total: int) -> None:
            job.processed = done
            job.total = total

        job.total = len(clean.entries)
        result = generate_dataset(
            scenario,
            clean,
            pools,
            req["out_dir"],
            master_seed=int(req.get("seed", 0)),
            workers=int(req.get("workers", 1)),
            overwrite=bool(req.get("overwrite", False)),
            progress=on_progress,
            cancel=job.cancel_event,
        )
        job.failures = [{"utterance_id": u, "error": e} for u, e in result.failures]
        job.state = "cancelled" if result.cancelled else "done"
        job.finished_at = time.time()

    @staticmethod
    def _ensure_partial_manifest(job: Job) -> None:
        """A failed job must still leave a parseable (possibly empty) manifest."""
        out_dir = Path(job.out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            if not (out_dir / MANIFEST_NAME).exists():
                (out_dir / MANIFEST_NAME).write_text("")
            if not (out_dir / HEADER_NAME).exists():
                (out_dir / HEADER_NAME).write_text(
                    json.dumps({"error": job.error, "counts": {"rendered": 0}}) + "\n"
                )
        except OSError:
            log.warning("could not flush partial manifest for job %s", job.id)


class QueueFullError(RuntimeError):
    pass


def _report_response(report: ValidationReport, status: int = 422) -> JSONResponse:
    return JSONResponse(status_code=status, content=report.to_dict())


def _validate_preview(room: RoomConfig, src, mic) -> ValidationReport:
    issues = validate_room(room, "room")
    report = ValidationReport(issues)
    if not report.ok:
        return report
    for label, pos in (("src", src), ("mic", mic)):
        if len(pos) != 3:
            issues.append(Issue("error", label, "position must be x,y,z"))
            continue
        for axis, (x, dim) in enumerate(zip(pos, room.dims)):
            if not (WALL_MARGIN_M <= x <= dim - WALL_MARGIN_M):
                issues.append(Issue("error", f"{label}.position", f"outside room along axis {axis}"))
                break
    if report.ok and all(abs(a - b) < 1e-12 for a, b in zip(src, mic)):
        issues.append(Issue("error", "mic", "degenerate geometry: source and microphone coincide"))
    return report


def _decimate_edc(edc: np.ndarray, sample_rate: int) -> list:
    idx = np.arange(len(edc))
    if len(edc) > EDC_MAX_POINTS:
        # Running minimum per bucket keeps the curve monotone nonincreasing.
        buckets = np.array_split(idx, EDC_MAX_POINTS)
        idx = np.array([b[-1] for b in buckets])
    return [[float(i / sample_rate), float(edc[i])] for i in idx]


def create_app(ui_dir: Optional[str] = None, default_scenario: Optional[ScenarioConfig] = None) -> FastAPI:
    """Build the service application; state lives inside the instance."""
    app = FastAPI(title="roomforge", version=__version__)
    registry = JobRegistry()
    state_lock = threading.Lock()
    current = {"scenario": default_scenario or load_preset("home")}

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/api/scenario")
    def get_scenario() -> dict:
        with state_lock:
            return current["scenario"].to_dict()

    @app.put("/api/scenario")
    def put_scenario(body: dict):
        try:
            scenario = ScenarioConfig.from_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            return _report_response(
                ValidationReport([Issue("error", "scenario", f"unparseable scenario: {exc}")])
            )
        report = validate_scenario(scenario)
        if not report.ok:
            return _report_response(report)
        with state_lock:
            current["scenario"] = scenario
        return report.to_dict()

    @app.post("/api/preview/rir")
    def preview_rir(body: dict):
        try:
            room = RoomConfig.from_dict(body["room"])
            src = tuple(float(v) for v in body["src"])
            mic = tuple(float(v) for v in body["mic"])
        except (KeyError, TypeError, ValueError) as exc:
            return _report_response(
                ValidationReport([Issue("error", "request", f"unparseable preview request: {exc}")])
            )
        report = _validate_preview(room, src, mic)
        if not report.ok:
            return _report_response(report)

        t60 = estimate_t60(room)
        length = min(
            int(np.ceil(room.sample_rate * max(1.25 * t60, 0.05))),
            int(room.sample_rate * PREVIEW_MAX_SECONDS),
        )
        # Keep previews interactive: bound the reflection order at the value
        # the capped length implies; the batch path stays exact.
        implied_order = default_max_lattice_radius(room, length)
        max_order = body.get("max_order")
        max_order = implied_order if max_order is None else min(int(max_order), implied_order)
        try:
            h = compute_rir(room, src, mic, length, max_order=max_order)
        except DegenerateGeometryError as exc:
            return _report_response(ValidationReport([Issue("error", "geometry", str(exc))]))
        edc = energy_decay_curve(h)
        return {
            "t60_estimate": t60,
            "t60_empirical": decay_time(edc, room.sample_rate),
            "sample_rate": room.sample_rate,
            "n_samples": len(h.samples),
            "rir_base64": base64.b64encode(h.samples.astype("<f4").tobytes()).decode("ascii"),
            "edc": _decimate_edc(edc, room.sample_rate),
        }

    @app.post("/api/preview/mix")
    def preview_mix(
        speech: UploadFile,
        scenario: str = Form(...),
        seed: int = Form(0),
        noise_root: str = Form(...),
    ):
        try:
            scen = ScenarioConfig.from_dict(json.loads(scenario))
        except (KeyError, TypeError, ValueError) as exc:
            return _report_response(
                ValidationReport([Issue("error", "scenario", f"unparseable scenario: {exc}")])
            )
        report = validate_scenario(scen)
        if not report.ok:
            return _report_response(report)
        try:
            clip = read_wav_bytes(speech.file.read(), clip_id=speech.filename or "upload")
            clip = resample(clip, scen.sample_rate)
            pool_manifests = discover_noise_pools(
                noise_root, sorted({s.pool for s in scen.noise_sources})
            )
            pools = {
                name: load_noise_pool(m, scen.sample_rate).clips
                for name, m in pool_manifests.items()
            }
            cache = RirCache().build(scen)
            outputs, _recipe = render_utterance(scen, clip, pools, cache, int(seed))
        except (OSError, ValueError, RuntimeError) as exc:
            return _report_response(ValidationReport([Issue("error", "mix", str(exc))]))
        return Response(content=wav_bytes(outputs[0]), media_type="audio/wav")

    @app.post("/api/jobs", status_code=202)
    def start_job(body: dict):
        try:
            scenario = ScenarioConfig.from_dict(body["scenario"])
            for key in ("clean_root", "noise_root", "out_dir"):
                if key not in body:
                    raise KeyError(key)
        except (KeyError, TypeError, ValueError) as exc:
            return _report_response(
                ValidationReport([Issue("error", "job", f"bad job request: {exc}")])
            )
        report = validate_scenario(scenario)
        if not report.ok:
            return _report_response(report)
        try:
            job = registry.submit(dict(body))
        except QueueFullError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        return {"job_id": job.id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = registry.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id}"})
        return job.to_dict()

    @app.delete("/api/jobs/{job_id}")
    def cancel_job(job_id: str):
        job = registry.cancel(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id}"})
        return job.to_dict()

    if ui_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        ui_dir = str(bundled) if bundled.is_dir() else None
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
