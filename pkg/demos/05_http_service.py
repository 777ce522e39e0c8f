"""Driving the HTTP service in-process.

Exercises the same API the browser UI uses: scenario PUT/GET, a live RIR
preview, and a generation job polled to completion. Uses the in-process test
client so no port is opened; `roomforge serve --port 8080` runs the real
server.

Run: python demos/05_http_service.py
"""

import base64
import tempfile
import time
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from roomforge import AudioClip, WavSpec, load_preset, write_wav
from roomforge.service import create_app

client = TestClient(create_app())
print("health:", client.get("/api/health").json())

# Scenario round trip.
scenario = load_preset("kitchen")
assert client.put("/api/scenario", json=scenario.to_dict()).status_code == 200
assert client.get("/api/scenario").json() == scenario.to_dict()
print("scenario PUT/GET round-trips unchanged")

# Live RIR preview, as issued while dragging a source in the UI.
resp = client.post(
    "/api/preview/rir",
    json={
        "room": {"dims": [5, 5, 5], "wall_beta": [0.9] * 6, "sample_rate": 16000},
        "src": [1, 2, 2],
        "mic": [3, 2, 2],
    },
)
body = resp.json()
rir = np.frombuffer(base64.b64decode(body["rir_base64"]), dtype="<f4")
print(
    f"preview: t60 {body['t60_estimate']:.5f} s, {body['n_samples']} samples,"
    f" edc points {len(body['edc'])}, decoded rir peak {np.abs(rir).max():.5f}"
)

# Invalid geometry comes back as 422 with the validation report.
bad = client.post(
    "/api/preview/rir",
    json={"room": {"dims": [5, 5, 5], "wall_beta": [0.9] * 6}, "src": [2, 2, 2], "mic": [2, 2, 2]},
)
print(f"degenerate preview -> {bad.status_code}: {bad.json()['issues'][0]['message']}")

# A small generation job, polled like the UI's dashboard.
rate = 16000
work = Path(tempfile.mkdtemp(prefix="roomforge_demo_"))
rng = np.random.default_rng(0)
for i in range(4):
    t = np.arange(int(0.4 * rate)) / rate
    path = work / "clean" / "spk" / f"utt{i}.wav"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(path, AudioClip(0.3 * np.sin(2 * np.pi * (200 + 50 * i) * t), rate), WavSpec(rate))
for i in range(2):
    path = work / "noise" / "kitchen_appliances" / f"n{i}.wav"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(path, AudioClip(0.2 * rng.standard_normal(int(0.6 * rate)), rate), WavSpec(rate))

resp = client.post(
    "/api/jobs",
    json={
        "scenario": scenario.to_dict(),
        "clean_root": str(work / "clean"),
        "noise_root": str(work / "noise"),
        "out_dir": str(work / "out"),
        "seed": 42,
        "workers": 2,
    },
)
job_id = resp.json()["job_id"]
print(f"job {job_id} accepted ({resp.status_code})")
while True:
    status = client.get(f"/api/jobs/{job_id}").json()
    print(f"  {status['state']}: {status['processed']}/{status['total']}")
    if status["state"] in ("done", "failed", "cancelled"):
        break
    time.sleep(0.2)
print(f"dataset written under {work / 'out'}")
