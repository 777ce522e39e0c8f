"""Corpus ingestion, deterministic splits, and seeded dataset generation.

A generation run walks a clean-speech manifest, derives one 64-bit seed per
utterance from the master seed, renders the noisy mix, writes per-microphone
WAVs, and appends a record carrying everything needed to re-render that file
bit for bit. Worker count never changes the output: per-utterance seeds are
schedule-independent and the manifest is assembled in utterance-id order.
"""

from __future__ import annotations

import concurrent.futures
import datetime
import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from . import __version__
from .audio_io import read_wav, probe_wav, resample, write_wav, WavSpec
from .geometry import ScenarioConfig, room_hash, scenario_hash, validate_scenario
from .mixer import AudioClip, MixRecipe, RirCache, render_utterance

log = logging.getLogger("roomforge.dataset")

MANIFEST_NAME = "manifest.jsonl"
HEADER_NAME = "header.json"
WAV_DIR = "wav"


class EmptyCorpusError(ValueError):
    pass


class OutputDirExistsError(OSError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    utterance_id: str
    path: str
    speaker_id: Optional[str] = None
    transcript: Optional[str] = None
    duration_seconds: float = 0.0


@dataclass
class CorpusManifest:
    name: str
    entries: list[CorpusEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def utterance_ids(self) -> list[str]:
        return [e.utterance_id for e in self.entries]


@dataclass
class SplitSpec:
    fractions: tuple[float, float, float]  # (train, val, test), summing to 1
    seed: int = 0


@dataclass
class UtteranceRecord:
    """Exact provenance of one generated noisy utterance."""

    utterance_id: str
    clean_path: str
    output_paths: dict  # mic id -> path relative to the dataset root
    transcript: Optional[str]
    room_hash: str  # or "no_room"
    recipe: MixRecipe
    scenario_hash: str
    speaker_id: Optional[str] = None
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "clean_path": self.clean_path,
            "output_paths": self.output_paths,
            "transcript": self.transcript,
            "room_hash": self.room_hash,
            "recipe": self.recipe.to_dict(),
            "scenario_hash": self.scenario_hash,
            "speaker_id": self.speaker_id,
            "tool_version": self.tool_version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UtteranceRecord":
        return cls(
            utterance_id=d["utterance_id"],
            clean_path=d["clean_path"],
            output_paths=d["output_paths"],
            transcript=d.get("transcript"),
            room_hash=d["room_hash"],
            recipe=MixRecipe.from_dict(d["recipe"]),
            scenario_hash=d["scenario_hash"],
            speaker_id=d.get("speaker_id"),
            tool_version=d.get("tool_version", ""),
        )


@dataclass
class DatasetManifest:
    header: dict
    records: list[UtteranceRecord]

    def content_hash(self) -> str:
        return manifest_content_hash(self.records)


@dataclass
class GenerationResult:
    manifest: DatasetManifest
    failures: list[tuple[str, str]]  # (utterance_id, error message)
    cancelled: bool = False


# ---------------------------------------------------------------------------
# Corpus ingestion and splitting


def ingest_corpus(
    root: Union[str, Path], layout: str = "flat", name: Optional[str] = None
) -> CorpusManifest:
    """Scan a directory of WAV files into a manifest.

    ``layout`` is "flat" (no speaker information) or "nested" (first directory
    level under the root is the speaker id). Entries are ordered
    lexicographically by utterance id; a sibling ``.txt`` with the same stem
    is picked up as the transcript. Unreadable files are skipped with a
    warning.
    """
    root = Path(root)
    if layout not in ("flat", "nested"):
        raise ValueError(f"unknown corpus layout {layout!r}")
    if not root.is_dir():
        raise EmptyCorpusError(f"corpus root {root} is not a readable directory")

    entries = []
    for path in sorted(root.rglob("*.wav")):
        rel = path.relative_to(root)
        utterance_id = rel.with_suffix("").as_posix()
        speaker_id = None
        if layout == "nested":
            if len(rel.parts) < 2:
                log.warning("skipping %s: nested layout expects <speaker>/<utt>.wav", path)
                continue
            speaker_id = rel.parts[0]
        try:
            info = probe_wav(path)
        except (OSError, ValueError) as exc:
            log.warning("skipping unreadable %s: %s", path, exc)
            continue
        txt = path.with_suffix(".txt")
        transcript = txt.read_text().strip() if txt.is_file() else None
        entries.append(
            CorpusEntry(
                utterance_id=utterance_id,
                path=str(path),
                speaker_id=speaker_id,
                transcript=transcript,
                duration_seconds=info.duration_seconds,
            )
        )
    if not entries:
        raise EmptyCorpusError(f"no usable WAV files under {root}")
    entries.sort(key=lambda e: e.utterance_id)
    return CorpusManifest(name=name or root.name, entries=entries)


def split_corpus(
    manifest: CorpusManifest, spec: SplitSpec
) -> tuple[CorpusManifest, CorpusManifest, CorpusManifest]:
    """Deterministic train/val/test split.

    Sizes are floor(fraction * N) for val and test with the remainder going
    to train; membership is a seeded shuffle, so the same spec always yields
    the same partition.
    """
    f_train, f_val, f_test = spec.fractions
    if any(f < 0 for f in spec.fractions):
        raise ValueError("split fractions must be >= 0")
    if abs(sum(spec.fractions) - 1.0) > 1e-9:
        raise ValueError(f"split fractions must sum to 1, got {sum(spec.fractions)}")

    n = len(manifest.entries)
    n_val = int(np.floor(f_val * n))
    n_test = int(np.floor(f_test * n))
    n_train = n - n_val - n_test

    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    shuffled = [manifest.entries[i] for i in order]

    def sub(tag: str, items: list[CorpusEntry]) -> CorpusManifest:
        return CorpusManifest(name=f"{manifest.name}.{tag}", entries=items)

    return (
        sub("train", shuffled[:n_train]),
        sub("val", shuffled[n_train : n_train + n_val]),
        sub("test", shuffled[n_train + n_val :]),
    )


def exclude_speaker(manifest: CorpusManifest, speaker_id: str) -> CorpusManifest:
    """Drop every entry of one speaker, preserving order."""
    kept = [e for e in manifest.entries if e.speaker_id != speaker_id]
    if not kept:
        raise EmptyCorpusError(f"excluding speaker {speaker_id!r} empties corpus {manifest.name!r}")
    return CorpusManifest(name=manifest.name, entries=kept)


# ---------------------------------------------------------------------------
# Seeds and manifest files


def derive_seed(master_seed: int, utterance_id: str) -> int:
    """Stable 64-bit per-utterance seed; independent of ordering and workers."""
    payload = master_seed.to_bytes(8, "little", signed=False) + b"\x00" + utterance_id.encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def manifest_content_hash(records: Sequence[UtteranceRecord]) -> str:
    text = "".join(_record_line(r) for r in records)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _record_line(record: UtteranceRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True) + "\n"


def write_manifest(out_dir: Union[str, Path], manifest: DatasetManifest) -> None:
    out_dir = Path(out_dir)
    with open(out_dir / MANIFEST_NAME, "w") as fh:
        for record in manifest.records:
            fh.write(_record_line(record))
    with open(out_dir / HEADER_NAME, "w") as fh:
        json.dump(manifest.header, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(out_dir: Union[str, Path]) -> DatasetManifest:
    out_dir = Path(out_dir)
    records = []
    with open(out_dir / MANIFEST_NAME) as fh:
        for line in fh:
            if line.strip():
                records.append(UtteranceRecord.from_dict(json.loads(line)))
    header = json.loads((out_dir / HEADER_NAME).read_text())
    return DatasetManifest(header=header, records=records)


# ---------------------------------------------------------------------------
# Noise pools


@dataclass
class NoisePool:
    """All clips of one noise corpus, loaded and resampled once."""

    name: str
    clips: list[AudioClip]
    paths: dict  # clip id -> source path


def load_noise_pool(manifest: CorpusManifest, sample_rate: int) -> NoisePool:
    clips = []
    paths = {}
    for entry in sorted(manifest.entries, key=lambda e: e.utterance_id):
        clip = read_wav(entry.path)
        clip = resample(clip, sample_rate)
        clip.id = entry.utterance_id
        clip.speaker_id = entry.speaker_id
        clips.append(clip)
        paths[entry.utterance_id] = entry.path
    if not clips:
        raise EmptyCorpusError(f"noise pool {manifest.name!r} is empty")
    return NoisePool(name=manifest.name, clips=clips, paths=paths)


def discover_noise_pools(
    noise_root: Union[str, Path], pool_names: Sequence[str]
) -> dict[str, CorpusManifest]:
    """Ingest one subdirectory per pool name under ``noise_root``.

    Layout per pool is auto-detected: WAVs directly inside the pool directory
    mean flat, otherwise nested-by-speaker.
    """
    noise_root = Path(noise_root)
    pools = {}
    for name in pool_names:
        pool_dir = noise_root / name
        if not pool_dir.is_dir():
            raise EmptyCorpusError(f"noise pool directory {pool_dir} not found")
        layout = "flat" if any(pool_dir.glob("*.wav")) else "nested"
        pools[name] = ingest_corpus(pool_dir, layout=layout, name=name)
    return pools


# ---------------------------------------------------------------------------
# Generation


def _safe_filename(utterance_id: str) -> str:
    return utterance_id.replace("/", "__").replace("\\", "__").replace(" ", "_")


def _load_clean(entry: CorpusEntry, sample_rate: int) -> AudioClip:
    clip = read_wav(entry.path)
    clip = resample(clip, sample_rate)
    clip.id = entry.utterance_id
    clip.speaker_id = entry.speaker_id
    return clip


def _render_one(
    entry: CorpusEntry,
    scenario: ScenarioConfig,
    pools: Mapping[str, NoisePool],
    clip_pools: Mapping[str, Sequence[AudioClip]],
    cache: RirCache,
    master_seed: int,
    scen_hash: str,
    out_dir: Path,
) -> UtteranceRecord:
    seed = derive_seed(master_seed, entry.utterance_id)
    speech = _load_clean(entry, scenario.sample_rate)
    outputs, recipe = render_utterance(scenario, speech, clip_pools, cache, seed)

    pool_by_source = {s.id: s.pool for s in scenario.noise_sources}
    for rec_entry in recipe.entries:
        pool = pools[pool_by_source[rec_entry.source_id]]
        rec_entry.clip_path = pool.paths.get(rec_entry.clip_id)

    if scenario.mode == "room":
        rh = room_hash(scenario.rooms[recipe.room_index])
        mic_ids = [m.id for m in scenario.microphones]
    else:
        rh = "no_room"
        mic_ids = [scenario.microphones[0].id if scenario.microphones else "mic0"]

    stem = _safe_filename(entry.utterance_id)
    output_paths = {}
    for mic_id, clip in zip(mic_ids, outputs):
        rel = f"{WAV_DIR}/{stem}.{mic_id}.wav"
        write_wav(out_dir / rel, clip, WavSpec(sample_rate=scenario.sample_rate))
        output_paths[mic_id] = rel

    return UtteranceRecord(
        utterance_id=entry.utterance_id,
        clean_path=entry.path,
        output_paths=output_paths,
        transcript=entry.transcript,
        room_hash=rh,
        recipe=recipe,
        scenario_hash=scen_hash,
        speaker_id=entry.speaker_id,
    )


def generate_dataset(
    scenario: ScenarioConfig,
    clean: CorpusManifest,
    noise_pools: Mapping[str, CorpusManifest],
    out_dir: Union[str, Path],
    master_seed: int,
    workers: int = 1,
    overwrite: bool = False,
    progress: Optional[Callable[[int, int], None]] = None,
    cancel: Optional[threading.Event] = None,
) -> GenerationResult:
    """Render a whole corpus into a noisy dataset with full provenance.

    Writes ``wav/``, ``manifest.jsonl`` (one record per line, sorted by
    utterance id) and ``header.json`` under ``out_dir``. Identical inputs and
    master seed produce bitwise-identical audio and manifest regardless of
    ``workers``. Per-utterance failures are recorded and skipped. A set
    ``cancel`` event stops dispatch; records already rendered are still
    flushed so a partial manifest stays parseable.
    """
    report = validate_scenario(scenario)
    if not report.ok:
        raise ValueError(f"invalid scenario:\n{report}")
    out_dir = Path(out_dir)
    if out_dir.exists() and any(out_dir.iterdir()) and not overwrite:
        raise OutputDirExistsError(
            f"{out_dir} already exists and is not empty (pass overwrite to replace)"
        )
    (out_dir / WAV_DIR).mkdir(parents=True, exist_ok=True)

    needed = {s.pool for s in scenario.noise_sources}
    missing = needed - set(noise_pools)
    if missing:
        raise EmptyCorpusError(f"missing noise pools: {sorted(missing)}")
    pools = {name: load_noise_pool(noise_pools[name], scenario.sample_rate) for name in needed}
    clip_pools = {name: pool.clips for name, pool in pools.items()}

    cache = RirCache().build(scenario)
    scen_hash = scenario_hash(scenario)
    entries = sorted(clean.entries, key=lambda e: e.utterance_id)
    total = len(entries)

    if workers <= 0:
        workers = os.cpu_count() or 1

    records: list[UtteranceRecord] = []
    failures: list[tuple[str, str]] = []
    cancelled = False
    done_count = 0

    def work(entry: CorpusEntry) -> UtteranceRecord:
        return _render_one(entry, scenario, pools, clip_pools, cache, master_seed, scen_hash, out_dir)

    if workers == 1:
        for entry in entries:
            if cancel is not None and cancel.is_set():
                cancelled = True
                break
            try:
                records.append(work(entry))
            except Exception as exc:  # noqa: BLE001 - per-utterance isolation
                log.warning("utterance %s failed: %s", entry.utterance_id, exc)
                failures.append((entry.utterance_id, str(exc)))
            done_count += 1
            if progress is not None:
                progress(done_count, total)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(work, e): e for e in entries}
            for future in concurrent.futures.as_completed(futures):
                entry = futures[future]
                if cancel is not None and cancel.is_set() and not cancelled:
                    cancelled = True
                    for f in futures:
                        f.cancel()
                if future.cancelled():
                    continue
                try:
                    records.append(future.result())
                except Exception as exc:  # noqa: BLE001
                    log.warning("utterance %s failed: %s", entry.utterance_id, exc)
                    failures.append((entry.utterance_id, str(exc)))
                done_count += 1
                if progress is not None:
                    progress(done_count, total)

    records.sort(key=lambda r: r.utterance_id)
    failures.sort()
    header = {
        "scenario_hash": scen_hash,
        "scenario": scenario.to_dict(),
        "master_seed": master_seed,
        "sample_rate": scenario.sample_rate,
        "counts": {
            "total": total,
            "rendered": len(records),
            "failed": len(failures),
        },
        "cancelled": cancelled,
        "tool_version": __version__,
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "manifest_content_hash": manifest_content_hash(records),
    }
    manifest = DatasetManifest(header=header, records=records)
    write_manifest(out_dir, manifest)
    return GenerationResult(manifest=manifest, failures=failures, cancelled=cancelled)


def render_from_record(
    scenario: ScenarioConfig,
    record: UtteranceRecord,
    noise_pools: Mapping[str, CorpusManifest],
    cache: Optional[RirCache] = None,
) -> list[AudioClip]:
    """Re-render one manifest record from its seed; used for audits."""
    needed = {s.pool for s in scenario.noise_sources}
    pools = {name: load_noise_pool(noise_pools[name], scenario.sample_rate) for name in needed}
    clip_pools = {name: pool.clips for name, pool in pools.items()}
    if cache is None:
        cache = RirCache().build(scenario)
    clean = read_wav(record.clean_path)
    clean = resample(clean, scenario.sample_rate)
    clean.id = record.utterance_id
    clean.speaker_id = record.speaker_id
    outputs, _recipe = render_utterance(scenario, clean, clip_pools, cache, record.recipe.seed)
    return outputs
