"""Convolution, level control, and per-utterance scene rendering.

A render takes one clean speech clip, draws noise clips and gains from seeded
randomness, places everything in a room (or mixes additively in no-room mode),
and returns the microphone signals together with a recipe that records every
random choice. Identical (scenario, speech, seed) inputs always reproduce the
same samples bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .geometry import ScenarioConfig, required_rir_samples, room_hash
from .rir import ImpulseResponse, compute_rir

CROSSFADE_SECONDS = 0.010
PEAK_LIMIT = 0.99


class UnusableClipError(RuntimeError):
    """A required noise pool yielded no usable (non-silent) clip."""


@dataclass
class AudioClip:
    """Mono sample buffer with provenance."""

    samples: np.ndarray
    sample_rate: int
    id: str = ""
    speaker_id: Optional[str] = None

    def __len__(self) -> int:
        return len(self.samples)


@dataclass
class RecipeEntry:
    """One included noise source: which clip, at what gain, and where it was cut."""

    source_id: str
    clip_id: str
    gain: float
    offset: int = 0  # onset of the noise in the output timeline
    window_start: int = 0  # start of the fitted window within the (tiled) clip
    clip_path: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "clip_id": self.clip_id,
            "gain": self.gain,
            "offset": self.offset,
            "window_start": self.window_start,
            "clip_path": self.clip_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecipeEntry":
        return cls(
            source_id=d["source_id"],
            clip_id=d["clip_id"],
            gain=d["gain"],
            offset=d.get("offset", 0),
            window_start=d.get("window_start", 0),
            clip_path=d.get("clip_path"),
        )


@dataclass
class MixRecipe:
    """Every random choice made while rendering one utterance."""

    seed: int
    room_index: Optional[int]  # None in no-room mode
    entries: list[RecipeEntry] = field(default_factory=list)
    limiter_factor: float = 1.0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "room_index": self.room_index,
            "entries": [e.to_dict() for e in self.entries],
            "limiter_factor": self.limiter_factor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MixRecipe":
        return cls(
            seed=d["seed"],
            room_index=d.get("room_index"),
            entries=[RecipeEntry.from_dict(e) for e in d.get("entries", [])],
            limiter_factor=d.get("limiter_factor", 1.0),
        )


# ---------------------------------------------------------------------------
# Primitives


def convolve(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Linear convolution via FFT overlap-add.

    Output length is len(x) + len(h) - 1. The FFT block is the next power of
    two at or above 4*len(h), a reasonable latency/throughput balance.
    """
    x = np.asarray(x, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if len(x) == 0 or len(h) == 0:
        raise ValueError("convolve requires nonempty inputs")

    out_len = len(x) + len(h) - 1
    nfft = 1 << max(4 * len(h) - 1, 1).bit_length()
    step = nfft - len(h) + 1

    spectrum_h = np.fft.rfft(h, nfft)
    y = np.zeros(out_len, dtype=np.float64)
    for start in range(0, len(x), step):
        seg = x[start : start + step]
        block = np.fft.irfft(np.fft.rfft(seg, nfft) * spectrum_h, nfft)
        n = len(seg) + len(h) - 1
        y[start : start + n] += block[:n]
    return y


def rms(x: np.ndarray) -> float:
    """Root mean square; zero iff the signal is all-zero."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) == 0:
        raise ValueError("rms of empty signal")
    return float(np.sqrt(np.mean(x * x)))


def scale_noise(noise: AudioClip, speaker_rms: float, g: float) -> AudioClip:
    """Scale a noise clip so its RMS equals ``g`` times the speaker RMS."""
    if speaker_rms <= 0:
        raise ValueError("speaker RMS must be > 0")
    if g < 0:
        raise ValueError("gain must be >= 0")
    if g == 0:
        return AudioClip(
            samples=np.zeros_like(noise.samples, dtype=np.float64),
            sample_rate=noise.sample_rate,
            id=noise.id,
            speaker_id=noise.speaker_id,
        )
    noise_rms = rms(noise.samples)
    if noise_rms == 0:
        raise UnusableClipError(f"clip {noise.id!r} is silent, cannot scale to gain {g}")
    factor = g * speaker_rms / noise_rms
    return AudioClip(
        samples=noise.samples * factor,
        sample_rate=noise.sample_rate,
        id=noise.id,
        speaker_id=noise.speaker_id,
    )


def _crossfade_tile(samples: np.ndarray, sample_rate: int, target: int) -> np.ndarray:
    """Tile a short clip past ``target`` length with linear crossfaded joins."""
    fade = min(round(CROSSFADE_SECONDS * sample_rate), len(samples) - 1)
    out = samples
    while len(out) < target:
        if fade <= 0:
            out = np.concatenate([out, samples])
        else:
            ramp = np.arange(1, fade + 1, dtype=np.float64) / (fade + 1)
            joint = out[-fade:] * (1.0 - ramp) + samples[:fade] * ramp
            out = np.concatenate([out[:-fade], joint, samples[fade:]])
    return out


def fit_window(samples: np.ndarray, sample_rate: int, target: int, start: int) -> np.ndarray:
    """Deterministically re-cut the window a recipe recorded.

    Shorter clips are tiled with crossfades exactly as during rendering, so a
    (clip, window_start) pair always reproduces the same fitted signal.
    """
    if len(samples) < target:
        samples = _crossfade_tile(samples, sample_rate, target)
    return samples[start : start + target]


def _fit_length_with_start(
    clip: AudioClip, target: int, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    if target <= 0:
        raise ValueError("target length must be > 0")
    if len(clip) == 0:
        raise ValueError("cannot fit an empty clip")
    samples = np.asarray(clip.samples, dtype=np.float64)
    if len(samples) == target:
        return samples, 0
    if len(samples) < target:
        samples = _crossfade_tile(samples, clip.sample_rate, target)
        if len(samples) == target:
            return samples, 0
    start = int(rng.integers(0, len(samples) - target + 1))
    return samples[start : start + target], start


def fit_length(x: AudioClip, target: int, rng: np.random.Generator) -> AudioClip:
    """Cut or tile a clip to exactly ``target`` samples.

    Longer clips yield a random contiguous window; shorter clips are tiled
    with 10 ms linear crossfades before windowing. A clip that already has
    the target length is returned unchanged without consuming randomness.
    """
    if len(x) == target:
        return x
    samples, _ = _fit_length_with_start(x, target, rng)
    return AudioClip(samples=samples, sample_rate=x.sample_rate, id=x.id, speaker_id=x.speaker_id)


# ---------------------------------------------------------------------------
# RIR cache


class RirCache:
    """Impulse responses for every (room, source, microphone) of a scenario.

    Built once up front (single writer), then shared read-only across render
    workers.
    """

    def __init__(self) -> None:
        self._store: dict[tuple[str, str, str], ImpulseResponse] = {}

    def build(self, scenario: ScenarioConfig) -> "RirCache":
        if scenario.mode != "room":
            return self
        sources = [scenario.speaker] + list(scenario.noise_sources)
        for room in scenario.rooms:
            rh = room_hash(room)
            length = required_rir_samples(room, scenario.max_rir_seconds)
            for src in sources:
                for mic in scenario.microphones:
                    key = (rh, src.id, mic.id)
                    if key in self._store:
                        continue
                    self._store[key] = compute_rir(
                        room,
                        src.position,
                        mic.position,
                        length,
                        source_id=src.id,
                        mic_id=mic.id,
                    )
        return self

    def get(self, room_hash_: str, source_id: str, mic_id: str) -> ImpulseResponse:
        try:
            return self._store[(room_hash_, source_id, mic_id)]
        except KeyError:
            raise KeyError(
                f"no cached RIR for room {room_hash_}, source {source_id!r}, mic {mic_id!r}; "
                "call build() first"
            ) from None

    def __len__(self) -> int:
        return len(self._store)


# ---------------------------------------------------------------------------
# Scene rendering


def render_utterance(
    scenario: ScenarioConfig,
    speech: AudioClip,
    noise_pools: Mapping[str, Sequence[AudioClip]],
    rir_cache: Optional[RirCache],
    seed: int,
) -> tuple[list[AudioClip], MixRecipe]:
    """Render one utterance into the scenario's microphones.

    Randomness comes from a generator seeded with ``seed`` and is consumed in
    a fixed order (room choice, then per noise source: inclusion, clip pick,
    gain, window), so the output is fully determined by (scenario, speech,
    seed). Each noise source joins the mix with independent probability
    ``inclusion_prob``; included noise is length-fitted to the speech, scaled
    to its drawn RMS gain, and, in room mode, convolved with its impulse
    response. If the mixed peak exceeds 0.99 the whole mix is scaled down and
    the factor recorded.
    """
    if speech.sample_rate != scenario.sample_rate:
        raise ValueError(
            f"sample-rate mismatch: speech {speech.sample_rate} Hz, "
            f"scenario {scenario.sample_rate} Hz"
        )
    if len(speech) == 0:
        raise ValueError("speech clip is empty")

    rng = np.random.default_rng(seed)

    room_index: Optional[int] = None
    if scenario.mode == "room":
        if not scenario.rooms:
            raise ValueError("room mode requires at least one room")
        if rir_cache is None:
            raise ValueError("room mode requires a built RirCache")
        room_index = int(rng.integers(0, len(scenario.rooms)))

    speaker_rms = rms(speech.samples)
    entries: list[RecipeEntry] = []
    scaled_signals: list[np.ndarray] = []
    included_ids: list[str] = []

    for src in scenario.noise_sources:
        if rng.random() >= src.inclusion_prob:
            continue
        try:
            pool = noise_pools[src.pool]
        except KeyError:
            raise UnusableClipError(f"noise pool {src.pool!r} not provided") from None
        eligible = [
            c
            for c in pool
            if not (
                scenario.exclude_clean_speaker
                and c.speaker_id is not None
                and speech.speaker_id is not None
                and c.speaker_id == speech.speaker_id
            )
        ]
        if not eligible:
            raise UnusableClipError(
                f"noise pool {src.pool!r} has no eligible clip for speaker {speech.speaker_id!r}"
            )
        clip = None
        for _attempt in range(5):
            candidate = eligible[int(rng.integers(0, len(eligible)))]
            if rms(candidate.samples) > 0:
                clip = candidate
                break
        if clip is None:
            raise UnusableClipError(f"noise pool {src.pool!r}: 5 draws in a row were silent")

        g_lo, g_hi = src.gain_range
        gain = float(rng.uniform(g_lo, g_hi))
        fitted, window_start = _fit_length_with_start(clip, len(speech), rng)
        if speaker_rms <= 0 and gain > 0:
            raise UnusableClipError(f"speech clip {speech.id!r} is silent, cannot set noise level")
        scaled = scale_noise(
            AudioClip(fitted, clip.sample_rate, clip.id, clip.speaker_id), speaker_rms, gain
        )
        entries.append(
            RecipeEntry(
                source_id=src.id,
                clip_id=clip.id,
                gain=gain,
                offset=0,
                window_start=window_start,
            )
        )
        scaled_signals.append(scaled.samples)
        included_ids.append(src.id)

    if scenario.mode == "room":
        room = scenario.rooms[room_index]
        rh = room_hash(room)
        channels = []
        for mic in scenario.microphones:
            speaker_rir = rir_cache.get(rh, scenario.speaker.id, mic.id)
            y = convolve(speech.samples, speaker_rir.samples)
            for src_id, sig in zip(included_ids, scaled_signals):
                y += convolve(sig, rir_cache.get(rh, src_id, mic.id).samples)
            channels.append(y)
        mic_ids = [m.id for m in scenario.microphones]
    else:
        y = speech.samples.astype(np.float64, copy=True)
        for sig in scaled_signals:
            y += sig
        channels = [y]
        mic_ids = [scenario.microphones[0].id if scenario.microphones else "mic0"]

    limiter_factor = 1.0
    peak = max(float(np.max(np.abs(ch))) for ch in channels)
    if peak > PEAK_LIMIT:
        limiter_factor = PEAK_LIMIT / peak
        channels = [ch * limiter_factor for ch in channels]

    recipe = MixRecipe(
        seed=seed, room_index=room_index, entries=entries, limiter_factor=limiter_factor
    )
    outputs = [
        AudioClip(
            samples=ch,
            sample_rate=scenario.sample_rate,
            id=f"{speech.id}.{mic_id}" if speech.id else mic_id,
            speaker_id=speech.speaker_id,
        )
        for ch, mic_id in zip(channels, mic_ids)
    ]
    return outputs, recipe
