"""Sample-accurate mono WAV ingress/egress and rate conversion.

The reader and writer speak plain RIFF/WAVE with 16-bit integer PCM or 32-bit
float payloads, little-endian, nothing else. Keeping the container hand-rolled
makes the byte layout fully deterministic, which the dataset pipeline relies
on for reproducible output hashes.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.signal import resample_poly

from .mixer import AudioClip

PCM16 = "pcm16"
FLOAT32 = "float32"

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3


class MalformedWavError(ValueError):
    """File is not a parseable RIFF/WAVE container."""


class UnsupportedCodecError(ValueError):
    """WAV payload is neither 16-bit PCM nor 32-bit float."""


class ChannelCountError(ValueError):
    """Only mono files are supported."""


@dataclass
class WavSpec:
    sample_rate: int
    bit_depth: str = FLOAT32  # "pcm16" | "float32"
    channels: int = 1


@dataclass
class WavInfo:
    """Header-only facts, for cheap duration probing during corpus ingest."""

    n_frames: int
    sample_rate: int
    channels: int
    bit_depth: str

    @property
    def duration_seconds(self) -> float:
        return self.n_frames / self.sample_rate


def _parse_chunks(raw: bytes, path: Path) -> tuple[dict, bytes]:
    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise MalformedWavError(f"{path}: not a RIFF/WAVE file")
    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        cid = raw[pos : pos + 4]
        (size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedWavError(f"{path}: truncated {cid!r} chunk")
        if cid == b"fmt ":
            if size < 16:
                raise MalformedWavError(f"{path}: fmt chunk too short")
            fmt = dict(
                zip(
                    ("format", "channels", "sample_rate", "byte_rate", "block_align", "bits"),
                    struct.unpack_from("<HHIIHH", body, 0),
                )
            )
        elif cid == b"data":
            data = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise MalformedWavError(f"{path}: missing fmt or data chunk")
    return fmt, data


def probe_wav(path: Union[str, Path]) -> WavInfo:
    """Read only the header facts of a WAV file (channels need not be mono)."""
    path = Path(path)
    fmt, data = _parse_chunks(path.read_bytes(), path)
    if fmt["format"] == _FORMAT_PCM and fmt["bits"] == 16:
        depth, width = PCM16, 2
    elif fmt["format"] == _FORMAT_IEEE_FLOAT and fmt["bits"] == 32:
        depth, width = FLOAT32, 4
    else:
        raise UnsupportedCodecError(
            f"{path}: unsupported codec (format {fmt['format']}, {fmt['bits']} bits)"
        )
    frame = width * fmt["channels"]
    return WavInfo(
        n_frames=len(data) // frame,
        sample_rate=fmt["sample_rate"],
        channels=fmt["channels"],
        bit_depth=depth,
    )


def read_wav_bytes(raw: bytes, clip_id: str = "") -> AudioClip:
    """Decode an in-memory mono WAV; same rules as :func:`read_wav`."""
    label = Path(clip_id or "<bytes>")
    fmt, data = _parse_chunks(raw, label)
    if fmt["channels"] != 1:
        raise ChannelCountError(f"{label}: expected mono, found {fmt['channels']} channels")
    if fmt["format"] == _FORMAT_PCM and fmt["bits"] == 16:
        samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif fmt["format"] == _FORMAT_IEEE_FLOAT and fmt["bits"] == 32:
        samples = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedCodecError(
            f"{label}: unsupported codec (format {fmt['format']}, {fmt['bits']} bits)"
        )
    return AudioClip(samples=samples, sample_rate=fmt["sample_rate"], id=clip_id)


def read_wav(path: Union[str, Path]) -> AudioClip:
    """Load a mono WAV into normalized float64 samples in [-1, 1].

    16-bit PCM is divided by 32768; 32-bit float is taken verbatim. The clip
    id is the file stem.
    """
    path = Path(path)
    clip = read_wav_bytes(path.read_bytes(), clip_id=str(path))
    clip.id = path.stem
    return clip


def _quantize_pcm16(samples: np.ndarray, path: Path) -> np.ndarray:
    if np.any(np.abs(samples) > 1.0):
        worst = float(np.max(np.abs(samples)))
        raise ValueError(f"{path}: sample magnitude {worst} out of range for 16-bit output")
    scaled = samples * 32768.0
    # Round half away from zero, then saturate the single +1.0 -> 32768 case.
    q = np.where(scaled >= 0, np.floor(scaled + 0.5), np.ceil(scaled - 0.5))
    return np.clip(q, -32768, 32767).astype("<i2")


def wav_bytes(clip: AudioClip, spec: Union[WavSpec, None] = None) -> bytes:
    """Serialize a mono clip to WAV container bytes.

    16-bit output quantizes with round-half-away-from-zero and requires
    samples within [-1, 1]; float32 output stores the samples cast to
    float32.
    """
    if spec is None:
        spec = WavSpec(sample_rate=clip.sample_rate)
    if spec.channels != 1:
        raise ChannelCountError("only mono output is supported")
    samples = np.asarray(clip.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ValueError("refusing to write non-finite samples")

    if spec.bit_depth == PCM16:
        payload = _quantize_pcm16(samples, Path(clip.id or "<clip>")).tobytes()
        fmt_code, bits = _FORMAT_PCM, 16
    elif spec.bit_depth == FLOAT32:
        payload = samples.astype("<f4").tobytes()
        fmt_code, bits = _FORMAT_IEEE_FLOAT, 32
    else:
        raise UnsupportedCodecError(f"unknown bit depth {spec.bit_depth!r}")

    block_align = bits // 8
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    fmt_chunk = b"fmt " + struct.pack(
        "<IHHIIHH",
        16,
        fmt_code,
        1,
        spec.sample_rate,
        spec.sample_rate * block_align,
        block_align,
        bits,
    )
    data_chunk = b"data" + struct.pack("<I", len(payload)) + payload
    return header + fmt_chunk + data_chunk


def write_wav(path: Union[str, Path], clip: AudioClip, spec: Union[WavSpec, None] = None) -> None:
    """Write a mono WAV file; see :func:`wav_bytes` for the container rules."""
    Path(path).write_bytes(wav_bytes(clip, spec))


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Polyphase windowed-sinc resampling to ``target_rate``.

    Output length is round(len * target / source). Identity when the rates
    already match.
    """
    if target_rate <= 0 or clip.sample_rate <= 0:
        raise ValueError("sample rates must be > 0")
    if target_rate == clip.sample_rate:
        return clip
    g = math.gcd(int(target_rate), int(clip.sample_rate))
    up, down = target_rate // g, clip.sample_rate // g
    out = resample_poly(np.asarray(clip.samples, dtype=np.float64), up, down)
    n_out = math.floor(len(clip.samples) * target_rate / clip.sample_rate + 0.5)
    out = out[:n_out]
    if len(out) < n_out:  # resample_poly yields ceil(); never shorter in practice
        out = np.pad(out, (0, n_out - len(out)))
    return AudioClip(samples=out, sample_rate=target_rate, id=clip.id, speaker_id=clip.speaker_id)
