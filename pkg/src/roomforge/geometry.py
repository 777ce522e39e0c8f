"""Room and scenario data model, validation, and closed-form acoustic estimates.

Rooms are shoebox-shaped with one pressure reflection coefficient per wall.
Scenarios bind a speaker, noise sources, and microphones to one or more rooms
(or to no room at all for purely additive mixing). All configuration types are
plain dataclasses that tolerate invalid values; ``validate_scenario`` turns
violations into a report instead of raising, so a half-edited scenario can
still be inspected.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

WALL_MARGIN_M = 0.1  # sources/mics must stay this far from every wall
RIR_FLOOR_SECONDS = 0.05
RIR_T60_HEADROOM = 1.25

WALL_NAMES = ("x0", "x1", "y0", "y1", "z0", "z1")


@dataclass
class RoomConfig:
    """Shoebox room: dimensions in meters plus per-wall reflection coefficients.

    ``wall_beta`` holds six pressure reflection coefficients ordered
    (x0, x1, y0, y1, z0, z1), where x0 is the wall at x=0 and x1 the wall at
    x=dims[0]. Energy absorption per wall is ``1 - beta**2``.
    """

    dims: tuple[float, float, float]
    wall_beta: tuple[float, float, float, float, float, float]
    speed_of_sound: float = 343.0
    sample_rate: int = 16000

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "wall_beta": list(self.wall_beta),
            "speed_of_sound": self.speed_of_sound,
            "sample_rate": self.sample_rate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoomConfig":
        return cls(
            dims=tuple(d["dims"]),
            wall_beta=tuple(d["wall_beta"]),
            speed_of_sound=d.get("speed_of_sound", 343.0),
            sample_rate=int(d.get("sample_rate", 16000)),
        )


@dataclass
class SourceSpec:
    """A sound source placed in the room.

    ``role`` is "speaker" or "noise". Noise sources are bound to a named
    noise-corpus pool and carry an inclusion probability plus a gain range
    expressed as an RMS ratio relative to the speaker.
    """

    id: str
    role: str
    position: tuple[float, float, float]
    inclusion_prob: float = 1.0
    gain_range: tuple[float, float] = (1.0, 1.0)
    pool: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "role": self.role,
            "position": list(self.position),
            "inclusion_prob": self.inclusion_prob,
            "gain_range": list(self.gain_range),
        }
        if self.pool is not None:
            d["pool"] = self.pool
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SourceSpec":
        return cls(
            id=d["id"],
            role=d["role"],
            position=tuple(d["position"]),
            inclusion_prob=d.get("inclusion_prob", 1.0),
            gain_range=tuple(d.get("gain_range", (1.0, 1.0))),
            pool=d.get("pool"),
        )


@dataclass
class MicrophoneSpec:
    """Omnidirectional microphone at a fixed position."""

    id: str
    position: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {"id": self.id, "position": list(self.position)}

    @classmethod
    def from_dict(cls, d: dict) -> "MicrophoneSpec":
        return cls(id=d["id"], position=tuple(d["position"]))


@dataclass
class ScenarioConfig:
    """Full mixing scenario: rooms, speaker, noise sources, microphones.

    ``mode`` is "room" (convolve every source with its room impulse response;
    one room is sampled per utterance when several are listed) or "no_room"
    (purely additive mixing; rooms and positions are ignored).
    """

    mode: str
    speaker: SourceSpec
    noise_sources: list[SourceSpec] = field(default_factory=list)
    microphones: list[MicrophoneSpec] = field(default_factory=list)
    rooms: list[RoomConfig] = field(default_factory=list)
    sample_rate: int = 16000
    max_rir_seconds: Optional[float] = None
    exclude_clean_speaker: bool = False

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "rooms": [r.to_dict() for r in self.rooms],
            "speaker": self.speaker.to_dict(),
            "noise_sources": [s.to_dict() for s in self.noise_sources],
            "microphones": [m.to_dict() for m in self.microphones],
            "sample_rate": self.sample_rate,
            "max_rir_seconds": self.max_rir_seconds,
            "exclude_clean_speaker": self.exclude_clean_speaker,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        return cls(
            mode=d["mode"],
            rooms=[RoomConfig.from_dict(r) for r in d.get("rooms", [])],
            speaker=SourceSpec.from_dict(d["speaker"]),
            noise_sources=[SourceSpec.from_dict(s) for s in d.get("noise_sources", [])],
            microphones=[MicrophoneSpec.from_dict(m) for m in d.get("microphones", [])],
            sample_rate=int(d.get("sample_rate", 16000)),
            max_rir_seconds=d.get("max_rir_seconds"),
            exclude_clean_speaker=bool(d.get("exclude_clean_speaker", False)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    path: str
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {"severity": i.severity, "path": i.path, "message": i.message}
                for i in self.issues
            ],
        }

    def __str__(self) -> str:
        if not self.issues:
            return "ok (no issues)"
        lines = ["ok" if self.ok else "INVALID"]
        lines += [f"  [{i.severity}] {i.path}: {i.message}" for i in self.issues]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Canonical serialization and hashing


def canonical_json(value) -> str:
    """Serialize to the canonical form used for hashing.

    Keys sorted, no insignificant whitespace, floats printed with 17
    significant digits so equal values always hash equally.
    """
    out: list[str] = []
    _write_canonical(value, out)
    return "".join(out)


def _write_canonical(value, out: list[str]) -> None:
    if value is None or isinstance(value, bool):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value in canonical serialization: {value!r}")
        out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _write_canonical(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write_canonical(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"unsupported type in canonical serialization: {type(value)}")


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def room_hash(room: RoomConfig) -> str:
    return _digest(canonical_json(room.to_dict()))


def scenario_hash(scenario: ScenarioConfig) -> str:
    return _digest(canonical_json(scenario.to_dict()))


# ---------------------------------------------------------------------------
# Validation


def _check_position_in_room(
    issues: list[Issue], path: str, pos: Sequence[float], room: RoomConfig, room_path: str
) -> None:
    for axis, (x, dim) in enumerate(zip(pos, room.dims)):
        if not (WALL_MARGIN_M <= x <= dim - WALL_MARGIN_M):
            issues.append(
                Issue(
                    "error",
                    path,
                    f"position outside room {room_path} along axis {axis} "
                    f"(need {WALL_MARGIN_M} <= {x} <= {dim - WALL_MARGIN_M})",
                )
            )
            return


def validate_room(room: RoomConfig, path: str = "room") -> list[Issue]:
    issues: list[Issue] = []
    if len(room.dims) != 3 or any(d <= 0 for d in room.dims):
        issues.append(Issue("error", f"{path}.dims", "all three dimensions must be > 0"))
    if len(room.wall_beta) != 6:
        issues.append(Issue("error", f"{path}.wall_beta", "expected 6 reflection coefficients"))
    else:
        for name, b in zip(WALL_NAMES, room.wall_beta):
            if not (0.0 <= b < 1.0):
                issues.append(
                    Issue(
                        "error",
                        f"{path}.wall_beta.{name}",
                        "reflection coefficient must be in [0, 1) (must be < 1)",
                    )
                )
            elif b >= 0.98:
                issues.append(
                    Issue(
                        "warning",
                        f"{path}.wall_beta.{name}",
                        f"reflection coefficient {b} is suspiciously close to 1",
                    )
                )
    if room.sample_rate <= 0:
        issues.append(Issue("error", f"{path}.sample_rate", "sample rate must be > 0"))
    if room.speed_of_sound <= 0:
        issues.append(Issue("error", f"{path}.speed_of_sound", "speed of sound must be > 0"))
    return issues


def _validate_source(src: SourceSpec, path: str) -> list[Issue]:
    issues: list[Issue] = []
    if src.role not in ("speaker", "noise"):
        issues.append(Issue("error", f"{path}.role", f"unknown role {src.role!r}"))
    if not (0.0 <= src.inclusion_prob <= 1.0):
        issues.append(Issue("error", f"{path}.inclusion_prob", "must be in [0, 1]"))
    g_lo, g_hi = src.gain_range
    if not (0.0 <= g_lo <= g_hi):
        issues.append(Issue("error", f"{path}.gain_range", "need 0 <= g_lo <= g_hi"))
    if src.role == "speaker":
        if src.inclusion_prob != 1.0:
            issues.append(Issue("error", f"{path}.inclusion_prob", "speaker must have inclusion_prob 1"))
        if tuple(src.gain_range) != (1.0, 1.0):
            issues.append(Issue("error", f"{path}.gain_range", "speaker must have gain_range (1, 1)"))
    if src.role == "noise" and not src.pool:
        issues.append(Issue("error", f"{path}.pool", "noise source must name a noise-corpus pool"))
    return issues


def validate_scenario(scenario: ScenarioConfig) -> ValidationReport:
    """Check every scenario invariant; returns a report instead of raising.

    Every violated invariant yields one error issue; suspicious but legal
    values (e.g. near-unity reflection coefficients) yield warnings.
    """
    issues: list[Issue] = []

    if scenario.mode not in ("room", "no_room"):
        issues.append(Issue("error", "mode", f"unknown mode {scenario.mode!r}"))
    if scenario.sample_rate <= 0:
        issues.append(Issue("error", "sample_rate", "sample rate must be > 0"))

    issues += _validate_source(scenario.speaker, "speaker")
    if scenario.speaker.role != "speaker":
        issues.append(Issue("error", "speaker.role", "scenario speaker must have role 'speaker'"))
    for i, src in enumerate(scenario.noise_sources):
        path = f"noise_sources[{i}]"
        issues += _validate_source(src, path)
        if src.role == "speaker":
            issues.append(Issue("error", f"{path}.role", "only one speaker source is allowed"))
    if not scenario.noise_sources:
        issues.append(Issue("warning", "noise_sources", "scenario has no noise sources"))

    ids = [scenario.speaker.id] + [s.id for s in scenario.noise_sources]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        issues.append(Issue("error", "noise_sources", f"duplicate source ids: {sorted(dup)}"))

    if scenario.mode == "room":
        if not scenario.rooms:
            issues.append(Issue("error", "rooms", "room mode requires at least one room"))
        if not scenario.microphones:
            issues.append(Issue("error", "microphones", "room mode requires at least one microphone"))
        for ri, room in enumerate(scenario.rooms):
            room_path = f"rooms[{ri}]"
            room_issues = validate_room(room, room_path)
            issues += room_issues
            if room.sample_rate != scenario.sample_rate:
                issues.append(
                    Issue(
                        "error",
                        f"{room_path}.sample_rate",
                        f"room rate {room.sample_rate} != scenario rate {scenario.sample_rate}",
                    )
                )
            if any(i.severity == "error" for i in room_issues):
                continue  # position checks are meaningless in a broken room
            _check_position_in_room(issues, "speaker.position", scenario.speaker.position, room, room_path)
            for si, src in enumerate(scenario.noise_sources):
                _check_position_in_room(issues, f"noise_sources[{si}].position", src.position, room, room_path)
            for mi, mic in enumerate(scenario.microphones):
                _check_position_in_room(issues, f"microphones[{mi}].position", mic.position, room, room_path)
            for mi, mic in enumerate(scenario.microphones):
                for label, src in [("speaker", scenario.speaker)] + [
                    (f"noise_sources[{si}]", s) for si, s in enumerate(scenario.noise_sources)
                ]:
                    if _dist(mic.position, src.position) < 1e-9:
                        issues.append(
                            Issue(
                                "error",
                                f"microphones[{mi}].position",
                                f"degenerate geometry: microphone coincides with {label} in {room_path}",
                            )
                        )

    return ValidationReport(issues)


def _dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


# ---------------------------------------------------------------------------
# Closed-form acoustic estimates


def estimate_t60(room: RoomConfig) -> float:
    """Sabine reverberation time 0.161 * V / A with A = sum (1 - beta^2) * S.

    Raises ValueError when the total absorption vanishes (all walls fully
    reflective), since reverberation would be unbounded.
    """
    lx, ly, lz = room.dims
    volume = lx * ly * lz
    surfaces = (ly * lz, ly * lz, lx * lz, lx * lz, lx * ly, lx * ly)
    absorption = sum((1.0 - b * b) * s for b, s in zip(room.wall_beta, surfaces))
    if absorption <= 0.0:
        raise ValueError("non-absorbing room: unbounded reverberation")
    return 0.161 * volume / absorption


def required_rir_samples(room: RoomConfig, override_seconds: Optional[float] = None) -> int:
    """Sample count an impulse response buffer must have for this room.

    The longest of: the explicit override, 1.25x the Sabine estimate, and a
    0.05 s floor covering the direct path.
    """
    seconds = max(
        override_seconds if override_seconds is not None else 0.0,
        RIR_T60_HEADROOM * estimate_t60(room),
        RIR_FLOOR_SECONDS,
    )
    n = math.ceil(room.sample_rate * seconds)
    if n <= 0:
        raise ValueError("required RIR length must be strictly positive")
    return n
