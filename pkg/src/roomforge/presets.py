"""Shipped scenario presets.

Geometry and absorption values here are representative choices made for this
library, not measurements of any particular space. All noise sources use the
0.2 to 0.4 RMS gain band relative to the speaker and a single microphone.
Pools are named by role: household, urban, competing_speakers,
kitchen_appliances, generic.
"""

from __future__ import annotations

from .geometry import MicrophoneSpec, RoomConfig, ScenarioConfig, SourceSpec

GAIN_BAND = (0.2, 0.4)

PRESET_NAMES = ("home", "cocktail", "kitchen", "room", "no_room")


def _speaker(position) -> SourceSpec:
    return SourceSpec(id="speaker", role="speaker", position=position)


def _home() -> ScenarioConfig:
    living_room = RoomConfig(
        dims=(6.0, 4.5, 2.7),
        wall_beta=(0.85, 0.85, 0.85, 0.85, 0.82, 0.85),
    )
    return ScenarioConfig(
        mode="room",
        rooms=[living_room],
        speaker=_speaker((2.2, 2.3, 1.5)),
        noise_sources=[
            SourceSpec(
                id="household",
                role="noise",
                position=(5.2, 0.8, 0.9),
                inclusion_prob=0.8,
                gain_range=GAIN_BAND,
                pool="household",
            ),
            SourceSpec(
                id="window_urban",
                role="noise",
                position=(0.3, 3.8, 1.6),
                inclusion_prob=0.6,
                gain_range=GAIN_BAND,
                pool="urban",
            ),
        ],
        microphones=[MicrophoneSpec(id="mic0", position=(3.4, 2.1, 1.4))],
    )


def _cocktail() -> ScenarioConfig:
    party_room = RoomConfig(
        dims=(8.0, 6.0, 3.0),
        wall_beta=(0.85, 0.85, 0.85, 0.85, 0.8, 0.85),
    )
    return ScenarioConfig(
        mode="room",
        rooms=[party_room],
        speaker=_speaker((3.0, 3.0, 1.6)),
        noise_sources=[
            SourceSpec(
                id="talker_a",
                role="noise",
                position=(6.2, 1.5, 1.6),
                inclusion_prob=0.9,
                gain_range=GAIN_BAND,
                pool="competing_speakers",
            ),
            SourceSpec(
                id="talker_b",
                role="noise",
                position=(1.2, 5.0, 1.6),
                inclusion_prob=0.7,
                gain_range=GAIN_BAND,
                pool="competing_speakers",
            ),
        ],
        microphones=[MicrophoneSpec(id="mic0", position=(4.1, 3.2, 1.5))],
        exclude_clean_speaker=True,
    )


def _kitchen() -> ScenarioConfig:
    kitchen = RoomConfig(
        dims=(4.0, 3.2, 2.5),
        wall_beta=(0.9, 0.9, 0.9, 0.88, 0.86, 0.9),
    )
    return ScenarioConfig(
        mode="room",
        rooms=[kitchen],
        speaker=_speaker((1.3, 1.6, 1.6)),
        noise_sources=[
            SourceSpec(
                id="appliance_counter",
                role="noise",
                position=(3.6, 0.5, 1.0),
                inclusion_prob=0.85,
                gain_range=GAIN_BAND,
                pool="kitchen_appliances",
            ),
            SourceSpec(
                id="appliance_corner",
                role="noise",
                position=(0.4, 2.8, 0.6),
                inclusion_prob=0.5,
                gain_range=GAIN_BAND,
                pool="kitchen_appliances",
            ),
        ],
        microphones=[MicrophoneSpec(id="mic0", position=(2.2, 1.9, 1.5))],
    )


def _room() -> ScenarioConfig:
    # Five rooms of varied size and liveness; every position below is valid
    # in all of them (the smallest is 3.6 x 3.0 x 2.4).
    rooms = [
        RoomConfig(dims=(3.6, 3.0, 2.4), wall_beta=(0.8, 0.8, 0.8, 0.8, 0.75, 0.8)),
        RoomConfig(dims=(4.4, 3.6, 2.5), wall_beta=(0.84, 0.84, 0.84, 0.84, 0.8, 0.84)),
        RoomConfig(dims=(5.5, 4.2, 2.6), wall_beta=(0.86, 0.86, 0.86, 0.86, 0.82, 0.86)),
        RoomConfig(dims=(6.5, 5.0, 2.8), wall_beta=(0.85, 0.85, 0.85, 0.85, 0.8, 0.85)),
        RoomConfig(dims=(7.5, 6.0, 3.0), wall_beta=(0.88, 0.88, 0.88, 0.88, 0.84, 0.88)),
    ]
    return ScenarioConfig(
        mode="room",
        rooms=rooms,
        speaker=_speaker((1.5, 1.4, 1.5)),
        noise_sources=[
            SourceSpec(
                id="ambient",
                role="noise",
                position=(2.9, 2.4, 1.2),
                inclusion_prob=0.9,
                gain_range=GAIN_BAND,
                pool="generic",
            ),
        ],
        microphones=[MicrophoneSpec(id="mic0", position=(2.2, 1.0, 1.4))],
    )


def _no_room() -> ScenarioConfig:
    return ScenarioConfig(
        mode="no_room",
        rooms=[],
        speaker=_speaker((1.0, 1.0, 1.0)),
        noise_sources=[
            SourceSpec(
                id="ambient",
                role="noise",
                position=(2.0, 2.0, 1.0),
                inclusion_prob=1.0,
                gain_range=GAIN_BAND,
                pool="generic",
            ),
        ],
        microphones=[],
    )


_BUILDERS = {
    "home": _home,
    "cocktail": _cocktail,
    "kitchen": _kitchen,
    "room": _room,
    "no_room": _no_room,
}


def load_preset(name: str) -> ScenarioConfig:
    """Build one of the shipped scenarios: home, cocktail, kitchen, room, no_room."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}") from None
    return builder()
