"""Rooms, validation, and closed-form reverberation estimates.

Walks through building a shoebox room, reading its Sabine T60 estimate, and
seeing how the scenario validator reports bad geometry.

Run: python demos/01_rooms_and_reverb_estimates.py
"""

from roomforge import (
    MicrophoneSpec,
    RoomConfig,
    ScenarioConfig,
    SourceSpec,
    estimate_t60,
    required_rir_samples,
    validate_scenario,
)

# A 6 x 4.5 x 2.7 m living room. wall_beta holds one pressure reflection
# coefficient per wall (x0, x1, y0, y1, z0, z1); higher beta = more reflective.
room = RoomConfig(dims=(6.0, 4.5, 2.7), wall_beta=(0.85,) * 6)
print(f"room dims {room.dims}, beta {room.wall_beta[0]} everywhere")
print(f"Sabine T60 estimate: {estimate_t60(room):.3f} s")
print(f"RIR buffer this needs at {room.sample_rate} Hz: {required_rir_samples(room)} samples")

# Damping the walls shortens the tail; fully absorbing walls leave only the
# direct path.
for beta in (0.95, 0.9, 0.7, 0.4, 0.0):
    damped = RoomConfig(dims=room.dims, wall_beta=(beta,) * 6)
    print(f"  beta={beta:4.2f}  ->  T60 ~ {estimate_t60(damped):6.3f} s")

# A full scenario binds a speaker, noise sources, and microphones to rooms.
scenario = ScenarioConfig(
    mode="room",
    rooms=[room],
    speaker=SourceSpec(id="speaker", role="speaker", position=(2.2, 2.3, 1.5)),
    noise_sources=[
        SourceSpec(
            id="tv",
            role="noise",
            position=(5.2, 0.8, 0.9),
            inclusion_prob=0.8,
            gain_range=(0.2, 0.4),
            pool="household",
        )
    ],
    microphones=[MicrophoneSpec(id="mic0", position=(3.4, 2.1, 1.4))],
)
print("\nvalid scenario report:", validate_scenario(scenario))

# Break it: push the speaker through a wall and watch the report name the path.
scenario.speaker.position = (9.0, 2.3, 1.5)
print("\nbroken scenario report:")
print(validate_scenario(scenario))
