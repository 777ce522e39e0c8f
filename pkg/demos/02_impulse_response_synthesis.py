"""Image-source impulse responses and energy decay curves.

Enumerates mirror-image arrivals for a small room, renders the impulse
response, and reads an empirical T60 off the Schroeder decay curve. Writes
the RIR as a WAV next to this script's output directory.

Run: python demos/02_impulse_response_synthesis.py
"""

import tempfile
from pathlib import Path

import numpy as np

from roomforge import (
    AudioClip,
    RoomConfig,
    WavSpec,
    compute_rir,
    energy_decay_curve,
    enumerate_images,
    estimate_t60,
    required_rir_samples,
    write_wav,
)
from roomforge.rir import decay_time

room = RoomConfig(dims=(6.0, 6.0, 6.0), wall_beta=(0.9,) * 6)
src, mic = (2.0, 2.0, 2.0), (4.0, 2.0, 2.0)

# First-order arrivals: the direct path plus one mirror image per wall.
print("arrivals up to one bounce:")
for a in enumerate_images(room, src, mic, max_order=1):
    print(f"  order {a.order}  {a.distance:7.3f} m  amp {a.amplitude:.6f}  delay {a.delay_samples:8.2f} smp")

length = required_rir_samples(room)
h = compute_rir(room, src, mic, length)
print(f"\nRIR: {length} samples at {room.sample_rate} Hz, peak {np.max(np.abs(h.samples)):.5f}")

edc = energy_decay_curve(h)
print(f"Sabine estimate: {estimate_t60(room):.3f} s")
print(f"empirical T60 (EDC -60 dB crossing): {decay_time(edc, room.sample_rate)} s")

out_dir = Path(tempfile.mkdtemp(prefix="roomforge_demo_"))
wav_path = out_dir / "rir_6m_cube_beta09.wav"
write_wav(wav_path, AudioClip(h.samples, room.sample_rate, id=wav_path.stem), WavSpec(room.sample_rate))
print(f"\nwrote {wav_path}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    t = np.arange(length) / room.sample_rate
    ax1.plot(t, h.samples, lw=0.5)
    ax1.set_ylabel("h(t)")
    ax2.plot(t, edc)
    ax2.axhline(-60, color="r", ls="--", lw=0.8)
    ax2.set_ylabel("EDC (dB)")
    ax2.set_xlabel("time (s)")
    fig.savefig(out_dir / "rir_and_edc.png", dpi=120)
    print(f"wrote {out_dir / 'rir_and_edc.png'}")
except ImportError:
    pass
