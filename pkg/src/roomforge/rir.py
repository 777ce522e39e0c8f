"""Image-source room impulse response synthesis.

Wall reflections are modeled as a lattice of mirror images of the source; each
image contributes a delayed, attenuated impulse rendered with a Hann-windowed
sinc so fractional sample delays land between sample points. Amplitudes follow
the free-field 1/(4*pi*d) spreading law multiplied by one reflection
coefficient per wall bounce. No air absorption or post-filtering is applied,
which keeps every sample analytically checkable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import RoomConfig, room_hash

SINC_HALF_WIDTH = 40  # samples on either side of the impulse center (81 taps)


class DegenerateGeometryError(ValueError):
    """Source and microphone coincide (or geometry is otherwise singular)."""


@dataclass(frozen=True)
class ImageArrival:
    """One mirror-image contribution to an impulse response."""

    distance: float  # meters
    amplitude: float  # product of wall reflections over 4*pi*distance
    delay_samples: float  # distance * sample_rate / speed_of_sound
    order: int  # total number of wall bounces on the path


@dataclass
class ImpulseResponse:
    samples: np.ndarray
    sample_rate: int
    source_id: str = "src"
    mic_id: str = "mic"
    room_hash: str = ""

    def __len__(self) -> int:
        return len(self.samples)


def _check_geometry(src: Sequence[float], mic: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    src = np.asarray(src, dtype=float)
    mic = np.asarray(mic, dtype=float)
    if np.linalg.norm(src - mic) < 1e-12:
        raise DegenerateGeometryError("source and microphone coincide")
    return src, mic


def _axis_tables(
    room: RoomConfig, src: np.ndarray, mic: np.ndarray, nx: np.ndarray, ny: np.ndarray, nz: np.ndarray
) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per-axis (squared distance, reflection product, bounce count) tables.

    Along each axis the image coordinate is ``(1 - 2p) * xs + 2n * L`` with
    p in {0, 1} and integer n; the wall at coordinate 0 is hit ``|n - p|``
    times and the opposite wall ``|n|`` times. Each table has shape
    (len(n), 2) indexed by (n, p), so the full lattice is an outer broadcast
    of three small tables rather than a materialized grid.
    """
    beta = np.asarray(room.wall_beta, dtype=float).reshape(3, 2)
    p_range = np.array([0, 1])
    tables = []
    for axis, n_vals in enumerate((nx, ny, nz)):
        n = np.asarray(n_vals)[:, None]
        p = p_range[None, :]
        coord = (1 - 2 * p) * src[axis] + 2 * n * room.dims[axis]
        dist_sq = (coord - mic[axis]) ** 2
        hits_near = np.abs(n - p)
        hits_far = np.abs(n) * np.ones_like(p)
        # 0^0 == 1 keeps unreflected paths alive even for fully absorbing walls.
        refl = beta[axis, 0] ** hits_near * beta[axis, 1] ** hits_far
        tables.append((dist_sq, refl, hits_near + hits_far))
    return tables


def _lattice_axes(
    room: RoomConfig,
    src: np.ndarray,
    mic: np.ndarray,
    nx: np.ndarray,
    ny: np.ndarray,
    nz: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Distances, amplitudes, delays and orders for one block of the lattice.

    Rows are emitted in fixed (n, l, m, p, q, r) nested-loop order so
    downstream sums are reproducible.
    """
    (dx, rx, ox), (dy, ry, oy), (dz, rz, oz) = _axis_tables(room, src, mic, nx, ny, nz)

    dist = np.sqrt(
        dx[:, None, None, :, None, None]
        + dy[None, :, None, None, :, None]
        + dz[None, None, :, None, None, :]
    ).ravel()
    refl = (
        rx[:, None, None, :, None, None]
        * ry[None, :, None, None, :, None]
        * rz[None, None, :, None, None, :]
    ).ravel()
    order = (
        ox[:, None, None, :, None, None]
        + oy[None, :, None, None, :, None]
        + oz[None, None, :, None, None, :]
    ).ravel()
    amp = refl / (4.0 * math.pi * dist)
    delay = dist * room.sample_rate / room.speed_of_sound
    return dist, amp, delay, order


def _image_lattice(
    room: RoomConfig,
    src: Sequence[float],
    mic: Sequence[float],
    n_range: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    src, mic = _check_geometry(src, mic)
    return _lattice_axes(room, src, mic, n_range, n_range, n_range)


def enumerate_images(
    room: RoomConfig,
    src: Sequence[float],
    mic: Sequence[float],
    max_order: int,
) -> list[ImageArrival]:
    """All image arrivals with at most ``max_order`` wall bounces.

    Arrivals with zero amplitude (a fully absorbing wall on the path) are
    omitted. The result is sorted by delay, ties resolved by lattice order.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    radius = max_order + 1
    n_range = np.arange(-radius, radius + 1)
    dist, amp, delay, order = _image_lattice(room, src, mic, n_range)

    keep = (order <= max_order) & (amp > 0.0)
    idx = np.flatnonzero(keep)
    idx = idx[np.argsort(delay[idx], kind="stable")]
    return [
        ImageArrival(
            distance=float(dist[i]),
            amplitude=float(amp[i]),
            delay_samples=float(delay[i]),
            order=int(order[i]),
        )
        for i in idx
    ]


def place_impulse(buffer: np.ndarray, delay_samples: float, amplitude: float) -> np.ndarray:
    """Add a Hann-windowed sinc impulse centered at a fractional delay.

    Taps span +-SINC_HALF_WIDTH samples around the center; taps falling
    outside the buffer are dropped. At integer delays this reduces to a
    single nonzero tap of exactly ``amplitude``. Mutates and returns
    ``buffer``.
    """
    if delay_samples < 0:
        raise ValueError("delay must be >= 0 samples")
    _place_impulses_batch(buffer, np.array([float(delay_samples)]), np.array([float(amplitude)]))
    return buffer


def default_max_lattice_radius(room: RoomConfig, length: int) -> int:
    """Lattice radius guaranteeing every image audible within ``length`` samples."""
    seconds = length / room.sample_rate
    return math.ceil(room.speed_of_sound * seconds / (2.0 * min(room.dims))) + 1


def _axis_lattice_radii(room: RoomConfig, length: int, max_order: Optional[int]) -> list[int]:
    """Per-axis lattice bounds covering every audible (and order-legal) image.

    Along one axis the image pattern repeats every 2*L, so an image with
    |n| > c*T/(2*L) + 1 cannot arrive inside the buffer no matter what the
    other axes contribute. With an order cap, |n| alone forces at least
    2*|n| - 1 bounces, bounding |n| <= K//2 + 1.
    """
    seconds = length / room.sample_rate
    radii = []
    for dim in room.dims:
        radius = math.ceil(room.speed_of_sound * seconds / (2.0 * dim)) + 1
        if max_order is not None:
            radius = min(radius, max_order // 2 + 1, max_order + 1)
        radii.append(radius)
    return radii


def compute_rir(
    room: RoomConfig,
    src: Sequence[float],
    mic: Sequence[float],
    length: int,
    max_order: Optional[int] = None,
    source_id: str = "src",
    mic_id: str = "mic",
) -> ImpulseResponse:
    """Render the room impulse response between a source and a microphone.

    When ``max_order`` is None the image lattice is sized so that the latest
    included image delay exceeds the buffer; otherwise enumeration stops at
    that reflection order. Deterministic for identical inputs.
    """
    if length <= 0:
        raise ValueError("RIR length must be > 0")

    amp, delay = _reachable_images(room, src, mic, length, max_order=max_order)
    buf = np.zeros(length, dtype=np.float64)
    _place_impulses_batch(buf, delay, amp)

    return ImpulseResponse(
        samples=buf,
        sample_rate=room.sample_rate,
        source_id=source_id,
        mic_id=mic_id,
        room_hash=room_hash(room),
    )


def _reachable_images(
    room: RoomConfig,
    src: Sequence[float],
    mic: Sequence[float],
    length: int,
    max_order: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes and delays of every image audible within ``length`` samples.

    The lattice is walked in slabs along the first axis so memory stays
    bounded for long buffers; each slab is filtered to in-reach, nonzero
    arrivals (and to ``max_order`` bounces when given) before accumulation.
    Output is sorted by delay.
    """
    src_arr, mic_arr = _check_geometry(src, mic)
    rx, ry, rz = _axis_lattice_radii(room, length, max_order)
    x_range = np.arange(-rx, rx + 1)
    y_range = np.arange(-ry, ry + 1)
    z_range = np.arange(-rz, rz + 1)
    max_delay = length - 1 + SINC_HALF_WIDTH

    # Walk the first axis in slab batches sized to ~2M lattice rows.
    rows_per_slab = 8 * len(y_range) * len(z_range)
    slabs_per_batch = max(1, 2_000_000 // rows_per_slab)

    amps: list[np.ndarray] = []
    delays: list[np.ndarray] = []
    for start in range(0, len(x_range), slabs_per_batch):
        nx = x_range[start : start + slabs_per_batch]
        _dist, amp, delay, order = _lattice_axes(room, src_arr, mic_arr, nx, y_range, z_range)
        keep = (amp > 0.0) & (delay <= max_delay)
        if max_order is not None:
            keep &= order <= max_order
        amps.append(amp[keep])
        delays.append(delay[keep])
    amp = np.concatenate(amps)
    delay = np.concatenate(delays)
    sort = np.argsort(delay, kind="stable")
    return amp[sort], delay[sort]


_KERNEL_OFFSETS = np.arange(2 * SINC_HALF_WIDTH + 1)
_HANN_COS = np.cos(np.pi * _KERNEL_OFFSETS / SINC_HALF_WIDTH)
_HANN_SIN = np.sin(np.pi * _KERNEL_OFFSETS / SINC_HALF_WIDTH)


def _place_impulses_batch(buffer: np.ndarray, delays: np.ndarray, amplitudes: np.ndarray) -> None:
    """Add one windowed-sinc kernel per (delay, amplitude) pair.

    Trig is hoisted to one sin/cos pair per arrival via angle addition:
    sin(pi*(k - d)) = -(-1)^k * sin(pi*d) for integer k, and the Hann term
    cos(pi*(k - d)/H) expands against a fixed per-offset table. The kernel
    is then accumulated column by column over cache-resident vectors; only
    the last column can spill outside the +-H window (fractional delays
    yield 80 in-window taps, integer delays 81).
    """
    if len(delays) == 0:
        return
    n = len(buffer)
    first = np.ceil(delays - SINC_HALF_WIDTH).astype(np.int64)
    t0 = first - delays  # in [-H, -H + 1)

    # -(-1)^k at the first column; the sign then alternates per column.
    base_sign = np.where(first % 2 == 1, 1.0, -1.0)
    base_num = base_sign * np.sin(np.pi * delays)
    theta0 = np.pi * t0 / SINC_HALF_WIDTH
    cos0 = np.cos(theta0)
    sin0 = np.sin(theta0)

    total = np.zeros(n + 1)  # one guard bucket for clipped indices
    n_cols = len(_KERNEL_OFFSETS)
    for j in range(n_cols):
        t = t0 + j
        numerator = base_num if j % 2 == 0 else -base_num
        with np.errstate(divide="ignore", invalid="ignore"):
            sinc = numerator / (np.pi * t)
        if j == SINC_HALF_WIDTH:
            sinc = np.where(t == 0.0, 1.0, sinc)
        window = 0.5 + (0.5 * _HANN_COS[j]) * cos0 - (0.5 * _HANN_SIN[j]) * sin0
        taps = amplitudes * sinc * window
        k = first + j
        if j == n_cols - 1:
            taps = np.where(np.abs(t) <= SINC_HALF_WIDTH, taps, 0.0)
        oob = (k < 0) | (k >= n)
        if oob.any():
            taps = np.where(oob, 0.0, taps)
            k = np.where(oob, n, k)  # route to the guard bucket
        total += np.bincount(k, weights=taps, minlength=n + 1)
    buffer += total[:n]


def energy_decay_curve(h: ImpulseResponse) -> np.ndarray:
    """Backward-integrated energy decay in dB, clamped at -120 dB.

    EDC[t] = 10*log10(sum_{tau>=t} h^2 / sum h^2); starts at 0 dB and is
    monotone nonincreasing.
    """
    energy = np.asarray(h.samples, dtype=np.float64) ** 2
    total = energy.sum()
    if total <= 0.0:
        raise ValueError("energy decay curve undefined for an all-zero RIR")
    tail = np.cumsum(energy[::-1])[::-1] / total
    floor = 10.0 ** (-120.0 / 10.0)
    return 10.0 * np.log10(np.maximum(tail, floor))


def decay_time(edc_db: np.ndarray, sample_rate: int, drop_db: float = 60.0) -> Optional[float]:
    """Seconds until the decay curve first crosses ``-drop_db``; None if it never does."""
    below = np.flatnonzero(edc_db <= -drop_db)
    if len(below) == 0:
        return None
    return float(below[0]) / sample_rate
