import math

import numpy as np
import pytest

from roomforge.geometry import RoomConfig
from roomforge.rir import (
    DegenerateGeometryError,
    ImpulseResponse,
    SINC_HALF_WIDTH,
    compute_rir,
    decay_time,
    energy_decay_curve,
    enumerate_images,
    place_impulse,
)

CUBE6 = dict(dims=(6.0, 6.0, 6.0))
SRC = (2.0, 2.0, 2.0)
MIC = (4.0, 2.0, 2.0)


def oracle_rir(room, src, mic, length, max_order):
    """Independent triple-loop image placement, scalar math only."""

    def sinc(t):
        return 1.0 if t == 0 else math.sin(math.pi * t) / (math.pi * t)

    lx, ly, lz = room.dims
    bx0, bx1, by0, by1, bz0, bz1 = room.wall_beta
    h = np.zeros(length)
    span = range(-(max_order + 1), max_order + 2)
    for n in span:
        for l in span:
            for m in span:
                for p in (0, 1):
                    for q in (0, 1):
                        for r in (0, 1):
                            order = (
                                abs(n - p) + abs(n) + abs(l - q) + abs(l) + abs(m - r) + abs(m)
                            )
                            if order > max_order:
                                continue
                            refl = (
                                bx0 ** abs(n - p) * bx1 ** abs(n)
                                * by0 ** abs(l - q) * by1 ** abs(l)
                                * bz0 ** abs(m - r) * bz1 ** abs(m)
                            )
                            if refl == 0.0:
                                continue
                            ix = (1 - 2 * p) * src[0] + 2 * n * lx
                            iy = (1 - 2 * q) * src[1] + 2 * l * ly
                            iz = (1 - 2 * r) * src[2] + 2 * m * lz
                            d = math.sqrt(
                                (ix - mic[0]) ** 2 + (iy - mic[1]) ** 2 + (iz - mic[2]) ** 2
                            )
                            a = refl / (4 * math.pi * d)
                            delay = d * room.sample_rate / room.speed_of_sound
                            k0 = max(math.ceil(delay - SINC_HALF_WIDTH), 0)
                            k1 = min(math.floor(delay + SINC_HALF_WIDTH), length - 1)
                            for k in range(k0, k1 + 1):
                                t = k - delay
                                h[k] += a * sinc(t) * (0.5 + 0.5 * math.cos(math.pi * t / SINC_HALF_WIDTH))
    return h


class TestEnumerateImages:
    def test_anechoic_direct_path_only(self):
        room = RoomConfig(wall_beta=(0.0,) * 6, **CUBE6)
        arrivals = enumerate_images(room, SRC, MIC, 3)
        assert len(arrivals) == 1
        a = arrivals[0]
        assert a.distance == pytest.approx(2.0)
        assert a.amplitude == pytest.approx(1 / (8 * math.pi), rel=1e-12)
        assert a.order == 0

    def test_first_order_seven_arrivals(self):
        room = RoomConfig(wall_beta=(0.9,) * 6, **CUBE6)
        arrivals = enumerate_images(room, SRC, MIC, 1)
        assert len(arrivals) == 7
        got = [a.distance for a in arrivals]
        expected = [2.0, math.sqrt(20), math.sqrt(20), 6.0, 6.0, math.sqrt(68), math.sqrt(68)]
        assert got == pytest.approx(expected, abs=1e-9)
        for a in arrivals:
            want = (0.9 ** a.order) / (4 * math.pi * a.distance)
            assert abs(a.amplitude - want) <= 1e-9

    def test_max_order_zero_single_arrival(self):
        room = RoomConfig(wall_beta=(0.9,) * 6, **CUBE6)
        arrivals = enumerate_images(room, SRC, MIC, 0)
        assert len(arrivals) == 1
        assert arrivals[0].distance == pytest.approx(2.0)

    def test_sorted_by_delay(self):
        room = RoomConfig(wall_beta=(0.7,) * 6, **CUBE6)
        arrivals = enumerate_images(room, SRC, MIC, 3)
        delays = [a.delay_samples for a in arrivals]
        assert delays == sorted(delays)

    def test_delay_matches_distance(self):
        room = RoomConfig(wall_beta=(0.7,) * 6, **CUBE6)
        for a in enumerate_images(room, SRC, MIC, 2):
            assert a.delay_samples == pytest.approx(a.distance * 16000 / 343.0, rel=1e-12)

    def test_src_equals_mic_raises(self):
        room = RoomConfig(wall_beta=(0.5,) * 6, **CUBE6)
        with pytest.raises(DegenerateGeometryError):
            enumerate_images(room, SRC, SRC, 1)

    def test_amplitudes_monotone_in_beta(self):
        # Match arrivals across beta values by (order, distance); each one's
        # amplitude must not decrease when every wall gets more reflective.
        room_lo = RoomConfig(wall_beta=(0.5,) * 6, **CUBE6)
        room_hi = RoomConfig(wall_beta=(0.8,) * 6, **CUBE6)
        lo = {(a.order, round(a.distance, 9)): a.amplitude for a in enumerate_images(room_lo, SRC, MIC, 2)}
        hi = {(a.order, round(a.distance, 9)): a.amplitude for a in enumerate_images(room_hi, SRC, MIC, 2)}
        assert set(lo) <= set(hi)
        for key, amp_lo in lo.items():
            assert hi[key] >= amp_lo - 1e-15

    def test_increasing_max_order_preserves_arrivals(self):
        room = RoomConfig(wall_beta=(0.6,) * 6, **CUBE6)
        small = enumerate_images(room, SRC, MIC, 1)
        big = enumerate_images(room, SRC, MIC, 2)
        big_keys = {(a.order, round(a.distance, 12), round(a.amplitude, 15)) for a in big}
        for a in small:
            assert (a.order, round(a.distance, 12), round(a.amplitude, 15)) in big_keys

    def test_first_arrival_is_direct_path(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            dims = rng.uniform(2.5, 8.0, size=3)
            src = rng.uniform(0.3, dims - 0.3)
            mic = rng.uniform(0.3, dims - 0.3)
            if np.linalg.norm(src - mic) < 0.05:
                continue
            room = RoomConfig(dims=tuple(dims), wall_beta=tuple(rng.uniform(0.1, 0.95, 6)))
            arrivals = enumerate_images(room, src, mic, 2)
            want = np.linalg.norm(src - mic) * room.sample_rate / room.speed_of_sound
            assert arrivals[0].delay_samples == pytest.approx(want, rel=1e-12)


class TestPlaceImpulse:
    def test_integer_delay_single_tap(self):
        buf = np.zeros(300)
        place_impulse(buf, 100.0, 0.5)
        assert buf[100] == pytest.approx(0.5, abs=1e-15)
        rest = np.delete(buf, 100)
        assert np.max(np.abs(rest)) < 1e-12

    def test_fractional_delay_tap_sum(self):
        buf = np.zeros(300)
        place_impulse(buf, 100.5, 0.5)
        assert buf.sum() == pytest.approx(0.5, rel=0.01)
        # symmetric pattern around 100.5
        k = np.arange(300)
        center = np.sum(k * np.abs(buf)) / np.sum(np.abs(buf))
        assert center == pytest.approx(100.5, abs=0.05)

    def test_additive(self):
        a = np.zeros(300)
        place_impulse(a, 120.25, 0.3)
        place_impulse(a, 120.25, 0.3)
        b = np.zeros(300)
        place_impulse(b, 120.25, 0.6)
        np.testing.assert_allclose(a, b, atol=1e-15)

    def test_out_of_buffer_taps_dropped(self):
        buf = np.zeros(50)
        place_impulse(buf, 45.0, 1.0)  # tail taps fall past the end
        assert np.isfinite(buf).all()
        assert buf[45] == pytest.approx(1.0)

    def test_negative_delay_rejected(self):
        with pytest.raises(ValueError):
            place_impulse(np.zeros(10), -1.0, 1.0)


class TestComputeRir:
    def test_anechoic_direct_pulse(self):
        room = RoomConfig(wall_beta=(0.0,) * 6, sample_rate=16000, **CUBE6)
        h = compute_rir(room, SRC, MIC, 2048)
        peak = int(np.argmax(np.abs(h.samples)))
        delay = 2.0 / 343.0 * 16000
        assert abs(peak - delay) <= 0.5 + 1e-9
        window = h.samples[peak - SINC_HALF_WIDTH : peak + SINC_HALF_WIDTH + 1]
        assert window.sum() == pytest.approx(1 / (8 * math.pi), rel=0.02)
        energy = h.samples**2
        assert window.sum() != 0
        assert energy[peak - SINC_HALF_WIDTH : peak + SINC_HALF_WIDTH + 1].sum() >= 0.99 * energy.sum()

    def test_first_order_pulse_groups(self):
        room = RoomConfig(wall_beta=(0.9,) * 6, sample_rate=16000, **CUBE6)
        h = compute_rir(room, SRC, MIC, 2048, max_order=1)
        arrivals = enumerate_images(room, SRC, MIC, 1)
        assert len(arrivals) == 7
        distinct_delays = sorted({round(a.delay_samples, 6) for a in arrivals})
        # Every expected pulse center carries local energy...
        for d in distinct_delays:
            lo, hi = int(d) - 2, int(d) + 3
            assert np.max(np.abs(h.samples[lo:hi])) > 1e-4
        # ...and outside all pulse neighborhoods the RIR is tiny.
        mask = np.ones(len(h.samples), dtype=bool)
        for d in distinct_delays:
            lo = max(int(d) - SINC_HALF_WIDTH - 1, 0)
            hi = min(int(d) + SINC_HALF_WIDTH + 2, len(mask))
            mask[lo:hi] = False
        assert np.max(np.abs(h.samples[mask])) < 1e-12

    def test_anechoic_reduces_to_place_impulse(self):
        room = RoomConfig(wall_beta=(0.0,) * 6, sample_rate=16000, **CUBE6)
        h = compute_rir(room, SRC, MIC, 2048)
        manual = np.zeros(2048)
        place_impulse(manual, 2.0 / 343.0 * 16000, 1 / (8 * math.pi))
        np.testing.assert_array_equal(h.samples, manual)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(3):
            dims = tuple(rng.uniform(2.5, 7.0, size=3))
            beta = tuple(rng.uniform(0.0, 0.95, size=6))
            room = RoomConfig(dims=dims, wall_beta=beta, sample_rate=8000)
            src = tuple(rng.uniform(0.3, np.asarray(dims) - 0.3))
            mic = tuple(rng.uniform(0.3, np.asarray(dims) - 0.3))
            max_order = int(rng.integers(0, 3))
            h = compute_rir(room, src, mic, 1024, max_order=max_order)
            want = oracle_rir(room, src, mic, 1024, max_order)
            assert np.max(np.abs(h.samples - want)) <= 1e-9

    def test_deterministic(self):
        room = RoomConfig(wall_beta=(0.8,) * 6, sample_rate=16000, **CUBE6)
        h1 = compute_rir(room, SRC, MIC, 1500)
        h2 = compute_rir(room, SRC, MIC, 1500)
        np.testing.assert_array_equal(h1.samples, h2.samples)

    def test_metadata(self, fast_room):
        h = compute_rir(fast_room, (1, 1, 1), (2, 2, 1), 800, source_id="s", mic_id="m")
        assert (h.source_id, h.mic_id) == ("s", "m")
        assert h.sample_rate == fast_room.sample_rate
        assert h.room_hash


class TestEnergyDecayCurve:
    def test_single_pulse(self):
        h = ImpulseResponse(samples=np.zeros(400), sample_rate=16000)
        h.samples[100] = 0.7
        edc = energy_decay_curve(h)
        assert edc[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(edc[:101] == pytest.approx(0.0, abs=1e-12))
        assert np.all(edc[101:] == pytest.approx(-120.0, abs=1e-9))

    def test_exponential_decay_crossing(self):
        n = 4000
        rng = np.random.default_rng(3)
        samples = 10 ** (-3 * np.arange(n) / n) * rng.standard_normal(n)
        edc = energy_decay_curve(ImpulseResponse(samples=samples, sample_rate=16000))
        t60 = decay_time(edc, 16000)
        assert t60 == pytest.approx(n / 16000, rel=0.10)

    def test_scale_invariant(self):
        rng = np.random.default_rng(5)
        samples = rng.standard_normal(512) * np.linspace(1, 0.01, 512)
        h1 = ImpulseResponse(samples=samples, sample_rate=16000)
        h2 = ImpulseResponse(samples=3.7 * samples, sample_rate=16000)
        np.testing.assert_allclose(energy_decay_curve(h1), energy_decay_curve(h2), atol=1e-9)

    def test_monotone_nonincreasing(self):
        rng = np.random.default_rng(11)
        samples = rng.standard_normal(1000) * np.exp(-np.arange(1000) / 200)
        edc = energy_decay_curve(ImpulseResponse(samples=samples, sample_rate=16000))
        assert np.all(np.diff(edc) <= 1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            energy_decay_curve(ImpulseResponse(samples=np.zeros(100), sample_rate=16000))
