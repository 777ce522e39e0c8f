import numpy as np
import pytest

from conftest import noise_burst, tone
from roomforge.geometry import room_hash
from roomforge.mixer import (
    AudioClip,
    RirCache,
    UnusableClipError,
    convolve,
    fit_length,
    render_utterance,
    rms,
    scale_noise,
)


def clip(samples, rate=16000, id="c", speaker_id=None):
    return AudioClip(np.asarray(samples, dtype=np.float64), rate, id, speaker_id)


class TestConvolve:
    def test_identity_kernel(self):
        x = np.array([0.1, -0.4, 0.9, 0.0, 0.3])
        np.testing.assert_allclose(convolve(x, np.array([1.0])), x, atol=1e-15)

    def test_hand_example(self):
        np.testing.assert_allclose(
            convolve(np.array([1.0, 2, 3]), np.array([1.0, 1])), [1, 3, 5, 3], atol=1e-12
        )

    def test_matches_direct_oracle(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, 1000)
        h = rng.uniform(-1, 1, 257)
        got = convolve(x, h)
        want = np.convolve(x, h)
        assert len(got) == 1000 + 257 - 1
        assert np.max(np.abs(got - want)) / np.max(np.abs(want)) <= 1e-6

    def test_linearity(self):
        rng = np.random.default_rng(1)
        x = rng.uniform(-1, 1, 400)
        h = rng.uniform(-1, 1, 64)
        lhs = convolve(2.5 * x, h)
        rhs = 2.5 * convolve(x, h)
        assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) <= 1e-9

    def test_commutative(self):
        rng = np.random.default_rng(2)
        x = rng.uniform(-1, 1, 300)
        h = rng.uniform(-1, 1, 80)
        a = convolve(x, h)
        b = convolve(h, x)
        assert np.max(np.abs(a - b)) / np.max(np.abs(a)) <= 1e-9

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convolve(np.array([]), np.array([1.0]))


class TestRms:
    def test_constant(self):
        assert rms(np.full(100, 0.5)) == pytest.approx(0.5, rel=1e-12)

    def test_hand_value(self):
        assert rms(np.array([3.0, -4.0])) == pytest.approx(np.sqrt(12.5), rel=1e-12)

    def test_zeros(self):
        assert rms(np.zeros(10)) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            rms(np.array([]))


class TestScaleNoise:
    def test_scale_factor(self):
        noise = clip(np.full(50, 0.5))
        out = scale_noise(noise, speaker_rms=0.1, g=0.3)
        np.testing.assert_allclose(out.samples, noise.samples * 0.06, rtol=1e-12)

    def test_rms_target_met(self):
        noise = clip(noise_burst(0.2, seed=9))
        out = scale_noise(noise, speaker_rms=0.17, g=0.35)
        assert rms(out.samples) == pytest.approx(0.35 * 0.17, rel=1e-9)

    def test_zero_gain(self):
        out = scale_noise(clip(np.ones(10)), speaker_rms=0.5, g=0.0)
        assert np.all(out.samples == 0)

    def test_silent_noise_rejected(self):
        with pytest.raises(UnusableClipError):
            scale_noise(clip(np.zeros(10)), speaker_rms=0.5, g=0.3)


class TestFitLength:
    def test_equal_length_untouched_no_rng(self):
        rng = np.random.default_rng(0)
        before = rng.bit_generator.state
        x = clip(np.arange(100, dtype=float))
        out = fit_length(x, 100, rng)
        assert out is x
        assert rng.bit_generator.state == before

    def test_long_clip_window_deterministic(self):
        x = clip(np.arange(400, dtype=float))
        a = fit_length(x, 200, np.random.default_rng(5)).samples
        b = fit_length(x, 200, np.random.default_rng(5)).samples
        np.testing.assert_array_equal(a, b)
        assert len(a) == 200
        # contiguous window of the source
        start = int(a[0])
        np.testing.assert_array_equal(a, np.arange(start, start + 200, dtype=float))

    def test_seeds_can_differ(self):
        x = clip(np.arange(4000, dtype=float))
        outs = {fit_length(x, 100, np.random.default_rng(s)).samples[0] for s in range(20)}
        assert len(outs) > 1

    def test_short_clip_tiled_exact_length_and_bounded(self):
        src = noise_burst(0.1, seed=4)  # a third of the target below
        x = clip(src)
        out = fit_length(x, len(src) * 3, np.random.default_rng(0))
        assert len(out.samples) == len(src) * 3
        assert np.max(np.abs(out.samples)) <= np.max(np.abs(src)) + 1e-15


class TestRenderUtterance:
    def _pools(self, rate=16000):
        return {
            "generic": [
                clip(noise_burst(0.5, rate, seed=21), rate, "g0"),
                clip(noise_burst(0.5, rate, seed=22), rate, "g1"),
            ]
        }

    def test_no_noise_drawn_equals_speaker_convolution(self, fast_scenario):
        fast_scenario.noise_sources[0].inclusion_prob = 0.0
        cache = RirCache().build(fast_scenario)
        speech = clip(tone(440, 0.3), id="utt")
        outs, recipe = render_utterance(fast_scenario, speech, self._pools(), cache, seed=7)
        assert recipe.entries == []
        rh = room_hash(fast_scenario.rooms[0])
        want = convolve(speech.samples, cache.get(rh, "speaker", "mic0").samples)
        np.testing.assert_array_equal(outs[0].samples, want)

    def test_no_room_additive_rms_ratio(self, no_room_scenario):
        speech = clip(tone(300, 0.4, amp=0.3), id="utt")
        outs, recipe = render_utterance(no_room_scenario, speech, self._pools(), None, seed=3)
        assert len(outs) == 1
        assert len(outs[0].samples) == len(speech.samples)
        delta = outs[0].samples - speech.samples
        assert rms(delta) == pytest.approx(0.3 * rms(speech.samples), rel=1e-6)
        assert recipe.room_index is None
        assert recipe.entries[0].gain == pytest.approx(0.3)

    def test_bitwise_deterministic(self, fast_scenario):
        cache = RirCache().build(fast_scenario)
        speech = clip(tone(500, 0.25), id="utt")
        outs1, rec1 = render_utterance(fast_scenario, speech, self._pools(), cache, seed=99)
        outs2, rec2 = render_utterance(fast_scenario, speech, self._pools(), cache, seed=99)
        np.testing.assert_array_equal(outs1[0].samples, outs2[0].samples)
        assert rec1.to_dict() == rec2.to_dict()

    def test_gains_within_configured_range(self, fast_scenario):
        cache = RirCache().build(fast_scenario)
        speech = clip(tone(500, 0.2), id="utt")
        for seed in range(30):
            _, recipe = render_utterance(fast_scenario, speech, self._pools(), cache, seed)
            for entry in recipe.entries:
                assert 0.2 <= entry.gain <= 0.4

    def test_inclusion_rate_matches_probability(self, no_room_scenario):
        no_room_scenario.noise_sources[0].inclusion_prob = 0.3
        pools = self._pools()
        speech = clip(tone(250, 0.02), id="utt")  # tiny clip keeps this fast
        hits = 0
        n = 3000
        for seed in range(n):
            _, recipe = render_utterance(no_room_scenario, speech, pools, None, seed)
            hits += bool(recipe.entries)
        assert 0.27 <= hits / n <= 0.33

    def test_peak_limited_and_recorded(self, no_room_scenario):
        no_room_scenario.noise_sources[0].gain_range = (0.4, 0.4)
        speech = clip(tone(120, 0.3, amp=0.999), id="utt")
        outs, recipe = render_utterance(no_room_scenario, speech, self._pools(), None, seed=1)
        assert np.max(np.abs(outs[0].samples)) <= 0.99 + 1e-12
        assert recipe.limiter_factor < 1.0
        assert np.isfinite(outs[0].samples).all()

    def test_sample_rate_mismatch_rejected(self, no_room_scenario):
        speech = clip(tone(300, 0.2, rate=8000), rate=8000, id="utt")
        with pytest.raises(ValueError, match="sample-rate"):
            render_utterance(no_room_scenario, speech, self._pools(), None, seed=0)

    def test_silent_pool_rejected(self, no_room_scenario):
        pools = {"generic": [clip(np.zeros(1000), id="quiet")]}
        speech = clip(tone(300, 0.2), id="utt")
        with pytest.raises(UnusableClipError):
            render_utterance(no_room_scenario, speech, pools, None, seed=0)

    def test_speaker_exclusion(self, no_room_scenario):
        no_room_scenario.exclude_clean_speaker = True
        pools = {
            "generic": [
                clip(noise_burst(0.3, seed=31), id="a0", speaker_id="spk_a"),
                clip(noise_burst(0.3, seed=32), id="b0", speaker_id="spk_b"),
            ]
        }
        speech = clip(tone(260, 0.2), id="utt", speaker_id="spk_a")
        for seed in range(25):
            _, recipe = render_utterance(no_room_scenario, speech, pools, None, seed)
            for entry in recipe.entries:
                assert entry.clip_id == "b0"

    def test_multi_room_selection_recorded(self, fast_scenario, fast_room):
        from dataclasses import replace

        second = replace(fast_room, wall_beta=(0.3,) * 6)
        fast_scenario.rooms = [fast_room, second]
        cache = RirCache().build(fast_scenario)
        speech = clip(tone(500, 0.2), id="utt")
        seen = set()
        for seed in range(40):
            _, recipe = render_utterance(fast_scenario, speech, self._pools(), cache, seed)
            seen.add(recipe.room_index)
        assert seen == {0, 1}


class TestRirCache:
    def test_builds_all_pairs(self, fast_scenario):
        cache = RirCache().build(fast_scenario)
        # 1 room x (speaker + 1 noise) x 1 mic
        assert len(cache) == 2
        rh = room_hash(fast_scenario.rooms[0])
        assert cache.get(rh, "speaker", "mic0").samples.any()

    def test_missing_key_raises(self):
        with pytest.raises(KeyError):
            RirCache().get("nope", "speaker", "mic0")
