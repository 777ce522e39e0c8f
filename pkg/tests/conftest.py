import numpy as np
import pytest

from roomforge.audio_io import write_wav, WavSpec
from roomforge.geometry import MicrophoneSpec, RoomConfig, ScenarioConfig, SourceSpec
from roomforge.mixer import AudioClip

_ACCEPTANCE_RESULTS = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__ == "test_acceptance":
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE_RESULTS.append((doc, rep.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {name}")


def tone(freq: float, seconds: float, rate: int = 16000, amp: float = 0.3, phase: float = 0.0):
    t = np.arange(int(round(seconds * rate))) / rate
    return amp * np.sin(2 * np.pi * freq * t + phase)


def noise_burst(seconds: float, rate: int = 16000, amp: float = 0.2, seed: int = 0):
    rng = np.random.default_rng(seed)
    return amp * rng.standard_normal(int(round(seconds * rate))).clip(-3, 3) / 3


def write_clip(path, samples, rate: int = 16000, bit_depth: str = "float32"):
    path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(path, AudioClip(np.asarray(samples, dtype=np.float64), rate), WavSpec(rate, bit_depth))
    return path


def build_clean_corpus(root, speakers=("spk_a", "spk_b"), utts_per_speaker=3, seconds=0.4, rate=16000):
    """Nested-by-speaker corpus of distinct tones, with transcripts."""
    k = 0
    for spk in speakers:
        for u in range(utts_per_speaker):
            path = root / spk / f"utt{u:03d}.wav"
            write_clip(path, tone(220 + 60 * k, seconds, rate), rate)
            path.with_suffix(".txt").write_text(f"sample text {k}\n")
            k += 1
    return root


def build_noise_root(root, pools=("generic",), clips_per_pool=3, seconds=0.7, rate=16000):
    """Flat pools of noise bursts under one root, one subdirectory per pool."""
    seed = 100
    for pool in pools:
        for i in range(clips_per_pool):
            write_clip(root / pool / f"{pool}_{i:02d}.wav", noise_burst(seconds, rate, seed=seed), rate)
            seed += 1
    return root


def build_speaker_noise_pool(root, pool="competing_speakers", speakers=("spk_a", "spk_b", "spk_c"), rate=16000):
    """Nested-by-speaker noise pool, for cocktail-style exclusion tests."""
    seed = 500
    for spk in speakers:
        for i in range(2):
            write_clip(root / pool / spk / f"bg{i}.wav", noise_burst(0.6, rate, seed=seed), rate)
            seed += 1
    return root


@pytest.fixture
def fast_room():
    # Small, well damped: T60 ~ 0.11 s so RIR buffers stay short in tests.
    return RoomConfig(dims=(4.0, 3.0, 2.5), wall_beta=(0.5,) * 6)


@pytest.fixture
def fast_scenario(fast_room):
    return ScenarioConfig(
        mode="room",
        rooms=[fast_room],
        speaker=SourceSpec(id="speaker", role="speaker", position=(1.0, 1.2, 1.5)),
        noise_sources=[
            SourceSpec(
                id="n1",
                role="noise",
                position=(3.0, 2.0, 1.0),
                inclusion_prob=1.0,
                gain_range=(0.2, 0.4),
                pool="generic",
            )
        ],
        microphones=[MicrophoneSpec(id="mic0", position=(2.0, 1.5, 1.2))],
    )


@pytest.fixture
def no_room_scenario():
    return ScenarioConfig(
        mode="no_room",
        rooms=[],
        speaker=SourceSpec(id="speaker", role="speaker", position=(1, 1, 1)),
        noise_sources=[
            SourceSpec(
                id="n1",
                role="noise",
                position=(2, 2, 1),
                inclusion_prob=1.0,
                gain_range=(0.3, 0.3),
                pool="generic",
            )
        ],
        microphones=[],
    )
