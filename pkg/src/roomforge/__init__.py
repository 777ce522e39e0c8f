"""roomforge: room-acoustic noise augmentation for speech corpora.

Simulates shoebox rooms with the image-source method, mixes clean speech with
probabilistically included noise sources at controlled RMS gains, and writes
fully reproducible noisy datasets with per-utterance provenance.
"""

__version__ = "0.1.0"

from .geometry import (
    MicrophoneSpec,
    RoomConfig,
    ScenarioConfig,
    SourceSpec,
    ValidationReport,
    estimate_t60,
    required_rir_samples,
    room_hash,
    scenario_hash,
    validate_scenario,
)
from .rir import (
    ImageArrival,
    ImpulseResponse,
    compute_rir,
    energy_decay_curve,
    enumerate_images,
    place_impulse,
)
from .mixer import (
    AudioClip,
    MixRecipe,
    RirCache,
    convolve,
    fit_length,
    render_utterance,
    rms,
    scale_noise,
)
from .audio_io import WavSpec, read_wav, resample, write_wav
from .dataset import (
    CorpusManifest,
    DatasetManifest,
    SplitSpec,
    UtteranceRecord,
    derive_seed,
    exclude_speaker,
    generate_dataset,
    ingest_corpus,
    split_corpus,
)
from .presets import load_preset

__all__ = [
    "__version__",
    "AudioClip",
    "CorpusManifest",
    "DatasetManifest",
    "ImageArrival",
    "ImpulseResponse",
    "MicrophoneSpec",
    "MixRecipe",
    "RirCache",
    "RoomConfig",
    "ScenarioConfig",
    "SourceSpec",
    "SplitSpec",
    "UtteranceRecord",
    "ValidationReport",
    "WavSpec",
    "compute_rir",
    "convolve",
    "derive_seed",
    "energy_decay_curve",
    "enumerate_images",
    "estimate_t60",
    "exclude_speaker",
    "fit_length",
    "generate_dataset",
    "ingest_corpus",
    "load_preset",
    "place_impulse",
    "read_wav",
    "render_utterance",
    "required_rir_samples",
    "resample",
    "rms",
    "room_hash",
    "scale_noise",
    "scenario_hash",
    "split_corpus",
    "validate_scenario",
    "write_wav",
]
