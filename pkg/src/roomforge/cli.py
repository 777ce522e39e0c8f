"""Command-line front door: validate, rir, generate, preset, serve.

Exit codes: 0 success, 2 usage error, 3 validation failure, 4 I/O error,
5 generation completed with per-utterance failures. Log level comes from
ROOMFORGE_LOG (error|warn|info|debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .audio_io import write_wav, WavSpec
from .dataset import (
    EmptyCorpusError,
    OutputDirExistsError,
    discover_noise_pools,
    generate_dataset,
    ingest_corpus,
)
from .geometry import (
    RoomConfig,
    ScenarioConfig,
    estimate_t60,
    required_rir_samples,
    room_hash,
    scenario_hash,
    validate_scenario,
)
from .mixer import AudioClip
from .presets import PRESET_NAMES, load_preset
from .rir import compute_rir, energy_decay_curve, decay_time

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_GENERATION_FAILURES = 5

log = logging.getLogger("roomforge.cli")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("ROOMFORGE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _position(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z meters, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric x,y,z, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomforge",
        description="Room-acoustic noise augmentation for speech corpora.",
    )
    parser.add_argument("--version", action="version", version=f"roomforge {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_val = sub.add_parser("validate", help="check a scenario file and print the report")
    p_val.add_argument("--scenario", required=True, help="scenario JSON file")

    p_rir = sub.add_parser("rir", help="compute a room impulse response and write it as WAV")
    p_rir.add_argument("--room", required=True, help="room JSON file")
    p_rir.add_argument("--src", required=True, type=_position, help="source position x,y,z in meters")
    p_rir.add_argument("--mic", required=True, type=_position, help="microphone position x,y,z in meters")
    p_rir.add_argument("--out", required=True, help="output WAV path (JSON sidecar written next to it)")
    p_rir.add_argument("--seconds", type=float, default=None, help="force the RIR length in seconds")
    p_rir.add_argument("--max-order", type=int, default=None, help="cap the reflection order")

    p_gen = sub.add_parser("generate", help="render a noisy dataset from clean speech plus noise pools")
    p_gen.add_argument("--scenario", required=True, help="scenario JSON file")
    p_gen.add_argument("--clean", required=True, help="clean speech corpus directory")
    p_gen.add_argument(
        "--clean-layout",
        choices=("auto", "flat", "nested"),
        default="auto",
        help="corpus layout; nested derives speaker ids from the first directory level",
    )
    p_gen.add_argument("--noise-root", required=True, help="directory with one subdirectory per noise pool")
    p_gen.add_argument("--out", required=True, help="output dataset directory")
    p_gen.add_argument("--seed", type=int, default=0, help="master seed")
    p_gen.add_argument("--workers", type=int, default=1, help="parallel workers; 0 = auto")
    p_gen.add_argument("--overwrite", action="store_true", help="replace an existing output directory")

    p_pre = sub.add_parser("preset", help="write a shipped scenario preset as JSON")
    p_pre.add_argument("name", choices=PRESET_NAMES)
    p_pre.add_argument("--out", default=None, help="output path (default <name>.scenario.json)")

    p_srv = sub.add_parser("serve", help="run the HTTP service and UI")
    p_srv.add_argument("--port", type=int, default=8080)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--ui-dir", default=None, help="static UI bundle directory")

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse an argv into a command; exits with code 2 on usage errors."""
    return build_parser().parse_args(argv)


def _load_scenario(path: str) -> ScenarioConfig:
    return ScenarioConfig.from_json(Path(path).read_text())


def _cmd_validate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario)
    report = validate_scenario(scenario)
    print(report)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def _cmd_rir(args: argparse.Namespace) -> int:
    room = RoomConfig.from_dict(json.loads(Path(args.room).read_text()))
    t60 = estimate_t60(room)
    length = required_rir_samples(room, args.seconds)
    h = compute_rir(room, args.src, args.mic, length, max_order=args.max_order)
    out = Path(args.out)
    write_wav(out, AudioClip(h.samples, room.sample_rate, id=out.stem), WavSpec(room.sample_rate))
    edc = energy_decay_curve(h)
    sidecar = {
        "room_hash": h.room_hash,
        "src": list(args.src),
        "mic": list(args.mic),
        "fs": room.sample_rate,
        "t60_estimate": t60,
        "t60_empirical": decay_time(edc, room.sample_rate),
        "n_samples": len(h.samples),
    }
    out.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")
    print(f"wrote {out} ({len(h.samples)} samples at {room.sample_rate} Hz)")
    print(f"t60_estimate: {t60:.5f} s")
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.scenario)
    report = validate_scenario(scenario)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_VALIDATION

    clean_root = Path(args.clean)
    layout = args.clean_layout
    if layout == "auto":
        layout = "flat" if any(clean_root.glob("*.wav")) else "nested"
    clean = ingest_corpus(clean_root, layout=layout)
    pool_names = sorted({s.pool for s in scenario.noise_sources})
    pools = discover_noise_pools(args.noise_root, pool_names)

    result = generate_dataset(
        scenario,
        clean,
        pools,
        args.out,
        master_seed=args.seed,
        workers=args.workers,
        overwrite=args.overwrite,
    )
    counts = result.manifest.header["counts"]
    print(f"scenario_hash: {result.manifest.header['scenario_hash']}")
    print(f"master_seed: {args.seed}")
    print(f"rendered: {counts['rendered']}/{counts['total']} (failed: {counts['failed']})")
    print(f"manifest_hash: {result.manifest.content_hash()}")
    for utt, msg in result.failures[:10]:
        print(f"  failed {utt}: {msg}", file=sys.stderr)
    return EXIT_GENERATION_FAILURES if result.failures else EXIT_OK


def _cmd_preset(args: argparse.Namespace) -> int:
    scenario = load_preset(args.name)
    out = Path(args.out) if args.out else Path(f"{args.name}.scenario.json")
    out.write_text(scenario.to_json() + "\n")
    print(f"wrote {out} (scenario_hash {scenario_hash(scenario)})")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def execute(args: argparse.Namespace) -> int:
    """Run a parsed command, mapping failures to stable exit codes."""
    handlers = {
        "validate": _cmd_validate,
        "rir": _cmd_rir,
        "generate": _cmd_generate,
        "preset": _cmd_preset,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.verb](args)
    except (OSError, OutputDirExistsError, EmptyCorpusError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = parse_args(argv)
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
