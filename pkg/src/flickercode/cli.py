"""Command-line entry point: ``flickercode {encode,decode,simulate,bench,quality,fixtures}``.

Exit codes: 0 success, 1 the payload could not be decoded, 2 an input frame
store is invalid, 3 bad configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .config import RunConfig, load_config, load_profile, load_profiles
from .decoder import RecordingDecodeFailure, decode_recording
from .ecc import rs_encode
from .encoder import HEIGHT, WIDTH, build_data_frame, encode_video, upsample_sample_and_hold
from .errors import (
    ConfigError,
    DecodeFailure,
    DimensionMismatch,
    EpochTooShort,
    InvalidStore,
    UnsupportedRate,
)
from .fixtures import FIXTURE_KINDS, make_fixture
from .framestore import FrameStore, atomic_write_bytes, atomic_write_json, write_store
from .channel import simulate
from .metrics import quality_report, run_bench

EXIT_OK = 0
EXIT_DECODE_FAILURE = 1
EXIT_INVALID_STORE = 2
EXIT_BAD_CONFIG = 3

SOURCE_RATES = (24, 30, 60)
DISPLAY_FPS = 60
CAMERA_FPS = 120


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; we reserve 2 for invalid stores."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_code(text: str) -> int:
    """A 16-bit payload written in hex, with or without a ``0x`` prefix."""
    try:
        value = int(text, 16)
    except ValueError as exc:
        raise ConfigError(f"code {text!r} is not hexadecimal") from exc
    if not 0 <= value <= 0xFFFF:
        raise ConfigError(f"code {text} does not fit in 16 bits")
    return value


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "strength", None) is not None:
        if not args.strength > 0:
            raise ConfigError("strength must be positive")
        cfg = replace(cfg, strength=float(args.strength))
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=int(args.seed))
    return cfg


def _open(path: str) -> FrameStore:
    return FrameStore(path)


def _require_fps(store: FrameStore, allowed: Sequence[int], what: str) -> None:
    if store.fps not in allowed:
        raise InvalidStore(f"{what} must be at {' or '.join(map(str, allowed))} FPS, store is {store.fps} FPS")


def _require_screen_size(store: FrameStore) -> None:
    if (store.width, store.height) != (WIDTH, HEIGHT):
        raise InvalidStore(f"frames must be {WIDTH}x{HEIGHT}, store is {store.width}x{store.height}")


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _split_stats(frames: Sequence[np.ndarray], code: int, cfg: RunConfig, selector) -> dict[str, Any]:
    """How often each split candidate was chosen across all flickered pixels."""
    df, _ = build_data_frame(rs_encode(code))
    counts = np.zeros(len(selector.candidates), dtype=np.int64)
    for f in frames:
        idx = selector.select_indices(f.reshape(-1, 3)[df.flat_index])
        counts += np.bincount(idx, minlength=len(counts))
    total = int(counts.sum())
    share = counts @ np.abs(selector.candidates) / max(total, 1)
    return {
        "flickered_pixels_per_frame": int(len(df.flat_index)),
        "candidates": int(len(counts)),
        "candidates_used": int(np.count_nonzero(counts)),
        "mean_abs_split": {"L": float(share[0]), "a": float(share[1]), "b": float(share[2])},
        "usage": {str(i): int(c) for i, c in enumerate(counts) if c},
    }


def cmd_encode(args: argparse.Namespace) -> int:
    code = parse_code(args.code)
    cfg = _resolve_config(args)
    selector = cfg.selector()
    store = _open(args.input)
    _require_fps(store, SOURCE_RATES, "encoder input")
    _require_screen_size(store)
    frames = upsample_sample_and_hold(store[:], store.fps)
    encoded = encode_video(frames, code, cfg.strength, selector)
    out_dir = Path(args.output)
    write_store(out_dir, encoded, DISPLAY_FPS)
    report = {
        "schema_version": 1,
        "code": f"0x{code:04X}",
        "strength": cfg.strength,
        "input_fps": store.fps,
        "input_frames": len(store),
        "output_frames": len(encoded),
        "split_stats": _split_stats(frames, code, cfg, selector),
        "config": cfg.to_dict(),
    }
    atomic_write_json(out_dir / "encode_report.json", report)
    print(f"encoded 0x{code:04X} into {len(encoded)} frames at {out_dir}")
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    store = _open(args.input)
    _require_fps(store, (CAMERA_FPS,), "recording")
    try:
        result = decode_recording(store, cfg.seed, cfg.decoder)
        status = EXIT_OK
    except RecordingDecodeFailure as exc:
        result = exc.result
        status = EXIT_DECODE_FAILURE
    report = {"schema_version": 1, **result.to_dict(), "config": cfg.to_dict()}
    report_path = Path(args.report) if args.report else Path(args.input) / "decode_report.json"
    atomic_write_json(report_path, report)
    print(f"0x{result.payload:04X}" if status == EXIT_OK else "FAIL")
    return status


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    profile = load_profile(args.profile) if args.profile else cfg.profile
    if profile is None:
        raise ConfigError("no channel profile given (use --profile or a config profile)")
    if args.seed is not None:
        profile = profile.with_seed(args.seed)
    store = _open(args.input)
    _require_fps(store, (DISPLAY_FPS,), "display stream")
    recording = simulate(store, profile)
    write_store(args.output, recording, CAMERA_FPS)
    atomic_write_json(
        Path(args.output) / "simulate_report.json",
        {"schema_version": 1, "profile": profile.to_dict(), "frames": len(recording), "config": cfg.to_dict()},
    )
    print(f"wrote {len(recording)} camera frames to {args.output}")
    return EXIT_OK


def bench_csv(report_dict: dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["profile", "trial", "channel_seed", "decode_seed", "success", "payload", "epochs_used"])
    for p in report_dict["profiles"]:
        for row in p["per_trial"]:
            writer.writerow(
                [p["name"], row["trial"], row["channel_seed"], row["decode_seed"],
                 int(row["success"]), row["payload"] or "", row["epochs_used"]]
            )
    return buf.getvalue()


def cmd_bench(args: argparse.Namespace) -> int:
    code = parse_code(args.code)
    cfg = _resolve_config(args)
    profiles = load_profiles(args.profiles)
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    store = _open(args.input)
    _require_fps(store, (DISPLAY_FPS,), "display stream")
    report = run_bench(store, code, profiles, args.trials, cfg.seed, cfg.decoder)
    report.config = cfg.to_dict()
    data = report.to_dict()
    text = _dump(data)
    if args.output:
        atomic_write_bytes(args.output, text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    if args.csv:
        atomic_write_bytes(args.csv, bench_csv(data).encode("utf-8"))
    if args.output:
        print(f"error rate {data['error_rate']:.4f} over {data['total_trials']} trials")
    return EXIT_OK


def cmd_quality(args: argparse.Namespace) -> int:
    ref, enc = _open(args.ref), _open(args.enc)
    if (ref.width, ref.height, len(ref)) != (enc.width, enc.height, len(enc)):
        raise InvalidStore("reference and test stores differ in frame size or count")
    data = quality_report(ref, enc).to_dict()
    text = _dump(data)
    if args.output:
        atomic_write_bytes(args.output, text.encode("utf-8"))
        print(f"PSNR {data['psnr_mean']:.2f} dB, SSIM {data['ssim_mean']:.4f}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.frames < 1:
        raise ConfigError("--frames must be at least 1")
    kinds = FIXTURE_KINDS if args.kind == "all" else (args.kind,)
    for kind in kinds:
        out = Path(args.output) / kind if args.kind == "all" else Path(args.output)
        write_store(out, make_fixture(kind, args.frames, args.seed), DISPLAY_FPS)
        print(f"wrote {args.frames} {kind} frames to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flickercode", description="Embed and recover 16-bit codes in imperceptible 60 Hz flicker.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", help="embed a code into a 24/30/60 FPS frame store")
    p.add_argument("--input", required=True)
    p.add_argument("--code", required=True, help="16-bit payload in hex, e.g. 0xABCD")
    p.add_argument("--strength", type=float, help="flicker amplitude d in OKLAB units")
    p.add_argument("--output", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover the code from a 120 FPS recording store")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--report", help="report path (default: INPUT/decode_report.json)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="film a 60 FPS display store through a simulated camera")
    p.add_argument("--input", required=True)
    p.add_argument("--profile", help="preset name or profile JSON file")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="error rate of an encoded store over channel profiles")
    p.add_argument("--input", required=True)
    p.add_argument("--code", required=True)
    p.add_argument("--profiles", required=True, help="JSON list of preset names or profile objects")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.add_argument("--output", help="report JSON path (default: standard output)")
    p.add_argument("--csv", help="optional per-trial CSV path")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("quality", help="PSNR/SSIM of an encoded store against its source")
    p.add_argument("--ref", required=True)
    p.add_argument("--enc", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("fixtures", help="generate procedural 1920x1080 test clips")
    p.add_argument("--kind", choices=(*FIXTURE_KINDS, "all"), default="all")
    p.add_argument("--frames", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"flickercode: error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"flickercode: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (InvalidStore, UnsupportedRate, DimensionMismatch, EpochTooShort) as exc:
        print(f"flickercode: invalid frame store: {exc}", file=sys.stderr)
        return EXIT_INVALID_STORE
    except DecodeFailure as exc:
        print(f"flickercode: decode failed: {exc}", file=sys.stderr)
        return EXIT_DECODE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
