"""PNG-sequence frame directories with a JSON manifest.

A store is a directory of ``frame_000000.png`` ... files plus ``manifest.json``.
Frames are 8-bit RGB in memory and written losslessly, so a write/read round
trip preserves every byte.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from collections.abc import Sequence
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable

import cv2
import numpy as np

from .errors import InvalidStore

MANIFEST = "manifest.json"
STORE_SCHEMA_VERSION = 1
COLOR_SPACE = "srgb8"
_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def frame_name(index: int) -> str:
    return f"frame_{index:06d}.png"


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write ``data`` to a sibling temp file, then rename it over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str | Path, obj: Any) -> None:
    atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8"))


def _png_size(path: Path) -> tuple[int, int]:
    """(width, height) from the PNG IHDR chunk without decoding pixels."""
    with open(path, "rb") as fh:
        head = fh.read(24)
    if len(head) < 24 or head[:8] != _PNG_SIGNATURE or head[12:16] != b"IHDR":
        raise InvalidStore(f"{path.name} is not a PNG file")
    return struct.unpack(">II", head[16:24])


def encode_png(frame: np.ndarray) -> bytes:
    if frame.dtype != np.uint8 or frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError(f"frames must be (H, W, 3) uint8, got {frame.shape} {frame.dtype}")
    ok, buf = cv2.imencode(".png", cv2.cvtColor(frame, cv2.COLOR_RGB2BGR))
    if not ok:
        raise OSError("PNG encoding failed")
    return buf.tobytes()


class FrameStore(Sequence):
    """Read-only view of a validated frame directory. Frames load on demand."""

    def __init__(self, directory: str | Path, cache_size: int = 16) -> None:
        self.directory = Path(directory)
        self.manifest = self._load_manifest()
        self.width = int(self.manifest["width"])
        self.height = int(self.manifest["height"])
        self.fps = int(self.manifest["fps"])
        self.frame_count = int(self.manifest["frame_count"])
        self._check_files()
        self._read = lru_cache(maxsize=cache_size)(self._read_uncached)

    def _load_manifest(self) -> dict[str, Any]:
        if not self.directory.is_dir():
            raise InvalidStore(f"{self.directory} is not a directory")
        path = self.directory / MANIFEST
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidStore(f"cannot read {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidStore("manifest must be a JSON object")
        for key in ("width", "height", "fps", "frame_count", "color_space"):
            if key not in data:
                raise InvalidStore(f"manifest lacks {key!r}")
        if data.get("schema_version", STORE_SCHEMA_VERSION) != STORE_SCHEMA_VERSION:
            raise InvalidStore(f"unsupported manifest schema_version {data['schema_version']}")
        if data["color_space"] != COLOR_SPACE:
            raise InvalidStore(f"unsupported color_space {data['color_space']!r}")
        for key in ("width", "height", "fps"):
            if not isinstance(data[key], int) or data[key] <= 0:
                raise InvalidStore(f"manifest {key} must be a positive integer")
        if not isinstance(data["frame_count"], int) or data["frame_count"] < 0:
            raise InvalidStore("manifest frame_count must be a non-negative integer")
        return data

    def _check_files(self) -> None:
        files = sorted(p.name for p in self.directory.glob("frame_*.png"))
        expected = [frame_name(i) for i in range(self.frame_count)]
        if files != expected:
            raise InvalidStore(
                f"manifest lists {self.frame_count} frames but the directory holds {len(files)} frame files"
                if len(files) != self.frame_count
                else "frame files are not numbered contiguously from 0"
            )
        for name in files:
            size = _png_size(self.directory / name)
            if size != (self.width, self.height):
                raise InvalidStore(f"{name} is {size[0]}x{size[1]}, manifest says {self.width}x{self.height}")

    def _read_uncached(self, index: int) -> np.ndarray:
        path = self.directory / frame_name(index)
        img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
        if img is None or img.dtype != np.uint8:
            raise InvalidStore(f"{path.name} is not an 8-bit PNG")
        if img.ndim == 2:
            img = cv2.cvtColor(img, cv2.COLOR_GRAY2RGB)
        elif img.shape[2] == 4:
            img = cv2.cvtColor(img, cv2.COLOR_BGRA2RGB)
        else:
            img = cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
        img.setflags(write=False)
        return img

    def __len__(self) -> int:
        return self.frame_count

    def __getitem__(self, index):  # type: ignore[override]
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not 0 <= index < len(self):
            raise IndexError(index)
        return self._read(index)


def write_store(directory: str | Path, frames: Iterable[np.ndarray], fps: int) -> FrameStore:
    """Write frames and a manifest. The manifest goes last, so a crashed write is invalid."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for stale in directory.glob("frame_*.png"):
        stale.unlink()
    manifest_path = directory / MANIFEST
    if manifest_path.exists():
        manifest_path.unlink()
    size = None
    count = 0
    for i, frame in enumerate(frames):
        frame = np.asarray(frame)
        if size is None:
            size = frame.shape
        elif frame.shape != size:
            raise ValueError(f"frame {i} has shape {frame.shape}, expected {size}")
        atomic_write_bytes(directory / frame_name(i), encode_png(frame))
        count += 1
    if size is None:
        raise ValueError("cannot write an empty store")
    atomic_write_json(
        manifest_path,
        {
            "schema_version": STORE_SCHEMA_VERSION,
            "width": int(size[1]),
            "height": int(size[0]),
            "fps": int(fps),
            "frame_count": count,
            "color_space": COLOR_SPACE,
        },
    )
    return FrameStore(directory)
