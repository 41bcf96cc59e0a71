from __future__ import annotations

import json

import numpy as np
import pytest

from flickercode.errors import InvalidStore
from flickercode.framestore import MANIFEST, FrameStore, atomic_write_json, frame_name, write_store


def _frames(n=3, h=24, w=40, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8) for _ in range(n)]


def test_round_trip_is_lossless(tmp_path):
    frames = _frames()
    store = write_store(tmp_path / "s", frames, fps=60)
    assert len(store) == 3 and store.fps == 60 and (store.width, store.height) == (40, 24)
    for a, b in zip(frames, store):
        assert np.array_equal(a, b)
    assert np.array_equal(store[-1], frames[-1])
    with pytest.raises(IndexError):
        store[3]
    manifest = json.loads((tmp_path / "s" / MANIFEST).read_text())
    assert manifest["color_space"] == "srgb8" and manifest["frame_count"] == 3
    assert frame_name(12) == "frame_000012.png"


def test_frames_are_read_only(tmp_path):
    store = write_store(tmp_path, _frames(1), fps=30)
    with pytest.raises(ValueError):
        store[0][0, 0, 0] = 1


def test_rewrite_removes_stale_frames(tmp_path):
    write_store(tmp_path, _frames(5), fps=60)
    store = write_store(tmp_path, _frames(2, seed=1), fps=60)
    assert len(store) == 2
    assert len(list(tmp_path.glob("frame_*.png"))) == 2


def test_write_rejects_mixed_sizes(tmp_path):
    with pytest.raises(ValueError):
        write_store(tmp_path, [_frames(1)[0], _frames(1, h=10)[0]], fps=60)
    with pytest.raises(ValueError):
        write_store(tmp_path / "e", [], fps=60)


def _corrupt(path, **changes):
    m = json.loads((path / MANIFEST).read_text())
    m.update(changes)
    atomic_write_json(path / MANIFEST, m)


@pytest.mark.parametrize(
    "changes",
    [{"frame_count": 4}, {"color_space": "yuv420"}, {"width": 41}, {"fps": 0}, {"schema_version": 9}],
)
def test_invalid_manifests(tmp_path, changes):
    write_store(tmp_path, _frames(), fps=60)
    _corrupt(tmp_path, **changes)
    with pytest.raises(InvalidStore):
        FrameStore(tmp_path)


def test_missing_pieces(tmp_path):
    with pytest.raises(InvalidStore):
        FrameStore(tmp_path / "nope")
    with pytest.raises(InvalidStore):
        FrameStore(tmp_path)  # no manifest
    write_store(tmp_path, _frames(), fps=60)
    (tmp_path / frame_name(1)).unlink()
    with pytest.raises(InvalidStore):
        FrameStore(tmp_path)


def test_non_png_frame(tmp_path):
    write_store(tmp_path, _frames(), fps=60)
    (tmp_path / frame_name(0)).write_bytes(b"not an image")
    with pytest.raises(InvalidStore):
        FrameStore(tmp_path)
