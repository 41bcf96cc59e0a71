"""Procedural 1920x1080 test clips.

Four clip kinds cover the cases the codec has to survive: a flat gray card,
a drifting color gradient, a panning natural-looking texture and an animated
checkerboard. Every generator is deterministic given its seed.
"""

from __future__ import annotations

from typing import Callable

import cv2
import numpy as np

from .encoder import HEIGHT, WIDTH

FIXTURE_KINDS = ("gray", "gradient", "texture", "checker")


def gray_card(n_frames: int, level: int = 128, seed: int = 0) -> list[np.ndarray]:
    frame = np.full((HEIGHT, WIDTH, 3), level, dtype=np.uint8)
    return [frame.copy() for _ in range(n_frames)]


def gradient(n_frames: int, seed: int = 0) -> list[np.ndarray]:
    """Diagonal color ramp drifting 4 px per frame."""
    pad = 4 * n_frames
    x = np.linspace(0.0, 1.0, WIDTH + pad)[None, :]
    y = np.linspace(0.0, 1.0, HEIGHT)[:, None]
    r = 40 + 170 * x + 0 * y
    g = 60 + 120 * y + 0 * x
    b = 200 - 150 * x * (1 - 0.5 * y)
    canvas = np.clip(np.rint(np.stack([r, g, b], -1)), 0, 255).astype(np.uint8)
    return [canvas[:, 4 * i : 4 * i + WIDTH].copy() for i in range(n_frames)]


def _value_noise(rng: np.random.Generator, height: int, width: int, octaves: int = 5) -> np.ndarray:
    acc = np.zeros((height, width), dtype=np.float64)
    amp, total = 1.0, 0.0
    cells = 6
    for _ in range(octaves):
        grid = rng.random((cells + 1, int(cells * width / height) + 1))
        acc += amp * cv2.resize(grid, (width, height), interpolation=cv2.INTER_CUBIC)
        total += amp
        amp *= 0.5
        cells *= 2
    acc /= total
    return (acc - acc.mean()) / (acc.std() + 1e-12)


def texture(n_frames: int, seed: int = 0) -> list[np.ndarray]:
    """Smooth multi-octave color noise panning 3 px right and 1 px down per frame."""
    rng = np.random.default_rng(seed)
    h, w = HEIGHT + n_frames, WIDTH + 3 * n_frames
    luma = 128 + 38 * _value_noise(rng, h, w)
    cr = 22 * _value_noise(rng, h, w, octaves=3)
    cb = 22 * _value_noise(rng, h, w, octaves=3)
    rgb = np.stack([luma + 1.4 * cr, luma - 0.34 * cb - 0.71 * cr, luma + 1.77 * cb], -1)
    canvas = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    return [canvas[i : i + HEIGHT, 3 * i : 3 * i + WIDTH].copy() for i in range(n_frames)]


def checker(n_frames: int, seed: int = 0, square: int = 96) -> list[np.ndarray]:
    """Two-color checkerboard scrolling 8 px per frame."""
    ys, xs = np.mgrid[0:HEIGHT, 0:WIDTH]
    c0 = np.array([180, 70, 60], dtype=np.uint8)
    c1 = np.array([60, 120, 170], dtype=np.uint8)
    frames = []
    for i in range(n_frames):
        sel = (((xs + 8 * i) // square) + (ys // square)) % 2 == 0
        frames.append(np.where(sel[..., None], c0, c1).astype(np.uint8))
    return frames


GENERATORS: dict[str, Callable[..., list[np.ndarray]]] = {
    "gray": gray_card,
    "gradient": gradient,
    "texture": texture,
    "checker": checker,
}


def make_fixture(kind: str, n_frames: int = 60, seed: int = 0) -> list[np.ndarray]:
    if kind not in GENERATORS:
        raise ValueError(f"unknown fixture {kind!r}; choose from {', '.join(FIXTURE_KINDS)}")
    return GENERATORS[kind](n_frames, seed=seed)


def test_card() -> np.ndarray:
    """Full-gamut card: a 127-level RGB lattice packed into one 1920x1080 frame.

    Remaining pixels repeat the lattice from its start.
    """
    levels = np.rint(np.linspace(0, 255, 127)).astype(np.uint8)
    lattice = np.stack(np.meshgrid(levels, levels, levels, indexing="ij"), -1).reshape(-1, 3)
    n = HEIGHT * WIDTH
    reps = np.resize(np.arange(len(lattice)), n)
    return lattice[reps].reshape(HEIGHT, WIDTH, 3)
