"""Data-frame construction and OKLAB flicker embedding for 60 FPS video.

A frame is a ``(1080, 1920, 3)`` uint8 RGB array. Frames at even display
index receive ``+split * d`` in OKLAB on every data-frame pixel, odd frames
receive ``-split * d``. The split for each pixel is chosen from a finite
candidate set so that the average of the two flickered frames stays close to
the original color.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import color
from ._kernels import best_split_indices
from .ecc import COLS, ROWS, Shape, interleave, rs_encode
from .errors import DimensionMismatch, UnsupportedRate

WIDTH, HEIGHT = 1920, 1080
MARGIN = 60
PITCH = 120
BORDER = 13
SEMI_MINOR = 10
SEMI_MAJOR = {Shape.E0: 37, Shape.E45: 50, Shape.E90: 37, Shape.E135: 50}
DEFAULT_STRENGTH = 0.0425

# exact trig for the four orientations keeps the axis-aligned boundaries crisp
_H = math.sqrt(0.5)
_COS_SIN = {Shape.E0: (1.0, 0.0), Shape.E45: (_H, _H), Shape.E90: (0.0, 1.0), Shape.E135: (-_H, _H)}


def symbol_center(row: int, col: int) -> tuple[int, int]:
    """Lattice center ``(x, y)`` of grid cell ``(row, col)``."""
    return MARGIN + PITCH * col, MARGIN + PITCH * row


def ellipse_mask(shape: Shape | int, height: int, width: int, cx: float, cy: float) -> np.ndarray:
    """Boolean ``(height, width)`` raster of one symbol ellipse centered at (cx, cy)."""
    shape = Shape(shape)
    a, b = SEMI_MAJOR[shape], SEMI_MINOR
    c, s = _COS_SIN[shape]
    ys, xs = np.mgrid[0:height, 0:width]
    dx = xs - cx
    dy = ys - cy
    u = (dx * c + dy * s) / a
    v = (-dx * s + dy * c) / b
    return u * u + v * v <= 1.0


def rasterize_symbol(shape: Shape | int, cx: int, cy: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel coordinates ``(ys, xs)`` covered by a symbol centered at (cx, cy)."""
    r = SEMI_MAJOR[Shape(shape)] + 1
    local = ellipse_mask(shape, 2 * r + 1, 2 * r + 1, r, r)
    ys, xs = np.nonzero(local)
    return ys + cy - r, xs + cx - r


def border_mask(height: int = HEIGHT, width: int = WIDTH, border: int = BORDER) -> np.ndarray:
    m = np.zeros((height, width), dtype=bool)
    m[:border, :] = True
    m[-border:, :] = True
    m[:, :border] = True
    m[:, -border:] = True
    return m


@dataclass(frozen=True)
class DataFrame:
    """Flicker mask of one data frame plus the shape grid it renders."""

    mask: np.ndarray
    grid: np.ndarray
    flat_index: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape


def build_data_frame(codeword: Sequence[int]) -> tuple[DataFrame, np.ndarray]:
    """Render the 16x9 ellipse grid and the 13-px border for a codeword."""
    grid = interleave(codeword)
    mask = border_mask()
    for row in range(ROWS):
        for col in range(COLS):
            ys, xs = rasterize_symbol(int(grid[row, col]), *symbol_center(row, col))
            mask[ys, xs] = True
    df = DataFrame(mask=mask, grid=grid, flat_index=np.flatnonzero(mask))
    return df, grid


def default_candidates(
    lambda_levels: Sequence[float] = (0.0, 0.1, 0.2, 0.3),
    mix_levels: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
) -> np.ndarray:
    """All sign combinations of (lambda, t(1-|lambda|), (1-t)(1-|lambda|)).

    Duplicates (from zero components) are dropped, keeping first occurrence.
    """
    seen: set[tuple[float, float, float]] = set()
    out = []
    for lam, t in itertools.product(lambda_levels, mix_levels):
        rest = 1.0 - abs(lam)
        mags = (abs(lam), t * rest, (1.0 - t) * rest)
        for signs in itertools.product((1.0, -1.0), repeat=3):
            trip = tuple(float(s * m) + 0.0 for s, m in zip(signs, mags))
            if trip not in seen:
                seen.add(trip)
                out.append(trip)
    return np.array(out, dtype=np.float64)


def _mirror_index(cands: np.ndarray) -> np.ndarray:
    lookup = {tuple(c): i for i, c in enumerate(cands.tolist())}
    return np.array([lookup.get(tuple((-c + 0.0).tolist()), -1) for c in cands], dtype=np.int64)


@dataclass(frozen=True)
class ObjectiveWeights:
    """Red/green/blue weights of the fused-color residual, switched on lightness."""

    dark: tuple[float, float, float] = (0.27, 0.7, 0.03)
    bright: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    switch_lightness: float = 0.95

    def __post_init__(self) -> None:
        for w in (self.dark, self.bright):
            if min(w) < 0 or abs(sum(w) - 1.0) > 1e-9:
                raise ValueError(f"weights {w} must be nonnegative and sum to 1")

    def for_lightness(self, L: float) -> tuple[float, float, float]:
        return self.bright if L > self.switch_lightness else self.dark


def split_objective(rgb: np.ndarray, split: np.ndarray, d: float, weights: ObjectiveWeights) -> np.ndarray:
    """Weighted residual between a pixel and the mean of its flickered pair.

    Vectorized over pixels (``rgb`` is ``(M, 3)``) and used for diagnostics;
    selection itself runs in the compiled kernel.
    """
    rgb = np.asarray(rgb, dtype=np.uint8).reshape(-1, 3)
    lab = color.srgb_to_oklab(rgb)
    delta = np.asarray(split, dtype=np.float64) * d
    p = color.oklab_to_srgb_clamped_float(lab + delta)
    q = color.oklab_to_srgb_clamped_float(lab - delta)
    w = np.where(
        (lab[:, 0] > weights.switch_lightness)[:, None], np.array(weights.bright), np.array(weights.dark)
    )
    return np.sum(w * np.abs(rgb - (p + q) / 2.0), axis=1)


AMPLITUDE_LADDER = (1.0, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25, 0.125, 0.0)
DEFAULT_RESIDUAL_BOUND = 3.0
DEFAULT_INTERIOR = (16, 239)


class SplitSelector:
    """Picks the flicker split per sRGB color, memoizing results.

    Selection minimizes the weighted fused-color objective. For colors whose
    channels all lie in ``interior`` the choice is restricted to splits whose
    displayed frame pair keeps every channel within ``residual_bound`` code
    values of the original; if no split qualifies at full strength the
    amplitude steps down ``AMPLITUDE_LADDER`` until one does. Pass
    ``residual_bound=None`` for the unconstrained argmin.

    ``mode="exact"`` evaluates every distinct color it sees once and caches the
    answer in a 2^24 table. ``mode="lut"`` precomputes a 33^3 lattice and
    answers with the nearest lattice bin (the residual guarantee then holds
    only at lattice colors).
    """

    def __init__(
        self,
        d: float = DEFAULT_STRENGTH,
        candidates: Optional[np.ndarray] = None,
        weights: Optional[ObjectiveWeights] = None,
        mode: str = "exact",
        residual_bound: Optional[float] = DEFAULT_RESIDUAL_BOUND,
        interior: tuple[int, int] = DEFAULT_INTERIOR,
    ) -> None:
        if not d > 0:
            raise ValueError("flicker strength must be positive")
        cands = default_candidates() if candidates is None else np.asarray(candidates, dtype=np.float64)
        if cands.ndim != 2 or cands.shape[1] != 3 or len(cands) == 0:
            raise ValueError("candidates must be a nonempty (K, 3) array")
        norms = np.abs(cands).sum(axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("every candidate split needs |lambda|+|alpha|+|beta| = 1")
        if mode not in ("exact", "lut"):
            raise ValueError(f"unknown selection mode {mode!r}")
        if residual_bound is not None and residual_bound < 0:
            raise ValueError("residual bound must be nonnegative")
        lo, hi = interior
        if not 0 <= lo <= hi <= 255:
            raise ValueError("interior must satisfy 0 <= lo <= hi <= 255")
        self.d = float(d)
        self.candidates = np.ascontiguousarray(cands)
        self.weights = weights or ObjectiveWeights()
        self.mode = mode
        self.residual_bound = None if residual_bound is None else float(residual_bound)
        self.interior = (int(lo), int(hi))
        self.scales = np.array(AMPLITUDE_LADDER)
        self._mirror = _mirror_index(self.candidates)
        self._w_dark = np.array(self.weights.dark)
        self._w_bright = np.array(self.weights.bright)
        self._memo: Optional[np.ndarray] = None
        self._lut: Optional[np.ndarray] = None

    def _compute(self, rgb: np.ndarray) -> np.ndarray:
        return best_split_indices(
            np.ascontiguousarray(rgb, dtype=np.uint8),
            self.candidates,
            self._mirror,
            self.d,
            color._LINEAR_LUT,
            self._w_dark,
            self._w_bright,
            self.weights.switch_lightness,
            self.scales,
            -1.0 if self.residual_bound is None else self.residual_bound,
            self.interior[0],
            self.interior[1],
        )

    def select_codes(self, rgb: np.ndarray) -> np.ndarray:
        """``level * K + candidate`` per pixel for a ``(M, 3)`` uint8 array."""
        rgb = np.asarray(rgb, dtype=np.uint8).reshape(-1, 3)
        if self.mode == "lut":
            if self._lut is None:
                levels = color.round_half_away(np.arange(33) * 255 / 32).astype(np.uint8)
                lattice = np.stack(np.meshgrid(levels, levels, levels, indexing="ij"), -1).reshape(-1, 3)
                self._lut = self._compute(lattice).reshape(33, 33, 33)
            b = np.rint(rgb.astype(np.float64) * 32 / 255).astype(np.intp)
            return self._lut[b[:, 0], b[:, 1], b[:, 2]]
        if self._memo is None:
            self._memo = np.full(1 << 24, -1, dtype=np.int32)
        key = (rgb[:, 0].astype(np.int64) << 16) | (rgb[:, 1].astype(np.int64) << 8) | rgb[:, 2]
        code = self._memo[key]
        missing = code < 0
        if missing.any():
            new_keys = np.unique(key[missing])
            new_rgb = np.stack([(new_keys >> 16) & 255, (new_keys >> 8) & 255, new_keys & 255], -1)
            self._memo[new_keys] = self._compute(new_rgb.astype(np.uint8))
            code = self._memo[key]
        return code

    def select_indices(self, rgb: np.ndarray) -> np.ndarray:
        """Candidate index per pixel for a ``(M, 3)`` uint8 array."""
        return self.select_codes(rgb) % len(self.candidates)

    def amplitudes(self, rgb: np.ndarray) -> np.ndarray:
        """Flicker amplitude per pixel: ``d`` unless the residual bound forced it down."""
        return self.d * self.scales[self.select_codes(rgb) // len(self.candidates)]

    def deltas(self, rgb: np.ndarray) -> np.ndarray:
        """Even-frame OKLAB offsets ``split * amplitude`` for pixels ``(M, 3)``."""
        code = self.select_codes(rgb)
        k, lev = code % len(self.candidates), code // len(self.candidates)
        return self.candidates[k] * (self.d * self.scales[lev])[:, None]

    def select(self, rgb: Sequence[int]) -> np.ndarray:
        """The chosen split triple for a single pixel."""
        return self.candidates[self.select_indices(np.asarray(rgb).reshape(1, 3))[0]]


def select_flicker_split(
    pixel: Sequence[int],
    d: float,
    candidates: np.ndarray,
    weights: Optional[ObjectiveWeights] = None,
    residual_bound: Optional[float] = DEFAULT_RESIDUAL_BOUND,
) -> np.ndarray:
    """One-off split choice for a single sRGB pixel."""
    return SplitSelector(d, candidates, weights, residual_bound=residual_bound).select(pixel)


def flicker_delta(rgb: np.ndarray, selector: SplitSelector, parity: int) -> tuple[np.ndarray, np.ndarray]:
    """OKLAB values and pre-clamp OKLAB deltas for pixels ``(M, 3)``.

    Returns ``(lab, delta)`` with ``delta = (+1 or -1) * split * amplitude``.
    """
    sign = 1.0 if parity % 2 == 0 else -1.0
    lab = color.srgb_to_oklab(rgb)
    delta = sign * selector.deltas(rgb)
    return lab, delta


def flicker_pixels(rgb: np.ndarray, selector: SplitSelector, parity: int) -> np.ndarray:
    """Flickered 8-bit colors for pixels ``(M, 3)`` at the given frame parity."""
    lab, delta = flicker_delta(rgb, selector, parity)
    out, _ = color.oklab_to_srgb(lab + delta)
    return out


def apply_flicker(frame: np.ndarray, df: DataFrame, selector: SplitSelector, parity: int) -> np.ndarray:
    """Flicker every mask pixel of ``frame``; all other bytes are copied untouched."""
    if frame.shape[:2] != df.shape or frame.ndim != 3 or frame.shape[2] != 3:
        raise DimensionMismatch(f"frame {frame.shape} does not match data frame {df.shape}")
    out = np.array(frame, dtype=np.uint8, copy=True)
    flat = out.reshape(-1, 3)
    flat[df.flat_index] = flicker_pixels(flat[df.flat_index], selector, parity)
    return out


def upsample_sample_and_hold(frames: Sequence[np.ndarray], src_fps: int) -> list[np.ndarray]:
    """Raise 24/30/60 FPS sequences to 60 FPS by repeating frames.

    24 FPS uses a 3-2 hold cadence, so 24 frames become 60.
    """
    if src_fps == 60:
        return list(frames)
    if src_fps == 30:
        return [f for f in frames for _ in range(2)]
    if src_fps == 24:
        return [f for i, f in enumerate(frames) for _ in range(3 if i % 2 == 0 else 2)]
    raise UnsupportedRate(f"cannot sample-and-hold {src_fps} FPS to 60 FPS")


def encode_video(
    frames: Sequence[np.ndarray],
    code: int,
    d: float = DEFAULT_STRENGTH,
    selector: Optional[SplitSelector] = None,
) -> list[np.ndarray]:
    """Embed a 16-bit code into a 60 FPS frame sequence."""
    if selector is None:
        selector = SplitSelector(d)
    elif selector.d != d:
        raise ValueError("selector strength differs from d")
    if len(frames) == 0:
        return []
    df, _ = build_data_frame(rs_encode(code))
    return [apply_flicker(f, df, selector, i % 2) for i, f in enumerate(frames)]
