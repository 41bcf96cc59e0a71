"""Recover the 16-bit code from a 120 FPS camera recording.

One decoding epoch runs: OKLAB conversion, weighted differential
accumulation, screen-quad detection, perspective correction to 1920x1080,
nine jittered patches per symbol, correlation classification with a
softmax-margin erasure rule, majority voting, de-interleaving and RS
decoding. Up to three disjoint epochs are tried in turn; once two or more
have failed their bit streams are merged and decoded again.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import cv2
import numpy as np

from . import color
from ._kernels import srgb8_to_oklab_f32
from .ecc import (
    COLS,
    ERASED,
    NBITS,
    NSYM,
    ROWS,
    Shape,
    bits_to_grid,
    deinterleave,
    grid_to_bits,
    rs_decode,
    rs_encode,
)
from .encoder import BORDER, HEIGHT, SEMI_MAJOR, WIDTH, ellipse_mask, symbol_center
from .errors import DecodeFailure, DegeneratePatch, EpochTooShort, LengthMismatch, QuadNotFound
from .geometry import homography_dlt, is_convex, order_corners, quad_area, rect_corners, warp

PATCH_SIDE = math.ceil(1.15 * 2 * SEMI_MAJOR[Shape.E0])  # 86
COMPONENT_FRACTION = 0.25

# centre first, then N, S, E, W, NE, NW, SE, SW as (dx, dy) unit steps
JITTER_DIRECTIONS = ((0, 0), (0, -1), (0, 1), (1, 0), (-1, 0), (1, -1), (-1, -1), (1, 1), (-1, 1))


@dataclass(frozen=True)
class DecoderParams:
    epoch_length: int = 12
    c: float = 0.25
    decay: float = 0.9
    blur_sigma: float = 2.0
    blur_ksize: int = 9
    jitter: int = 6
    margin_threshold: float = 0.35
    temperature: float = 0.1
    max_epochs: int = 3
    rs_guard: int = 4
    border_check: float = 0.9
    classify_plane: str = "flicker"

    def __post_init__(self) -> None:
        if not 2 <= self.epoch_length:
            raise ValueError("epoch_length must be at least 2")
        if not self.c < 1:
            raise ValueError("c must be below 1")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must lie in (0, 1]")
        if self.blur_ksize % 2 != 1 or self.blur_sigma < 0:
            raise ValueError("blur kernel must be odd with nonnegative sigma")
        if self.jitter < 0 or not 0 <= self.margin_threshold < 1 or self.temperature <= 0:
            raise ValueError("invalid jitter, margin threshold or temperature")
        if not 1 <= self.max_epochs <= 3:
            raise ValueError("max_epochs must be 1, 2 or 3")
        if not 0 <= self.rs_guard <= 34:
            raise ValueError("rs_guard must lie in [0, 34]")
        if not 0 <= self.border_check <= 1:
            raise ValueError("border_check must lie in [0, 1]")
        if self.classify_plane not in ("combined", "flicker"):
            raise ValueError("classify_plane must be 'combined' or 'flicker'")

    def decay_weights(self, n_frames: int) -> np.ndarray:
        return self.decay ** np.arange(n_frames - 1, dtype=np.float64)


@dataclass
class AccumulatorImage:
    """Per-channel accumulators normalized to [0, 255] and their combination.

    ``flicker`` optionally holds the same normalization applied to the
    difference terms alone (without ``F_1``), as an ``(H, W, 3)`` L/A/B stack.
    """

    L: np.ndarray
    A: np.ndarray
    B: np.ndarray
    c: float
    flicker: Optional[np.ndarray] = None

    @property
    def combined(self) -> np.ndarray:
        return self.A + self.B + np.float32(self.c) * self.L

    @property
    def flicker_combined(self) -> np.ndarray:
        """``A + B + cL`` of the difference-only planes (falls back to ``combined``)."""
        if self.flicker is None:
            return self.combined
        f = self.flicker
        return f[..., 1] + f[..., 2] + np.float32(self.c) * f[..., 0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.L.shape


@dataclass
class PatchVerdict:
    shape: Optional[Shape]
    margin: Optional[float]

    @property
    def erased(self) -> bool:
        return self.shape is None


@dataclass
class EpochResult:
    start: int
    length: int
    bits: np.ndarray
    payload: Optional[int]
    erased_bytes: int
    erased_symbols: int
    quad: Optional[list[list[float]]] = None
    margin_histogram: list[int] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def success(self) -> bool:
        return self.payload is not None

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["bits"] = "".join("x" if b == ERASED else str(int(b)) for b in self.bits)
        return d


def _normalize(plane: np.ndarray) -> np.ndarray:
    lo, hi = float(plane.min()), float(plane.max())
    if hi - lo <= 0:
        return np.zeros_like(plane, dtype=np.float32)
    return ((plane - lo) * (255.0 / (hi - lo))).astype(np.float32)


def _to_oklab(frame: np.ndarray) -> np.ndarray:
    if frame.dtype == np.uint8:
        return srgb8_to_oklab_f32(np.ascontiguousarray(frame), color._LINEAR_LUT)
    return np.array(frame, dtype=np.float32)


def accumulate_epoch(
    frames: Sequence[np.ndarray],
    weights: Optional[Sequence[float]] = None,
    c: float = 0.25,
    blur_sigma: float = 2.0,
    blur_ksize: int = 9,
) -> AccumulatorImage:
    """F = F_1 + sum_i w_i |F_i - F_(i+1)| per OKLAB channel, then min-max to [0, 255].

    Frames may be uint8 sRGB or float OKLAB arrays ``(H, W, 3)``. The L
    channel is Gaussian-filtered before it enters the sum.
    """
    n = len(frames)
    if n < 2:
        raise EpochTooShort(f"an epoch needs at least 2 frames, got {n}")
    if weights is None:
        weights = 0.9 ** np.arange(n - 1)
    w = np.asarray(weights, dtype=np.float32)
    if w.shape != (n - 1,):
        raise ValueError(f"expected {n - 1} weights, got {w.shape}")
    if np.any(w <= 0) or np.any(np.diff(w) > 0):
        raise ValueError("weights must be positive and non-increasing")
    if not c < 1:
        raise ValueError("c must be below 1")

    # the last two converted frames, keyed by identity; sample-and-hold
    # content alternates between a few frame objects
    recent: list[tuple[np.ndarray, np.ndarray]] = []

    def planes(frame: np.ndarray) -> np.ndarray:
        for obj, lab in recent:
            if obj is frame:
                return lab
        lab = _to_oklab(frame)
        if blur_sigma > 0:
            lab[..., 0] = cv2.GaussianBlur(lab[..., 0], (blur_ksize, blur_ksize), blur_sigma)
        recent.append((frame, lab))
        del recent[:-2]
        return lab

    prev = planes(frames[0])
    first = prev.copy()
    diff = np.zeros_like(prev)
    for i in range(1, n):
        if frames[i] is frames[i - 1]:
            continue  # repeated frame object: the difference term is exactly zero
        cur = planes(frames[i])
        diff += w[i - 1] * np.abs(prev - cur)
        prev = cur
    acc = first + diff
    flicker = np.stack([_normalize(diff[..., k]) for k in range(3)], axis=-1)
    return AccumulatorImage(
        L=_normalize(acc[..., 0]), A=_normalize(acc[..., 1]), B=_normalize(acc[..., 2]), c=c, flicker=flicker
    )


def _line_angle_distance(t1: float, t2: float) -> float:
    d = abs(t1 - t2) % np.pi
    return min(d, np.pi - d)


def _fit_line(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Total-least-squares line as (unit normal n, offset r) with n.p = r."""
    centre = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centre, full_matrices=False)
    normal = vt[1]
    return normal, float(normal @ centre)


def _intersect(l1: tuple[np.ndarray, float], l2: tuple[np.ndarray, float]) -> np.ndarray:
    A = np.vstack([l1[0], l2[0]])
    return np.linalg.solve(A, np.array([l1[1], l2[1]]))


def detect_frame_quad(acc: AccumulatorImage | np.ndarray) -> np.ndarray:
    """Locate the flickering border as a quad (TL, TR, BR, BL).

    Otsu threshold, 5x5 closing, the largest component (with any others at
    least a quarter its size), Hough lines on the convex hull of their outer
    contours, least-squares refinement on contour
    points near each line, and intersection. An AccumulatorImage is searched
    on its difference-only plane, where static content cannot mask the border.
    """
    plane = acc.flicker_combined if isinstance(acc, AccumulatorImage) else np.asarray(acc, dtype=np.float32)
    lo, hi = float(plane.min()), float(plane.max())
    if not np.isfinite(hi - lo) or hi - lo <= 1e-6:
        raise QuadNotFound("accumulator is flat")
    img = np.round((plane - lo) * (255.0 / (hi - lo))).astype(np.uint8)
    _, binary = cv2.threshold(img, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
    binary = cv2.morphologyEx(binary, cv2.MORPH_CLOSE, np.ones((5, 5), np.uint8))
    count, labels, stats, _ = cv2.connectedComponentsWithStats(binary, connectivity=8)
    if count < 2:
        raise QuadNotFound("no foreground component")
    # the border can break where dark or saturated content weakens the
    # flicker; keep every component comparable in size to the largest one
    areas = stats[1:, cv2.CC_STAT_AREA]
    keep = 1 + np.flatnonzero(areas >= COMPONENT_FRACTION * areas.max())
    comp = np.isin(labels, keep).astype(np.uint8)
    contours, _ = cv2.findContours(comp, cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE)
    contour = np.concatenate([c.reshape(-1, 2) for c in contours]).astype(np.float64)
    bw, bh = np.ptp(contour[:, 0]), np.ptp(contour[:, 1])
    if min(bw, bh) < 20:
        raise QuadNotFound("largest component is too small")

    # Hough runs on the convex hull outline: where dark content breaks the
    # thresholded border, the raw contour dips inward but the hull does not
    hull = cv2.convexHull(contour.astype(np.int32))
    edges = np.zeros_like(comp)
    cv2.polylines(edges, [hull], True, 255, 1)
    min_votes = max(20, int(0.1 * min(bw, bh)))
    lines = cv2.HoughLines(edges, 1, np.pi / 360, min_votes)
    if lines is None:
        raise QuadNotFound("no Hough lines")
    same_edge_gap = max(10.0, 0.15 * min(bw, bh))
    chosen: list[tuple[float, float]] = []
    for rho, theta in lines[:, 0, :]:
        duplicate = any(
            _line_angle_distance(theta, t) < np.radians(10)
            and abs(abs(rho) - abs(r)) < same_edge_gap
            for r, t in chosen
        )
        if not duplicate:
            chosen.append((float(rho), float(theta)))
        if len(chosen) == 4:
            break
    if len(chosen) < 4:
        raise QuadNotFound(f"only {len(chosen)} distinct lines")

    pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]

    def spread(p):
        return sum(_line_angle_distance(chosen[a][1], chosen[b][1]) for a, b in p)

    fam_a, fam_b = min(pairings, key=spread)
    refined = []
    for rho, theta in chosen:
        normal, r = np.array([np.cos(theta), np.sin(theta)]), rho
        for tol in (4.0, 2.0):
            near = contour[np.abs(contour @ normal - r) < tol]
            if len(near) < 10:
                break
            normal, r = _fit_line(near)
        refined.append((normal, r))
    try:
        pts = np.array([_intersect(refined[i], refined[j]) for i in fam_a for j in fam_b])
    except np.linalg.LinAlgError as exc:
        raise QuadNotFound("parallel lines in different families") from exc
    quad = order_corners(pts)
    h, w = plane.shape
    if not is_convex(quad) or quad_area(quad) < 400:
        raise QuadNotFound("degenerate quad")
    if np.any(quad < -0.25 * max(w, h)) or np.any(quad[:, 0] > 1.25 * w) or np.any(quad[:, 1] > 1.25 * h):
        raise QuadNotFound("corners far outside the image")
    return quad


def correct_perspective(acc: AccumulatorImage, quad: np.ndarray, size: tuple[int, int] = (WIDTH, HEIGHT)) -> AccumulatorImage:
    """Resample the accumulator planes so ``quad`` maps onto the full frame."""
    H = homography_dlt(np.asarray(quad, dtype=np.float64), rect_corners(*size))
    return AccumulatorImage(
        L=warp(acc.L, H, size),
        A=warp(acc.A, H, size),
        B=warp(acc.B, H, size),
        c=acc.c,
        flicker=None if acc.flicker is None else warp(acc.flicker, H, size),
    )


def _patch_offsets(side: int) -> np.ndarray:
    return np.arange(side) - side // 2


def extract_patches(plane: np.ndarray, row: int, col: int, jitter: int = 6, side: int = PATCH_SIDE) -> np.ndarray:
    """Nine ``side x side`` patches around a cell: centre then N, S, E, W, NE, NW, SE, SW.

    Reads outside the plane clamp to the nearest edge pixel.
    """
    if not (0 <= row < ROWS and 0 <= col < COLS):
        raise IndexError(f"cell ({row}, {col}) is outside the grid")
    cx, cy = symbol_center(row, col)
    h, w = plane.shape[:2]
    off = _patch_offsets(side)
    out = np.empty((len(JITTER_DIRECTIONS), side, side), dtype=np.float32)
    for k, (dx, dy) in enumerate(JITTER_DIRECTIONS):
        ys = np.clip(cy + jitter * dy + off, 0, h - 1)
        xs = np.clip(cx + jitter * dx + off, 0, w - 1)
        out[k] = plane[np.ix_(ys, xs)]
    return out


def _templates(side: int = PATCH_SIDE) -> np.ndarray:
    """Zero-mean, unit-norm ellipse templates, one row per shape."""
    centre = side // 2
    rows = []
    for shape in Shape:
        t = ellipse_mask(shape, side, side, centre, centre).astype(np.float64).ravel()
        t -= t.mean()
        rows.append(t / np.linalg.norm(t))
    return np.array(rows)


TEMPLATES = _templates()


def _softmax_margin(scores: np.ndarray, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    z = scores / temperature
    z = z - z.max(axis=-1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=-1, keepdims=True)
    top2 = np.sort(p, axis=-1)[..., -2:]
    return np.argmax(p, axis=-1), top2[..., 1] - top2[..., 0]


def classify_patches(patches: np.ndarray, threshold: float = 0.35, temperature: float = 0.1) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized classification of ``(M, side, side)`` patches.

    Returns ``(shapes, margins)``; shapes hold ``ERASED`` where the softmax
    margin does not exceed ``threshold`` or the patch has no variance.
    """
    flat = patches.reshape(len(patches), -1).astype(np.float64)
    flat = flat - flat.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(flat, axis=1)
    degenerate = norms <= 1e-9 * flat.shape[1]
    scores = (flat @ TEMPLATES.T) / np.where(degenerate, 1.0, norms)[:, None]
    best, margin = _softmax_margin(scores, temperature)
    margin = np.where(degenerate, 0.0, margin)
    shapes = np.where(degenerate | (margin <= threshold), ERASED, best).astype(np.int8)
    return shapes, margin


def normalize_patch(patch: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-norm copy of a patch; raises DegeneratePatch on zero variance."""
    flat = np.asarray(patch, dtype=np.float64).ravel()
    flat = flat - flat.mean()
    norm = np.linalg.norm(flat)
    if norm <= 1e-9 * flat.size:
        raise DegeneratePatch("patch has no variance")
    return (flat / norm).reshape(np.shape(patch))


def classify_patch(patch: np.ndarray, threshold: float = 0.35, temperature: float = 0.1) -> PatchVerdict:
    """Shape verdict for one patch; flat patches are erasures."""
    try:
        normalize_patch(patch)
    except DegeneratePatch:
        return PatchVerdict(None, None)
    shapes, margins = classify_patches(np.asarray(patch)[None], threshold, temperature)
    if shapes[0] == ERASED:
        return PatchVerdict(None, None)
    return PatchVerdict(Shape(int(shapes[0])), float(margins[0]))


def vote_symbol(verdicts: Sequence[PatchVerdict | Optional[int]]) -> Optional[Shape]:
    """Plurality of non-erased verdicts; needs at least 3 votes and a strict lead."""
    if len(verdicts) != 9:
        raise LengthMismatch(f"expected 9 verdicts, got {len(verdicts)}")
    counts = [0, 0, 0, 0]
    for v in verdicts:
        s = v.shape if isinstance(v, PatchVerdict) else v
        if s is not None and s != ERASED:
            counts[int(s)] += 1
    order = sorted(range(4), key=lambda k: -counts[k])
    top, runner = order[0], order[1]
    if counts[top] >= 3 and counts[top] > counts[runner]:
        return Shape(top)
    return None


def combine_epochs(streams: Sequence[np.ndarray]) -> np.ndarray:
    """Merge soft bit streams: agreeing bits survive, conflicts and gaps are erased."""
    arrs = [np.asarray(s, dtype=np.int8) for s in streams]
    if not arrs or any(a.shape != arrs[0].shape for a in arrs):
        raise LengthMismatch("bit streams must share one length")
    stack = np.stack(arrs)
    known = stack != ERASED
    ones = np.any(known & (stack == 1), axis=0)
    zeros = np.any(known & (stack == 0), axis=0)
    out = np.full(stack.shape[1], ERASED, dtype=np.int8)
    out[ones & ~zeros] = 1
    out[zeros & ~ones] = 0
    return out


def _decode_bits(bits: np.ndarray, guard: int = 0) -> tuple[Optional[int], int]:
    """RS-decode a bit stream, keeping ``guard`` parity bytes in reserve.

    A result is accepted only when ``2t + e <= 34 - guard`` for the ``t``
    corrected errors and ``e`` erasures. Without the reserve, 34 erased bytes
    would always "decode" to whatever the two surviving bytes say.
    """
    received = deinterleave(bits_to_grid(bits))
    erased = sum(v is None for v in received)
    try:
        payload = rs_decode(received)
    except DecodeFailure:
        return None, erased
    codeword = rs_encode(payload)
    errors = sum(v is not None and v != int(c) for v, c in zip(received, codeword))
    if 2 * errors + erased > NSYM - guard:
        return None, erased
    return payload, erased


def border_score(plane: np.ndarray, border: int = BORDER, gap: tuple[int, int] = (15, 21), step: int = 8) -> float:
    """Fraction of perimeter samples where the border band outshines the band inside it.

    On a correctly rectified accumulator the flickering border is brighter
    than the symbol-free strip just inside it almost everywhere.
    """
    h, w = plane.shape
    a, b = gap
    hits = []
    for x in range(b, w - b, step):
        hits.append(plane[:border, x].mean() > plane[a:b, x].mean())
        hits.append(plane[h - border :, x].mean() > plane[h - b : h - a, x].mean())
    for y in range(b, h - b, step):
        hits.append(plane[y, :border].mean() > plane[y, a:b].mean())
        hits.append(plane[y, w - border :].mean() > plane[y, w - b : w - a].mean())
    return float(np.mean(hits))


def decode_grid(plane: np.ndarray, params: DecoderParams) -> tuple[np.ndarray, np.ndarray]:
    """Vote a shape for every cell of a perspective-corrected plane.

    Returns the ``(9, 16)`` shape grid and the ``(1296,)`` patch margins.
    """
    patches = np.concatenate(
        [extract_patches(plane, r, c, params.jitter) for r in range(ROWS) for c in range(COLS)]
    )
    shapes, margins = classify_patches(patches, params.margin_threshold, params.temperature)
    grid = np.full((ROWS, COLS), ERASED, dtype=np.int8)
    for cell, votes in enumerate(shapes.reshape(ROWS * COLS, 9)):
        s = vote_symbol([int(v) for v in votes])
        if s is not None:
            grid[divmod(cell, COLS)] = int(s)
    return grid, margins


def decode_epoch(frames: Sequence[np.ndarray], params: DecoderParams = DecoderParams(), start: int = 0) -> EpochResult:
    """Decode one epoch of consecutive camera frames.

    A missing quad is not raised; it yields an all-erased bit stream.
    """
    acc = accumulate_epoch(
        frames, params.decay_weights(len(frames)), params.c, params.blur_sigma, params.blur_ksize
    )
    try:
        quad = detect_frame_quad(acc.flicker_combined)
    except QuadNotFound as exc:
        return EpochResult(
            start=start,
            length=len(frames),
            bits=np.full(NBITS, ERASED, dtype=np.int8),
            payload=None,
            erased_bytes=36,
            erased_symbols=ROWS * COLS,
            error=f"QuadNotFound: {exc}",
        )
    corrected = correct_perspective(acc, quad)
    score = border_score(corrected.flicker_combined)
    if score < params.border_check:
        return EpochResult(
            start=start,
            length=len(frames),
            bits=np.full(NBITS, ERASED, dtype=np.int8),
            payload=None,
            erased_bytes=36,
            erased_symbols=ROWS * COLS,
            quad=np.round(quad, 3).tolist(),
            error=f"QuadNotFound: border check {score:.2f} below {params.border_check}",
        )
    plane = corrected.combined if params.classify_plane == "combined" else corrected.flicker_combined
    grid, margins = decode_grid(plane, params)
    bits = grid_to_bits(grid)
    payload, erased = _decode_bits(bits, params.rs_guard)
    hist, _ = np.histogram(margins, bins=10, range=(0.0, 1.0))
    return EpochResult(
        start=start,
        length=len(frames),
        bits=bits,
        payload=payload,
        erased_bytes=erased,
        erased_symbols=int(np.count_nonzero(grid == ERASED)),
        quad=np.round(quad, 3).tolist(),
        margin_histogram=hist.tolist(),
        error=None if payload is not None else "DecodeFailure",
    )


@dataclass
class RecordingResult:
    payload: Optional[int]
    epochs: list[EpochResult]
    combined: list[dict[str, Any]]
    seed: int

    @property
    def success(self) -> bool:
        return self.payload is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "payload": None if self.payload is None else f"0x{self.payload:04X}",
            "success": self.success,
            "seed": self.seed,
            "epochs": [e.to_dict() for e in self.epochs],
            "combined": self.combined,
        }


class RecordingDecodeFailure(DecodeFailure):
    def __init__(self, result: RecordingResult) -> None:
        super().__init__("no epoch or epoch combination decoded")
        self.result = result


def _draw_epoch(rng: np.random.Generator, n_frames: int, length: int, taken: list[tuple[int, int]]) -> Optional[int]:
    if n_frames - length < 0:
        return None
    for _ in range(200):
        start = int(rng.integers(0, n_frames - length + 1))
        if all(start + length <= s or start >= s + n for s, n in taken):
            return start
    return None


def decode_recording(recording: Sequence[np.ndarray], seed: int = 0, params: DecoderParams = DecoderParams()) -> RecordingResult:
    """Sequential time-diversity decoding over up to three disjoint epochs.

    Returns on the first epoch that decodes. After each further failure,
    once at least two epochs have failed, their bit streams are merged and
    decoded. Raises :class:`RecordingDecodeFailure` (carrying the full result)
    when nothing decodes.
    """
    n = len(recording)
    if n < 2:
        raise EpochTooShort("recording has fewer than 2 frames")
    length = min(params.epoch_length, n)
    rng = np.random.default_rng(seed)
    epochs: list[EpochResult] = []
    combined: list[dict[str, Any]] = []
    taken: list[tuple[int, int]] = []
    for _ in range(params.max_epochs):
        start = _draw_epoch(rng, n, length, taken)
        if start is None:
            break
        taken.append((start, length))
        res = decode_epoch(recording[start : start + length], params, start)
        epochs.append(res)
        if res.success:
            return RecordingResult(res.payload, epochs, combined, seed)
        if len(epochs) >= 2:
            merged = combine_epochs([e.bits for e in epochs])
            payload, erased = _decode_bits(merged, params.rs_guard)
            combined.append(
                {
                    "epochs": len(epochs),
                    "erased_bits": int(np.count_nonzero(merged == ERASED)),
                    "erased_bytes": erased,
                    "payload": None if payload is None else f"0x{payload:04X}",
                }
            )
            if payload is not None:
                return RecordingResult(payload, epochs, combined, seed)
    raise RecordingDecodeFailure(RecordingResult(None, epochs, combined, seed))
