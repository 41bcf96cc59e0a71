"""Screen-to-camera channel simulator.

A 60 FPS display sequence is placed into the camera frame through a
homography, sampled at 120 FPS with a global-shutter exposure window, then
blurred, tone-mapped and corrupted by Gaussian noise. Recordings are lazy
sequences: camera frames are only rendered when indexed, and every frame's
noise comes from its own seed stream so the result does not depend on access
order.
"""

from __future__ import annotations

import math
import re
from collections import OrderedDict
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Optional, Sequence

import cv2
import numpy as np

from .encoder import HEIGHT, WIDTH
from .errors import ConfigError
from .geometry import homography_dlt, is_convex, rect_corners, warp

PROFILE_SCHEMA_VERSION = 1
CAMERA_HFOV_DEG = 70.0


@dataclass(frozen=True)
class ChannelProfile:
    """Parameters of one simulated screen-camera path.

    ``quad`` holds the camera-space positions of the screen's corner pixel
    centers (TL, TR, BR, BL); ``None`` places the screen over the whole
    camera frame. ``exposure`` is the shutter-open fraction of a 120 FPS
    frame period, where 0 means an instantaneous shutter.
    """

    quad: Optional[tuple[tuple[float, float], ...]] = None
    camera_width: int = WIDTH
    camera_height: int = HEIGHT
    phase: float = 0.0
    exposure: float = 0.0
    noise_sigma: float = 0.0
    gamma: float = 1.0
    contrast: float = 1.0
    brightness: float = 0.0
    blur_sigma: float = 0.0
    background: tuple[int, int, int] = (32, 32, 32)
    seed: int = 0
    name: str = field(default="custom", compare=False)

    def __post_init__(self) -> None:
        if self.quad is not None:
            q = np.asarray(self.quad, dtype=np.float64)
            if q.shape != (4, 2) or not np.all(np.isfinite(q)):
                raise ConfigError("quad must be four (x, y) points")
            if not is_convex(q):
                raise ConfigError("quad must be convex")
            object.__setattr__(self, "quad", tuple((float(x), float(y)) for x, y in q))
        if not 0.0 <= self.phase < 1.0:
            raise ConfigError("phase must lie in [0, 1)")
        if not 0.0 <= self.exposure <= 1.0:
            raise ConfigError("exposure must lie in [0, 1]")
        if self.noise_sigma < 0 or self.blur_sigma < 0:
            raise ConfigError("noise and blur must be nonnegative")
        if self.gamma <= 0 or self.contrast <= 0:
            raise ConfigError("gamma and contrast must be positive")
        if self.camera_width <= 0 or self.camera_height <= 0:
            raise ConfigError("camera size must be positive")

    def corners(self) -> np.ndarray:
        if self.quad is None:
            return rect_corners(self.camera_width, self.camera_height)
        return np.asarray(self.quad, dtype=np.float64)

    def with_seed(self, seed: int) -> "ChannelProfile":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["quad"] = None if self.quad is None else [list(p) for p in self.quad]
        d["background"] = list(self.background)
        d["schema_version"] = PROFILE_SCHEMA_VERSION
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChannelProfile":
        data = dict(data)
        version = data.pop("schema_version", PROFILE_SCHEMA_VERSION)
        if version != PROFILE_SCHEMA_VERSION:
            raise ConfigError(f"unsupported profile schema_version {version}")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown profile keys: {sorted(unknown)}")
        if data.get("quad") is not None:
            data["quad"] = tuple(tuple(p) for p in data["quad"])
        if "background" in data:
            data["background"] = tuple(int(v) for v in data["background"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def view_quad(
    occupancy: float,
    yaw_deg: float,
    pitch_deg: float = 0.0,
    camera_width: int = WIDTH,
    camera_height: int = HEIGHT,
    roll_deg: float = 0.0,
    offset: tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Camera-space quad of a 16:9 screen seen from a rotated viewpoint.

    The screen is rotated by yaw (vertical axis), pitch and roll, viewed by a
    pinhole camera with a 70 degree horizontal field of view, then scaled so
    that its bounding box spans ``occupancy`` of the camera frame along the
    tighter axis. ``offset`` shifts the result as a fraction of the slack left
    around the box.
    """
    if not 0.0 < occupancy <= 1.0:
        raise ConfigError("occupancy must lie in (0, 1]")
    if not (abs(yaw_deg) < 90 and abs(pitch_deg) < 90):
        raise ConfigError("yaw and pitch must lie strictly between -90 and 90 degrees")
    half_w, half_h = 1.0, 9.0 / 16.0
    tan_half = math.tan(math.radians(CAMERA_HFOV_DEG) / 2)
    dist = half_w / (occupancy * tan_half)
    f = (camera_width / 2) / tan_half
    pts = np.array([[-half_w, -half_h, 0], [half_w, -half_h, 0], [half_w, half_h, 0], [-half_w, half_h, 0]])
    y, p, r = (math.radians(v) for v in (yaw_deg, pitch_deg, roll_deg))
    ry = np.array([[math.cos(y), 0, math.sin(y)], [0, 1, 0], [-math.sin(y), 0, math.cos(y)]])
    rx = np.array([[1, 0, 0], [0, math.cos(p), -math.sin(p)], [0, math.sin(p), math.cos(p)]])
    rz = np.array([[math.cos(r), -math.sin(r), 0], [math.sin(r), math.cos(r), 0], [0, 0, 1]])
    world = pts @ (rz @ rx @ ry).T + np.array([0, 0, dist])
    proj = f * world[:, :2] / world[:, 2:3]
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    span = np.array([camera_width - 1, camera_height - 1], dtype=np.float64)
    scale = occupancy * np.min(span / (hi - lo))
    box = (hi - lo) * scale
    centre = span / 2 + np.asarray(offset) * (span - box) / 2
    return (proj - (lo + hi) / 2) * scale + centre


_PRESET_RE = re.compile(r"^occ(\d+)_yaw(-?\d+)$")


def preset(name: str, **overrides: Any) -> ChannelProfile:
    """Named channel profiles.

    ``identity`` is the transparent channel. ``occXX_yawYY`` places the screen
    at XX percent occupancy and YY degrees yaw with phase 0.3, exposure 0.8 and
    noise sigma 2.
    """
    if name == "identity":
        return replace(ChannelProfile(name="identity"), **overrides)
    m = _PRESET_RE.match(name)
    if not m:
        raise ConfigError(f"unknown channel preset {name!r}")
    occ, yaw = int(m.group(1)) / 100.0, float(m.group(2))
    base = ChannelProfile(
        quad=tuple(map(tuple, view_quad(occ, yaw))),
        phase=0.3,
        exposure=0.8,
        noise_sigma=2.0,
        name=name,
    )
    return replace(base, **overrides)


def preset_names() -> list[str]:
    names = ["identity"]
    for occ in (100, 75, 60, 50, 25):
        for yaw in (0, 20, -20, 30, -30, 40, -40):
            names.append(f"occ{occ}_yaw{yaw}")
    return names


def blend_weights(k: int, n_display: int, phase: float, exposure: float) -> list[tuple[int, float]]:
    """Display frames seen by camera frame k and their overlap weights.

    Times are in display-frame periods: the shutter opens at k/2 + phase and
    stays open for exposure/2. Windows running past the last display frame
    keep seeing it.
    """
    start = k / 2.0 + phase
    if exposure == 0.0:
        return [(min(int(math.floor(start)), n_display - 1), 1.0)]
    end = start + exposure / 2.0
    out: dict[int, float] = {}
    j = int(math.floor(start))
    while j < end:
        overlap = min(end, j + 1) - max(start, j)
        if overlap > 0:
            idx = min(j, n_display - 1)
            out[idx] = out.get(idx, 0.0) + overlap
        j += 1
    total = sum(out.values())
    return [(idx, w / total) for idx, w in sorted(out.items())]


def _blend(frames: Sequence[np.ndarray], weights: list[tuple[int, float]]) -> np.ndarray:
    if len(weights) == 1:
        return frames[weights[0][0]]
    acc = np.zeros(frames[weights[0][0]].shape, dtype=np.float32)
    for idx, w in weights:
        acc += np.float32(w) * frames[idx].astype(np.float32)
    return np.floor(acc + 0.5).clip(0, 255).astype(np.uint8)


class _LazyFrames(Sequence):
    """Base for lazily rendered frame sequences with a small frame cache."""

    cache_size = 8

    def __init__(self, length: int) -> None:
        self._length = length
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()

    def __len__(self) -> int:
        return self._length

    def _render(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def __getitem__(self, k):  # type: ignore[override]
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += self._length
        if not 0 <= k < self._length:
            raise IndexError(k)
        if k in self._cache:
            self._cache.move_to_end(k)
            return self._cache[k]
        frame = self._render(k)
        self._cache[k] = frame
        if len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return frame

    def materialize(self) -> list[np.ndarray]:
        return [self[i] for i in range(len(self))]


class TemporalResampler(_LazyFrames):
    def __init__(self, display: Sequence[np.ndarray], phase: float, exposure: float) -> None:
        if len(display) == 0:
            raise ValueError("display sequence is empty")
        super().__init__(2 * len(display))
        self.display = display
        self.phase = phase
        self.exposure = exposure

    def _render(self, k: int) -> np.ndarray:
        return _blend(self.display, blend_weights(k, len(self.display), self.phase, self.exposure))


def temporal_resample(display: Sequence[np.ndarray], phase: float = 0.0, exposure: float = 0.0) -> TemporalResampler:
    """120 FPS camera view of a 60 FPS display sequence."""
    return TemporalResampler(display, phase, exposure)


def _is_full_frame(profile: ChannelProfile, frame: np.ndarray) -> bool:
    h, w = frame.shape[:2]
    return (
        (w, h) == (profile.camera_width, profile.camera_height)
        and np.array_equal(profile.corners(), rect_corners(w, h))
    )


def warp_to_camera(frame: np.ndarray, profile: ChannelProfile) -> np.ndarray:
    """Render a screen frame into the camera frame at the profile quad."""
    if _is_full_frame(profile, frame):
        return frame
    h, w = frame.shape[:2]
    H = homography_dlt(rect_corners(w, h), profile.corners())
    return warp(frame, H, (profile.camera_width, profile.camera_height), fill=profile.background)


def degrade(frame: np.ndarray, profile: ChannelProfile, frame_index: int = 0) -> np.ndarray:
    """Blur, affine tone, gamma and additive noise, then clamp to 8 bits."""
    identity = (
        profile.blur_sigma == 0
        and profile.contrast == 1
        and profile.brightness == 0
        and profile.gamma == 1
        and profile.noise_sigma == 0
    )
    if identity:
        return frame
    x = frame.astype(np.float32)
    if profile.blur_sigma > 0:
        x = cv2.GaussianBlur(x, (0, 0), profile.blur_sigma)
    if profile.contrast != 1 or profile.brightness != 0:
        x = x * np.float32(profile.contrast) + np.float32(profile.brightness)
    if profile.gamma != 1:
        x = 255.0 * (np.clip(x, 0, 255) / 255.0) ** np.float32(profile.gamma)
    if profile.noise_sigma > 0:
        rng = np.random.default_rng([profile.seed, frame_index])
        x = x + np.float32(profile.noise_sigma) * rng.standard_normal(x.shape, dtype=np.float32)
    return np.floor(np.clip(x, 0, 255) + 0.5).astype(np.uint8)


class _Warped(_LazyFrames):
    def __init__(self, display: Sequence[np.ndarray], profile: ChannelProfile) -> None:
        super().__init__(len(display))
        self.display = display
        self.profile = profile

    def _render(self, k: int) -> np.ndarray:
        return warp_to_camera(self.display[k], self.profile)


class Recording(_LazyFrames):
    """Lazy 120 FPS camera recording produced by :func:`simulate`."""

    def __init__(self, display: Sequence[np.ndarray], profile: ChannelProfile) -> None:
        if len(display) == 0:
            raise ValueError("display sequence is empty")
        super().__init__(2 * len(display))
        self.profile = profile
        self._sampled = TemporalResampler(_Warped(display, profile), profile.phase, profile.exposure)

    def _render(self, k: int) -> np.ndarray:
        return degrade(self._sampled[k], self.profile, k)


def simulate(encoded: Sequence[np.ndarray], profile: ChannelProfile) -> Recording:
    """Camera recording of a 60 FPS encoded sequence through ``profile``."""
    return Recording(encoded, profile)
