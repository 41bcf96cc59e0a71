"""Homographies between the 1920x1080 screen frame and camera space.

Coordinates are pixel centers: the screen corners are (0, 0), (W-1, 0),
(W-1, H-1) and (0, H-1). Quads list corners as TL, TR, BR, BL.
"""

from __future__ import annotations

import cv2
import numpy as np

from .errors import SingularHomography


def rect_corners(width: int, height: int) -> np.ndarray:
    return np.array([[0, 0], [width - 1, 0], [width - 1, height - 1], [0, height - 1]], dtype=np.float64)


def homography_dlt(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Direct linear transform from four point correspondences.

    Solves the 8x8 system with h33 = 1. Raises SingularHomography when three
    of the points are collinear (the system is rank deficient).
    """
    src = np.asarray(src, dtype=np.float64).reshape(4, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(4, 2)
    for pts in (src, dst):
        for i in range(4):
            a, b, c = pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            scale = max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1.0)
            if abs(cross) < 1e-9 * scale * scale:
                raise SingularHomography("three corners are collinear")
    A = np.zeros((8, 8))
    rhs = np.zeros(8)
    for i, ((x, y), (u, v)) in enumerate(zip(src, dst)):
        A[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        A[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        rhs[2 * i] = u
        rhs[2 * i + 1] = v
    try:
        h = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularHomography(str(exc)) from exc
    return np.append(h, 1.0).reshape(3, 3)


def apply_homography(H: np.ndarray, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    ph = np.hstack([pts, np.ones((len(pts), 1))]) @ H.T
    return ph[:, :2] / ph[:, 2:3]


def warp(image: np.ndarray, H: np.ndarray, size: tuple[int, int], fill: float | tuple = 0) -> np.ndarray:
    """Resample ``image`` so that output pixel p takes input at H^-1 p (bilinear)."""
    if isinstance(fill, (int, float)):
        fill = (float(fill),) * 4
    return cv2.warpPerspective(
        image,
        H,
        size,
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=tuple(float(f) for f in fill),
    )


def is_convex(quad: np.ndarray) -> bool:
    q = np.asarray(quad, dtype=np.float64).reshape(4, 2)
    signs = []
    for i in range(4):
        a, b, c = q[i], q[(i + 1) % 4], q[(i + 2) % 4]
        signs.append((b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]))
    signs = np.array(signs)
    return bool(np.all(signs > 0) or np.all(signs < 0))


def quad_area(quad: np.ndarray) -> float:
    q = np.asarray(quad, dtype=np.float64).reshape(4, 2)
    x, y = q[:, 0], q[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def order_corners(pts: np.ndarray) -> np.ndarray:
    """Sort four points into TL, TR, BR, BL (image y axis points down)."""
    p = np.asarray(pts, dtype=np.float64).reshape(4, 2)
    c = p.mean(axis=0)
    ang = np.arctan2(p[:, 1] - c[1], p[:, 0] - c[0])
    p = p[np.argsort(ang)]  # clockwise on screen, starting near the left
    start = np.argmin(p[:, 0] + p[:, 1])
    return np.roll(p, -start, axis=0)
