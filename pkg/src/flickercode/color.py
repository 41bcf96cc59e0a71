"""Conversions between 8-bit sRGB, linear RGB and OKLAB.

All math is float64. Arrays carry the channel axis last, so a single pixel
is just a length-3 array and a frame is ``(H, W, 3)``.
"""

from __future__ import annotations

import numpy as np

# Ottosson's published OKLAB matrices (linear sRGB -> LMS, LMS' -> Lab and back).
RGB_TO_LMS = np.array(
    [
        [0.4122214708, 0.5363325363, 0.0514459929],
        [0.2119034982, 0.6806995451, 0.1073969566],
        [0.0883024619, 0.2817188376, 0.6299787005],
    ]
)
LMS_TO_LAB = np.array(
    [
        [0.2104542553, 0.7936177850, -0.0040720468],
        [1.9779984951, -2.4285922050, 0.4505937099],
        [0.0259040371, 0.7827717662, -0.8086757660],
    ]
)
LAB_TO_LMS = np.array(
    [
        [1.0, 0.3963377774, 0.2158037573],
        [1.0, -0.1055613458, -0.0638541728],
        [1.0, -0.0894841775, -1.2914855480],
    ]
)
LMS_TO_RGB = np.array(
    [
        [4.0767416621, -3.3077115913, 0.2309699292],
        [-1.2684380046, 2.6097574011, -0.3413193965],
        [-0.0041960863, -0.7034186147, 1.7076147010],
    ]
)


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    """sRGB transfer decode for values normalized to [0, 1]."""
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(c: np.ndarray) -> np.ndarray:
    """sRGB transfer encode. Negative inputs are mirrored so the curve stays odd."""
    c = np.asarray(c, dtype=np.float64)
    a = np.abs(c)
    enc = np.where(a <= 0.0031308, 12.92 * a, 1.055 * a ** (1 / 2.4) - 0.055)
    return np.copysign(enc, c)


# The decode side only ever sees bytes, so a 256-entry table is exact.
_LINEAR_LUT = srgb_to_linear(np.arange(256) / 255.0)


def linear_rgb_to_oklab(rgb: np.ndarray) -> np.ndarray:
    lms = np.asarray(rgb, dtype=np.float64) @ RGB_TO_LMS.T
    return np.cbrt(lms) @ LMS_TO_LAB.T


def oklab_to_linear_rgb(lab: np.ndarray) -> np.ndarray:
    lms = (np.asarray(lab, dtype=np.float64) @ LAB_TO_LMS.T) ** 3
    return lms @ LMS_TO_RGB.T


def srgb_to_oklab(pixels: np.ndarray) -> np.ndarray:
    """Convert 8-bit sRGB values to OKLAB.

    Args:
        pixels: integer array ``(..., 3)`` with channels in [0, 255].

    Returns:
        float64 array ``(..., 3)`` holding (L, A, B).

    Examples:
        >>> srgb_to_oklab([255, 0, 0]).round(4)
        array([0.628 , 0.2249, 0.1258])
    """
    p = np.asarray(pixels)
    if p.dtype != np.uint8:
        if np.any((p < 0) | (p > 255)):
            raise ValueError("sRGB channels must lie in [0, 255]")
        p = p.astype(np.uint8)
    return linear_rgb_to_oklab(_LINEAR_LUT[p])


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def oklab_to_srgb_float(lab: np.ndarray) -> np.ndarray:
    """Inverse OKLAB to unclamped, unrounded sRGB in [0, 255] units."""
    return 255.0 * linear_to_srgb(oklab_to_linear_rgb(lab))


def oklab_to_srgb(lab: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Convert OKLAB to 8-bit sRGB, clamping anything out of gamut.

    Returns:
        ``(srgb, clamped)`` where ``srgb`` is uint8 ``(..., 3)`` and
        ``clamped`` is a bool array ``(...)`` set wherever a channel had to be
        clamped to reach [0, 255].
    """
    v = round_half_away(oklab_to_srgb_float(lab))
    clamped = np.any((v < 0) | (v > 255), axis=-1)
    return np.clip(v, 0, 255).astype(np.uint8), clamped


def oklab_to_srgb_clamped_float(lab: np.ndarray) -> np.ndarray:
    """sRGB float values after clamping to [0, 255], before 8-bit rounding."""
    return np.clip(oklab_to_srgb_float(lab), 0.0, 255.0)
