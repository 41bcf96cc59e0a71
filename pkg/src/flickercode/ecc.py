"""Shortened Reed-Solomon RS(36, 2) over GF(256) and the symbol-grid layout.

The field is GF(2^8) modulo x^8 + x^4 + x^3 + x^2 + 1 (0x11D) with generator
2. The generator polynomial is narrow-sense, roots alpha^1 .. alpha^34. A
codeword is 2 payload bytes (big-endian) followed by 34 parity bytes, and the
decoder corrects any mix of t errors and e erasures with 2t + e <= 34.

Grid cells hold a shape index 0..3 or ``ERASED``; soft bits hold 0, 1 or
``ERASED``.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from ._kernels import RS_DEGENERATE, RS_OK, RS_RESIDUAL, RS_ROOTS_OUTSIDE, RS_TOO_MANY_ERRORS, rs_decode_kernel
from .errors import DecodeFailure, LengthMismatch

N = 36
K = 2
NSYM = N - K
PRIM = 0x11D
ROWS, COLS = 9, 16
NBITS = 2 * ROWS * COLS
ERASED = -1

_EXP = [0] * 512
_LOG = [0] * 256
_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= PRIM
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]
_EXP_NP = np.array(_EXP, dtype=np.int64)
_LOG_NP = np.array(_LOG, dtype=np.int64)


class Shape(IntEnum):
    """Ellipse orientation; the value is the two bits it carries."""

    E0 = 0
    E45 = 1
    E90 = 2
    E135 = 3

    @property
    def angle(self) -> int:
        return 45 * int(self)


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return _EXP[255 - _LOG[a]]


def gf_pow(a: int, n: int) -> int:
    if a == 0:
        return 0
    return _EXP[(_LOG[a] * n) % 255]


def _generator_poly() -> list[int]:
    # high-degree-first, monic
    g = [1]
    for j in range(1, NSYM + 1):
        root = _EXP[j]
        nxt = g + [0]
        for i, c in enumerate(g):
            nxt[i + 1] ^= gf_mul(c, root)
        g = nxt
    return g


GENERATOR = _generator_poly()


def _parity(msg: Sequence[int]) -> list[int]:
    buf = list(msg) + [0] * NSYM
    for i in range(len(msg)):
        coef = buf[i]
        if coef:
            for j in range(1, len(GENERATOR)):
                buf[i + j] ^= gf_mul(GENERATOR[j], coef)
    return buf[len(msg):]


def check_code(code: int) -> int:
    if not isinstance(code, (int, np.integer)) or isinstance(code, bool):
        raise TypeError("payload must be an integer")
    if not 0 <= int(code) <= 0xFFFF:
        raise ValueError(f"payload {code!r} does not fit in 16 bits")
    return int(code)


def rs_encode(code: int) -> np.ndarray:
    """Systematic codeword for a 16-bit payload as a uint8 array of 36 bytes."""
    code = check_code(code)
    msg = [code >> 8, code & 0xFF]
    return np.array(msg + _parity(msg), dtype=np.uint8)


# exponent of alpha^j at position i (position i is the coefficient of x^(35-i))
_SYN_POW = (np.arange(1, NSYM + 1)[:, None] * (N - 1 - np.arange(N))[None, :]) % 255


def syndromes(word: Sequence[int]) -> list[int]:
    r = np.asarray(word, dtype=np.int64)
    nz = r != 0
    if not nz.any():
        return [0] * NSYM
    terms = _EXP_NP[(_LOG_NP[r[nz]][None, :] + _SYN_POW[:, nz]) % 255]
    return np.bitwise_xor.reduce(terms, axis=1).tolist()


def rs_decode(received: Sequence[Optional[int]]) -> int:
    """Errors-and-erasures decoding of a (possibly damaged) codeword.

    Args:
        received: 36 entries, each a byte value or ``None`` for an erasure.

    Returns:
        The 16-bit payload.

    Raises:
        DecodeFailure: when the errata exceed the 2t + e <= 34 bound, or
            the corrected word is not a codeword.
    """
    if len(received) != N:
        raise LengthMismatch(f"expected {N} symbols, got {len(received)}")
    erasures = [i for i, v in enumerate(received) if v is None or v == ERASED]
    if len(erasures) > NSYM:
        raise DecodeFailure(f"{len(erasures)} erasures exceed {NSYM}")
    word = [0 if (v is None or v == ERASED) else int(v) for v in received]
    for v in word:
        if not 0 <= v <= 255:
            raise ValueError(f"symbol {v} is not a byte")

    arr = np.array(word, dtype=np.int64)
    mask = np.zeros(N, dtype=np.bool_)
    mask[erasures] = True
    status = rs_decode_kernel(arr, mask, NSYM, _EXP_NP, _LOG_NP)
    if status != RS_OK:
        raise DecodeFailure(_FAILURES[status])
    return int(arr[0] << 8 | arr[1])


_FAILURES = {
    RS_TOO_MANY_ERRORS: "too many errors",
    RS_ROOTS_OUTSIDE: "error locator roots fall outside the shortened code",
    RS_DEGENERATE: "degenerate error evaluator",
    RS_RESIDUAL: "residual syndrome after correction",
}


def shapes_to_bits(shape: Optional[int]) -> tuple[int, int]:
    """E0->00, E45->01, E90->10, E135->11; an erasure yields two erased bits."""
    if shape is None or shape == ERASED:
        return ERASED, ERASED
    s = int(shape)
    if not 0 <= s <= 3:
        raise ValueError(f"unknown shape {shape!r}")
    return s >> 1, s & 1


def _byte_cells() -> np.ndarray:
    cells = np.zeros((N, 4, 2), dtype=np.int64)
    for byte in range(32):
        bi, bj = divmod(byte, 8)
        r, c = 2 * bi, 2 * bj
        cells[byte] = [(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)]
    for k in range(4):
        cells[32 + k] = [(8, 4 * k + m) for m in range(4)]
    return cells


# BYTE_CELLS[b, m] is the (row, col) carrying bits 7-2m and 6-2m of byte b.
BYTE_CELLS = _byte_cells()


def interleave(codeword: Sequence[int]) -> np.ndarray:
    """Place 36 codeword bytes on the 9x16 shape grid, two bits per cell."""
    cw = np.asarray(codeword, dtype=np.int64)
    if cw.shape != (N,):
        raise LengthMismatch(f"codeword must have {N} bytes")
    grid = np.empty((ROWS, COLS), dtype=np.int8)
    for m in range(4):
        grid[BYTE_CELLS[:, m, 0], BYTE_CELLS[:, m, 1]] = (cw >> (6 - 2 * m)) & 3
    return grid


def grid_to_bits(grid: np.ndarray) -> np.ndarray:
    """Row-major soft bit stream (288 entries) from a shape grid."""
    g = np.asarray(grid, dtype=np.int8).reshape(-1)
    bits = np.empty(NBITS, dtype=np.int8)
    bits[0::2] = np.where(g == ERASED, ERASED, g >> 1)
    bits[1::2] = np.where(g == ERASED, ERASED, g & 1)
    return bits


def bits_to_grid(bits: np.ndarray) -> np.ndarray:
    """Inverse of :func:`grid_to_bits`; a cell is erased if either bit is."""
    b = np.asarray(bits, dtype=np.int8)
    if b.shape != (NBITS,):
        raise LengthMismatch(f"bit stream must have {NBITS} entries")
    hi, lo = b[0::2], b[1::2]
    g = np.where((hi == ERASED) | (lo == ERASED), ERASED, 2 * hi + lo)
    return g.astype(np.int8).reshape(ROWS, COLS)


def deinterleave(grid: np.ndarray) -> list[Optional[int]]:
    """Collect bytes from the grid; any erased constituent cell erases the byte."""
    g = np.asarray(grid, dtype=np.int64)
    if g.shape != (ROWS, COLS):
        raise LengthMismatch(f"grid must be {ROWS}x{COLS}")
    out: list[Optional[int]] = []
    for byte in range(N):
        vals = g[BYTE_CELLS[byte, :, 0], BYTE_CELLS[byte, :, 1]]
        if np.any(vals == ERASED):
            out.append(None)
        else:
            out.append(int((vals[0] << 6) | (vals[1] << 4) | (vals[2] << 2) | vals[3]))
    return out
