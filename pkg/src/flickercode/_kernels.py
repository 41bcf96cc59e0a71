"""Compiled kernels: flicker-split selection, sRGB to OKLAB, and RS(36, 2) decoding."""

from __future__ import annotations

import numba
import numpy as np

from .color import LAB_TO_LMS, LMS_TO_LAB, LMS_TO_RGB, RGB_TO_LMS

# skip the TBB probe; the bundled TBB is too old and only produces a warning
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_M1 = np.ascontiguousarray(RGB_TO_LMS)
_M2 = np.ascontiguousarray(LMS_TO_LAB)
_M2I = np.ascontiguousarray(LAB_TO_LMS)
_M1I = np.ascontiguousarray(LMS_TO_RGB)


@numba.njit(cache=True, inline="always")
def _encode_clamped(lin: float) -> float:
    if lin <= 0.0:
        return 0.0
    if lin >= 1.0:
        return 255.0
    if lin <= 0.0031308:
        return 255.0 * 12.92 * lin
    return 255.0 * (1.055 * lin ** (1.0 / 2.4) - 0.055)


@numba.njit(cache=True)
def _lab_to_clamped_srgb(L: float, A: float, B: float, out: np.ndarray) -> None:
    l_ = _M2I[0, 0] * L + _M2I[0, 1] * A + _M2I[0, 2] * B
    m_ = _M2I[1, 0] * L + _M2I[1, 1] * A + _M2I[1, 2] * B
    s_ = _M2I[2, 0] * L + _M2I[2, 1] * A + _M2I[2, 2] * B
    l = l_ * l_ * l_
    m = m_ * m_ * m_
    s = s_ * s_ * s_
    for c in range(3):
        out[c] = _encode_clamped(_M1I[c, 0] * l + _M1I[c, 1] * m + _M1I[c, 2] * s)


@numba.njit(cache=True, inline="always")
def _worst_residual(orig: float, p: float, q: float) -> float:
    """Largest |orig - mean| over the 8-bit roundings of ``p`` and ``q``.

    Values within 1e-7 of a rounding tie count both ways, so float noise
    between this kernel and the numpy color path cannot hide a violation.
    """
    lo = np.floor(p + 0.5 - 1e-7) + np.floor(q + 0.5 - 1e-7)
    hi = np.floor(p + 0.5 + 1e-7) + np.floor(q + 0.5 + 1e-7)
    return max(abs(orig - lo / 2.0), abs(orig - hi / 2.0))


@numba.njit(cache=True, parallel=True)
def best_split_indices(
    rgb: np.ndarray,
    cands: np.ndarray,
    mirror: np.ndarray,
    d: float,
    lin_lut: np.ndarray,
    w_dark: np.ndarray,
    w_bright: np.ndarray,
    l_switch: float,
    scales: np.ndarray,
    bound: float,
    interior_lo: int,
    interior_hi: int,
) -> np.ndarray:
    """Chosen ``level * K + candidate`` code for every pixel in ``rgb``.

    The candidate minimizes the weighted fused-color objective. Pixels whose
    channels all lie in ``[interior_lo, interior_hi]`` only consider
    candidates whose displayed 8-bit pair keeps every channel within
    ``bound`` of the original; the amplitude ``d * scales[level]`` steps down
    the ladder until such a candidate exists. A negative ``bound`` disables
    the constraint. ``mirror[k]`` is the index of ``-cands[k]`` (or -1): a
    mirrored pair produces the same two frames in swapped order, so its
    values are reused.
    """
    npix = rgb.shape[0]
    ncand = cands.shape[0]
    nlev = scales.shape[0]
    out = np.empty(npix, dtype=np.int32)
    for i in numba.prange(npix):
        r0 = rgb[i, 0]
        g0 = rgb[i, 1]
        b0 = rgb[i, 2]
        lr = lin_lut[r0]
        lg = lin_lut[g0]
        lb = lin_lut[b0]
        l_ = np.cbrt(_M1[0, 0] * lr + _M1[0, 1] * lg + _M1[0, 2] * lb)
        m_ = np.cbrt(_M1[1, 0] * lr + _M1[1, 1] * lg + _M1[1, 2] * lb)
        s_ = np.cbrt(_M1[2, 0] * lr + _M1[2, 1] * lg + _M1[2, 2] * lb)
        L = _M2[0, 0] * l_ + _M2[0, 1] * m_ + _M2[0, 2] * s_
        A = _M2[1, 0] * l_ + _M2[1, 1] * m_ + _M2[1, 2] * s_
        B = _M2[2, 0] * l_ + _M2[2, 1] * m_ + _M2[2, 2] * s_
        w = w_bright if L > l_switch else w_dark
        constrained = (
            bound >= 0.0
            and interior_lo <= r0 <= interior_hi
            and interior_lo <= g0 <= interior_hi
            and interior_lo <= b0 <= interior_hi
        )
        obj = np.empty(ncand)
        ok = np.empty(ncand, dtype=np.bool_)
        p = np.empty(3)
        q = np.empty(3)
        code = 0
        for lev in range(nlev):
            dd = d * scales[lev]
            best = np.inf
            best_k = -1
            for k in range(ncand):
                mk = mirror[k]
                if 0 <= mk < k:
                    v = obj[mk]
                    f = ok[mk]
                else:
                    dl = cands[k, 0] * dd
                    da = cands[k, 1] * dd
                    db = cands[k, 2] * dd
                    _lab_to_clamped_srgb(L + dl, A + da, B + db, p)
                    _lab_to_clamped_srgb(L - dl, A - da, B - db, q)
                    v = (
                        w[0] * abs(r0 - (p[0] + q[0]) / 2.0)
                        + w[1] * abs(g0 - (p[1] + q[1]) / 2.0)
                        + w[2] * abs(b0 - (p[2] + q[2]) / 2.0)
                    )
                    f = True
                    if constrained:
                        f = (
                            _worst_residual(r0, p[0], q[0]) <= bound
                            and _worst_residual(g0, p[1], q[1]) <= bound
                            and _worst_residual(b0, p[2], q[2]) <= bound
                        )
                obj[k] = v
                ok[k] = f
                if f and v < best:
                    best = v
                    best_k = k
            if best_k >= 0:
                code = lev * ncand + best_k
                break
            code = lev * ncand
        out[i] = code
    return out


_M1F = _M1.astype(np.float32)
_M2F = _M2.astype(np.float32)


@numba.njit(cache=True, inline="always")
def _cbrt_f32(a, buf, bufi):
    """Cube root of a float32 via an exponent-bit seed and three Newton steps.

    ``buf`` is a 1-element float32 scratch array and ``bufi`` its int32 view.
    Relative error is at float32 rounding level for the LMS range used here.
    """
    if a <= 0.0:
        return np.float32(0.0)
    buf[0] = a
    bufi[0] = bufi[0] // 3 + 709921077
    g = buf[0]
    three = np.float32(3.0)
    g = g - (g * g * g - a) / (three * g * g)
    g = g - (g * g * g - a) / (three * g * g)
    g = g - (g * g * g - a) / (three * g * g)
    return g


@numba.njit(cache=True, parallel=True)
def _srgb8_to_oklab_kernel(img, lut, m1, m2):
    h, w, _ = img.shape
    out = np.empty((h, w, 3), dtype=np.float32)
    for y in numba.prange(h):
        buf = np.empty(1, dtype=np.float32)
        bufi = buf.view(np.int32)
        for x in range(w):
            lr = lut[img[y, x, 0]]
            lg = lut[img[y, x, 1]]
            lb = lut[img[y, x, 2]]
            l_ = _cbrt_f32(m1[0, 0] * lr + m1[0, 1] * lg + m1[0, 2] * lb, buf, bufi)
            m_ = _cbrt_f32(m1[1, 0] * lr + m1[1, 1] * lg + m1[1, 2] * lb, buf, bufi)
            s_ = _cbrt_f32(m1[2, 0] * lr + m1[2, 1] * lg + m1[2, 2] * lb, buf, bufi)
            for c in range(3):
                out[y, x, c] = m2[c, 0] * l_ + m2[c, 1] * m_ + m2[c, 2] * s_
    return out


def srgb8_to_oklab_f32(img: np.ndarray, lin_lut: np.ndarray) -> np.ndarray:
    """uint8 ``(H, W, 3)`` sRGB frame to float32 OKLAB (max abs error ~5e-7)."""
    return _srgb8_to_oklab_kernel(img, lin_lut.astype(np.float32), _M1F, _M2F)


# ---------------------------------------------------------------- RS(36, 2)

RS_OK = 0
RS_TOO_MANY_ERRORS = 1
RS_ROOTS_OUTSIDE = 2
RS_DEGENERATE = 3
RS_RESIDUAL = 4


@numba.njit(cache=True)
def _gf_mul(a: int, b: int, exp: np.ndarray, log: np.ndarray) -> int:
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@numba.njit(cache=True)
def _rs_syndromes(word: np.ndarray, nsym: int, exp: np.ndarray, log: np.ndarray) -> np.ndarray:
    n = word.shape[0]
    synd = np.zeros(nsym, dtype=np.int64)
    for i in range(n):
        v = word[i]
        if v == 0:
            continue
        lv = log[v]
        for j in range(nsym):
            synd[j] ^= exp[(lv + (j + 1) * (n - 1 - i)) % 255]
    return synd


@numba.njit(cache=True)
def _rs_eval_inverse(poly: np.ndarray, deg: int, pos: int, n: int, exp: np.ndarray, log: np.ndarray) -> int:
    """poly evaluated at X^-1 for the locator X = alpha^(n-1-pos)."""
    acc = 0
    step = (255 - (n - 1 - pos) % 255) % 255
    for j in range(deg + 1):
        c = poly[j]
        if c:
            acc ^= exp[(log[c] + step * j) % 255]
    return acc


@numba.njit(cache=True)
def rs_decode_kernel(word: np.ndarray, erased: np.ndarray, nsym: int, exp: np.ndarray, log: np.ndarray) -> int:
    """Errors-and-erasures decoding in place; returns an RS_* status code.

    ``word`` holds byte values (0 at erased positions); fcr = 1 and
    generator 2, as in the pure-python field tables passed in.
    """
    n = word.shape[0]
    synd = _rs_syndromes(word, nsym, exp, log)
    if not synd.any():
        return RS_OK
    size = nsym + 2
    lam = np.zeros(size, dtype=np.int64)
    lam[0] = 1
    e = 0
    for pos in range(n):
        if erased[pos]:
            xk = exp[n - 1 - pos]
            for j in range(e + 1, 0, -1):
                lam[j] ^= _gf_mul(lam[j - 1], xk, exp, log)
            e += 1
    b = lam.copy()
    tmp = np.zeros(size, dtype=np.int64)
    L = e
    for r in range(e + 1, nsym + 1):
        delta = 0
        for j in range(min(r, size)):
            if r - j < 1:
                break
            delta ^= _gf_mul(lam[j], synd[r - j - 1], exp, log)
        # b <- x * b
        for j in range(size - 1, 0, -1):
            b[j] = b[j - 1]
        b[0] = 0
        if delta == 0:
            continue
        for j in range(size):
            tmp[j] = lam[j] ^ _gf_mul(b[j], delta, exp, log)
        if 2 * L <= r + e - 1:
            inv = exp[(255 - log[delta]) % 255]
            for j in range(size):
                b[j] = _gf_mul(lam[j], inv, exp, log)
            L = r + e - L
        for j in range(size):
            lam[j] = tmp[j]
    nu = 0
    for j in range(size):
        if lam[j]:
            nu = j
    if nu != L or 2 * (nu - e) + e > nsym:
        return RS_TOO_MANY_ERRORS

    roots = np.empty(n, dtype=np.int64)
    count = 0
    for pos in range(n):
        if _rs_eval_inverse(lam, nu, pos, n, exp, log) == 0:
            roots[count] = pos
            count += 1
    if count != nu:
        return RS_ROOTS_OUTSIDE

    omega = np.zeros(nsym, dtype=np.int64)
    for i in range(nsym):
        if synd[i] == 0:
            continue
        for j in range(min(nu + 1, nsym - i)):
            omega[i + j] ^= _gf_mul(synd[i], lam[j], exp, log)
    dlam = np.zeros(size, dtype=np.int64)
    for j in range(1, nu + 1, 2):
        dlam[j - 1] = lam[j]
    for k in range(count):
        pos = roots[k]
        num = _rs_eval_inverse(omega, nsym - 1, pos, n, exp, log)
        den = _rs_eval_inverse(dlam, nu, pos, n, exp, log)
        if den == 0:
            return RS_DEGENERATE
        if num:
            word[pos] ^= exp[(log[num] - log[den]) % 255]
    if _rs_syndromes(word, nsym, exp, log).any():
        return RS_RESIDUAL
    return RS_OK
