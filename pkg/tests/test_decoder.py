from __future__ import annotations

import numpy as np
import pytest

from flickercode.channel import ChannelProfile, simulate, view_quad
from flickercode.decoder import (
    JITTER_DIRECTIONS,
    PATCH_SIDE,
    AccumulatorImage,
    DecoderParams,
    EpochResult,
    PatchVerdict,
    RecordingDecodeFailure,
    accumulate_epoch,
    classify_patch,
    classify_patches,
    combine_epochs,
    correct_perspective,
    decode_epoch,
    decode_recording,
    detect_frame_quad,
    extract_patches,
    normalize_patch,
    vote_symbol,
)
from flickercode.ecc import ERASED, NBITS, Shape, bits_to_grid, deinterleave, grid_to_bits, interleave, rs_decode, rs_encode
from flickercode.encoder import SplitSelector, ellipse_mask, encode_video
from flickercode.errors import DecodeFailure, DegeneratePatch, EpochTooShort, LengthMismatch, QuadNotFound, SingularHomography
from flickercode.fixtures import gray_card
from flickercode.geometry import apply_homography, homography_dlt, rect_corners, warp

W, H = 1920, 1080
E = ERASED


# ---------------------------------------------------------------- accumulator


def _lab_frames(n, delta):
    """4x4 float OKLAB frames with pixel (1, 2) alternating +-delta in A."""
    base = np.zeros((4, 4, 3), np.float32)
    base[..., 0] = 0.5
    base[0, 0] = (0.9, 0.3, -0.2)  # reference pixel fixes the per-channel range
    frames = []
    for i in range(n):
        f = base.copy()
        f[1, 2, 1] += delta if i % 2 == 0 else -delta
        frames.append(f)
    return frames


def test_accumulator_hand_oracle():
    n, delta = 6, 0.05
    frames = _lab_frames(n, delta)
    w = 0.9 ** np.arange(n - 1)
    acc = accumulate_epoch(frames, w, blur_sigma=0.0)
    # pre-normalization A plane: F_1 everywhere, plus sum w_i * 2 delta at (1, 2)
    raw = np.zeros((4, 4))
    raw[0, 0] = 0.3
    raw[1, 2] = delta + w.sum() * 2 * delta
    expected = (raw - raw.min()) * 255.0 / (raw.max() - raw.min())
    np.testing.assert_allclose(acc.A, expected, atol=1e-3)
    assert acc.A.min() == 0.0 and acc.A.max() == pytest.approx(255.0)
    np.testing.assert_allclose(acc.combined, acc.A + acc.B + np.float32(0.25) * acc.L)


def test_identical_frames_give_normalized_first_frame():
    rng = np.random.default_rng(0)
    f = rng.random((8, 8, 3)).astype(np.float32)
    acc = accumulate_epoch([f] * 5, blur_sigma=0.0)
    for k, plane in enumerate((acc.L, acc.A, acc.B)):
        ch = f[..., k]
        np.testing.assert_allclose(plane, (ch - ch.min()) * 255 / (ch.max() - ch.min()), atol=1e-3)
    assert not acc.flicker.any()


def test_accumulator_checks():
    f = np.zeros((4, 4, 3), np.float32)
    with pytest.raises(EpochTooShort):
        accumulate_epoch([f])
    with pytest.raises(ValueError):
        accumulate_epoch([f, f, f], [0.5, 0.9])
    with pytest.raises(ValueError):
        accumulate_epoch([f, f], [1.0], c=1.0)


@pytest.fixture(scope="module")
def encoded_gray():
    return encode_video(gray_card(12, 128), 0xABCD)


def test_scale_invariance_power_of_two(encoded_gray):
    frames = encoded_gray[:12]
    w = DecoderParams().decay_weights(12)
    a = accumulate_epoch(frames, w)
    b = accumulate_epoch(frames, 4.0 * w)
    # scaling by a power of two is exact in floating point for the difference terms
    np.testing.assert_array_equal(a.flicker, b.flicker)


def test_scale_invariance_general(encoded_gray):
    frames = encoded_gray[:12]
    w = DecoderParams().decay_weights(12)
    a = accumulate_epoch(frames, w)
    b = accumulate_epoch(frames, 0.37 * w)
    np.testing.assert_allclose(a.flicker, b.flicker, atol=1e-3)


def test_sign_agnostic_flicker_plane(encoded_gray):
    frames = encoded_gray[:12]
    swapped = encoded_gray[1:13] if len(encoded_gray) > 12 else [encoded_gray[i ^ 1] for i in range(12)]
    a = accumulate_epoch(frames)
    b = accumulate_epoch(swapped)
    np.testing.assert_allclose(a.flicker, b.flicker, atol=1e-3)


def test_sign_agnostic_full_accumulator():
    frames = _lab_frames(8, 0.04)
    flipped = _lab_frames(8, -0.04)
    a = accumulate_epoch(frames, blur_sigma=0.0)
    b = accumulate_epoch(flipped, blur_sigma=0.0)
    # negating the deltas changes F_1 only in the A channel at the flicker pixel
    np.testing.assert_allclose(a.flicker, b.flicker, atol=1e-4)
    np.testing.assert_allclose(a.L, b.L, atol=1e-4)
    np.testing.assert_allclose(a.B, b.B, atol=1e-4)


# ---------------------------------------------------------------- quad


def _border_plane(x0=100, y0=100, x1=1820, y1=980, width=13):
    plane = np.zeros((H, W), np.float32)
    plane[y0 : y1 + 1, x0 : x1 + 1] = 255
    plane[y0 + width : y1 + 1 - width, x0 + width : x1 + 1 - width] = 0
    return plane


def test_detects_axis_aligned_border():
    quad = detect_frame_quad(_border_plane())
    truth = np.array([[100, 100], [1820, 100], [1820, 980], [100, 980]], float)
    assert np.abs(quad - truth).max() <= 2


@pytest.mark.parametrize("yaw,pitch", [(30.0, 0.0), (-30.0, 0.0), (40.0, 0.0), (20.0, 20.0), (0.0, 40.0)])
def test_detects_warped_border(yaw, pitch):
    full = _border_plane(0, 0, W - 1, H - 1)
    truth = view_quad(0.8, yaw, pitch)
    Hm = homography_dlt(rect_corners(W, H), truth)
    quad = detect_frame_quad(warp(full, Hm, (W, H)))
    assert np.abs(quad - truth).max() <= 2


def test_detects_border_behind_static_content():
    plane = _border_plane() * 0.6
    plane[300:700, 400:1200] = 255  # brighter static block inside the screen
    acc = AccumulatorImage(plane, plane, plane, 0.25, flicker=np.repeat(_border_plane()[..., None], 3, -1))
    quad = detect_frame_quad(acc)
    assert np.abs(quad - [[100, 100], [1820, 100], [1820, 980], [100, 980]]).max() <= 2


def test_detects_border_broken_into_pieces():
    plane = _border_plane()
    plane[100:113, 1100:1180] = 0  # gap in the top edge
    plane[600:700, 100:113] = 0  # gap in the left edge
    quad = detect_frame_quad(plane)
    assert np.abs(quad - [[100, 100], [1820, 100], [1820, 980], [100, 980]]).max() <= 2


def test_flat_accumulator_has_no_quad():
    with pytest.raises(QuadNotFound):
        detect_frame_quad(np.zeros((H, W), np.float32))


def test_correct_perspective_identity():
    rng = np.random.default_rng(1)
    planes = [rng.random((H, W)).astype(np.float32) * 255 for _ in range(3)]
    out = correct_perspective(AccumulatorImage(*planes, c=0.25), rect_corners(W, H))
    for a, b in zip(planes, (out.L, out.A, out.B)):
        np.testing.assert_allclose(a, b, atol=1e-3)


def test_correct_perspective_collinear():
    z = np.zeros((H, W), np.float32)
    with pytest.raises(SingularHomography):
        correct_perspective(AccumulatorImage(z, z, z, 0.25), np.array([[0, 0], [10, 10], [20, 20], [30, 30]], float))


def test_warp_round_trip_of_points():
    quad = view_quad(0.6, 30.0, 10.0)
    Hm = homography_dlt(rect_corners(W, H), quad)
    np.testing.assert_allclose(apply_homography(Hm, rect_corners(W, H)), quad, atol=1e-6)


# ---------------------------------------------------------------- patches


def test_patch_geometry():
    assert PATCH_SIDE == 86
    xs = np.tile(np.arange(W, dtype=np.float32), (H, 1))
    ys = np.tile(np.arange(H, dtype=np.float32)[:, None], (1, W))
    px = extract_patches(xs, 0, 0)
    py = extract_patches(ys, 0, 0)
    assert px.shape == (9, 86, 86)
    assert px[0].min() == 17 and px[0].max() == 102
    assert py[0].min() == 17 and py[0].max() == 102
    # N patch is centred at (60, 54)
    north = JITTER_DIRECTIONS.index((0, -1))
    assert north == 1
    assert px[1][43, 43] == 60 and py[1][43, 43] == 54
    total = sum(len(extract_patches(xs, r, c)) for r in range(9) for c in range(16))
    assert total == 1296


def test_patches_clamp_at_edges():
    xs = np.tile(np.arange(W, dtype=np.float32), (H, 1))
    p = extract_patches(xs, 0, 0)
    west = JITTER_DIRECTIONS.index((-1, 0))
    assert p[west].min() == 11  # 60 - 6 - 43
    with pytest.raises(IndexError):
        extract_patches(xs, 9, 0)


def _rendered(shape):
    c = PATCH_SIDE // 2
    return ellipse_mask(shape, PATCH_SIDE, PATCH_SIDE, c, c).astype(np.float32) * 255


@pytest.mark.parametrize("shape", list(Shape))
def test_clean_patch_is_recognised(shape):
    v = classify_patch(_rendered(shape))
    assert v.shape == shape and v.margin > 0.35


def test_noise_patches_are_erased():
    rng = np.random.default_rng(7)
    patches = rng.normal(128, 30, size=(1000, PATCH_SIDE, PATCH_SIDE))
    shapes, margins = classify_patches(patches)
    assert np.mean(shapes == ERASED) >= 0.99


def test_constant_patch_is_erased():
    flat = np.full((PATCH_SIDE, PATCH_SIDE), 77.0)
    with pytest.raises(DegeneratePatch):
        normalize_patch(flat)
    v = classify_patch(flat)
    assert v.erased and v.margin is None


def test_vote_examples():
    assert vote_symbol([Shape.E90] * 9) == Shape.E90
    assert vote_symbol([Shape.E0] * 4 + [Shape.E45] * 4 + [None]) is None
    assert vote_symbol([Shape.E135] * 3 + [Shape.E0] * 2 + [None] * 4) == Shape.E135
    assert vote_symbol([PatchVerdict(Shape.E45, 0.9)] * 2 + [PatchVerdict(None, None)] * 7) is None
    with pytest.raises(LengthMismatch):
        vote_symbol([Shape.E0] * 8)


def test_vote_never_returns_fewer_than_three():
    rng = np.random.default_rng(3)
    for _ in range(2000):
        votes = [None if v == 4 else int(v) for v in rng.integers(0, 5, size=9)]
        s = vote_symbol(votes)
        if s is not None:
            assert votes.count(int(s)) >= 3


# ---------------------------------------------------------------- combining


def test_combine_examples():
    assert combine_epochs([[1], [E], [1]]).tolist() == [1]
    assert combine_epochs([[0], [1], [E]]).tolist() == [E]
    assert combine_epochs([[E], [E], [E]]).tolist() == [E]
    with pytest.raises(LengthMismatch):
        combine_epochs([[0, 1], [0]])


def test_diversity_dominance():
    rng = np.random.default_rng(11)
    for _ in range(200):
        k = int(rng.integers(2, 4))
        streams = rng.choice([0, 1, E], size=(k, NBITS), p=[0.4, 0.4, 0.2]).astype(np.int8)
        known = streams != E
        conflicts = int(np.sum(np.any(known & (streams == 1), 0) & np.any(known & (streams == 0), 0)))
        merged = combine_epochs(list(streams))
        erased = int(np.sum(merged == E))
        assert erased <= int(np.min(np.sum(streams == E, axis=1))) + conflicts
        truth = rng.integers(0, 2, NBITS).astype(np.int8)
        clean = np.where(rng.random((k, NBITS)) < 0.3, E, truth).astype(np.int8)
        assert np.sum(combine_epochs(list(clean)) == E) <= np.min(np.sum(clean == E, axis=1))


def _complementary_streams(code=0xBEEF):
    """Two bit streams, each with 40 erased bits covering all 36 bytes, in disjoint positions."""
    bits = grid_to_bits(interleave(rs_encode(code)))
    byte_of = np.empty(NBITS, int)
    for i in range(NBITS):
        probe = bits.copy()
        probe[i] = E
        byte_of[i] = [j for j, v in enumerate(deinterleave(bits_to_grid(probe))) if v is None][0]
    a, b = bits.copy(), bits.copy()
    taken_a, taken_b = [], []
    for byte in range(36):
        idx = np.flatnonzero(byte_of == byte)
        taken_a.append(idx[0])
        taken_b.append(idx[1])
    spare = [i for i in range(NBITS) if i not in taken_a and i not in taken_b]
    taken_a += spare[:4]
    taken_b += spare[4:8]
    a[taken_a] = E
    b[taken_b] = E
    return bits, a, b


def test_complementary_erasures_decode_only_when_combined():
    bits, a, b = _complementary_streams()
    assert np.sum(a == E) == 40 and np.sum(b == E) == 40
    assert not np.any((a == E) & (b == E))
    for s in (a, b):
        with pytest.raises(DecodeFailure):
            rs_decode(deinterleave(bits_to_grid(s)))
    merged = combine_epochs([a, b])
    assert np.array_equal(merged, bits)
    assert rs_decode(deinterleave(bits_to_grid(merged))) == 0xBEEF


def test_recording_combines_failed_epochs(monkeypatch):
    _, a, b = _complementary_streams()
    streams = iter([a, b])
    calls = []

    def fake_epoch(frames, params=DecoderParams(), start=0):
        calls.append(start)
        return EpochResult(start, len(frames), next(streams), None, 36, 144, error="DecodeFailure")

    monkeypatch.setattr("flickercode.decoder.decode_epoch", fake_epoch)
    res = decode_recording([np.zeros((2, 2, 3), np.uint8)] * 60, seed=5)
    assert res.payload == 0xBEEF
    assert len(calls) == 2
    starts = sorted(calls)
    assert starts[0] + 12 <= starts[1]
    assert res.combined[0]["erased_bits"] == 0


# ---------------------------------------------------------------- end to end


@pytest.fixture(scope="module")
def selector():
    return SplitSelector()


def _gray_recording(code, selector):
    enc = encode_video(gray_card(2, 128), code, selector=selector)
    return simulate([enc[0], enc[1]] * 3, ChannelProfile())


def test_loopback_epoch(encoded_gray):
    rec = simulate(encoded_gray, ChannelProfile())
    res = decode_epoch(rec[:12])
    assert res.payload == 0xABCD
    assert res.erased_bytes == 0 and len(res.bits) == 288
    again = decode_epoch(rec[:12])
    assert again.to_dict() == res.to_dict()


def test_unencoded_epoch_fails():
    rec = simulate(gray_card(12, 128), ChannelProfile())
    res = decode_epoch(rec[:12])
    assert res.payload is None and res.erased_bytes >= 35


def test_unencoded_recording_raises():
    rec = simulate(gray_card(24, 128), ChannelProfile())
    with pytest.raises(DecodeFailure) as info:
        decode_recording(rec, seed=1)
    assert isinstance(info.value, RecordingDecodeFailure)
    assert len(info.value.result.epochs) == 3


def test_first_success_stops(encoded_gray):
    rec = simulate(encoded_gray, ChannelProfile())
    res = decode_recording(rec, seed=2)
    assert res.payload == 0xABCD and len(res.epochs) == 1 and res.combined == []
    assert decode_recording(rec, seed=2).to_dict() == res.to_dict()


def test_loopback_random_payloads(selector):
    rng = np.random.default_rng(2024)
    codes = rng.choice(1 << 16, size=256, replace=False)
    failures = [int(c) for c in codes if decode_epoch(_gray_recording(int(c), selector)[:12]).payload != c]
    assert failures == []


def test_decoder_params_validation():
    for bad in ({"epoch_length": 1}, {"c": 1.0}, {"decay": 0.0}, {"blur_ksize": 8}, {"max_epochs": 4},
                {"classify_plane": "L"}, {"rs_guard": 40}):
        with pytest.raises(ValueError):
            DecoderParams(**bad)
