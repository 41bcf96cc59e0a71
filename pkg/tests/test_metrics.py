from __future__ import annotations

import json

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from flickercode.channel import ChannelProfile
from flickercode.encoder import encode_video
from flickercode.errors import DimensionMismatch
from flickercode.fixtures import gray_card, texture
from flickercode.metrics import BenchReport, luma, psnr, quality_report, run_bench, ssim, trial_seeds


@pytest.fixture(scope="module")
def tex():
    return texture(1, seed=3)[0]


def test_psnr_identical_and_offset(tex):
    assert psnr(tex, tex) == 99.0
    base = np.clip(tex, 0, 254)
    assert psnr(base, base + 1) == pytest.approx(48.13, abs=0.01)


def test_psnr_symmetric(tex):
    rng = np.random.default_rng(0)
    noisy = np.clip(tex + rng.normal(0, 3, tex.shape), 0, 255).astype(np.uint8)
    assert psnr(tex, noisy) == psnr(noisy, tex)


def test_dimension_mismatch(tex):
    with pytest.raises(DimensionMismatch):
        psnr(tex, tex[:-1])
    with pytest.raises(DimensionMismatch):
        ssim(tex, tex[:, :-1])
    with pytest.raises(DimensionMismatch):
        quality_report([tex], [])


def test_ssim_matches_reference_implementation(tex):
    rng = np.random.default_rng(1)
    noisy = np.clip(tex + rng.normal(0, 8, tex.shape), 0, 255).astype(np.uint8)
    ref = structural_similarity(
        luma(tex), luma(noisy), gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255
    )
    assert ssim(tex, noisy) == pytest.approx(ref, abs=2e-3)


def test_ssim_identity_inversion_symmetry(tex):
    assert ssim(tex, tex) == pytest.approx(1.0, abs=1e-9)
    noise = np.random.default_rng(5).integers(0, 256, size=(256, 320, 3), dtype=np.uint8)
    inv = 255 - noise
    value = ssim(noise, inv)
    assert value < 0
    ref = structural_similarity(
        luma(noise), luma(inv), gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255
    )
    assert value == pytest.approx(ref, abs=2e-3)
    rng = np.random.default_rng(2)
    other = np.clip(tex + rng.normal(0, 10, tex.shape), 0, 255).astype(np.uint8)
    assert abs(ssim(tex, other) - ssim(other, tex)) <= 1e-9


def test_quality_report_summary(tex):
    rep = quality_report([tex, tex], [tex, tex])
    s = rep.summary()
    assert s["psnr_mean"] == 99.0 and s["ssim_mean"] == pytest.approx(1.0)
    assert rep.to_dict()["frames"] == 2


def test_trial_seeds_are_distinct_and_stable():
    seeds = {trial_seeds(7, p, t) for p in range(3) for t in range(20)}
    assert len(seeds) == 60
    assert trial_seeds(7, 1, 4) == trial_seeds(7, 1, 4)


@pytest.fixture(scope="module")
def short_clip():
    enc = encode_video(gray_card(2, 128), 0x1234)
    return [enc[0], enc[1]] * 6


def test_bench_transparent_channel(short_clip):
    rep = run_bench(short_clip, 0x1234, [ChannelProfile()], trials=20, seed=3)
    assert rep.error_rate == 0.0 and rep.successes == 20
    again = run_bench(short_clip, 0x1234, [ChannelProfile()], trials=20, seed=3)
    assert json.dumps(rep.to_dict(), sort_keys=True) == json.dumps(again.to_dict(), sort_keys=True)


def test_bench_destroyed_channel(short_clip):
    rep = run_bench(short_clip, 0x1234, [ChannelProfile(name="noise", noise_sigma=64.0)], trials=3, seed=1)
    assert rep.error_rate == 1.0


def test_bench_report_arithmetic():
    rep = BenchReport(code=1, seed=0, trials=4, profiles=[{"trials": 4, "successes": 3}, {"trials": 4, "successes": 1}])
    assert rep.error_rate == 1.0 - 4 / 8
    with pytest.raises(ValueError):
        run_bench([], 1, [ChannelProfile()], trials=0)
