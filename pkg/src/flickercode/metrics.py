"""PSNR/SSIM video quality and the error-rate benchmark harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import cv2
import numpy as np

from .channel import ChannelProfile, simulate
from .decoder import DecoderParams, RecordingDecodeFailure, decode_recording
from .errors import DimensionMismatch

PSNR_IDENTICAL = 99.0
REPORT_SCHEMA_VERSION = 1


def _check_pair(ref: np.ndarray, test: np.ndarray) -> None:
    if ref.shape != test.shape:
        raise DimensionMismatch(f"{ref.shape} vs {test.shape}")


def psnr(ref: np.ndarray, test: np.ndarray) -> float:
    """PSNR in dB over all RGB samples with peak 255; identical frames give 99."""
    _check_pair(ref, test)
    diff = ref.astype(np.float64) - test.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_IDENTICAL
    return 10.0 * np.log10(255.0**2 / mse)


def luma(frame: np.ndarray) -> np.ndarray:
    """ITU-R BT.601 luma of an RGB frame (float64, 0..255)."""
    f = frame.astype(np.float64)
    if f.ndim == 2:
        return f
    return 0.299 * f[..., 0] + 0.587 * f[..., 1] + 0.114 * f[..., 2]


_WINDOW = cv2.getGaussianKernel(11, 1.5, ktype=cv2.CV_64F)
_WINDOW = _WINDOW @ _WINDOW.T


def ssim(ref: np.ndarray, test: np.ndarray) -> float:
    """Single-scale SSIM on luma, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03.

    Averaged over window positions fully inside the frame.
    """
    _check_pair(ref, test)
    x, y = luma(ref), luma(test)
    c1, c2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2

    def filt(a: np.ndarray) -> np.ndarray:
        return cv2.filter2D(a, cv2.CV_64F, _WINDOW, borderType=cv2.BORDER_REFLECT)[5:-5, 5:-5]

    mx, my = filt(x), filt(y)
    sxx = filt(x * x) - mx * mx
    syy = filt(y * y) - my * my
    sxy = filt(x * y) - mx * my
    num = (2 * mx * my + c1) * (2 * sxy + c2)
    den = (mx * mx + my * my + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))


@dataclass
class QualityReport:
    psnr: list[float]
    ssim: list[float]

    def summary(self) -> dict[str, float]:
        p, s = np.array(self.psnr), np.array(self.ssim)
        return {
            "psnr_mean": float(p.mean()) if len(p) else float("nan"),
            "psnr_std": float(p.std()) if len(p) else float("nan"),
            "ssim_mean": float(s.mean()) if len(s) else float("nan"),
            "ssim_std": float(s.std()) if len(s) else float("nan"),
        }

    def to_dict(self) -> dict[str, Any]:
        return {"schema_version": REPORT_SCHEMA_VERSION, **self.summary(), "frames": len(self.psnr),
                "psnr": self.psnr, "ssim": self.ssim}


def quality_report(refs: Sequence[np.ndarray], tests: Sequence[np.ndarray]) -> QualityReport:
    if len(refs) != len(tests):
        raise DimensionMismatch(f"{len(refs)} reference frames vs {len(tests)} test frames")
    return QualityReport(
        psnr=[float(psnr(a, b)) for a, b in zip(refs, tests)],
        ssim=[ssim(a, b) for a, b in zip(refs, tests)],
    )


def trial_seeds(seed: int, profile_index: int, trial: int) -> tuple[int, int]:
    """Channel and decoder seeds for one trial, derived from the top-level seed."""
    a, b = np.random.SeedSequence([seed, profile_index, trial]).generate_state(2)
    return int(a), int(b)


@dataclass
class BenchReport:
    code: int
    seed: int
    trials: int
    profiles: list[dict[str, Any]] = field(default_factory=list)
    config: Optional[dict[str, Any]] = None

    @property
    def total_trials(self) -> int:
        return sum(p["trials"] for p in self.profiles)

    @property
    def successes(self) -> int:
        return sum(p["successes"] for p in self.profiles)

    @property
    def error_rate(self) -> float:
        return 1.0 - self.successes / self.total_trials if self.total_trials else float("nan")

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["code"] = f"0x{self.code:04X}"
        d.update(
            schema_version=REPORT_SCHEMA_VERSION,
            total_trials=self.total_trials,
            successes=self.successes,
            error_rate=self.error_rate,
        )
        return d


def run_bench(
    encoded: Sequence[np.ndarray],
    code: int,
    profiles: Sequence[ChannelProfile],
    trials: int,
    seed: int = 0,
    params: DecoderParams = DecoderParams(),
) -> BenchReport:
    """Simulate and decode ``trials`` recordings per profile.

    A trial succeeds when the decoded payload equals ``code``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    report = BenchReport(code=code, seed=seed, trials=trials)
    for pi, profile in enumerate(profiles):
        rows = []
        for t in range(trials):
            channel_seed, decode_seed = trial_seeds(seed, pi, t)
            recording = simulate(encoded, profile.with_seed(channel_seed))
            try:
                result = decode_recording(recording, decode_seed, params)
            except RecordingDecodeFailure as exc:
                result = exc.result
            rows.append(
                {
                    "trial": t,
                    "channel_seed": channel_seed,
                    "decode_seed": decode_seed,
                    "success": result.payload == code,
                    "payload": None if result.payload is None else f"0x{result.payload:04X}",
                    "epochs_used": len(result.epochs),
                    "erased_bytes": [e.erased_bytes for e in result.epochs],
                }
            )
        ok = sum(r["success"] for r in rows)
        report.profiles.append(
            {
                "name": profile.name,
                "profile": profile.to_dict(),
                "trials": trials,
                "successes": ok,
                "error_rate": 1.0 - ok / trials,
                "per_trial": rows,
            }
        )
    return report
