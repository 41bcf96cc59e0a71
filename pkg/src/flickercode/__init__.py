"""Screen-to-camera codes hidden in imperceptible 60 Hz color flicker.

A 16-bit payload is Reed-Solomon protected, laid out as a 9x16 grid of
oriented ellipses and embedded into video as complementary OKLAB offsets on
alternating frames. A 120 FPS camera recovers it by temporal differencing.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .channel import ChannelProfile, preset, simulate
from .decoder import DecoderParams, decode_epoch, decode_recording
from .ecc import Shape, rs_decode, rs_encode
from .encoder import SplitSelector, encode_video
from .errors import DecodeFailure
from .metrics import psnr, run_bench, ssim

__all__ = [
    "ChannelProfile",
    "DecodeFailure",
    "DecoderParams",
    "Shape",
    "SplitSelector",
    "decode_epoch",
    "decode_recording",
    "encode_video",
    "preset",
    "psnr",
    "rs_decode",
    "rs_encode",
    "run_bench",
    "simulate",
    "ssim",
]
