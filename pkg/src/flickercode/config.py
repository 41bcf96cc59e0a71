"""Run configuration loaded from JSON. Unknown keys are rejected."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .channel import ChannelProfile, preset
from .decoder import DecoderParams
from .encoder import DEFAULT_RESIDUAL_BOUND, DEFAULT_STRENGTH, ObjectiveWeights, SplitSelector, default_candidates
from .errors import ConfigError

CONFIG_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SplitConfig:
    lambda_levels: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3)
    mix_levels: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    candidates: Optional[tuple[tuple[float, float, float], ...]] = None
    mode: str = "exact"
    residual_bound: Optional[float] = DEFAULT_RESIDUAL_BOUND

    def candidate_array(self) -> np.ndarray:
        if self.candidates is not None:
            return np.array(self.candidates, dtype=np.float64)
        return default_candidates(self.lambda_levels, self.mix_levels)


@dataclass(frozen=True)
class RunConfig:
    strength: float = DEFAULT_STRENGTH
    split: SplitConfig = field(default_factory=SplitConfig)
    decoder: DecoderParams = field(default_factory=DecoderParams)
    profile: Optional[ChannelProfile] = None
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.strength > 0:
            raise ConfigError("strength must be positive")

    def selector(self) -> SplitSelector:
        try:
            return SplitSelector(
                self.strength,
                self.split.candidate_array(),
                ObjectiveWeights(),
                self.split.mode,
                residual_bound=self.split.residual_bound,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "strength": self.strength,
            "split": asdict(self.split),
            "decoder": asdict(self.decoder),
            "profile": None if self.profile is None else self.profile.to_dict(),
            "seed": self.seed,
        }


def _reject_unknown(data: dict[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    version = data.pop("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema_version {version}")
    _reject_unknown(data, {f.name for f in fields(RunConfig)}, "config")
    kwargs: dict[str, Any] = {}
    try:
        if "strength" in data:
            kwargs["strength"] = float(data["strength"])
        if "seed" in data:
            kwargs["seed"] = int(data["seed"])
        if data.get("split") is not None:
            split = dict(data["split"])
            _reject_unknown(split, {f.name for f in fields(SplitConfig)}, "split")
            for key in ("lambda_levels", "mix_levels"):
                if key in split:
                    split[key] = tuple(float(v) for v in split[key])
            if split.get("residual_bound") is not None:
                split["residual_bound"] = float(split["residual_bound"])
            if split.get("candidates") is not None:
                split["candidates"] = tuple(tuple(float(v) for v in c) for c in split["candidates"])
            kwargs["split"] = SplitConfig(**split)
        if data.get("decoder") is not None:
            dec = dict(data["decoder"])
            _reject_unknown(dec, {f.name for f in fields(DecoderParams)}, "decoder")
            kwargs["decoder"] = DecoderParams(**dec)
        if data.get("profile") is not None:
            kwargs["profile"] = load_profile(data["profile"])
        return RunConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Optional[str | Path]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(data)


def load_profile(source: Any) -> ChannelProfile:
    """A profile from a preset name, a JSON file path or an inline dict."""
    if isinstance(source, ChannelProfile):
        return source
    if isinstance(source, dict):
        return ChannelProfile.from_dict(source)
    if isinstance(source, str):
        path = Path(source)
        if path.suffix == ".json" or path.exists():
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read profile {source}: {exc}") from exc
            return ChannelProfile.from_dict(data)
        return preset(source)
    raise ConfigError(f"cannot interpret profile {source!r}")


def load_profiles(path: str | Path) -> list[ChannelProfile]:
    """A list of profiles: JSON array of names/dicts, or ``{"profiles": [...]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read profiles {path}: {exc}") from exc
    if isinstance(data, dict):
        _reject_unknown(data, {"profiles", "schema_version"}, "profiles file")
        data = data.get("profiles")
    if not isinstance(data, list) or not data:
        raise ConfigError("profiles file must list at least one profile")
    return [load_profile(p) for p in data]
