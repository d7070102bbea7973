"""Effect parameter sets and their strict dict/JSON round-trip."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Mapping


class ConfigError(ValueError):
    """Invalid or unknown configuration value."""


def _check_range(name: str, rng, lo_bound=None, hi_bound=None):
    if len(rng) != 2:
        raise ConfigError(f"{name}: expected [lo, hi], got {list(rng)!r}")
    lo, hi = rng
    if lo > hi:
        raise ConfigError(f"{name}: empty range [{lo}, {hi}]")
    if lo_bound is not None and lo < lo_bound:
        raise ConfigError(f"{name}: {lo} is below {lo_bound}")
    if hi_bound is not None and hi > hi_bound:
        raise ConfigError(f"{name}: {hi} is above {hi_bound}")


def _check_prob(name: str, p: float):
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"{name}: probability {p} outside [0, 1]")


def _check_nonneg(name: str, v):
    if v < 0:
        raise ConfigError(f"{name}: must be >= 0, got {v}")


@dataclass(frozen=True)
class InkBleedParams:
    dilation_radius: int = 2
    bleed_probability: float = 0.3
    darken_alpha_range: tuple[float, float] = (0.1, 0.4)
    blur_radius: int = 1

    def __post_init__(self):
        _check_nonneg("ink_bleed.dilation_radius", self.dilation_radius)
        _check_prob("ink_bleed.bleed_probability", self.bleed_probability)
        _check_range("ink_bleed.darken_alpha_range", self.darken_alpha_range, 0.0, 1.0)
        _check_nonneg("ink_bleed.blur_radius", self.blur_radius)


@dataclass(frozen=True)
class LetterpressParams:
    blob_density: float = 40.0  # blobs per 10^4 ink pixels
    blob_sigma_range: tuple[float, float] = (1.0, 3.0)
    lighten_range: tuple[float, float] = (0.2, 0.6)

    def __post_init__(self):
        _check_nonneg("letterpress.blob_density", self.blob_density)
        _check_range("letterpress.blob_sigma_range", self.blob_sigma_range)
        if self.blob_sigma_range[0] <= 0:
            raise ConfigError("letterpress.blob_sigma_range: sigma must be > 0")
        _check_range("letterpress.lighten_range", self.lighten_range, 0.0, 1.0)


@dataclass(frozen=True)
class LowInkParams:
    line_count_range: tuple[int, int] = (5, 15)
    period_range: tuple[int, int] = (10, 30)
    lighten_add_range: tuple[int, int] = (60, 120)

    def __post_init__(self):
        _check_range("low_ink.line_count_range", self.line_count_range, 0)
        _check_range("low_ink.period_range", self.period_range, 1)
        _check_range("low_ink.lighten_add_range", self.lighten_add_range, 0, 255)


@dataclass(frozen=True)
class JpegParams:
    quality_range: tuple[int, int] = (25, 95)
    chroma_subsample: bool = True

    def __post_init__(self):
        _check_range("jpeg.quality_range", self.quality_range, 1, 100)


@dataclass(frozen=True)
class DirtyScreenParams:
    cell_size_range: tuple[int, int] = (8, 16)
    dot_probability: float = 0.5
    darken_range: tuple[int, int] = (10, 40)

    def __post_init__(self):
        _check_range("dirty_screen.cell_size_range", self.cell_size_range, 1)
        _check_prob("dirty_screen.dot_probability", self.dot_probability)
        _check_range("dirty_screen.darken_range", self.darken_range, 0, 255)


@dataclass(frozen=True)
class EffectParams:
    ink_bleed: InkBleedParams = field(default_factory=InkBleedParams)
    letterpress: LetterpressParams = field(default_factory=LetterpressParams)
    low_ink: LowInkParams = field(default_factory=LowInkParams)
    jpeg: JpegParams = field(default_factory=JpegParams)
    dirty_screen: DirtyScreenParams = field(default_factory=DirtyScreenParams)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any] | None) -> "EffectParams":
        return strict_from_dict(cls, data or {}, "effect_params")

    def to_dict(self) -> dict:
        return to_plain(self)


def strict_from_dict(cls, data: Mapping[str, Any], where: str):
    """Build a (possibly nested) frozen dataclass, rejecting unknown keys."""
    if not isinstance(data, Mapping):
        raise ConfigError(f"{where}: expected an object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = getattr(cls(), name) if _has_defaults(cls) else None
        if dataclasses.is_dataclass(default):
            kwargs[name] = strict_from_dict(type(default), value, f"{where}.{name}")
        elif isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{where}.{name}: expected a 2-element array")
            kwargs[name] = tuple(_coerce_scalar(v, default[0], f"{where}.{name}") for v in value)
        else:
            kwargs[name] = _coerce_scalar(value, default, f"{where}.{name}")
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _has_defaults(cls) -> bool:
    try:
        cls()
    except TypeError:
        return False
    return True


def _coerce_scalar(value, like, where):
    if isinstance(like, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(like, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(like, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    return value


def to_plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple):
        return [to_plain(v) for v in obj]
    return obj
