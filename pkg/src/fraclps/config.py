"""Plain-text key=value run configuration with strict validation."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "load_config", "config_hash"]


def _parse_int(raw: str) -> int:
    return int(raw, 10)


def _parse_float(raw: str) -> float:
    if raw.lower() in ("inf", "infinity"):
        return math.inf
    return float(raw)


def _parse_int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(part.strip(), 10) for part in raw.split(",") if part.strip())


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(part.strip()) for part in raw.split(",") if part.strip())


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by the compute/verify/probe commands."""

    dim: int = 1
    n: int = 1024
    period: float = 2.0 * math.pi
    banach_m: int = 1
    banach_r: float = 2.0
    alpha: tuple[float, ...] = (1.0,)
    q: float = 2.0
    p: float = 2.0
    lam: float = 2.0
    t: float = 1.0
    t_min: float = 0.0  # 0 means: derive from the field's frequency band
    t_max: float = 0.0
    t_count: int = 400
    subordination_nodes: int = 256
    sw_near: int = 128
    sw_far: int = 128
    oversample: int = 0  # 0 means: per-dimension default
    seed: int = 20260810
    tolerance: float = 0.0  # 0 means: per-check defaults
    k_min: int = 16
    k_max: int = 48
    trials: int = 20
    probe_r: float = 4.0
    probe_q: float = 2.0
    probe_alpha: float = 16.0
    probe_trials: int = 2
    probe_m_list: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    probe_grid_n: int = 8192
    probe_base_freq: int = 2
    probe_time_count: int = 400
    probe_bounded_max: float = 1.2
    probe_growing_min: float = 1.5
    line_half_width: float = 16.0
    line_n: int = 16384


# key -> (parser, validator, legal-range description)
_SCHEMA = {
    "dim": (_parse_int, lambda v: v in (1, 2), "1 or 2"),
    "n": (_parse_int, lambda v: _is_pow2(v) and v >= 8, "a power of two >= 8"),
    "period": (_parse_float, lambda v: v > 0, "a positive real"),
    "banach_m": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "banach_r": (_parse_float, lambda v: v >= 1, "a real in [1, inf]"),
    "alpha": (_parse_float_list, lambda v: len(v) > 0 and all(a > 0 for a in v),
              "a comma list of positive reals"),
    "q": (_parse_float, lambda v: 1 < v < math.inf, "a real in (1, inf)"),
    "p": (_parse_float, lambda v: v >= 1, "a real in [1, inf]"),
    "lam": (_parse_float, lambda v: v > 1, "a real > 1"),
    "t": (_parse_float, lambda v: v > 0, "a positive real"),
    "t_min": (_parse_float, lambda v: v >= 0, "a nonnegative real (0 = auto)"),
    "t_max": (_parse_float, lambda v: v >= 0, "a nonnegative real (0 = auto)"),
    "t_count": (_parse_int, lambda v: v >= 2, "an integer >= 2"),
    "subordination_nodes": (_parse_int, lambda v: v >= 16, "an integer >= 16"),
    "sw_near": (_parse_int, lambda v: v >= 8, "an integer >= 8"),
    "sw_far": (_parse_int, lambda v: v >= 8, "an integer >= 8"),
    "oversample": (_parse_int, lambda v: v in (0, 1, 2, 4, 8), "0 (auto), 1, 2, 4 or 8"),
    "seed": (_parse_int, lambda v: v >= 0, "a nonnegative integer"),
    "tolerance": (_parse_float, lambda v: v >= 0, "a nonnegative real (0 = per-check defaults)"),
    "k_min": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "k_max": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "trials": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "probe_r": (_parse_float, lambda v: v >= 1, "a real in [1, inf]"),
    "probe_q": (_parse_float, lambda v: 1 < v < math.inf, "a real in (1, inf)"),
    "probe_alpha": (_parse_float, lambda v: v > 0, "a positive real"),
    "probe_trials": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "probe_m_list": (_parse_int_list,
                     lambda v: len(v) >= 2 and all(b > a for a, b in zip(v, v[1:])) and v[0] >= 1,
                     "a strictly increasing comma list of integers >= 1"),
    "probe_grid_n": (_parse_int, lambda v: _is_pow2(v) and v >= 8, "a power of two >= 8"),
    "probe_base_freq": (_parse_int, lambda v: v >= 1, "an integer >= 1"),
    "probe_time_count": (_parse_int, lambda v: v >= 2, "an integer >= 2"),
    "probe_bounded_max": (_parse_float, lambda v: v >= 1, "a real >= 1"),
    "probe_growing_min": (_parse_float, lambda v: v >= 1, "a real >= 1"),
    "line_half_width": (_parse_float, lambda v: v > 0, "a positive real"),
    "line_n": (_parse_int, lambda v: _is_pow2(v) and v >= 64, "a power of two >= 64"),
}


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse key=value lines; '#' starts a comment.  Unknown keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}: line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"{source}: line {lineno}: unknown config key '{key}'")
        parser, validator, legal = _SCHEMA[key]
        try:
            value = parser(raw)
        except ValueError:
            raise ConfigError(
                f"{source}: line {lineno}: key '{key}' must be {legal}, got {raw!r}"
            ) from None
        if not validator(value):
            raise ConfigError(
                f"{source}: line {lineno}: key '{key}' must be {legal}, got {raw!r}"
            )
        values[key] = value
    cfg = RunConfig(**values)
    if cfg.k_min > cfg.k_max:
        raise ConfigError(f"{source}: key 'k_min' must not exceed 'k_max'")
    if cfg.k_max >= cfg.n // 2:
        raise ConfigError(f"{source}: key 'k_max' must stay below the Nyquist limit n/2")
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def config_hash(cfg: RunConfig) -> str:
    """Stable hash of the full configuration, for output provenance."""
    canonical = ";".join(f"{f.name}={getattr(cfg, f.name)!r}" for f in fields(cfg))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()[:16]
