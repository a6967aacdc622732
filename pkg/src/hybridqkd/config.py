"""Run configuration: sectioned key=value profiles plus command-line overrides.

Grammar (one entry per line, '#' starts a comment anywhere):

    [section]
    key = value

Values are numbers, booleans, comma-separated number lists, or inclusive
ranges written start:stop:step. Profiles are looked up as explicit paths
first, then as <name>.profile under $HYBRIDQKD_PROFILE_DIR, then among the
bundled profiles (table1, ideal).
"""
from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field
from pathlib import Path

from .channel import ChannelModel, DetectorModel
from .errors import ConfigError, DomainError
from .photon_stats import QdSourceParams

PROFILE_DIR_ENV = "HYBRIDQKD_PROFILE_DIR"

_KNOWN_KEYS = {
    "source": {"brightness", "g2"},
    "laser": {"mu", "optimize"},
    "channel": {"db", "km", "alpha", "eta0"},
    "detector": {"e_d", "y0", "dark_rate_hz", "e0", "f_ec", "rep_rate_hz"},
    "run": {"n_pulses", "seed", "output"},
    "threshold": {"brightness", "db"},
    "figures": {"ratios", "error_rates", "brightness", "mu_brightness", "sweep_g2"},
}

_DEFAULT_FIGURE_RATIOS = [0.0, 0.2, 0.4, 0.6, 0.868]
_DEFAULT_ERROR_RATES = [0.0001, 0.005, 0.01, 0.02, 0.05]
_DEFAULT_FIGURE_BRIGHTNESS = [
    0.01, 0.02, 0.04, 0.07, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0,
]
_DEFAULT_MU_BRIGHTNESS = [0.0, 0.0409, 0.1, 0.2, 0.3, 0.45]


@dataclass
class _Entry:
    raw: str
    lineno: int | None


@dataclass
class RawConfig:
    origin: str
    entries: dict[str, dict[str, _Entry]] = field(default_factory=dict)

    def set(self, section: str, key: str, raw: str, lineno: int | None):
        self.entries.setdefault(section, {})[key] = _Entry(raw, lineno)

    def get(self, section: str, key: str) -> _Entry | None:
        return self.entries.get(section, {}).get(key)


@dataclass
class RunConfig:
    """Typed, validated run parameters shared by all CLI commands."""

    source: QdSourceParams
    mu_list: list[float]
    db_grid: list[float]
    channel: ChannelModel
    detector: DetectorModel
    n_pulses: int
    seed: int
    output: str | None
    threshold_brightness: list[float]
    threshold_db: list[float]
    figure_ratios: list[float]
    figure_error_rates: list[float]
    figure_brightness: list[float]
    figure_mu_brightness: list[float]
    figure_sweep_g2: float


def parse_profile_text(text: str, origin: str) -> RawConfig:
    raw = RawConfig(origin)
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _KNOWN_KEYS:
                raise ConfigError(f"unknown section [{section}]", lineno, origin)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value' or '[section]'", lineno, origin)
        if section is None:
            raise ConfigError("entry before any [section] header", lineno, origin)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS[section]:
            raise ConfigError(f"unknown key '{key}' in section [{section}]", lineno, origin)
        if not value:
            raise ConfigError(f"empty value for '{key}'", lineno, origin)
        raw.set(section, key, value, lineno)
    return raw


def apply_overrides(raw: RawConfig, overrides: dict[tuple[str, str], str]):
    for (section, key), value in overrides.items():
        if section not in _KNOWN_KEYS or key not in _KNOWN_KEYS[section]:
            raise ConfigError(f"unknown override --{section}.{key}")
        raw.set(section, key, value, None)


def _parse_number(token: str, entry: _Entry, origin: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"not a number: {token!r}", entry.lineno, origin) from None


def _parse_list(entry: _Entry, origin: str) -> list[float]:
    value = entry.raw
    if ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"range must be start:stop:step, got {value!r}", entry.lineno, origin
            )
        start, stop, step = (_parse_number(p, entry, origin) for p in parts)
        if step <= 0.0:
            raise ConfigError("range step must be positive", entry.lineno, origin)
        if stop < start:
            raise ConfigError("range stop must not be below start", entry.lineno, origin)
        count = int((stop - start) / step + 1e-9) + 1
        return [start + i * step for i in range(count)]
    return [_parse_number(tok.strip(), entry, origin) for tok in value.split(",")]


class _Reader:
    """Typed access to a RawConfig with line-numbered error reporting."""

    def __init__(self, raw: RawConfig):
        self.raw = raw
        self.origin = raw.origin

    def entry(self, section: str, key: str) -> _Entry | None:
        return self.raw.get(section, key)

    def number(self, section: str, key: str, default: float | None = None) -> float:
        entry = self.entry(section, key)
        if entry is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}' in [{section}]", origin=self.origin)
            return default
        return _parse_number(entry.raw, entry, self.origin)

    def integer(self, section: str, key: str, default: int) -> int:
        value = self.number(section, key, float(default))
        if value != int(value):
            entry = self.entry(section, key)
            raise ConfigError(f"'{key}' must be an integer", entry.lineno, self.origin)
        return int(value)

    def numbers(self, section: str, key: str, default: list[float] | None = None) -> list[float]:
        entry = self.entry(section, key)
        if entry is None:
            if default is None:
                raise ConfigError(f"missing required key '{key}' in [{section}]", origin=self.origin)
            return list(default)
        return _parse_list(entry, self.origin)

    def string(self, section: str, key: str) -> str | None:
        entry = self.entry(section, key)
        return entry.raw if entry is not None else None

    def build(self, factory, section: str, **kwargs):
        try:
            return factory(**kwargs)
        except DomainError as exc:
            raise ConfigError(f"[{section}] {exc}", origin=self.origin) from exc


def build_run_config(raw: RawConfig) -> RunConfig:
    reader = _Reader(raw)
    origin = raw.origin

    brightness = reader.number("source", "brightness")
    g2 = reader.number("source", "g2")
    source = reader.build(QdSourceParams, "source", brightness=brightness, g2=g2)

    mu_list = reader.numbers("laser", "mu", default=[])
    if any(mu < 0.0 for mu in mu_list):
        entry = reader.entry("laser", "mu")
        raise ConfigError(
            "laser mean photon numbers must be nonnegative",
            entry.lineno if entry else None,
            origin,
        )

    alpha = reader.number("channel", "alpha", 0.21)
    eta0 = reader.number("channel", "eta0", 1.0)
    db_entry = reader.entry("channel", "db")
    km_entry = reader.entry("channel", "km")
    if (db_entry is None) == (km_entry is None):
        lineno = (db_entry or km_entry).lineno if (db_entry or km_entry) else None
        raise ConfigError(
            "exactly one of 'db' or 'km' must be given in [channel]", lineno, origin
        )
    if db_entry is not None:
        db_grid = _parse_list(db_entry, origin)
    else:
        db_grid = [km * alpha for km in _parse_list(km_entry, origin)]
    grid_entry = db_entry or km_entry
    if any(db < 0.0 for db in db_grid):
        raise ConfigError("attenuations must be nonnegative", grid_entry.lineno, origin)
    channel = reader.build(ChannelModel, "channel", fiber_alpha=alpha, eta0=eta0)

    rep_rate = reader.number("detector", "rep_rate_hz", 81.96e6)
    y0_entry = reader.entry("detector", "y0")
    dark_entry = reader.entry("detector", "dark_rate_hz")
    if (y0_entry is None) == (dark_entry is None):
        lineno = (y0_entry or dark_entry).lineno if (y0_entry or dark_entry) else None
        raise ConfigError(
            "exactly one of 'y0' or 'dark_rate_hz' must be given in [detector]",
            lineno,
            origin,
        )
    if y0_entry is not None:
        y0 = _parse_number(y0_entry.raw, y0_entry, origin)
    else:
        y0 = _parse_number(dark_entry.raw, dark_entry, origin) / rep_rate
    detector = reader.build(
        DetectorModel,
        "detector",
        e_d=reader.number("detector", "e_d"),
        y0=y0,
        e0=reader.number("detector", "e0", 0.5),
        f_ec=reader.number("detector", "f_ec", 1.2),
        rep_rate_hz=rep_rate,
    )

    n_pulses = reader.integer("run", "n_pulses", 1_000_000)
    if n_pulses < 1:
        entry = reader.entry("run", "n_pulses")
        raise ConfigError("n_pulses must be at least 1", entry.lineno if entry else None, origin)
    seed = reader.integer("run", "seed", 1)
    if seed < 0:
        entry = reader.entry("run", "seed")
        raise ConfigError("seed must be nonnegative", entry.lineno if entry else None, origin)

    threshold_brightness = reader.numbers(
        "threshold", "brightness", default=[i * 0.05 for i in range(21)]
    )
    threshold_db = reader.numbers("threshold", "db", default=db_grid)

    return RunConfig(
        source=source,
        mu_list=mu_list,
        db_grid=db_grid,
        channel=channel,
        detector=detector,
        n_pulses=n_pulses,
        seed=seed,
        output=reader.string("run", "output"),
        threshold_brightness=threshold_brightness,
        threshold_db=threshold_db,
        figure_ratios=reader.numbers("figures", "ratios", _DEFAULT_FIGURE_RATIOS),
        figure_error_rates=reader.numbers("figures", "error_rates", _DEFAULT_ERROR_RATES),
        figure_brightness=reader.numbers("figures", "brightness", _DEFAULT_FIGURE_BRIGHTNESS),
        figure_mu_brightness=reader.numbers("figures", "mu_brightness", _DEFAULT_MU_BRIGHTNESS),
        figure_sweep_g2=reader.number("figures", "sweep_g2", 0.01),
    )


def find_profile(name_or_path: str) -> tuple[str, str]:
    """Resolve a profile to (text, origin)."""
    path = Path(name_or_path)
    if path.suffix == ".profile" or path.exists():
        if not path.exists():
            raise ConfigError(f"profile file not found: {name_or_path}")
        return path.read_text(encoding="utf-8"), str(path)
    env_dir = os.environ.get(PROFILE_DIR_ENV)
    if env_dir:
        candidate = Path(env_dir) / f"{name_or_path}.profile"
        if candidate.exists():
            return candidate.read_text(encoding="utf-8"), str(candidate)
    bundled = importlib.resources.files("hybridqkd").joinpath(
        "profiles", f"{name_or_path}.profile"
    )
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8"), f"{name_or_path}.profile (bundled)"
    raise ConfigError(f"unknown profile: {name_or_path}")


def load_config(
    name_or_path: str, overrides: dict[tuple[str, str], str] | None = None
) -> RunConfig:
    text, origin = find_profile(name_or_path)
    raw = parse_profile_text(text, origin)
    if overrides:
        apply_overrides(raw, overrides)
    return build_run_config(raw)
