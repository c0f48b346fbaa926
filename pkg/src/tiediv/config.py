"""Run configuration shared by the CLI stages.

Values come from three layers: built-in defaults, a flat key=value
config file, and command-line flags, in increasing precedence. All
values arrive as strings and are converted here, so both layers share
one parser and one set of error messages.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from datetime import date
from pathlib import Path
from typing import Any, Callable, Mapping

from .experiments import DEFAULT_MAX_HORIZON, DEFAULT_Q_GRID, DEFAULT_WIDTH_GRID
from .ingest import IngestOptions
from .preprocess import PreprocessConfig
from .synth import SynthConfig


def parse_zone_offset(text: str) -> int:
    """Accept minutes ("330", "-240") or hh:mm offsets ("+05:30")."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("+-")
    parts = body.split(":")
    if len(parts) != 2:
        raise ValueError(f"unparseable zone offset: {text!r}")
    try:
        hours, minutes = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"unparseable zone offset: {text!r}") from None
    return sign * (hours * 60 + minutes)


def _parse_date(text: str) -> date:
    return date.fromisoformat(text.strip())


def _parse_int_grid(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _parse_float_grid(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_q(text: str) -> float | None:
    text = text.strip().lower()
    if text in ("", "shannon", "none"):
        return None
    return float(text)


@dataclass
class RunConfig:
    gps: str | None = None
    survey: str | None = None
    outdir: str = "out"
    delimiter: str = ","
    naive_utc_offset_minutes: int = 0
    window_start: date = date(2016, 4, 1)
    window_end: date = date(2016, 5, 1)
    zone_offset_minutes: int = 330
    accuracy_cutoff_m: float = 60.0
    coverage_fraction: float = 0.2
    min_days: int = 5
    min_common_days: int = 7
    threshold_m: float = 50.0
    width_t: int = 60
    q: float | None = None
    width_grid: tuple[int, ...] = DEFAULT_WIDTH_GRID
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID
    max_horizon: int = DEFAULT_MAX_HORIZON
    seed: int = 0
    synth_pairs: int = 100
    synth_days: int = 14
    synth_encounters_per_day: int = 3
    synth_schedule_slots: tuple[int, ...] = (102, 150, 222)
    synth_jitter: int = 1
    synth_meet_prob: float = 0.9
    synth_places: int = 3
    synth_coverage_slots: int = 60

    def ingest_options(self) -> IngestOptions:
        return IngestOptions(
            delimiter=self.delimiter,
            naive_utc_offset_minutes=self.naive_utc_offset_minutes,
        )

    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig(
            window_start=self.window_start,
            window_end=self.window_end,
            zone_offset_minutes=self.zone_offset_minutes,
            accuracy_cutoff_m=self.accuracy_cutoff_m,
            coverage_fraction=self.coverage_fraction,
            min_days=self.min_days,
            min_common_days=self.min_common_days,
        )

    def synth_config(self) -> SynthConfig:
        return SynthConfig(
            n_pairs_per_archetype=self.synth_pairs,
            n_days=self.synth_days,
            encounters_per_day=self.synth_encounters_per_day,
            schedule_slots=self.synth_schedule_slots,
            jitter_slots=self.synth_jitter,
            meet_prob=self.synth_meet_prob,
            n_places=self.synth_places,
            coverage_slots=self.synth_coverage_slots,
            start_day=self.window_start,
            seed=self.seed,
        )

    def echo(self) -> dict[str, str]:
        """Deterministic flat serialization for artifact provenance headers."""
        out: dict[str, str] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                out[f.name] = ""
            elif isinstance(value, tuple):
                out[f.name] = ",".join(str(v) for v in value)
            else:
                out[f.name] = str(value)
        return out


_PARSERS: dict[str, Callable[[str], Any]] = {
    "gps": str,
    "survey": str,
    "outdir": str,
    "delimiter": str,
    "naive_utc_offset_minutes": parse_zone_offset,
    "window_start": _parse_date,
    "window_end": _parse_date,
    "zone_offset_minutes": parse_zone_offset,
    "accuracy_cutoff_m": float,
    "coverage_fraction": float,
    "min_days": int,
    "min_common_days": int,
    "threshold_m": float,
    "width_t": int,
    "q": _parse_q,
    "width_grid": _parse_int_grid,
    "q_grid": _parse_float_grid,
    "max_horizon": int,
    "seed": int,
    "synth_pairs": int,
    "synth_days": int,
    "synth_encounters_per_day": int,
    "synth_schedule_slots": _parse_int_grid,
    "synth_jitter": int,
    "synth_meet_prob": float,
    "synth_places": int,
    "synth_coverage_slots": int,
}

# config-file keys may use dashes; normalize to field names
_ALIAS = {key.replace("_", "-"): key for key in _PARSERS}


def load_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key=value config file; '#' starts a comment line."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip().lower()
        key = _ALIAS.get(key, key.replace("-", "_"))
        if key not in _PARSERS:
            raise ValueError(f"{path}:{line_no}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def build_config(
    file_values: Mapping[str, str] | None = None,
    flag_values: Mapping[str, str] | None = None,
) -> RunConfig:
    """Merge defaults, config-file values, and flags (flags win)."""
    merged: dict[str, str] = {}
    merged.update(file_values or {})
    merged.update(flag_values or {})
    kwargs: dict[str, Any] = {}
    for key, raw in merged.items():
        if key not in _PARSERS:
            raise ValueError(f"unknown config key {key!r}")
        try:
            kwargs[key] = _PARSERS[key](raw)
        except ValueError as exc:
            raise ValueError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    return RunConfig(**kwargs)
