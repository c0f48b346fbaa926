"""Synthetic mobility traces with known ground truth.

Two pair archetypes with identical expected encounter rates but
opposite temporal structure:

- "scheduled" pairs meet only inside fixed daily slots (plus a small
  jitter), the way lecture or mealtime routines work;
- "social" pairs meet at uniformly random slots of the day.

Each planned meeting actually happens with probability ``meet_prob``
(the same for both archetypes), so per-day encounter counts carry some
archetype-independent noise instead of being a degenerate constant.
Pairs live on a coarse lattice far apart from each other, so encounters
only ever happen within a pair. The implied survey labels the
archetypes closeness 1 (scheduled) versus 5 (social), which the
regrouping maps to 1 versus 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone

import numpy as np

from .ingest import SurveyRecord
from .preprocess import SLOTS_PER_DAY, CleanFix

# pair areas sit on a 0.1 degree lattice (~11 km apart); within a pair,
# meeting places are ~200 m apart and solo spots ~450 m off to the side,
# so nothing but a planned meeting ever comes within a realistic
# co-location threshold
_BASE_LAT = 23.19
_BASE_LON = 72.63
_LATTICE_STEP_DEG = 0.1
_LATTICE_COLS = 20
_PLACE_STEP_DEG = 0.002
_SOLO_OFFSET_DEG = 0.004

SCHEDULED = "scheduled"
SOCIAL = "social"


@dataclass(frozen=True)
class SynthConfig:
    n_pairs_per_archetype: int = 100
    n_days: int = 14
    encounters_per_day: int = 3
    schedule_slots: tuple[int, ...] = (102, 150, 222)  # 08:30, 12:30, 18:30
    jitter_slots: int = 1
    meet_prob: float = 0.9
    n_places: int = 3
    coverage_slots: int = 60  # occupied slots per user-day
    start_day: date = date(2016, 4, 1)
    seed: int = 0


@dataclass(frozen=True)
class SynthResult:
    fixes: list[CleanFix]
    survey: list[SurveyRecord]
    archetypes: dict[tuple[str, str], str]  # canonical pair -> archetype


def _validate(cfg: SynthConfig) -> None:
    if cfg.n_pairs_per_archetype < 1:
        raise ValueError("need at least one pair per archetype")
    if cfg.n_days < 1:
        raise ValueError("need at least one day")
    if not 1 <= cfg.encounters_per_day <= SLOTS_PER_DAY:
        raise ValueError(
            f"encounters_per_day must be in 1..{SLOTS_PER_DAY}, "
            f"got {cfg.encounters_per_day}"
        )
    if cfg.encounters_per_day > len(cfg.schedule_slots):
        raise ValueError(
            f"{cfg.encounters_per_day} encounters/day need at least that many "
            f"schedule slots, got {len(cfg.schedule_slots)}"
        )
    if cfg.jitter_slots < 0:
        raise ValueError("jitter must be non-negative")
    for slot in cfg.schedule_slots:
        if slot - cfg.jitter_slots < 0 or slot + cfg.jitter_slots >= SLOTS_PER_DAY:
            raise ValueError(f"schedule slot {slot} +- jitter leaves the day")
    ordered = sorted(cfg.schedule_slots)
    for a, b in zip(ordered, ordered[1:]):
        if b - a <= 2 * cfg.jitter_slots:
            raise ValueError(
                "schedule slots closer than 2*jitter could collide into one slot"
            )
    if not 0.0 <= cfg.meet_prob <= 1.0:
        raise ValueError("meet_prob must be in [0, 1]")
    if cfg.n_places < 1:
        raise ValueError("need at least one meeting place")
    if not cfg.encounters_per_day <= cfg.coverage_slots <= SLOTS_PER_DAY:
        raise ValueError(
            f"coverage_slots must be in {cfg.encounters_per_day}..{SLOTS_PER_DAY}"
        )


def _pair_geometry(pair_index: int, n_places: int):
    row, col = divmod(pair_index, _LATTICE_COLS)
    base_lat = _BASE_LAT + row * _LATTICE_STEP_DEG
    base_lon = _BASE_LON + col * _LATTICE_STEP_DEG
    places = [(base_lat, base_lon + k * _PLACE_STEP_DEG) for k in range(n_places)]
    solo_a = (base_lat + _SOLO_OFFSET_DEG, base_lon)
    solo_b = (base_lat - _SOLO_OFFSET_DEG, base_lon)
    return places, solo_a, solo_b


def _solo_slots(meeting_slots: set[int], coverage_slots: int) -> list[int]:
    """Deterministic filler slots: evenly strided, then ascending scan."""
    occupied = set(meeting_slots)
    stride = max(1, SLOTS_PER_DAY // coverage_slots)
    for slot in list(range(0, SLOTS_PER_DAY, stride)) + list(range(SLOTS_PER_DAY)):
        if len(occupied) >= coverage_slots:
            break
        occupied.add(slot)
    return sorted(occupied - meeting_slots)


def synth_generate(cfg: SynthConfig | None = None) -> SynthResult:
    """Generate clean fixes and an implied survey, deterministically per seed."""
    cfg = cfg or SynthConfig()
    _validate(cfg)
    rng = np.random.default_rng(cfg.seed)

    fixes: list[CleanFix] = []
    survey: list[SurveyRecord] = []
    archetypes: dict[tuple[str, str], str] = {}

    n = cfg.n_pairs_per_archetype
    for pair_index in range(2 * n):
        archetype = SCHEDULED if pair_index < n else SOCIAL
        tag = "sch" if archetype == SCHEDULED else "soc"
        user_a = f"{tag}{pair_index % n:03d}a"
        user_b = f"{tag}{pair_index % n:03d}b"
        places, solo_a, solo_b = _pair_geometry(pair_index, cfg.n_places)
        archetypes[(user_a, user_b)] = archetype

        for day_index in range(cfg.n_days):
            day = cfg.start_day + timedelta(days=day_index)
            meetings: dict[int, int] = {}  # slot -> place index
            if archetype == SCHEDULED:
                for idx in range(cfg.encounters_per_day):
                    if rng.random() >= cfg.meet_prob:
                        continue
                    slot = cfg.schedule_slots[idx] + int(
                        rng.integers(-cfg.jitter_slots, cfg.jitter_slots + 1)
                    )
                    meetings[slot] = idx % cfg.n_places
            else:
                n_meet = int(rng.binomial(cfg.encounters_per_day, cfg.meet_prob))
                if n_meet:
                    slots = rng.choice(SLOTS_PER_DAY, size=n_meet, replace=False)
                    for slot in sorted(int(s) for s in slots):
                        meetings[slot] = int(rng.integers(0, cfg.n_places))

            solo = _solo_slots(set(meetings), cfg.coverage_slots)
            for slot, place_index in sorted(meetings.items()):
                lat, lon = places[place_index]
                fixes.append(CleanFix(user_a, day, slot, lat, lon))
                fixes.append(CleanFix(user_b, day, slot, lat, lon))
            for slot in solo:
                fixes.append(CleanFix(user_a, day, slot, solo_a[0], solo_a[1]))
                fixes.append(CleanFix(user_b, day, slot, solo_b[0], solo_b[1]))

        closeness = 1 if archetype == SCHEDULED else 5
        proximity = 2 if archetype == SCHEDULED else 4
        survey.append(SurveyRecord(user_a, user_b, closeness, proximity))
        survey.append(SurveyRecord(user_b, user_a, closeness, proximity))

    return SynthResult(fixes=fixes, survey=survey, archetypes=archetypes)


def fixes_to_raw_rows(
    fixes: list[CleanFix],
    zone_offset_minutes: int = 330,
    accuracy_m: float = 8.0,
) -> list[list[str]]:
    """Serialize clean fixes as raw GPS log rows (header included).

    Timestamps are the local slot-start instants converted to UTC, so
    the snapping step maps each row back onto exactly its slot.
    """
    tz = timezone(timedelta(minutes=zone_offset_minutes))
    rows = [["user_id", "timestamp", "lat", "lon", "elevation", "accuracy", "satellites", "provider"]]
    for fix in fixes:
        local = datetime.combine(fix.day, time(0, 0), tzinfo=tz) + timedelta(
            seconds=fix.slot * 300
        )
        ts = local.astimezone(timezone.utc).isoformat()
        rows.append(
            [fix.user_id, ts, repr(fix.lat), repr(fix.lon), "", repr(accuracy_m), "", "synthetic"]
        )
    return rows


def survey_to_rows(survey: list[SurveyRecord]) -> list[list[str]]:
    """Serialize survey records in the survey input format (header included)."""
    rows = [["rater_id", "ratee_id", "closeness", "proximity"]]
    for rec in survey:
        rows.append(
            [rec.rater_id, rec.ratee_id, str(rec.closeness_raw), str(rec.proximity_raw)]
        )
    return rows
