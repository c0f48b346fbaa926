"""Pairwise encounter detection on the cleaned day-slot grid.

An encounter is a co-occurrence: both users of a pair have a fix in the
same 5-minute slot of a common day, within a distance threshold. Each
encounter is labelled with the geohash-8 cell of the midpoint between
the two fixes, which feeds location diversity downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping

from .geo import geohash_encode, haversine_m
from .preprocess import CleanFix, ValidDaySet, common_days

GEOHASH_LENGTH = 8
DEFAULT_THRESHOLD_M = 50.0


@dataclass(frozen=True)
class Encounter:
    """One co-occurrence of a user pair in a (day, slot) at a cell."""

    user_lo: str
    user_hi: str  # canonical order: user_lo < user_hi
    day: date
    slot: int
    cell: str


@dataclass(frozen=True)
class EncounterSet:
    """All encounters of one pair, with the pair's common-day context."""

    user_lo: str
    user_hi: str
    common_days: tuple[date, ...]  # chronological
    encounters: tuple[Encounter, ...]

    @property
    def pair(self) -> tuple[str, str]:
        return (self.user_lo, self.user_hi)

    @property
    def n_common_days(self) -> int:
        return len(self.common_days)

    @property
    def n_encounters(self) -> int:
        return len(self.encounters)

    def first_days(self, d: int) -> "EncounterSet | None":
        """Restrict to the pair's first d common days; None if fewer exist."""
        if self.n_common_days < d:
            return None
        horizon = self.common_days[:d]
        kept = set(horizon)
        return EncounterSet(
            user_lo=self.user_lo,
            user_hi=self.user_hi,
            common_days=horizon,
            encounters=tuple(e for e in self.encounters if e.day in kept),
        )


def canonical_pair(a: str, b: str) -> tuple[str, str]:
    if a == b:
        raise ValueError(f"pair of identical users: {a!r}")
    return (a, b) if a < b else (b, a)


def detect_encounters(
    fixes: Iterable[CleanFix],
    valid_days: Mapping[str, ValidDaySet],
    threshold_m: float = DEFAULT_THRESHOLD_M,
    min_common_days: int = 7,
    pairs: Iterable[tuple[str, str]] | None = None,
) -> dict[tuple[str, str], EncounterSet]:
    """Detect encounters for every eligible pair.

    A pair is eligible when both users appear in valid_days and they
    share at least min_common_days days. Pairs with enough common days
    but no co-occurrences still get an (empty) EncounterSet. When
    `pairs` is given, only those pairs are considered (e.g. the pairs
    actually rated in the survey); otherwise all pairs of users in
    valid_days are scanned.
    """
    if threshold_m <= 0:
        raise ValueError(f"distance threshold must be positive, got {threshold_m}")

    by_user_day: dict[tuple[str, date], dict[int, CleanFix]] = {}
    for fix in fixes:
        by_user_day.setdefault((fix.user_id, fix.day), {})[fix.slot] = fix

    if pairs is None:
        users = sorted(valid_days)
        candidates = [
            (users[i], users[j])
            for i in range(len(users))
            for j in range(i + 1, len(users))
        ]
    else:
        seen: set[tuple[str, str]] = set()
        candidates = []
        for a, b in pairs:
            key = canonical_pair(a, b)
            if key not in seen:
                seen.add(key)
                candidates.append(key)
        candidates.sort()

    result: dict[tuple[str, str], EncounterSet] = {}
    for lo, hi in candidates:
        if lo not in valid_days or hi not in valid_days:
            continue
        shared = common_days(valid_days[lo], valid_days[hi])
        if len(shared) < min_common_days:
            continue
        encounters: list[Encounter] = []
        for day in shared:
            slots_lo = by_user_day.get((lo, day))
            slots_hi = by_user_day.get((hi, day))
            if not slots_lo or not slots_hi:
                continue
            for slot in sorted(slots_lo.keys() & slots_hi.keys()):
                f_lo = slots_lo[slot]
                f_hi = slots_hi[slot]
                if haversine_m(f_lo.lat, f_lo.lon, f_hi.lat, f_hi.lon) <= threshold_m:
                    mid_lat = (f_lo.lat + f_hi.lat) / 2.0
                    mid_lon = (f_lo.lon + f_hi.lon) / 2.0
                    encounters.append(
                        Encounter(
                            user_lo=lo,
                            user_hi=hi,
                            day=day,
                            slot=slot,
                            cell=geohash_encode(mid_lat, mid_lon, GEOHASH_LENGTH),
                        )
                    )
        result[(lo, hi)] = EncounterSet(
            user_lo=lo,
            user_hi=hi,
            common_days=shared,
            encounters=tuple(encounters),
        )
    return result
