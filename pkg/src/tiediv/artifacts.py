"""On-disk interchange between pipeline stages.

Every artifact is UTF-8 delimited text: '#'-prefixed key=value
provenance lines (config echo, input hashes), one header line, then
data rows. Writing the same records with the same config produces
byte-identical files, so re-runs are cheap to verify and artifacts can
be diffed.
"""

from __future__ import annotations

import csv
import hashlib
import io
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .encounter import Encounter, EncounterSet
from .ingest import RawFix, SurveyRecord, parse_timestamp
from .preprocess import CleanFix, ValidDaySet

_DAY_SEP = "|"


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def fmt(value) -> str:
    """Canonical cell text: shortest round-trip floats, '' for absent."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def write_table(
    path: str | Path,
    meta: Mapping[str, str],
    columns: Sequence[str],
    rows: Iterable[Sequence],
) -> None:
    buffer = io.StringIO()
    for key, value in meta.items():
        buffer.write(f"# {key}={value}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def read_table(path: str | Path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Parse an artifact back into (meta, columns, rows)."""
    meta: dict[str, str] = {}
    data_lines: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            stripped = line.lstrip("#").strip()
            if "=" in stripped:
                key, _, value = stripped.partition("=")
                meta[key.strip()] = value.strip()
            continue
        data_lines.append(line)
    if not data_lines:
        raise ValueError(f"{path}: no header line")
    parsed = list(csv.reader(data_lines))
    return meta, parsed[0], parsed[1:]


# ---------------------------------------------------------------------------
# typed artifact round-trips
# ---------------------------------------------------------------------------

FIX_COLUMNS = ("user_id", "timestamp", "lat", "lon", "elevation", "accuracy", "satellites", "provider")


def write_fixes(path: str | Path, fixes: Iterable[RawFix], meta: Mapping[str, str]) -> None:
    rows = [
        (
            f.user_id,
            f.timestamp.isoformat(),
            f.lat,
            f.lon,
            f.elevation,
            f.accuracy,
            f.satellites,
            f.provider,
        )
        for f in fixes
    ]
    write_table(path, meta, FIX_COLUMNS, rows)


def read_fixes(path: str | Path) -> list[RawFix]:
    _, columns, rows = read_table(path)
    idx = {name: columns.index(name) for name in FIX_COLUMNS}
    fixes = []
    for row in rows:
        fixes.append(
            RawFix(
                user_id=row[idx["user_id"]],
                timestamp=parse_timestamp(row[idx["timestamp"]]),
                lat=float(row[idx["lat"]]),
                lon=float(row[idx["lon"]]),
                accuracy=float(row[idx["accuracy"]]),
                elevation=float(row[idx["elevation"]]) if row[idx["elevation"]] else None,
                satellites=int(row[idx["satellites"]]) if row[idx["satellites"]] else None,
                provider=row[idx["provider"]] or None,
            )
        )
    return fixes


SURVEY_COLUMNS = ("rater_id", "ratee_id", "closeness_raw", "proximity_raw")


def write_survey(path: str | Path, records: Iterable[SurveyRecord], meta: Mapping[str, str]) -> None:
    rows = [(r.rater_id, r.ratee_id, r.closeness_raw, r.proximity_raw) for r in records]
    write_table(path, meta, SURVEY_COLUMNS, rows)


def read_survey(path: str | Path) -> list[SurveyRecord]:
    _, columns, rows = read_table(path)
    idx = {name: columns.index(name) for name in SURVEY_COLUMNS}
    return [
        SurveyRecord(
            rater_id=row[idx["rater_id"]],
            ratee_id=row[idx["ratee_id"]],
            closeness_raw=int(row[idx["closeness_raw"]]),
            proximity_raw=int(row[idx["proximity_raw"]]),
        )
        for row in rows
    ]


CLEAN_FIX_COLUMNS = ("user_id", "day", "slot", "lat", "lon")


def write_clean_fixes(path: str | Path, fixes: Iterable[CleanFix], meta: Mapping[str, str]) -> None:
    rows = [(f.user_id, f.day, f.slot, f.lat, f.lon) for f in fixes]
    write_table(path, meta, CLEAN_FIX_COLUMNS, rows)


def read_clean_fixes(path: str | Path) -> list[CleanFix]:
    _, columns, rows = read_table(path)
    idx = {name: columns.index(name) for name in CLEAN_FIX_COLUMNS}
    return [
        CleanFix(
            user_id=row[idx["user_id"]],
            day=date.fromisoformat(row[idx["day"]]),
            slot=int(row[idx["slot"]]),
            lat=float(row[idx["lat"]]),
            lon=float(row[idx["lon"]]),
        )
        for row in rows
    ]


VALID_DAY_COLUMNS = ("user_id", "day")


def write_valid_days(
    path: str | Path, valid_days: Mapping[str, ValidDaySet], meta: Mapping[str, str]
) -> None:
    rows = [
        (user, day)
        for user in sorted(valid_days)
        for day in valid_days[user].days
    ]
    write_table(path, meta, VALID_DAY_COLUMNS, rows)


def read_valid_days(path: str | Path) -> dict[str, ValidDaySet]:
    _, columns, rows = read_table(path)
    idx = {name: columns.index(name) for name in VALID_DAY_COLUMNS}
    days_by_user: dict[str, list[date]] = {}
    for row in rows:
        days_by_user.setdefault(row[idx["user_id"]], []).append(
            date.fromisoformat(row[idx["day"]])
        )
    return {
        user: ValidDaySet(user_id=user, days=tuple(sorted(days)))
        for user, days in days_by_user.items()
    }


PAIR_COLUMNS = ("user_lo", "user_hi", "n_common_days", "common_days")


def write_pairs(
    path: str | Path,
    encounter_sets: Mapping[tuple[str, str], EncounterSet],
    meta: Mapping[str, str],
) -> None:
    rows = []
    for pair in sorted(encounter_sets):
        es = encounter_sets[pair]
        rows.append(
            (
                es.user_lo,
                es.user_hi,
                es.n_common_days,
                _DAY_SEP.join(d.isoformat() for d in es.common_days),
            )
        )
    write_table(path, meta, PAIR_COLUMNS, rows)


ENCOUNTER_COLUMNS = ("user_lo", "user_hi", "day", "slot", "cell")


def write_encounters(
    path: str | Path,
    encounter_sets: Mapping[tuple[str, str], EncounterSet],
    meta: Mapping[str, str],
) -> None:
    rows = []
    for pair in sorted(encounter_sets):
        for enc in encounter_sets[pair].encounters:
            rows.append((enc.user_lo, enc.user_hi, enc.day, enc.slot, enc.cell))
    write_table(path, meta, ENCOUNTER_COLUMNS, rows)


def read_encounter_sets(
    encounters_path: str | Path, pairs_path: str | Path
) -> dict[tuple[str, str], EncounterSet]:
    """Rebuild per-pair encounter sets from the two interchange files."""
    _, pair_cols, pair_rows = read_table(pairs_path)
    pidx = {name: pair_cols.index(name) for name in PAIR_COLUMNS}
    common: dict[tuple[str, str], tuple[date, ...]] = {}
    for row in pair_rows:
        pair = (row[pidx["user_lo"]], row[pidx["user_hi"]])
        days_text = row[pidx["common_days"]]
        days = tuple(
            date.fromisoformat(part) for part in days_text.split(_DAY_SEP) if part
        )
        common[pair] = days

    _, enc_cols, enc_rows = read_table(encounters_path)
    eidx = {name: enc_cols.index(name) for name in ENCOUNTER_COLUMNS}
    by_pair: dict[tuple[str, str], list[Encounter]] = {pair: [] for pair in common}
    for row in enc_rows:
        pair = (row[eidx["user_lo"]], row[eidx["user_hi"]])
        if pair not in by_pair:
            raise ValueError(f"encounter for unknown pair {pair}")
        by_pair[pair].append(
            Encounter(
                user_lo=pair[0],
                user_hi=pair[1],
                day=date.fromisoformat(row[eidx["day"]]),
                slot=int(row[eidx["slot"]]),
                cell=row[eidx["cell"]],
            )
        )
    return {
        pair: EncounterSet(
            user_lo=pair[0],
            user_hi=pair[1],
            common_days=common[pair],
            encounters=tuple(by_pair[pair]),
        )
        for pair in sorted(common)
    }
