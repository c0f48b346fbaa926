#!/usr/bin/env python3
"""Regenerate the bundled miniature fixture (tests/data/mini_*.csv).

Five users over ten days: one scheduled pair, one social pair, and one
extra user who logs fixes but never appears in the survey (so the
survey-membership filter has something to drop).
"""

from __future__ import annotations

import csv
from datetime import timedelta
from pathlib import Path

from tiediv.preprocess import CleanFix
from tiediv.synth import SynthConfig, fixes_to_raw_rows, survey_to_rows, synth_generate

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "data"

CFG = SynthConfig(n_pairs_per_archetype=1, n_days=10, seed=2016)
LONER = "lone0"
LONER_LAT, LONER_LON = 22.5, 71.5  # far from every pair area


def main() -> None:
    result = synth_generate(CFG)
    fixes = list(result.fixes)
    for day_index in range(CFG.n_days):
        day = CFG.start_day + timedelta(days=day_index)
        for slot in range(0, 288, 288 // CFG.coverage_slots):
            fixes.append(CleanFix(LONER, day, slot, LONER_LAT, LONER_LON))

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with open(OUT_DIR / "mini_gps.csv", "w", newline="", encoding="utf-8") as handle:
        csv.writer(handle, lineterminator="\n").writerows(fixes_to_raw_rows(fixes, 330))
    with open(OUT_DIR / "mini_survey.csv", "w", newline="", encoding="utf-8") as handle:
        csv.writer(handle, lineterminator="\n").writerows(survey_to_rows(result.survey))
    users = sorted({f.user_id for f in fixes})
    print(f"wrote fixture: {len(fixes)} fixes, {len(users)} users: {', '.join(users)}")


if __name__ == "__main__":
    main()
