import datetime as dt

import pytest

from rostra.calendars import build_calendar
from rostra.roster import Provenance, Roster
from rostra.shifts import Shift
from rostra.staff import (
    Bound,
    DowTable,
    Nurse,
    NightClass,
    OffPreference,
    StaffingBounds,
    Toggles,
    WardConfig,
)

# Compact row notation for hand-built rosters.
CHAR_TO_SHIFT = {
    "D": Shift.DAY,
    "L": Shift.LONGDAY,
    "E": Shift.EARLY,
    "T": Shift.LATE,
    "N": Shift.NIGHT_IN,
    "M": Shift.NIGHT_OUT,
    "X": Shift.OTHER,
    "o": Shift.OFF,
    "s": Shift.SPECIAL_OFF,
    ".": Shift.UNSET,
}
SHIFT_TO_CHAR = {v: k for k, v in CHAR_TO_SHIFT.items()}


def row_of(spec: str):
    return [CHAR_TO_SHIFT[c] for c in spec]


def make_roster(cfg, rows=None, default="o"):
    """Build a total roster from row strings (40 chars for a 30-day month).

    rows: {nurse_id: spec}; missing nurses get the default char row.
    """
    cal = cfg.calendar
    n_days = len(cal.days)
    roster = Roster.blank(cal, [n.id for n in cfg.nurses],
                          fill=CHAR_TO_SHIFT[default])
    updates = {}
    for nid, spec in (rows or {}).items():
        assert len(spec) == n_days, f"row for {nid} must be {n_days} chars"
        for d, ch in zip(cal.days, spec):
            updates[(nid, d)] = CHAR_TO_SHIFT[ch]
    return roster.with_cells(updates, Provenance.SOLVED) if updates else roster


def render_row(roster, nid):
    return "".join(SHIFT_TO_CHAR[roster.get(nid, d)]
                   for d in roster.calendar.days)


@pytest.fixture(scope="session")
def nov_cal():
    # Nov 2024: Fri Nov 1 .. Sat Nov 30; horizon Oct 27 - Dec 5.
    return build_calendar(2024, 11, holidays=[dt.date(2024, 11, 4)])


def _micro_nurses():
    return [
        Nurse(id="n1", group=1, team="A", day_leader=True, male=True),
        Nurse(id="n2", group=2, team="A", rookie=True,
              night_lb=0, night_ub=9),
        Nurse(id="n3", group=3, team="B",
              off_preference=OffPreference.WEEKEND_PAIR),
        Nurse(id="n4", group=4, team="B",
              off_preference=OffPreference.TRIPLE_OFF),
        Nurse(id="n5", night_class=NightClass.NIGHT_ONLY,
              off_preference=OffPreference.SINGLE_OFF),
        Nurse(id="n6", night_class=NightClass.DAY_ONLY, group=2, team="B",
              off_preference=OffPreference.PAIR_OFF),
        Nurse(id="n7", night_class=NightClass.DAY_ONLY, short_hours=True),
        Nurse(id="n8", care_worker=True, group=3, team="A"),
    ]


@pytest.fixture()
def micro_cfg(nov_cal):
    """Eight-nurse ward over Nov 2024 with every attribute represented."""
    return WardConfig(
        nurses=_micro_nurses(),
        calendar=nov_cal,
        night_staffing=StaffingBounds(
            total=Bound(DowTable.constant(1), DowTable.constant(2)),
        ),
        day_staffing=StaffingBounds(
            total=Bound(DowTable.constant(2), DowTable.constant(6)),
        ),
        off_quota=9,
        toggles=Toggles(team_constraints=True, rookie_constraints=True,
                        male_constraints=True, care_worker_constraints=False),
    )


def nov(day: int) -> dt.date:
    return dt.date(2024, 11, day)


def oct(day: int) -> dt.date:
    return dt.date(2024, 10, day)


def dec(day: int) -> dt.date:
    return dt.date(2024, 12, day)
