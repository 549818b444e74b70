"""Seeded synthetic micro-wards for oracle and monotonicity testing."""

import datetime as dt
import random
from fractions import Fraction

from rostra.calendars import build_horizon
from rostra.roster import Provenance, Roster
from rostra.shifts import Shift
from rostra.staff import (
    Bound,
    DowTable,
    Nurse,
    NightClass,
    OffPreference,
    PairRule,
    StaffingBounds,
    WardConfig,
)

# previous-month tails consistent with the 12h block grammar
# (a night start is always preceded by its long-day prep)
TAILS = [
    "ooooo",
    "soooo",
    "ooLNM",
    "oLNMo",
    "LNMoo",
    "oooLN",   # ends on a night start: day 1 must open with the morning-after
    "ooDDD",   # day run flowing into the new month
    "DDDDD",
]

_CH = {"o": Shift.OFF, "s": Shift.SPECIAL_OFF, "N": Shift.NIGHT_IN,
       "M": Shift.NIGHT_OUT, "D": Shift.DAY, "L": Shift.LONGDAY,
       ".": Shift.UNSET}


def make_micro_ward(seed: int, n_nurses: int | None = None,
                    n_days: int | None = None, wish_p: float = 0.18):
    """One random night-stage instance: (cfg, wishes)."""
    rng = random.Random(seed)
    n_nurses = n_nurses or rng.choice([2, 2, 3, 3, 4])
    n_days = n_days or rng.choice([5, 6, 7])
    start = dt.date(2024, 1, 1) + dt.timedelta(days=rng.randrange(300))

    nurses = []
    for i in range(n_nurses):
        night_class = NightClass.NIGHT_CAPABLE
        if n_nurses >= 3 and i == n_nurses - 1 and rng.random() < 0.3:
            night_class = NightClass.DAY_ONLY
        pref = rng.choices(
            [OffPreference.NONE, OffPreference.TRIPLE_OFF,
             OffPreference.WEEKEND_PAIR, OffPreference.SINGLE_OFF],
            weights=[6, 1, 1, 1])[0]
        fixed = rng.random() < 0.2 and night_class is NightClass.NIGHT_CAPABLE
        rookie = i == 1 and rng.random() < 0.4
        nurses.append(Nurse(
            id=f"n{i}",
            night_class=night_class,
            group=1 + i % 4,
            rookie=rookie,
            day_leader=not rookie,
            night_count_fixed=fixed,
            night_lb=0,
            night_ub=2 if fixed else 3,
            off_preference=pref,
        ))

    lb = rng.choice([0, 1, 1])
    bounds = StaffingBounds(
        total=Bound(DowTable.constant(lb), DowTable.constant(lb + 1)))
    pairs = []
    capable = [n for n in nurses if n.night_class is NightClass.NIGHT_CAPABLE]
    if len(capable) >= 2 and rng.random() < 0.3:
        a, b = rng.sample(capable, 2)
        pairs.append(PairRule(a.id, b.id, Shift.NIGHT_IN, Shift.NIGHT_IN, 1))

    cal = build_horizon(start, n_days)
    cfg = WardConfig(
        nurses=nurses,
        calendar=cal,
        night_staffing=bounds,
        pairs=pairs,
        off_quota=max(2, n_days // 2),
        avg_fssm_nights=Fraction(rng.choice([0, 1, 1, 2])),
    )

    wishes = Roster.blank(cal, [n.id for n in nurses])
    cells = {}
    for n in nurses:
        tail = rng.choice(TAILS if n.night_class is not NightClass.DAY_ONLY
                          else TAILS[:2] + ["ooDDD", "DDDDD"])
        for d, ch in zip(cal.prev_days, tail):
            cells[(n.id, d)] = _CH[ch]

        blocked = set()
        if tail.endswith("N"):
            blocked.add(0)  # day 1 is the forced morning-after
        off_only = {0} if tail.endswith("M") else set()

        # a wished night block, with its neighbours kept compatible;
        # a tail night pushes the earliest block start out to day 5
        k_min = 4 if "N" in tail else 1
        if (n.night_class is not NightClass.DAY_ONLY
                and rng.random() < 0.25 and n_days - 3 >= k_min):
            k = rng.randrange(k_min, n_days - 2)
            cells[(n.id, cal.target_days[k])] = Shift.NIGHT_IN
            cells[(n.id, cal.target_days[k + 1])] = Shift.NIGHT_OUT
            blocked.update({k, k + 1})
            blocked.add(k - 1)          # the prep slot must stay free
            off_only.add(k + 2)         # after the morning-after: off or free

        for i, d in enumerate(cal.target_days):
            if i in blocked or rng.random() >= wish_p:
                continue
            if i in off_only:
                cells[(n.id, d)] = rng.choice([Shift.OFF, Shift.SPECIAL_OFF])
            else:
                cells[(n.id, d)] = rng.choice(
                    [Shift.OFF, Shift.OFF, Shift.SPECIAL_OFF, Shift.OTHER])

        # next-month wish, consistent with whatever the last target cell is
        if rng.random() < 0.3:
            last_wish = cells.get((n.id, cal.target_days[-1]))
            choices = [Shift.OFF, Shift.DAY]
            if last_wish is Shift.NIGHT_IN:
                choices = [Shift.NIGHT_OUT]
            cells[(n.id, cal.next_days[0])] = rng.choice(choices)
    wishes = wishes.with_cells(cells, Provenance.WISH)
    return cfg, wishes
