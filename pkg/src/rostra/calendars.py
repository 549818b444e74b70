"""Scheduling horizon: target month plus five fixed margin days on each side.

The horizon D is the union of

  prev_days   last 5 days of the previous month (cells come in fixed)
  target_days the month being scheduled
  next_days   first 5 days of the next month (wish data only)

Besides the plain date lists the window knows, for constraint building:
holiday/weekend classification, the Fri-Sat-Sun-Mon subset, Saturdays,
event weekdays, and generic sliding-window start sets ("all d such that
[d, d+len-1] stays inside D").
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

# Day-of-week classes used by the staffing bound tables. A flagged public
# holiday overrides its weekday and falls in class "hol".
DOW_CLASSES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun", "hol")
_DOW_NAME = {0: "mon", 1: "tue", 2: "wed", 3: "thu", 4: "fri", 5: "sat", 6: "sun"}

MARGIN_DAYS = 5


class CalendarError(ValueError):
    pass


@dataclass(frozen=True)
class CalendarWindow:
    """Immutable date horizon with the derived subsets pre-computed."""

    year: int
    month: int
    prev_days: tuple[dt.date, ...]
    target_days: tuple[dt.date, ...]
    next_days: tuple[dt.date, ...]
    holidays: frozenset[dt.date]
    event_weekdays: frozenset[str] = frozenset()  # e.g. {"tue"} for OR days
    days: tuple[dt.date, ...] = field(init=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False)  # date -> position

    def __post_init__(self):
        days = self.prev_days + self.target_days + self.next_days
        object.__setattr__(self, "days", days)
        object.__setattr__(self, "index", {d: i for i, d in enumerate(days)})
        if len(self.prev_days) != MARGIN_DAYS or len(self.next_days) != MARGIN_DAYS:
            raise CalendarError("margin windows must be exactly 5 days")
        for a, b in zip(days, days[1:]):
            if (b - a).days != 1:
                raise CalendarError("horizon must be contiguous")
        for h in self.holidays:
            if h not in self.index:
                raise CalendarError(f"holiday {h} outside the horizon")

    # -- classification ----------------------------------------------------

    def contains(self, d: dt.date) -> bool:
        return d in self.index

    def is_weekend_holiday(self, d: dt.date) -> bool:
        if d not in self.index:
            raise CalendarError(f"date {d} outside the horizon")
        return d.weekday() >= 5 or d in self.holidays

    def weekday_class(self, d: dt.date) -> str:
        """WEEKEND_HOLIDAY / WEEKDAY split used by leader staffing."""
        return "WEEKEND_HOLIDAY" if self.is_weekend_holiday(d) else "WEEKDAY"

    def dow_class(self, d: dt.date) -> str:
        """One of DOW_CLASSES; a flagged holiday maps to 'hol'."""
        if d not in self.index:
            raise CalendarError(f"date {d} outside the horizon")
        if d in self.holidays:
            return "hol"
        return _DOW_NAME[d.weekday()]

    # -- anchor dates -------------------------------------------------------

    @property
    def prev_last(self) -> dt.date:
        return self.prev_days[-1]

    @property
    def first_day(self) -> dt.date:
        return self.target_days[0]

    @property
    def last_day(self) -> dt.date:
        return self.target_days[-1]

    @property
    def next_first(self) -> dt.date:
        return self.next_days[0]

    @property
    def next_second(self) -> dt.date:
        return self.next_days[1]

    # -- derived date subsets ------------------------------------------------

    @property
    def target_off_days(self) -> tuple[dt.date, ...]:
        """Target-month weekend/holiday dates."""
        return tuple(d for d in self.target_days if self.is_weekend_holiday(d))

    @property
    def fssm_days(self) -> tuple[dt.date, ...]:
        """Target-month Fridays through Mondays."""
        return tuple(d for d in self.target_days if d.weekday() in (4, 5, 6, 0))

    @property
    def saturdays(self) -> tuple[dt.date, ...]:
        """Target-month Saturdays, excluding one falling on the final day."""
        return tuple(
            d for d in self.target_days
            if d.weekday() == 5 and d != self.last_day
        )

    @property
    def event_days(self) -> tuple[dt.date, ...]:
        """Target-month dates whose weekday is a configured event weekday."""
        return tuple(
            d for d in self.target_days
            if _DOW_NAME[d.weekday()] in self.event_weekdays
        )

    def window_starts(self, length: int) -> tuple[dt.date, ...]:
        """All start dates d with [d, d+length-1] fully inside the horizon."""
        if length < 1:
            raise CalendarError("window length must be >= 1")
        return self.days[: len(self.days) - length + 1]

    def offset(self, d: dt.date, k: int) -> dt.date:
        return d + dt.timedelta(days=k)

    def window_sets(self) -> dict[str, tuple[dt.date, ...]]:
        """Named sliding-window start sets (window length in days).

        Provided mainly for reports and tests; constraint builders call
        window_starts(length) directly.
        """
        ws = self.window_starts
        return {
            "work6": ws(6),             # six-consecutive-workday ban
            "work5_night": ws(4),       # day,day,(12h|unset),night-in
            "split_runs": ws(10),       # 5-work/1-off/4-work and mirror
            "off_after_5work": ws(7),   # 5 work, lone off, work
            "off_in_9d": ws(9),         # two offs per nine days
            "longday_prep": ws(4),      # 3 day-band then 12h
            "dayrun3": ws(3),           # three consecutive day-band
            "night3_in9": ws(9),
            "night4_in13": ws(13),
            "night4_in10": ws(10),
            "night4_in14": ws(14),
            "night_gap_ub": ws(14),
            "night_gap_lb": ws(4),
            "tripleoff_candidate": ws(4),
            "pair_off": ws(4),
            "triple_off": ws(3),
            "single_day": ws(3),
        }


def _month_days(year: int, month: int) -> list[dt.date]:
    d = dt.date(year, month, 1)
    out = []
    while d.month == month:
        out.append(d)
        d += dt.timedelta(days=1)
    return out


def build_horizon(
    first_day: dt.date,
    num_days: int,
    holidays=(),
    event_weekdays=(),
) -> CalendarWindow:
    """Synthetic window: num_days target days plus the 5-day margins.

    Used for desk-scale instances that are shorter than a calendar month;
    production wards go through build_calendar."""
    if num_days < 1:
        raise CalendarError("need at least one target day")
    target = tuple(first_day + dt.timedelta(days=k) for k in range(num_days))
    prev = tuple(first_day - dt.timedelta(days=k)
                 for k in range(MARGIN_DAYS, 0, -1))
    nxt = tuple(target[-1] + dt.timedelta(days=k)
                for k in range(1, MARGIN_DAYS + 1))
    ew = frozenset(str(w).lower() for w in event_weekdays)
    return CalendarWindow(
        year=first_day.year,
        month=first_day.month,
        prev_days=prev,
        target_days=target,
        next_days=nxt,
        holidays=frozenset(holidays),
        event_weekdays=ew,
    )


def build_calendar(
    year: int,
    month: int,
    holidays=(),
    event_weekdays=(),
) -> CalendarWindow:
    """Build the horizon for one target month.

    holidays: iterable of dates (inside the horizon) flagged as public
    holidays, transfer holidays included. event_weekdays: weekday names
    ("mon".."sun") that carry recurring events such as operating days.
    """
    if not 1 <= month <= 12:
        raise CalendarError(f"invalid month: {month}")
    target = _month_days(year, month)
    first, last = target[0], target[-1]
    prev = tuple(first - dt.timedelta(days=k) for k in range(MARGIN_DAYS, 0, -1))
    nxt = tuple(last + dt.timedelta(days=k) for k in range(1, MARGIN_DAYS + 1))
    ew = frozenset(str(w).lower() for w in event_weekdays)
    unknown = ew - set(DOW_CLASSES[:7])
    if unknown:
        raise CalendarError(f"unknown event weekdays: {sorted(unknown)}")
    return CalendarWindow(
        year=year,
        month=month,
        prev_days=prev,
        target_days=tuple(target),
        next_days=nxt,
        holidays=frozenset(holidays),
        event_weekdays=ew,
    )
