"""Day-stage constraint definitions (hard 1-9, soft 1-34).

The staffing templates 1-18 and the pair/sequence machinery are shared
with the night stage; only the band, the stage alphabet and the
nurse-pattern constraints differ."""

from __future__ import annotations

from ..shifts import (
    ALL_SHIFTS,
    DAY_SHIFTS,
    OFF_SHIFTS,
    WORK_SHIFTS,
    Shift,
)
from ..staff import NightClass, NightPattern, OffPreference
from .common import (
    forbidden_assignment_elements,
    forbidden_pair_elements,
    pair_elements,
    run_limit_elements,
    sequence_elements,
    staffing_hard,
)
from .context import StageContext
from .elements import (
    CellDomain,
    Element,
    EpiMax,
    Excess,
    Indicator,
    IndExcess,
    IndShortfall,
    LinearHard,
    Shortfall,
)
from .ids import hd, sd
from .night import _care_on, _male_on, _rookie_on, _staff, _team_on, _team_staff


def _always(cfg):
    return True


# ---------------------------------------------------------------------------
# Hard constraints
# ---------------------------------------------------------------------------


def h1(cid, ctx: StageContext):
    """Wish fixing plus the day-stage alphabet limit on free cells."""
    out = []
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        free_mask = ctx.m(ctx.cfg.day_free_shifts())
        for di in range(ctx.num_days):
            wish = ctx.wish_at(ni, di)
            d = ctx.cal.days[di]
            if wish is not None:
                out.append(Element(cid, CellDomain(ni, di, 1 << wish, True),
                                   nurse=n.id, date=d))
            elif ctx.is_margin(di):
                out.append(Element(
                    cid, CellDomain(ni, di, 1 << Shift.UNSET.code, True),
                    nurse=n.id, date=d))
            else:
                out.append(Element(cid, CellDomain(ni, di, free_mask),
                                   nurse=n.id, date=d))
    return out


def h2(cid, ctx: StageContext):
    """Night specialists take no plain day shifts."""
    out = []
    dom = ctx.m(ALL_SHIFTS - {Shift.DAY})
    for n in ctx.cfg.night_only:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.target_days:
            out.append(Element(cid, CellDomain(ni, ctx.di_of[d], dom),
                               nurse=n.id, date=d))
    return out


def h3(cid, ctx: StageContext):
    return run_limit_elements(cid, ctx)


def h4(cid, ctx: StageContext):
    """No six-day runs: the per-shift rows as formulated, plus the aggregate
    all-work form so runs mixing symbols stay banned after nights are fixed."""
    out = []
    starts = ctx.cal.window_starts(6)
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        for d in starts:
            for s in sorted(WORK_SHIFTS, key=lambda x: x.code):
                pieces = ctx.window_pieces(ni, d, [frozenset((s,))] * 6)
                out.append(Element(cid, LinearHard(pieces, hi=5),
                                   nurse=n.id, date=d, note=f"run of {s.value}"))
            pieces = ctx.window_pieces(ni, d, [WORK_SHIFTS] * 6)
            out.append(Element(cid, LinearHard(pieces, hi=5),
                               nurse=n.id, date=d, note="any work"))
    return out


def h5(cid, ctx: StageContext):
    """Four workdays before a month-end night would straddle into a six-day
    run once next month opens with the morning-after."""
    out = []
    dlast = ctx.cal.last_day
    di_last = ctx.di_of[dlast]
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        pieces = tuple(
            (ni, di_last - 4 + h, ctx.m(WORK_SHIFTS)) for h in range(4)
        ) + ((ni, di_last, ctx.m((Shift.NIGHT_IN,))),)
        out.append(Element(cid, LinearHard(pieces, hi=4),
                           nurse=n.id, date=dlast))
    return out


def h6(cid, ctx: StageContext):
    """Twelve-hour pattern: no three day-band shifts right before a long day."""
    if ctx.cfg.night_pattern is not NightPattern.TWELVE_HOUR:
        return []
    out = []
    steps = [DAY_SHIFTS, DAY_SHIFTS, DAY_SHIFTS, frozenset((Shift.LONGDAY,))]
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(4):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, LinearHard(pieces, hi=3),
                               nurse=n.id, date=d))
    return out


def h7(cid, ctx: StageContext):
    return sequence_elements(cid, ctx.cfg.hard_sequences(ctx.stage), ctx, hard=True)


def h8(cid, ctx: StageContext):
    males = [n for n in ctx.nurses if n.male]
    return staffing_hard(cid, males, ctx.cfg.day_staffing.male, ctx)


def h9(cid, ctx: StageContext):
    """Exactly one symbol per cell (structural; encoder emits the rows)."""
    return []


# ---------------------------------------------------------------------------
# Soft constraints
# ---------------------------------------------------------------------------


def s21(cid, ctx: StageContext):
    """At least one leader-capable nurse on day duty; long days count on
    weekends and holidays."""
    leaders = [n for n in ctx.nurses if n.day_leader]
    if not leaders:
        return []
    out = []
    nis = [ctx.ni_of[n.id] for n in leaders]
    day_only_m = ctx.m((Shift.DAY,))
    weekend_m = ctx.m((Shift.DAY, Shift.LONGDAY))
    for d in ctx.cal.target_days:
        m = weekend_m if ctx.cal.is_weekend_holiday(d) else day_only_m
        pieces = tuple((ni, ctx.di_of[d], m) for ni in nis)
        out.append(Element(cid, Shortfall(pieces, 1), date=d))
    return out


def _off_quota(ctx, n):
    return n.off_quota if n.off_quota is not None else ctx.cfg.off_quota


def s24(cid, ctx: StageContext):
    """Monthly regular-off count lower bound."""
    out = []
    off = ctx.m((Shift.OFF,))
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        pieces = tuple((ni, di, off) for di in ctx.target_dis)
        out.append(Element(cid, Shortfall(pieces, _off_quota(ctx, n)),
                           nurse=n.id))
    return out


def s25(cid, ctx: StageContext):
    """Monthly regular-off count upper bound."""
    out = []
    off = ctx.m((Shift.OFF,))
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        pieces = tuple((ni, di, off) for di in ctx.target_dis)
        out.append(Element(cid, Excess(pieces, _off_quota(ctx, n)),
                           nurse=n.id))
    return out


def s26(cid, ctx: StageContext):
    """At least four offs on weekend/holiday dates."""
    out = []
    offm = ctx.m(OFF_SHIFTS)
    days = ctx.cal.target_off_days
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        pieces = tuple((ni, ctx.di_of[d], offm) for d in days)
        out.append(Element(cid, Shortfall(pieces, 4), nurse=n.id))
    return out


def s27(cid, ctx: StageContext):
    """Avoid three consecutive on-ward day shifts (short-hours nurses are
    on fixed weekday schedules and are exempt)."""
    out = []
    steps = [DAY_SHIFTS - {Shift.OTHER}] * 3
    for n in ctx.nurses:
        if n.short_hours:
            continue
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(3):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, Excess(pieces, 2), nurse=n.id, date=d))
    return out


def s28(cid, ctx: StageContext):
    """Five workdays, a lone off, then work again."""
    out = []
    steps = [WORK_SHIFTS] * 5 + [OFF_SHIFTS, WORK_SHIFTS]
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(7):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, Excess(pieces, 6), nurse=n.id, date=d))
    return out


def s29(cid, ctx: StageContext):
    """At least two offs inside every nine-day window."""
    out = []
    steps = [OFF_SHIFTS] * 9
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(9):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, Shortfall(pieces, 2), nurse=n.id, date=d))
    return out


def s30(cid, ctx: StageContext):
    """At least one Saturday-Sunday off pair."""
    out = []
    offm = ctx.m(OFF_SHIFTS)
    sats = ctx.cal.saturdays
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        mult = (ctx.cfg.pref_multiplier(cid)
                if n.off_preference is OffPreference.WEEKEND_PAIR else 1)
        inds = tuple(
            Indicator((
                (ni, ctx.di_of[d], offm),
                (ni, ctx.di_of[d] + 1, offm),
            ))
            for d in sats
        )
        out.append(Element(cid, IndShortfall(inds, 1), nurse=n.id, mult=mult))
    return out


def s31(cid, ctx: StageContext):
    """At least two isolated two-day off blocks (work-off-off-work)."""
    out = []
    steps = [WORK_SHIFTS, OFF_SHIFTS, OFF_SHIFTS, WORK_SHIFTS]
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        mult = (ctx.cfg.pref_multiplier(cid)
                if n.off_preference is OffPreference.PAIR_OFF else 1)
        inds = tuple(
            Indicator(ctx.window_pieces(ni, d, steps))
            for d in ctx.cal.window_starts(4)
        )
        out.append(Element(cid, IndShortfall(inds, 2), nurse=n.id, mult=mult))
    return out


def s32(cid, ctx: StageContext):
    """At least one off block of three days or longer."""
    out = []
    steps = [OFF_SHIFTS] * 3
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        mult = (ctx.cfg.pref_multiplier(cid)
                if n.off_preference is OffPreference.TRIPLE_OFF else 1)
        inds = tuple(
            Indicator(ctx.window_pieces(ni, d, steps))
            for d in ctx.cal.window_starts(3)
        )
        out.append(Element(cid, IndShortfall(inds, 1), nurse=n.id, mult=mult))
    return out


def s33(cid, ctx: StageContext):
    """Cap on single-day work sandwiched by offs; single-off-preference
    nurses get an allowance of two but a heavier weight."""
    out = []
    steps = [OFF_SHIFTS, DAY_SHIFTS, OFF_SHIFTS]
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        single_pref = n.off_preference is OffPreference.SINGLE_OFF
        mult = ctx.cfg.pref_multiplier(cid) if single_pref else 1
        allowance = 2 if single_pref else 0
        inds = tuple(
            Indicator(ctx.window_pieces(ni, d, steps))
            for d in ctx.cal.window_starts(3)
        )
        out.append(Element(cid, IndExcess(inds, allowance),
                           nurse=n.id, mult=mult))
    return out


def s34(cid, ctx: StageContext):
    eligible = tuple(range(len(ctx.nurses)))
    members = tuple(sd("N", i) for i in (26, 27, 28, 30, 31, 32, 33))
    return [Element(cid, EpiMax(members, eligible))]


# ---------------------------------------------------------------------------
# Catalog tables
# ---------------------------------------------------------------------------


def _rookies(ctx):
    return [n for n in ctx.nurses if n.rookie]


def _care_workers(ctx):
    return [n for n in ctx.nurses if n.care_worker]


DAY_HARD = [
    (hd("N", 1), "wish cells fixed; free cells limited to day-stage symbols",
     _always, h1),
    (hd("N", 2), "night specialists take no plain day shifts", _always, h2),
    (hd("N", 3), "per-shift maximum run length", _always, h3),
    (hd("N", 4), "at most 5 workdays in any 6 consecutive days", _always, h4),
    (hd("N", 5), "no month-end work run feeding a straddling night", _always, h5),
    (hd("N", 6), "no 3 day-band shifts right before a long day", _always, h6),
    (hd("N", 7), "forbidden shift sequences", _always, h7),
    (hd("S", 8), "male staffing within bounds", _male_on, h8),
    (hd("S", 9), "exactly one symbol per cell", _always, h9),
]

DAY_SOFT = [
    (sd("S", 1), "daily staffing lower bound (grouped nurses)",
     _always, _staff(lambda c: c.cfg.grouped, "total", True)),
    (sd("S", 2), "daily staffing upper bound (grouped nurses)",
     _always, _staff(lambda c: c.cfg.grouped, "total", False)),
    (sd("S", 3), "group-1 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((1,)), "group1", True)),
    (sd("S", 4), "group-1 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((1,)), "group1", False)),
    (sd("S", 5), "group-1/2 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((1, 2)), "group12", True)),
    (sd("S", 6), "group-1/2 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((1, 2)), "group12", False)),
    (sd("S", 7), "group-4 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((4,)), "group4", True)),
    (sd("S", 8), "group-4 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((4,)), "group4", False)),
    (sd("S", 9), "per-team group-1 staffing lower bound",
     _team_on, _team_staff((1,), "team_g1", True)),
    (sd("S", 10), "per-team group-1 staffing upper bound",
     _team_on, _team_staff((1,), "team_g1", False)),
    (sd("S", 11), "per-team group-1/2 staffing lower bound",
     _team_on, _team_staff((1, 2), "team_g12", True)),
    (sd("S", 12), "per-team group-1/2 staffing upper bound",
     _team_on, _team_staff((1, 2), "team_g12", False)),
    (sd("S", 13), "per-team group-3/4 staffing lower bound",
     _team_on, _team_staff((3, 4), "team_g34", True)),
    (sd("S", 14), "per-team group-3/4 staffing upper bound",
     _team_on, _team_staff((3, 4), "team_g34", False)),
    (sd("S", 15), "per-team staffing lower bound",
     _team_on, _team_staff(None, "team", True)),
    (sd("S", 16), "per-team staffing upper bound",
     _team_on, _team_staff(None, "team", False)),
    (sd("S", 17), "rookie staffing lower bound",
     _rookie_on, _staff(_rookies, "rookie", True)),
    (sd("S", 18), "rookie staffing upper bound",
     _rookie_on, _staff(_rookies, "rookie", False)),
    (sd("S", 17, "cw"), "care-worker staffing lower bound",
     _care_on, _staff(_care_workers, "care", True)),
    (sd("S", 18, "cw"), "care-worker staffing upper bound",
     _care_on, _staff(_care_workers, "care", False)),
    (sd("S", 19), "pair co-work lower bound", _always, pair_elements),
    (sd("S", 20), "forbidden pair", _always, forbidden_pair_elements),
    (sd("S", 21), "leader coverage lower bound", _always, s21),
    (sd("N", 22), "forbidden weekday assignment", _always,
     forbidden_assignment_elements),
    (sd("N", 23), "penalized shift sequences", _always,
     lambda cid, ctx: sequence_elements(
         cid, ctx.cfg.soft_sequences(ctx.stage), ctx, hard=False)),
    (sd("N", 24), "monthly off-count lower bound", _always, s24),
    (sd("N", 25), "monthly off-count upper bound", _always, s25),
    (sd("N", 26), "at least 4 weekend/holiday offs", _always, s26),
    (sd("N", 27), "avoid 3 consecutive on-ward day shifts", _always, s27),
    (sd("N", 28), "avoid a lone off after a 5-day run", _always, s28),
    (sd("N", 29), "at least 2 offs per 9-day window", _always, s29),
    (sd("N", 30), "at least one Sat-Sun off pair", _always, s30),
    (sd("N", 31), "at least two isolated 2-day off blocks", _always, s31),
    (sd("N", 32), "at least one 3-day-or-longer off block", _always, s32),
    (sd("N", 33), "cap on single-day work between offs", _always, s33),
    (sd("N", 34), "fairness cap on nurse-constraint violations", _always, s34),
]
