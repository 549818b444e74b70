"""Night-stage constraint definitions (hard 1-14, soft 1-35).

Each entry is (id, description, enabled-predicate, builder). Builders emit
Elements against a StageContext; the registry assembles them into the
compiled stage. Shapes follow the published formulation for this system;
see the module docstrings in catalog/ for the shared machinery.
"""

from __future__ import annotations

from ..shifts import (
    ALL_SHIFTS,
    DAY_SHIFTS,
    OFF_OR_UNSET,
    OFF_SHIFTS,
    WORK_SHIFTS,
    Shift,
)
from ..staff import NightClass, NightPattern, OffPreference
from .common import (
    forbidden_assignment_elements,
    forbidden_pair_elements,
    night_window_excess,
    pair_elements,
    run_limit_elements,
    sequence_elements,
    staffing_hard,
    staffing_soft,
)
from .context import StageContext
from .elements import (
    CellDomain,
    Element,
    EpiMax,
    Excess,
    Indicator,
    IndHardGe,
    LinearHard,
    MaxExcess,
    MinShortfall,
    Shortfall,
)
from .ids import hn, sn

NIGHT_FREE_MASK_SHIFTS = frozenset(
    {Shift.NIGHT_IN, Shift.NIGHT_OUT, Shift.OFF, Shift.UNSET}
)


def _next_month_inferences(ctx: StageContext, nurse) -> dict:
    """Margin cells pinned by next-month wish logic (12h pattern only):
    a morning-after wish on next-month day 2 implies a night start on day 1."""
    out = {}
    if (ctx.cfg.night_pattern is NightPattern.TWELVE_HOUR
            and nurse.night_class is NightClass.NIGHT_CAPABLE):
        ni = ctx.ni_of[nurse.id]
        dn1, dn2 = ctx.cal.next_first, ctx.cal.next_second
        w2 = ctx.wish_at(ni, ctx.di_of[dn2])
        w1 = ctx.wish_at(ni, ctx.di_of[dn1])
        if w2 == Shift.NIGHT_OUT.code and w1 is None:
            out[dn1] = Shift.NIGHT_IN
    return out


# ---------------------------------------------------------------------------
# Hard constraints
# ---------------------------------------------------------------------------


def h1(cid, ctx: StageContext):
    """Wish fixing plus the stage alphabet limit on free cells."""
    out = []
    free_mask = ctx.m(NIGHT_FREE_MASK_SHIFTS)
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        inferred = _next_month_inferences(ctx, n)
        for di in range(ctx.num_days):
            wish = ctx.wish_at(ni, di)
            d = ctx.cal.days[di]
            if wish is not None:
                out.append(Element(cid, CellDomain(ni, di, 1 << wish, True),
                                   nurse=n.id, date=d))
            elif ctx.is_margin(di):
                pinned = inferred.get(d, Shift.UNSET)
                out.append(Element(cid, CellDomain(ni, di, 1 << pinned.code, True),
                                   nurse=n.id, date=d))
            else:
                out.append(Element(cid, CellDomain(ni, di, free_mask),
                                   nurse=n.id, date=d))
    return out


def h2(cid, ctx: StageContext):
    """Ban prev-month day runs flowing into unset-then-night (the unset would
    become a 12h prep day and complete a six-day run)."""
    out = []
    steps = [DAY_SHIFTS, DAY_SHIFTS, DAY_SHIFTS,
             frozenset((Shift.UNSET,)), frozenset((Shift.NIGHT_IN,))]
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.prev_days:
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, LinearHard(pieces, hi=4),
                               nurse=n.id, date=d))
    return out


def h3(cid, ctx: StageContext):
    """Day 1 is a morning-after exactly when the prev month ended on a night."""
    out = []
    d1 = ctx.cal.first_day
    prev_last = ctx.cal.prev_last
    for n in ctx.cfg.night_workers:
        ni = ctx.ni_of[n.id]
        ended_on_night = ctx.wish_at(ni, ctx.di_of[prev_last]) == Shift.NIGHT_IN.code
        if ended_on_night:
            dom = 1 << Shift.NIGHT_OUT.code
        else:
            dom = ctx.m(ALL_SHIFTS - {Shift.NIGHT_OUT})
        out.append(Element(cid, CellDomain(ni, ctx.di_of[d1], dom),
                           nurse=n.id, date=d1))
    return out


def h4(cid, ctx: StageContext):
    """Month-end night cells pinned or banned by next-month wishes."""
    out = []
    dlast = ctx.cal.last_day
    dn1, dn2 = ctx.cal.next_first, ctx.cal.next_second
    di_last = ctx.di_of[dlast]
    not_nin = ctx.m(ALL_SHIFTS - {Shift.NIGHT_IN})
    not_night = ctx.m(ALL_SHIFTS - {Shift.NIGHT_IN, Shift.NIGHT_OUT})

    def dom(nid, ni, mask, note):
        out.append(Element(cid, CellDomain(ni, di_last, mask),
                           nurse=nid, date=dlast, note=note))

    for n in ctx.cfg.night_workers:
        ni = ctx.ni_of[n.id]
        w_n1 = ctx.wish_at(ni, ctx.di_of[dn1])
        w_n2 = ctx.wish_at(ni, ctx.di_of[dn2])
        if w_n1 in (Shift.OFF.code, Shift.SPECIAL_OFF.code):
            dom(n.id, ni, not_nin, "off wished next day 1")
        if w_n1 == Shift.NIGHT_OUT.code:
            dom(n.id, ni, 1 << Shift.NIGHT_IN.code, "morning-after wished next day 1")
        if (ctx.cfg.night_pattern is NightPattern.TWELVE_HOUR
                and n.night_class is NightClass.NIGHT_CAPABLE):
            if w_n1 in (Shift.DAY.code, Shift.OTHER.code):
                dom(n.id, ni, not_night, "day duty wished next day 1")
            if w_n2 in (Shift.DAY.code, Shift.OTHER.code):
                dom(n.id, ni, not_nin, "day duty wished next day 2")
            if w_n2 == Shift.NIGHT_IN.code:
                dom(n.id, ni, not_night, "night wished next day 2")
            if w_n2 == Shift.NIGHT_OUT.code:
                dom(n.id, ni, not_night, "morning-after wished next day 2")
                # the matching day-1 night start is pinned via h1 margins
    return out


def h5(cid, ctx: StageContext):
    """At most five workdays in any six consecutive days, month joins included."""
    out = []
    steps = [WORK_SHIFTS] * 6
    starts = list(ctx.cal.prev_days) + list(ctx.cal.target_days)
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        for d in starts:
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, LinearHard(pieces, hi=5),
                               nurse=n.id, date=d))
    return out


def h6(cid, ctx: StageContext):
    return sequence_elements(cid, ctx.cfg.hard_sequences(ctx.stage), ctx, hard=True)


def h7(cid, ctx: StageContext):
    """Day-only nurses never take night cells."""
    out = []
    dom = ctx.m(ALL_SHIFTS - {Shift.NIGHT_IN, Shift.NIGHT_OUT})
    for n in ctx.cfg.day_only:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.target_days:
            out.append(Element(cid, CellDomain(ni, ctx.di_of[d], dom),
                               nurse=n.id, date=d))
    return out


def h8(cid, ctx: StageContext):
    """Fixed-count nurses keep night starts and ends inside their bounds."""
    out = []
    all_dis = range(ctx.num_days)
    for n in ctx.cfg.night_workers:
        if not n.night_count_fixed:
            continue
        ni = ctx.ni_of[n.id]
        for s in (Shift.NIGHT_IN, Shift.NIGHT_OUT):
            pieces = tuple((ni, di, ctx.m((s,))) for di in all_dis)
            out.append(Element(
                cid, LinearHard(pieces, lo=n.night_lb, hi=n.night_ub),
                nurse=n.id, note=f"count of {s.value}"))
    return out


def h9(cid, ctx: StageContext):
    """Twelve-hour pattern: at most one night start per four-day window."""
    if ctx.cfg.night_pattern is not NightPattern.TWELVE_HOUR:
        return []
    out = []
    steps = [frozenset((Shift.NIGHT_IN,))] * 4
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(4):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, LinearHard(pieces, hi=1),
                               nurse=n.id, date=d))
    return out


def h10(cid, ctx: StageContext):
    return run_limit_elements(cid, ctx)


def triple_off_indicators(ctx: StageContext, ni: int):
    """Candidate: three off-or-unset days then anything but a night cell."""
    steps = [OFF_OR_UNSET, OFF_OR_UNSET, OFF_OR_UNSET,
             DAY_SHIFTS | OFF_OR_UNSET]
    return tuple(
        Indicator(ctx.window_pieces(ni, d, steps))
        for d in ctx.cal.window_starts(4)
    )


def h11(cid, ctx: StageContext):
    """Triple-off-preference nurses keep at least two candidate windows."""
    out = []
    for n in ctx.nurses:
        if n.off_preference is not OffPreference.TRIPLE_OFF:
            continue
        ni = ctx.ni_of[n.id]
        inds = triple_off_indicators(ctx, ni)
        out.append(Element(cid, IndHardGe(inds, 2), nurse=n.id))
    return out


def h12(cid, ctx: StageContext):
    """Keep a day-leader-capable nurse available for the later day stage."""
    leaders = [n for n in ctx.nurses if n.day_leader]
    if not leaders:
        return []
    out = []
    weekday_set = ctx.m({Shift.DAY, Shift.UNSET})
    offday_set = ctx.m({Shift.DAY, Shift.LONGDAY, Shift.UNSET})
    nis = [ctx.ni_of[n.id] for n in leaders]
    for d in ctx.cal.target_days:
        m = offday_set if ctx.cal.is_weekend_holiday(d) else weekday_set
        pieces = tuple((ni, ctx.di_of[d], m) for ni in nis)
        out.append(Element(cid, LinearHard(pieces, lo=1), date=d))
    return out


def h13(cid, ctx: StageContext):
    males = [n for n in ctx.nurses if n.male]
    return staffing_hard(cid, males, ctx.cfg.night_staffing.male, ctx)


def h14(cid, ctx: StageContext):
    """Exactly one symbol per cell: structural in the roster grid and emitted
    as assignment equalities by the encoder; nothing to score here."""
    return []


# ---------------------------------------------------------------------------
# Soft constraints
# ---------------------------------------------------------------------------


def _staff(group_sel, side_name, lower):
    def build(cid, ctx: StageContext):
        bounds = (ctx.cfg.night_staffing if ctx.stage.value == "n"
                  else ctx.cfg.day_staffing)
        side = getattr(bounds, side_name)
        table = side.lb if lower else side.ub
        return staffing_soft(cid, group_sel(ctx), table, lower, ctx)

    return build


def _team_staff(groups, side_name, lower):
    def build(cid, ctx: StageContext):
        bounds = (ctx.cfg.night_staffing if ctx.stage.value == "n"
                  else ctx.cfg.day_staffing)
        table_by_team = getattr(bounds, side_name)
        out = []
        for t in ctx.cfg.teams:
            b = table_by_team.get(t)
            if b is None:
                continue
            table = b.lb if lower else b.ub
            nurses = ctx.cfg.in_team(t, groups)
            out.extend(staffing_soft(cid, nurses, table, lower, ctx,
                                     note=f"team {t}"))
        return out

    return build


def s19(cid, ctx):
    return pair_elements(cid, ctx)


def s20(cid, ctx):
    return forbidden_pair_elements(cid, ctx)


def s21(cid, ctx):
    return forbidden_assignment_elements(cid, ctx)


def s22(cid, ctx):
    return sequence_elements(cid, ctx.cfg.soft_sequences(ctx.stage), ctx, hard=False)


def s23(cid, ctx: StageContext):
    """Keep at least four placeable offs: penalize regular offs beyond
    quota - 4 during the night stage."""
    out = []
    off = ctx.m((Shift.OFF,))
    for n in ctx.nurses:
        ni = ctx.ni_of[n.id]
        quota = n.off_quota if n.off_quota is not None else ctx.cfg.off_quota
        pieces = tuple((ni, ctx.di_of[d], off) for d in ctx.cal.target_days)
        out.append(Element(cid, Excess(pieces, quota - 4), nurse=n.id))
    return out


def s24(cid, ctx: StageContext):
    """Night gap upper bound: some night start in every 14-day window."""
    out = []
    steps = [frozenset((Shift.NIGHT_IN,))] * 14
    for n in ctx.cfg.night_workers:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(14):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, Shortfall(pieces, 1), nurse=n.id, date=d))
    return out


def _month_count_pieces(ctx, ni, shift):
    return tuple((ni, di, ctx.m((shift,))) for di in ctx.target_dis)


def s25(cid, ctx: StageContext):
    """Monthly night count lower bound on min(starts, ends)."""
    out = []
    for n in ctx.cfg.night_workers:
        ni = ctx.ni_of[n.id]
        out.append(Element(
            cid,
            MinShortfall(_month_count_pieces(ctx, ni, Shift.NIGHT_IN),
                         _month_count_pieces(ctx, ni, Shift.NIGHT_OUT),
                         n.night_lb),
            nurse=n.id))
    return out


def s26(cid, ctx: StageContext):
    """Monthly night count upper bound on max(starts, ends)."""
    out = []
    for n in ctx.cfg.night_workers:
        ni = ctx.ni_of[n.id]
        out.append(Element(
            cid,
            MaxExcess(_month_count_pieces(ctx, ni, Shift.NIGHT_IN),
                      _month_count_pieces(ctx, ni, Shift.NIGHT_OUT),
                      n.night_ub),
            nurse=n.id))
    return out


def s27(cid, ctx: StageContext):
    """Fri-Sat-Sun-Mon nights above the ward average, weighted for
    weekend-pair-preference nurses."""
    out = []
    nin = ctx.m((Shift.NIGHT_IN,))
    days = ctx.cal.fssm_days
    if not days:
        return out
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        mult = (ctx.cfg.pref_multiplier(cid)
                if n.off_preference is OffPreference.WEEKEND_PAIR else 1)
        pieces = tuple((ni, ctx.di_of[d], nin) for d in days)
        out.append(Element(cid, Excess(pieces, ctx.cfg.avg_fssm_nights),
                           nurse=n.id, mult=mult))
    return out


def s28(cid, ctx: StageContext):
    """Event-weekday nights above the ward average."""
    out = []
    nin = ctx.m((Shift.NIGHT_IN,))
    days = ctx.cal.event_days
    if not days:
        return out
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        pieces = tuple((ni, ctx.di_of[d], nin) for d in days)
        out.append(Element(cid, Excess(pieces, ctx.cfg.avg_event_nights),
                           nurse=n.id))
    return out


_P5_HEAD = [DAY_SHIFTS, DAY_SHIFTS,
            frozenset((Shift.LONGDAY, Shift.UNSET)),
            frozenset((Shift.NIGHT_IN,))]


def s29(cid, ctx: StageContext):
    """Two day shifts, a prep day (12h or unset), then a night start."""
    out = []
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        mult = (ctx.cfg.pref_multiplier(cid)
                if n.off_preference is OffPreference.SINGLE_OFF else 1)
        for d in ctx.cal.window_starts(4):
            pieces = ctx.window_pieces(ni, d, _P5_HEAD)
            out.append(Element(cid, Excess(pieces, 3), nurse=n.id,
                               date=d, mult=mult))
    return out


_LD_OR_UNSET = frozenset((Shift.LONGDAY, Shift.UNSET))
_NIN = frozenset((Shift.NIGHT_IN,))
_NOUT = frozenset((Shift.NIGHT_OUT,))

# ten-day templates: 5-work / lone off / 4-work and its mirror
_SPLIT_A = [DAY_SHIFTS, DAY_SHIFTS, _LD_OR_UNSET, _NIN, _NOUT,
            OFF_SHIFTS, DAY_SHIFTS, _LD_OR_UNSET, _NIN, _NOUT]
_SPLIT_B = [DAY_SHIFTS, _LD_OR_UNSET, _NIN, _NOUT, OFF_SHIFTS,
            DAY_SHIFTS, DAY_SHIFTS, _LD_OR_UNSET, _NIN, _NOUT]


def s30(cid, ctx: StageContext):
    """Night-bearing 5-1-4 or 4-1-5 split runs inside a ten-day window."""
    out = []
    for n in ctx.cfg.night_capable:
        ni = ctx.ni_of[n.id]
        for d in ctx.cal.window_starts(10):
            a = ctx.window_pieces(ni, d, _SPLIT_A)
            b = ctx.window_pieces(ni, d, _SPLIT_B)
            out.append(Element(cid, MaxExcess(a, b, 9), nurse=n.id, date=d))
    return out


def s31(cid, ctx: StageContext):
    """Three night starts within nine days."""
    def mult(n):
        if n.off_preference in (OffPreference.PAIR_OFF, OffPreference.TRIPLE_OFF):
            return ctx.cfg.pref_multiplier(cid)
        return 1

    return night_window_excess(cid, ctx.cfg.night_capable, 9, 2, ctx, mult)


def s32(cid, ctx: StageContext):
    """Four night starts within 13 days (capable) / 10 days (specialists)."""
    out = night_window_excess(cid, ctx.cfg.night_capable, 13, 3, ctx)
    out += night_window_excess(cid, ctx.cfg.night_only, 10, 3, ctx)
    return out


def s33(cid, ctx: StageContext):
    """Four night starts within any two weeks."""
    return night_window_excess(cid, ctx.cfg.night_capable, 14, 3, ctx)


def s34(cid, ctx: StageContext):
    eligible = tuple(ctx.ni_of[n.id] for n in ctx.cfg.night_capable)
    members = (sn("N", 26), sn("N", 28))
    return [Element(cid, EpiMax(members, eligible))]


def s35(cid, ctx: StageContext):
    eligible = tuple(ctx.ni_of[n.id] for n in ctx.cfg.night_capable)
    members = tuple(sn("N", i) for i in (26, 27, 28, 29, 30, 31, 33))
    return [Element(cid, EpiMax(members, eligible))]


# ---------------------------------------------------------------------------
# Catalog tables
# ---------------------------------------------------------------------------


def _always(cfg):
    return True


def _team_on(cfg):
    return cfg.toggles.team_constraints


def _rookie_on(cfg):
    return cfg.toggles.rookie_constraints


def _male_on(cfg):
    return cfg.toggles.male_constraints


def _care_on(cfg):
    return cfg.toggles.care_worker_constraints


def _rookies(ctx):
    return [n for n in ctx.nurses if n.rookie]


def _care_workers(ctx):
    return [n for n in ctx.nurses if n.care_worker]


NIGHT_HARD = [
    (hn("N", 1), "wish cells fixed; free cells limited to night-stage symbols",
     _always, h1),
    (hn("N", 2), "no prev-month day run flowing into unset-then-night",
     _always, h2),
    (hn("N", 3), "day 1 morning-after pinned by the prev month's last cell",
     _always, h3),
    (hn("N", 4), "month-end night cells pinned by next-month wishes",
     _always, h4),
    (hn("N", 5), "at most 5 workdays in any 6 consecutive days", _always, h5),
    (hn("N", 6), "forbidden shift sequences", _always, h6),
    (hn("N", 7), "day-only nurses take no night cells", _always, h7),
    (hn("N", 8), "fixed night-count bounds", _always, h8),
    (hn("N", 9), "night starts at least 4 days apart", _always, h9),
    (hn("N", 10), "per-shift maximum run length", _always, h10),
    (hn("N", 11), "two triple-off candidate windows for triple-off nurses",
     _always, h11),
    (hn("S", 12), "keep a day-leader-capable nurse available daily", _always, h12),
    (hn("S", 13), "male staffing within bounds", _male_on, h13),
    (hn("S", 14), "exactly one symbol per cell", _always, h14),
]

NIGHT_SOFT = [
    (sn("S", 1), "daily staffing lower bound (grouped nurses)",
     _always, _staff(lambda c: c.cfg.grouped, "total", True)),
    (sn("S", 2), "daily staffing upper bound (grouped nurses)",
     _always, _staff(lambda c: c.cfg.grouped, "total", False)),
    (sn("S", 3), "group-1 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((1,)), "group1", True)),
    (sn("S", 4), "group-1 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((1,)), "group1", False)),
    (sn("S", 5), "group-1/2 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((1, 2)), "group12", True)),
    (sn("S", 6), "group-1/2 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((1, 2)), "group12", False)),
    (sn("S", 7), "group-4 staffing lower bound",
     _always, _staff(lambda c: c.cfg.in_group((4,)), "group4", True)),
    (sn("S", 8), "group-4 staffing upper bound",
     _always, _staff(lambda c: c.cfg.in_group((4,)), "group4", False)),
    (sn("S", 9), "per-team group-1 staffing lower bound",
     _team_on, _team_staff((1,), "team_g1", True)),
    (sn("S", 10), "per-team group-1 staffing upper bound",
     _team_on, _team_staff((1,), "team_g1", False)),
    (sn("S", 11), "per-team group-1/2 staffing lower bound",
     _team_on, _team_staff((1, 2), "team_g12", True)),
    (sn("S", 12), "per-team group-1/2 staffing upper bound",
     _team_on, _team_staff((1, 2), "team_g12", False)),
    (sn("S", 13), "per-team group-3/4 staffing lower bound",
     _team_on, _team_staff((3, 4), "team_g34", True)),
    (sn("S", 14), "per-team group-3/4 staffing upper bound",
     _team_on, _team_staff((3, 4), "team_g34", False)),
    (sn("S", 15), "per-team staffing lower bound",
     _team_on, _team_staff(None, "team", True)),
    (sn("S", 16), "per-team staffing upper bound",
     _team_on, _team_staff(None, "team", False)),
    (sn("S", 17), "rookie staffing lower bound",
     _rookie_on, _staff(_rookies, "rookie", True)),
    (sn("S", 18), "rookie staffing upper bound",
     _rookie_on, _staff(_rookies, "rookie", False)),
    (sn("S", 17, "cw"), "care-worker staffing lower bound",
     _care_on, _staff(_care_workers, "care", True)),
    (sn("S", 18, "cw"), "care-worker staffing upper bound",
     _care_on, _staff(_care_workers, "care", False)),
    (sn("S", 19), "pair co-work lower bound", _always, s19),
    (sn("S", 20), "forbidden pair", _always, s20),
    (sn("N", 21), "forbidden weekday assignment", _always, s21),
    (sn("N", 22), "penalized shift sequences", _always, s22),
    (sn("N", 23), "keep at least 4 placeable offs", _always, s23),
    (sn("N", 24), "night gap of at most 14 days", _always, s24),
    (sn("N", 25), "monthly night count lower bound", _always, s25),
    (sn("N", 26), "monthly night count upper bound", _always, s26),
    (sn("N", 27), "Fri-Sat-Sun-Mon night fairness", _always, s27),
    (sn("N", 28), "event-day night fairness", _always, s28),
    (sn("N", 29), "avoid 5-day runs ending in a night", _always, s29),
    (sn("N", 30), "avoid night-bearing 5-1-4 / 4-1-5 split runs", _always, s30),
    (sn("N", 31), "avoid 3 nights in 9 days", _always, s31),
    (sn("N", 32), "avoid 4 nights in 13 days (10 for specialists)", _always, s32),
    (sn("N", 33), "avoid 4 nights in 14 days", _always, s33),
    (sn("N", 34), "fairness cap on night-count violations", _always, s34),
    (sn("N", 35), "fairness cap on nurse-constraint violations", _always, s35),
]
