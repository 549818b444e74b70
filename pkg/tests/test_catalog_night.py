"""Unit cases for every night-stage catalog entry.

Each test builds a satisfying roster and a violating roster by hand and
asserts the evaluator/checker magnitudes against values computed from the
formulas directly. Row strings cover Oct 27 - Dec 5 2024 (positions 0-4
previous month, 5-34 target, 35-39 next month)."""

import datetime as dt
from fractions import Fraction

import pytest

from rostra.calendars import build_calendar
from rostra.catalog import check_hard, compile_stage, evaluate_soft, Stage
from rostra.catalog.ids import hn, sn
from rostra.roster import Provenance
from rostra.shifts import Shift
from rostra.staff import (
    Bound,
    DowTable,
    ForbiddenAssignment,
    ForbiddenPairRule,
    Nurse,
    NightClass,
    NightPattern,
    OffPreference,
    PairRule,
    SequenceRule,
    StaffingBounds,
    Toggles,
    WardConfig,
)

from conftest import make_roster, nov, oct, dec


def wish_roster(cfg, cells=None):
    """All-UNSET wish table with a few explicit wishes."""
    r = make_roster(cfg, default=".")
    if cells:
        r = r.with_cells(cells, Provenance.WISH)
    return r


def records(cid, roster, cfg, wishes=None):
    return check_hard(cid, roster, cfg, wishes)


# ---------------------------------------------------------------------------
# Hard constraints
# ---------------------------------------------------------------------------


def test_hn1_wish_fixing_and_alphabet(micro_cfg):
    wishes = wish_roster(micro_cfg, {("n1", nov(5)): Shift.DAY})
    ok = make_roster(micro_cfg, default=".")
    ok = ok.with_cells({("n1", nov(5)): Shift.DAY}, Provenance.WISH)
    assert records(hn("N", 1), ok, micro_cfg, wishes) == []

    broken_wish = ok.with_cells({("n1", nov(5)): Shift.OFF}, Provenance.EDITED)
    recs = records(hn("N", 1), broken_wish, micro_cfg, wishes)
    assert len(recs) == 1
    assert (recs[0].nurse, recs[0].date, recs[0].magnitude) == ("n1", nov(5), 1)

    day_in_free_cell = ok.with_cells({("n2", nov(6)): Shift.EARLY},
                                     Provenance.EDITED)
    recs = records(hn("N", 1), day_in_free_cell, micro_cfg, wishes)
    assert [(r.nurse, r.date) for r in recs] == [("n2", nov(6))]


def test_hn2_month_straddle_into_unset_night(micro_cfg):
    # Oct 29-31 day shifts, Nov 1 unset, Nov 2 night start: sum 5 > 4.
    bad = make_roster(micro_cfg, rows={"n2": "ooDDD.Noooo" + "o" * 29})
    recs = records(hn("N", 2), bad, micro_cfg)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n2", oct(29), 1)]

    ok = bad.with_cells({("n2", nov(1)): Shift.OFF}, Provenance.EDITED)
    assert records(hn("N", 2), ok, micro_cfg) == []


def test_hn3_first_day_pinned_by_prev_month(micro_cfg):
    wishes = wish_roster(micro_cfg, {("n2", oct(31)): Shift.NIGHT_IN})
    bad = make_roster(micro_cfg, default="o")
    recs = records(hn("N", 3), bad, micro_cfg, wishes)
    assert [(r.nurse, r.date) for r in recs] == [("n2", nov(1))]

    ok = bad.with_cells({("n2", nov(1)): Shift.NIGHT_OUT}, Provenance.SOLVED)
    assert records(hn("N", 3), ok, micro_cfg, wishes) == []

    # without a prev-month night, day 1 must not be a morning-after
    plain = wish_roster(micro_cfg)
    bad2 = make_roster(micro_cfg).with_cells(
        {("n3", nov(1)): Shift.NIGHT_OUT}, Provenance.SOLVED)
    recs = records(hn("N", 3), bad2, micro_cfg, plain)
    assert [(r.nurse, r.date) for r in recs] == [("n3", nov(1))]


def test_hn4_month_end_pins(micro_cfg):
    # off wished on next day 1 bans a month-end night start
    wishes = wish_roster(micro_cfg, {("n2", dec(1)): Shift.OFF})
    bad = make_roster(micro_cfg).with_cells(
        {("n2", nov(30)): Shift.NIGHT_IN}, Provenance.SOLVED)
    recs = records(hn("N", 4), bad, micro_cfg, wishes)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n2", nov(30), 1)]
    ok = bad.with_cells({("n2", nov(30)): Shift.OFF}, Provenance.SOLVED)
    assert records(hn("N", 4), ok, micro_cfg, wishes) == []

    # morning-after wished on next day 1 forces the night start
    wishes2 = wish_roster(micro_cfg, {("n2", dec(1)): Shift.NIGHT_OUT})
    bad2 = make_roster(micro_cfg)  # Nov 30 OFF
    recs = records(hn("N", 4), bad2, micro_cfg, wishes2)
    assert [(r.nurse, r.date) for r in recs] == [("n2", nov(30))]
    ok2 = bad2.with_cells({("n2", nov(30)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert records(hn("N", 4), ok2, micro_cfg, wishes2) == []

    # 12h clause: a night wished on next day 2 bans both month-end night cells
    wishes3 = wish_roster(micro_cfg, {("n2", dec(2)): Shift.NIGHT_IN})
    bad3 = make_roster(micro_cfg).with_cells(
        {("n2", nov(30)): Shift.NIGHT_OUT}, Provenance.SOLVED)
    recs = records(hn("N", 4), bad3, micro_cfg, wishes3)
    assert [(r.nurse, r.date) for r in recs] == [("n2", nov(30))]


def test_hn5_six_consecutive_workdays(micro_cfg):
    # Oct 29-31 + Nov 1-3 all work: one window, spanning the month join.
    bad = make_roster(micro_cfg, rows={"n2": "ooDDDDDD" + "o" * 32})
    recs = records(hn("N", 5), bad, micro_cfg)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n2", oct(29), 1)]

    ok = bad.with_cells({("n2", nov(3)): Shift.OFF}, Provenance.SOLVED)
    assert records(hn("N", 5), ok, micro_cfg) == []


def test_hn6_forbidden_sequences(micro_cfg):
    # night start followed by anything but the morning-after
    bad = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.OFF},
        Provenance.SOLVED)
    recs = records(hn("N", 6), bad, micro_cfg)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n2", nov(5), 1)]

    ok = bad.with_cells({("n2", nov(6)): Shift.NIGHT_OUT,
                         ("n2", nov(7)): Shift.OFF}, Provenance.SOLVED)
    assert records(hn("N", 6), ok, micro_cfg) == []

    # 12h pattern: an off right before a night start is banned for capable
    bad2 = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(4)): Shift.OFF, ("n2", nov(5)): Shift.NIGHT_IN,
         ("n2", nov(6)): Shift.NIGHT_OUT, ("n2", nov(7)): Shift.OFF},
        Provenance.SOLVED)
    recs = records(hn("N", 6), bad2, micro_cfg)
    assert [(r.nurse, r.date) for r in recs] == [("n2", nov(4))]


def test_hn6_sixteen_hour_allows_back_to_back(micro_cfg):
    cfg = micro_cfg.with_updates(night_pattern=NightPattern.SIXTEEN_HOUR)
    r = make_roster(cfg, default=".").with_cells(
        {("n5", nov(5)): Shift.NIGHT_IN, ("n5", nov(6)): Shift.NIGHT_OUT,
         ("n5", nov(7)): Shift.NIGHT_IN, ("n5", nov(8)): Shift.NIGHT_OUT,
         ("n5", nov(9)): Shift.OFF}, Provenance.SOLVED)
    assert records(hn("N", 6), r, cfg) == []


def test_hn7_day_only_nurses_never_night(micro_cfg):
    bad = make_roster(micro_cfg).with_cells(
        {("n6", nov(5)): Shift.NIGHT_IN}, Provenance.SOLVED)
    recs = records(hn("N", 7), bad, micro_cfg)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n6", nov(5), 1)]
    assert records(hn("N", 7), make_roster(micro_cfg), micro_cfg) == []


def _fixed_count_cfg(micro_cfg, lb, ub):
    nurses = [
        n if n.id != "n2" else Nurse(
            id="n2", group=2, team="A", rookie=True,
            night_count_fixed=True, night_lb=lb, night_ub=ub)
        for n in micro_cfg.nurses
    ]
    return micro_cfg.with_updates(nurses=nurses)


def test_hn8_fixed_night_count(micro_cfg):
    cfg = _fixed_count_cfg(micro_cfg, 1, 2)
    # three starts, two ends: the start count breaks the upper bound by one
    bad = make_roster(cfg, default="o").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.NIGHT_OUT,
         ("n2", nov(9)): Shift.NIGHT_IN, ("n2", nov(10)): Shift.NIGHT_OUT,
         ("n2", nov(13)): Shift.NIGHT_IN}, Provenance.SOLVED)
    recs = records(hn("N", 8), bad, cfg)
    assert [(r.nurse, r.magnitude) for r in recs] == [("n2", 1)]

    ok = bad.with_cells({("n2", nov(13)): Shift.OFF}, Provenance.SOLVED)
    assert records(hn("N", 8), ok, cfg) == []

    # zero nights against a lower bound of one: both counts short
    none = make_roster(cfg, default="o")
    recs = records(hn("N", 8), none, cfg)
    assert [(r.nurse, r.magnitude) for r in recs] == [("n2", 1), ("n2", 1)]


def test_hn9_night_interval_lower_bound(micro_cfg):
    # starts two days apart: windows beginning Nov 4 and Nov 5 both catch it
    bad = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(7)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    recs = records(hn("N", 9), bad, micro_cfg)
    assert [(r.date, r.magnitude) for r in recs] == [
        (nov(4), 1), (nov(5), 1)]

    ok = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(9)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    assert records(hn("N", 9), ok, micro_cfg) == []


def test_hn9_skipped_for_sixteen_hour(micro_cfg):
    cfg = micro_cfg.with_updates(night_pattern=NightPattern.SIXTEEN_HOUR)
    bad = make_roster(cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(7)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    assert records(hn("N", 9), bad, cfg) == []


def test_hn10_same_shift_run_limit(micro_cfg):
    bad = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    recs = records(hn("N", 10), bad, micro_cfg)
    assert [(r.nurse, r.date, r.magnitude) for r in recs] == [
        ("n2", nov(5), 1)]
    ok = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert records(hn("N", 10), ok, micro_cfg) == []


def test_hn11_triple_off_candidates(micro_cfg):
    # all-off roster: candidates everywhere
    assert records(hn("N", 11), make_roster(micro_cfg), micro_cfg) == []

    # cycling night blocks leave no three-day off run at all: shortfall 2
    bad = make_roster(micro_cfg, rows={"n4": "NMo" * 13 + "N"})
    recs = records(hn("N", 11), bad, micro_cfg)
    assert [(r.nurse, r.magnitude) for r in recs] == [("n4", 2)]

    # exactly one candidate window: shortfall 1
    one = make_roster(micro_cfg, rows={"n4": "NM" + "oooo" + "NM" + "ooNM" * 8})
    recs = records(hn("N", 11), one, micro_cfg)
    assert [(r.nurse, r.magnitude) for r in recs] == [("n4", 1)]

    # the preference matters: same roster under n2 (no preference) is fine
    bad2 = make_roster(micro_cfg, rows={"n2": "NMo" * 13 + "N"})
    assert records(hn("N", 11), bad2, micro_cfg) == []


def test_hn12_leader_availability(micro_cfg):
    ok = make_roster(micro_cfg, default=".")
    assert records(hn("S", 12), ok, micro_cfg) == []

    bad = ok.with_cells({("n1", nov(5)): Shift.OFF}, Provenance.SOLVED)
    recs = records(hn("S", 12), bad, micro_cfg)
    assert [(r.date, r.magnitude) for r in recs] == [(nov(5), 1)]

    # weekend: a long day keeps the leader requirement satisfied
    weekend = ok.with_cells({("n1", nov(2)): Shift.LONGDAY}, Provenance.SOLVED)
    assert records(hn("S", 12), weekend, micro_cfg) == []
    # but a plain off on a weekend does not
    bad2 = ok.with_cells({("n1", nov(2)): Shift.OFF}, Provenance.SOLVED)
    recs = records(hn("S", 12), bad2, micro_cfg)
    assert [(r.date,) for r in recs] == [(nov(2),)]


def test_hn13_male_staffing(micro_cfg):
    cfg = micro_cfg.with_updates(night_staffing=StaffingBounds(
        male=Bound(DowTable.constant(1), DowTable.constant(1))))
    ok = make_roster(cfg, rows={"n1": "N" * 40})
    assert records(hn("S", 13), ok, cfg) == []

    bad = make_roster(cfg)  # no male night starts at all
    recs = records(hn("S", 13), bad, cfg)
    assert len(recs) == 30 and all(r.magnitude == 1 for r in recs)

    # toggled off: no records even on the violating roster
    off = cfg.with_updates(toggles=Toggles(male_constraints=False))
    assert records(hn("S", 13), bad, off) == []


def test_hn14_exactly_one_symbol_is_structural(micro_cfg):
    # the roster container always carries exactly one symbol per cell
    r = make_roster(micro_cfg)
    assert r.is_total()
    assert records(hn("S", 14), r, micro_cfg) == []


# ---------------------------------------------------------------------------
# Soft constraints: staffing templates
# ---------------------------------------------------------------------------


def _bounds_cfg(micro_cfg, **kw):
    return micro_cfg.with_updates(
        night_staffing=StaffingBounds(**kw),
        toggles=Toggles(care_worker_constraints=True),
    )


# (cid, staffing field, member rows for the satisfy case, upper-excess total)
STAFFING_CASES = [
    (sn("S", 1), sn("S", 2), "total", ["n1"], None),
    (sn("S", 3), sn("S", 4), "group1", ["n1"], None),
    (sn("S", 5), sn("S", 6), "group12", ["n1", "n2", "n6"], None),
    (sn("S", 7), sn("S", 8), "group4", ["n4"], None),
    (sn("S", 17), sn("S", 18), "rookie", ["n2"], None),
    (sn("S", 17, "cw"), sn("S", 18, "cw"), "care", ["n8"], None),
]


@pytest.mark.parametrize("lo_cid,hi_cid,field,members,_", STAFFING_CASES,
                         ids=[str(c[0]) for c in STAFFING_CASES])
def test_night_staffing_lower_and_upper(micro_cfg, lo_cid, hi_cid, field,
                                        members, _):
    lo_cfg = _bounds_cfg(micro_cfg,
                         **{field: Bound(lb=DowTable.constant(1))})
    empty = make_roster(lo_cfg)  # nobody on nights
    total, _p = evaluate_soft(lo_cid, empty, lo_cfg)
    assert total == 30  # shortfall 1 on each target day

    staffed = make_roster(lo_cfg, rows={members[0]: "N" * 40})
    total, _p = evaluate_soft(lo_cid, staffed, lo_cfg)
    assert total == 0

    hi_cfg = _bounds_cfg(micro_cfg,
                         **{field: Bound(ub=DowTable.constant(0))})
    over = make_roster(hi_cfg, rows={m: "N" * 40 for m in members})
    total, _p = evaluate_soft(hi_cid, over, hi_cfg)
    assert total == 30 * len(members)  # each member exceeds the zero cap daily
    total, _p = evaluate_soft(hi_cid, make_roster(hi_cfg), hi_cfg)
    assert total == 0


TEAM_CASES = [
    (sn("S", 9), sn("S", 10), "team_g1", ["n1"]),     # team A, group 1
    (sn("S", 11), sn("S", 12), "team_g12", ["n1", "n2"]),
    (sn("S", 13), sn("S", 14), "team_g34", ["n8"]),
    (sn("S", 15), sn("S", 16), "team", ["n1", "n2", "n8"]),
]


@pytest.mark.parametrize("lo_cid,hi_cid,field,members", TEAM_CASES,
                         ids=[str(c[0]) for c in TEAM_CASES])
def test_night_team_staffing(micro_cfg, lo_cid, hi_cid, field, members):
    lo_cfg = _bounds_cfg(micro_cfg,
                         **{field: {"A": Bound(lb=DowTable.constant(1))}})
    total, _p = evaluate_soft(lo_cid, make_roster(lo_cfg), lo_cfg)
    assert total == 30
    staffed = make_roster(lo_cfg, rows={members[0]: "N" * 40})
    total, _p = evaluate_soft(lo_cid, staffed, lo_cfg)
    assert total == 0

    hi_cfg = _bounds_cfg(micro_cfg,
                         **{field: {"A": Bound(ub=DowTable.constant(0))}})
    over = make_roster(hi_cfg, rows={m: "N" * 40 for m in members})
    total, _p = evaluate_soft(hi_cid, over, hi_cfg)
    assert total == 30 * len(members)

    # the disabled marker is distinct from a zero
    from rostra.catalog import DISABLED
    toggled = hi_cfg.with_updates(toggles=Toggles(team_constraints=False))
    total, _p = evaluate_soft(hi_cid, over, toggled)
    assert total == DISABLED


def test_sn1_counts_only_grouped_nurses(micro_cfg):
    # n5 has no group: its nights never satisfy the ward staffing count
    cfg = _bounds_cfg(micro_cfg, total=Bound(lb=DowTable.constant(1)))
    r = make_roster(cfg, rows={"n5": "N" * 40})
    total, _p = evaluate_soft(sn("S", 1), r, cfg)
    assert total == 30


def test_sn1_day_of_week_dependent_bounds(micro_cfg):
    # weekday lb 1, weekend/holiday lb 0: only the 20 weekday dates penalize
    cfg = _bounds_cfg(micro_cfg, total=Bound(
        lb=DowTable.weekday_weekend(1, 0)))
    total, _p = evaluate_soft(sn("S", 1), make_roster(cfg), cfg)
    assert total == 20  # 30 days - 9 weekend days - Nov 4 holiday


# ---------------------------------------------------------------------------
# Soft constraints: pairs, bans, sequences
# ---------------------------------------------------------------------------


def test_sn19_pair_cowork_lower_bound(micro_cfg):
    cfg = micro_cfg.with_updates(pairs=[
        PairRule("n2", "n3", Shift.NIGHT_IN, Shift.NIGHT_IN, 2)])
    one = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n3", nov(5)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    total, _p = evaluate_soft(sn("S", 19), one, cfg)
    assert total == 1

    two = one.with_cells(
        {("n2", nov(12)): Shift.NIGHT_IN, ("n3", nov(12)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    total, _p = evaluate_soft(sn("S", 19), two, cfg)
    assert total == 0

    # same days but mismatched shifts do not count
    miss = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n3", nov(5)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    total, _p = evaluate_soft(sn("S", 19), miss, cfg)
    assert total == 2


def test_sn20_forbidden_pair(micro_cfg):
    cfg = micro_cfg.with_updates(forbidden_pairs=[
        ForbiddenPairRule("n2", "n3", Shift.NIGHT_IN, Shift.NIGHT_IN)])
    apart = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n3", nov(6)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    assert evaluate_soft(sn("S", 20), apart, cfg)[0] == 0

    together = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n3", nov(5)): Shift.NIGHT_IN,
         ("n2", nov(12)): Shift.NIGHT_IN, ("n3", nov(12)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    assert evaluate_soft(sn("S", 20), together, cfg)[0] == 2


def test_sn21_forbidden_weekday_assignment(micro_cfg):
    cfg = micro_cfg.with_updates(forbidden_assignments=[
        ForbiddenAssignment("n3", Shift.NIGHT_IN, "fri")])
    bad = make_roster(cfg).with_cells(
        {("n3", nov(1)): Shift.NIGHT_IN, ("n3", nov(8)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    total, partials = evaluate_soft(sn("N", 21), bad, cfg)
    assert total == 2 and partials == {"n3": 2}
    assert evaluate_soft(sn("N", 21), make_roster(cfg), cfg)[0] == 0

    # a flagged holiday leaves its weekday class: Mon Nov 4 counts as "hol"
    cfg2 = micro_cfg.with_updates(forbidden_assignments=[
        ForbiddenAssignment("n3", Shift.NIGHT_IN, "mon")])
    mon_hol = make_roster(cfg2).with_cells(
        {("n3", nov(4)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 21), mon_hol, cfg2)[0] == 0
    mon_plain = make_roster(cfg2).with_cells(
        {("n3", nov(11)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 21), mon_plain, cfg2)[0] == 1


def test_sn22_soft_forbidden_sequence(micro_cfg):
    cfg = micro_cfg.with_updates(night_soft_sequences=[
        SequenceRule.of(Shift.NIGHT_OUT, Shift.DAY)])
    bad = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_OUT, ("n2", nov(6)): Shift.DAY},
        Provenance.SOLVED)
    assert evaluate_soft(sn("N", 22), bad, cfg)[0] == 1
    assert evaluate_soft(sn("N", 22), make_roster(cfg), cfg)[0] == 0


def test_sn23_keep_four_placeable_offs(micro_cfg):
    # quota 9: more than 5 regular offs eats into the reserved four
    base = make_roster(micro_cfg, default=".")
    assert evaluate_soft(sn("N", 23), base, micro_cfg)[0] == 0

    six_offs = make_roster(
        micro_cfg, default=".", rows={"n2": "." * 5 + "o" * 6 + "." * 29})
    total, partials = evaluate_soft(sn("N", 23), six_offs, micro_cfg)
    assert total == 1 and partials == {"n2": 1}

    # special leave does not count against the reserve
    soff = make_roster(
        micro_cfg, default=".", rows={"n2": "." * 5 + "s" * 6 + "." * 29})
    assert evaluate_soft(sn("N", 23), soff, micro_cfg)[0] == 0


def test_sn24_night_gap_upper_bound(micro_cfg):
    # a night start at least every 14 days, month joins included
    spaced = "N" + "o" * 12 + "N" + "o" * 12 + "N" + "o" * 12 + "N"
    ok = make_roster(micro_cfg,
                     rows={nid: spaced for nid in
                           ("n1", "n2", "n3", "n4", "n5", "n8")})
    assert evaluate_soft(sn("N", 24), ok, micro_cfg)[0] == 0

    # all-off: every 14-day window of every night worker is empty
    total, partials = evaluate_soft(sn("N", 24), make_roster(micro_cfg),
                                    micro_cfg)
    assert total == 6 * 27  # 6 night workers, 27 windows
    assert partials["n5"] == 27


def _lb_cfg(micro_cfg, nid, lb=0, ub=99):
    nurses = [
        Nurse(id=n.id, night_class=n.night_class, rookie=n.rookie,
              male=n.male, day_leader=n.day_leader, group=n.group,
              team=n.team, off_preference=n.off_preference,
              short_hours=n.short_hours, care_worker=n.care_worker,
              night_lb=lb if n.id == nid else 0,
              night_ub=ub if n.id == nid else 99)
        for n in micro_cfg.nurses
    ]
    return micro_cfg.with_updates(nurses=nurses)


def test_sn25_night_count_lower_bound(micro_cfg):
    cfg = _lb_cfg(micro_cfg, "n2", lb=2)
    one_pair = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    total, partials = evaluate_soft(sn("N", 25), one_pair, cfg)
    assert total == 1 and partials == {"n2": 1}

    # a straddling pair only counts its in-month half
    straddle = make_roster(cfg).with_cells(
        {("n2", oct(31)): Shift.NIGHT_IN, ("n2", nov(1)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    assert evaluate_soft(sn("N", 25), straddle, cfg)[0] == 2

    two_pairs = one_pair.with_cells(
        {("n2", nov(12)): Shift.NIGHT_IN, ("n2", nov(13)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    assert evaluate_soft(sn("N", 25), two_pairs, cfg)[0] == 0


def test_sn26_night_count_upper_bound(micro_cfg):
    cfg = _lb_cfg(micro_cfg, "n2", ub=1)
    two_pairs = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.NIGHT_OUT,
         ("n2", nov(12)): Shift.NIGHT_IN, ("n2", nov(13)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    total, partials = evaluate_soft(sn("N", 26), two_pairs, cfg)
    assert total == 1 and partials == {"n2": 1}

    # month-end start pushes the start count to three: excess two
    three = two_pairs.with_cells(
        {("n2", nov(30)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 26), three, cfg)[0] == 2

    one = make_roster(cfg).with_cells(
        {("n2", nov(5)): Shift.NIGHT_IN, ("n2", nov(6)): Shift.NIGHT_OUT},
        Provenance.SOLVED)
    assert evaluate_soft(sn("N", 26), one, cfg)[0] == 0


def test_sn27_weekend_night_fairness(micro_cfg):
    cfg = micro_cfg.with_updates(avg_fssm_nights=Fraction(3, 2))
    # n3 prefers weekend pairs: multiplier 5 on the fractional excess
    bad = make_roster(cfg).with_cells(
        {("n3", nov(1)): Shift.NIGHT_IN, ("n3", nov(2)): Shift.NIGHT_IN,
         ("n3", nov(3)): Shift.NIGHT_IN}, Provenance.SOLVED)
    total, partials = evaluate_soft(sn("N", 27), bad, cfg)
    assert total == Fraction(15, 2) and partials == {"n3": Fraction(15, 2)}

    # same nights on an unweighted nurse
    bad2 = make_roster(cfg).with_cells(
        {("n2", nov(1)): Shift.NIGHT_IN, ("n2", nov(2)): Shift.NIGHT_IN,
         ("n2", nov(3)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 27), bad2, cfg)[0] == Fraction(3, 2)

    one = make_roster(cfg).with_cells(
        {("n3", nov(1)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 27), one, cfg)[0] == 0

    # a Tuesday night is outside the Fri-Mon set
    tue = make_roster(cfg).with_cells(
        {("n3", nov(5)): Shift.NIGHT_IN, ("n3", nov(12)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    assert evaluate_soft(sn("N", 27), tue, cfg)[0] == 0


def test_sn28_event_day_night_fairness():
    cal = build_calendar(2024, 11, holidays=[dt.date(2024, 11, 4)],
                         event_weekdays=["tue"])
    nurses = [Nurse(id="a", group=1), Nurse(id="b", group=2)]
    cfg = WardConfig(nurses=nurses, calendar=cal,
                     avg_event_nights=Fraction(1))
    bad = make_roster(cfg).with_cells(
        {("a", nov(5)): Shift.NIGHT_IN, ("a", nov(12)): Shift.NIGHT_IN},
        Provenance.SOLVED)
    total, partials = evaluate_soft(sn("N", 28), bad, cfg)
    assert total == 1 and partials == {"a": 1}
    ok = make_roster(cfg).with_cells(
        {("a", nov(5)): Shift.NIGHT_IN}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 28), ok, cfg)[0] == 0


def test_sn29_five_day_run_into_night(micro_cfg):
    bad = make_roster(micro_cfg, default=".").with_cells(
        {("n2", nov(5)): Shift.DAY, ("n2", nov(6)): Shift.DAY,
         ("n2", nov(8)): Shift.NIGHT_IN}, Provenance.SOLVED)
    # Nov 7 stays UNSET: the prep slot matches {12h, unset}
    total, partials = evaluate_soft(sn("N", 29), bad, micro_cfg)
    assert total == 1 and partials == {"n2": 1}

    ok = bad.with_cells({("n2", nov(7)): Shift.OFF}, Provenance.SOLVED)
    assert evaluate_soft(sn("N", 29), ok, micro_cfg)[0] == 0

    # single-off preference scales the penalty by five
    cfg5 = micro_cfg.with_updates(nurses=[
        n if n.id != "n2" else Nurse(id="n2", group=2, team="A", rookie=True,
                                     off_preference=OffPreference.SINGLE_OFF)
        for n in micro_cfg.nurses])
    assert evaluate_soft(sn("N", 29), bad, cfg5)[0] == 5


def test_sn30_split_runs(micro_cfg):
    # 5-work / lone off / 4-work, with unset prep slots
    row = "." * 9 + "DD.NMoD.NM" + "." * 21
    bad = make_roster(micro_cfg, default=".", rows={"n2": row})
    total, partials = evaluate_soft(sn("N", 30), bad, micro_cfg)
    assert total == 1 and partials == {"n2": 1}

    # the mirrored 4-1-5 shape
    row_b = "." * 9 + "D.NMoDD.NM" + "." * 21
    bad_b = make_roster(micro_cfg, default=".", rows={"n2": row_b})
    assert evaluate_soft(sn("N", 30), bad_b, micro_cfg)[0] == 1

    # widen the middle rest to two days: no penalty
    ok = make_roster(micro_cfg, default=".",
                     rows={"n2": "." * 9 + "DD.NMooD.N" + "M" + "." * 20})
    assert evaluate_soft(sn("N", 30), ok, micro_cfg)[0] == 0


def test_sn31_three_nights_in_nine_days(micro_cfg):
    # starts at horizon positions 0/3/6: exactly one nine-day window
    row = "N" + "oo" + "N" + "oo" + "N" + "o" * 33
    bad4 = make_roster(micro_cfg, rows={"n4": row})
    total, partials = evaluate_soft(sn("N", 31), bad4, micro_cfg)
    assert total == 5 and partials == {"n4": 5}  # triple-off preference

    bad2 = make_roster(micro_cfg, rows={"n2": row})
    assert evaluate_soft(sn("N", 31), bad2, micro_cfg)[0] == 1

    # brute-force window scan agrees
    grid_row = [1 if c == "N" else 0 for c in row]
    windows = sum(
        1 for i in range(len(row) - 8) if sum(grid_row[i:i + 9]) >= 3
    )
    assert windows == 1

    ok = make_roster(micro_cfg, rows={
        "n2": "N" + "o" * 8 + "N" + "o" * 8 + "N" + "o" * 21})
    assert evaluate_soft(sn("N", 31), ok, micro_cfg)[0] == 0


def test_sn32_four_nights_window(micro_cfg):
    # capable nurse: 13-day window
    row = ("N" + "oo") * 3 + "N" + "o" * 30
    bad = make_roster(micro_cfg, rows={"n2": row})
    total, partials = evaluate_soft(sn("N", 32), bad, micro_cfg)
    assert total == 1 and partials == {"n2": 1}

    # night specialist: 10-day window catches the same pattern
    bad5 = make_roster(micro_cfg, rows={"n5": row})
    assert evaluate_soft(sn("N", 32), bad5, micro_cfg)[0] == 1

    # capable nurse spread over 14 days: no 13-day window holds four
    spread = "N" + "oooo" + "N" + "ooo" + "N" + "ooo" + "N" + "o" * 26
    assert evaluate_soft(sn("N", 32),
                         make_roster(micro_cfg, rows={"n2": spread}),
                         micro_cfg)[0] == 0
    # but the specialist 10-day rule would not catch it either (span 14)
    assert evaluate_soft(sn("N", 32),
                         make_roster(micro_cfg, rows={"n5": spread}),
                         micro_cfg)[0] == 0


def test_sn33_four_nights_in_two_weeks(micro_cfg):
    spread = "N" + "oooo" + "N" + "ooo" + "N" + "ooo" + "N" + "o" * 26
    bad = make_roster(micro_cfg, rows={"n2": spread})
    total, partials = evaluate_soft(sn("N", 33), bad, micro_cfg)
    assert total == 1 and partials == {"n2": 1}

    wide = "N" + "o" * 4 + "N" + "o" * 4 + "N" + "o" * 4 + "N" + "o" * 24
    assert evaluate_soft(sn("N", 33),
                         make_roster(micro_cfg, rows={"n2": wide}),
                         micro_cfg)[0] == 0


def test_sn34_fairness_cap_night_counts():
    cal = build_calendar(2024, 11, holidays=[dt.date(2024, 11, 4)],
                         event_weekdays=["tue"])
    nurses = [Nurse(id="a", group=1, night_ub=1),
              Nurse(id="b", group=2, night_ub=1)]
    cfg = WardConfig(nurses=nurses, calendar=cal,
                     avg_event_nights=Fraction(1))
    r = make_roster(cfg)
    # a: three Tuesday night pairs; b: two
    cells = {}
    for day in (5, 12, 19):
        cells[("a", nov(day))] = Shift.NIGHT_IN
        cells[("a", nov(day) + dt.timedelta(days=1))] = Shift.NIGHT_OUT
    for day in (5, 12):
        cells[("b", nov(day))] = Shift.NIGHT_IN
        cells[("b", nov(day) + dt.timedelta(days=1))] = Shift.NIGHT_OUT
    r = r.with_cells(cells, Provenance.SOLVED)

    # a: count excess 3-1=2, event excess 3-1=2 -> 4 ; b: 1+1 -> 2
    total, _ = evaluate_soft(sn("N", 34), r, cfg)
    assert total == 4
    assert evaluate_soft(sn("N", 34), make_roster(cfg), cfg)[0] == 0


def test_sn35_fairness_cap_nurse_constraints(micro_cfg):
    # keep the weekend-fairness member quiet so only the 3-in-9 term counts
    cfg = micro_cfg.with_updates(avg_fssm_nights=Fraction(5))
    row = "N" + "oo" + "N" + "oo" + "N" + "o" * 33  # one 3-nights-in-9 window
    r = make_roster(cfg, rows={"n2": row})
    total, _ = evaluate_soft(sn("N", 35), r, cfg)
    assert total == 1
    assert evaluate_soft(sn("N", 35), make_roster(cfg), cfg)[0] == 0
