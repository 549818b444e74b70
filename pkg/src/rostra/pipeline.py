"""Two-stage workflow: night solve, human edits, prep-day post step, day
solve, final report.

The session is a small state machine:

    INTAKE -> NIGHT_SOLVED <-> EDITING -> DAY_READY -> DAY_SOLVED -> FINALIZED

Re-solving the night stage from EDITING keeps the edited cells fixed
(they re-enter the encoder as wishes). Edits that break hard constraints
come back as warnings, never rejections: the head nurse may knowingly
override a rule, and the violation then shows up in every later report."""

from __future__ import annotations

import datetime as dt
import time
from dataclasses import dataclass, field
from enum import Enum

from .catalog.ids import Stage
from .catalog.registry import (
    CompiledStage,
    SoftPenaltyBreakdown,
    ViolationRecord,
    compile_stage,
)
from .roster import Provenance, Roster
from .shifts import (
    NIGHT_STAGE_FREE,
    OFF_SHIFTS,
    Shift,
)
from .solving.anneal import solve_heuristic
from .solving.exact import SolverCommand, solve_exact
from .solving.probe import probe_hard
from .solving.reports import ProbeReport, SolveReport, SolveStatus
from .staff import NightPattern, WardConfig
from .encoder.encode import encode_stage

EDIT_SHIFTS = NIGHT_STAGE_FREE | OFF_SHIFTS  # night symbols plus offs


class PipelineError(RuntimeError):
    pass


class ProbeFailure(PipelineError):
    def __init__(self, report: ProbeReport):
        super().__init__("hard-constraint probe found conflicts:\n"
                         + report.render())
        self.report = report


class Phase(Enum):
    INTAKE = "intake"
    NIGHT_SOLVED = "night_solved"
    EDITING = "editing"
    DAY_READY = "day_ready"
    DAY_SOLVED = "day_solved"
    FINALIZED = "finalized"


@dataclass
class EditRecord:
    nurse: str
    date: dt.date
    old: Shift
    new: Shift
    stamp: str  # ISO timestamp; informational, not part of exports


@dataclass
class StageResult:
    stage: Stage
    report: SolveReport
    violations: list = field(default_factory=list)
    feedback: list = field(default_factory=list)

    @property
    def roster(self) -> Roster:
        return self.report.roster

    @property
    def breakdown(self) -> SoftPenaltyBreakdown:
        return self.report.breakdown


@dataclass
class Session:
    cfg: WardConfig
    wishes: Roster
    session_id: str = "local"
    phase: Phase = Phase.INTAKE
    night_result: StageResult | None = None
    edited: Roster | None = None
    day_result: StageResult | None = None
    audit: list = field(default_factory=list)
    revision: int = 0
    post_step_notes: list = field(default_factory=list)
    final_document: dict | None = None

    def current_roster(self) -> Roster:
        if self.day_result is not None:
            return self.day_result.roster
        if self.edited is not None:
            return self.edited
        if self.night_result is not None:
            return self.night_result.roster
        return self.wishes

    def edited_cells(self) -> dict:
        """Latest edited value per cell, reconstructed from the audit log."""
        out = {}
        for rec in self.audit:
            out[(rec.nurse, rec.date)] = rec.new
        return out


def new_session(cfg: WardConfig, wishes: Roster,
                session_id: str = "local") -> Session:
    if not wishes.is_total():
        raise PipelineError("wish roster must cover the whole horizon")
    return Session(cfg=cfg, wishes=wishes, session_id=session_id)


def _require(session: Session, *phases: Phase):
    if session.phase not in phases:
        allowed = "/".join(p.value for p in phases)
        raise PipelineError(
            f"operation requires phase {allowed}, session is "
            f"{session.phase.value}")


def _solve(cfg, wishes, stage, solver, time_limit, seed, command,
           compiled, progress_hook=None) -> SolveReport:
    if solver == "exact":
        instance = encode_stage(stage, cfg, wishes, compiled=compiled)
        report = solve_exact(instance, time_limit=time_limit, command=command,
                             compiled=compiled, base_roster=wishes)
        if report.status is SolveStatus.INFEASIBLE_HARD:
            raise PipelineError(
                "stage is infeasible; run the probe for the conflict list")
        return report
    return solve_heuristic(cfg, wishes, stage, time_limit=time_limit,
                           seed=seed, compiled=compiled,
                           progress_hook=progress_hook)


def _night_feedback(cs: CompiledStage, result: SolveReport) -> list:
    """Operator-facing comments, the obvious staffing gaps first."""
    notes = []
    bd = result.breakdown
    from .catalog.ids import sn

    staffing_cid = sn("S", 1)
    detail = stage_soft_details(cs, result.roster, staffing_cid)
    short_days = [(e.date, v) for e, v in detail if v > 0]
    if short_days:
        days = ", ".join(f"{d.isoformat()} (short {v})" for d, v in short_days)
        notes.append(f"night staffing clearly short on: {days}")
    pair_cid = sn("S", 19)
    pair_total = bd.totals.get(pair_cid, 0)
    if pair_total:
        notes.append(f"pair co-work targets missed by {pair_total} in total")
    if result.hard_violations:
        notes.append(
            f"{result.hard_violations} hard violations remain; "
            "re-run with a larger budget or revisit the wishes")
    return notes


def stage_soft_details(cs: CompiledStage, roster: Roster, cid):
    """(element, value) pairs of one soft constraint on a roster."""
    grid = cs.grid_of(roster)
    comp = cs.constraint(cid)
    out = []
    if not comp.enabled:
        return out
    for e in comp.elements:
        from .catalog.elements import EpiMax

        if isinstance(e.body, EpiMax):
            continue
        v = e.body.value(grid)
        if v:
            out.append((e, e.mult * v))
    return out


def run_night_stage(session: Session, solver: str = "heuristic",
                    time_limit: float = 60.0, seed: int = 0,
                    command: SolverCommand | None = None,
                    acknowledge_probe: bool = False,
                    probe_time_limit: float = 120.0,
                    progress_hook=None) -> StageResult:
    _require(session, Phase.INTAKE, Phase.EDITING, Phase.NIGHT_SOLVED)
    wishes = session.wishes
    if session.phase is not Phase.INTAKE:
        # re-solve keeping the edits fixed
        edits = session.edited_cells()
        if edits:
            wishes = wishes.with_cells(edits, Provenance.EDITED)
    probe = probe_hard(session.cfg, wishes, Stage.NIGHT,
                       time_limit=probe_time_limit, command=command)
    if not probe.clean and not acknowledge_probe:
        raise ProbeFailure(probe)

    cs = compile_stage(Stage.NIGHT, session.cfg, wishes)
    report = _solve(session.cfg, wishes, Stage.NIGHT, solver, time_limit,
                    seed, command, cs, progress_hook)
    violations = cs.check_hard(cs.grid_of(report.roster))
    result = StageResult(stage=Stage.NIGHT, report=report,
                         violations=violations,
                         feedback=_night_feedback(cs, report))
    session.night_result = result
    session.edited = report.roster
    session.phase = Phase.NIGHT_SOLVED
    return result


def apply_edits(session: Session, edits, clock=time.time) -> list:
    """Apply (nurse, date, Shift) edits; returns hard-violation warnings."""
    _require(session, Phase.NIGHT_SOLVED, Phase.EDITING)
    roster = session.edited
    target = set(session.cfg.calendar.target_days)
    updates = {}
    for nid, d, shift in edits:
        if d not in target:
            raise PipelineError(f"edit outside the target month: {d}")
        if not isinstance(shift, Shift):
            raise PipelineError(f"unknown symbol: {shift!r}")
        if shift not in EDIT_SHIFTS:
            raise PipelineError(
                f"{shift.value} is not an editable night-stage symbol")
        updates[(nid, d)] = shift
    stamp = dt.datetime.fromtimestamp(clock(), dt.timezone.utc).isoformat()
    for (nid, d), shift in updates.items():
        old = roster.get(nid, d)
        session.audit.append(EditRecord(nid, d, old, shift, stamp))
    session.edited = roster.with_cells(updates, Provenance.EDITED)
    session.revision += 1
    session.phase = Phase.EDITING if updates else session.phase

    # immediate re-validation: warnings, not rejections
    cs = compile_stage(Stage.NIGHT, session.cfg, session.wishes)
    return cs.check_hard(cs.grid_of(session.edited))


def post_process_longday(session: Session) -> list:
    """Turn unset cells right before a night start into long days."""
    _require(session, Phase.NIGHT_SOLVED, Phase.EDITING)
    roster = session.edited
    notes = []
    updates = {}
    if session.cfg.night_pattern is NightPattern.TWELVE_HOUR:
        cal = session.cfg.calendar
        days = cal.days
        for nid in roster.nurse_ids:
            for i, d in enumerate(days[:-1]):
                if d not in set(cal.target_days):
                    continue
                nxt = days[i + 1]
                if roster.get(nid, nxt) is Shift.NIGHT_IN:
                    cur = roster.get(nid, d)
                    if cur is Shift.UNSET:
                        updates[(nid, d)] = Shift.LONGDAY
                    elif cur is not Shift.LONGDAY:
                        notes.append(
                            f"{nid} {d.isoformat()}: night start preceded by "
                            f"{cur.value}, left unchanged")
    if updates:
        session.edited = roster.with_cells(updates, Provenance.POSTPROCESSED)
    session.post_step_notes = notes
    session.phase = Phase.DAY_READY
    return notes


def run_day_stage(session: Session, solver: str = "heuristic",
                  time_limit: float = 60.0, seed: int = 0,
                  command: SolverCommand | None = None,
                  acknowledge_probe: bool = False,
                  probe_time_limit: float = 120.0,
                  progress_hook=None) -> StageResult:
    _require(session, Phase.DAY_READY)
    day_wishes = session.edited  # the whole night roster becomes fixed wishes
    probe = probe_hard(session.cfg, day_wishes, Stage.DAY,
                       time_limit=probe_time_limit, command=command)
    if not probe.clean and not acknowledge_probe:
        raise ProbeFailure(probe)

    cs = compile_stage(Stage.DAY, session.cfg, day_wishes)
    report = _solve(session.cfg, day_wishes, Stage.DAY, solver, time_limit,
                    seed, command, cs, progress_hook)
    roster = report.roster
    leftover = [
        (nid, d) for nid in roster.nurse_ids
        for d in session.cfg.calendar.target_days
        if roster.get(nid, d) is Shift.UNSET
    ]
    if leftover:
        raise PipelineError(f"day stage left unset cells: {leftover[:5]}")
    violations = cs.check_hard(cs.grid_of(roster))
    result = StageResult(stage=Stage.DAY, report=report,
                         violations=violations, feedback=[])
    session.day_result = result
    session.phase = Phase.DAY_SOLVED
    return result


# ---------------------------------------------------------------------------
# Final report
# ---------------------------------------------------------------------------


def _consecutive_work_max(roster: Roster, nid: str) -> int:
    from .shifts import WORK_SHIFTS

    best = run = 0
    for d in roster.calendar.days:
        if roster.get(nid, d) in WORK_SHIFTS:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def final_report(session: Session) -> dict:
    _require(session, Phase.DAY_SOLVED, Phase.FINALIZED)
    cfg = session.cfg
    cal = cfg.calendar
    roster = session.day_result.roster
    day_cs = compile_stage(Stage.DAY, cfg, session.edited)
    bd = session.day_result.breakdown

    nurses = []
    for n in cfg.nurses:
        target = cal.target_days
        nights = roster.count(n.id, target, {Shift.NIGHT_IN})
        offs = roster.count(n.id, target, {Shift.OFF})
        soffs = roster.count(n.id, target, {Shift.SPECIAL_OFF})
        weekend_offs = roster.count(n.id, cal.target_off_days, OFF_SHIFTS)
        nurses.append({
            "nurse": n.id,
            "nights": nights,
            "offs": offs,
            "special_offs": soffs,
            "weekend_offs": weekend_offs,
            "max_consecutive_work": _consecutive_work_max(roster, n.id),
        })

    per_day = []
    for d in cal.target_days:
        night_count = sum(
            1 for n in cfg.nurses if roster.get(n.id, d) is Shift.NIGHT_IN)
        from .shifts import DAY_BAND

        day_count = sum(
            1 for n in cfg.nurses if roster.get(n.id, d) in DAY_BAND)
        dow = cal.dow_class(d)
        n_lb = cfg.night_staffing.total.lb
        d_lb = cfg.day_staffing.total.lb
        per_day.append({
            "date": d.isoformat(),
            "dow": dow,
            "night_count": night_count,
            "night_lb": n_lb.get(dow) if n_lb else None,
            "day_count": day_count,
            "day_lb": d_lb.get(dow) if d_lb else None,
        })

    # Night families 1/11/12 are stage-1 reservation devices (alphabet
    # limits, triple-off candidates, leader capacity); once the day stage
    # has materialized day shifts they no longer apply. Everything that
    # constrains actual placements is re-checked on the final roster.
    night_cs = compile_stage(Stage.NIGHT, cfg, session.wishes)
    from .catalog.ids import hn

    stage1_only = {hn("N", 1), hn("N", 11), hn("S", 12)}
    night_recs = [r for r in night_cs.check_hard(night_cs.grid_of(roster))
                  if r.constraint not in stage1_only]
    violations = []
    for rec in night_recs + day_cs.check_hard(day_cs.grid_of(roster)):
        violations.append({
            "constraint": str(rec.constraint),
            "nurse": rec.nurse,
            "date": rec.date.isoformat() if rec.date else None,
            "magnitude": rec.magnitude,
            "note": rec.note,
        })

    objective = {
        "total": float(bd.objective),
        "by_constraint": {
            str(cid): float(total)
            for cid, total in sorted(bd.totals.items(),
                                     key=lambda kv: kv[0].sort_key)
            if total
        },
    }

    doc = {
        "session": session.session_id,
        "month": f"{cal.year:04d}-{cal.month:02d}",
        "nurses": nurses,
        "staffing": per_day,
        "violations": violations,
        "objective": objective,
        "edits": len(session.audit),
        "post_step_notes": list(session.post_step_notes),
    }
    session.final_document = doc
    session.phase = Phase.FINALIZED
    return doc


def render_final_report(doc: dict) -> str:
    out = [f"roster report for {doc['month']} (session {doc['session']})", ""]
    out.append("nurse summary:")
    for row in doc["nurses"]:
        out.append(
            f"  {row['nurse']}: nights {row['nights']}, offs {row['offs']}"
            f"+{row['special_offs']}s, weekend offs {row['weekend_offs']}, "
            f"longest run {row['max_consecutive_work']}")
    out.append("")
    out.append("daily staffing (night/day vs lower bounds):")
    for row in doc["staffing"]:
        out.append(
            f"  {row['date']} {row['dow']}: night {row['night_count']}"
            f"/{row['night_lb'] if row['night_lb'] is not None else '-'}"
            f", day {row['day_count']}"
            f"/{row['day_lb'] if row['day_lb'] is not None else '-'}")
    out.append("")
    if doc["violations"]:
        out.append("violations:")
        for v in doc["violations"]:
            where = v["nurse"] or "ward"
            when = v["date"] or ""
            out.append(f"  {v['constraint']} {where} {when} x{v['magnitude']}")
    else:
        out.append("violations: none")
    out.append("")
    out.append(f"objective: {doc['objective']['total']}")
    for cid, val in doc["objective"]["by_constraint"].items():
        out.append(f"  {cid}: {val}")
    return "\n".join(out) + "\n"
