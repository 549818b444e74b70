"""File formats: condition-settings file, wish-table grid, roster exports,
weight tables and session snapshots.

All formats are schema-versioned UTF-8 text. Loading never mutates its
input and reports problems two ways: hard schema errors raise, while
unset-but-useful fields come back as located warnings naming the
constraint ids they feed (so the operator can see at intake time which
rules will be inert this month)."""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from fractions import Fraction
from pathlib import Path

from .calendars import DOW_CLASSES, CalendarWindow, build_calendar
from .pipeline import EditRecord, Phase, Session
from .roster import Provenance, Roster
from .shifts import Shift, parse_shift
from .staff import (
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
    WeightTable,
)

CONDITION_SCHEMA = "ward-config/1"
ROSTER_SCHEMA = "roster/1"
SESSION_SCHEMA = "session/1"

GRID_CSV = "GRID_CSV"
STRUCTURED_JSONLIKE = "STRUCTURED_JSONLIKE"


class IoError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Condition-settings file
# ---------------------------------------------------------------------------

_NIGHT_CLASS = {c.value: c for c in NightClass}
_OFF_PREF = {p.value: p for p in OffPreference}
_PATTERN = {p.value: p for p in NightPattern}


def _fraction(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**6)
    return Fraction(v)


def _dow_table(node, path: str, warnings: list, feeds: str) -> DowTable | None:
    if node is None:
        return None
    if isinstance(node, int):
        return DowTable.constant(node)
    if not isinstance(node, dict):
        raise IoError(f"{path}: expected an integer or a per-weekday object")
    default = node.get("default")
    values = {}
    for c in DOW_CLASSES:
        v = node.get(c, default)
        values[c] = v
        if v is None:
            warnings.append(
                f"{path}.{c} unset; {feeds} is inert on {c} dates")
    return DowTable.of(values)


def _bound(node, path: str, warnings: list, lo_feeds: str,
           hi_feeds: str) -> Bound:
    if node is None:
        warnings.append(f"{path} unset; {lo_feeds} and {hi_feeds} are inert")
        return Bound()
    lb = _dow_table(node.get("lb"), f"{path}.lb", warnings, lo_feeds)
    ub = _dow_table(node.get("ub"), f"{path}.ub", warnings, hi_feeds)
    if lb is None and "lb" not in node:
        warnings.append(f"{path}.lb unset; {lo_feeds} is inert")
    if ub is None and "ub" not in node:
        warnings.append(f"{path}.ub unset; {hi_feeds} is inert")
    b = Bound(lb=lb, ub=ub)
    b.validate(path)
    return b


def _staffing(node, band: str, toggles: Toggles, warnings: list,
              stage_tag: str) -> StaffingBounds:
    node = node or {}
    s = stage_tag

    def feeds(idx):
        return f"S{s}-S-{idx}"

    kw = {}
    kw["total"] = _bound(node.get("total"), f"{band}.total", warnings,
                         feeds(1), feeds(2))
    kw["group1"] = _bound(node.get("group1"), f"{band}.group1", warnings,
                          feeds(3), feeds(4))
    kw["group12"] = _bound(node.get("group12"), f"{band}.group12", warnings,
                           feeds(5), feeds(6))
    kw["group4"] = _bound(node.get("group4"), f"{band}.group4", warnings,
                          feeds(7), feeds(8))
    for name, lo_idx in (("team_g1", 9), ("team_g12", 11), ("team_g34", 13),
                         ("team", 15)):
        sub = node.get(name) or {}
        table = {}
        for team, bnode in sorted(sub.items()):
            table[team] = _bound(bnode, f"{band}.{name}[{team}]", warnings,
                                 feeds(lo_idx), feeds(lo_idx + 1))
        if not table and toggles.team_constraints:
            warnings.append(
                f"{band}.{name} unset; {feeds(lo_idx)}/{feeds(lo_idx + 1)} "
                "are inert")
        kw[name] = table
    if toggles.rookie_constraints:
        kw["rookie"] = _bound(node.get("rookie"), f"{band}.rookie", warnings,
                              feeds(17), feeds(18))
    else:
        kw["rookie"] = _bound(node.get("rookie"), f"{band}.rookie", [],
                              feeds(17), feeds(18))
    if toggles.male_constraints:
        male_feed = "Hn-S-13" if s == "n" else "Hd-S-8"
        kw["male"] = _bound(node.get("male"), f"{band}.male", warnings,
                            male_feed, male_feed)
    else:
        kw["male"] = _bound(node.get("male"), f"{band}.male", [], "", "")
    care_sink = warnings if toggles.care_worker_constraints else []
    kw["care"] = _bound(node.get("care"), f"{band}.care", care_sink,
                        feeds(17) + "cw", feeds(18) + "cw")
    return StaffingBounds(**kw)


def _sequence_rules(node) -> list[SequenceRule] | None:
    if node is None:
        return None
    rules = []
    for entry in node:
        steps = [frozenset(parse_shift(t) for t in step)
                 for step in entry["steps"]]
        classes = entry.get("classes")
        rules.append(SequenceRule(
            steps=tuple(steps),
            classes=None if classes is None else frozenset(
                _NIGHT_CLASS[c] for c in classes),
        ))
    return rules


def load_condition_file(data: bytes):
    """Parse a condition-settings document into (WardConfig, warnings)."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IoError(f"condition file is not valid JSON: {exc}") from exc
    if doc.get("schema") != CONDITION_SCHEMA:
        raise IoError(
            f"unsupported condition-file schema {doc.get('schema')!r}")
    warnings: list[str] = []

    month = doc.get("month") or {}
    try:
        holidays = [dt.date.fromisoformat(h)
                    for h in month.get("holidays", [])]
        cal = build_calendar(int(month["year"]), int(month["month"]),
                             holidays=holidays,
                             event_weekdays=month.get("event_weekdays", ()))
    except KeyError as exc:
        raise IoError(f"month section incomplete: missing {exc}") from exc

    nurses = []
    for node in doc.get("nurses", []):
        try:
            nurses.append(Nurse(
                id=str(node["id"]),
                night_class=_NIGHT_CLASS[node.get("night_class",
                                                  "night_capable")],
                rookie=bool(node.get("rookie", False)),
                male=bool(node.get("male", False)),
                day_leader=bool(node.get("day_leader", False)),
                group=node.get("group"),
                team=node.get("team"),
                night_count_fixed=bool(node.get("night_count_fixed", False)),
                night_lb=int(node.get("night_lb", 0)),
                night_ub=int(node.get("night_ub", 99)),
                off_preference=_OFF_PREF[node.get("off_preference", "none")],
                short_hours=bool(node.get("short_hours", False)),
                care_worker=bool(node.get("care_worker", False)),
                off_quota=node.get("off_quota"),
            ))
        except KeyError as exc:
            raise IoError(f"nurse record invalid: missing/unknown {exc}") from exc
    if not nurses:
        raise IoError("condition file lists no nurses")

    tg = doc.get("toggles") or {}
    toggles = Toggles(
        team_constraints=bool(tg.get("team", True)),
        rookie_constraints=bool(tg.get("rookie", True)),
        male_constraints=bool(tg.get("male", True)),
        care_worker_constraints=bool(tg.get("care_worker", False)),
    )

    staffing_node = doc.get("staffing") or {}
    night_staffing = _staffing(staffing_node.get("night"), "staffing.night",
                               toggles, warnings, "n")
    day_staffing = _staffing(staffing_node.get("day"), "staffing.day",
                             toggles, warnings, "d")

    ids = {n.id for n in nurses}

    def known(nid, where):
        if nid not in ids:
            raise IoError(f"{where} references unknown nurse {nid!r}")
        return nid

    pairs = [
        PairRule(known(p["n1"], "pairs"), known(p["n2"], "pairs"),
                 parse_shift(p["s1"]), parse_shift(p["s2"]),
                 int(p["min_count"]))
        for p in doc.get("pairs", [])
    ]
    forbidden_pairs = [
        ForbiddenPairRule(known(p["n1"], "forbidden_pairs"),
                          known(p["n2"], "forbidden_pairs"),
                          parse_shift(p["s1"]), parse_shift(p["s2"]))
        for p in doc.get("forbidden_pairs", [])
    ]
    forbidden_assignments = [
        ForbiddenAssignment(known(f["nurse"], "forbidden_assignments"),
                            parse_shift(f["shift"]), f["dow"])
        for f in doc.get("forbidden_assignments", [])
    ]

    seq = doc.get("sequences") or {}
    weights_node = doc.get("weights") or {}
    weights = WeightTable(
        overrides=dict(weights_node.get("overrides", {})),
        shift_weight=int(weights_node.get("shift", 100)),
        nurse_weight=int(weights_node.get("nurse", 10)),
        epigraph_weight=int(weights_node.get("epigraph", 1)),
    )

    max_run = dict()
    for token, limit in (doc.get("max_run") or {}).items():
        max_run[parse_shift(token)] = int(limit)
    if not max_run:
        from .staff import DEFAULT_MAX_RUN

        max_run = dict(DEFAULT_MAX_RUN)

    if "off_quota" not in doc:
        warnings.append("off_quota unset; Sn-N-23 and Sd-N-24/25 use the "
                        "default of 9")
    if "avg_fssm_nights" not in doc:
        warnings.append("avg_fssm_nights unset; Sn-N-27 is inert")
    if cal.event_weekdays and "avg_event_nights" not in doc:
        warnings.append("avg_event_nights unset; Sn-N-28 penalizes every "
                        "event-day night")

    cfg = WardConfig(
        nurses=nurses,
        calendar=cal,
        night_pattern=_PATTERN[doc.get("night_pattern", "twelve_hour")],
        night_staffing=night_staffing,
        day_staffing=day_staffing,
        pairs=pairs,
        forbidden_pairs=forbidden_pairs,
        forbidden_assignments=forbidden_assignments,
        night_hard_sequences=_sequence_rules(seq.get("night_hard")),
        day_hard_sequences=_sequence_rules(seq.get("day_hard")),
        night_soft_sequences=_sequence_rules(seq.get("night_soft")) or [],
        day_soft_sequences=_sequence_rules(seq.get("day_soft")) or [],
        max_run=max_run,
        off_quota=int(doc.get("off_quota", 9)),
        avg_fssm_nights=_fraction(doc.get("avg_fssm_nights", 0)),
        avg_event_nights=_fraction(doc.get("avg_event_nights", 0)),
        toggles=toggles,
        weights=weights,
        pref_multipliers={k: int(v) for k, v in
                          (doc.get("pref_multipliers") or {}).items()},
        enable_early_late=bool(doc.get("enable_early_late", False)),
        notes=str(doc.get("notes", "")),
    )
    return cfg, warnings


def _dow_table_doc(table: DowTable | None):
    if table is None:
        return None
    values = {c: table.get(c) for c in DOW_CLASSES}
    distinct = set(values.values())
    if len(distinct) == 1:
        v = distinct.pop()
        return v
    return values


def _bound_doc(b: Bound):
    if b.is_unset:
        return None
    return {"lb": _dow_table_doc(b.lb), "ub": _dow_table_doc(b.ub)}


def _staffing_doc(s: StaffingBounds):
    doc = {}
    for name in ("total", "group1", "group12", "group4", "rookie", "male",
                 "care"):
        v = _bound_doc(getattr(s, name))
        if v is not None:
            doc[name] = v
    for name in ("team", "team_g1", "team_g12", "team_g34"):
        sub = {t: _bound_doc(b) for t, b in sorted(getattr(s, name).items())}
        sub = {t: v for t, v in sub.items() if v is not None}
        if sub:
            doc[name] = sub
    return doc


def _sequences_doc(rules: list[SequenceRule] | None):
    if rules is None:
        return None
    return [
        {
            "steps": [sorted(s.value for s in step) for step in r.steps],
            "classes": (None if r.classes is None
                        else sorted(c.value for c in r.classes)),
        }
        for r in rules
    ]


def dump_condition_file(cfg: WardConfig) -> bytes:
    cal = cfg.calendar
    doc = {
        "schema": CONDITION_SCHEMA,
        "month": {
            "year": cal.year,
            "month": cal.month,
            "holidays": sorted(h.isoformat() for h in cal.holidays),
            "event_weekdays": sorted(cal.event_weekdays),
        },
        "night_pattern": cfg.night_pattern.value,
        "off_quota": cfg.off_quota,
        "enable_early_late": cfg.enable_early_late,
        "avg_fssm_nights": str(cfg.avg_fssm_nights),
        "avg_event_nights": str(cfg.avg_event_nights),
        "toggles": {
            "team": cfg.toggles.team_constraints,
            "rookie": cfg.toggles.rookie_constraints,
            "male": cfg.toggles.male_constraints,
            "care_worker": cfg.toggles.care_worker_constraints,
        },
        "nurses": [
            {
                "id": n.id,
                "night_class": n.night_class.value,
                "rookie": n.rookie,
                "male": n.male,
                "day_leader": n.day_leader,
                "group": n.group,
                "team": n.team,
                "night_count_fixed": n.night_count_fixed,
                "night_lb": n.night_lb,
                "night_ub": n.night_ub,
                "off_preference": n.off_preference.value,
                "short_hours": n.short_hours,
                "care_worker": n.care_worker,
                "off_quota": n.off_quota,
            }
            for n in cfg.nurses
        ],
        "staffing": {
            "night": _staffing_doc(cfg.night_staffing),
            "day": _staffing_doc(cfg.day_staffing),
        },
        "pairs": [
            {"n1": p.n1, "n2": p.n2, "s1": p.s1.value, "s2": p.s2.value,
             "min_count": p.min_count}
            for p in cfg.pairs
        ],
        "forbidden_pairs": [
            {"n1": p.n1, "n2": p.n2, "s1": p.s1.value, "s2": p.s2.value}
            for p in cfg.forbidden_pairs
        ],
        "forbidden_assignments": [
            {"nurse": f.nurse, "shift": f.shift.value, "dow": f.dow}
            for f in cfg.forbidden_assignments
        ],
        "sequences": {
            "night_hard": _sequences_doc(cfg.night_hard_sequences),
            "day_hard": _sequences_doc(cfg.day_hard_sequences),
            "night_soft": _sequences_doc(cfg.night_soft_sequences),
            "day_soft": _sequences_doc(cfg.day_soft_sequences),
        },
        "max_run": {s.value: v for s, v in sorted(cfg.max_run.items(),
                                                  key=lambda kv: kv[0].code)},
        "weights": {
            "shift": cfg.weights.shift_weight,
            "nurse": cfg.weights.nurse_weight,
            "epigraph": cfg.weights.epigraph_weight,
            "overrides": dict(sorted(cfg.weights.overrides.items())),
        },
        "pref_multipliers": dict(sorted(cfg.pref_multipliers.items())),
        "notes": cfg.notes,
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=False)
            + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Wish table (grid CSV)
# ---------------------------------------------------------------------------


def default_symbol_map() -> dict:
    m = {s.value: s for s in Shift}
    m.update({s.glyph: s for s in Shift})
    return m


def load_wish_table(data: bytes, calendar: CalendarWindow,
                    symbol_map: dict | None = None):
    """Parse the wish grid into (Roster, warnings).

    Unknown symbols produce located warnings and the cell stays UNSET;
    empty cells are UNSET silently. Previous-month cells get the
    fixed-prev-month provenance."""
    smap = dict(default_symbol_map())
    for raw, target in (symbol_map or {}).items():
        smap[raw] = target if isinstance(target, Shift) else parse_shift(target)

    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(c.strip() for c in row)]
    if not rows:
        raise IoError("wish table is empty")
    header = [c.strip() for c in rows[0]]
    expected = [d.isoformat() for d in calendar.days]
    if header[1:] != expected:
        raise IoError(
            "wish-table date header does not match the calendar horizon "
            f"(expected {expected[0]}..{expected[-1]}, "
            f"got {header[1] if len(header) > 1 else '?'}..{header[-1]})")

    warnings: list[str] = []
    nurse_ids = []
    cells = {}
    provenance = {}
    prev_set = set(calendar.prev_days)
    for row in rows[1:]:
        nid = row[0].strip()
        if not nid:
            raise IoError("wish table has a row without a nurse id")
        if nid in nurse_ids:
            raise IoError(f"duplicate nurse row: {nid}")
        nurse_ids.append(nid)
        for d, raw in zip(calendar.days, row[1:]):
            token = raw.strip()
            if not token:
                shift = Shift.UNSET
            elif token in smap:
                shift = smap[token]
            else:
                warnings.append(
                    f"unknown symbol {token!r} at ({nid}, {d.isoformat()}); "
                    "cell left unset")
                shift = Shift.UNSET
            cells[(nid, d)] = shift
            if d in prev_set:
                provenance[(nid, d)] = Provenance.FIXED_PREV_MONTH
                if shift is Shift.UNSET and token == "":
                    warnings.append(
                        f"previous-month cell empty at ({nid}, {d.isoformat()})")
            else:
                provenance[(nid, d)] = (Provenance.WISH
                                        if shift is not Shift.UNSET
                                        else Provenance.SOLVED)
        for d in calendar.days[len(row) - 1:]:
            cells.setdefault((nid, d), Shift.UNSET)
            provenance.setdefault((nid, d), Provenance.SOLVED)

    warnings.sort()
    roster = Roster(calendar, tuple(nurse_ids), cells, provenance)
    return roster, warnings


def export_roster(roster: Roster, fmt: str = GRID_CSV) -> bytes:
    if fmt == GRID_CSV:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["nurse"] + [d.isoformat() for d in roster.calendar.days])
        for nid in roster.nurse_ids:
            w.writerow([nid] + [roster.get(nid, d).value
                                for d in roster.calendar.days])
        return buf.getvalue().encode("utf-8")
    if fmt == STRUCTURED_JSONLIKE:
        cal = roster.calendar
        doc = {
            "schema": ROSTER_SCHEMA,
            "month": f"{cal.year:04d}-{cal.month:02d}",
            "first_day": cal.days[0].isoformat(),
            "days": [d.isoformat() for d in cal.days],
            "nurses": list(roster.nurse_ids),
            "cells": {
                nid: [roster.get(nid, d).value for d in cal.days]
                for nid in roster.nurse_ids
            },
            "provenance": {
                nid: [roster.prov(nid, d).value for d in cal.days]
                for nid in roster.nurse_ids
            },
        }
        return (json.dumps(doc, indent=1, sort_keys=False) + "\n").encode()
    raise IoError(f"unsupported roster format {fmt!r}")


def load_structured_roster(data: bytes, calendar: CalendarWindow) -> Roster:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("schema") != ROSTER_SCHEMA:
        raise IoError(f"unsupported roster schema {doc.get('schema')!r}")
    days = [dt.date.fromisoformat(d) for d in doc["days"]]
    if tuple(days) != calendar.days:
        raise IoError("roster horizon does not match the calendar")
    cells = {}
    provenance = {}
    for nid in doc["nurses"]:
        for d, token, prov in zip(days, doc["cells"][nid],
                                  doc["provenance"][nid]):
            cells[(nid, d)] = Shift(token)
            provenance[(nid, d)] = Provenance(prov)
    return Roster(calendar, tuple(doc["nurses"]), cells, provenance)


# ---------------------------------------------------------------------------
# Weight table (key-value text)
# ---------------------------------------------------------------------------


def load_weight_table(data: bytes) -> WeightTable:
    wt = WeightTable()
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise IoError(f"weight table line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        try:
            num = int(value)
        except ValueError as exc:
            raise IoError(
                f"weight table line {lineno}: {value!r} is not an integer"
            ) from exc
        if key == "shift_weight":
            wt.shift_weight = num
        elif key == "nurse_weight":
            wt.nurse_weight = num
        elif key == "epigraph_weight":
            wt.epigraph_weight = num
        else:
            wt.overrides[key] = num
    return wt


def dump_weight_table(wt: WeightTable) -> bytes:
    out = [
        "# objective weights by tier, overridable per constraint id",
        f"shift_weight = {wt.shift_weight}",
        f"nurse_weight = {wt.nurse_weight}",
        f"epigraph_weight = {wt.epigraph_weight}",
    ]
    for key, val in sorted(wt.overrides.items()):
        out.append(f"{key} = {val}")
    return ("\n".join(out) + "\n").encode()


# ---------------------------------------------------------------------------
# Session snapshots
# ---------------------------------------------------------------------------


def dump_session(session: Session) -> bytes:
    doc = {
        "schema": SESSION_SCHEMA,
        "session_id": session.session_id,
        "phase": session.phase.value,
        "revision": session.revision,
        "config": json.loads(dump_condition_file(session.cfg).decode()),
        "wishes": json.loads(
            export_roster(session.wishes, STRUCTURED_JSONLIKE).decode()),
        "edited": (json.loads(
            export_roster(session.edited, STRUCTURED_JSONLIKE).decode())
            if session.edited is not None else None),
        "day_roster": (json.loads(
            export_roster(session.day_result.roster,
                          STRUCTURED_JSONLIKE).decode())
            if session.day_result is not None else None),
        "audit": [
            {"nurse": r.nurse, "date": r.date.isoformat(), "old": r.old.value,
             "new": r.new.value, "stamp": r.stamp}
            for r in session.audit
        ],
        "post_step_notes": session.post_step_notes,
    }
    return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode()


def load_session(data: bytes) -> Session:
    doc = json.loads(data.decode("utf-8"))
    if doc.get("schema") != SESSION_SCHEMA:
        raise IoError(f"unsupported session schema {doc.get('schema')!r}")
    cfg, _ = load_condition_file(
        json.dumps(doc["config"]).encode())
    cal = cfg.calendar

    def roster_of(node):
        if node is None:
            return None
        return load_structured_roster(json.dumps(node).encode(), cal)

    session = Session(
        cfg=cfg,
        wishes=roster_of(doc["wishes"]),
        session_id=doc["session_id"],
        phase=Phase(doc["phase"]),
        revision=int(doc["revision"]),
    )
    session.edited = roster_of(doc.get("edited"))
    session.audit = [
        EditRecord(r["nurse"], dt.date.fromisoformat(r["date"]),
                   Shift(r["old"]), Shift(r["new"]), r["stamp"])
        for r in doc.get("audit", [])
    ]
    session.post_step_notes = list(doc.get("post_step_notes", []))
    # solve artifacts are not serialized; the day roster snapshot suffices
    day_roster = roster_of(doc.get("day_roster"))
    if day_roster is not None:
        from .solving.reports import SolveReport, SolveStatus
        from .pipeline import StageResult
        from .catalog.ids import Stage
        from .catalog.registry import compile_stage

        cs = compile_stage(Stage.DAY, cfg, session.edited or session.wishes)
        bd = cs.evaluate_soft(cs.grid_of(day_roster))
        report = SolveReport(status=SolveStatus.FEASIBLE, solver="snapshot",
                             roster=day_roster, objective=bd.objective,
                             breakdown=bd)
        session.day_result = StageResult(stage=Stage.DAY, report=report)
    return session


class SessionStore:
    """Append-only session snapshots on local disk."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, session_id: str) -> Path:
        d = self.root / session_id
        d.mkdir(parents=True, exist_ok=True)
        return d

    def save(self, session: Session) -> Path:
        d = self._dir(session.session_id)
        seq = len(list(d.glob("snap-*.json")))
        path = d / f"snap-{seq:05d}.json"
        path.write_bytes(dump_session(session))
        return path

    def load_latest(self, session_id: str) -> Session | None:
        d = self.root / session_id
        if not d.exists():
            return None
        snaps = sorted(d.glob("snap-*.json"))
        if not snaps:
            return None
        return load_session(snaps[-1].read_bytes())

    def list_sessions(self):
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())
