"""Hard-relaxation feasibility probe.

Before a stage is solved, the hard families are converted to weighted
slacks (wish fixings far heavier than the structural families) and the
relaxed program is solved. Any positive slack names the hard family and
the cell/window that cannot be satisfied, which is exactly what the
operator needs to bounce back to the ward. Contradictions between
fixings themselves (wish against forced month-boundary cell, or two
fixings on one cell) are detected directly before the solve."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from ..catalog.elements import CellDomain
from ..catalog.ids import Kind, Stage, hd, hn, parse_cid
from ..catalog.registry import CompiledStage, ViolationRecord, compile_stage
from ..encoder.encode import encode_stage
from ..roster import Provenance, Roster
from ..staff import WardConfig
from .exact import SolverCommand, solve_exact
from .reports import ProbeReport


def _assignment_cid(stage: Stage):
    return hn("S", 14) if stage is Stage.NIGHT else hd("S", 9)


def fixing_conflicts(cs: CompiledStage, extra_fixings=()):
    """Contradictions among cell domains, attributed to their families.

    extra_fixings: iterable of (nurse_id, date, Shift); two different
    symbols on one cell violate the one-symbol-per-cell family."""
    ctx = cs.ctx
    records = []

    by_cell: dict = {}
    for c in cs.constraints:
        if c.cid.kind is not Kind.HARD or not c.enabled:
            continue
        for e in c.elements:
            if isinstance(e.body, CellDomain):
                by_cell.setdefault((e.body.ni, e.body.di), []).append(
                    (c.cid, e.body.mask))

    fix_by_cell: dict = {}
    for nid, d, shift in extra_fixings:
        ni = ctx.ni_of[nid]
        di = ctx.di_of[d]
        fix_by_cell.setdefault((ni, di), set()).add(shift)
        by_cell.setdefault((ni, di), []).append((None, 1 << shift.code))

    for (ni, di), entries in sorted(by_cell.items()):
        nid = ctx.nurses[ni].id
        day = ctx.cal.days[di]
        fixes = fix_by_cell.get((ni, di), set())
        if len(fixes) > 1:
            symbols = "/".join(sorted(s.value for s in fixes))
            records.append(ViolationRecord(
                constraint=_assignment_cid(cs.stage), nurse=nid, date=day,
                magnitude=1, note=f"cell fixed to {symbols} at once"))
            continue
        inter = (1 << 10) - 1
        for _cid, mask in entries:
            inter &= mask
        if inter == 0:
            for cid, _mask in entries:
                records.append(ViolationRecord(
                    constraint=cid if cid is not None else _assignment_cid(cs.stage),
                    nurse=nid, date=day, magnitude=1,
                    note="conflicting cell fixings"))
    return records


def probe_hard(cfg: WardConfig, wishes: Roster, stage: Stage,
               time_limit: float = 120.0,
               command: SolverCommand | None = None,
               extra_fixings=()) -> ProbeReport:
    cs = compile_stage(stage, cfg, wishes)
    records = fixing_conflicts(cs, extra_fixings)

    probe_wishes = wishes
    if extra_fixings:
        seen = {}
        updates = {}
        for nid, d, shift in extra_fixings:
            if (nid, d) not in seen:  # first symbol wins; dupes are recorded
                seen[(nid, d)] = shift
                updates[(nid, d)] = shift
        probe_wishes = wishes.with_cells(updates, Provenance.EDITED)
        cs = compile_stage(stage, cfg, probe_wishes)

    instance = encode_stage(stage, cfg, probe_wishes, probe_mode=True,
                            compiled=cs)
    report = solve_exact(instance, time_limit=time_limit, command=command,
                         compiled=cs, base_roster=probe_wishes)
    for name, value in sorted(report.slack_values.items()):
        vi = instance.var_index[name]
        _tag, cid_str, nurse, date, note = instance.vars[vi].meta
        records.append(ViolationRecord(
            constraint=parse_cid(cid_str), nurse=nurse, date=date,
            magnitude=round(value) if abs(value - round(value)) < 1e-6 else value,
            note=note))

    # dedupe, stable order
    uniq = {}
    for r in records:
        key = (str(r.constraint), r.nurse, r.date)
        if key not in uniq:
            uniq[key] = r
    ordered = sorted(uniq.values(),
                     key=lambda r: (r.constraint.sort_key, r.nurse or "",
                                    r.date or dt.date.min))

    suggestions = _wish_cells_near(cs, ordered)
    return ProbeReport(records=ordered, suggestions=suggestions)


def _wish_cells_near(cs: CompiledStage, records, span: int = 3):
    ctx = cs.ctx
    if ctx.wish_code is None:
        return []
    out = []
    seen = set()
    for r in records:
        if r.nurse is None or r.date is None:
            continue
        ni = ctx.ni_of.get(r.nurse)
        if ni is None:
            continue
        base = ctx.di_of[r.date]
        for di in range(max(0, base - span),
                        min(ctx.num_days, base + span + 1)):
            if ctx.wish_code[ni][di] is not None:
                cell = (r.nurse, ctx.cal.days[di])
                if cell not in seen:
                    seen.add(cell)
                    out.append(cell)
    return out
