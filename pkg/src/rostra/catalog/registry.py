"""Catalog assembly, direct evaluation and hard-constraint checking.

compile_stage binds the catalog to one (stage, ward, wishes) context.
The compiled stage evaluates rosters directly (no IP machinery): soft
totals with per-nurse partials, the weighted objective, and pinpointed
hard violations. The encoder consumes the same compiled elements."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from ..roster import Roster
from ..staff import WardConfig
from .context import StageContext
from .day import DAY_HARD, DAY_SOFT
from .elements import CompiledConstraint, EpiMax
from .ids import ConstraintId, Kind, Stage
from .night import NIGHT_HARD, NIGHT_SOFT


class CatalogError(ValueError):
    pass


DISABLED = "DISABLED"  # marker distinguishing "toggled off" from zero


@dataclass(frozen=True)
class ViolationRecord:
    constraint: ConstraintId
    nurse: str | None
    date: dt.date | None
    magnitude: int
    note: str = ""

    def human_note(self) -> str:
        where = []
        if self.nurse is not None:
            where.append(f"nurse {self.nurse}")
        if self.date is not None:
            where.append(f"from {self.date.isoformat()}")
        loc = ", ".join(where) if where else "ward-wide"
        extra = f" ({self.note})" if self.note else ""
        return f"{self.constraint}: {loc}, amount {self.magnitude}{extra}"


@dataclass
class SoftPenaltyBreakdown:
    totals: dict = field(default_factory=dict)      # cid -> value
    partials: dict = field(default_factory=dict)    # (cid, nurse_id) -> value
    disabled: set = field(default_factory=set)      # cids toggled off
    objective: object = 0                           # sum of weight * total

    def total(self, cid):
        if cid in self.disabled:
            return DISABLED
        return self.totals.get(cid, 0)

    def partial(self, cid, nurse_id):
        return self.partials.get((cid, nurse_id), 0)


def table_for(stage: Stage):
    if stage is Stage.NIGHT:
        return NIGHT_HARD, NIGHT_SOFT
    return DAY_HARD, DAY_SOFT


@dataclass
class CompiledStage:
    ctx: StageContext
    constraints: list = field(default_factory=list)
    by_cid: dict = field(default_factory=dict)

    @property
    def stage(self) -> Stage:
        return self.ctx.stage

    @property
    def cfg(self) -> WardConfig:
        return self.ctx.cfg

    def constraint(self, cid: ConstraintId) -> CompiledConstraint:
        try:
            return self.by_cid[cid]
        except KeyError:
            raise CatalogError(f"{cid} is not in the {self.stage.name} catalog")

    # -- evaluation -----------------------------------------------------------

    def evaluate_soft(self, grid) -> SoftPenaltyBreakdown:
        bd = SoftPenaltyBreakdown()
        epigraphs = []
        for c in self.constraints:
            if c.cid.kind is not Kind.SOFT:
                continue
            if not c.enabled:
                bd.disabled.add(c.cid)
                continue
            if c.elements and isinstance(c.elements[0].body, EpiMax):
                epigraphs.append(c)
                continue
            total = 0
            for e in c.elements:
                v = e.body.value(grid)
                if v == 0:
                    continue
                v = e.mult * v
                total += v
                if e.nurse is not None:
                    key = (c.cid, e.nurse)
                    bd.partials[key] = bd.partials.get(key, 0) + v
            bd.totals[c.cid] = total
        for c in epigraphs:
            epi = c.elements[0].body
            best = 0
            for ni in epi.eligible:
                nid = self.ctx.nurses[ni].id
                s = sum(bd.partial(m, nid) for m in epi.member_cids)
                if s > best:
                    best = s
            bd.totals[c.cid] = best
        w = self.cfg.weights
        bd.objective = sum(
            w.weight(cid) * v for cid, v in bd.totals.items() if v
        )
        return bd

    def check_hard(self, grid, cid: ConstraintId | None = None):
        out = []
        targets = ([self.constraint(cid)] if cid is not None
                   else [c for c in self.constraints
                         if c.cid.kind is Kind.HARD])
        for c in targets:
            if not c.enabled:
                continue
            for e in c.elements:
                v = e.body.violation(grid)
                if v > 0:
                    out.append(ViolationRecord(
                        constraint=c.cid, nurse=e.nurse, date=e.date,
                        magnitude=v, note=e.note))
        out.sort(key=lambda r: (r.constraint.sort_key,
                                r.nurse or "", r.date or dt.date.min))
        return out

    def grid_of(self, roster: Roster):
        return roster.to_grid(nurse_order=[n.id for n in self.ctx.nurses])


def compile_stage(stage: Stage, cfg: WardConfig,
                  wishes: Roster | None = None) -> CompiledStage:
    ctx = StageContext.create(stage, cfg, wishes)
    hard, soft = table_for(stage)
    cs = CompiledStage(ctx=ctx)
    for cid, desc, enabled_fn, build in hard + soft:
        enabled = bool(enabled_fn(cfg))
        comp = CompiledConstraint(cid=cid, description=desc, enabled=enabled)
        if enabled:
            comp.elements = build(cid, ctx)
        cs.constraints.append(comp)
        cs.by_cid[cid] = comp
    cs.constraints.sort(key=lambda c: c.cid.sort_key)
    return cs


# ---------------------------------------------------------------------------
# Public single-constraint entry points
# ---------------------------------------------------------------------------


def evaluate_soft(cid: ConstraintId, roster: Roster, cfg: WardConfig,
                  wishes: Roster | None = None):
    """Value of one soft constraint on a concrete roster.

    Returns (value, per-nurse partials) or (DISABLED, {}) when the ward
    toggles switch the constraint off."""
    if cid.kind is not Kind.SOFT:
        raise CatalogError(f"{cid} is not a soft constraint")
    cs = compile_stage(cid.stage, cfg, wishes)
    comp = cs.constraint(cid)
    if not comp.enabled:
        return DISABLED, {}
    bd = cs.evaluate_soft(cs.grid_of(roster))
    partials = {n: v for (c, n), v in bd.partials.items() if c == cid}
    return bd.totals.get(cid, 0), partials


def check_hard(cid: ConstraintId, roster: Roster, cfg: WardConfig,
               wishes: Roster | None = None):
    """Violation records of one hard constraint on a concrete roster."""
    if cid.kind is not Kind.HARD:
        raise CatalogError(f"{cid} is not a hard constraint")
    cs = compile_stage(cid.stage, cfg, wishes)
    cs.constraint(cid)  # raises for unknown ids
    return cs.check_hard(cs.grid_of(roster), cid)


def catalog_listing(stage: Stage, cfg: WardConfig):
    """Ordered (cid, enabled, description) rows for one stage.

    Base entries always appear (disabled ones flagged); variant entries
    such as the care-worker staffing clones appear only when their toggle
    registers them."""
    hard, soft = table_for(stage)
    rows = [
        (cid, bool(enabled_fn(cfg)), desc)
        for cid, desc, enabled_fn, _build in hard + soft
        if not cid.variant or enabled_fn(cfg)
    ]
    rows.sort(key=lambda r: r[0].sort_key)
    return rows
