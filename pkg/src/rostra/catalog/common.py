"""Builders for the recurring constraint shapes.

The two stages share almost all of their machinery: daily headcount bounds
over some nurse subset, forbidden/penalized sequences, same-shift run
limits, pair rules and weekday bans. Each builder returns Element lists
ready for the evaluator and the encoder."""

from __future__ import annotations

from ..shifts import WORK_SHIFTS, Shift
from ..staff import Bound, Nurse
from .context import StageContext
from .elements import (
    Element,
    Excess,
    Indicator,
    IndShortfall,
    LinearHard,
    Shortfall,
)


def staffing_soft(cid, nurses: list[Nurse], side, lower: bool,
                  ctx: StageContext, note: str = "") -> list[Element]:
    """One shortfall/excess element per target day against a DowTable side."""
    out = []
    band = ctx.m(ctx.band)
    nis = [ctx.ni_of[n.id] for n in nurses]
    for d in ctx.cal.target_days:
        v = ctx.bound_value(side, d)
        if v is None:
            continue
        pieces = tuple((ni, ctx.di_of[d], band) for ni in nis)
        body = Shortfall(pieces, v) if lower else Excess(pieces, v)
        out.append(Element(cid, body, date=d, note=note))
    return out


def staffing_hard(cid, nurses: list[Nurse], bound: Bound,
                  ctx: StageContext, note: str = "") -> list[Element]:
    """One two-sided hard row per target day."""
    out = []
    band = ctx.m(ctx.band)
    nis = [ctx.ni_of[n.id] for n in nurses]
    for d in ctx.cal.target_days:
        lo = ctx.bound_value(bound.lb, d)
        hi = ctx.bound_value(bound.ub, d)
        if lo is None and hi is None:
            continue
        pieces = tuple((ni, ctx.di_of[d], band) for ni in nis)
        out.append(Element(cid, LinearHard(pieces, lo=lo, hi=hi),
                           date=d, note=note))
    return out


def sequence_elements(cid, rules, ctx: StageContext,
                      hard: bool) -> list[Element]:
    """Windows matching a full rule pattern: hard rows or excess penalties."""
    out = []
    for rule in rules:
        length = len(rule.steps)
        if length < 1:
            continue
        starts = ctx.cal.window_starts(length)
        label = "->".join(
            "/".join(sorted(s.value for s in step)) if len(step) <= 2 else "…"
            for step in rule.steps
        )
        for n in ctx.nurses:
            if not rule.applies_to(n):
                continue
            ni = ctx.ni_of[n.id]
            for d in starts:
                pieces = ctx.window_pieces(ni, d, rule.steps)
                body = (LinearHard(pieces, hi=length - 1) if hard
                        else Excess(pieces, length - 1))
                out.append(Element(cid, body, nurse=n.id, date=d, note=label))
    return out


def run_limit_elements(cid, ctx: StageContext) -> list[Element]:
    """Per work shift s: no run longer than max_run[s]."""
    out = []
    for s in sorted(WORK_SHIFTS, key=lambda x: x.code):
        limit = ctx.cfg.max_run.get(s)
        if limit is None:
            continue
        starts = ctx.cal.window_starts(limit + 1)
        steps = [frozenset((s,))] * (limit + 1)
        for n in ctx.nurses:
            ni = ctx.ni_of[n.id]
            for d in starts:
                pieces = ctx.window_pieces(ni, d, steps)
                out.append(Element(cid, LinearHard(pieces, hi=limit),
                                   nurse=n.id, date=d, note=f"run of {s.value}"))
    return out


def pair_elements(cid, ctx: StageContext) -> list[Element]:
    """Co-work count per pair rule: indicators over target days."""
    out = []
    for p in ctx.cfg.pairs:
        ni1, ni2 = ctx.ni_of[p.n1], ctx.ni_of[p.n2]
        inds = tuple(
            Indicator((
                (ni1, ctx.di_of[d], ctx.m((p.s1,))),
                (ni2, ctx.di_of[d], ctx.m((p.s2,))),
            ))
            for d in ctx.cal.target_days
        )
        out.append(Element(cid, IndShortfall(inds, p.min_count),
                           note=f"{p.n1}+{p.n2} {p.s1.value}/{p.s2.value}"))
    return out


def forbidden_pair_elements(cid, ctx: StageContext) -> list[Element]:
    out = []
    for p in ctx.cfg.forbidden_pairs:
        ni1, ni2 = ctx.ni_of[p.n1], ctx.ni_of[p.n2]
        for d in ctx.cal.target_days:
            pieces = (
                (ni1, ctx.di_of[d], ctx.m((p.s1,))),
                (ni2, ctx.di_of[d], ctx.m((p.s2,))),
            )
            out.append(Element(cid, Excess(pieces, 1), date=d,
                               note=f"{p.n1}+{p.n2}"))
    return out


def forbidden_assignment_elements(cid, ctx: StageContext) -> list[Element]:
    """Count of banned (nurse, shift, weekday-class) placements."""
    out = []
    for f in ctx.cfg.forbidden_assignments:
        ni = ctx.ni_of[f.nurse]
        dates = [d for d in ctx.cal.target_days
                 if ctx.cal.dow_class(d) == f.dow]
        if not dates:
            continue
        pieces = tuple((ni, ctx.di_of[d], ctx.m((f.shift,))) for d in dates)
        out.append(Element(cid, Excess(pieces, 0), nurse=f.nurse,
                           note=f"{f.shift.value} on {f.dow}"))
    return out


def night_window_excess(cid, nurses, length: int, cap: int,
                        ctx: StageContext, mult_of=None) -> list[Element]:
    """Penalize more than cap NIGHT_INs inside any window of given length."""
    out = []
    steps = [frozenset((Shift.NIGHT_IN,))] * length
    for n in nurses:
        ni = ctx.ni_of[n.id]
        mult = mult_of(n) if mult_of else 1
        for d in ctx.cal.window_starts(length):
            pieces = ctx.window_pieces(ni, d, steps)
            out.append(Element(cid, Excess(pieces, cap), nurse=n.id,
                               date=d, mult=mult))
    return out
