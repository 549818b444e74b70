"""Incrementally maintained penalty state for the local search.

The engine owns a mutable int grid and the compiled constraint elements.
Every element value is cached; changing a cell re-evaluates only the
elements whose windows touch that cell. Hard elements contribute a
violation count (weighted by one large constant); soft elements carry
weight(cid) * mult; the fairness epigraphs are recomputed from per-nurse
partial sums kept alongside."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..catalog.elements import EpiMax
from ..catalog.ids import Kind
from ..catalog.registry import CompiledStage, SoftPenaltyBreakdown
from ..staff import DEFAULT_HARD_WEIGHT


@dataclass
class _Term:
    body: object
    hard: bool
    weight: object        # objective coefficient (soft) or None (hard)
    mult: int             # intra-constraint multiplier
    cid: object
    nurse: str | None
    date: object
    value: object = 0     # cached raw value (violation for hard terms)


class PenaltyEngine:
    def __init__(self, compiled: CompiledStage,
                 hard_weight: int = DEFAULT_HARD_WEIGHT):
        self.cs = compiled
        self.hard_weight = hard_weight
        self.terms: list[_Term] = []
        self.by_cell: dict = {}
        self.epis: list = []     # (cid, weight, member cids, eligible nurse ids)
        weights = compiled.cfg.weights
        member_cids = set()
        for c in compiled.constraints:
            if not c.enabled:
                continue
            if c.elements and isinstance(c.elements[0].body, EpiMax):
                body = c.elements[0].body
                eligible = tuple(compiled.ctx.nurses[ni].id
                                 for ni in body.eligible)
                self.epis.append((c.cid, weights.weight(c.cid),
                                  body.member_cids, eligible))
                member_cids.update(body.member_cids)
                continue
            hard = c.cid.kind is Kind.HARD
            w = None if hard else weights.weight(c.cid)
            for e in c.elements:
                t = _Term(body=e.body, hard=hard, weight=w, mult=e.mult,
                          cid=c.cid, nurse=e.nurse, date=e.date)
                tid = len(self.terms)
                self.terms.append(t)
                for cell in e.cells:
                    self.by_cell.setdefault(cell, []).append(tid)
        self.grid: list = []
        self.soft_total = 0        # weighted, without epigraphs
        self.hard_units = 0
        self.partials: dict = {}   # (cid, nurse id) -> mult-weighted raw sum

    # -- full (re)load -----------------------------------------------------------

    def load(self, grid):
        self.grid = grid
        self.soft_total = 0
        self.hard_units = 0
        self.partials = {}
        for t in self.terms:
            t.value = self._raw(t)
            self._account(t, t.value, sign=+1)

    def _raw(self, t: _Term):
        return t.body.violation(self.grid) if t.hard else t.body.value(self.grid)

    def _account(self, t: _Term, raw, sign: int):
        if t.hard:
            self.hard_units += sign * raw
            return
        contribution = t.mult * raw
        self.soft_total += sign * t.weight * raw * t.mult
        if t.nurse is not None and contribution:
            key = (t.cid, t.nurse)
            self.partials[key] = self.partials.get(key, 0) + sign * contribution

    # -- queries ----------------------------------------------------------------

    def epi_value(self, members, eligible):
        best = 0
        for nid in eligible:
            s = 0
            for m in members:
                s += self.partials.get((m, nid), 0)
            if s > best:
                best = s
        return best

    def epi_total(self):
        return sum(w * self.epi_value(members, eligible)
                   for _cid, w, members, eligible in self.epis)

    def objective(self):
        """Weighted soft objective including the fairness epigraphs."""
        return self.soft_total + self.epi_total()

    def cost(self):
        return self.objective() + self.hard_weight * self.hard_units

    # -- mutation ----------------------------------------------------------------

    def set_cells(self, changes):
        """changes: iterable of (ni, di, new_code); returns the undo list."""
        touched: set[int] = set()
        undo = []
        for ni, di, code in changes:
            old = self.grid[ni][di]
            if old == code:
                continue
            undo.append((ni, di, old))
            self.grid[ni][di] = code
            touched.update(self.by_cell.get((ni, di), ()))
        for tid in touched:
            t = self.terms[tid]
            new = self._raw(t)
            if new != t.value:
                self._account(t, t.value, sign=-1)
                self._account(t, new, sign=+1)
                t.value = new
        return undo

    # -- verification -------------------------------------------------------------

    def recompute_from_scratch(self):
        """Fresh (objective, hard_units), independent of the cached state."""
        soft = 0
        hard = 0
        partials: dict = {}
        for t in self.terms:
            raw = self._raw(t)
            if t.hard:
                hard += raw
            else:
                soft += t.weight * t.mult * raw
                if t.nurse is not None and raw:
                    key = (t.cid, t.nurse)
                    partials[key] = partials.get(key, 0) + t.mult * raw
        epi = 0
        for _cid, w, members, eligible in self.epis:
            best = 0
            for nid in eligible:
                s = sum(partials.get((m, nid), 0) for m in members)
                if s > best:
                    best = s
            epi += w * best
        return soft + epi, hard

    def breakdown(self) -> SoftPenaltyBreakdown:
        bd = self.cs.evaluate_soft(self.grid)
        return bd
