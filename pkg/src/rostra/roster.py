"""Roster container: (nurse, date) -> shift symbol, plus cell provenance.

A roster is always total over the horizon. Margin cells (previous/next
month) carry WISH or FIXED_PREV_MONTH provenance and are never touched by
a solve. Edits go through with_cells so every mutation produces a new
roster (copy-on-edit)."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum

from .calendars import CalendarWindow
from .shifts import Shift


class RosterError(ValueError):
    pass


class Provenance(Enum):
    WISH = "wish"
    FIXED_PREV_MONTH = "fixed_prev_month"
    SOLVED = "solved"
    EDITED = "edited"
    POSTPROCESSED = "postprocessed"


@dataclass
class Roster:
    calendar: CalendarWindow
    nurse_ids: tuple[str, ...]
    cells: dict = field(default_factory=dict)        # (nid, date) -> Shift
    provenance: dict = field(default_factory=dict)   # (nid, date) -> Provenance

    @classmethod
    def blank(cls, calendar: CalendarWindow, nurse_ids,
              fill: Shift = Shift.UNSET,
              prov: Provenance = Provenance.SOLVED) -> "Roster":
        nurse_ids = tuple(nurse_ids)
        cells = {}
        provenance = {}
        for nid in nurse_ids:
            for d in calendar.days:
                cells[(nid, d)] = fill
                provenance[(nid, d)] = prov
        return cls(calendar, nurse_ids, cells, provenance)

    def get(self, nid: str, d: dt.date) -> Shift:
        return self.cells[(nid, d)]

    def prov(self, nid: str, d: dt.date) -> Provenance:
        return self.provenance[(nid, d)]

    def with_cells(self, updates, prov: Provenance) -> "Roster":
        """Return a copy with the given {(nid, date): Shift} applied."""
        cells = dict(self.cells)
        provenance = dict(self.provenance)
        for (nid, d), s in updates.items():
            if (nid, d) not in cells:
                raise RosterError(f"cell ({nid}, {d}) outside the roster")
            cells[(nid, d)] = s
            provenance[(nid, d)] = prov
        return Roster(self.calendar, self.nurse_ids, cells, provenance)

    def copy(self) -> "Roster":
        return Roster(self.calendar, self.nurse_ids,
                      dict(self.cells), dict(self.provenance))

    def is_total(self) -> bool:
        return all(
            (nid, d) in self.cells
            for nid in self.nurse_ids for d in self.calendar.days
        )

    def count(self, nid: str, dates, shifts) -> int:
        shifts = frozenset(shifts) if not isinstance(shifts, frozenset) else shifts
        return sum(1 for d in dates if self.cells[(nid, d)] in shifts)

    def symbols_used(self) -> set[Shift]:
        return set(self.cells.values())

    # -- grid conversion (solver internals work on int matrices) -------------

    def to_grid(self, nurse_order=None) -> list[list[int]]:
        order = tuple(nurse_order) if nurse_order is not None else self.nurse_ids
        days = self.calendar.days
        return [[self.cells[(nid, d)].code for d in days] for nid in order]

    @classmethod
    def from_grid(cls, calendar: CalendarWindow, nurse_ids, grid,
                  base: "Roster | None" = None,
                  prov: Provenance = Provenance.SOLVED) -> "Roster":
        """Rebuild a roster from an int grid.

        When base is given, cells that keep their base value also keep its
        provenance; changed cells get prov.
        """
        from .shifts import SHIFT_BY_CODE

        nurse_ids = tuple(nurse_ids)
        cells = {}
        provenance = {}
        for ni, nid in enumerate(nurse_ids):
            for di, d in enumerate(calendar.days):
                s = SHIFT_BY_CODE[grid[ni][di]]
                cells[(nid, d)] = s
                if base is not None and base.cells.get((nid, d)) == s:
                    provenance[(nid, d)] = base.provenance[(nid, d)]
                else:
                    provenance[(nid, d)] = prov
        return cls(calendar, nurse_ids, cells, provenance)

    def diff(self, other: "Roster") -> list[tuple[str, dt.date, Shift, Shift]]:
        out = []
        for nid in self.nurse_ids:
            for d in self.calendar.days:
                a, b = self.cells[(nid, d)], other.cells[(nid, d)]
                if a != b:
                    out.append((nid, d, a, b))
        return out
