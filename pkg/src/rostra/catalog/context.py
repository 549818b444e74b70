"""Compilation context: one (stage, ward, wish table) binding.

Everything the constraint builders need is resolved here once: nurse and
date indexing, wish codes per cell, the free-cell alphabet for the stage,
and small piece-construction helpers."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from ..calendars import CalendarWindow
from ..roster import Roster
from ..shifts import (
    DAY_BAND,
    NIGHT_BAND,
    NIGHT_STAGE_FREE,
    Shift,
    mask_of,
)
from ..staff import Nurse, NightClass, WardConfig
from .ids import Stage


@dataclass
class StageContext:
    stage: Stage
    cfg: WardConfig
    wish_code: list | None = None   # [ni][di] -> shift code or None (free)
    _masks: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.cal: CalendarWindow = self.cfg.calendar
        self.nurses: list[Nurse] = list(self.cfg.nurses)
        self.ni_of = {n.id: i for i, n in enumerate(self.nurses)}
        self.di_of = self.cal.index
        self.num_days = len(self.cal.days)
        target = set(self.cal.target_days)
        self.target_dis = tuple(
            i for i, d in enumerate(self.cal.days) if d in target
        )
        self.margin_dis = frozenset(
            i for i, d in enumerate(self.cal.days) if d not in target
        )

    # -- construction ---------------------------------------------------------

    @classmethod
    def create(cls, stage: Stage, cfg: WardConfig,
               wishes: Roster | None = None) -> "StageContext":
        wish_code = None
        if wishes is not None:
            wish_code = wishes_to_codes(cfg, wishes)
        return cls(stage=stage, cfg=cfg, wish_code=wish_code)

    # -- cell helpers -----------------------------------------------------------

    def m(self, shifts) -> int:
        """Memoized shift-set mask."""
        key = shifts if isinstance(shifts, frozenset) else frozenset(shifts)
        got = self._masks.get(key)
        if got is None:
            got = self._masks[key] = mask_of(key)
        return got

    def wish_at(self, ni: int, di: int) -> int | None:
        if self.wish_code is None:
            return None
        return self.wish_code[ni][di]

    def is_margin(self, di: int) -> bool:
        return di in self.margin_dis

    def free_shifts(self, nurse: Nurse) -> frozenset:
        """Symbols the stage may place in this nurse's free target cells."""
        if self.stage is Stage.NIGHT:
            if nurse.night_class is NightClass.DAY_ONLY:
                return NIGHT_STAGE_FREE - {Shift.NIGHT_IN, Shift.NIGHT_OUT}
            return NIGHT_STAGE_FREE
        base = self.cfg.day_free_shifts()
        if nurse.night_class is NightClass.NIGHT_ONLY:
            base = base - {Shift.DAY}
        return base

    @property
    def band(self) -> frozenset:
        """Symbols counted as staffing presence for this stage's band."""
        return NIGHT_BAND if self.stage is Stage.NIGHT else DAY_BAND

    # -- piece builders ---------------------------------------------------------

    def day_piece(self, ni: int, d: dt.date, shifts):
        return (ni, self.di_of[d], self.m(shifts))

    def window_pieces(self, ni: int, d: dt.date, step_shifts):
        """Pieces for consecutive days starting at d, one shift set per day."""
        di = self.di_of[d]
        return tuple(
            (ni, di + h, self.m(s)) for h, s in enumerate(step_shifts)
        )

    def bound_value(self, table, d: dt.date) -> int | None:
        if table is None:
            return None
        return table.get(self.cal.dow_class(d))


def wishes_to_codes(cfg: WardConfig, wishes: Roster) -> list:
    """UNSET cells are free; every other symbol is a fixed wish."""
    cal = cfg.calendar
    out = []
    for n in cfg.nurses:
        row = []
        for d in cal.days:
            s = wishes.cells.get((n.id, d), Shift.UNSET)
            row.append(None if s is Shift.UNSET else s.code)
        out.append(row)
    return out
