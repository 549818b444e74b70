"""Shift alphabet and the derived symbol sets used by every constraint.

Ten canonical codes cover the whole roster vocabulary:

  DAY    (日)   8-hour day shift
  LDAY   (12h)  12-hour day shift, normally placed right before a night
  EARLY  (早)   early day shift
  LATE   (遅)   late day shift
  NIN    (入)   night shift, evening half (starts the night)
  NOUT   (明)   night shift, morning half (ends the night)
  OTHER  (他)   off-ward duty such as meetings or training
  OFF    (休)   regular weekly off
  SOFF   (特休) special leave (annual / summer leave)
  UNSET  (未)   stage-1 placeholder, resolved during day scheduling

Hospitals use 100+ raw codes in practice; io_config maps them onto these.
Internally a shift is a small int code so grids and masks stay cheap.
"""

from __future__ import annotations

from enum import Enum


class Shift(str, Enum):
    """Canonical shift symbol (ASCII token; Japanese glyph via .glyph)."""

    DAY = "DAY"
    LONGDAY = "LDAY"
    EARLY = "EARLY"
    LATE = "LATE"
    NIGHT_IN = "NIN"
    NIGHT_OUT = "NOUT"
    OTHER = "OTHER"
    OFF = "OFF"
    SPECIAL_OFF = "SOFF"
    UNSET = "UNSET"

    @property
    def code(self) -> int:
        return _CODE[self]

    @property
    def glyph(self) -> str:
        return _GLYPH[self]

    @property
    def is_work(self) -> bool:
        return self in WORK_SHIFTS

    @property
    def is_off(self) -> bool:
        return self in OFF_SHIFTS

    def __str__(self) -> str:  # plain token in messages and files
        return self.value


# Stable code order: grids, masks and exported variables all follow it.
_ORDER = (
    Shift.DAY,
    Shift.LONGDAY,
    Shift.EARLY,
    Shift.LATE,
    Shift.NIGHT_IN,
    Shift.NIGHT_OUT,
    Shift.OTHER,
    Shift.OFF,
    Shift.SPECIAL_OFF,
    Shift.UNSET,
)
_CODE = {s: i for i, s in enumerate(_ORDER)}
SHIFT_BY_CODE: tuple[Shift, ...] = _ORDER
NUM_SHIFTS = len(_ORDER)

_GLYPH = {
    Shift.DAY: "日",
    Shift.LONGDAY: "12h",
    Shift.EARLY: "早",
    Shift.LATE: "遅",
    Shift.NIGHT_IN: "入",
    Shift.NIGHT_OUT: "明",
    Shift.OTHER: "他",
    Shift.OFF: "休",
    Shift.SPECIAL_OFF: "特休",
    Shift.UNSET: "未",
}

GLYPH_TO_SHIFT = {g: s for s, g in _GLYPH.items()}
TOKEN_TO_SHIFT = {s.value: s for s in Shift}

# ---------------------------------------------------------------------------
# Derived sets (the constraint formulas are written against these).
# ---------------------------------------------------------------------------

OFF_SHIFTS = frozenset({Shift.OFF, Shift.SPECIAL_OFF})
OFF_OR_UNSET = OFF_SHIFTS | {Shift.UNSET}
WORK_SHIFTS = frozenset(
    {Shift.DAY, Shift.LONGDAY, Shift.EARLY, Shift.LATE,
     Shift.NIGHT_IN, Shift.NIGHT_OUT, Shift.OTHER}
)
WORK_OR_UNSET = WORK_SHIFTS | {Shift.UNSET}
# Day-band symbols (includes OTHER: the nurse is working a day, just off-ward)
DAY_SHIFTS = frozenset(
    {Shift.DAY, Shift.LONGDAY, Shift.EARLY, Shift.LATE, Shift.OTHER}
)
ALL_SHIFTS = frozenset(Shift)

# Staffing bands: which symbols count toward "people present" in a band.
# The night band is counted on the NIGHT_IN day (the NOUT next morning is the
# tail of the same night); the day band excludes OTHER (off-ward).
NIGHT_BAND = frozenset({Shift.NIGHT_IN})
DAY_BAND = frozenset({Shift.DAY, Shift.LONGDAY, Shift.EARLY, Shift.LATE})

# Stage placement alphabets: symbols a solver may place in a free cell.
NIGHT_STAGE_FREE = frozenset(
    {Shift.NIGHT_IN, Shift.NIGHT_OUT, Shift.OFF, Shift.UNSET}
)
DAY_STAGE_FREE = frozenset({Shift.DAY, Shift.OFF})
DAY_STAGE_FREE_EXTENDED = DAY_STAGE_FREE | {Shift.EARLY, Shift.LATE}


def mask(*shifts: Shift) -> int:
    """Bit mask over shift codes; bit i set means code i is in the set."""
    m = 0
    for s in shifts:
        m |= 1 << s.code
    return m


def mask_of(shifts) -> int:
    m = 0
    for s in shifts:
        m |= 1 << s.code
    return m


FULL_MASK = mask_of(Shift)


def shifts_in_mask(m: int) -> list[Shift]:
    return [s for s in _ORDER if (m >> s.code) & 1]


def parse_shift(token: str) -> Shift:
    """Accept the canonical token or the Japanese glyph."""
    t = token.strip()
    if t in TOKEN_TO_SHIFT:
        return TOKEN_TO_SHIFT[t]
    if t in GLYPH_TO_SHIFT:
        return GLYPH_TO_SHIFT[t]
    raise ValueError(f"unknown shift symbol: {token!r}")
