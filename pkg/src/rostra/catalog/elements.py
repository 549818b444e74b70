"""Primitive constraint elements shared by the evaluator and the encoder.

Every catalog constraint compiles to a list of elements. An element knows
how to score itself on a concrete roster grid (ints, [nurse][day]) and the
encoder knows how to turn each element kind into rows of the 0-1 program,
so the direct evaluator and the integer program cannot drift apart.

A "piece" is the smallest building block: 1 if the cell's symbol is in a
given set, else 0. All linear expressions here are sums of pieces.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from fractions import Fraction

from ..shifts import shifts_in_mask

# piece = (nurse_index, day_index, shift_mask)
Piece = tuple[int, int, int]


def piece_sum(grid, pieces) -> int:
    return sum((m >> grid[ni][di]) & 1 for ni, di, m in pieces)


def pieces_cells(pieces):
    return {(ni, di) for ni, di, _ in pieces}


@dataclass(frozen=True)
class CellDomain:
    """Hard: the cell's symbol must lie inside mask.

    Singleton masks are fixings (wish cells, forced month-boundary cells);
    wider masks express stage alphabets and per-class shift bans.
    """

    ni: int
    di: int
    mask: int
    from_wish: bool = False  # carries the higher probe weight when True

    def violation(self, grid) -> int:
        return 0 if (self.mask >> grid[self.ni][self.di]) & 1 else 1

    @property
    def cells(self):
        return {(self.ni, self.di)}

    def describe(self) -> str:
        return f"cell must be one of {[s.value for s in shifts_in_mask(self.mask)]}"


@dataclass(frozen=True)
class LinearHard:
    """Hard: lo <= sum(pieces) <= hi (either side may be None)."""

    pieces: tuple
    lo: int | None = None
    hi: int | None = None

    def violation(self, grid) -> int:
        v = piece_sum(grid, self.pieces)
        if self.lo is not None and v < self.lo:
            return self.lo - v
        if self.hi is not None and v > self.hi:
            return v - self.hi
        return 0

    @property
    def cells(self):
        return pieces_cells(self.pieces)


@dataclass(frozen=True)
class Shortfall:
    """Soft: max(0, bound - sum(pieces))."""

    pieces: tuple
    bound: int | Fraction

    def value(self, grid):
        return max(0, self.bound - piece_sum(grid, self.pieces))

    @property
    def cells(self):
        return pieces_cells(self.pieces)


@dataclass(frozen=True)
class Excess:
    """Soft: max(0, sum(pieces) - bound). bound 0 gives a plain count."""

    pieces: tuple
    bound: int | Fraction

    def value(self, grid):
        return max(0, piece_sum(grid, self.pieces) - self.bound)

    @property
    def cells(self):
        return pieces_cells(self.pieces)


@dataclass(frozen=True)
class MinShortfall:
    """Soft: max(0, bound - min(sum(a), sum(b)))."""

    a: tuple
    b: tuple
    bound: int

    def value(self, grid):
        return max(0, self.bound - min(piece_sum(grid, self.a),
                                       piece_sum(grid, self.b)))

    @property
    def cells(self):
        return pieces_cells(self.a) | pieces_cells(self.b)


@dataclass(frozen=True)
class MaxExcess:
    """Soft: max(0, max(sum(a), sum(b)) - bound)."""

    a: tuple
    b: tuple
    bound: int

    def value(self, grid):
        return max(0, max(piece_sum(grid, self.a),
                          piece_sum(grid, self.b)) - self.bound)

    @property
    def cells(self):
        return pieces_cells(self.a) | pieces_cells(self.b)


@dataclass(frozen=True)
class Indicator:
    """Binary pattern detector: 1 iff every piece scores 1.

    Encoded with the standard pair  sum >= k*s  and  sum <= (k-1) + s,
    which pins s to the pattern-present truth value.
    """

    pieces: tuple

    def value(self, grid) -> int:
        return 1 if piece_sum(grid, self.pieces) == len(self.pieces) else 0

    @property
    def cells(self):
        return pieces_cells(self.pieces)


@dataclass(frozen=True)
class IndShortfall:
    """Soft: max(0, bound - sum of indicators)."""

    indicators: tuple
    bound: int

    def value(self, grid):
        return max(0, self.bound - sum(i.value(grid) for i in self.indicators))

    @property
    def cells(self):
        out = set()
        for i in self.indicators:
            out |= i.cells
        return out


@dataclass(frozen=True)
class IndExcess:
    """Soft: max(0, sum of indicators - bound)."""

    indicators: tuple
    bound: int

    def value(self, grid):
        return max(0, sum(i.value(grid) for i in self.indicators) - self.bound)

    @property
    def cells(self):
        out = set()
        for i in self.indicators:
            out |= i.cells
        return out


@dataclass(frozen=True)
class IndHardGe:
    """Hard: sum of indicators >= bound (triple-off candidate guarantee)."""

    indicators: tuple
    bound: int

    def violation(self, grid) -> int:
        return max(0, self.bound - sum(i.value(grid) for i in self.indicators))

    @property
    def cells(self):
        out = set()
        for i in self.indicators:
            out |= i.cells
        return out


@dataclass(frozen=True)
class EpiMax:
    """Soft: max over eligible nurses of their partial sums of member ids.

    Scored from per-nurse partials of other constraints; the encoder emits
    an epigraph variable z with one row per eligible nurse.
    """

    member_cids: tuple            # ConstraintId of the summed constraints
    eligible: tuple               # nurse indexes the max ranges over

    def value(self, grid):  # resolved by the registry, not locally
        raise TypeError("EpiMax is evaluated via per-nurse partials")

    @property
    def cells(self):
        return set()


@dataclass(frozen=True)
class Element:
    """One scored/encoded unit of a constraint.

    mult is the intra-constraint weight (the preference multiplier); the
    objective coefficient is weight(cid) * mult. nurse/date locate the
    element for reports and per-nurse partial sums.
    """

    cid: object                   # ConstraintId
    body: object                  # one of the shapes above
    nurse: str | None = None
    date: dt.date | None = None
    mult: int = 1
    note: str = ""

    @property
    def cells(self):
        return self.body.cells


@dataclass
class CompiledConstraint:
    """A catalog entry compiled against one ward/stage context."""

    cid: object
    description: str
    enabled: bool
    elements: list = field(default_factory=list)

    @property
    def is_hard(self):
        from .ids import Kind

        return self.cid.kind is Kind.HARD
