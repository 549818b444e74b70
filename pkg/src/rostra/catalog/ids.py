"""Constraint identifiers.

Every constraint in the catalog carries a structured id: stage (night/day
scheduling), kind (hard/soft), axis (N = per-nurse "row" constraint,
S = per-day "column" constraint) and a 1-based index. String form follows
the report convention: "Hn-N-5", "Sd-N-30". A variant suffix marks
toggle-generated clones such as the care-worker staffing rules
("Sn-S-17cw")."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class Stage(Enum):
    NIGHT = "n"
    DAY = "d"


class Kind(Enum):
    HARD = "H"
    SOFT = "S"


@dataclass(frozen=True)
class ConstraintId:
    stage: Stage
    kind: Kind
    axis: str        # "N" or "S"
    index: int
    variant: str = ""

    def __post_init__(self):
        if self.axis not in ("N", "S"):
            raise ValueError(f"axis must be N or S, got {self.axis!r}")
        if self.index < 1:
            raise ValueError("index must be >= 1")

    @property
    def sort_key(self):
        """Table order: per stage, hard block first, then soft, by index."""
        return (self.stage.value, 0 if self.kind is Kind.HARD else 1,
                self.index, self.variant)

    def __str__(self) -> str:
        return (f"{self.kind.value}{self.stage.value}-{self.axis}-"
                f"{self.index}{self.variant}")

    @property
    def is_epigraph(self) -> bool:
        """Fairness max-terms: Sn-N-34/35 and Sd-N-34."""
        if self.kind is not Kind.SOFT or self.axis != "N" or self.variant:
            return False
        if self.stage is Stage.NIGHT:
            return self.index in (34, 35)
        return self.index == 34


_ID_RE = re.compile(r"^([HS])([nd])-([NS])-(\d+)([a-z]*)$")


def parse_cid(text: str) -> ConstraintId:
    m = _ID_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed constraint id: {text!r}")
    kind, stage, axis, idx, variant = m.groups()
    return ConstraintId(Stage(stage), Kind(kind), axis, int(idx), variant)


def cid(kind: Kind, stage: Stage, axis: str, index: int,
        variant: str = "") -> ConstraintId:
    return ConstraintId(stage, kind, axis, index, variant)


def hn(axis: str, index: int, variant: str = "") -> ConstraintId:
    return ConstraintId(Stage.NIGHT, Kind.HARD, axis, index, variant)


def sn(axis: str, index: int, variant: str = "") -> ConstraintId:
    return ConstraintId(Stage.NIGHT, Kind.SOFT, axis, index, variant)


def hd(axis: str, index: int, variant: str = "") -> ConstraintId:
    return ConstraintId(Stage.DAY, Kind.HARD, axis, index, variant)


def sd(axis: str, index: int, variant: str = "") -> ConstraintId:
    return ConstraintId(Stage.DAY, Kind.SOFT, axis, index, variant)
