"""Nurses, staffing bound tables, ward-level rules and the ward config.

WardConfig is the single container every other module reads. It mirrors the
condition-settings file one to one: nurse attributes, per-day-of-week
staffing bounds for the two bands, pair rules, forbidden sequences, run
limits, the weight table and the per-ward feature toggles.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from .calendars import CalendarWindow, DOW_CLASSES
from .shifts import ALL_SHIFTS, OFF_SHIFTS, Shift


class ConfigError(ValueError):
    pass


class NightClass(Enum):
    NIGHT_CAPABLE = "night_capable"   # works 12h days and nights
    NIGHT_ONLY = "night_only"         # 16h night specialist
    DAY_ONLY = "day_only"             # includes short-hour nurses


class OffPreference(Enum):
    WEEKEND_PAIR = "weekend_pair"     # Sat+Sun off together
    TRIPLE_OFF = "triple_off"         # three consecutive offs
    PAIR_OFF = "pair_off"             # two consecutive offs
    SINGLE_OFF = "single_off"         # scattered single offs
    NONE = "none"


class NightPattern(Enum):
    TWELVE_HOUR = "twelve_hour"       # 12h-NIN-NOUT-OFF canonical block
    SIXTEEN_HOUR = "sixteen_hour"     # NIN-NOUT-OFF (no LDAY prep day)


@dataclass(frozen=True)
class Nurse:
    id: str
    night_class: NightClass = NightClass.NIGHT_CAPABLE
    rookie: bool = False
    male: bool = False
    day_leader: bool = False
    group: int | None = None          # competence tier 1..4, 1 highest
    team: str | None = None           # "A" / "B"; membership optional
    night_count_fixed: bool = False   # hard count bound applies when True
    night_lb: int = 0
    night_ub: int = 99
    off_preference: OffPreference = OffPreference.NONE
    short_hours: bool = False
    care_worker: bool = False
    off_quota: int | None = None      # per-nurse override of ward off quota

    def __post_init__(self):
        if self.group is not None and self.group not in (1, 2, 3, 4):
            raise ConfigError(f"nurse {self.id}: group must be 1..4")
        if self.night_count_fixed and self.night_lb > self.night_ub:
            raise ConfigError(f"nurse {self.id}: night_lb > night_ub")


# ---------------------------------------------------------------------------
# Bound tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DowTable:
    """One integer per day-of-week class (Mon..Sun plus holiday)."""

    values: tuple[int | None, ...]  # aligned with DOW_CLASSES

    @classmethod
    def constant(cls, v: int | None) -> "DowTable":
        return cls(tuple(v for _ in DOW_CLASSES))

    @classmethod
    def of(cls, mapping, default: int | None = None) -> "DowTable":
        unknown = set(mapping) - set(DOW_CLASSES)
        if unknown:
            raise ConfigError(f"unknown day-of-week classes: {sorted(unknown)}")
        return cls(tuple(mapping.get(c, default) for c in DOW_CLASSES))

    @classmethod
    def weekday_weekend(cls, weekday: int | None, weekend: int | None) -> "DowTable":
        return cls.of(
            {"sat": weekend, "sun": weekend, "hol": weekend},
            default=weekday,
        )

    def get(self, dow_class: str) -> int | None:
        return self.values[DOW_CLASSES.index(dow_class)]


@dataclass(frozen=True)
class Bound:
    """Lower/upper staffing bound pair; None means the side is unset."""

    lb: DowTable | None = None
    ub: DowTable | None = None

    def validate(self, name: str):
        if self.lb is None or self.ub is None:
            return
        for c in DOW_CLASSES:
            lo, hi = self.lb.get(c), self.ub.get(c)
            if lo is not None and hi is not None and lo > hi:
                raise ConfigError(f"{name}[{c}]: lower bound {lo} > upper {hi}")

    @property
    def is_unset(self) -> bool:
        return self.lb is None and self.ub is None


UNSET_BOUND = Bound()


@dataclass(frozen=True)
class StaffingBounds:
    """All headcount bounds for one band (day band or night band)."""

    total: Bound = UNSET_BOUND
    group1: Bound = UNSET_BOUND
    group12: Bound = UNSET_BOUND
    group4: Bound = UNSET_BOUND
    team: dict = field(default_factory=dict)        # team -> Bound
    team_g1: dict = field(default_factory=dict)
    team_g12: dict = field(default_factory=dict)
    team_g34: dict = field(default_factory=dict)
    rookie: Bound = UNSET_BOUND
    male: Bound = UNSET_BOUND
    care: Bound = UNSET_BOUND

    def validate(self, band: str):
        for nm in ("total", "group1", "group12", "group4", "rookie", "male", "care"):
            getattr(self, nm).validate(f"{band}.{nm}")
        for nm in ("team", "team_g1", "team_g12", "team_g34"):
            for t, b in getattr(self, nm).items():
                b.validate(f"{band}.{nm}[{t}]")


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairRule:
    """Nurses who should co-work: count days where n1 has s1 and n2 has s2."""

    n1: str
    n2: str
    s1: Shift
    s2: Shift
    min_count: int

    def __post_init__(self):
        if self.n1 == self.n2:
            raise ConfigError("pair rule needs two distinct nurses")


@dataclass(frozen=True)
class ForbiddenPairRule:
    n1: str
    n2: str
    s1: Shift
    s2: Shift

    def __post_init__(self):
        if self.n1 == self.n2:
            raise ConfigError("forbidden pair needs two distinct nurses")


@dataclass(frozen=True)
class ForbiddenAssignment:
    """Nurse n must not take shift s on the given day-of-week class."""

    nurse: str
    shift: Shift
    dow: str  # one of DOW_CLASSES

    def __post_init__(self):
        if self.dow not in DOW_CLASSES:
            raise ConfigError(f"unknown day-of-week class: {self.dow}")


@dataclass(frozen=True)
class SequenceRule:
    """Ban (hard) or penalize (soft) a run of shift sets on consecutive days.

    steps holds one shift set per day; the rule fires when every day of a
    window matches its set. classes restricts which nurses it applies to
    (None = everyone).
    """

    steps: tuple[frozenset, ...]
    classes: frozenset | None = None  # frozenset[NightClass] or None

    def applies_to(self, nurse: Nurse) -> bool:
        return self.classes is None or nurse.night_class in self.classes

    @classmethod
    def of(cls, *steps, classes=None) -> "SequenceRule":
        norm = tuple(
            frozenset((s,)) if isinstance(s, Shift) else frozenset(s)
            for s in steps
        )
        return cls(
            steps=norm,
            classes=None if classes is None else frozenset(classes),
        )


@dataclass(frozen=True)
class Toggles:
    """Per-ward enablement of the optional constraint groups."""

    team_constraints: bool = True
    rookie_constraints: bool = True
    male_constraints: bool = True
    care_worker_constraints: bool = False


# ---------------------------------------------------------------------------
# Weight table
# ---------------------------------------------------------------------------

# Default objective weights by tier. The production weights are proprietary;
# these defaults only fix the intended dominance order: staffing-shape
# violations outweigh per-nurse pattern violations, which outweigh the
# fairness epigraphs.
DEFAULT_SHIFT_WEIGHT = 100
DEFAULT_NURSE_WEIGHT = 10
DEFAULT_EPIGRAPH_WEIGHT = 1
DEFAULT_HARD_WEIGHT = 1_000_000       # heuristic-internal hard penalty
DEFAULT_PROBE_WEIGHT = 1_000_000      # relaxed hard constraints in the probe
DEFAULT_PROBE_FIX_WEIGHT = 10_000_000  # wish fixings dominate in the probe
DEFAULT_PREF_MULTIPLIER = 5


@dataclass
class WeightTable:
    """Objective weight per soft-constraint id string (e.g. "Sn-S-1")."""

    overrides: dict = field(default_factory=dict)  # cid string -> weight
    shift_weight: int = DEFAULT_SHIFT_WEIGHT
    nurse_weight: int = DEFAULT_NURSE_WEIGHT
    epigraph_weight: int = DEFAULT_EPIGRAPH_WEIGHT

    def weight(self, cid) -> int:
        key = str(cid)
        if key in self.overrides:
            return self.overrides[key]
        if cid.is_epigraph:
            return self.epigraph_weight
        return self.shift_weight if cid.axis == "S" else self.nurse_weight


# ---------------------------------------------------------------------------
# Default sequence rules and run limits
# ---------------------------------------------------------------------------

NC, NO, DO = NightClass.NIGHT_CAPABLE, NightClass.NIGHT_ONLY, NightClass.DAY_ONLY


def default_night_hard_sequences(pattern: NightPattern) -> list[SequenceRule]:
    """Night-stage forbidden sequences enforcing the canonical night block.

    Twelve-hour wards: NIGHT_IN must be followed by NIGHT_OUT; NIGHT_OUT by
    an off; and NIGHT_IN must be preceded by an UNSET (which post-processing
    converts to the 12h prep day). Sixteen-hour wards allow NOUT-NIN back to
    back for the night specialists and skip the prep-day rule.
    """
    after_nin = ALL_SHIFTS - {Shift.NIGHT_OUT}
    rules = [SequenceRule.of(Shift.NIGHT_IN, after_nin)]
    if pattern is NightPattern.TWELVE_HOUR:
        rules.append(
            SequenceRule.of(Shift.NIGHT_OUT, ALL_SHIFTS - OFF_SHIFTS, classes={NC, DO})
        )
        rules.append(
            SequenceRule.of(
                Shift.NIGHT_OUT,
                ALL_SHIFTS - OFF_SHIFTS - {Shift.NIGHT_IN},
                classes={NO},
            )
        )
        rules.append(SequenceRule.of(OFF_SHIFTS, Shift.NIGHT_IN, classes={NC}))
    else:
        rules.append(
            SequenceRule.of(Shift.NIGHT_OUT, ALL_SHIFTS - OFF_SHIFTS - {Shift.NIGHT_IN})
        )
    return rules


def default_day_hard_sequences(pattern: NightPattern) -> list[SequenceRule]:
    """Day-stage forbidden sequences (night cells are fixed by then)."""
    work_after_nout = frozenset(
        {Shift.DAY, Shift.LONGDAY, Shift.EARLY, Shift.LATE, Shift.OTHER}
    )
    non_nout_after_nin = ALL_SHIFTS - {Shift.NIGHT_OUT}
    rules = [
        SequenceRule.of(Shift.NIGHT_OUT, work_after_nout, classes={NC, DO}),
        SequenceRule.of(Shift.NIGHT_IN, non_nout_after_nin),
    ]
    if pattern is NightPattern.SIXTEEN_HOUR:
        rules[0] = SequenceRule.of(
            Shift.NIGHT_OUT, work_after_nout - {Shift.NIGHT_IN}
        )
    return rules


DEFAULT_MAX_RUN = {
    Shift.DAY: 5,
    Shift.LONGDAY: 1,
    Shift.EARLY: 3,
    Shift.LATE: 3,
    Shift.NIGHT_IN: 1,
    Shift.NIGHT_OUT: 1,
    Shift.OTHER: 5,
}


# ---------------------------------------------------------------------------
# Ward configuration
# ---------------------------------------------------------------------------


@dataclass
class WardConfig:
    nurses: list[Nurse]
    calendar: CalendarWindow
    night_pattern: NightPattern = NightPattern.TWELVE_HOUR
    night_staffing: StaffingBounds = field(default_factory=StaffingBounds)
    day_staffing: StaffingBounds = field(default_factory=StaffingBounds)
    pairs: list[PairRule] = field(default_factory=list)
    forbidden_pairs: list[ForbiddenPairRule] = field(default_factory=list)
    forbidden_assignments: list[ForbiddenAssignment] = field(default_factory=list)
    night_hard_sequences: list[SequenceRule] | None = None   # None = defaults
    day_hard_sequences: list[SequenceRule] | None = None
    night_soft_sequences: list[SequenceRule] = field(default_factory=list)
    day_soft_sequences: list[SequenceRule] = field(default_factory=list)
    max_run: dict = field(default_factory=lambda: dict(DEFAULT_MAX_RUN))
    off_quota: int = 9                  # placeable regular offs per month
    avg_fssm_nights: Fraction = Fraction(0)
    avg_event_nights: Fraction = Fraction(0)
    toggles: Toggles = field(default_factory=Toggles)
    weights: WeightTable = field(default_factory=WeightTable)
    pref_multipliers: dict = field(default_factory=dict)  # cid str -> factor
    enable_early_late: bool = False     # day stage may place EARLY/LATE
    notes: str = ""

    def __post_init__(self):
        ids = [n.id for n in self.nurses]
        if len(ids) != len(set(ids)):
            raise ConfigError("duplicate nurse ids")
        self.night_staffing.validate("night")
        self.day_staffing.validate("day")
        if self.avg_fssm_nights < 0 or self.avg_event_nights < 0:
            raise ConfigError("average night counts must be >= 0")
        known = set(ids)
        for p in self.pairs + self.forbidden_pairs:
            for nid in (p.n1, p.n2):
                if nid not in known:
                    raise ConfigError(f"pair rule references unknown nurse {nid}")
        for f in self.forbidden_assignments:
            if f.nurse not in known:
                raise ConfigError(f"forbidden assignment references unknown nurse {f.nurse}")

    # -- nurse subsets -------------------------------------------------------

    def nurse(self, nid: str) -> Nurse:
        for n in self.nurses:
            if n.id == nid:
                return n
        raise KeyError(nid)

    @property
    def night_capable(self) -> list[Nurse]:
        return [n for n in self.nurses if n.night_class is NightClass.NIGHT_CAPABLE]

    @property
    def night_only(self) -> list[Nurse]:
        return [n for n in self.nurses if n.night_class is NightClass.NIGHT_ONLY]

    @property
    def day_only(self) -> list[Nurse]:
        return [n for n in self.nurses if n.night_class is NightClass.DAY_ONLY]

    @property
    def night_workers(self) -> list[Nurse]:
        return [n for n in self.nurses
                if n.night_class in (NightClass.NIGHT_CAPABLE, NightClass.NIGHT_ONLY)]

    @property
    def grouped(self) -> list[Nurse]:
        return [n for n in self.nurses if n.group is not None]

    @property
    def teams(self) -> list[str]:
        return sorted({n.team for n in self.nurses if n.team is not None})

    def in_group(self, groups) -> list[Nurse]:
        return [n for n in self.nurses if n.group in groups]

    def in_team(self, team: str, groups=None) -> list[Nurse]:
        return [
            n for n in self.nurses
            if n.team == team and (groups is None or n.group in groups)
        ]

    # -- effective rule sets ---------------------------------------------------

    def hard_sequences(self, stage) -> list[SequenceRule]:
        from .catalog.ids import Stage  # local import to avoid a cycle

        if stage is Stage.NIGHT:
            if self.night_hard_sequences is not None:
                return self.night_hard_sequences
            return default_night_hard_sequences(self.night_pattern)
        if self.day_hard_sequences is not None:
            return self.day_hard_sequences
        return default_day_hard_sequences(self.night_pattern)

    def soft_sequences(self, stage) -> list[SequenceRule]:
        from .catalog.ids import Stage

        return (self.night_soft_sequences if stage is Stage.NIGHT
                else self.day_soft_sequences)

    def pref_multiplier(self, cid) -> int:
        return self.pref_multipliers.get(str(cid), DEFAULT_PREF_MULTIPLIER)

    def day_free_shifts(self) -> frozenset:
        from .shifts import DAY_STAGE_FREE, DAY_STAGE_FREE_EXTENDED

        return DAY_STAGE_FREE_EXTENDED if self.enable_early_late else DAY_STAGE_FREE

    def with_updates(self, **kw) -> "WardConfig":
        return replace(self, **kw)


def compute_fssm_average(calendar: CalendarWindow, night_lb: DowTable | None,
                         n_night_capable: int) -> Fraction:
    """Convenience: total Fri-Sat-Sun-Mon night slots over the capable pool."""
    if n_night_capable <= 0 or night_lb is None:
        return Fraction(0)
    total = 0
    for d in calendar.fssm_days:
        v = night_lb.get(calendar.dow_class(d))
        total += 0 if v is None else v
    return Fraction(total, n_night_capable)
