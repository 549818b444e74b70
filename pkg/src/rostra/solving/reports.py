"""Solve and probe result containers."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum

from ..catalog.registry import SoftPenaltyBreakdown, ViolationRecord
from ..roster import Roster


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE_HARD = "infeasible_hard"
    TIMEOUT = "timeout"


@dataclass
class SolveReport:
    status: SolveStatus
    solver: str
    roster: Roster | None = None
    objective: object = None
    trace: list = field(default_factory=list)   # (elapsed_s, objective)
    seed: int | None = None
    hard_violations: int = 0                    # heuristic path only
    breakdown: SoftPenaltyBreakdown | None = None
    wall_seconds: float = 0.0
    slack_values: dict = field(default_factory=dict)  # probe slacks > 0

    def assert_monotone_trace(self):
        for (t0, v0), (t1, v1) in zip(self.trace, self.trace[1:]):
            if t1 < t0 or v1 > v0:
                raise AssertionError("incumbent trace must be non-increasing")

    def trace_csv(self) -> str:
        lines = ["elapsed_s,objective"]
        for t, v in self.trace:
            lines.append(f"{t:.6f},{float(v):.6f}")
        return "\n".join(lines) + "\n"


@dataclass
class ProbeReport:
    records: list = field(default_factory=list)       # ViolationRecord
    suggestions: list = field(default_factory=list)   # (nurse, date) wish cells

    @property
    def clean(self) -> bool:
        return not self.records

    def render(self) -> str:
        if self.clean:
            return "no hard-constraint conflicts found\n"
        out = ["hard-constraint conflicts:"]
        for r in self.records:
            out.append("  " + r.human_note())
        if self.suggestions:
            out.append("wish cells to revisit:")
            for nid, d in self.suggestions:
                out.append(f"  {nid} on {d.isoformat()}")
        return "\n".join(out) + "\n"
