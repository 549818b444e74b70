"""Subprocess adapter around an external exact MILP solver.

The adapter exports the instance to a file, runs a command with
{instance}/{solution}/{time_limit} placeholders, and parses the solution
file with a pluggable parser. Two reference parsers ship: the CBC
solution-file layout (also produced by the bundled backend) and the
CPLEX XML solution layout. The parsed objective is re-verified against
the catalog evaluator before a roster is returned."""

from __future__ import annotations

import re
import subprocess
import sys
import tempfile
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..catalog.registry import CompiledStage
from ..encoder.encode import roster_from_solution
from ..encoder.instance import IpInstance
from ..encoder.lp_format import LP_TEXT, MPS_TEXT, write_instance
from ..roster import Roster
from .reports import SolveReport, SolveStatus

OBJECTIVE_TOLERANCE = Fraction(1, 10**6)


class SolverError(RuntimeError):
    pass


@dataclass
class SolverCommand:
    """argv template with {instance} {solution} {time_limit} placeholders."""

    argv: list
    parser: str = "cbc"                  # "cbc" | "cplex"
    instance_format: str = LP_TEXT
    name: str = "milp"

    def render(self, instance_path, solution_path, time_limit) -> list:
        return [
            a.format(instance=instance_path, solution=solution_path,
                     time_limit=time_limit)
            for a in self.argv
        ]


def bundled_solver_command() -> SolverCommand:
    return SolverCommand(
        argv=[sys.executable, "-m", "rostra.solving.milp_backend",
              "{instance}", "{solution}", "--time-limit", "{time_limit}"],
        parser="cbc",
        instance_format=MPS_TEXT,
        name="highs-bundled",
    )


def cbc_solver_command(binary: str = "cbc") -> SolverCommand:
    return SolverCommand(
        argv=[binary, "{instance}", "sec", "{time_limit}", "printingOptions",
              "all", "solve", "solu", "{solution}"],
        parser="cbc",
        instance_format=LP_TEXT,
        name="cbc",
    )


@dataclass
class ParsedSolution:
    status: SolveStatus
    objective: float | None
    values: dict = field(default_factory=dict)  # var name -> value


def parse_cbc_solution(text: str) -> ParsedSolution:
    lines = text.splitlines()
    if not lines:
        raise SolverError("empty solver output")
    head = lines[0].lower()
    status = SolveStatus.OPTIMAL
    objective = None
    m = re.search(r"objective value\s+(-?[\d.eE+]+)", lines[0])
    if m:
        objective = float(m.group(1))
    if head.startswith("optimal"):
        status = SolveStatus.OPTIMAL
    elif "infeasible" in head:
        status = SolveStatus.INFEASIBLE_HARD
    elif "time" in head or "stopped" in head:
        status = SolveStatus.TIMEOUT
    elif "unbounded" in head:
        raise SolverError("unbounded instance")
    else:
        raise SolverError(f"unparseable solver status line: {lines[0]!r}")
    values = {}
    for line in lines[1:]:
        parts = line.split()
        if len(parts) >= 3:
            # "index name value [reduced]" with optional leading "**"
            if parts[0] == "**":
                parts = parts[1:]
            try:
                values[parts[1]] = float(parts[2])
            except (ValueError, IndexError):
                continue
    return ParsedSolution(status, objective, values)


def parse_cplex_solution(text: str) -> ParsedSolution:
    root = ET.fromstring(text)
    header = root.find("header")
    if header is None:
        raise SolverError("missing CPLEX solution header")
    objective = float(header.get("objectiveValue", "nan"))
    status_str = (header.get("solutionStatusString") or "").lower()
    if "optimal" in status_str:
        status = SolveStatus.OPTIMAL
    elif "infeasible" in status_str:
        status = SolveStatus.INFEASIBLE_HARD
    elif "time" in status_str or "abort" in status_str:
        status = SolveStatus.TIMEOUT
    else:
        status = SolveStatus.FEASIBLE
    values = {}
    vars_el = root.find("variables")
    if vars_el is not None:
        for v in vars_el:
            values[v.get("name")] = float(v.get("value", "0"))
    return ParsedSolution(status, objective, values)


PARSERS = {"cbc": parse_cbc_solution, "cplex": parse_cplex_solution}


def solve_exact(instance: IpInstance, time_limit: float = 60.0,
                command: SolverCommand | None = None,
                compiled: CompiledStage | None = None,
                base_roster: Roster | None = None,
                workdir: str | None = None) -> SolveReport:
    """Export, run the external solver, parse, verify, return the report.

    compiled/base_roster enable roster reconstruction and the objective
    cross-check; probe instances skip the check (their objective is pure
    slack weight)."""
    cmd = command or bundled_solver_command()
    if cmd.parser not in PARSERS:
        raise SolverError(f"unknown parser {cmd.parser!r}")
    suffix = ".lp" if cmd.instance_format == LP_TEXT else ".mps"
    t0 = time.monotonic()
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        inst_path = Path(tmp) / ("instance" + suffix)
        sol_path = Path(tmp) / "solution.txt"
        inst_path.write_bytes(write_instance(instance, cmd.instance_format))
        argv = cmd.render(str(inst_path), str(sol_path), time_limit)
        try:
            proc = subprocess.run(argv, capture_output=True, text=True,
                                  timeout=max(time_limit * 3, 30))
        except FileNotFoundError as exc:
            raise SolverError(f"solver not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise SolverError("solver did not respond in time") from exc
        if not sol_path.exists():
            raise SolverError(
                f"solver produced no solution file "
                f"(stdout: {proc.stdout[-400:] if proc.stdout else ''!r})")
        parsed = PARSERS[cmd.parser](sol_path.read_text())
    wall = time.monotonic() - t0

    report = SolveReport(status=parsed.status, solver=cmd.name,
                         objective=parsed.objective, wall_seconds=wall)
    if parsed.status is SolveStatus.INFEASIBLE_HARD or parsed.objective is None:
        return report

    values = [0.0] * len(instance.vars)
    for name, val in parsed.values.items():
        vi = instance.var_index.get(name)
        if vi is not None:
            values[vi] = val
    # fixed variables may be omitted from solver output
    for vi, v in enumerate(instance.vars):
        fixed = v.fixed_to()
        if fixed is not None:
            values[vi] = float(fixed)
    report.trace = [(wall, parsed.objective)]

    if compiled is not None and base_roster is not None:
        roster = roster_from_solution(instance, values, base_roster)
        report.roster = roster
        if not instance.meta.get("probe_mode"):
            bd = compiled.evaluate_soft(compiled.grid_of(roster))
            gap = abs(Fraction(bd.objective) - Fraction(parsed.objective))
            if gap > OBJECTIVE_TOLERANCE * max(1, abs(Fraction(bd.objective))):
                raise SolverError(
                    f"solver objective {parsed.objective} disagrees with "
                    f"catalog evaluation {bd.objective}")
            report.objective = bd.objective
            report.breakdown = bd
    else:
        report.objective = parsed.objective

    if instance.meta.get("probe_mode"):
        report.slack_values = {
            instance.vars[vi].name: values[vi]
            for vi in range(len(values))
            if instance.vars[vi].meta and instance.vars[vi].meta[0] == "slack"
            and values[vi] > 1e-6
        }
    return report
