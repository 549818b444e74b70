from .anneal import AnnealConfig, HeuristicError, solve_heuristic
from .engine import PenaltyEngine
from .exact import (
    SolverCommand,
    SolverError,
    bundled_solver_command,
    cbc_solver_command,
    solve_exact,
)
from .probe import fixing_conflicts, probe_hard
from .reports import ProbeReport, SolveReport, SolveStatus

__all__ = [
    "AnnealConfig",
    "HeuristicError",
    "solve_heuristic",
    "PenaltyEngine",
    "SolverCommand",
    "SolverError",
    "bundled_solver_command",
    "cbc_solver_command",
    "solve_exact",
    "fixing_conflicts",
    "probe_hard",
    "ProbeReport",
    "SolveReport",
    "SolveStatus",
]
