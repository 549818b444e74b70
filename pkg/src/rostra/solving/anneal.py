"""Built-in heuristic: simulated annealing with restarts over rosters.

Moves: single-cell symbol change, night-block (NIN+NOUT) placement /
removal / relocation, and a two-nurse same-day cell exchange. Penalties
are maintained incrementally by PenaltyEngine; hard constraints run as a
very heavy penalty internally while the final report keeps the hard
violation count separate from the soft objective.

Determinism: the iteration budget is derived from the time limit through
a fixed rate constant, the trace clock is the iteration counter, and all
randomness flows from one seeded generator, so identical seeds and inputs
give byte-identical results regardless of machine speed."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from ..catalog.elements import CellDomain
from ..catalog.ids import Kind, Stage
from ..catalog.registry import CompiledStage, compile_stage
from ..roster import Roster
from ..shifts import Shift
from ..staff import DEFAULT_HARD_WEIGHT, WardConfig
from .engine import PenaltyEngine
from .reports import SolveReport, SolveStatus

ITERS_PER_SECOND = 4000   # budget = time_limit * this rate (determinism)

_NIN = Shift.NIGHT_IN.code
_NOUT = Shift.NIGHT_OUT.code
_UNSET = Shift.UNSET.code
_OFF = Shift.OFF.code


class HeuristicError(ValueError):
    pass


@dataclass
class AnnealConfig:
    t_start: float = 400.0
    t_end: float = 0.5
    restarts: int = 4
    iters_per_second: int = ITERS_PER_SECOND


def _allowed_masks(cs: CompiledStage, honor_wishes_on_conflict: bool = False):
    """Per-cell symbol masks: intersection of all hard cell domains.

    A wish contradicting a structural domain normally raises; with
    honor_wishes_on_conflict the wish wins and the structural violation is
    left for the engine to count (the acknowledged-override path)."""
    ctx = cs.ctx
    n, d = len(ctx.nurses), ctx.num_days
    full = (1 << 10) - 1
    masks = [[full] * d for _ in range(n)]
    wish_masks = [[full] * d for _ in range(n)]
    for c in cs.constraints:
        if c.cid.kind is not Kind.HARD or not c.enabled:
            continue
        for e in c.elements:
            if isinstance(e.body, CellDomain):
                masks[e.body.ni][e.body.di] &= e.body.mask
                if e.body.from_wish:
                    wish_masks[e.body.ni][e.body.di] &= e.body.mask
    for ni in range(n):
        for di in range(d):
            if masks[ni][di] == 0:
                if honor_wishes_on_conflict and wish_masks[ni][di]:
                    masks[ni][di] = wish_masks[ni][di]
                    continue
                nid = ctx.nurses[ni].id
                day = ctx.cal.days[di]
                raise HeuristicError(
                    f"conflicting fixings leave cell ({nid}, {day}) empty")
    return masks


def _codes(mask: int):
    return [c for c in range(10) if (mask >> c) & 1]


def _initial_code(mask: int, stage: Stage) -> int:
    prefer = (_UNSET, _OFF) if stage is Stage.NIGHT else (_OFF,)
    for code in prefer:
        if (mask >> code) & 1:
            return code
    return _codes(mask)[0]


def solve_heuristic(cfg: WardConfig, wishes: Roster, stage: Stage,
                    time_limit: float = 60.0, seed: int = 0,
                    compiled: CompiledStage | None = None,
                    anneal: AnnealConfig | None = None,
                    hard_weight: int = DEFAULT_HARD_WEIGHT,
                    progress_hook=None) -> SolveReport:
    if time_limit <= 0:
        raise HeuristicError("time_limit must be positive")
    ac = anneal or AnnealConfig()
    t_wall = time.monotonic()
    cs = compiled if compiled is not None else compile_stage(stage, cfg, wishes)
    rng = random.Random(seed)
    masks = _allowed_masks(cs, honor_wishes_on_conflict=True)
    ctx = cs.ctx
    n_nurses, n_days = len(ctx.nurses), ctx.num_days

    free_cells = []
    choices = {}
    for ni in range(n_nurses):
        for di in range(n_days):
            codes = _codes(masks[ni][di])
            if len(codes) > 1:
                free_cells.append((ni, di))
                choices[(ni, di)] = codes
    free_set = set(free_cells)

    grid = []
    for ni in range(n_nurses):
        row = []
        for di in range(n_days):
            mask = masks[ni][di]
            if mask.bit_count() == 1:
                row.append(mask.bit_length() - 1)
            else:
                row.append(_initial_code(mask, stage))
        grid.append(row)

    engine = PenaltyEngine(cs, hard_weight=hard_weight)
    engine.load(grid)

    budget = max(1, int(time_limit * ac.iters_per_second))
    per_restart = max(1, budget // max(1, ac.restarts))
    cool = (ac.t_end / ac.t_start) ** (1.0 / per_restart)

    best_grid = [row[:] for row in grid]
    best_cost = engine.cost()
    trace = [(0.0, float(best_cost))]

    night_nurses = [
        ni for ni in range(n_nurses)
        if any((masks[ni][di] >> _NIN) & 1 and (ni, di) in free_set
               for di in range(n_days))
    ]

    def block_slots(ni):
        out = []
        for di in range(n_days - 1):
            if ((ni, di) in free_set and (ni, di + 1) in free_set
                    and (masks[ni][di] >> _NIN) & 1
                    and (masks[ni][di + 1] >> _NOUT) & 1):
                out.append(di)
        return out

    slot_cache = {ni: block_slots(ni) for ni in night_nurses}

    def clear_code(ni, di):
        mask = masks[ni][di]
        if (mask >> _UNSET) & 1 and stage is Stage.NIGHT:
            return _UNSET
        if (mask >> _OFF) & 1:
            return _OFF
        return _codes(mask)[0]

    def propose():
        r = rng.random()
        if stage is Stage.NIGHT and night_nurses and r < 0.35:
            ni = rng.choice(night_nurses)
            slots = slot_cache[ni]
            if not slots:
                return None
            di = rng.choice(slots)
            if grid[ni][di] == _NIN and grid[ni][di + 1] == _NOUT:
                if r < 0.15:  # relocate the block
                    dj = rng.choice(slots)
                    if dj == di:
                        return None
                    return [(ni, di, clear_code(ni, di)),
                            (ni, di + 1, clear_code(ni, di + 1)),
                            (ni, dj, _NIN), (ni, dj + 1, _NOUT)]
                return [(ni, di, clear_code(ni, di)),
                        (ni, di + 1, clear_code(ni, di + 1))]
            return [(ni, di, _NIN), (ni, di + 1, _NOUT)]
        if r > 0.9 and n_nurses >= 2:
            di = rng.randrange(n_days)
            ni = rng.randrange(n_nurses)
            nj = rng.randrange(n_nurses)
            if ni == nj or (ni, di) not in free_set or (nj, di) not in free_set:
                return None
            a, b = grid[ni][di], grid[nj][di]
            if a == b:
                return None
            if not ((masks[ni][di] >> b) & 1 and (masks[nj][di] >> a) & 1):
                return None
            return [(ni, di, b), (nj, di, a)]
        if not free_cells:
            return None
        ni, di = free_cells[rng.randrange(len(free_cells))]
        options = choices[(ni, di)]
        code = options[rng.randrange(len(options))]
        if code == grid[ni][di]:
            return None
        return [(ni, di, code)]

    iters_done = 0
    for _restart in range(max(1, ac.restarts)):
        if iters_done >= budget:
            break
        # restart from the incumbent
        if iters_done:
            grid = [row[:] for row in best_grid]
            engine.load(grid)
        temp = ac.t_start
        current = engine.cost()
        steps = min(per_restart, budget - iters_done)
        for _ in range(steps):
            iters_done += 1
            temp *= cool
            move = propose()
            if move is None:
                continue
            undo = engine.set_cells(move)
            new_cost = engine.cost()
            delta = float(new_cost - current)
            if delta <= 0 or rng.random() < math.exp(-delta / max(temp, 1e-9)):
                current = new_cost
                if new_cost < best_cost:
                    best_cost = new_cost
                    best_grid = [row[:] for row in grid]
                    point = (iters_done / ac.iters_per_second,
                             float(best_cost))
                    trace.append(point)
                    if progress_hook is not None:
                        progress_hook(point)
            else:
                engine.set_cells(undo)

    engine.load(best_grid)
    check_obj, check_hard_units = engine.recompute_from_scratch()
    if (check_obj, check_hard_units) != (engine.objective(), engine.hard_units):
        raise HeuristicError("incremental evaluation drifted from scratch")

    roster = Roster.from_grid(ctx.cal, [n.id for n in ctx.nurses], best_grid,
                              base=wishes)
    bd = cs.evaluate_soft(best_grid)
    if bd.objective != engine.objective():
        raise HeuristicError("engine objective disagrees with the catalog")
    report = SolveReport(
        status=SolveStatus.FEASIBLE,
        solver="anneal",
        roster=roster,
        objective=bd.objective,
        trace=trace,
        seed=seed,
        hard_violations=engine.hard_units,
        breakdown=bd,
        wall_seconds=time.monotonic() - t_wall,
    )
    report.assert_monotone_trace()
    return report
