"""Brute-force roster enumeration used as the independent optimum oracle.

Strategy: enumerate every nurse's feasible row (single-nurse hard
constraints only), then DFS over nurses. Multi-nurse hard constraints are
checked, and soft penalties accumulated, as soon as the last nurse they
touch is placed; the fairness epigraphs are resolved at the leaves from
the accumulated per-nurse partials. The search is exhaustive over the
feasible set, so the returned objective is the true optimum."""

import itertools
from fractions import Fraction

from rostra.catalog.elements import EpiMax
from rostra.catalog.ids import Kind
from rostra.catalog.registry import compile_stage
from rostra.solving.anneal import HeuristicError, _allowed_masks, _codes


class OracleBudgetExceeded(Exception):
    pass


def _term_level(cells):
    return max(ni for ni, _di in cells) if cells else 0


def enumerate_optimum(cfg, wishes, stage, leaf_cap=300_000):
    """Returns (best_objective, best_grid, feasible_count).

    best_objective is None when no feasible roster exists. Raises
    OracleBudgetExceeded when the candidate space is too large to sweep.
    """
    cs = compile_stage(stage, cfg, wishes)
    ctx = cs.ctx
    try:
        masks = _allowed_masks(cs)
    except HeuristicError:
        return None, None, 0  # an empty cell domain: no feasible roster
    n_nurses, n_days = len(ctx.nurses), ctx.num_days
    weights = cfg.weights

    hard_by_level = [[] for _ in range(n_nurses)]
    soft_by_level = [[] for _ in range(n_nurses)]
    epis = []
    for c in cs.constraints:
        if not c.enabled:
            continue
        for e in c.elements:
            if isinstance(e.body, EpiMax):
                epis.append((weights.weight(c.cid), e.body))
                continue
            cells = e.cells
            level = _term_level(cells) if cells else 0
            if c.cid.kind is Kind.HARD:
                hard_by_level[level].append(e)
            else:
                soft_by_level[level].append(
                    (weights.weight(c.cid) * e.mult, e.mult, c.cid, e))

    # candidate rows per nurse, filtered by single-nurse hard constraints
    grid = [[_codes(masks[ni][di])[0] for di in range(n_days)]
            for ni in range(n_nurses)]

    def rows_for(ni):
        options = [_codes(masks[ni][di]) for di in range(n_days)]
        single = [e for e in hard_by_level[ni]
                  if all(cni == ni for cni, _ in e.cells)]
        out = []
        for combo in itertools.product(*options):
            grid[ni] = list(combo)
            if all(e.body.violation(grid) == 0 for e in single):
                out.append(tuple(combo))
        return out

    rows = []
    total_leaves = 1
    for ni in range(n_nurses):
        r = rows_for(ni)
        if not r:
            return None, None, 0
        rows.append(r)
        total_leaves *= len(r)
        if total_leaves > leaf_cap:
            raise OracleBudgetExceeded(
                f"candidate space {total_leaves} exceeds {leaf_cap}")

    # rows_for already enforced the single-nurse terms; keep only the rest
    multi_hard = [
        [e for e in hard_by_level[level]
         if any(cni != level for cni, _ in e.cells)]
        for level in range(n_nurses)
    ]

    best = [None, None]
    feasible = [0]
    partials = {}
    level_partial_log = [[] for _ in range(n_nurses)]

    def eligible_ids(body):
        return [ctx.nurses[ni].id for ni in body.eligible]

    def dfs(level, cost_so_far):
        if level == n_nurses:
            feasible[0] += 1
            epi_cost = 0
            for w, body in epis:
                best_sum = 0
                for nid in eligible_ids(body):
                    s = sum(partials.get((m, nid), 0)
                            for m in body.member_cids)
                    if s > best_sum:
                        best_sum = s
                epi_cost += w * best_sum
            total = cost_so_far + epi_cost
            if best[0] is None or total < best[0]:
                best[0] = total
                best[1] = [row[:] for row in grid]
            return
        for row in rows[level]:
            grid[level] = list(row)
            if any(e.body.violation(grid) for e in multi_hard[level]):
                continue
            add = 0
            log = level_partial_log[level]
            log.clear()
            for w, mult, cid, e in soft_by_level[level]:
                raw = e.body.value(grid)
                if raw:
                    add += w * raw
                    if e.nurse is not None:
                        key = (cid, e.nurse)
                        contribution = mult * raw
                        partials[key] = partials.get(key, 0) + contribution
                        log.append((key, contribution))
            dfs(level + 1, cost_so_far + add)
            for key, contribution in log:
                partials[key] -= contribution
            log.clear()
        grid[level] = [_codes(masks[level][di])[0] for di in range(n_days)]

    dfs(0, 0)
    if best[0] is None:
        return None, None, feasible[0]
    return Fraction(best[0]), best[1], feasible[0]
