"""Bundled MILP backend: solve an LP/MPS file and write a CBC-style
solution file.

Usage:  python -m rostra.solving.milp_backend INSTANCE SOLUTION
            [--time-limit SECONDS]

This is the default external-solver command for the subprocess adapter,
backed by the HiGHS engine inside scipy. Real cbc/cplex binaries can be
swapped in through the same adapter without code changes."""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from ..encoder.lp_format import ParsedProblem, parse_instance_file


def solve_parsed(prob: ParsedProblem, time_limit: float | None = None):
    names = prob.order
    idx = {n: i for i, n in enumerate(names)}
    n = len(names)
    c = np.zeros(n)
    for name, coef in prob.objective.items():
        c[idx[name]] = coef
    if not prob.minimize:
        c = -c
    integrality = np.zeros(n)
    for name in prob.integer:
        integrality[idx[name]] = 1
    lb = np.array([prob.lb[name] for name in names])
    ub = np.array([prob.ub[name] for name in names])

    constraints = []
    if prob.rows:
        data, indices, indptr = [], [], [0]
        lo, hi = [], []
        for _rname, coeffs, sense, rhs in prob.rows:
            for vname, coef in coeffs.items():
                data.append(coef)
                indices.append(idx[vname])
            indptr.append(len(data))
            if sense == "<=":
                lo.append(-np.inf)
                hi.append(rhs)
            elif sense == ">=":
                lo.append(rhs)
                hi.append(np.inf)
            else:
                lo.append(rhs)
                hi.append(rhs)
        a = csr_matrix((data, indices, indptr), shape=(len(prob.rows), n))
        constraints.append(LinearConstraint(a, lo, hi))

    options = {"mip_rel_gap": 0.0}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = milp(c=c, constraints=constraints, integrality=integrality,
               bounds=Bounds(lb, ub), options=options)
    return res, names


def write_solution(path: str, res, names, minimize: bool):
    # CBC solution layout: status line, then "index name value reduced".
    if res.status == 0:
        obj = res.fun if minimize else -res.fun
        header = f"Optimal - objective value {obj:.8f}"
    elif res.status == 1 and res.x is not None:
        obj = res.fun if minimize else -res.fun
        header = f"Stopped on time limit - objective value {obj:.8f}"
    elif res.status == 2:
        header = "Infeasible - objective value 0.00000000"
    elif res.status == 3:
        header = "Unbounded"
    else:
        header = f"Stopped - {res.message}"
    lines = [header]
    if res.x is not None:
        for i, name in enumerate(names):
            lines.append(f"{i:7d} {name} {res.x[i]:.10g} 0")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rostra-milp")
    ap.add_argument("instance")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args(argv)
    with open(args.instance, "rb") as fh:
        prob = parse_instance_file(fh.read())
    res, names = solve_parsed(prob, args.time_limit)
    write_solution(args.solution, res, names, prob.minimize)
    return 0


if __name__ == "__main__":
    sys.exit(main())
