"""0-1 program container.

Variables are binaries x_{nurse,day,shift} plus constraint auxiliaries
(pattern indicator binaries, continuous penalty slacks, epigraph
variables). Rows are single-sense linear constraints. The name map is
total and invertible: every variable carries structured metadata so
solutions and probe slacks can be mapped back to cells and constraint
ids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class VarDef:
    name: str
    vtype: str            # "B" binary, "C" continuous
    lb: object = 0        # numbers; None = -inf
    ub: object = 1        # None = +inf
    meta: tuple = ()      # ("x", nid, date, shift) | ("slack"|"ind"|"epi", cid, nurse, date, note)

    def fixed_to(self):
        if self.lb is not None and self.lb == self.ub:
            return self.lb
        return None


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple         # ((var_index, coefficient), ...)
    sense: str            # "<=", ">=", "="
    rhs: object


@dataclass
class IpInstance:
    name: str
    stage: str
    vars: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)   # var_index -> coeff
    var_index: dict = field(default_factory=dict)   # name -> index
    meta: dict = field(default_factory=dict)        # instance-level notes

    def add_var(self, v: VarDef) -> int:
        if v.name in self.var_index:
            raise EncodingError(f"duplicate variable {v.name}")
        self.vars.append(v)
        i = len(self.vars) - 1
        self.var_index[v.name] = i
        return i

    def add_row(self, name, coeffs, sense, rhs):
        merged = {}
        for vi, c in coeffs:
            merged[vi] = merged.get(vi, 0) + c
        tidy = tuple((vi, c) for vi, c in merged.items() if c != 0)
        self.rows.append(Row(name, tidy, sense, rhs))

    def add_objective(self, vi: int, coeff):
        if coeff:
            self.objective[vi] = self.objective.get(vi, 0) + coeff

    def set_bounds(self, vi: int, lb=None, ub=None):
        v = self.vars[vi]
        self.vars[vi] = replace(
            v,
            lb=v.lb if lb is None else lb,
            ub=v.ub if ub is None else ub,
        )

    # -- queries ---------------------------------------------------------------

    def x_name(self, ni: int, di: int, code: int) -> str:
        return f"x_{ni}_{di}_{code}"

    def x_index(self, ni: int, di: int, code: int) -> int:
        return self.var_index[self.x_name(ni, di, code)]

    def num_binary(self) -> int:
        return sum(1 for v in self.vars if v.vtype == "B")

    def free_binaries(self) -> int:
        return sum(1 for v in self.vars
                   if v.vtype == "B" and v.fixed_to() is None)

    def objective_value(self, values) -> Fraction:
        return sum(
            (Fraction(c) * Fraction(values[vi])
             for vi, c in self.objective.items()),
            Fraction(0),
        )

    def copy(self) -> "IpInstance":
        inst = IpInstance(self.name, self.stage)
        inst.vars = list(self.vars)
        inst.rows = list(self.rows)
        inst.objective = dict(self.objective)
        inst.var_index = dict(self.var_index)
        inst.meta = dict(self.meta)
        return inst
