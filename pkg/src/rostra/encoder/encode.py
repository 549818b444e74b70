"""Compile a stage into a 0-1 program.

Every compiled catalog element maps to rows in a fixed way:

  CellDomain     variable bounds (probe mode: coverage row with a slack)
  LinearHard     one row per bounded side (probe mode: shared slack)
  Indicator      binary s with  sum >= k*s  and  sum <= k-1+s
  Shortfall      slack p with   p + sum >= bound
  Excess         slack p with   p - sum >= -bound
  Min/MaxExcess  one slack covering both branch rows
  IndHardGe      indicator-sum row (probe mode: slack)
  EpiMax         epigraph z with one row per eligible nurse

Soft slacks enter the objective at weight(cid) * mult; in probe mode hard
slacks enter instead (wish fixings far above the structural families) and
the soft objective is dropped, so the probe optimum is zero exactly when
the hard conjunction is satisfiable."""

from __future__ import annotations

import datetime as dt
from fractions import Fraction

from ..catalog.elements import (
    CellDomain,
    Element,
    EpiMax,
    Excess,
    IndHardGe,
    Indicator,
    IndExcess,
    IndShortfall,
    LinearHard,
    MaxExcess,
    MinShortfall,
    Shortfall,
)
from ..catalog.ids import Kind, Stage
from ..catalog.registry import CompiledStage, compile_stage
from ..roster import Roster
from ..shifts import NUM_SHIFTS, SHIFT_BY_CODE, Shift
from ..staff import (
    DEFAULT_PROBE_FIX_WEIGHT,
    DEFAULT_PROBE_WEIGHT,
    WardConfig,
)
from .instance import EncodingError, IpInstance, VarDef


def _cid_key(cid) -> str:
    return str(cid).replace("-", "")


class _StageEncoder:
    def __init__(self, cs: CompiledStage, probe_mode: bool,
                 probe_weight=DEFAULT_PROBE_WEIGHT,
                 probe_fix_weight=DEFAULT_PROBE_FIX_WEIGHT):
        self.cs = cs
        self.ctx = cs.ctx
        self.probe = probe_mode
        self.probe_weight = probe_weight
        self.probe_fix_weight = probe_fix_weight
        self.inst = IpInstance(
            name=f"rostra_{cs.stage.name.lower()}" + ("_probe" if probe_mode else ""),
            stage=cs.stage.name,
        )
        self.inst.meta["probe_mode"] = probe_mode
        self._row_seq = 0
        # (cid, nurse) -> [(slack var, mult)], feeding the epigraph rows
        self._elements_by_cid_nurse: dict = {}

    # -- naming ------------------------------------------------------------

    def _rname(self, prefix: str) -> str:
        self._row_seq += 1
        return f"{prefix}_{self._row_seq}"

    # -- variables ------------------------------------------------------------

    def build_x_grid(self):
        cal = self.ctx.cal
        for ni, n in enumerate(self.ctx.nurses):
            for di, d in enumerate(cal.days):
                for code in range(NUM_SHIFTS):
                    self.inst.add_var(VarDef(
                        name=self.inst.x_name(ni, di, code), vtype="B",
                        meta=("x", n.id, d, SHIFT_BY_CODE[code].value)))
        # one symbol per cell: the assignment equalities are the
        # "exactly one symbol" hard family and always stay hard
        assign_cid = "Hn-S-14" if self.cs.stage is Stage.NIGHT else "Hd-S-9"
        for ni in range(len(self.ctx.nurses)):
            for di in range(len(cal.days)):
                coeffs = [(self.inst.x_index(ni, di, c), 1)
                          for c in range(NUM_SHIFTS)]
                self.inst.add_row(f"assign_{ni}_{di}", coeffs, "=", 1)
        self.inst.meta["assignment_cid"] = assign_cid

    def _slack(self, cid, e: Element, weight) -> int:
        vi = self.inst.add_var(VarDef(
            name=f"p_{_cid_key(cid)}_{self._row_seq}", vtype="C",
            lb=0, ub=None,
            meta=("slack", str(cid), e.nurse, e.date, e.note)))
        self._row_seq += 1
        if weight:
            self.inst.add_objective(vi, weight)
        return vi

    def _indicator(self, cid, ind: Indicator, tag: str) -> int:
        vi = self.inst.add_var(VarDef(
            name=f"s_{_cid_key(cid)}_{tag}", vtype="B",
            meta=("ind", str(cid), None, None, "")))
        k = len(ind.pieces)
        coeffs = self._piece_coeffs(ind.pieces)
        self.inst.add_row(self._rname(f"ind_lo_{_cid_key(cid)}"),
                          coeffs + [(vi, -k)], ">=", 0)
        self.inst.add_row(self._rname(f"ind_hi_{_cid_key(cid)}"),
                          coeffs + [(vi, -1)], "<=", k - 1)
        return vi

    def _piece_coeffs(self, pieces):
        out = []
        for ni, di, mask in pieces:
            for code in range(NUM_SHIFTS):
                if (mask >> code) & 1:
                    out.append((self.inst.x_index(ni, di, code), 1))
        return out

    # -- hard elements ----------------------------------------------------------

    def _encode_hard(self, cid, e: Element):
        body = e.body
        if isinstance(body, CellDomain):
            if self.probe:
                w = self.probe_fix_weight if body.from_wish else self.probe_weight
                p = self._slack(cid, e, w)
                coeffs = self._piece_coeffs(((body.ni, body.di, body.mask),))
                self.inst.add_row(self._rname(f"dom_{_cid_key(cid)}"),
                                  coeffs + [(p, 1)], ">=", 1)
            else:
                for code in range(NUM_SHIFTS):
                    allowed = (body.mask >> code) & 1
                    vi = self.inst.x_index(body.ni, body.di, code)
                    if not allowed:
                        self.inst.set_bounds(vi, ub=0)
                # a singleton domain pins the cell
                if body.mask.bit_count() == 1:
                    code = body.mask.bit_length() - 1
                    self.inst.set_bounds(
                        self.inst.x_index(body.ni, body.di, code), lb=1)
        elif isinstance(body, LinearHard):
            coeffs = self._piece_coeffs(body.pieces)
            p = self._slack(cid, e, self.probe_weight) if self.probe else None
            if body.lo is not None:
                cs = coeffs + ([(p, 1)] if p is not None else [])
                self.inst.add_row(self._rname(f"h_{_cid_key(cid)}"),
                                  cs, ">=", body.lo)
            if body.hi is not None:
                cs = coeffs + ([(p, -1)] if p is not None else [])
                self.inst.add_row(self._rname(f"h_{_cid_key(cid)}"),
                                  cs, "<=", body.hi)
        elif isinstance(body, IndHardGe):
            svars = [(self._indicator(cid, ind, f"{self._row_seq}_{k}"), 1)
                     for k, ind in enumerate(body.indicators)]
            if self.probe:
                p = self._slack(cid, e, self.probe_weight)
                svars = svars + [(p, 1)]
            self.inst.add_row(self._rname(f"h_{_cid_key(cid)}"),
                              svars, ">=", body.bound)
        else:
            raise EncodingError(f"unsupported hard element {type(body).__name__}")

    # -- soft elements --------------------------------------------------------

    def _encode_soft(self, cid, e: Element, weight):
        body = e.body
        w = weight * e.mult
        p = self._slack(cid, e, w)
        rname = f"s_{_cid_key(cid)}"
        if isinstance(body, Shortfall):
            self.inst.add_row(self._rname(rname),
                              self._piece_coeffs(body.pieces) + [(p, 1)],
                              ">=", body.bound)
        elif isinstance(body, Excess):
            coeffs = [(vi, -c) for vi, c in self._piece_coeffs(body.pieces)]
            self.inst.add_row(self._rname(rname), coeffs + [(p, 1)],
                              ">=", -body.bound)
        elif isinstance(body, MinShortfall):
            for pieces in (body.a, body.b):
                self.inst.add_row(self._rname(rname),
                                  self._piece_coeffs(pieces) + [(p, 1)],
                                  ">=", body.bound)
        elif isinstance(body, MaxExcess):
            for pieces in (body.a, body.b):
                coeffs = [(vi, -c) for vi, c in self._piece_coeffs(pieces)]
                self.inst.add_row(self._rname(rname), coeffs + [(p, 1)],
                                  ">=", -body.bound)
        elif isinstance(body, (IndShortfall, IndExcess)):
            svars = [(self._indicator(cid, ind, f"{self._row_seq}_{k}"), 1)
                     for k, ind in enumerate(body.indicators)]
            if isinstance(body, IndShortfall):
                self.inst.add_row(self._rname(rname), svars + [(p, 1)],
                                  ">=", body.bound)
            else:
                coeffs = [(vi, -c) for vi, c in svars]
                self.inst.add_row(self._rname(rname), coeffs + [(p, 1)],
                                  ">=", -body.bound)
        else:
            raise EncodingError(f"unsupported soft element {type(body).__name__}")
        # track per (cid, nurse) for the epigraph rows
        if e.nurse is not None:
            self._elements_by_cid_nurse.setdefault(
                (cid, e.nurse), []).append((p, e.mult))

    def _encode_epigraph(self, cid, body: EpiMax, weight):
        z = self.inst.add_var(VarDef(
            name=f"z_{_cid_key(cid)}", vtype="C", lb=0, ub=None,
            meta=("epi", str(cid), None, None, "")))
        if weight:
            self.inst.add_objective(z, weight)
        for ni in body.eligible:
            nid = self.ctx.nurses[ni].id
            coeffs = [(z, 1)]
            for member in body.member_cids:
                for slack_vi, mult in self._elements_by_cid_nurse.get(
                        (member, nid), []):
                    coeffs.append((slack_vi, -mult))
            if len(coeffs) > 1:
                self.inst.add_row(self._rname(f"epi_{_cid_key(cid)}"),
                                  coeffs, ">=", 0)

    # -- main ------------------------------------------------------------------

    def encode(self) -> IpInstance:
        self.build_x_grid()
        weights = self.cs.cfg.weights
        epigraphs = []
        for c in self.cs.constraints:
            if not c.enabled:
                continue
            if c.cid.kind is Kind.HARD:
                for e in c.elements:
                    self._encode_hard(c.cid, e)
            elif not self.probe:
                w = weights.weight(c.cid)
                for e in c.elements:
                    if isinstance(e.body, EpiMax):
                        epigraphs.append((c.cid, e.body, w))
                    else:
                        self._encode_soft(c.cid, e, w)
        for cid, body, w in epigraphs:
            self._encode_epigraph(cid, body, w)
        self._check_domains()
        return self.inst

    def _check_domains(self):
        """Surface contradictory fixings with cell coordinates."""
        if self.probe:
            return
        conflicts = []
        for v in self.inst.vars:
            if v.meta and v.meta[0] == "x" and v.lb == 1 and v.ub == 0:
                conflicts.append((v.meta[1], v.meta[2], v.meta[3]))
        if conflicts:
            spots = ", ".join(f"({nid}, {d}, {s})" for nid, d, s in conflicts)
            raise EncodingError(f"contradictory fixings at {spots}")


def encode_stage(stage: Stage, cfg: WardConfig, wishes: Roster,
                 probe_mode: bool = False,
                 compiled: CompiledStage | None = None,
                 probe_weight=DEFAULT_PROBE_WEIGHT,
                 probe_fix_weight=DEFAULT_PROBE_FIX_WEIGHT) -> IpInstance:
    """Build the 0-1 program for one stage against a wish roster."""
    cs = compiled if compiled is not None else compile_stage(stage, cfg, wishes)
    enc = _StageEncoder(cs, probe_mode, probe_weight, probe_fix_weight)
    return enc.encode()


def fix_cells(instance: IpInstance, fixings) -> IpInstance:
    """Pin (nurse, date, shift) cells to 1 in a copy of the instance.

    Raises with cell coordinates when a fixing contradicts an existing
    bound or an earlier fixing on the same cell."""
    inst = instance.copy()
    seen = {}
    for nid, d, shift in fixings:
        key = (nid, d)
        if key in seen and seen[key] is not shift:
            raise EncodingError(
                f"cell ({nid}, {d}) fixed to both {seen[key].value} "
                f"and {shift.value}")
        seen[key] = shift
        target = None
        siblings = []
        for vi, v in enumerate(inst.vars):
            if not v.meta or v.meta[0] != "x":
                continue
            if v.meta[1] == nid and v.meta[2] == d:
                if v.meta[3] == shift.value:
                    target = vi
                else:
                    siblings.append(vi)
        if target is None:
            raise EncodingError(f"cell ({nid}, {d}) not in the instance")
        if inst.vars[target].ub == 0:
            raise EncodingError(
                f"fixing ({nid}, {d}) to {shift.value} violates an "
                f"existing bound")
        inst.set_bounds(target, lb=1)
        for vi in siblings:
            if inst.vars[vi].lb == 1:
                raise EncodingError(
                    f"cell ({nid}, {d}) already fixed to "
                    f"{inst.vars[vi].meta[3]}, cannot also fix {shift.value}")
            inst.set_bounds(vi, ub=0)
    return inst


def roster_from_solution(instance: IpInstance, values,
                         base: Roster) -> Roster:
    """Rebuild a roster from solved x values through the metadata map."""
    from ..roster import Provenance

    cells = {}
    for vi, v in enumerate(instance.vars):
        if not v.meta or v.meta[0] != "x":
            continue
        if values[vi] > 0.5:
            _, nid, d, shift_token = v.meta
            key = (nid, d)
            if key in cells:
                raise EncodingError(f"two symbols solved for cell {key}")
            cells[key] = Shift(shift_token)
    return base.with_cells(
        {k: s for k, s in cells.items() if base.cells.get(k) != s},
        prov=Provenance.SOLVED,
    )
