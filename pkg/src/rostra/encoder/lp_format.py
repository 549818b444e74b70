"""Instance text formats: LP and free-form MPS writers plus parsers.

The writers produce byte-stable output for identical instances (fixed
variable order, fixed number formatting). The parsers read back what the
writers emit (and the common subset produced by other tools), serving
both the round-trip tests and the bundled MILP backend."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .instance import IpInstance

LP_TEXT = "LP_TEXT"
MPS_TEXT = "MPS_TEXT"


class FormatError(ValueError):
    pass


def _num(x) -> str:
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return repr(float(f))


def _term(coeff, name, first: bool) -> str:
    c = Fraction(coeff)
    sign = "-" if c < 0 else ("" if first else "+")
    mag = abs(c)
    body = name if mag == 1 else f"{_num(mag)} {name}"
    return f"{sign} {body}" if sign and not first else (
        f"{sign}{body}" if first else body)


def _expr(coeffs, names) -> str:
    parts = []
    for i, (vi, c) in enumerate(coeffs):
        cf = Fraction(c)
        if i == 0:
            lead = "-" if cf < 0 else ""
            parts.append(f"{lead}{_coefname(abs(cf), names[vi])}")
        else:
            op = "-" if cf < 0 else "+"
            parts.append(f"{op} {_coefname(abs(cf), names[vi])}")
    return " ".join(parts)


def _coefname(mag: Fraction, name: str) -> str:
    return name if mag == 1 else f"{_num(mag)} {name}"


def write_instance(instance: IpInstance, fmt: str = LP_TEXT) -> bytes:
    if fmt == LP_TEXT:
        return _write_lp(instance)
    if fmt == MPS_TEXT:
        return _write_mps(instance)
    raise FormatError(f"unsupported format {fmt!r}")


def _write_lp(inst: IpInstance) -> bytes:
    names = [v.name for v in inst.vars]
    out = [f"\\ {inst.name}", "Minimize"]
    obj_terms = sorted(inst.objective.items())
    out.append(" obj: " + (_expr(obj_terms, names) if obj_terms else "0 " + names[0]))
    out.append("Subject To")
    for row in inst.rows:
        sense = {"<=": "<=", ">=": ">=", "=": "="}[row.sense]
        out.append(f" {row.name}: {_expr(row.coeffs, names)} {sense} {_num(row.rhs)}")
    out.append("Bounds")
    for v in inst.vars:
        if v.vtype == "B":
            fixed = v.fixed_to()
            if fixed is not None:
                out.append(f" {v.name} = {_num(fixed)}")
            elif v.lb == 1:
                out.append(f" {v.name} >= 1")
            elif v.ub == 0:
                out.append(f" {v.name} <= 0")
        else:
            lo = "0" if v.lb == 0 else ("-inf" if v.lb is None else _num(v.lb))
            hi = "+inf" if v.ub is None else _num(v.ub)
            out.append(f" {lo} <= {v.name} <= {hi}")
    binaries = [v.name for v in inst.vars if v.vtype == "B"]
    if binaries:
        out.append("Binaries")
        line = " "
        for name in binaries:
            if len(line) + len(name) > 78:
                out.append(line)
                line = " "
            line += name + " "
        out.append(line)
    out.append("End")
    return ("\n".join(out) + "\n").encode()


def _write_mps(inst: IpInstance) -> bytes:
    names = [v.name for v in inst.vars]
    out = [f"NAME {inst.name}", "ROWS", " N obj"]
    sense_tag = {"<=": "L", ">=": "G", "=": "E"}
    for row in inst.rows:
        out.append(f" {sense_tag[row.sense]} {row.name}")
    # column-major coefficients
    by_var: dict[int, list] = {}
    for row in inst.rows:
        for vi, c in row.coeffs:
            by_var.setdefault(vi, []).append((row.name, c))
    out.append("COLUMNS")
    in_int = False
    marker = 0
    for vi, v in enumerate(inst.vars):
        wants_int = v.vtype == "B"
        if wants_int != in_int:
            tag = "'INTORG'" if wants_int else "'INTEND'"
            out.append(f"    MARKER{marker} 'MARKER' {tag}")
            marker += 1
            in_int = wants_int
        entries = []
        if vi in inst.objective:
            entries.append(("obj", inst.objective[vi]))
        entries.extend(by_var.get(vi, []))
        if not entries:
            entries.append(("obj", 0))
        for rname, c in entries:
            out.append(f"    {v.name} {rname} {_num(c)}")
    if in_int:
        out.append(f"    MARKER{marker} 'MARKER' 'INTEND'")
    out.append("RHS")
    for row in inst.rows:
        if row.rhs != 0:
            out.append(f"    RHS {row.name} {_num(row.rhs)}")
    out.append("BOUNDS")
    for v in inst.vars:
        if v.vtype == "B":
            fixed = v.fixed_to()
            if fixed is not None:
                out.append(f" FX BND {v.name} {_num(fixed)}")
            else:
                out.append(f" BV BND {v.name}")
                if v.lb == 1:
                    out.append(f" LO BND {v.name} 1")
                elif v.ub == 0:
                    out.append(f" UP BND {v.name} 0")
        else:
            if v.lb is not None and v.lb != 0:
                out.append(f" LO BND {v.name} {_num(v.lb)}")
            if v.ub is not None:
                out.append(f" UP BND {v.name} {_num(v.ub)}")
            elif v.lb == 0:
                out.append(f" PL BND {v.name}")
    out.append("ENDATA")
    return ("\n".join(out) + "\n").encode()


# ---------------------------------------------------------------------------
# Parsing (reference parser for round trips and the bundled backend)
# ---------------------------------------------------------------------------


@dataclass
class ParsedProblem:
    minimize: bool = True
    objective: dict = field(default_factory=dict)   # name -> coeff (float)
    rows: list = field(default_factory=list)        # (name, {name: c}, sense, rhs)
    lb: dict = field(default_factory=dict)
    ub: dict = field(default_factory=dict)
    integer: set = field(default_factory=set)
    order: list = field(default_factory=list)       # variable order of appearance

    def touch(self, name):
        if name not in self.lb:
            self.lb[name] = 0.0
            self.ub[name] = float("inf")
            self.order.append(name)


_TERM_RE = re.compile(r"([+-]?)\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.\-]*)")


def _parse_expr(text: str, prob: ParsedProblem) -> dict:
    coeffs: dict = {}
    for sign, num, name in _TERM_RE.findall(text):
        c = float(num) if num else 1.0
        if sign == "-":
            c = -c
        coeffs[name] = coeffs.get(name, 0.0) + c
        prob.touch(name)
    return coeffs


def parse_lp(data: bytes) -> ParsedProblem:
    prob = ParsedProblem()
    section = None
    pending = ""  # name of a constraint continued across lines (not produced
    # by our writer, but cheap to support)
    for raw in data.decode().splitlines():
        line = raw.split("\\")[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("minimize", "maximize", "min", "max"):
            prob.minimize = low.startswith("min")
            section = "obj"
            continue
        if low in ("subject to", "st", "s.t."):
            section = "rows"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low in ("binaries", "binary", "bin"):
            section = "bin"
            continue
        if low in ("generals", "general", "gen"):
            section = "gen"
            continue
        if low == "end":
            break
        if section == "obj":
            body = line.split(":", 1)[1] if ":" in line else line
            for k, v in _parse_expr(body, prob).items():
                prob.objective[k] = prob.objective.get(k, 0.0) + v
        elif section == "rows":
            if ":" in line:
                rname, body = line.split(":", 1)
                rname = rname.strip()
            else:
                rname, body = f"r{len(prob.rows)}", line
            m = re.search(r"(<=|>=|=)\s*([+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$", body)
            if not m:
                raise FormatError(f"cannot parse row: {raw!r}")
            sense, rhs = m.group(1), float(m.group(2))
            coeffs = _parse_expr(body[: m.start()], prob)
            prob.rows.append((rname, coeffs, sense, rhs))
        elif section == "bounds":
            _parse_bound_line(line, prob)
        elif section in ("bin", "gen"):
            for name in line.split():
                prob.touch(name)
                prob.integer.add(name)
                if section == "bin":
                    prob.lb.setdefault(name, 0.0)
                    prob.lb[name] = max(prob.lb[name], 0.0)
                    prob.ub[name] = min(prob.ub.get(name, 1.0), 1.0)
    _ = pending
    return prob


def _parse_bound_line(line: str, prob: ParsedProblem):
    def val(tok: str) -> float:
        t = tok.lower().lstrip("+")
        if t in ("inf", "infinity"):
            return float("inf")
        if t in ("-inf", "-infinity"):
            return float("-inf")
        return float(tok)

    parts = line.replace("<=", " <= ").replace(">=", " >= ").split()
    if "free" in [p.lower() for p in parts]:
        name = parts[0]
        prob.touch(name)
        prob.lb[name], prob.ub[name] = float("-inf"), float("inf")
        return
    if "<=" in parts:
        idx = [i for i, p in enumerate(parts) if p == "<="]
        if len(idx) == 2:  # lo <= x <= hi
            lo, name, hi = parts[0], parts[2], parts[4]
            prob.touch(name)
            prob.lb[name], prob.ub[name] = val(lo), val(hi)
        else:  # x <= hi
            name, hi = parts[0], parts[2]
            prob.touch(name)
            prob.ub[name] = val(hi)
    elif ">=" in parts:
        name, lo = parts[0], parts[2]
        prob.touch(name)
        prob.lb[name] = val(lo)
    elif "=" in parts:
        i = parts.index("=")
        name, v = parts[0], parts[i + 1]
        prob.touch(name)
        prob.lb[name] = prob.ub[name] = val(v)
    else:
        raise FormatError(f"cannot parse bound: {line!r}")


def parse_mps(data: bytes) -> ParsedProblem:
    prob = ParsedProblem()
    section = None
    senses: dict[str, str] = {}
    row_order: list[str] = []
    obj_row = None
    rows: dict[str, dict] = {}
    rhs: dict[str, float] = {}
    in_int = False
    for raw in data.decode().splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            section = raw.split()[0].upper()
            continue
        parts = raw.split()
        if section == "ROWS":
            tag, name = parts[0].upper(), parts[1]
            if tag == "N":
                obj_row = obj_row or name
            else:
                senses[name] = {"L": "<=", "G": ">=", "E": "="}[tag]
                row_order.append(name)
                rows[name] = {}
        elif section == "COLUMNS":
            if len(parts) >= 3 and parts[1] == "'MARKER'":
                in_int = parts[2] == "'INTORG'"
                continue
            name = parts[0]
            prob.touch(name)
            if in_int:
                prob.integer.add(name)
            for rname, cval in zip(parts[1::2], parts[2::2]):
                c = float(cval)
                if rname == obj_row:
                    prob.objective[name] = prob.objective.get(name, 0.0) + c
                else:
                    rows[rname][name] = rows[rname].get(name, 0.0) + c
        elif section == "RHS":
            for rname, cval in zip(parts[1::2], parts[2::2]):
                rhs[rname] = float(cval)
        elif section == "BOUNDS":
            tag, _bnd, name = parts[0].upper(), parts[1], parts[2]
            prob.touch(name)
            v = float(parts[3]) if len(parts) > 3 else 0.0
            if tag == "UP":
                prob.ub[name] = v
            elif tag == "LO":
                prob.lb[name] = v
            elif tag == "FX":
                prob.lb[name] = prob.ub[name] = v
            elif tag == "BV":
                prob.integer.add(name)
                prob.lb[name], prob.ub[name] = 0.0, 1.0
            elif tag == "PL":
                prob.ub[name] = float("inf")
            elif tag == "MI":
                prob.lb[name] = float("-inf")
            elif tag == "FR":
                prob.lb[name], prob.ub[name] = float("-inf"), float("inf")
    for rname in row_order:
        prob.rows.append((rname, rows[rname], senses[rname], rhs.get(rname, 0.0)))
    return prob


def parse_instance_file(data: bytes) -> ParsedProblem:
    head = data.lstrip()[:64].decode(errors="replace").upper()
    if head.startswith("NAME") or head.startswith("ROWS"):
        return parse_mps(data)
    return parse_lp(data)
