"""Read and write models in the CPLEX-style LP text format.

The writer is byte-deterministic: variables appear in declaration order in the
objective (zero coefficients included, so the parser recovers the declaration
order), rows in insertion order, one ``\\ tag: <tag>`` comment before each
tagged row and a ``\\ bigM <tag> <value>`` comment per registered big-M.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

from .milp import BINARY, CONTINUOUS, EQ, GE, LE, MilpModel, ModelError

_TERMS_PER_LINE = 8

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<op><=|>=|=<|=>|<|>|=)
      | (?P<sign>[+-])
      | (?P<name>[A-Za-z_!"\#$%&()/,.;?@`'{}|~\[\]][^\s:+\-<>=]*)(?P<colon>:)?
    )""",
    re.VERBOSE,
)

_SENSE_MAP = {"<=": LE, "=<": LE, "<": LE, ">=": GE, "=>": GE, ">": GE, "=": EQ}


class LpParseError(ValueError):
    pass


def _num(x: float) -> str:
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _terms(terms) -> list[str]:
    out = []
    for name, coef in terms:
        sign = "-" if coef < 0 or (coef == 0 and math.copysign(1, coef) < 0) else "+"
        out.append(f"{sign} {_num(abs(coef))} {name}")
    return out


def _wrap(head: str, parts: list[str], tail: str = "") -> list[str]:
    lines = []
    for k in range(0, max(len(parts), 1), _TERMS_PER_LINE):
        chunk = " ".join(parts[k:k + _TERMS_PER_LINE])
        lines.append((head if k == 0 else "   ") + chunk)
    if tail:
        lines[-1] = lines[-1] + " " + tail
    return lines


def write_lp(model: MilpModel) -> str:
    names = [v.name for v in model.variables]
    out = [f"\\ model: {model.name}"]
    for tag, val in model.big_m_registry.items():
        out.append(f"\\ bigM {tag} {_num(val)}")
    out.append("Minimize")
    obj = [(v.name, v.objective_coeff) for v in model.variables]
    out.extend(_wrap(" obj: ", _terms(obj)))
    out.append("Subject To")
    for c in model.constraints:
        if c.tag:
            out.append(f"\\ tag: {c.tag}")
        parts = _terms([(names[v], a) for v, a in c.terms])
        if not parts:
            parts = ["+ 0 " + names[0]] if names else []
        op = {LE: "<=", GE: ">=", EQ: "="}[c.sense]
        out.extend(_wrap(f" {c.name}: ", parts, f"{op} {_num(c.rhs)}"))
    out.append("Bounds")
    for v in model.variables:
        if v.lower == -math.inf and v.upper == math.inf:
            out.append(f" {v.name} free")
        else:
            out.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
    bins = [v.name for v in model.variables if v.kind == BINARY]
    if bins:
        out.append("Binaries")
        for k in range(0, len(bins), _TERMS_PER_LINE):
            out.append(" " + " ".join(bins[k:k + _TERMS_PER_LINE]))
    out.append("End")
    return "\n".join(out) + "\n"


def save_lp(model: MilpModel, path) -> None:
    Path(path).write_text(write_lp(model))


def _tokenize(text: str, lineno: int):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LpParseError(f"line {lineno}: cannot tokenize {text[pos:]!r}")
        pos = m.end()
        if m.group("num") is not None:
            toks.append(("num", float(m.group("num"))))
        elif m.group("op") is not None:
            toks.append(("op", m.group("op")))
        elif m.group("sign") is not None:
            toks.append(("sign", m.group("sign")))
        else:
            name = m.group("name")
            if m.group("colon"):
                toks.append(("label", name))
            elif name.lower() in ("inf", "infinity"):
                toks.append(("num", math.inf))
            else:
                toks.append(("name", name))
    return toks


def _linear(toks, lineno):
    """Parse ``[+|-] [coef] name ...`` into (name, coef) pairs."""
    terms = []
    sign, coef = 1.0, None
    for kind, val in toks:
        if kind == "sign":
            sign = -sign if val == "-" else sign
        elif kind == "num":
            coef = val if coef is None else coef * val
        elif kind == "name":
            terms.append((val, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
        else:
            raise LpParseError(f"line {lineno}: unexpected {val!r} in linear expression")
    if coef is not None:
        raise LpParseError(f"line {lineno}: dangling constant {coef}")
    return terms


_SECTIONS = {
    "minimize": "obj", "minimise": "obj", "minimum": "obj", "min": "obj",
    "subject to": "rows", "such that": "rows", "st": "rows", "s.t.": "rows",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "end": "end",
}


def parse_lp(text: str) -> MilpModel:
    """Parse LP text produced by :func:`write_lp` (or compatible hand input)."""
    model = MilpModel()
    order: list[str] = []
    seen: dict[str, int] = {}
    section = None
    pending_tag = ""
    stmt: list = []
    stmt_line = 0
    obj_terms: list[tuple[str, float]] = []
    rows: list[tuple[str | None, list, str, float, str]] = []
    bounds: dict[str, list[float]] = {}
    binaries: list[str] = []

    def touch(name):
        if name not in seen:
            seen[name] = len(order)
            order.append(name)

    def flush_row():
        nonlocal stmt, pending_tag
        if not stmt:
            return
        label = None
        toks = stmt
        if toks[0][0] == "label":
            label, toks = toks[0][1], toks[1:]
        ops = [k for k, (kind, _) in enumerate(toks) if kind == "op"]
        if len(ops) != 1:
            raise LpParseError(f"line {stmt_line}: row needs exactly one relational operator")
        k = ops[0]
        lhs = _linear(toks[:k], stmt_line)
        rhs_toks = toks[k + 1:]
        sign = 1.0
        rhs = None
        for kind, val in rhs_toks:
            if kind == "sign":
                sign = -sign if val == "-" else sign
            elif kind == "num" and rhs is None:
                rhs = sign * val
            else:
                raise LpParseError(f"line {stmt_line}: malformed right-hand side")
        if rhs is None:
            raise LpParseError(f"line {stmt_line}: missing right-hand side")
        for name, _ in lhs:
            touch(name)
        rows.append((label, lhs, _SENSE_MAP[toks[k][1]], rhs, pending_tag))
        pending_tag = ""
        stmt = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            body = line[1:].strip()
            if body.startswith("tag:"):
                pending_tag = body[4:].strip()
            elif body.startswith("bigM "):
                _, tag, val = body.split()
                model.big_m_registry[tag] = float(val)
            elif body.startswith("model:"):
                model.name = body[6:].strip()
            continue
        key = line.lower()
        if key in _SECTIONS:
            if section == "rows":
                flush_row()
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section is None:
            raise LpParseError(f"line {lineno}: content before any section header")
        toks = _tokenize(line, lineno)
        if section == "obj":
            if toks and toks[0][0] == "label":
                toks = toks[1:]
            for name, coef in _linear(toks, lineno):
                touch(name)
                obj_terms.append((name, coef))
        elif section == "rows":
            if toks and toks[0][0] == "label" and stmt:
                flush_row()
            if not stmt:
                stmt_line = lineno
            stmt.extend(toks)
            ops_done = [t for t in stmt if t[0] == "op"]
            if ops_done and stmt[-1][0] == "num":
                flush_row()
        elif section == "bounds":
            _parse_bound(toks, lineno, bounds, touch)
        elif section == "bin":
            for kind, val in toks:
                if kind != "name":
                    raise LpParseError(f"line {lineno}: expected variable names")
                touch(val)
                binaries.append(val)
    if section != "end":
        flush_row()

    binset = set(binaries)
    for name in order:
        lo, hi = bounds.get(name, [0.0, math.inf])
        kind = BINARY if name in binset else CONTINUOUS
        if kind == BINARY and name not in bounds:
            lo, hi = 0.0, 1.0
        try:
            model.add_variable(name, kind, lo, hi)
        except ModelError as exc:
            raise LpParseError(str(exc)) from exc
    for name, coef in obj_terms:
        v = model.variables[seen[name]]
        v.objective_coeff += coef
    for label, lhs, sense, rhs, tag in rows:
        merged: dict[int, float] = {}
        for name, coef in lhs:
            merged[seen[name]] = merged.get(seen[name], 0.0) + coef
        terms = [(k, a) for k, a in merged.items() if a != 0.0]
        model.add_constraint(terms, sense, rhs, tag=tag, name=label)
    return model


def _parse_bound(toks, lineno, bounds, touch):
    vals = []
    sign = 1.0
    for kind, val in toks:
        if kind == "sign":
            sign = -sign if val == "-" else sign
        elif kind == "num":
            vals.append(("num", sign * val))
            sign = 1.0
        else:
            vals.append((kind, val))
    if len(vals) == 2 and vals[0][0] == "name" and vals[1] == ("name", "free"):
        touch(vals[0][1])
        bounds[vals[0][1]] = [-math.inf, math.inf]
        return
    names = [v for k, v in vals if k == "name"]
    if len(names) != 1:
        raise LpParseError(f"line {lineno}: bound line must name exactly one variable")
    name = names[0]
    touch(name)
    lo, hi = bounds.get(name, [0.0, math.inf])
    if len(vals) == 5:
        (k0, l), (_, op1), _, (_, op2), (k4, u) = vals
        if k0 != "num" or k4 != "num":
            raise LpParseError(f"line {lineno}: malformed double bound")
        lo, hi = l, u
    elif len(vals) == 3:
        a, (_, op), b = vals
        if a[0] == "name":
            sense, val = _SENSE_MAP[op], b[1]
        else:
            sense, val = {LE: GE, GE: LE, EQ: EQ}[_SENSE_MAP[op]], a[1]
        if sense == LE:
            hi = val
        elif sense == GE:
            lo = val
        else:
            lo = hi = val
    else:
        raise LpParseError(f"line {lineno}: unrecognized bound statement")
    bounds[name] = [lo, hi]


def load_lp(path) -> MilpModel:
    return parse_lp(Path(path).read_text())
