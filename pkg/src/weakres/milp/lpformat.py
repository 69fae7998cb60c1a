"""LP file format: export for external solvers plus an internal reader.

The writer emits the widely understood CPLEX-style LP text layout
(Minimize/Maximize, Subject To, Bounds, Generals, Binaries, End).  Every
variable gets an explicit Bounds line in declaration order, so the paired
reader can reconstruct the problem exactly, including variable order; the
reader is a conformance checker for the writer's output (one row per line,
space-separated tokens), not a general LP parser.
"""

from __future__ import annotations

import re

from ..errors import EncodingError, ParseError
from .problem import (BINARY, CONTINUOUS, INTEGER, Constraint, MilpProblem,
                      Objective, ProblemBuilder)

_NAME_RE = re.compile(r"^[A-Za-z_]\w*$")


def _num(value: float) -> str:
    if value == float("inf"):
        return "+infinity"
    if value == float("-inf"):
        return "-infinity"
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _expr(coeffs, const: float = 0.0) -> str:
    parts: list[str] = []
    for name, coef in coeffs:
        if not parts:
            parts.append(f"- {_num(-coef)} {name}" if coef < 0
                         else f"{_num(coef)} {name}")
        elif coef < 0:
            parts.append(f"- {_num(-coef)} {name}")
        else:
            parts.append(f"+ {_num(coef)} {name}")
    if const != 0.0:
        if not parts:
            parts.append(_num(const))
        elif const < 0:
            parts.append(f"- {_num(-const)}")
        else:
            parts.append(f"+ {_num(const)}")
    return " ".join(parts)


def export_lp(problem: MilpProblem) -> str:
    """Render a problem as LP-format text."""
    lines: list[str] = []
    lines.append("Maximize" if problem.objective.sense == "max" else "Minimize")
    lines.append(f" obj: {_expr(problem.objective.coeffs, problem.objective.const)}")
    lines.append("Subject To")
    for i, row in enumerate(problem.constraints):
        if not row.coeffs:
            raise EncodingError("cannot export a constraint with no terms")
        label = row.label or f"c{i}"
        if not _NAME_RE.match(label):
            raise EncodingError(f"constraint label {label!r} is not exportable")
        lines.append(f" {label}: {_expr(row.coeffs)} {row.relation} {_num(row.rhs)}")
    lines.append("Bounds")
    for v in problem.variables:
        if v.lo == float("-inf") and v.hi == float("inf"):
            lines.append(f" {v.name} free")
        elif v.lo == v.hi:
            lines.append(f" {v.name} = {_num(v.lo)}")
        else:
            lines.append(f" {_num(v.lo)} <= {v.name} <= {_num(v.hi)}")
    generals = [v.name for v in problem.variables if v.kind == INTEGER]
    if generals:
        lines.append("Generals")
        lines.extend(f" {name}" for name in generals)
    binaries = [v.name for v in problem.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTIONS = {
    "minimize": "objective-min",
    "maximize": "objective-max",
    "subject to": "rows",
    "bounds": "bounds",
    "generals": "generals",
    "general": "generals",
    "integers": "generals",
    "binaries": "binaries",
    "binary": "binaries",
    "end": "end",
}


def _parse_terms(tokens: list[str], lineno: int):
    """Parse sign/number/name token runs into (coeffs, const)."""
    coeffs: list[tuple[str, float]] = []
    const = 0.0
    sign = 1.0
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            sign = 1.0
            i += 1
            continue
        if tok == "-":
            sign = -1.0
            i += 1
            continue
        try:
            value = float(tok)
            has_number = True
        except ValueError:
            value = 1.0
            has_number = False
        if has_number:
            i += 1
            if i < len(tokens) and _NAME_RE.match(tokens[i]):
                coeffs.append((tokens[i], sign * value))
                i += 1
            else:
                const += sign * value
        elif _NAME_RE.match(tok):
            coeffs.append((tok, sign))
            i += 1
        else:
            raise ParseError(f"unexpected token {tok!r}", lineno, 1)
        sign = 1.0
    return coeffs, const


def parse_lp(text: str) -> MilpProblem:
    """Read LP text produced by :func:`export_lp` back into a problem."""
    sense = "min"
    objective_coeffs: list[tuple[str, float]] = []
    objective_const = 0.0
    rows: list[Constraint] = []
    bounds_order: list[str] = []
    bounds: dict[str, tuple[float, float]] = {}
    kinds: dict[str, str] = {}
    section = None

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        header = _SECTIONS.get(line.lower())
        if header:
            if header == "end":
                break
            section = header
            if header == "objective-max":
                sense = "max"
            continue
        if section in ("objective-min", "objective-max"):
            body = line.split(":", 1)[1] if ":" in line else line
            coeffs, const = _parse_terms(body.split(), lineno)
            objective_coeffs.extend(coeffs)
            objective_const += const
        elif section == "rows":
            if ":" not in line:
                raise ParseError("constraint row without a name", lineno, 1)
            label, body = line.split(":", 1)
            tokens = body.split()
            relation = None
            for rel in ("<=", ">=", "="):
                if rel in tokens:
                    relation = rel
                    split_at = tokens.index(rel)
                    break
            if relation is None:
                raise ParseError("constraint row without a relation", lineno, 1)
            coeffs, const = _parse_terms(tokens[:split_at], lineno)
            rhs_coeffs, rhs = _parse_terms(tokens[split_at + 1:], lineno)
            if rhs_coeffs:
                raise ParseError("variables on the right-hand side", lineno, 1)
            rows.append(Constraint(tuple(coeffs), relation, rhs - const,
                                   label.strip()))
        elif section == "bounds":
            tokens = line.split()
            if len(tokens) == 2 and tokens[1].lower() == "free":
                name, pair = tokens[0], (float("-inf"), float("inf"))
            elif len(tokens) == 3 and tokens[1] == "=":
                value = float(tokens[2])
                name, pair = tokens[0], (value, value)
            elif len(tokens) == 3 and tokens[1] in ("<=", ">="):
                value = float(tokens[2])
                name = tokens[0]
                pair = ((0.0, value) if tokens[1] == "<=" else (value, float("inf")))
            elif len(tokens) == 5 and tokens[1] == "<=" and tokens[3] == "<=":
                name = tokens[2]
                pair = (float(tokens[0]), float(tokens[4]))
            else:
                raise ParseError(f"unrecognized bounds line {line!r}", lineno, 1)
            if not _NAME_RE.match(name):
                raise ParseError(f"bad variable name {name!r}", lineno, 1)
            if name not in bounds:
                bounds_order.append(name)
            bounds[name] = pair
        elif section in ("generals", "binaries"):
            for name in line.split():
                if not _NAME_RE.match(name):
                    raise ParseError(f"bad variable name {name!r}", lineno, 1)
                kinds[name] = INTEGER if section == "generals" else BINARY
        elif section is None:
            raise ParseError(f"content before any section: {line!r}", lineno, 1)

    # names referenced but never bounded keep the LP default [0, +inf)
    order = list(bounds_order)
    seen = set(order)
    for name, _ in objective_coeffs:
        if name not in seen:
            seen.add(name)
            order.append(name)
    for row in rows:
        for name, _ in row.coeffs:
            if name not in seen:
                seen.add(name)
                order.append(name)

    builder = ProblemBuilder()
    for name in order:
        kind = kinds.get(name, CONTINUOUS)
        lo, hi = bounds.get(name, (0.0, float("inf")))
        if kind == BINARY and name not in bounds:
            lo, hi = 0.0, 1.0
        builder.add_variable(name, kind, lo, hi)
    for row in rows:
        builder.add_constraint(row.coeffs, row.relation, row.rhs, row.label)
    builder.set_objective(sense, objective_coeffs, objective_const)
    return builder.build()
