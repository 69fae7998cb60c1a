"""Declarative affine discrete-time environment models.

A model declares bounded state variables, bounded (optionally binary) action
variables, one update rule per state variable, and initial values.  Update
rules are affine expressions over the current state and action variables, or
an if/then/else pair of affine expressions switched by a binary action.  The
same model drives three consumers: concrete stepping, multi-step prediction
of a signal from an action sequence, and symbolic lowering to linear
constraints for the resolution optimizer.

Model text grammar (statements end with ';', '#' starts a comment):

    model      := statement*
    statement  := "state" name "in" "[" number "," number "]" ";"
                | "action" name "in" "[" number "," number "]" ["binary"] ";"
                | "init" name "=" number ";"
                | "next" "(" name ")" "=" update ";"
    update     := affine
                | "if" name "then" affine "else" affine

Affine expressions use the same syntax as predicate left-hand sides:
``battery - 1``, ``x + 1 * vx``, ``0.5 * speed + 2``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ModelError, ParseError
from .milp.problem import BINARY, CONTINUOUS, Constraint, Variable
from .parser import parse_affine
from .signals import Signal
from .stl import AffineExpr

log = logging.getLogger(__name__)

#: Input values may stray this far past declared bounds before step() rejects
#: them; absorbs accumulated floating-point drift across long rollouts.
BOUNDS_TOL = 1e-9


@dataclass(frozen=True)
class StateVar:
    name: str
    lo: float
    hi: float


@dataclass(frozen=True)
class ActionVar:
    name: str
    lo: float
    hi: float
    binary: bool = False


@dataclass(frozen=True)
class AffineRule:
    """Unconditional update: next value = expr(current state, action)."""

    expr: AffineExpr


@dataclass(frozen=True)
class SwitchedRule:
    """Binary-guarded update: guard action 1 -> then branch, 0 -> else."""

    guard: str
    then: AffineExpr
    otherwise: AffineExpr


@dataclass(frozen=True)
class TransitionSystem:
    """A validated model: states, actions, one update per state, init values."""

    states: tuple[StateVar, ...]
    actions: tuple[ActionVar, ...]
    updates: tuple[tuple[str, AffineRule | SwitchedRule], ...]
    init: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen: set[str] = set()
        for var in (*self.states, *self.actions):
            if var.name in seen:
                raise ModelError(f"variable {var.name!r} declared twice")
            seen.add(var.name)
            if not (math.isfinite(var.lo) and math.isfinite(var.hi)):
                raise ModelError(f"bounds of {var.name!r} must be finite")
            if var.lo > var.hi:
                raise ModelError(
                    f"empty bounds [{var.lo}, {var.hi}] for {var.name!r}")
        for action in self.actions:
            if action.binary and (action.lo, action.hi) != (0.0, 1.0):
                raise ModelError(
                    f"binary action {action.name!r} must have bounds [0, 1]")
        state_names = {s.name for s in self.states}
        action_names = {a.name for a in self.actions}

        targets = [name for name, _ in self.updates]
        for name in targets:
            if name not in state_names:
                raise ModelError(f"update for undeclared state {name!r}")
        if len(set(targets)) != len(targets):
            raise ModelError("duplicate update rule")
        for state in self.states:
            if state.name not in set(targets):
                raise ModelError(f"state {state.name!r} has no update rule")

        readable = state_names | action_names
        for name, rule in self.updates:
            exprs = ((rule.expr,) if isinstance(rule, AffineRule)
                     else (rule.then, rule.otherwise))
            for expr in exprs:
                for ref in expr.variables():
                    if ref not in readable:
                        raise ModelError(
                            f"update for {name!r} references undeclared"
                            f" variable {ref!r}")
            if isinstance(rule, SwitchedRule):
                guard = next((a for a in self.actions if a.name == rule.guard), None)
                if guard is None:
                    raise ModelError(
                        f"guard {rule.guard!r} is not a declared action")
                if not guard.binary:
                    raise ModelError(f"guard {rule.guard!r} must be binary")

        init_names = [name for name, _ in self.init]
        if len(set(init_names)) != len(init_names):
            raise ModelError("duplicate init value")
        for name, value in self.init:
            state = next((s for s in self.states if s.name == name), None)
            if state is None:
                raise ModelError(f"init for undeclared state {name!r}")
            if not (state.lo <= value <= state.hi):
                raise ModelError(
                    f"init {name} = {value} outside [{state.lo}, {state.hi}]")
        for state in self.states:
            if state.name not in set(init_names):
                raise ModelError(f"state {state.name!r} has no init value")

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    @property
    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    def state_bounds(self) -> dict[str, tuple[float, float]]:
        return {s.name: (s.lo, s.hi) for s in self.states}

    def variable_bounds(self) -> dict[str, tuple[float, float]]:
        out = self.state_bounds()
        out.update({a.name: (a.lo, a.hi) for a in self.actions})
        return out

    def update_for(self, name: str) -> AffineRule | SwitchedRule:
        for target, rule in self.updates:
            if target == name:
                return rule
        raise KeyError(name)

    def initial_state(self) -> dict[str, float]:
        return dict(self.init)


# -- model text --------------------------------------------------------------

_STATE_RE = re.compile(
    r"^state\s+([A-Za-z_]\w*)\s+in\s*\[([^,\]]+),([^,\]]+)\]$")
_ACTION_RE = re.compile(
    r"^action\s+([A-Za-z_]\w*)\s+in\s*\[([^,\]]+),([^,\]]+)\]\s*(binary)?$")
_INIT_RE = re.compile(r"^init\s+([A-Za-z_]\w*)\s*=\s*(.+)$", re.DOTALL)
_NEXT_RE = re.compile(r"^next\s*\(\s*([A-Za-z_]\w*)\s*\)\s*=\s*(.+)$", re.DOTALL)
_IF_RE = re.compile(r"^if\s+([A-Za-z_]\w*)\s+then\s+(.+?)\s+else\s+(.+)$", re.DOTALL)

_MODEL_RESERVED = frozenset(
    ["state", "action", "init", "next", "in", "binary", "if", "then", "else"])


def _statements(text: str):
    """Split into ';'-terminated statements, tracking starting line numbers."""
    stripped_lines = [line.split("#", 1)[0] for line in text.split("\n")]
    pending: list[str] = []
    start_line = 1
    for lineno, line in enumerate(stripped_lines, start=1):
        rest = line
        while ";" in rest:
            piece, rest = rest.split(";", 1)
            pending.append(piece)
            statement = " ".join(" ".join(pending).split())
            if not pending or not statement:
                raise ParseError("empty statement", lineno, 1)
            yield statement, start_line
            pending = []
            start_line = lineno
        if rest.strip():
            if not pending:
                start_line = lineno
            pending.append(rest)
        elif not pending:
            start_line = lineno + 1
    if pending and "".join(pending).strip():
        raise ParseError("statement not terminated with ';'", start_line, 1)


def _number(text: str, line: int) -> float:
    try:
        value = float(text.strip())
    except ValueError:
        raise ParseError(f"expected a number, found {text.strip()!r}", line, 1)
    return value


def _update_expr(text: str, line: int) -> AffineExpr:
    try:
        return parse_affine(text)
    except ParseError as exc:
        raise ParseError(f"in update expression: {exc.message}", line, exc.column)


def parse_model(text: str) -> TransitionSystem:
    """Parse and validate model text into a TransitionSystem."""
    states: list[StateVar] = []
    actions: list[ActionVar] = []
    updates: list[tuple[str, AffineRule | SwitchedRule]] = []
    init: list[tuple[str, float]] = []

    for statement, line in _statements(text):
        head = re.match(r"[A-Za-z_]\w*", statement)
        kind = head.group(0) if head else ""
        if kind == "state":
            m = _STATE_RE.match(statement)
            if not m:
                raise ParseError(
                    "expected 'state <name> in [lo, hi]'", line, 1)
            _check_name(m.group(1), line)
            states.append(StateVar(m.group(1), _number(m.group(2), line),
                                   _number(m.group(3), line)))
        elif kind == "action":
            m = _ACTION_RE.match(statement)
            if not m:
                raise ParseError(
                    "expected 'action <name> in [lo, hi] [binary]'", line, 1)
            _check_name(m.group(1), line)
            actions.append(ActionVar(m.group(1), _number(m.group(2), line),
                                     _number(m.group(3), line),
                                     binary=bool(m.group(4))))
        elif kind == "init":
            m = _INIT_RE.match(statement)
            if not m:
                raise ParseError("expected 'init <name> = <number>'", line, 1)
            init.append((m.group(1), _number(m.group(2), line)))
        elif kind == "next":
            m = _NEXT_RE.match(statement)
            if not m:
                raise ParseError("expected 'next(<name>) = <update>'", line, 1)
            target, body = m.group(1), m.group(2)
            cond = _IF_RE.match(body)
            if cond:
                rule: AffineRule | SwitchedRule = SwitchedRule(
                    cond.group(1),
                    _update_expr(cond.group(2), line),
                    _update_expr(cond.group(3), line))
            else:
                rule = AffineRule(_update_expr(body, line))
            updates.append((target, rule))
        else:
            raise ParseError(f"unknown statement {kind or statement!r}", line, 1)

    return TransitionSystem(tuple(states), tuple(actions), tuple(updates),
                            tuple(init))


def _check_name(name: str, line: int) -> None:
    if name in _MODEL_RESERVED:
        raise ParseError(f"{name!r} is a reserved word", line, 1)


# -- concrete semantics -------------------------------------------------------

def _check_inputs(system: TransitionSystem, state: Mapping[str, float],
                  action: Mapping[str, float]) -> None:
    for var in system.states:
        if var.name not in state:
            raise ModelError(f"state is missing {var.name!r}")
        value = state[var.name]
        if value < var.lo - BOUNDS_TOL or value > var.hi + BOUNDS_TOL:
            raise ModelError(
                f"state {var.name} = {value} outside [{var.lo}, {var.hi}]")
    for var in system.actions:
        if var.name not in action:
            raise ModelError(f"action is missing {var.name!r}")
        value = action[var.name]
        if value < var.lo - BOUNDS_TOL or value > var.hi + BOUNDS_TOL:
            raise ModelError(
                f"action {var.name} = {value} outside [{var.lo}, {var.hi}]")
        if var.binary and min(abs(value), abs(value - 1.0)) > 1e-6:
            raise ModelError(f"binary action {var.name} = {value} is not 0/1")


def step(system: TransitionSystem, state: Mapping[str, float],
         action: Mapping[str, float],
         clamps: list[tuple[str, float, float]] | None = None) -> dict[str, float]:
    """One transition; results outside declared bounds are clamped.

    Clamping events are appended to ``clamps`` as (name, raw, clamped) when a
    list is supplied, and always logged at debug level.
    """
    _check_inputs(system, state, action)
    values = {**state, **action}
    for var in system.actions:
        if var.binary:
            values[var.name] = float(round(action[var.name]))
    out: dict[str, float] = {}
    for var in system.states:
        rule = system.update_for(var.name)
        if isinstance(rule, AffineRule):
            raw = rule.expr.evaluate_values(values)
        elif values[rule.guard] >= 0.5:
            raw = rule.then.evaluate_values(values)
        else:
            raw = rule.otherwise.evaluate_values(values)
        clamped = min(max(raw, var.lo), var.hi)
        if clamped != raw:
            log.debug("clamped %s from %r to %r", var.name, raw, clamped)
            if clamps is not None:
                clamps.append((var.name, raw, clamped))
        out[var.name] = clamped
    return out


def predict(system: TransitionSystem, state: Mapping[str, float],
            actions: Sequence[Mapping[str, float]],
            clamps: list[tuple[str, float, float]] | None = None) -> Signal:
    """Roll the model forward over an action sequence.

    Returns a signal of len(actions) + 1 samples over the state variables:
    the given state followed by each successor.
    """
    if not actions:
        raise ModelError("predict needs at least one action step")
    names = system.state_names
    current = dict(state)
    rows = [tuple(current[n] for n in names)]
    for action in actions:
        current = step(system, current, action, clamps)
        rows.append(tuple(current[n] for n in names))
    return Signal(names, tuple(rows))


# -- symbolic lowering --------------------------------------------------------

def signal_var(name: str, t: int) -> str:
    """MILP variable name for a state variable at a step."""
    return f"sig_{name}_{t}"


def action_var(name: str, t: int) -> str:
    """MILP variable name for an action variable at a step."""
    return f"act_{name}_{t}"


def _shift(expr: AffineExpr, system: TransitionSystem, t: int) -> AffineExpr:
    """Rewrite a rule expression onto step-t MILP variable names."""
    state_names = set(system.state_names)
    terms = []
    for name, coef in expr.terms:
        milp_name = signal_var(name, t) if name in state_names else action_var(name, t)
        terms.append((milp_name, coef))
    return AffineExpr(tuple(terms), expr.const)


def lower_to_constraints(
        system: TransitionSystem, t0: int, horizon: int,
) -> tuple[list[Variable], list[Constraint]]:
    """Symbolic form of predict: fresh variables and dynamics rows.

    Declares one bounded variable per state variable for steps t0..t0+horizon
    and per action variable for steps t0..t0+horizon-1, then one equality per
    affine update per step.  Switched updates become four big-M inequalities
    tied to the guard binary, with per-branch constants derived from the
    declared bounds.  No clamping is modeled: the state variable bounds stand
    in for it, so instances that would clamp are simply infeasible rather
    than saturated.
    """
    if horizon < 1:
        raise ModelError("horizon must be at least 1")
    variables: list[Variable] = []
    constraints: list[Constraint] = []
    bounds = system.variable_bounds()

    for t in range(t0, t0 + horizon + 1):
        for s in system.states:
            variables.append(Variable(signal_var(s.name, t), CONTINUOUS, s.lo, s.hi))
    for t in range(t0, t0 + horizon):
        for a in system.actions:
            kind = BINARY if a.binary else CONTINUOUS
            variables.append(Variable(action_var(a.name, t), kind, a.lo, a.hi))

    for t in range(t0, t0 + horizon):
        for s in system.states:
            rule = system.update_for(s.name)
            nxt = signal_var(s.name, t + 1)
            if isinstance(rule, AffineRule):
                shifted = _shift(rule.expr, system, t)
                row = {nxt: 1.0}
                for name, coef in shifted.terms:
                    row[name] = row.get(name, 0.0) - coef
                constraints.append(
                    Constraint(tuple(row.items()), "=", shifted.const,
                               label=f"dyn_{s.name}_{t}"))
            else:
                constraints.extend(
                    _lower_switched(system, s, rule, t, bounds))
    return variables, constraints


def _lower_switched(system: TransitionSystem, state: StateVar,
                    rule: SwitchedRule, t: int,
                    bounds: Mapping[str, tuple[float, float]]) -> list[Constraint]:
    """Big-M if/then/else: guard=1 pins the then branch, guard=0 the else.

    For each branch e with value range [e_lo, e_hi], M = max(hi - e_lo,
    e_hi - lo) bounds |next - e| over the declared box, which makes the
    relaxed pair of rows vacuous exactly when the branch is inactive.
    """
    nxt = signal_var(state.name, t + 1)
    guard = action_var(rule.guard, t)
    rows: list[Constraint] = []
    for branch, expr, active_at_one in (("then", rule.then, True),
                                        ("else", rule.otherwise, False)):
        e_lo, e_hi = expr.value_range(bounds)
        big_m = max(state.hi - e_lo, e_hi - state.lo, 0.0)
        shifted = _shift(expr, system, t)
        base: dict[str, float] = {nxt: 1.0}
        for name, coef in shifted.terms:
            base[name] = base.get(name, 0.0) - coef
        # next - e <= M*(1-g)  for the then branch; M*g for the else branch
        upper = dict(base)
        lower = dict(base)
        if active_at_one:
            upper[guard] = upper.get(guard, 0.0) + big_m
            lower[guard] = lower.get(guard, 0.0) - big_m
            upper_rhs = shifted.const + big_m
            lower_rhs = shifted.const - big_m
        else:
            upper[guard] = upper.get(guard, 0.0) - big_m
            lower[guard] = lower.get(guard, 0.0) + big_m
            upper_rhs = shifted.const
            lower_rhs = shifted.const
        rows.append(Constraint(tuple(upper.items()), "<=", upper_rhs,
                               label=f"dyn_{state.name}_{t}_{branch}_ub"))
        rows.append(Constraint(tuple(lower.items()), ">=", lower_rhs,
                               label=f"dyn_{state.name}_{t}_{branch}_lb"))
    return rows
