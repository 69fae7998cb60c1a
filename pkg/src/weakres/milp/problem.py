"""Immutable mixed-integer linear problem and solution containers.

A problem is a set of named, bounded, typed variables, a list of linear
constraints over them, and one linear objective.  Everything is plain data;
the solver and the LP-format writer consume these containers without any
back-references or shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import EncodingError

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"

SAT = "sat"
UNSAT = "unsat"
UNBOUNDED = "unbounded"

_RELATIONS = ("<=", ">=", "=")


def _coeff_tuple(coeffs) -> tuple[tuple[str, float], ...]:
    """Normalize a coefficient map/pair-list: merge repeats, drop zeros."""
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    merged: dict[str, float] = {}
    for name, coef in items:
        value = float(coef)
        if not math.isfinite(value):
            raise EncodingError(f"non-finite coefficient for {name!r}")
        merged[name] = merged.get(name, 0.0) + value
    return tuple((n, c) for n, c in merged.items() if c != 0.0)


@dataclass(frozen=True)
class Variable:
    """A decision variable with inclusive bounds.

    Binary variables are fixed to bounds [0, 1]; integer and continuous
    variables accept any finite or infinite bounds with lo <= hi.
    """

    name: str
    kind: str = CONTINUOUS
    lo: float = float("-inf")
    hi: float = float("inf")

    def __post_init__(self):
        if not self.name or not (self.name[0].isalpha() or self.name[0] == "_"):
            raise EncodingError(f"bad variable name {self.name!r}")
        if self.kind not in (CONTINUOUS, INTEGER, BINARY):
            raise EncodingError(f"unknown variable kind {self.kind!r}")
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise EncodingError(
                f"invalid bounds [{self.lo}, {self.hi}] for {self.name!r}")
        if self.kind == BINARY and (self.lo, self.hi) != (0.0, 1.0):
            raise EncodingError(
                f"binary variable {self.name!r} must have bounds [0, 1]")

    @property
    def is_integral(self) -> bool:
        return self.kind in (INTEGER, BINARY)


@dataclass(frozen=True)
class Constraint:
    """A linear row: sum(coef * var) <relation> rhs."""

    coeffs: tuple[tuple[str, float], ...]
    relation: str
    rhs: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _coeff_tuple(self.coeffs))
        object.__setattr__(self, "rhs", float(self.rhs))
        if self.relation not in _RELATIONS:
            raise EncodingError(f"unknown relation {self.relation!r}")
        if not math.isfinite(self.rhs):
            raise EncodingError(f"non-finite right-hand side {self.rhs}")

    def value(self, assignment) -> float:
        return sum(coef * assignment[name] for name, coef in self.coeffs)

    def satisfied_by(self, assignment, tol: float = 1e-6) -> bool:
        lhs = self.value(assignment)
        if self.relation == "<=":
            return lhs <= self.rhs + tol
        if self.relation == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True)
class Objective:
    """Linear objective with a sense, coefficients, and a fixed offset."""

    sense: str = "min"
    coeffs: tuple[tuple[str, float], ...] = ()
    const: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _coeff_tuple(self.coeffs))
        object.__setattr__(self, "const", float(self.const))
        if self.sense not in ("min", "max"):
            raise EncodingError(f"objective sense must be min or max, got {self.sense!r}")

    def value(self, assignment) -> float:
        return self.const + sum(c * assignment[n] for n, c in self.coeffs)


@dataclass(frozen=True)
class MilpProblem:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Objective = Objective()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        declared = set()
        for v in self.variables:
            if v.name in declared:
                raise EncodingError(f"variable {v.name!r} declared twice")
            declared.add(v.name)
        for row in self.constraints:
            for name, _ in row.coeffs:
                if name not in declared:
                    raise EncodingError(
                        f"constraint references undeclared variable {name!r}")
        for name, _ in self.objective.coeffs:
            if name not in declared:
                raise EncodingError(
                    f"objective references undeclared variable {name!r}")

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def feasible(self, assignment, tol: float = 1e-6) -> bool:
        """Whether an assignment satisfies all rows, bounds, and integrality."""
        for v in self.variables:
            x = assignment[v.name]
            if x < v.lo - tol or x > v.hi + tol:
                return False
            if v.is_integral and abs(x - round(x)) > tol:
                return False
        return all(row.satisfied_by(assignment, tol) for row in self.constraints)


class ProblemBuilder:
    """Accumulates variables and constraints, then freezes a MilpProblem."""

    def __init__(self):
        self._variables: list[Variable] = []
        self._names: set[str] = set()
        self._constraints: list[Constraint] = []
        self._objective = Objective()
        self._counters: dict[str, int] = {}

    def add_variable(self, name: str, kind: str = CONTINUOUS,
                     lo: float = float("-inf"), hi: float = float("inf")) -> str:
        if name in self._names:
            raise EncodingError(f"variable {name!r} declared twice")
        self._variables.append(Variable(name, kind, lo, hi))
        self._names.add(name)
        return name

    def fresh(self, prefix: str, kind: str = CONTINUOUS,
              lo: float = float("-inf"), hi: float = float("inf")) -> str:
        n = self._counters.get(prefix, 0)
        self._counters[prefix] = n + 1
        return self.add_variable(f"{prefix}_{n}", kind, lo, hi)

    def has_variable(self, name: str) -> bool:
        return name in self._names

    def add_constraint(self, coeffs, relation: str, rhs: float,
                       label: str = "") -> Constraint:
        row = Constraint(_coeff_tuple(coeffs), relation, rhs, label)
        self._constraints.append(row)
        return row

    def set_objective(self, sense: str, coeffs, const: float = 0.0) -> None:
        self._objective = Objective(sense, _coeff_tuple(coeffs), const)

    def build(self) -> MilpProblem:
        return MilpProblem(tuple(self._variables), tuple(self._constraints),
                           self._objective)


@dataclass(frozen=True)
class SolveStats:
    nodes: int = 0
    simplex_iterations: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class MilpSolution:
    """Outcome of a solve: status plus assignment/objective when SAT.

    ``optimal`` is False when a limit stopped the search with an incumbent
    whose global optimality was not proven.
    """

    status: str
    assignment: dict[str, float] | None = None
    objective_value: float | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    optimal: bool = True

    def __post_init__(self):
        if self.status not in (SAT, UNSAT, UNBOUNDED):
            raise EncodingError(f"unknown solution status {self.status!r}")
        if (self.status == SAT) != (self.assignment is not None):
            raise EncodingError("assignment present iff status is SAT")

    def value(self, name: str) -> float:
        if self.assignment is None:
            raise KeyError(f"no assignment in a {self.status} solution")
        return self.assignment[name]
