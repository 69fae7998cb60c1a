"""Mixed-integer linear programming: problem containers, an embedded
branch-and-bound solver over a dense simplex, and LP-format text exchange.

The robustness encoder lives in :mod:`weakres.milp.encoder` and is imported
explicitly by its users rather than re-exported here, keeping this package
importable from the environment-model layer.
"""

from .problem import (BINARY, CONTINUOUS, INTEGER, SAT, UNBOUNDED, UNSAT,
                      Constraint, MilpProblem, MilpSolution, Objective,
                      ProblemBuilder, SolveStats, Variable)

__all__ = [
    "BINARY", "CONTINUOUS", "INTEGER", "SAT", "UNSAT", "UNBOUNDED",
    "Variable", "Constraint", "Objective", "MilpProblem", "ProblemBuilder",
    "MilpSolution", "SolveStats",
]
