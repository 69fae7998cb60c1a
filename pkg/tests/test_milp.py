"""Embedded LP/MILP solver and LP-format text exchange.

The LP layer is cross-checked against scipy.optimize.linprog (an
independent implementation) and the integer layer against exhaustive
enumeration oracles, so solver correctness never rests on the solver itself.
"""

import itertools
import math
import random

import numpy as np
import pytest
from scipy.optimize import linprog

from weakres.milp import (BINARY, CONTINUOUS, INTEGER, SAT, UNBOUNDED, UNSAT,
                          MilpProblem, ProblemBuilder)
from weakres.milp.lpformat import export_lp, parse_lp
from weakres.milp.simplex import DenseLp
from weakres.milp.solver import SolveLimits, solve

INF = float("inf")


def build(variables, constraints, objective=None):
    b = ProblemBuilder()
    for spec in variables:
        b.add_variable(*spec)
    for coeffs, rel, rhs in constraints:
        b.add_constraint(coeffs, rel, rhs)
    if objective:
        b.set_objective(*objective)
    return b.build()


class TestSolverBasics:
    def test_bounded_maximization(self):
        p = build([("x", CONTINUOUS, 0, 10)], [({"x": 1}, "<=", 5)],
                  ("max", {"x": 1}))
        out = solve(p)
        assert out.status == SAT
        assert out.value("x") == pytest.approx(5.0, abs=1e-9)
        assert out.objective_value == pytest.approx(5.0, abs=1e-9)
        assert out.optimal

    def test_binary_covering(self):
        p = build([("x", BINARY, 0, 1), ("y", BINARY, 0, 1)],
                  [({"x": 1, "y": 1}, ">=", 1.5)],
                  ("min", {"x": 1, "y": 1}))
        out = solve(p)
        assert out.status == SAT
        assert out.objective_value == pytest.approx(2.0, abs=1e-9)
        assert out.value("x") == 1.0 and out.value("y") == 1.0

    def test_contradictory_rows_unsat(self):
        p = build([("x", CONTINUOUS, -10, 10)],
                  [({"x": 1}, ">=", 1), ({"x": 1}, "<=", 0)])
        out = solve(p)
        assert out.status == UNSAT
        assert out.optimal
        assert out.assignment is None

    def test_unbounded_direction(self):
        p = build([("x", CONTINUOUS, 0, INF)], [], ("max", {"x": 1}))
        assert solve(p).status == UNBOUNDED

    def test_feasibility_problem_no_objective(self):
        p = build([("x", CONTINUOUS, 2, 8)], [({"x": 1}, "<=", 4)])
        out = solve(p)
        assert out.status == SAT
        assert 2 - 1e-9 <= out.value("x") <= 4 + 1e-9

    def test_equality_rows(self):
        p = build([("x", CONTINUOUS, -10, 10), ("y", CONTINUOUS, -10, 10)],
                  [({"x": 1, "y": 2}, "=", 4), ({"x": 1, "y": -1}, "=", 1)],
                  ("min", {"x": 1}))
        out = solve(p)
        assert out.status == SAT
        assert out.value("x") == pytest.approx(2.0, abs=1e-8)
        assert out.value("y") == pytest.approx(1.0, abs=1e-8)

    def test_integer_general_variable(self):
        p = build([("n", INTEGER, 0, 10)], [({"n": 1}, "<=", 3.7)],
                  ("max", {"n": 1}))
        out = solve(p)
        assert out.status == SAT
        assert out.value("n") == 3.0

    def test_node_limit_sets_flag(self):
        p = build([("x", BINARY, 0, 1), ("y", BINARY, 0, 1),
                   ("z", BINARY, 0, 1)],
                  [({"x": 1, "y": 1, "z": 1}, ">=", 1.5)],
                  ("min", {"x": 1.0, "y": 1.1, "z": 1.2}))
        out = solve(p, SolveLimits(max_nodes=0))
        assert not out.optimal

    def test_deterministic_assignments(self):
        p = build([("x", BINARY, 0, 1), ("y", BINARY, 0, 1),
                   ("w", CONTINUOUS, 0, 4)],
                  [({"x": 1, "y": 1, "w": 1}, ">=", 2.3)],
                  ("min", {"x": 2, "y": 2, "w": 1}))
        first = solve(p)
        second = solve(p)
        assert first.assignment == second.assignment
        assert first.objective_value == second.objective_value

    def test_solution_satisfies_problem(self):
        p = build([("x", CONTINUOUS, 0, 9), ("b", BINARY, 0, 1)],
                  [({"x": 1, "b": -5}, "<=", 2), ({"x": 1}, ">=", 1)],
                  ("max", {"x": 1, "b": -0.5}))
        out = solve(p)
        assert out.status == SAT
        assert p.feasible(out.assignment, tol=1e-6)


def random_lp_problem(rng):
    n = rng.randint(1, 5)
    m = rng.randint(1, 5)
    b = ProblemBuilder()
    names = []
    for j in range(n):
        lo = rng.choice([-5.0, -2.0, 0.0])
        hi = rng.choice([1.0, 3.0, 6.0])
        names.append(b.add_variable(f"x{j}", CONTINUOUS, lo, hi))
    for _ in range(m):
        picks = rng.sample(names, rng.randint(1, n))
        coeffs = {p: rng.choice([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]) for p in picks}
        rel = rng.choice(["<=", ">=", "="])
        rhs = rng.choice([-3.0, -1.0, 0.0, 1.0, 2.0, 4.0])
        b.add_constraint(coeffs, rel, rhs)
    sense = rng.choice(["min", "max"])
    b.set_objective(sense, {p: rng.choice([-2.0, -1.0, 0.0, 1.0, 2.0])
                            for p in names})
    return b.build()


def scipy_reference(problem):
    """Independent LP solve via scipy's HiGHS backend."""
    names = [v.name for v in problem.variables]
    col = {n: j for j, n in enumerate(names)}
    sign = 1.0 if problem.objective.sense == "min" else -1.0
    c = np.zeros(len(names))
    for name, coef in problem.objective.coeffs:
        c[col[name]] += sign * coef
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in problem.constraints:
        vec = np.zeros(len(names))
        for name, coef in row.coeffs:
            vec[col[name]] += coef
        if row.relation == "<=":
            a_ub.append(vec)
            b_ub.append(row.rhs)
        elif row.relation == ">=":
            a_ub.append(-vec)
            b_ub.append(-row.rhs)
        else:
            a_eq.append(vec)
            b_eq.append(row.rhs)
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
        A_eq=np.array(a_eq) if a_eq else None, b_eq=b_eq or None,
        bounds=[(v.lo if math.isfinite(v.lo) else None,
                 v.hi if math.isfinite(v.hi) else None)
                for v in problem.variables],
        method="highs")
    if res.status == 0:
        return "optimal", sign * res.fun
    if res.status == 2:
        return "infeasible", None
    if res.status == 3:
        return "unbounded", None
    raise AssertionError(f"scipy failed: {res.message}")


class TestLpAgainstScipy:
    def test_random_lps_match(self):
        rng = random.Random(987654)
        agree_objective = 0
        for _ in range(150):
            problem = random_lp_problem(rng)
            want_status, want_obj = scipy_reference(problem)
            lp = DenseLp(problem)
            got = lp.solve()
            assert got.status == want_status, export_lp(problem)
            if want_status == "optimal":
                sign = 1.0 if problem.objective.sense == "min" else -1.0
                got_user = sign * got.objective
                assert got_user == pytest.approx(want_obj, abs=1e-6), \
                    export_lp(problem)
                agree_objective += 1
        assert agree_objective > 60

    def test_degenerate_and_redundant_rows(self):
        p = build([("x", CONTINUOUS, 0, 1), ("y", CONTINUOUS, 0, 1)],
                  [({"x": 1, "y": 1}, "<=", 1), ({"x": 1, "y": 1}, "<=", 1),
                   ({"x": 1}, "<=", 1), ({"y": 1}, "<=", 1)],
                  ("max", {"x": 1, "y": 1}))
        out = DenseLp(p).solve()
        assert out.status == "optimal"
        assert out.objective == pytest.approx(-1.0, abs=1e-9)  # internal min


def enumerate_binary(problem):
    """Exhaustive oracle for all-binary problems."""
    names = [v.name for v in problem.variables]
    best = None
    better = min if problem.objective.sense == "min" else max
    for bits in itertools.product([0.0, 1.0], repeat=len(names)):
        assignment = dict(zip(names, bits))
        if problem.feasible(assignment, tol=1e-9):
            value = problem.objective.value(assignment)
            best = value if best is None else better(best, value)
    return best


def random_binary_problem(rng):
    n = rng.randint(2, 8)
    b = ProblemBuilder()
    names = [b.add_variable(f"b{j}", BINARY, 0, 1) for j in range(n)]
    for _ in range(rng.randint(1, 5)):
        picks = rng.sample(names, rng.randint(1, n))
        coeffs = {p: rng.choice([-2.0, -1.0, 1.0, 2.0, 3.0]) for p in picks}
        rel = rng.choice(["<=", ">="])
        rhs = rng.choice([-2.0, -1.0, 0.5, 1.0, 2.0, 2.5])
        b.add_constraint(coeffs, rel, rhs)
    b.set_objective(rng.choice(["min", "max"]),
                    {p: rng.choice([-3.0, -1.0, 0.0, 1.0, 2.0]) for p in names})
    return b.build()


class TestBranchAndBoundAgainstEnumeration:
    def test_random_binary_problems(self):
        rng = random.Random(13579)
        sat_seen = unsat_seen = 0
        for _ in range(120):
            problem = random_binary_problem(rng)
            want = enumerate_binary(problem)
            got = solve(problem)
            if want is None:
                assert got.status == UNSAT, export_lp(problem)
                unsat_seen += 1
            else:
                assert got.status == SAT, export_lp(problem)
                assert got.objective_value == pytest.approx(want, abs=1e-6)
                assert problem.feasible(got.assignment, tol=1e-6)
                sat_seen += 1
        assert sat_seen > 60 and unsat_seen > 5

    def test_random_mixed_problems(self):
        """Binaries plus one bounded continuous variable, solved exactly by
        enumerating binaries and optimizing the single-variable tail."""
        rng = random.Random(24680)
        checked = 0
        for _ in range(60):
            problem, oracle_value = _random_mixed_with_oracle(rng)
            got = solve(problem)
            if oracle_value is None:
                assert got.status == UNSAT, export_lp(problem)
            else:
                assert got.status == SAT, export_lp(problem)
                assert got.objective_value == pytest.approx(oracle_value, abs=1e-6)
                checked += 1
        assert checked > 30

    def test_unsat_reports_are_proven(self):
        rng = random.Random(11223)
        for _ in range(60):
            problem = random_binary_problem(rng)
            got = solve(problem)
            if got.status == UNSAT:
                assert got.optimal
                assert enumerate_binary(problem) is None


def _random_mixed_with_oracle(rng):
    n_bin = rng.randint(1, 6)
    b = ProblemBuilder()
    bnames = [b.add_variable(f"b{j}", BINARY, 0, 1) for j in range(n_bin)]
    x_lo, x_hi = -4.0, 6.0
    b.add_variable("x", CONTINUOUS, x_lo, x_hi)
    rows = []
    for _ in range(rng.randint(1, 4)):
        coeffs = {p: rng.choice([-2.0, -1.0, 1.0, 2.0])
                  for p in rng.sample(bnames, rng.randint(1, n_bin))}
        x_coef = rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
        if x_coef:
            coeffs["x"] = x_coef
        rel = rng.choice(["<=", ">="])
        rhs = rng.choice([-2.0, 0.0, 1.0, 3.0])
        rows.append((dict(coeffs), rel, rhs))
        b.add_constraint(coeffs, rel, rhs)
    sense = rng.choice(["min", "max"])
    bin_costs = {p: rng.choice([-2.0, -1.0, 1.0, 2.0]) for p in bnames}
    x_cost = rng.choice([-1.0, 0.0, 0.5, 1.0])
    objective = dict(bin_costs)
    if x_cost:
        objective["x"] = x_cost
    b.set_objective(sense, objective)
    problem = b.build()

    better = min if sense == "min" else max
    best = None
    for bits in itertools.product([0.0, 1.0], repeat=n_bin):
        fixed = dict(zip(bnames, bits))
        lo, hi = x_lo, x_hi
        feasible = True
        for coeffs, rel, rhs in rows:
            residual = rhs - sum(c * fixed[p] for p, c in coeffs.items()
                                 if p != "x")
            x_coef = coeffs.get("x", 0.0)
            if x_coef == 0.0:
                ok = residual >= -1e-12 if rel == "<=" else residual <= 1e-12
                if not ok:
                    feasible = False
                    break
            elif (rel == "<=") == (x_coef > 0):
                hi = min(hi, residual / x_coef)
            else:
                lo = max(lo, residual / x_coef)
        if not feasible or lo > hi + 1e-12:
            continue
        for x in ((lo, hi) if x_cost else (lo,)):
            value = sum(bin_costs[p] * fixed[p] for p in bnames) + x_cost * x
            best = value if best is None else better(best, value)
    return problem, best


class TestLpFormat:
    def test_export_contains_sections(self):
        p = build([("x", CONTINUOUS, 0, 10)], [({"x": 1}, "<=", 5)],
                  ("max", {"x": 1}))
        text = export_lp(p)
        assert "Maximize" in text
        assert "1 x <= 5" in text
        assert "0 <= x <= 10" in text
        assert text.rstrip().endswith("End")

    def test_binary_section_lists_variables(self):
        p = build([("b", BINARY, 0, 1)], [({"b": 1}, "<=", 1)],
                  ("min", {"b": 1}))
        text = export_lp(p)
        assert "Binaries" in text
        assert "\n b\n" in text

    def test_general_section_and_free_bounds(self):
        p = build([("n", INTEGER, 0, 9), ("f", CONTINUOUS, -INF, INF)],
                  [({"n": 1, "f": 1}, ">=", 2)])
        text = export_lp(p)
        assert "Generals" in text
        assert " f free" in text

    def test_round_trip_fixed_example(self):
        b = ProblemBuilder()
        b.add_variable("x", CONTINUOUS, -1.5, 2.5)
        b.add_variable("n", INTEGER, 0, 7)
        b.add_variable("z", BINARY, 0, 1)
        b.add_constraint({"x": 2, "n": -1}, "<=", 3.25, label="cap")
        b.add_constraint({"x": 1, "z": 5}, "=", 1, label="link")
        b.set_objective("max", {"x": 1, "n": 0.5, "z": -2}, const=1.5)
        p = b.build()
        assert parse_lp(export_lp(p)) == p

    def test_round_trip_random_problems(self):
        rng = random.Random(86420)
        for _ in range(100):
            problem = _random_labeled_problem(rng)
            again = parse_lp(export_lp(problem))
            assert again == problem, export_lp(problem)

    def test_reader_accepts_one_sided_bounds(self):
        text = """Minimize
 obj: 1 x + 1 y
Subject To
 r0: 1 x + 1 y >= 2
Bounds
 x >= 1
 y <= 5
End
"""
        p = parse_lp(text)
        assert p.variable("x").lo == 1.0 and p.variable("x").hi == INF
        assert p.variable("y").lo == 0.0 and p.variable("y").hi == 5.0

    def test_reader_defaults_unbounded_names(self):
        text = "Minimize\n obj: 1 x\nSubject To\n r0: 1 x >= -1\nEnd\n"
        p = parse_lp(text)
        assert (p.variable("x").lo, p.variable("x").hi) == (0.0, INF)


def _random_labeled_problem(rng):
    n = rng.randint(1, 6)
    b = ProblemBuilder()
    names = []
    for j in range(n):
        kind = rng.choice([CONTINUOUS, CONTINUOUS, INTEGER, BINARY])
        if kind == BINARY:
            names.append(b.add_variable(f"v{j}", kind, 0, 1))
        elif rng.random() < 0.2:
            names.append(b.add_variable(f"v{j}", kind, -INF, INF))
        else:
            lo = rng.choice([-8.0, -2.5, 0.0])
            names.append(b.add_variable(f"v{j}", kind, lo,
                                        lo + rng.choice([1.0, 4.25, 10.0])))
    for i in range(rng.randint(1, 5)):
        picks = rng.sample(names, rng.randint(1, n))
        b.add_constraint({p: rng.choice([-2.0, -0.75, 1.0, 3.5]) for p in picks},
                         rng.choice(["<=", ">=", "="]),
                         rng.choice([-2.0, 0.0, 1.25, 4.0]),
                         label=f"r{i}")
    b.set_objective(rng.choice(["min", "max"]),
                    {p: rng.choice([-1.0, 0.5, 2.0]) for p in names},
                    const=rng.choice([0.0, 0.0, -1.5, 2.0]))
    return b.build()
