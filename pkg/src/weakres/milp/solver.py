"""Best-first branch and bound over the dense simplex relaxation.

Nodes are bound boxes on the structural variables; the LP relaxation is
solved when a child is created, children enter a min-heap keyed by their
relaxation bound, and the search stops the moment the best pending bound
cannot beat the incumbent.  Branching picks the most fractional integer
variable.  Every candidate incumbent is re-solved with its integer variables
fixed, so reported assignments are LP-polished and satisfy rows to simplex
tolerance rather than inheriting rounding error.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass

import numpy as np

from .problem import (SAT, UNBOUNDED, UNSAT, MilpProblem, MilpSolution,
                      SolveStats)
from .simplex import DenseLp

log = logging.getLogger(__name__)

INT_TOL = 1e-6   # distance from an integer treated as integral
GAP_TOL = 1e-9   # bound improvements below this do not reopen nodes


@dataclass(frozen=True)
class SolveLimits:
    """Search budget; None means unlimited."""

    time_seconds: float | None = None
    max_nodes: int | None = None


def solve(problem: MilpProblem, limits: SolveLimits | None = None) -> MilpSolution:
    """Minimize or maximize the problem, returning a proven optimum when
    the search completes and the best incumbent with optimal=False when a
    limit interrupts it."""
    limits = limits or SolveLimits()
    started = time.perf_counter()
    lp = DenseLp(problem)
    int_idx = np.array(
        [j for j, v in enumerate(problem.variables) if v.is_integral], dtype=int)
    lo0 = np.array([v.lo for v in problem.variables], dtype=float)
    hi0 = np.array([v.hi for v in problem.variables], dtype=float)

    iterations = 0
    nodes = 0
    incumbent: np.ndarray | None = None
    incumbent_obj = np.inf
    limit_hit = False

    def stats() -> SolveStats:
        return SolveStats(nodes=nodes, simplex_iterations=iterations,
                          wall_time=time.perf_counter() - started)

    def fractional(x: np.ndarray) -> int | None:
        """Index of the most fractional integer variable, None if integral."""
        if int_idx.size == 0:
            return None
        values = x[int_idx]
        dist = np.abs(values - np.round(values))
        pick = int(np.argmax(dist))
        if dist[pick] <= INT_TOL:
            return None
        return int(int_idx[pick])

    def try_incumbent(x: np.ndarray) -> None:
        """Fix the integer part of x and re-solve for a polished incumbent."""
        nonlocal incumbent, incumbent_obj, iterations
        fixed = np.round(x[int_idx])
        lo_f, hi_f = lo0.copy(), hi0.copy()
        lo_f[int_idx] = fixed
        hi_f[int_idx] = fixed
        result = lp.solve(lo_f, hi_f)
        iterations += result.iterations
        if result.status != "optimal":
            return
        if result.objective < incumbent_obj - GAP_TOL:
            incumbent = result.x.copy()
            incumbent[int_idx] = fixed
            incumbent_obj = result.objective
            log.debug("incumbent %.9g after %d nodes", incumbent_obj, nodes)

    root = lp.solve(lo0, hi0)
    iterations += root.iterations
    if root.status == "infeasible":
        return MilpSolution(UNSAT, stats=stats())
    if root.status == "unbounded":
        return MilpSolution(UNBOUNDED, stats=stats())

    heap: list = []
    counter = 0
    if fractional(root.x) is None:
        try_incumbent(root.x)
    else:
        heap.append((root.objective, counter, lo0, hi0, root.x))
        counter += 1

    while heap:
        if limits.time_seconds is not None and \
                time.perf_counter() - started > limits.time_seconds:
            limit_hit = True
            break
        if limits.max_nodes is not None and nodes >= limits.max_nodes:
            limit_hit = True
            break
        bound, _, lo, hi, x = heapq.heappop(heap)
        if bound >= incumbent_obj - GAP_TOL:
            break  # best-first: every pending node is at least as bad
        nodes += 1

        j = fractional(x)
        if j is None:
            # pending nodes are pushed fractional; a node can only turn
            # integral if bounds made its LP land on integers, handled above
            try_incumbent(x)
            continue
        value = x[j]
        down = (lo.copy(), hi.copy())
        down[1][j] = np.floor(value)
        up = (lo.copy(), hi.copy())
        up[0][j] = np.ceil(value)

        for child_lo, child_hi in (down, up):
            if child_lo[j] > child_hi[j]:
                continue
            result = lp.solve(child_lo, child_hi)
            iterations += result.iterations
            if result.status == "infeasible":
                continue
            if result.status == "unbounded":
                return MilpSolution(UNBOUNDED, stats=stats())
            if result.objective >= incumbent_obj - GAP_TOL:
                continue
            if fractional(result.x) is None:
                try_incumbent(result.x)
            else:
                heapq.heappush(heap, (result.objective, counter,
                                      child_lo, child_hi, result.x))
                counter += 1

    if incumbent is None:
        return MilpSolution(UNSAT, stats=stats(), optimal=not limit_hit)

    assignment: dict[str, float] = {}
    int_set = set(int_idx.tolist())
    for j, variable in enumerate(problem.variables):
        value = float(incumbent[j])
        assignment[variable.name] = float(round(value)) if j in int_set else value
    objective_value = problem.objective.value(assignment)
    return MilpSolution(SAT, assignment, objective_value, stats=stats(),
                        optimal=not limit_hit)
