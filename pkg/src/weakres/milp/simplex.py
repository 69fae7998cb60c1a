"""Dense two-phase simplex over linear programs with variable bounds.

Variables carry individual, possibly infinite, bounds.  Nonbasic variables
sit at a finite bound (free nonbasics sit at zero) and the basis carries the
rest.  Rows become equalities through slack insertion; phase 1 minimizes the
total artificial infeasibility, reusing a row's slack as the starting basic
variable whenever the initial residual fits the slack's bounds, and phase 2
continues from the feasible basis with the real objective.  The basis
inverse is kept explicitly, updated by rank-one pivots, and rebuilt every
few dozen pivots to bound drift.  Dantzig pricing switches to Bland's rule
after a stall, which terminates degenerate instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SolverNumericError
from .problem import MilpProblem

AT_LO, AT_UP, FREE, BASIC = np.int8(0), np.int8(1), np.int8(2), np.int8(3)

DUAL_TOL = 1e-9       # reduced-cost threshold for an improving direction
PRIMAL_TOL = 1e-9     # bound violation treated as exact
PHASE1_TOL = 1e-7     # residual infeasibility accepted as zero (scaled by |b|)
PIVOT_FLOOR = 1e-10   # tableau entries below this never pivot
RATIO_TIE = 1e-9      # leaving-variable ratios within this count as tied
REFACTOR_EVERY = 64   # pivots between basis-inverse rebuilds
STALL_LIMIT = 200     # non-improving pivots before Bland's rule kicks in


@dataclass
class LpResult:
    """Outcome of one relaxation solve.

    ``objective`` is the internal minimization value without the objective's
    constant offset; callers report user-facing values from the assignment.
    """

    status: str                   # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None   # structural variable values when optimal
    objective: float | None = None
    iterations: int = 0


class DenseLp:
    """Matrix form of a problem, reusable across bound-modified solves.

    Branch-and-bound calls :meth:`solve` many times with tightened bounds on
    the structural variables; the constraint matrix is built once.
    """

    def __init__(self, problem: MilpProblem):
        names = [v.name for v in problem.variables]
        self.index = {name: j for j, name in enumerate(names)}
        self.n_struct = len(names)
        m = len(problem.constraints)

        self.slack_of = np.full(m, -1, dtype=int)
        n_slack = sum(1 for c in problem.constraints if c.relation != "=")
        n_all = self.n_struct + n_slack
        A = np.zeros((m, n_all))
        b = np.empty(m)
        lo = np.empty(n_all)
        hi = np.empty(n_all)
        for j, v in enumerate(problem.variables):
            lo[j], hi[j] = v.lo, v.hi

        k = self.n_struct
        for i, row in enumerate(problem.constraints):
            for name, coef in row.coeffs:
                A[i, self.index[name]] += coef
            b[i] = row.rhs
            if row.relation == "<=":
                A[i, k] = 1.0
                lo[k], hi[k] = 0.0, np.inf
                self.slack_of[i] = k
                k += 1
            elif row.relation == ">=":
                A[i, k] = 1.0
                lo[k], hi[k] = -np.inf, 0.0
                self.slack_of[i] = k
                k += 1

        # internally always minimize; callers undo the sign for reporting
        self.sense_sign = 1.0 if problem.objective.sense == "min" else -1.0
        c = np.zeros(n_all)
        for name, coef in problem.objective.coeffs:
            c[self.index[name]] += self.sense_sign * coef

        self.A, self.b, self.c, self.lo, self.hi = A, b, c, lo, hi

    def solve(self, lo_struct=None, hi_struct=None,
              max_iters: int | None = None) -> LpResult:
        m, n_all = self.A.shape
        lo = self.lo.copy()
        hi = self.hi.copy()
        if lo_struct is not None:
            lo[:self.n_struct] = lo_struct
        if hi_struct is not None:
            hi[:self.n_struct] = hi_struct
        if np.any(lo > hi + PRIMAL_TOL):
            return LpResult("infeasible")
        lo = np.minimum(lo, hi)  # collapse sub-tolerance inversions

        if max_iters is None:
            max_iters = 5000 + 50 * (m + n_all)

        # starting point: every column nonbasic at its preferred bound
        st = np.where(np.isfinite(lo), AT_LO,
                      np.where(np.isfinite(hi), AT_UP, FREE)).astype(np.int8)
        x_start = np.where(st == AT_LO, lo, np.where(st == AT_UP, hi, 0.0))
        residual = self.b - self.A @ x_start

        basis: list[int] = []
        art_rows: list[int] = []
        art_signs: list[float] = []
        for i in range(m):
            s = self.slack_of[i]
            if s >= 0 and lo[s] - PRIMAL_TOL <= residual[i] <= hi[s] + PRIMAL_TOL:
                basis.append(s)
                st[s] = BASIC
            else:
                art_rows.append(i)
                art_signs.append(1.0 if residual[i] >= 0 else -1.0)
                basis.append(n_all + len(art_rows) - 1)

        n_art = len(art_rows)
        A = np.hstack([self.A, np.zeros((m, n_art))]) if n_art else self.A.copy()
        for k, (i, sign) in enumerate(zip(art_rows, art_signs)):
            A[i, n_all + k] = sign
        lo = np.concatenate([lo, np.zeros(n_art)])
        hi = np.concatenate([hi, np.full(n_art, np.inf)])
        st = np.concatenate([st, np.full(n_art, BASIC, dtype=np.int8)])

        state = _State(A, self.b, lo, hi, basis, st)
        iterations = 0

        if n_art:
            c1 = np.zeros(n_all + n_art)
            c1[n_all:] = 1.0
            status, z1, _ = state.run(c1, max_iters)
            iterations += state.iterations
            if status == "unbounded":
                raise SolverNumericError("phase 1 reported an unbounded objective")
            scale = max(1.0, float(np.max(np.abs(self.b))) if m else 1.0)
            if z1 > PHASE1_TOL * scale:
                return LpResult("infeasible", iterations=iterations)
            # artificials are done; pin them so they can never re-enter
            state.lo[n_all:] = 0.0
            state.hi[n_all:] = 0.0

        c2 = np.concatenate([self.c, np.zeros(n_art)])
        status, z2, x = state.run(c2, max_iters)
        iterations += state.iterations
        if status == "unbounded":
            return LpResult("unbounded", iterations=iterations)
        return LpResult("optimal", x[:self.n_struct].copy(), float(z2), iterations)


class _State:
    """Mutable simplex state: bounds, basis, statuses, explicit inverse."""

    def __init__(self, A, b, lo, hi, basis, st):
        self.A, self.b, self.lo, self.hi = A, b, lo, hi
        self.basis = basis
        self.st = st
        self.B_inv = self._factorize()
        self.iterations = 0

    def _factorize(self) -> np.ndarray:
        try:
            return np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError:
            raise SolverNumericError("singular basis matrix")

    def run(self, c, max_iters: int):
        """Pivot until optimal or unbounded under objective vector c."""
        A, b, lo, hi = self.A, self.b, self.lo, self.hi
        st, basis = self.st, self.basis
        m = len(basis)
        basis_arr = np.asarray(basis, dtype=int)

        stall = 0
        bland = False
        best_z = np.inf
        self.iterations = 0

        for it in range(max_iters):
            self.iterations = it + 1
            if it and it % REFACTOR_EVERY == 0:
                self.B_inv = self._factorize()

            x = np.where(st == AT_LO, lo, np.where(st == AT_UP, hi, 0.0))
            x[basis_arr] = 0.0
            xb = self.B_inv @ (b - A @ x)
            x[basis_arr] = xb
            z = float(c @ x)

            if z < best_z - 1e-12:
                best_z = z
                stall = 0
                bland = False
            else:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True

            y = c[basis_arr] @ self.B_inv
            d = c - y @ A
            movable = lo < hi
            up_ok = ((st == AT_LO) | (st == FREE)) & (d < -DUAL_TOL) & movable
            dn_ok = ((st == AT_UP) | (st == FREE)) & (d > DUAL_TOL) & movable
            if not up_ok.any() and not dn_ok.any():
                return "optimal", z, x

            if bland:
                j = int(np.flatnonzero(up_ok | dn_ok)[0])
            else:
                score = np.where(up_ok, -d, 0.0) + np.where(dn_ok, d, 0.0)
                j = int(np.argmax(score))
            sigma = 1.0 if up_ok[j] else -1.0

            w = self.B_inv @ A[:, j]
            coef = sigma * w
            lo_b = lo[basis_arr]
            hi_b = hi[basis_arr]
            ratios = np.full(m, np.inf)
            dec = coef > PIVOT_FLOOR   # basic value falls toward its lower bound
            inc = coef < -PIVOT_FLOOR
            ratios[dec] = (xb[dec] - lo_b[dec]) / coef[dec]
            ratios[inc] = (xb[inc] - hi_b[inc]) / coef[inc]
            ratios = np.maximum(ratios, 0.0)

            row_limit = float(ratios.min()) if m else np.inf
            span = hi[j] - lo[j]
            if np.isfinite(span) and span <= row_limit:
                # bound flip: the entering variable crosses to its other bound
                st[j] = AT_UP if sigma > 0 else AT_LO
                continue
            if not np.isfinite(row_limit):
                return "unbounded", -np.inf, None

            tie = ratios <= row_limit + RATIO_TIE
            if bland:
                tied = np.flatnonzero(tie)
                r = int(tied[np.argmin(basis_arr[tied])])
            else:
                r = int(np.argmax(np.where(tie, np.abs(coef), -1.0)))
            pivot = w[r]
            if abs(pivot) < PIVOT_FLOOR:
                raise SolverNumericError("pivot column is numerically zero")

            leaving = basis[r]
            st[leaving] = AT_LO if coef[r] > 0 else AT_UP
            st[j] = BASIC
            basis[r] = j
            basis_arr[r] = j

            new_row = self.B_inv[r] / pivot
            correction = w.copy()
            correction[r] = 0.0
            self.B_inv -= np.outer(correction, new_row)
            self.B_inv[r] = new_row

        raise SolverNumericError(
            f"simplex iteration limit ({max_iters}) exceeded")
