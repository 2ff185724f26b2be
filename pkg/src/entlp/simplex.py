"""LP solving: float path (HiGHS) and exact rational path.

The exact path first solves in floating point, then reconstructs the exact
optimal primal/dual pair by solving the sparse rational systems determined
by the float solution's tight rows and dual support, and verifies optimality
by strong duality - all in exact arithmetic.  If that reconstruction fails,
a self-contained exact two-phase tableau simplex (deterministic pivoting,
Bland's rule under degeneracy) solves the dual from scratch.

Sign conventions: a row `form >= 0` / `form = 0` with form = a.x + k is the
primal constraint a.x >= b / a.x = b with b = -k.  The dual is
max b.y  s.t.  sum_i y_i a_i = c,  y >= 0 on inequality rows.
A dual-feasible y proves the lower bound b.y on the primal minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from gmpy2 import mpq

from .core import EntlpError, LinearForm
from .lp import LP
from .shannon import REL_EQ, REL_GE

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class SolveError(EntlpError):
    pass


@dataclass
class Solution:
    status: str
    value: object = None  # Fraction on the exact path, float otherwise
    primal: Dict[int, object] = field(default_factory=dict)
    dual: Dict[str, object] = field(default_factory=dict)
    certified: bool = False
    path: str = "exact"
    iterations: int = 0
    notes: List[str] = field(default_factory=list)


def _fr(q) -> Fraction:
    return Fraction(q.numerator, q.denominator)


# ---------------------------------------------------------------------------
# Sparse exact linear systems.
# ---------------------------------------------------------------------------


def solve_sparse_exact(
    equations: Sequence[Dict[int, Fraction]],
    rhs: Sequence[Fraction],
) -> Optional[Tuple[Dict[int, Fraction], List[int]]]:
    """Solve a sparse rational linear system.

    Returns (solution, free_columns) with free columns set to zero, or None
    if the system is inconsistent.  Pivoting is Markowitz-flavoured (sparsest
    column, then sparsest row) and deterministic.
    """
    rows: List[Dict[int, mpq]] = []
    b: List[mpq] = []
    for eq, r in zip(equations, rhs):
        row = {c: mpq(v.numerator, v.denominator) for c, v in eq.items() if v != 0}
        rows.append(row)
        b.append(mpq(r.numerator, r.denominator))
    col_rows: Dict[int, set] = {}
    for i, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(i)
    active = set(range(len(rows)))
    pivots: List[Tuple[int, int]] = []  # (row, col) in elimination order

    while True:
        # check empty active rows for inconsistency, drop the consistent ones
        for i in list(active):
            if not rows[i]:
                if b[i] != 0:
                    return None
                active.discard(i)
        if not active:
            break
        # sparsest column among active rows
        best_col = None
        best_key = None
        for c, members in col_rows.items():
            live = len(members)
            if live == 0:
                continue
            key = (live, c)
            if best_key is None or key < best_key:
                best_key = key
                best_col = c
        if best_col is None:
            break
        members = col_rows[best_col]
        pr = min(members, key=lambda i: (len(rows[i]), i))
        prow = rows[pr]
        pval = prow[best_col]
        for i in list(members):
            if i == pr:
                continue
            row = rows[i]
            factor = row[best_col] / pval
            for c, v in prow.items():
                new = row.get(c, mpq(0)) - factor * v
                if new == 0:
                    if c in row:
                        del row[c]
                        col_rows[c].discard(i)
                else:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(i)
                    row[c] = new
            b[i] -= factor * b[pr]
        # retire the pivot row and column
        for c in prow:
            col_rows[c].discard(pr)
        active.discard(pr)
        pivots.append((pr, best_col))

    solution: Dict[int, mpq] = {}
    pivot_cols = {c for _, c in pivots}
    for pr, pc in reversed(pivots):
        acc = b[pr]
        for c, v in rows[pr].items():
            if c == pc:
                continue
            acc -= v * solution.get(c, mpq(0))
        solution[pc] = acc / rows[pr][pc]
    free = sorted(
        {c for row in rows for c in row if c not in pivot_cols}
    )
    out = {c: _fr(v) for c, v in solution.items()}
    return out, free


# ---------------------------------------------------------------------------
# Row extraction helpers.
# ---------------------------------------------------------------------------


def _row_data(lp: LP):
    """Per-row (label, rel, terms dict over column keys, rhs b)."""
    out = []
    for row in lp.rows:
        terms = row.form.as_dict()
        out.append((row.label, row.rel, terms, -row.form.constant))
    return out


def _objective_vector(lp: LP) -> Dict[int, Fraction]:
    return lp.objective.as_dict()


# ---------------------------------------------------------------------------
# Float path (HiGHS).
# ---------------------------------------------------------------------------


def _scipy_solve(lp: LP):
    from scipy.optimize import linprog
    from scipy.sparse import csr_matrix

    ncols = len(lp.columns)
    col_of = lp.col_index
    c = np.zeros(ncols)
    for key, coef in lp.objective.terms:
        c[col_of[key]] = float(coef)

    def build(rows):
        data, indices, indptr, rhs = [], [], [0], []
        for _, _, terms, b in rows:
            for key, coef in sorted(terms.items()):
                indices.append(col_of[key])
                data.append(float(coef))
            indptr.append(len(data))
            rhs.append(float(b))
        mat = csr_matrix(
            (data, indices, indptr), shape=(len(rows), ncols)
        )
        return mat, np.array(rhs)

    rows = _row_data(lp)
    ineq = [r for r in rows if r[1] == REL_GE]
    eq = [r for r in rows if r[1] == REL_EQ]
    a_ub, b_ub = build(ineq)
    a_eq, b_eq = build(eq)
    res = linprog(
        c,
        A_ub=-a_ub if ineq else None,
        b_ub=-b_ub if ineq else None,
        A_eq=a_eq if eq else None,
        b_eq=b_eq if eq else None,
        bounds=(None, None),
        method="highs",
    )
    return res, ineq, eq


def solve_float(lp: LP, tolerance: float = 1e-9, rationalize: bool = True,
                denominator_cap: int = 10**8) -> Solution:
    """HiGHS solve; duals are rationalized by continued fractions and
    re-verified exactly.  A failed verification yields certified=False."""
    res, ineq, eq = _scipy_solve(lp)
    if res.status == 2:
        return Solution(status=INFEASIBLE, path="float")
    if res.status == 3:
        return Solution(status=UNBOUNDED, path="float")
    if res.status != 0:
        raise SolveError(f"HiGHS failed: {res.message}")
    primal = {key: float(res.x[lp.col_index[key]]) for key in lp.columns}
    dual: Dict[str, float] = {}
    if ineq:
        for (label, _, _, _), marg in zip(ineq, res.ineqlin.marginals):
            dual[label] = -float(marg)
    if eq:
        # equality rows are passed to HiGHS unnegated, unlike the >= rows,
        # so their marginals already carry the right sign
        for (label, _, _, _), marg in zip(eq, res.eqlin.marginals):
            dual[label] = float(marg)
    sol = Solution(
        status=OPTIMAL,
        value=float(res.fun),
        primal=primal,
        dual=dual,
        certified=False,
        path="float",
    )
    if not rationalize:
        return sol
    rat = _rationalize_dual(lp, dual, denominator_cap)
    if rat is None:
        sol.notes.append("dual rationalization failed exact re-verification")
        return sol
    value, exact_dual = rat
    if abs(float(value) - sol.value) > tolerance * max(1.0, abs(sol.value)):
        sol.notes.append(
            "rationalized dual bound differs from float optimum beyond tolerance"
        )
        sol.dual = exact_dual
        sol.value = value
        return sol
    sol.value = value
    sol.dual = exact_dual
    sol.certified = True
    return sol


def _rationalize_dual(lp: LP, dual: Dict[str, float], cap: int):
    """Small-denominator rounding of the float dual; returns (bound, exact
    dual) if the rounded vector is exactly dual-feasible, else None."""
    exact: Dict[str, Fraction] = {}
    for label, val in dual.items():
        q = Fraction(val).limit_denominator(cap)
        if q != 0:
            exact[label] = q
    residual = dict(_objective_vector(lp))
    value = Fraction(0)
    for label, y in exact.items():
        row = lp.row(label)
        if row.rel == REL_GE and y < 0:
            return None
        for key, coef in row.form.terms:
            residual[key] = residual.get(key, Fraction(0)) - y * coef
        value += y * (-row.form.constant)
    if any(v != 0 for v in residual.values()):
        return None
    return value, exact


# ---------------------------------------------------------------------------
# Exact path: float-assisted reconstruction, then verification.
# ---------------------------------------------------------------------------


def _exact_crossover(lp: LP, res, ineq, eq,
                     support_tol: float = 1e-7,
                     tight_tol: float = 1e-6) -> Optional[Solution]:
    rows = ineq + eq
    ncols = len(lp.columns)
    col_of = lp.col_index

    # ---- dual: solve for y on the float support, one equation per column
    support: List[int] = []
    duals = []
    if ineq:
        duals.extend(zip(range(len(ineq)), (-m for m in res.ineqlin.marginals)))
    if eq:
        duals.extend(
            zip(range(len(ineq), len(rows)), (-m for m in res.eqlin.marginals))
        )
    scale = max([abs(d) for _, d in duals], default=1.0)
    for idx, d in duals:
        if rows[idx][1] == REL_EQ or abs(d) > support_tol * max(1.0, scale):
            support.append(idx)
    equations: List[Dict[int, Fraction]] = [dict() for _ in range(ncols)]
    for idx in support:
        _, _, terms, _ = rows[idx]
        for key, coef in terms.items():
            equations[col_of[key]][idx] = coef
    rhs = [Fraction(0)] * ncols
    for key, coef in lp.objective.terms:
        rhs[col_of[key]] = coef
    solved = solve_sparse_exact(equations, rhs)
    if solved is None:
        return None
    y_sol, _ = solved
    dual: Dict[str, Fraction] = {}
    for idx in support:
        y = y_sol.get(idx, Fraction(0))
        label, rel, _, _ = rows[idx]
        if rel == REL_GE and y < 0:
            return None
        if y != 0:
            dual[label] = y
    value = Fraction(0)
    for idx in support:
        y = y_sol.get(idx, Fraction(0))
        value += y * rows[idx][3]

    # ---- primal: solve the tight rows, free coordinates from the float point
    x_float = res.x
    tight: List[int] = []
    for i, (_, rel, terms, b) in enumerate(rows):
        lhs = sum(float(c) * x_float[col_of[k]] for k, c in terms.items())
        slack = lhs - float(b)
        if rel == REL_EQ or abs(slack) <= tight_tol * max(1.0, abs(float(b)), abs(lhs)):
            tight.append(i)
    equations = []
    rhs = []
    for i in tight:
        _, _, terms, b = rows[i]
        equations.append({col_of[k]: c for k, c in terms.items()})
        rhs.append(b)
    solved = solve_sparse_exact(equations, rhs)
    if solved is None:
        return None
    x_sol, free = solved
    for c in range(ncols):
        if c not in x_sol:
            x_sol[c] = Fraction(x_float[c]).limit_denominator(10**6)
    # exact feasibility of every row and strong duality
    for _, rel, terms, b in rows:
        lhs = sum(c * x_sol[col_of[k]] for k, c in terms.items())
        if rel == REL_EQ and lhs != b:
            return None
        if rel == REL_GE and lhs < b:
            return None
    obj = sum(c * x_sol[col_of[k]] for k, c in lp.objective.terms)
    obj += lp.objective.constant
    if obj != value:
        return None
    primal = {key: x_sol[col_of[key]] for key in lp.columns}
    return Solution(
        status=OPTIMAL,
        value=value,
        primal=primal,
        dual=dual,
        certified=True,
        path="exact",
    )


def solve_exact(lp: LP, assist: bool = True,
                tableau_limit: int = 20_000_000) -> Solution:
    """Exact rational optimum with exact primal and dual.

    With `assist` (default) the basis is located in floating point and then
    reconstructed and verified exactly; otherwise (or when reconstruction
    fails) the self-contained exact simplex runs from scratch.
    """
    notes: List[str] = []
    if assist:
        res, ineq, eq = _scipy_solve(lp)
        if res.status == 0:
            sol = _exact_crossover(lp, res, ineq, eq)
            if sol is not None:
                sol.notes.extend(notes)
                return sol
            notes.append("float-assisted reconstruction failed; "
                         "running exact simplex from scratch")
        elif res.status in (2, 3):
            notes.append(
                "float presolve reports "
                + (INFEASIBLE if res.status == 2 else UNBOUNDED)
                + "; confirming exactly"
            )
    sol = _exact_tableau_solve(lp, tableau_limit)
    sol.notes = notes + sol.notes
    return sol


# ---------------------------------------------------------------------------
# Self-contained exact simplex on the dual.
# ---------------------------------------------------------------------------


def _exact_tableau_solve(lp: LP, tableau_limit: int) -> Solution:
    rows = _row_data(lp)
    ncols = len(lp.columns)
    col_of = lp.col_index
    # dual standard form: variables y_i (split for equality rows), equations
    # indexed by LP columns:  sum_i y_i a_i = c,  minimize -b.y
    cols: List[Dict[int, Fraction]] = []
    costs: List[Fraction] = []
    meta: List[Tuple[int, int]] = []  # (row index, sign)
    for i, (_, rel, terms, b) in enumerate(rows):
        vec = {col_of[k]: c for k, c in terms.items()}
        cols.append(vec)
        costs.append(-b)
        meta.append((i, +1))
        if rel == REL_EQ:
            cols.append({k: -c for k, c in vec.items()})
            costs.append(b)
            meta.append((i, -1))
    nz = len(cols)
    if ncols * (nz + ncols + 1) > tableau_limit:
        raise SolveError(
            "LP too large for the exact tableau fallback "
            f"({ncols} x {nz + ncols} after splitting); "
            "float-assisted reconstruction is required at this size"
        )
    rhs = [lp.objective.coefficient(key) for key in lp.columns]
    status, z, pi, value, iters = _tableau_core(cols, costs, rhs, ncols)
    if status == INFEASIBLE:
        # dual infeasible => primal unbounded or infeasible; report unbounded
        # if the primal admits any feasible float point, else infeasible
        res, _, _ = _scipy_solve(lp)
        st = INFEASIBLE if res.status == 2 else UNBOUNDED
        return Solution(status=st, path="exact", iterations=iters)
    if status == UNBOUNDED:
        return Solution(status=INFEASIBLE, path="exact", iterations=iters)
    dual: Dict[str, Fraction] = {}
    for j, val in z.items():
        if val == 0:
            continue
        i, sign = meta[j]
        label = rows[i][0]
        dual[label] = dual.get(label, Fraction(0)) + sign * val
    dual = {k: v for k, v in dual.items() if v != 0}
    primal = {key: pi[c] for key, c in ((k, col_of[k]) for k in lp.columns)}
    return Solution(
        status=OPTIMAL,
        value=-value,  # tableau minimized -b.y
        primal=primal,
        dual=dual,
        certified=True,
        path="exact",
        iterations=iters,
    )


def _tableau_core(cols, costs, rhs, m):
    """Dense two-phase simplex: min costs.z st sum_j cols[j] z_j = rhs, z>=0.

    Returns (status, z as dict, row multipliers pi, objective value, iters).
    Deterministic: Dantzig with lowest-index ties, permanent switch to
    Bland's rule after a degenerate streak.
    """
    n = len(cols)
    width = n + m + 1
    T = np.full((m, width), mpq(0), dtype=object)
    sign = [1] * m
    for r in range(m):
        v = mpq(rhs[r].numerator, rhs[r].denominator)
        if v < 0:
            sign[r] = -1
            v = -v
        T[r, n + r] = mpq(1)
        T[r, width - 1] = v
    for j, vec in enumerate(cols):
        for r, coef in vec.items():
            T[r, j] = sign[r] * mpq(coef.numerator, coef.denominator)

    basis = [n + r for r in range(m)]
    # phase-1 reduced costs (artificial costs 1) and phase-2 costs
    cost1 = np.full(width, mpq(0), dtype=object)
    for j in range(n):
        cost1[j] = -sum(T[r, j] for r in range(m))
    cost1[width - 1] = -sum(T[r, width - 1] for r in range(m))
    cost2 = np.full(width, mpq(0), dtype=object)
    for j, c in enumerate(costs):
        cost2[j] = mpq(c.numerator, c.denominator)

    iters = 0
    max_iters = 200_000

    def pivot(r, j, costrows):
        piv = T[r, j]
        if piv != 1:
            T[r] = T[r] / piv
        colvals = T[:, j].copy()
        for i in range(m):
            if i != r and colvals[i] != 0:
                T[i] = T[i] - colvals[i] * T[r]
        for cr in costrows:
            if cr[j] != 0:
                cr -= cr[j] * T[r]
        basis[r] = j

    def run_phase(costrow, allowed, costrows):
        nonlocal iters
        bland = False
        stall = 0
        last = costrow[width - 1]
        while True:
            iters += 1
            if iters > max_iters:
                raise SolveError("simplex iteration limit exceeded")
            enter = -1
            if bland:
                for j in range(allowed):
                    if costrow[j] < 0 and j not in basis_set:
                        enter = j
                        break
            else:
                best = mpq(0)
                for j in range(allowed):
                    if j in basis_set:
                        continue
                    cj = costrow[j]
                    if cj < best:
                        best = cj
                        enter = j
            if enter < 0:
                return OPTIMAL
            leave = -1
            ratio = None
            for r in range(m):
                a = T[r, enter]
                if a > 0:
                    q = T[r, width - 1] / a
                    if ratio is None or q < ratio or (
                        q == ratio and basis[r] < basis[leave]
                    ):
                        ratio = q
                        leave = r
            if leave < 0:
                return UNBOUNDED
            pivot(leave, enter, costrows)
            basis_set.clear()
            basis_set.update(basis)
            if costrow[width - 1] == last:
                stall += 1
                if stall > 30:
                    bland = True
            else:
                stall = 0
                last = costrow[width - 1]

    basis_set = set(basis)
    status = run_phase(cost1, n, [cost1, cost2])
    if status == UNBOUNDED:
        raise SolveError("phase-1 unbounded: internal error")
    if cost1[width - 1] != 0:  # phase-1 optimum above zero
        return INFEASIBLE, {}, {}, None, iters
    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n:
            for j in range(n):
                if T[r, j] != 0 and j not in basis_set:
                    pivot(r, j, [cost1, cost2])
                    basis_set.clear()
                    basis_set.update(basis)
                    break
    status = run_phase(cost2, n, [cost2])
    if status == UNBOUNDED:
        return UNBOUNDED, {}, {}, None, iters
    z = {}
    for r in range(m):
        if basis[r] < n and T[r, width - 1] != 0:
            z[basis[r]] = _fr(T[r, width - 1])
    pi = {}
    for r in range(m):
        # equation multipliers, read off the artificials' reduced costs;
        # the original primal point is their negation (the tableau solves
        # the dual), so the sign here is chosen to hand back x directly
        pi[r] = _fr(cost2[n + r] * sign[r])
    value = _fr(-cost2[width - 1])
    return OPTIMAL, z, pi, value, iters
