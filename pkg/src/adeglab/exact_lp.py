"""Dense exact-rational simplex with dual extraction, plus branch and bound.

Public values are :class:`fractions.Fraction`.  The tableau itself stores
``gmpy2.mpq`` objects in numpy object arrays, which is several times faster
than ``Fraction`` while remaining exact.

Dual convention
---------------
For a minimization problem the returned ``dual`` vector ``y`` satisfies
``b @ y == objective_value`` and is dual feasible: ``y_i >= 0`` on ``>=``
rows, ``y_i <= 0`` on ``<=`` rows, free on ``=`` rows, with
``A[:, j] @ y <= c_j`` for nonnegative variables and ``== c_j`` for free ones.
For a maximization problem the signs flip (``y_i <= 0`` on ``>=`` rows and
``A[:, j] @ y >= c_j``), again with ``b @ y == objective_value``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from .config import cap
from .errors import CertificateError, DimensionMismatchError, NodeBudgetExceeded

mpq = gmpy2.mpq

LE, EQ, GE = "<=", "==", ">="
FREE, NONNEG = "free", "nonneg"
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

_ZERO = mpq(0)
_ONE = mpq(1)


def to_fraction(q) -> Fraction:
    """Convert an mpq / int / Fraction to Fraction."""
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    return Fraction(int(q.numerator), int(q.denominator))


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        raise TypeError("floats are not accepted; pass exact rationals")
    return to_fraction(v)


@dataclass(frozen=True)
class LinearProgram:
    """``min``/``max`` of ``objective @ x`` subject to row constraints.

    ``senses[i]`` is one of ``"<="``, ``"=="``, ``">="`` and ``bounds[j]`` is
    ``"free"`` or ``"nonneg"``.
    """

    objective: tuple
    rows: tuple
    senses: tuple
    rhs: tuple
    bounds: tuple
    maximize: bool = False

    def __post_init__(self):
        obj = tuple(_as_fraction(v) for v in self.objective)
        rows = tuple(tuple(_as_fraction(v) for v in r) for r in self.rows)
        rhs = tuple(_as_fraction(v) for v in self.rhs)
        senses = tuple(self.senses)
        bounds = tuple(self.bounds)
        n = len(obj)
        if any(len(r) != n for r in rows):
            raise DimensionMismatchError("every constraint row must match the objective width")
        if len(senses) != len(rows) or len(rhs) != len(rows):
            raise DimensionMismatchError("senses/rhs length must equal the number of rows")
        if len(bounds) != n:
            raise DimensionMismatchError("one bound per variable required")
        if any(s not in (LE, EQ, GE) for s in senses):
            raise DimensionMismatchError(f"unknown sense in {senses!r}")
        if any(b not in (FREE, NONNEG) for b in bounds):
            raise DimensionMismatchError(f"unknown bound in {bounds!r}")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def with_rows(self, rows, senses, rhs) -> "LinearProgram":
        """Copy with extra constraints appended."""
        return LinearProgram(
            self.objective,
            self.rows + tuple(tuple(r) for r in rows),
            self.senses + tuple(senses),
            self.rhs + tuple(rhs),
            self.bounds,
            self.maximize,
        )


@dataclass(frozen=True)
class LPSolution:
    status: str
    primal: tuple = ()
    dual: tuple = ()
    objective_value: Fraction | None = None
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


# ---------------------------------------------------------------------------
# standard-form core: min c x, A x = b, x >= 0


class _Tableau:
    """Two-phase tableau simplex on ``min c x, A x = b, x >= 0``."""

    def __init__(self, c, A, b, rule):
        m, n = A.shape
        self.m, self.n = m, n
        self.rule = rule
        sign = np.array([(-1 if bi < 0 else 1) for bi in b], dtype=object)
        self.sign = sign
        T = np.empty((m + 1, n + m + 1), dtype=object)
        T[:m, :n] = A * sign[:, None]
        T[:m, n : n + m] = _ZERO
        for i in range(m):
            T[i, n + i] = _ONE
        T[:m, -1] = b * sign
        T[m, :] = _ZERO
        self.T = T
        self.c = c
        self.basis = list(range(n, n + m))
        self.pivots = 0

    def _set_objective(self, cost_full):
        """Objective row = reduced costs for the current basis."""
        T, m = self.T, self.m
        row = np.array(list(cost_full) + [_ZERO], dtype=object)
        for i, j in enumerate(self.basis):
            cj = cost_full[j]
            if cj != 0:
                row = row - cj * T[i]
        T[m] = row

    def _pivot(self, r, s):
        T = self.T
        piv = T[r, s]
        if piv != 1:
            T[r] = T[r] / piv
        col = T[:, s].copy()
        col[r] = _ZERO
        nz = np.nonzero(col != 0)[0]
        if len(nz):
            T[nz] -= np.outer(col[nz], T[r])
        self.basis[r] = s
        self.pivots += 1

    def _run(self, allowed: int) -> str:
        """Iterate until optimal or unbounded; columns >= ``allowed`` never enter."""
        T, m = self.T, self.m
        rule = self.rule
        degenerate_run = 0
        bland = rule == "bland"
        while True:
            red = T[m, :allowed]
            neg = np.nonzero(red < 0)[0]
            if len(neg) == 0:
                return OPTIMAL
            if bland:
                s = int(neg[0])
            else:
                vals = red[neg]
                s = int(neg[int(np.argmin(vals))])
            col = T[:m, s]
            pos = np.nonzero(col > 0)[0]
            if len(pos) == 0:
                return UNBOUNDED
            ratios = T[pos, -1] / col[pos]
            best = min(ratios)
            ties = pos[np.nonzero(ratios == best)[0]]
            if len(ties) == 1:
                r = int(ties[0])
            else:
                r = int(min(ties, key=lambda i: self.basis[i]))
            if best == 0:
                degenerate_run += 1
                if degenerate_run > 50:
                    bland = True
            else:
                # Bland's rule only while stalled: each degenerate run ends, and
                # the objective then strictly improves, so no basis repeats.
                degenerate_run = 0
                bland = rule == "bland"
            self._pivot(r, s)

    def solve(self):
        m, n = self.m, self.n
        T = self.T
        # unit columns (e.g. slacks) replace artificials in the starting basis
        A = T[:m, :n]
        nnz = np.count_nonzero(A != 0, axis=0)
        used = set()
        for j in np.nonzero(nnz == 1)[0]:
            i = int(np.nonzero(A[:, j] != 0)[0][0])
            if i not in used and A[i, j] > 0:
                used.add(i)
                self._pivot(i, int(j))
        self.pivots = 0
        # phase I
        phase1 = [_ZERO] * n + [_ONE] * m
        self._set_objective(phase1)
        self._run(n + m)
        if T[m, -1] != 0:
            return INFEASIBLE, None, None
        # drive artificials out where possible
        for i in range(m):
            if self.basis[i] >= n:
                nzs = np.nonzero(T[i, :n] != 0)[0]
                if len(nzs):
                    self._pivot(i, int(nzs[0]))
        cost = list(self.c) + [_ZERO] * m
        self._set_objective(cost)
        status = self._run(n)
        if status == UNBOUNDED:
            return UNBOUNDED, None, None
        x = [_ZERO] * n
        for i, j in enumerate(self.basis):
            if j < n:
                x[j] = T[i, -1]
        y = [-T[m, n + i] * self.sign[i] for i in range(m)]
        return OPTIMAL, x, y


def _standard_form(lp: LinearProgram):
    """Return (c, A, b, recover) for ``min c x, A x = b, x >= 0``."""
    nv = lp.num_vars
    m = lp.num_rows
    cols = []  # (original var, coefficient sign) for structural columns
    for j, bd in enumerate(lp.bounds):
        cols.append((j, 1))
        if bd == FREE:
            cols.append((j, -1))
    n_slack = sum(1 for s in lp.senses if s != EQ)
    ncols = len(cols) + n_slack
    A = np.empty((m, ncols), dtype=object)
    A[:, :] = _ZERO
    dense = np.empty((m, nv), dtype=object)
    for i, r in enumerate(lp.rows):
        dense[i, :] = [mpq(v) for v in r] if nv else []
    for k, (j, sg) in enumerate(cols):
        A[:, k] = dense[:, j] if sg > 0 else -dense[:, j]
    k = len(cols)
    for i, s in enumerate(lp.senses):
        if s == LE:
            A[i, k] = _ONE
            k += 1
        elif s == GE:
            A[i, k] = -_ONE
            k += 1
    obj = [mpq(v) for v in lp.objective]
    if lp.maximize:
        obj = [-v for v in obj]
    c = [obj[j] if sg > 0 else -obj[j] for (j, sg) in cols] + [_ZERO] * n_slack
    b = np.array([mpq(v) for v in lp.rhs], dtype=object)

    def recover(xs):
        x = [_ZERO] * nv
        for k, (j, sg) in enumerate(cols):
            if xs[k] != 0:
                x[j] = x[j] + (xs[k] if sg > 0 else -xs[k])
        return x

    return c, A, b, recover


def _solve_direct(lp: LinearProgram, rule: str):
    c, A, b, recover = _standard_form(lp)
    if lp.num_rows == 0:
        # no constraints: optimal at 0 unless a cost pushes an unbounded direction
        for j, bd in enumerate(lp.bounds):
            cj = lp.objective[j] * (-1 if lp.maximize else 1)
            if cj < 0 or (bd == FREE and cj != 0):
                return UNBOUNDED, None, None, 0
        return OPTIMAL, [_ZERO] * lp.num_vars, [], 0
    tab = _Tableau(c, A, b, rule)
    status, xs, y = tab.solve()
    if status != OPTIMAL:
        return status, None, None, tab.pivots
    x = recover(xs)
    if lp.maximize:
        y = [-v for v in y]
    return OPTIMAL, x, y, tab.pivots


def _dual_program(lp: LinearProgram) -> LinearProgram:
    """The LP dual, written so that its multipliers are the primal solution.

    For ``min c x`` the dual is ``max b y`` with one row per primal variable
    (``<=`` for nonnegative, ``==`` for free) and sign-constrained ``y``.
    Negative-sign variables are handled by negating their column.
    """
    flip = []  # +1 if y_i >= 0 or free is represented directly, -1 if y_i <= 0 stored negated
    bounds = []
    for s in lp.senses:
        if lp.maximize:
            s = {LE: GE, GE: LE, EQ: EQ}[s]
        if s == GE:
            flip.append(1)
            bounds.append(NONNEG)
        elif s == LE:
            flip.append(-1)
            bounds.append(NONNEG)
        else:
            flip.append(1)
            bounds.append(FREE)
    sgn_obj = -1 if lp.maximize else 1
    obj = [sgn_obj * f * b for f, b in zip(flip, lp.rhs)]
    rows = []
    senses = []
    rhs = []
    for j in range(lp.num_vars):
        rows.append([sgn_obj * flip[i] * lp.rows[i][j] for i in range(lp.num_rows)])
        senses.append(LE if lp.bounds[j] == NONNEG else EQ)
        rhs.append(sgn_obj * lp.objective[j])
    return LinearProgram(obj, rows, senses, rhs, bounds, maximize=True), flip, sgn_obj


def _solve_via_dual(lp: LinearProgram, rule: str):
    D, flip, sgn_obj = _dual_program(lp)
    status, u, x, piv = _solve_direct(D, rule)
    if status == OPTIMAL:
        # x are the multipliers of D (max convention): b_D @ x == value, and for
        # max problems they satisfy the dual sign rules of min c x.  Recover y.
        y = [f * ui for f, ui in zip(flip, u)]
        return OPTIMAL, [mpq(v) for v in x], y, piv
    if status == UNBOUNDED:
        return INFEASIBLE, None, None, piv
    # dual infeasible: primal is unbounded or infeasible
    st, x, y, piv2 = _solve_direct(lp, rule)
    return st, x, y, piv + piv2


def check_certificate(lp: LinearProgram, x, y, value) -> None:
    """Raise CertificateError unless (x, y) is an exact optimality certificate."""
    for i, (row, s, bi) in enumerate(zip(lp.rows, lp.senses, lp.rhs)):
        lhs = sum((a * xj for a, xj in zip(row, x) if a != 0), Fraction(0))
        ok = (lhs <= bi) if s == LE else (lhs >= bi) if s == GE else (lhs == bi)
        if not ok:
            raise CertificateError(f"primal row {i} violated: {lhs} {s} {bi}")
    for j, bd in enumerate(lp.bounds):
        if bd == NONNEG and x[j] < 0:
            raise CertificateError(f"variable {j} negative")
    sense_sign = -1 if lp.maximize else 1
    for i, s in enumerate(lp.senses):
        yi = y[i] * sense_sign
        if (s == GE and yi < 0) or (s == LE and yi > 0):
            raise CertificateError(f"dual sign wrong on row {i}")
    for j, bd in enumerate(lp.bounds):
        aty = sum((lp.rows[i][j] * y[i] for i in range(lp.num_rows) if y[i] != 0), Fraction(0))
        cj = lp.objective[j]
        if bd == FREE:
            ok = aty == cj
        else:
            ok = (aty <= cj) if not lp.maximize else (aty >= cj)
        if not ok:
            raise CertificateError(f"dual constraint for variable {j} violated")
    pv = sum((cj * xj for cj, xj in zip(lp.objective, x)), Fraction(0))
    dv = sum((bi * yi for bi, yi in zip(lp.rhs, y)), Fraction(0))
    if pv != value or dv != value:
        raise CertificateError(f"duality gap: primal {pv}, dual {dv}, reported {value}")


def _fast_certificate(lp, x, y, value):
    """Vectorized version of :func:`check_certificate` on mpq arrays."""
    A = np.array([[mpq(v) for v in r] for r in lp.rows], dtype=object).reshape(lp.num_rows, lp.num_vars)
    xa = np.array(x, dtype=object)
    ya = np.array(y, dtype=object)
    lhs = A.dot(xa) if lp.num_rows else np.array([], dtype=object)
    for i, s in enumerate(lp.senses):
        bi = lp.rhs[i]
        li = lhs[i]
        ok = (li <= bi) if s == LE else (li >= bi) if s == GE else (li == bi)
        if not ok:
            raise CertificateError(f"primal row {i} violated")
    sense_sign = -1 if lp.maximize else 1
    for j, bd in enumerate(lp.bounds):
        if bd == NONNEG and x[j] < 0:
            raise CertificateError(f"variable {j} negative")
    for i, s in enumerate(lp.senses):
        yi = y[i] * sense_sign
        if (s == GE and yi < 0) or (s == LE and yi > 0):
            raise CertificateError(f"dual sign wrong on row {i}")
    aty = A.T.dot(ya) if lp.num_rows else np.array([_ZERO] * lp.num_vars, dtype=object)
    for j, bd in enumerate(lp.bounds):
        cj = lp.objective[j]
        if bd == FREE:
            ok = aty[j] == cj
        else:
            ok = (aty[j] <= cj) if not lp.maximize else (aty[j] >= cj)
        if not ok:
            raise CertificateError(f"dual constraint for variable {j} violated")
    pv = sum((mpq(cj) * xj for cj, xj in zip(lp.objective, x)), _ZERO)
    dv = sum((mpq(bi) * yi for bi, yi in zip(lp.rhs, y)), _ZERO)
    if pv != value or dv != value:
        raise CertificateError(f"duality gap: primal {pv}, dual {dv}, reported {value}")


def solve_lp(lp: LinearProgram, rule: str = "dantzig", method: str = "auto") -> LPSolution:
    """Solve ``lp`` exactly.

    ``rule`` is ``"bland"`` or ``"dantzig"`` (most negative reduced cost; falls
    back to Bland's rule after a run of degenerate pivots so termination is
    still guaranteed).  ``method`` picks the tableau orientation: ``"primal"``,
    ``"dual"`` or ``"auto"`` (solve the dual program when rows greatly
    outnumber variables).  Optimal solutions are always re-verified exactly.
    """
    if not isinstance(lp, LinearProgram):
        raise DimensionMismatchError("solve_lp expects a LinearProgram")
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    if method == "auto":
        method = "dual" if lp.num_rows > lp.num_vars else "primal"
    if method == "dual":
        status, x, y, piv = _solve_via_dual(lp, rule)
    elif method == "primal":
        status, x, y, piv = _solve_direct(lp, rule)
    else:
        raise ValueError(f"unknown method {method!r}")
    if status != OPTIMAL:
        return LPSolution(status, stats={"pivots": piv, "method": method})
    value = sum((mpq(cj) * xj for cj, xj in zip(lp.objective, x)), _ZERO)
    _fast_certificate(lp, x, y, value)
    return LPSolution(
        OPTIMAL,
        tuple(to_fraction(v) for v in x),
        tuple(to_fraction(v) for v in y),
        to_fraction(value),
        stats={"pivots": piv, "method": method},
    )


# ---------------------------------------------------------------------------
# branch and bound


def _floor(q: Fraction) -> int:
    return math.floor(q)


def solve_ip(
    lp: LinearProgram,
    integer_vars: Iterable[int],
    node_budget: int | None = None,
    rule: str = "dantzig",
) -> LPSolution:
    """Depth-first branch and bound over the exact LP relaxation.

    Branches on the lowest-index fractional integer variable and explores the
    floor branch first.  Raises :class:`NodeBudgetExceeded` (carrying the
    incumbent and a global lower bound) when ``node_budget`` nodes were used.
    The returned ``dual`` is the relaxation dual at the node that produced the
    incumbent.
    """
    ints = sorted(set(integer_vars))
    if any(j < 0 or j >= lp.num_vars for j in ints):
        raise DimensionMismatchError("integer variable index out of range")
    if node_budget is None:
        node_budget = cap("NODE_BUDGET")
    sense = -1 if lp.maximize else 1  # compare in minimization terms
    best: LPSolution | None = None
    best_key = None
    stack = [()]  # each node: tuple of (var, "<=" or ">=", bound)
    nodes = 0
    while stack:
        if nodes >= node_budget:
            raise NodeBudgetExceeded(
                f"branch and bound exceeded {node_budget} nodes",
                incumbent=best,
                lower_bound=_root_bound(lp, rule),
            )
        node = stack.pop()
        nodes += 1
        extra_rows, extra_senses, extra_rhs = [], [], []
        for j, s, v in node:
            row = [0] * lp.num_vars
            row[j] = 1
            extra_rows.append(row)
            extra_senses.append(s)
            extra_rhs.append(v)
        sub = lp.with_rows(extra_rows, extra_senses, extra_rhs) if node else lp
        sol = solve_lp(sub, rule=rule)
        if sol.status == INFEASIBLE:
            continue
        if sol.status == UNBOUNDED:
            raise DimensionMismatchError("LP relaxation unbounded; solve_ip requires a bounded relaxation")
        key = sense * sol.objective_value
        if best_key is not None and key >= best_key:
            continue
        frac = next((j for j in ints if sol.primal[j].denominator != 1), None)
        if frac is None:
            best = LPSolution(
                OPTIMAL,
                sol.primal,
                sol.dual[: lp.num_rows],
                sol.objective_value,
                stats={"nodes": nodes},
            )
            best_key = key
            continue
        v = sol.primal[frac]
        fl = _floor(v)
        stack.append(node + ((frac, GE, Fraction(fl + 1)),))
        stack.append(node + ((frac, LE, Fraction(fl)),))
    if best is None:
        return LPSolution(INFEASIBLE, stats={"nodes": nodes})
    best.stats["nodes"] = nodes
    return best


def _root_bound(lp, rule):
    sol = solve_lp(lp, rule=rule)
    return sol.objective_value if sol.is_optimal else None
