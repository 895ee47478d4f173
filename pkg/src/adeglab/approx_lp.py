"""Exact LP/IP formulations of approximate degree, weights and threshold weight."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .boolfn import TruthTable, character_values
from .errors import CertificateError, DimensionMismatchError, NodeBudgetExceeded, PreconditionError
from .exact_lp import (
    EQ,
    FREE,
    GE,
    NONNEG,
    LinearProgram,
    LPSolution,
    solve_ip,
    solve_lp,
)
from .poly import MultilinearPoly, low_degree_subsets

ADEG_EPS = "ADEG_EPS"
ODEG_EPS = "ODEG_EPS"
WEIGHT = "WEIGHT"
OW_WEIGHT = "OW_WEIGHT"
THRESH_MARGIN = "THRESH_MARGIN"
THRESH_WEIGHT_IP = "THRESH_WEIGHT_IP"
HARDEST_DIST = "HARDEST_DIST"


@functools.total_ordering
class _Infinity:
    """Explicit +∞ marker for measures that do not exist (infeasible programs)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("adeglab-inf")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def value_str(v) -> str:
    return "inf" if v is INF else str(v)


@dataclass(frozen=True)
class MeasureResult:
    kind: str
    value: Any  # Fraction or INF
    primal: MultilinearPoly | None
    dual_raw: tuple | None
    d: int
    n: int
    solution: LPSolution | None = None
    exact: bool = True
    bracket: tuple | None = None
    extra: dict = field(default_factory=dict)

    @property
    def is_infinite(self) -> bool:
        return self.value is INF

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "n": self.n,
            "d": self.d,
            "value": value_str(self.value),
            "exact": self.exact,
        }
        if self.bracket is not None:
            out["bracket"] = [value_str(v) for v in self.bracket]
        if self.primal is not None:
            out["primal"] = self.primal.to_json()
        if self.dual_raw is not None:
            out["dual"] = [str(v) for v in self.dual_raw]
        for k, v in self.extra.items():
            out[k] = v
        return out


def _check_degree(f: TruthTable, d: int):
    if not 0 <= d <= f.n:
        raise DimensionMismatchError(f"degree {d} outside [0, {f.n}]")


def character_matrix(n: int, subsets) -> np.ndarray:
    """Rows indexed by inputs, columns by subsets: χ_S(x) in int64."""
    return np.stack([character_values(n, S) for S in subsets], axis=1) if subsets else np.zeros((1 << n, 0), np.int64)


# ---------------------------------------------------------------------------
# best_error


def error_lp(f: TruthTable, d: int, one_sided: bool):
    """The ε-approximation LP and its row layout.

    Columns: c_S for |S| <= d in (size, lex) order, then ε >= 0.  For each input
    x (index order) a "lo" row ``Σ c χ + ε >= f(x)`` (omitted on TRUE inputs
    when one-sided) followed by a "hi" row ``-Σ c χ + ε >= -f(x)``.
    Returns (lp, subsets, layout) with layout a list of (x, +1 | -1).
    """
    subsets = low_degree_subsets(f.n, d)
    chi = character_matrix(f.n, subsets)
    rows, rhs, layout = [], [], []
    fv = f.values
    for x in range(f.size):
        r = [int(v) for v in chi[x]]
        if not (one_sided and fv[x] == -1):
            rows.append(r + [1])
            rhs.append(int(fv[x]))
            layout.append((x, 1))
        rows.append([-v for v in r] + [1])
        rhs.append(-int(fv[x]))
        layout.append((x, -1))
    k = len(subsets)
    lp = LinearProgram(
        [0] * k + [1],
        rows,
        [GE] * len(rows),
        rhs,
        [FREE] * k + [NONNEG],
    )
    return lp, subsets, layout


def dual_to_function(dual, layout, size: int) -> tuple:
    """φ(x) = y_lo(x) - y_hi(x) from the row multipliers."""
    phi = [Fraction(0)] * size
    for y, (x, s) in zip(dual, layout):
        if y:
            phi[x] += y if s > 0 else -y
    return tuple(phi)


def best_error(f: TruthTable, d: int, one_sided: bool = False) -> MeasureResult:
    """Optimal ε for degree-d (one-sided) pointwise approximation of f."""
    _check_degree(f, d)
    lp, subsets, layout = error_lp(f, d, one_sided)
    sol = solve_lp(lp)
    if not sol.is_optimal:
        raise CertificateError(f"error LP reported {sol.status}")
    coeffs = dict(zip(subsets, sol.primal[:-1]))
    phi = dual_to_function(sol.dual, layout, f.size)
    return MeasureResult(
        ODEG_EPS if one_sided else ADEG_EPS,
        sol.objective_value,
        MultilinearPoly(f.n, coeffs),
        phi,
        d,
        f.n,
        solution=sol,
    )


def min_degree(f: TruthTable, eps, one_sided: bool = False) -> int:
    """Least d with best_error(f, d) <= eps (ties count as attained)."""
    eps = Fraction(eps)
    for d in range(f.n + 1):
        if best_error(f, d, one_sided).value <= eps:
            return d
    return f.n


# ---------------------------------------------------------------------------
# approximate weight


def weight_lp(f: TruthTable, d: int, eps: Fraction, one_sided_nonconstant: bool):
    """Weight LP: columns c_S (free), then a_S >= 0 (a_∅ absent in non-constant mode).

    Rows per input as in :func:`error_lp` with ε fixed (ε moved to the
    right-hand side), followed by ``a_S - c_S >= 0`` and ``a_S + c_S >= 0``.
    """
    subsets = low_degree_subsets(f.n, d)
    k = len(subsets)
    weighted = [S for S in subsets if not (one_sided_nonconstant and S == 0)]
    pos = {S: k + i for i, S in enumerate(weighted)}
    ncols = k + len(weighted)
    chi = character_matrix(f.n, subsets)
    fv = f.values
    rows, rhs, layout = [], [], []
    for x in range(f.size):
        r = [int(v) for v in chi[x]] + [0] * len(weighted)
        if not (one_sided_nonconstant and fv[x] == -1):
            rows.append(r)
            rhs.append(int(fv[x]) - eps)
            layout.append((x, 1))
        rows.append([-v for v in r])
        rhs.append(-int(fv[x]) - eps)
        layout.append((x, -1))
    n_io = len(rows)
    for i, S in enumerate(subsets):
        if S not in pos:
            continue
        for sgn in (-1, 1):
            r = [0] * ncols
            r[pos[S]] = 1
            r[i] = sgn
            rows.append(r)
            rhs.append(0)
    obj = [0] * k + [1] * len(weighted)
    lp = LinearProgram(obj, rows, [GE] * len(rows), rhs, [FREE] * k + [NONNEG] * len(weighted))
    return lp, subsets, layout, n_io


def approx_weight(f: TruthTable, d: int, eps, one_sided_nonconstant: bool = False) -> MeasureResult:
    """W_ε(f, d), or W*_ε(f, d) when ``one_sided_nonconstant`` is set."""
    _check_degree(f, d)
    eps = Fraction(eps)
    if not 0 <= eps <= 2:
        raise PreconditionError("eps must lie in [0, 2]")
    kind = OW_WEIGHT if one_sided_nonconstant else WEIGHT
    lp, subsets, layout, n_io = weight_lp(f, d, eps, one_sided_nonconstant)
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        return MeasureResult(kind, INF, None, None, d, f.n, solution=sol, extra={"eps": str(eps)})
    if not sol.is_optimal:
        raise CertificateError(f"weight LP reported {sol.status}")
    k = len(subsets)
    coeffs = dict(zip(subsets, sol.primal[:k]))
    phi = dual_to_function(sol.dual[:n_io], layout, f.size)
    return MeasureResult(
        kind,
        sol.objective_value,
        MultilinearPoly(f.n, coeffs),
        phi,
        d,
        f.n,
        solution=sol,
        extra={"eps": str(eps)},
    )


def weight_dual_parts(res: MeasureResult, f: TruthTable) -> tuple:
    """(φ, Σ_x (y_lo + y_hi)) for a weight-LP result; used by the weight combiner."""
    lp, subsets, layout, n_io = weight_lp(f, res.d, Fraction(res.extra["eps"]), res.kind == OW_WEIGHT)
    dual = res.solution.dual[:n_io]
    return dual_to_function(dual, layout, f.size), sum(dual, Fraction(0))


# ---------------------------------------------------------------------------
# threshold weight


def _margin_lp(f: TruthTable, d: int):
    subsets = low_degree_subsets(f.n, d)
    k = len(subsets)
    chi = character_matrix(f.n, subsets)
    fv = f.values
    rows, rhs = [], []
    for x in range(f.size):
        rows.append([int(fv[x]) * int(v) for v in chi[x]] + [0] * k)
        rhs.append(1)
    for i in range(k):
        for sgn in (-1, 1):
            r = [0] * (2 * k)
            r[k + i] = 1
            r[i] = sgn
            rows.append(r)
            rhs.append(0)
    lp = LinearProgram([0] * k + [1] * k, rows, [GE] * len(rows), rhs, [FREE] * k + [NONNEG] * k)
    return lp, subsets


def threshold_weight(f: TruthTable, d: int, node_budget: int | None = None) -> MeasureResult:
    """W(f, d): least Σ|c_S| over integer degree-d p with f(x) p(x) >= 1 everywhere."""
    _check_degree(f, d)
    if f.n > 5:
        raise PreconditionError("threshold_weight is limited to n <= 5")
    lp, subsets = _margin_lp(f, d)
    relax = solve_lp(lp)
    if relax.status == "infeasible":
        return MeasureResult(THRESH_WEIGHT_IP, INF, None, None, d, f.n, solution=relax)
    k = len(subsets)
    try:
        sol = solve_ip(lp, range(k), node_budget=node_budget)
    except NodeBudgetExceeded as exc:
        inc = exc.incumbent
        hi = inc.objective_value if inc is not None else INF
        primal = MultilinearPoly(f.n, dict(zip(subsets, inc.primal[:k]))) if inc is not None else None
        return MeasureResult(
            THRESH_WEIGHT_IP, hi, primal, None, d, f.n, solution=inc, exact=False,
            bracket=(relax.objective_value, hi),
        )
    poly = MultilinearPoly(f.n, dict(zip(subsets, sol.primal[:k])))
    return MeasureResult(
        THRESH_WEIGHT_IP, sol.objective_value, poly, None, d, f.n, solution=sol,
        bracket=(relax.objective_value, sol.objective_value),
    )


def threshold_margin(f: TruthTable, d: int) -> MeasureResult:
    """LP relaxation of the threshold-weight program (a lower bound on W(f, d))."""
    _check_degree(f, d)
    lp, subsets = _margin_lp(f, d)
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        return MeasureResult(THRESH_MARGIN, INF, None, None, d, f.n, solution=sol)
    k = len(subsets)
    return MeasureResult(
        THRESH_MARGIN, sol.objective_value, MultilinearPoly(f.n, dict(zip(subsets, sol.primal[:k]))),
        None, d, f.n, solution=sol,
    )


# ---------------------------------------------------------------------------
# hardest distribution


def hardest_distribution(f: TruthTable, d: int, check_weight: bool | None = None) -> MeasureResult:
    """min over μ of max_{|S|<=d} |E_μ[f χ_S]|.

    ``dual_raw`` holds μ.  When ``check_weight`` (default: n <= 4) the exact
    threshold weight is computed and ``v* >= 1/W`` is asserted.
    """
    _check_degree(f, d)
    if f.n > 12:
        raise PreconditionError("hardest_distribution is limited to n <= 12")
    subsets = low_degree_subsets(f.n, d)
    chi = character_matrix(f.n, subsets)
    fv = f.values.astype(np.int64)
    size = f.size
    rows, rhs = [], []
    for j, S in enumerate(subsets):
        corr = [int(v) for v in fv * chi[:, j]]
        rows.append([-c for c in corr] + [1])
        rhs.append(0)
        rows.append(corr + [1])
        rhs.append(0)
    rows.append([1] * size + [0])
    rhs.append(1)
    senses = [GE] * (len(rows) - 1) + [EQ]
    lp = LinearProgram([0] * size + [1], rows, senses, rhs, [NONNEG] * (size + 1))
    sol = solve_lp(lp)
    if not sol.is_optimal:
        raise CertificateError(f"hardest-distribution LP reported {sol.status}")
    mu = tuple(sol.primal[:size])
    v = sol.objective_value
    extra = {}
    if check_weight is None:
        check_weight = f.n <= 4
    if check_weight:
        W = threshold_weight(f, d)
        extra["threshold_weight"] = value_str(W.value)
        if W.value is not INF and W.exact:
            bound = 1 / W.value
            extra["weight_bound_holds"] = v >= bound
            if v < bound:
                raise CertificateError(f"v* = {v} below 1/W = {bound}")
    return MeasureResult(HARDEST_DIST, v, None, mu, d, f.n, solution=sol, extra=extra)
