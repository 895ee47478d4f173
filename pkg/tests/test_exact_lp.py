from fractions import Fraction

import pytest

from adeglab.exact_lp import (
    EQ,
    FREE,
    GE,
    INFEASIBLE,
    LE,
    NONNEG,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    check_certificate,
    solve_ip,
    solve_lp,
)
from adeglab.errors import CertificateError, NodeBudgetExceeded


def test_single_constraint_minimum():
    sol = solve_lp(LinearProgram([1], [[1]], [GE], [3], [FREE]))
    assert sol.status == OPTIMAL and sol.objective_value == 3
    assert sol.dual == (Fraction(1),)


def test_unbounded_maximum():
    sol = solve_lp(LinearProgram([1], [[1]], [GE], [0], [FREE], maximize=True))
    assert sol.status == UNBOUNDED


def test_infeasible():
    lp = LinearProgram([1], [[1], [1]], [GE, LE], [2, 1], [NONNEG])
    assert solve_lp(lp).status == INFEASIBLE


def test_and2_degree1_error_lp():
    # variables c0, c1, c2 (free), eps; rows -eps <= p(x) - f(x) <= eps
    pts = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
    fv = [1, 1, 1, -1]
    rows, senses, rhs = [], [], []
    for (x1, x2), fx in zip(pts, fv):
        rows.append([1, x1, x2, 1])
        senses.append(GE)
        rhs.append(fx)
        rows.append([1, x1, x2, -1])
        senses.append(LE)
        rhs.append(fx)
    lp = LinearProgram([0, 0, 0, 1], rows, senses, rhs, [FREE, FREE, FREE, NONNEG])
    for rule in ("dantzig", "bland"):
        for method in ("primal", "dual", "auto"):
            sol = solve_lp(lp, rule=rule, method=method)
            assert sol.objective_value == Fraction(1, 2)
            check_certificate(lp, sol.primal, sol.dual, sol.objective_value)


def test_maximize_dual_signs():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    lp = LinearProgram([1, 1], [[1, 2], [3, 1]], [LE, LE], [4, 6], [NONNEG, NONNEG], maximize=True)
    sol = solve_lp(lp)
    assert sol.objective_value == Fraction(14, 5)
    check_certificate(lp, sol.primal, sol.dual, sol.objective_value)


def test_equality_rows():
    lp = LinearProgram([1, 2], [[1, 1]], [EQ], [1], [NONNEG, NONNEG])
    sol = solve_lp(lp)
    assert sol.objective_value == 1 and sol.primal == (1, 0)


def test_bad_certificate_rejected():
    lp = LinearProgram([1], [[1]], [GE], [3], [FREE])
    with pytest.raises(CertificateError):
        check_certificate(lp, [Fraction(4)], [Fraction(1)], Fraction(3))


def test_ip_rounds_up():
    lp = LinearProgram([1], [[2]], [GE], [3], [NONNEG])
    sol = solve_ip(lp, [0])
    assert sol.objective_value == 2 and sol.primal[0] == 2


def test_ip_infeasible():
    # 2x = 1 has no integer solution
    lp = LinearProgram([1], [[2]], [EQ], [1], [NONNEG])
    assert solve_ip(lp, [0]).status == INFEASIBLE


def test_ip_node_budget():
    # 2x - 2y = 1 over integers is infeasible; the relaxation keeps branching
    lp = LinearProgram([0, 0], [[2, -2]], [EQ], [1], [NONNEG, NONNEG])
    with pytest.raises(NodeBudgetExceeded):
        solve_ip(lp, [0, 1], node_budget=5)


def test_validation():
    with pytest.raises(ValueError):
        LinearProgram([1], [[1, 2]], [GE], [1], [FREE])
