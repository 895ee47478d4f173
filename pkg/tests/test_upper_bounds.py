from fractions import Fraction

import pytest

from adeglab.boolfn import TruthTable, compose, make_named
from adeglab.errors import PreconditionError
from adeglab.poly import MultilinearPoly, linf_error, sign_represents, weight
from adeglab.upper_bounds import (
    NotAPTFError,
    cheb_or_of_and_ptf,
    ed_clauses,
    ed_rational,
    metadata_table,
    or_linear_approx,
    or_of_rational_ptf,
    ptf_to_approx,
    rational_and,
    rational_ptf_weight_bound,
    sharp_threshold_rows,
)


def test_rational_and_examples():
    r = rational_and(1, 2)
    assert r.p.evaluate((1,)) / r.q.evaluate((1,)) == Fraction(3, 5)
    assert r.error == Fraction(2, 5)
    assert rational_and(2, 4).error <= Fraction(1, 4)
    with pytest.raises(PreconditionError):
        rational_and(0, 1)


@pytest.mark.parametrize("t", [1, 2, 3])
def test_or_of_rational_ptf(t):
    r = rational_and(2, 4)
    ptf = or_of_rational_ptf(r, t)
    F = compose(make_named("OR", m=t), make_named("AND", m=2))
    assert sign_represents(ptf, F)
    assert all(c.denominator == 1 for c in ptf.coeffs.values())
    assert ptf.degree <= t
    assert weight(ptf) <= rational_ptf_weight_bound(r, t)


def test_or_of_rational_needs_small_error():
    with pytest.raises(PreconditionError):
        or_of_rational_ptf(rational_and(2, 1), 2)


def test_ptf_to_approx_examples():
    f = TruthTable.character(1, 1)
    assert linf_error(ptf_to_approx(MultilinearPoly(1, {1: 1}), f), f) == 0
    and2 = make_named("AND", m=2)
    q = ptf_to_approx(MultilinearPoly(2, {0: 1, 1: 1, 2: 1}), and2, 3)
    assert linf_error(q, and2) == Fraction(2, 3)
    with pytest.raises(NotAPTFError):
        ptf_to_approx(MultilinearPoly(2, {0: -1, 1: 1, 2: 1}), and2)
    with pytest.raises(NotAPTFError):
        ptf_to_approx(MultilinearPoly(2, {0: 1, 1: 1, 2: 1}), and2, 4)


@pytest.mark.parametrize("m, t, eps", [(4, 2, Fraction(1, 4)), (1, 3, Fraction(1, 4)), (4, 3, Fraction(1, 4))])
def test_cheb_or_of_and(m, t, eps):
    ptf = cheb_or_of_and_ptf(m, t, eps)
    F = compose(make_named("OR", m=t), make_named("AND", m=m))
    assert sign_represents(ptf, F)
    if m == 1:
        assert ptf == MultilinearPoly(3, {0: -2, 1: 1, 2: 1, 4: 1})


def test_cheb_threshold_parameter():
    with pytest.raises(PreconditionError):
        cheb_or_of_and_ptf(4, 3, Fraction(1, 3))
    with pytest.raises(PreconditionError):
        cheb_or_of_and_ptf(4, 2, Fraction(1, 4), threshold=Fraction(1, 4))
    assert cheb_or_of_and_ptf(4, 2, Fraction(1, 5), threshold=Fraction(1, 4)).degree >= 1


def test_ed_pipeline():
    clauses = ed_clauses(2, 2)
    assert len(clauses) == 1 and clauses[0].degree == 2
    r = ed_rational(2, 2, 3)
    assert r.error <= Fraction(1, 3) and r.min_q > 0


def test_linear_or():
    for k in (4, 8):
        assert linf_error(or_linear_approx(k), make_named("OR", m=k)) == 1 - Fraction(1, 2 * k)


def test_tables():
    rows = metadata_table(2, 2)
    assert all(Fraction(r["weight"]) <= Fraction(r["weight_bound"]) for r in rows)
    assert all(r["degree"] <= r["degree_bound"] for r in rows)
    sharp = sharp_threshold_rows(2, 2)
    assert all(r["threshold_ok"] for r in sharp["rows"])
