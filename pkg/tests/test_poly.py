from fractions import Fraction

import pytest

from adeglab.boolfn import TruthTable, make_named
from adeglab.errors import DimensionMismatchError
from adeglab.poly import (
    MultilinearPoly,
    UnivariatePoly,
    chebyshev,
    chebyshev_and_approx,
    fourier,
    linf_error,
    markov_bound_check,
    sign_represents,
    symmetric_lift,
    weight,
)


def test_fourier_examples():
    assert fourier(TruthTable.constant(3)) == MultilinearPoly(3, {0: 1})
    and2 = fourier(make_named("AND", m=2))
    h = Fraction(1, 2)
    assert and2 == MultilinearPoly(2, {0: h, 1: h, 2: h, 3: -h})
    assert fourier(make_named("PARITY", m=3)) == MultilinearPoly(3, {7: 1})


def test_weight_examples():
    and2 = fourier(make_named("AND", m=2))
    assert weight(and2) == 2
    assert weight(and2, include_constant=False) == Fraction(3, 2)
    assert weight(MultilinearPoly(3)) == 0
    chi = MultilinearPoly(1, {1: 1})
    assert weight(chi) == weight(chi, include_constant=False) == 1


def test_linf_error_examples():
    f = make_named("ED", N=2, R=4)
    assert linf_error(fourier(f), f) == 0
    assert linf_error(MultilinearPoly(f.n), f) == 1


def test_arithmetic_and_json():
    p = MultilinearPoly(2, {1: 1})
    q = MultilinearPoly(2, {2: 1})
    assert (p * p) == MultilinearPoly(2, {0: 1})
    assert (p * q)[3] == 1
    assert (1 - p)[0] == 1 and (1 - p)[1] == -1
    assert MultilinearPoly.from_json((p + q / 3).to_json()) == p + q / 3
    assert p.embed(4, 2) == MultilinearPoly(4, {4: 1})
    with pytest.raises(DimensionMismatchError):
        p + MultilinearPoly(3)
    assert MultilinearPoly(2).degree == -1


def test_evaluate_matches_table():
    p = fourier(make_named("AND", m=3)) * Fraction(2, 3) + 1
    tab = p.table()
    for x in range(8):
        assert p.evaluate(x) == tab[x]


def test_sign_represents():
    f = make_named("AND", m=2)
    assert sign_represents(MultilinearPoly(2, {0: 1, 1: 1, 2: 1}), f)
    assert not sign_represents(MultilinearPoly(2, {0: -1, 1: 1, 2: 1}), f)


def test_univariate_and_chebyshev():
    assert chebyshev(3) == UnivariatePoly([0, -3, 0, 4])
    P = UnivariatePoly([1, 2, 3])
    assert P(Fraction(1, 2)) == Fraction(11, 4)
    assert P.derivative() == UnivariatePoly([2, 6])
    q, r = P.divmod(UnivariatePoly([1, 1]))
    assert q * UnivariatePoly([1, 1]) + r == P


def test_symmetric_lift_profile():
    # profile is indexed by the number of +1 coordinates
    prof = [Fraction(k) for k in (3, 1, -1)]
    p = symmetric_lift(2, prof)
    assert p.table() == [-1, 1, 1, 3]


@pytest.mark.parametrize("m, eps", [(1, Fraction(1, 5)), (4, Fraction(1, 3)), (9, Fraction(1, 8))])
def test_chebyshev_and(m, eps):
    ap = chebyshev_and_approx(m, eps)
    f = make_named("AND", m=m)
    assert linf_error(ap.poly, f) == ap.error <= eps
    assert ap.degree <= m
    if m == 1:
        assert ap.poly == MultilinearPoly(1, {1: 1})


def test_markov_examples():
    r = markov_bound_check(UnivariatePoly([0, 1]), 1, 1)
    assert r.max_abs == 1 and r.max_deriv == 1
    r = markov_bound_check(chebyshev(3), 4, 1)
    assert r.max_abs == 1 and r.max_deriv == 9
    r = markov_bound_check(UnivariatePoly([Fraction(1, 2), Fraction(1, 2)]), 1, 1)
    assert r.max_abs == 1 and r.max_deriv == Fraction(1, 2)
