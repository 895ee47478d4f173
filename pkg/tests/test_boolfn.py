from fractions import Fraction

import numpy as np
import pytest

from adeglab.boolfn import (
    TruthTable,
    block_sensitivity,
    compose,
    flip_change_probability,
    index_of,
    make_named,
    point,
)
from adeglab.errors import CapExceededError, DimensionMismatchError, PreconditionError


def test_and2_values():
    f = make_named("AND", m=2)
    assert [f((1, 1)), f((-1, 1)), f((1, -1)), f((-1, -1))] == [1, 1, 1, -1]


def test_point_index_roundtrip():
    for i in range(16):
        assert index_of(point(4, i)) == i


def test_ed22():
    f = make_named("ED", N=2, R=2)
    assert list(f.values) == [1, -1, -1, 1]


def test_or_of_and():
    F = compose(make_named("OR", m=2), make_named("AND", m=2))
    for x in range(16):
        bits = [(x >> k) & 1 for k in range(4)]
        true = (bits[0] and bits[1]) or (bits[2] and bits[3])
        assert F(x) == (-1 if true else 1)


def test_compositions():
    f = make_named("PARITY", m=3)
    assert compose(make_named("OR", m=1), f) == f
    assert compose(make_named("OR", m=2), make_named("OR", m=2)) == make_named("OR", m=4)
    assert compose(make_named("AND", m=2), make_named("OR", m=2)) == make_named("ANDOR_TREE", fanins=[2, 2])


def test_read_once_dnf():
    assert make_named("READ_ONCE_DNF", t=2, m=2) == compose(make_named("OR", m=2), make_named("AND", m=2))


def test_text_roundtrip():
    f = make_named("ED", N=2, R=4)
    assert TruthTable.from_text(f.to_text()) == f
    assert TruthTable.from_text(f.to_text(hex_packed=True)) == f


def test_immutable():
    f = make_named("AND", m=2)
    with pytest.raises(ValueError):
        f.values[0] = -1


def test_errors():
    with pytest.raises(DimensionMismatchError):
        TruthTable(2, [1, 1, 1])
    with pytest.raises(PreconditionError):
        make_named("AND")
    with pytest.raises(ValueError):
        make_named("NOPE", m=2)
    with pytest.raises(CapExceededError):
        TruthTable.constant(40)


def test_block_sensitivity_examples():
    f = make_named("AND", m=3)
    for a in range(7):
        assert block_sensitivity(f, a) == 1
    assert block_sensitivity(f, 7) == 3
    assert block_sensitivity(make_named("PARITY", m=3), 0) == 3


def test_flip_probability():
    f = TruthTable(1, [1, -1])
    assert flip_change_probability(f, 0, Fraction(1, 4)) == Fraction(1, 4)
    g = make_named("PARITY", m=2)
    # changes iff exactly one bit flips
    assert flip_change_probability(g, 0, Fraction(1, 4)) == 2 * Fraction(1, 4) * Fraction(3, 4)


def test_true_false_sets():
    f = make_named("AND", m=2)
    assert list(f.true_set()) == [3]
    assert list(f.false_set()) == [0, 1, 2]
    assert (-f).values.tolist() == [-1, -1, -1, 1]
    assert np.all(TruthTable.character(2, 3).values == np.array([1, -1, -1, 1]))
