import random
from fractions import Fraction

import numpy as np
import pytest

from adeglab.approx_lp import best_error
from adeglab.boolfn import make_named
from adeglab.errors import CapExceededError, PreconditionError
from adeglab.poly import MultilinearPoly, fourier, linf_error, low_degree_subsets
from adeglab.symmetrize import (
    OrbitAssumptionError,
    PropertyEncoding,
    act,
    is_symmetric_property,
    one_sided_repair,
    psym,
    symmetrize_dual_domain,
)
from adeglab.witness import DualWitness, optimal_witness


def test_encoding_roundtrip():
    enc = PropertyEncoding(3, 4)
    for x in range(1 << enc.m):
        assert enc.encode(enc.decode(x)) == x
    assert enc.decode(enc.encode((2, 0, 3))) == (2, 0, 3)


def test_action_matches_single_act():
    enc = PropertyEncoding(2, 4)
    perms = list(enc.actions())
    assert len(perms) == enc.group_order() == 48
    assert all(sorted(p.tolist()) == list(range(16)) for p in perms)
    x = enc.encode((1, 3))
    ys = {int(p[x]) for p in perms}
    assert ys == {act(enc, x, s, pi) for s in __import__("itertools").permutations(range(4)) for pi in [(0, 1), (1, 0)]}


def test_psym_constant_and_single_bit():
    enc = PropertyEncoding(2, 2)
    c = MultilinearPoly(2, {0: 3})
    assert psym(c, enc) == c
    p = psym(MultilinearPoly(2, {1: 1}), enc)
    f = make_named("ED", N=2, R=2)
    vals = [p.evaluate(int(x)) for x in f.true_set()]
    assert len(set(vals)) == 1


def test_degree_law_and_invariance():
    rng = random.Random(3)
    for N, R in ((2, 2), (2, 4), (3, 2), (3, 4)):
        enc = PropertyEncoding(N, R)
        for deg in (1, 2):
            subs = low_degree_subsets(enc.m, deg)
            p = MultilinearPoly(enc.m, {S: rng.randint(-3, 3) for S in subs})
            q = psym(p, enc)
            assert q.degree <= enc.bits * max(p.degree, 0)
            tab = np.array(q.table(), dtype=object)
            for perm in enc.actions():
                assert np.array_equal(tab[perm], tab)


def test_repair_exact_poly():
    f = make_named("ED", N=2, R=2)
    enc = PropertyEncoding(2, 2)
    assert one_sided_repair(fourier(f), f, enc, 0) == fourier(f)


def test_repair_optimal_ed():
    f = make_named("ED", N=2, R=4)
    enc = PropertyEncoding(2, 4)
    for d in range(enc.m):
        res = best_error(f, d, one_sided=True)
        r = one_sided_repair(res.primal, f, enc, res.value)
        assert linf_error(r, f) <= res.value
        assert r.degree <= enc.bits * d


def test_repair_rescales():
    # TRUE value -3 lies below -1 - eps, so the repair rescales it to -1
    f = make_named("ED", N=2, R=2)
    enc = PropertyEncoding(2, 2)
    p = MultilinearPoly(2, {0: -1, 3: 2})
    r = one_sided_repair(p, f, enc, Fraction(1, 2))
    assert [r.evaluate(int(x)) for x in f.true_set()] == [-1, -1]
    assert linf_error(r, f) == 0


def test_repair_errors():
    enc = PropertyEncoding(2, 2)
    and2 = make_named("AND", m=2)
    p = best_error(and2, 1, one_sided=True)
    with pytest.raises(OrbitAssumptionError):
        one_sided_repair(p.primal, and2, enc, p.value)
    with pytest.raises(PreconditionError):
        one_sided_repair(MultilinearPoly(2, {0: 5}), make_named("ED", N=2, R=2), enc, Fraction(1, 2))
    assert is_symmetric_property(make_named("ED", N=2, R=2), enc)


def test_dual_symmetrization():
    f = make_named("ED", N=2, R=2)
    enc = PropertyEncoding(2, 2)
    psi, _ = optimal_witness(f, 0)
    s = symmetrize_dual_domain(psi, enc)
    assert s.one_sided(f) and symmetrize_dual_domain(s, enc) == s
    chi = DualWitness(2, [Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4), Fraction(-1, 4)])
    spread = symmetrize_dual_domain(chi, enc)
    assert spread.pure_high_degree >= chi.pure_high_degree


def test_group_cap(monkeypatch):
    monkeypatch.setenv("ADEG_LAB_MAX_GROUP", "10")
    with pytest.raises(CapExceededError):
        next(PropertyEncoding(2, 4).actions())
