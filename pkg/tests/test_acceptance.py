"""Acceptance criteria 1-13; each test prints one PASS/FAIL line and then asserts."""

import itertools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from adeglab.amplify import canonical_outer, combine, or_amplify, weight_amplify
from adeglab.approx_lp import (
    INF,
    approx_weight,
    best_error,
    dual_to_function,
    error_lp,
    min_degree,
    threshold_weight,
)
from adeglab.boolfn import (
    TruthTable,
    block_sensitivity,
    block_sensitivity_patterns,
    compose,
    flip_change_probability,
    make_named,
)
from adeglab.exact_lp import check_certificate
from adeglab.poly import MultilinearPoly, linf_error, low_degree_subsets, sign_represents, wht, weight
from adeglab.symmetrize import PropertyEncoding, one_sided_repair, symmetrize_dual_domain
from adeglab.transforms import Distribution, discrepancy, krause_distribution, pattern_matrix
from adeglab.upper_bounds import (
    cheb_or_of_and_ptf,
    ed_rational,
    or_linear_approx,
    or_of_rational_ptf,
    ptf_to_approx,
    rational_and,
    rational_ptf_weight_bound,
)
from adeglab.witness import DualWitness, WitnessUnavailable, from_dual_lp, verify


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\nAC{number:02d} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return emit


def one_sided_error(p: MultilinearPoly, f: TruthTable) -> Fraction:
    """max over FALSE inputs of |p - 1| and over TRUE inputs of max(p + 1, 0)."""
    worst = Fraction(0)
    for x, v in enumerate(p.table()):
        if f.values[x] == 1:
            worst = max(worst, abs(v - 1))
        else:
            worst = max(worst, v + 1)
    return worst


# ---------------------------------------------------------------------------


def test_ac01_duality_audit(report):
    start = time.time()
    checked = unavailable = 0
    failures = []
    for n in (2, 3):
        for code in range(1 << (1 << n)):
            f = TruthTable(n, [-1 if code >> x & 1 else 1 for x in range(1 << n)])
            for d in range(n):
                for one_sided in (False, True):
                    res = best_error(f, d, one_sided)
                    sol = res.solution
                    lp, _, layout = error_lp(f, d, one_sided)
                    try:
                        check_certificate(lp, sol.primal, sol.dual, sol.objective_value)
                    except Exception as exc:  # noqa: BLE001
                        failures.append((n, code, d, one_sided, f"certificate: {exc}"))
                        continue
                    err = one_sided_error(res.primal, f) if one_sided else linf_error(res.primal, f)
                    if err != res.value:
                        failures.append((n, code, d, one_sided, f"primal error {err} != {res.value}"))
                    try:
                        psi = from_dual_lp(sol, res.kind, f, d)
                    except WitnessUnavailable:
                        phi = dual_to_function(sol.dual, layout, f.size)
                        if res.value != 0 or any(phi) or not one_sided:
                            failures.append((n, code, d, one_sided, "witness missing"))
                        unavailable += 1
                        continue
                    rep = verify(psi, f, d, None, one_sided)
                    if not rep.passed or rep.correlation != res.value:
                        failures.append((n, code, d, one_sided, f"witness {rep.to_json()}"))
                    checked += 1
    elapsed = time.time() - start
    ok = not failures and elapsed < 300
    report(
        1,
        ok,
        f"{checked} witnesses verified, {unavailable} one-sided cases with eps*=0 and zero dual "
        f"(no one-sided witness exists), {len(failures)} failures, {elapsed:.1f}s",
    )
    assert ok, failures[:5]


def test_ac02_one_sided_matches_two_sided_for_and(report):
    rows = []
    for m in (2, 3, 4):
        f = make_named("AND", m=m)
        rows.append((m, min_degree(f, Fraction(1, 3), one_sided=True), min_degree(f, Fraction(1, 3))))
    ok = all(a == b for _, a, b in rows)
    report(2, ok, "m, odeg_1/3, deg_1/3: " + "; ".join(f"{m},{a},{b}" for m, a, b in rows))
    assert ok


def test_ac03_or_amplification_instance(report):
    start = time.time()
    details = []
    ok = True
    f = make_named("AND", m=4)
    for t in (2, 3):
        res = or_amplify(f, 1, t)
        zeta, F = res.witness, res.target
        target = 1 - Fraction(1, 2 ** t)
        spec = zeta.spectrum()
        _, den = zeta._scaled_ints()
        low_zero = all(spec[S] == 0 for S in low_degree_subsets(F.n, 1))
        lp_err = best_error(F, 1).value
        this = (
            zeta.l1_norm == 1
            and low_zero
            and zeta.correlation(F) > target
            and zeta.one_sided(F)
            and len(zeta) == 1 << (4 * t)
            and lp_err > target
        )
        ok = ok and this
        details.append(f"t={t}: corr={zeta.correlation(F)} > {target}, LP eps*={lp_err}")
    elapsed = time.time() - start
    ok = ok and elapsed < 600
    report(3, ok, "; ".join(details) + f", {elapsed:.1f}s")
    assert ok


def test_ac04_linear_or_counterexample(report):
    vals = {k: linf_error(or_linear_approx(k), make_named("OR", m=k)) for k in (4, 8)}
    ok = all(v == 1 - Fraction(1, 2 * k) for k, v in vals.items()) and all(
        or_linear_approx(k).degree == 1 for k in vals
    )
    report(4, ok, ", ".join(f"mt={k}: error {v}" for k, v in vals.items()))
    assert ok


def _random_witness(rng: random.Random, n: int, phd: int) -> DualWitness:
    """Random ψ with unit L1 mass orthogonal to every χ_S with |S| <= phd."""
    while True:
        r = np.array([rng.randint(-6, 6) for _ in range(1 << n)], dtype=np.int64)
        spec = wht(r, n)
        for S in range(1 << n):
            if bin(S).count("1") > phd:
                spec[S] = 0
        # r minus its low-degree part, times 2^n to stay integral
        vals = (r << n) - wht(spec, n)
        if np.any(vals):
            psi = DualWitness(n, [int(v) for v in vals])
            return psi.scaled(1 / psi.l1_norm)


def test_ac05_combiner_identities(report):
    rng = random.Random(20240607)
    failures = []
    cases = 0
    while cases < 50:
        t = rng.randint(1, 3)
        m = rng.randint(1, 12 // t)
        if m * t > 12:
            continue
        inner = _random_witness(rng, m, rng.randint(0, m - 1))
        if cases % 2 == 0:
            outer = canonical_outer(t)
        else:
            outer = _random_witness(rng, t, rng.randint(0, t - 1)) if t > 1 else canonical_outer(1)
        zeta = combine(outer, inner)
        expected_phd = (outer.pure_high_degree + 1) * (inner.pure_high_degree + 1) - 1
        if zeta.l1_norm != 1:
            failures.append((t, m, "l1", zeta.l1_norm))
        if zeta.pure_high_degree < min(expected_phd, t * m):
            failures.append((t, m, "phd", zeta.pure_high_degree, expected_phd))
        cases += 1
    ok = not failures
    report(5, ok, f"{cases} random balanced inner witnesses, {len(failures)} identity failures")
    assert ok, failures


def _repair_case(N: int, R: int, d: int):
    enc = PropertyEncoding(N, R)
    f = make_named("ED", N=N, R=R)
    res = best_error(f, d, one_sided=True)
    r = one_sided_repair(res.primal, f, enc, res.value)
    err = linf_error(r, f)
    bound = enc.bits * max(res.primal.degree, 0)
    return res.value, err, r.degree, bound


def test_ac06_symmetric_property_pipeline(report):
    rows = []
    for N, R, ds in ((2, 2, (0, 1, 2)), (3, 4, (1, 2, 3, 4))):
        for d in ds:
            rows.append((N, R, d) + _repair_case(N, R, d))
    ok = all(err <= eps and deg <= bound for *_, eps, err, deg, bound in rows)
    report(
        6,
        ok,
        "; ".join(f"ED({N},{R}) d={d}: eps*={e}, repaired {err}, deg {g}<={b}" for N, R, d, e, err, g, b in rows),
    )
    assert ok


def test_ac07_symmetrized_ed_duals_one_sided(report):
    f = make_named("ED", N=2, R=2)
    enc = PropertyEncoding(2, 2)
    exact_deg = min_degree(f, Fraction(1, 3))
    rows = []
    for d in range(exact_deg):
        res = best_error(f, d)
        psi = from_dual_lp(res.solution, res.kind, f, d)
        sym = symmetrize_dual_domain(psi, enc)
        rows.append((d, sym.one_sided(f), sym.pure_high_degree >= d, sym.correlation(f)))
    ok = bool(rows) and all(a and b for _, a, b, _ in rows)
    report(7, ok, f"approximate degree {exact_deg}; " + "; ".join(
        f"d={d}: one-sided={a}, phd ok={b}, corr={c}" for d, a, b, c in rows))
    assert ok


def test_ac08_weight_combiner_instance(report):
    res = weight_amplify(make_named("AND", m=3), 1, 2)
    mt = Fraction(1, 2 ** 4) * res.inner.l1_norm ** (1 - 2)
    ok = res.passed and res.mt == mt
    report(
        8,
        ok,
        f"M_t={res.mt}, max low correlation {res.max_low_correlation} <= 1, "
        f"margin {res.margin} > {res.bound}",
    )
    assert ok


def test_ac09_krause_selector(report):
    cases = [
        (TruthTable.character(1, 1), 1),
        (make_named("AND", m=2), 2),
        (make_named("AND", m=3), 2),
    ]
    reps = [krause_distribution(F, d) for F, d in cases]
    ok = all(r.passed and r.checked == 1 << (3 * r.F.n) for r in reps)
    report(9, ok, "; ".join(
        f"n={r.F.n}, d={r.d}: max E^2={r.max_corr_sq} <= {r.bound_sq}, structure={r.structure_ok}" for r in reps))
    assert ok


def test_ac10_pattern_matrix_discrepancy(report):
    funcs = {
        "x": TruthTable(1, [1, -1]),
        "-x": TruthTable(1, [-1, 1]),
        "1": TruthTable.constant(1, 1),
        "-1": TruthTable.constant(1, -1),
    }
    rows = []
    for name, F in funcs.items():
        M = pattern_matrix(F)
        disc = discrepancy(M, Distribution.uniform(M.shape))
        for d in (1, 2):
            W = threshold_weight(F, d - 1).value
            bound = max(Fraction(0) if W is INF else Fraction(2) / W, Fraction(1, 2 ** d))
            rows.append((name, d, disc, W, bound, disc * disc <= bound))
    ok = all(r[-1] for r in rows)
    report(10, ok, "uniform-mu disc (an upper bound on disc): " + "; ".join(
        f"F={n} d={d}: {disc}^2 <= {b} (W={W})" for n, d, disc, W, b, _ in rows))
    assert ok


def test_ac11_upper_bound_certificates(report):
    notes = []
    for s, t in itertools.product(range(1, 9), range(1, 9)):
        r = rational_and(s, t)
        assert r.error <= Fraction(1, t) and r.min_q > 0
    notes.append("rational_and s,t<=8")
    ptf_cases = [((2, 4), 1), ((2, 4), 2), ((2, 4), 3), ((3, 4), 3), ((4, 5), 3), ((6, 3), 2)]
    for (s, tt), t in ptf_cases:
        r = rational_and(s, tt)
        ptf = or_of_rational_ptf(r, t)
        F = compose(make_named("OR", m=t), make_named("AND", m=s))
        assert sign_represents(ptf, F)
        assert weight(ptf) <= rational_ptf_weight_bound(r, t)
        approx = ptf_to_approx(ptf, F)
        assert linf_error(approx, F) <= 1 - 1 / weight(ptf)
    notes.append(f"or_of_rational_ptf {len(ptf_cases)} cases")
    cheb_cases = [(4, 2, Fraction(1, 4)), (4, 3, Fraction(1, 4)), (1, 3, Fraction(1, 4)), (3, 4, Fraction(1, 5)), (6, 2, Fraction(1, 3))]
    for m, t, eps in cheb_cases:
        ptf = cheb_or_of_and_ptf(m, t, eps)
        F = compose(make_named("OR", m=t), make_named("AND", m=m))
        assert sign_represents(ptf, F)
        approx = ptf_to_approx(ptf, F)
        assert linf_error(approx, F) <= 1 - 1 / weight(ptf)
    notes.append(f"cheb_or_of_and_ptf {len(cheb_cases)} cases")
    and2 = MultilinearPoly(2, {0: 1, 1: 1, 2: 1})
    ok_ex = linf_error(ptf_to_approx(and2, make_named("AND", m=2)), make_named("AND", m=2)) == Fraction(2, 3)
    ed = ed_rational(2, 2, 4)
    ok = ok_ex and ed.error <= Fraction(1, 4)
    notes.append(f"ptf_to_approx AND_2 error 2/3, ED(2,2) rational error {ed.error}")
    report(11, ok, "; ".join(notes))
    assert ok


def test_ac12_flip_probability_bound(report):
    failures = 0
    total = 0
    for n in range(1, 5):
        size = 1 << n
        bs = block_sensitivity_patterns(n)
        codes = np.arange(1 << size, dtype=np.int64)
        table = ((codes[:, None] >> np.arange(size)) & 1).astype(np.int64)  # 1 marks TRUE
        sizes = np.array([bin(B).count("1") for B in range(size)])
        for gamma in (Fraction(1, 8), Fraction(1, 4)):
            g, den = gamma.numerator, gamma.denominator
            # Pr[B] * den^n as integers
            wts = np.array([g ** int(k) * (den - g) ** (n - int(k)) for k in sizes], dtype=np.int64)
            for a in range(size):
                diff = table[:, np.arange(size) ^ a] != table[:, [a]]
                keys = diff.astype(np.int64) @ (np.int64(1) << np.arange(size, dtype=np.int64))
                prob = diff.astype(np.int64) @ wts
                # prob / den^n <= 2 g/den * bs  <=>  prob <= 2 g den^(n-1) bs
                rhs = 2 * g * den ** (n - 1) * bs[keys]
                failures += int(np.sum(prob > rhs))
                total += len(codes)
    # spot-check the vectorized path against the library routines
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 4)
        f = TruthTable(n, [rng.choice([1, -1]) for _ in range(1 << n)])
        a = rng.randrange(1 << n)
        gamma = rng.choice([Fraction(1, 8), Fraction(1, 4)])
        if flip_change_probability(f, a, gamma) > 2 * gamma * block_sensitivity(f, a):
            failures += 1
    ok = failures == 0
    report(12, ok, f"{total} (f, a, gamma) triples over all f with n<=4, {failures} violations")
    assert ok


def test_ac13_trend_checks(report):
    errs = [best_error(make_named("AND", m=m), 1).value for m in range(2, 9)]
    ws = [approx_weight(make_named("AND", m=m), 1, Fraction(3, 4), True).value for m in range(2, 7)]
    mono_err = all(a <= b for a, b in zip(errs, errs[1:]))
    mono_w = all(not (b < a) for a, b in zip(ws, ws[1:]))
    ok = mono_err and mono_w
    report(13, ok, "best_error(AND_m,1) m=2..8: " + ", ".join(map(str, errs))
           + "; W*_3/4(AND_m,1) m=2..6: " + ", ".join(map(str, ws)))
    assert ok
