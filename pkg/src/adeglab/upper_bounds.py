"""Explicit approximators and PTFs, each certified by exhaustive evaluation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .approx_lp import best_error
from .boolfn import TruthTable, check_arity, compose, make_named
from .errors import CertificateError, PreconditionError
from .poly import (
    MultilinearPoly,
    chebyshev_and_approx,
    common_denominator,
    fourier,
    linf_error,
    sign_represents,
    weight,
)


class NotAPTFError(PreconditionError):
    """The polynomial does not sign-represent the function with integer coefficients."""


class SignCheckFailure(CertificateError):
    """A constructed PTF failed its exhaustive sign check."""


@dataclass(frozen=True)
class RationalApproximator:
    """p/q with q > 0 on the cube and |f - p/q| <= bound everywhere."""

    p: MultilinearPoly
    q: MultilinearPoly
    f: TruthTable
    bound: Fraction
    error: Fraction
    min_q: Fraction
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.p.n

    def to_json(self) -> dict:
        out = {
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "bound": str(self.bound),
            "error": str(self.error),
            "min_q": str(self.min_q),
        }
        out.update(self.meta)
        return out


def certify_rational(p: MultilinearPoly, q: MultilinearPoly, f: TruthTable, bound) -> RationalApproximator:
    """Exhaustively check q > 0 and |f - p/q| <= bound; return the certificate."""
    bound = Fraction(bound)
    pv, qv = p.table(), q.table()
    min_q = min(qv)
    if min_q <= 0:
        raise CertificateError("denominator is not positive on the cube")
    err = max(abs(int(fx) - a / b) for fx, a, b in zip(f.values, pv, qv))
    if err > bound:
        raise CertificateError(f"rational error {err} exceeds bound {bound}")
    return RationalApproximator(p, q, f, bound, err, min_q)


def _sum_poly(n: int, offset: int = 0, count: int | None = None) -> MultilinearPoly:
    count = n if count is None else count
    return MultilinearPoly(n, {1 << (offset + i): 1 for i in range(count)})


def rational_and(s: int, t: int) -> RationalApproximator:
    """(ts - 1 + tΣx)/(ts + 1 + tΣx), within 1/t of AND_s."""
    if s < 1 or t < 1:
        raise PreconditionError("s and t must be positive")
    sx = _sum_poly(s)
    p = t * sx + (t * s - 1)
    q = t * sx + (t * s + 1)
    r = certify_rational(p, q, make_named("AND", m=s), Fraction(1, t))
    return RationalApproximator(
        r.p, r.q, r.f, r.bound, r.error, r.min_q,
        {"s": s, "t": t, "degree": 1, "weight": str(max(weight(p), weight(q)))},
    )


def _integer_scale(*polys: MultilinearPoly) -> int:
    return common_denominator(c for p in polys for c in p.coeffs.values())


def or_of_rational_ptf(r: RationalApproximator, t: int) -> MultilinearPoly:
    """Integer PTF (1-t)Π q_j + Σ_i p_i Π_{j≠i} q_j for OR_t(f, ..., f)."""
    if t < 1:
        raise PreconditionError("t must be positive")
    if not r.error < Fraction(1, t):
        raise PreconditionError(f"rational error {r.error} is not below 1/t = {Fraction(1, t)}")
    m = r.n
    n = m * t
    check_arity(n)
    k = _integer_scale(r.p, r.q)
    p_int, q_int = r.p * k, r.q * k
    ps = [p_int.embed(n, i * m) for i in range(t)]
    qs = [q_int.embed(n, i * m) for i in range(t)]
    prod_all = MultilinearPoly(n, {0: 1})
    for q in qs:
        prod_all = prod_all * q
    total = prod_all * (1 - t)
    for i in range(t):
        term = ps[i]
        for j in range(t):
            if j != i:
                term = term * qs[j]
        total = total + term
    F = compose(make_named("OR", m=t), r.f)
    if not sign_represents(total, F):
        raise SignCheckFailure("OR-of-rational PTF failed the sign check")
    return total


def rational_ptf_weight_bound(r: RationalApproximator, t: int) -> Fraction:
    """w^t (m + t w) with w the larger weight of the integer-scaled p and q."""
    k = _integer_scale(r.p, r.q)
    w = max(weight(r.p * k), weight(r.q * k))
    return w ** t * (r.n + t * w)


def ptf_to_approx(p: MultilinearPoly, f: TruthTable, w=None) -> MultilinearPoly:
    """p/w for an integer PTF p of f with weight w; error at most 1 - 1/w."""
    if any(c.denominator != 1 for c in p.coeffs.values()):
        raise NotAPTFError("PTF coefficients must be integers")
    if not sign_represents(p, f):
        raise NotAPTFError("p does not sign-represent f")
    wp = weight(p)
    w = wp if w is None else Fraction(w)
    if w != wp:
        raise NotAPTFError(f"stated weight {w} differs from the actual weight {wp}")
    approx = p / w
    err = linf_error(approx, f)
    if err > 1 - 1 / w:
        raise CertificateError(f"error {err} exceeds 1 - 1/w")
    return approx


def cheb_or_of_and_ptf(m: int, t: int, eps, threshold=None) -> MultilinearPoly:
    """Integer multiple of 1 - t + Σ p(x_i), p the Chebyshev approximant of AND_m.

    ``threshold`` is the error the inner approximant must beat; it defaults to
    1/t, the largest value for which the sign argument goes through.
    """
    eps = Fraction(eps)
    if t < 1:
        raise PreconditionError("t must be positive")
    threshold = Fraction(1, t) if threshold is None else Fraction(threshold)
    if threshold > Fraction(1, t):
        raise PreconditionError("threshold above 1/t does not guarantee a PTF")
    if not eps < threshold:
        raise PreconditionError(f"eps = {eps} must be below the threshold {threshold}")
    n = m * t
    check_arity(n)
    ap = chebyshev_and_approx(m, eps)
    k = _integer_scale(ap.poly)
    total = MultilinearPoly(n, {0: (1 - t) * k})
    for i in range(t):
        total = total + (ap.poly * k).embed(n, i * m)
    F = compose(make_named("OR", m=t), make_named("AND", m=m))
    if not sign_represents(total, F):
        raise SignCheckFailure("Chebyshev OR-of-AND PTF failed the sign check")
    return total


# ---------------------------------------------------------------------------
# element distinctness through its CNF


def ed_clauses(N: int, R: int) -> list:
    """Clause polynomials [g(i) != g(j)] for i < j, exact, on the full arity."""
    b = R.bit_length() - 1
    if R < 2 or 1 << b != R:
        raise PreconditionError("R must be a power of 2 and at least 2")
    n = N * b
    check_arity(n)
    clauses = []
    for i, j in itertools.combinations(range(N), 2):
        # differ iff some bit pair differs: OR over bits of x_{i,k} x_{j,k}
        def clause(x, i=i, j=j):
            return -1 if any(x[i * b + k] != x[j * b + k] for k in range(b)) else 1

        clauses.append(fourier(TruthTable.from_function(n, clause)))
    return clauses


def ed_rational(N: int, R: int, t: int) -> RationalApproximator:
    """rational_and applied to the exact clause polynomials of the ED CNF."""
    clauses = ed_clauses(N, R)
    s = len(clauses)
    n = clauses[0].n if clauses else N * (R.bit_length() - 1)
    if s == 0:
        raise PreconditionError("need N >= 2")
    total = clauses[0]
    for c in clauses[1:]:
        total = total + c
    p = t * total + (t * s - 1)
    q = t * total + (t * s + 1)
    r = certify_rational(p, q, make_named("ED", N=N, R=R), Fraction(1, t))
    return RationalApproximator(
        r.p, r.q, r.f, r.bound, r.error, r.min_q,
        {"N": N, "R": R, "t": t, "clauses": s, "degree": max(p.degree, q.degree)},
    )


# ---------------------------------------------------------------------------
# sharp-threshold comparison


def sharp_threshold_rows(m: int, t: int, eps=None) -> dict:
    """Compare the Chebyshev construction for F = OR_t(AND_m) with the LP.

    For each degree d of AND_m the row records whether the one-sided error
    exceeds 1/2 (the amplification precondition) and the least degree the LP
    needs for F at error 1 - 2^-t.  ``threshold_ok`` is False only when the
    precondition holds at d yet the LP finds a degree <= d approximation.
    """
    f = make_named("AND", m=m)
    F = compose(make_named("OR", m=t), f)
    eps = Fraction(1, t + 1) if eps is None else Fraction(eps)
    ptf = cheb_or_of_and_ptf(m, t, eps)
    w = weight(ptf)
    target = 1 - Fraction(1, 2 ** t)
    lp_deg = None
    for D in range(F.n + 1):
        if best_error(F, D).value <= target:
            lp_deg = D
            break
    rows = []
    for d in range(f.n):
        e1 = best_error(f, d, one_sided=True).value
        pre = e1 > Fraction(1, 2)
        rows.append(
            {
                "d": d,
                "one_sided_error": str(e1),
                "precondition": pre,
                "threshold_ok": (not pre) or lp_deg > d,
            }
        )
    return {
        "m": m,
        "t": t,
        "construction_degree": ptf.degree,
        "construction_weight": str(w),
        "construction_error": str(1 - 1 / w),
        "lp_target_error": str(target),
        "lp_min_degree": lp_deg,
        "rows": rows,
        "out_of_scope": "low-weight AND approximators for d > sqrt(m) are external constructions",
    }


def metadata_table(m: int, t: int, eps=None) -> list:
    """Exact weight and degree of each construction next to its analytic bound."""
    eps = Fraction(1, t + 1) if eps is None else Fraction(eps)
    r = rational_and(m, t + 1)
    ptf = or_of_rational_ptf(r, t)
    cheb = chebyshev_and_approx(m, eps)
    k = _integer_scale(cheb.poly)
    w_inner = weight(cheb.poly * k)
    cptf = cheb_or_of_and_ptf(m, t, eps)
    return [
        {
            "construction": "or_of_rational_ptf",
            "degree": ptf.degree,
            "degree_bound": t * max(r.p.degree, r.q.degree),
            "weight": str(weight(ptf)),
            "weight_bound": str(rational_ptf_weight_bound(r, t)),
        },
        {
            "construction": "cheb_or_of_and_ptf",
            "degree": cptf.degree,
            "degree_bound": cheb.degree,
            "weight": str(weight(cptf)),
            "weight_bound": str(t * w_inner + (t + 1) * k),
        },
    ]


def or_linear_approx(k: int) -> MultilinearPoly:
    """q = (1/k)(1/2 - Σ y_i) with y_i = (1 - x_i)/2 the 0/1 indicator of x_i = -1.

    Degree 1 with error exactly 1 - 1/(2k) against OR_k.
    """
    if k < 1:
        raise PreconditionError("k must be positive")
    check_arity(k)
    ys = MultilinearPoly(k, {0: Fraction(k, 2)}) - _sum_poly(k) * Fraction(1, 2)
    q = (Fraction(1, 2) - ys) * Fraction(1, k)
    err = linf_error(q, make_named("OR", m=k))
    if err != 1 - Fraction(1, 2 * k):
        raise CertificateError(f"linear OR approximation has error {err}")
    return q
