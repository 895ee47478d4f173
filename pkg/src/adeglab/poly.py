"""Exact multilinear polynomials in the parity basis and a small univariate toolbox."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .boolfn import TruthTable, as_mask, check_arity, mask_elements
from .errors import DimensionMismatchError

_INT64_SAFE = 1 << 62


# ---------------------------------------------------------------------------
# integer Walsh-Hadamard transform


def _needs_object(arr: np.ndarray, n: int) -> bool:
    if arr.dtype == object:
        return True
    if arr.size == 0:
        return False
    return int(np.max(np.abs(arr))) << n >= _INT64_SAFE


def wht(values, n: int) -> np.ndarray:
    """Unnormalized transform: out[S] = Σ_x values[x] χ_S(x).

    Works on integer input; switches to Python ints when int64 could overflow.
    The same map sends coefficients to evaluations, since H·H = 2^n I.
    """
    arr = np.asarray(values)
    if arr.dtype != object:
        arr = arr.astype(np.int64)
    if _needs_object(arr, n):
        arr = np.array([int(v) for v in arr], dtype=object)
    a = arr.copy()
    for k in range(n):
        v = a.reshape(-1, 2, 1 << k)
        u0 = v[:, 0, :].copy()
        u1 = v[:, 1, :]
        v[:, 0, :] = u0 + u1
        v[:, 1, :] = u0 - u1
    return a


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        d = v.denominator
        if den % d:
            den = den * d // math.gcd(den, d)
    return den


def scale_to_integers(values) -> tuple[np.ndarray, int]:
    """Return (integer numerators, common denominator) for a sequence of rationals."""
    vals = [Fraction(v) for v in values]
    den = common_denominator(vals)
    nums = [v.numerator * (den // v.denominator) for v in vals]
    big = any(abs(x) >= _INT64_SAFE >> 24 for x in nums)
    arr = np.array(nums, dtype=object if big else np.int64)
    return arr, den


def transform_rational(values, n: int) -> list[Fraction]:
    """Σ_x values[x] χ_S(x) for every S, exactly."""
    nums, den = scale_to_integers(values)
    out = wht(nums, n)
    return [Fraction(int(v), den) for v in out]


# ---------------------------------------------------------------------------
# multilinear polynomials


def subset_order_key(S: int):
    return (bin(S).count("1"), mask_elements(S))


def low_degree_subsets(n: int, d: int) -> list[int]:
    """All subsets of [n] with |S| <= d, in (size, lexicographic) order."""
    masks = [S for S in range(1 << n) if bin(S).count("1") <= d]
    return sorted(masks, key=subset_order_key)


class MultilinearPoly:
    """Σ_S c_S χ_S with exact rational coefficients; subsets are bitmasks."""

    __slots__ = ("n", "_coeffs")

    def __init__(self, n: int, coeffs: Mapping | None = None):
        if n < 0:
            raise DimensionMismatchError("arity must be nonnegative")
        clean = {}
        for S, c in (coeffs or {}).items():
            mask = as_mask(S)
            if mask >> n:
                raise DimensionMismatchError(f"subset {S!r} not inside [{n}]")
            c = Fraction(c)
            if c:
                clean[mask] = clean.get(mask, Fraction(0)) + c
        self.n = n
        self._coeffs = {S: c for S, c in clean.items() if c}

    # basic protocol ---------------------------------------------------
    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def __getitem__(self, S) -> Fraction:
        return self._coeffs.get(as_mask(S), Fraction(0))

    def terms(self):
        """(mask, coefficient) pairs in (size, lexicographic) order."""
        return [(S, self._coeffs[S]) for S in sorted(self._coeffs, key=subset_order_key)]

    def __eq__(self, other):
        return isinstance(other, MultilinearPoly) and self.n == other.n and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self._coeffs.items())))

    def __repr__(self):
        body = " + ".join(
            f"{c}" + ("" if S == 0 else "*x" + "x".join(str(i) for i in mask_elements(S)))
            for S, c in self.terms()
        )
        return f"MultilinearPoly(n={self.n}, {body or '0'})"

    @property
    def degree(self) -> int:
        """Max |S| over stored terms; the zero polynomial has degree -1."""
        return max((bin(S).count("1") for S in self._coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs

    # arithmetic -------------------------------------------------------
    def _check(self, other):
        if other.n != self.n:
            raise DimensionMismatchError("arity mismatch")

    def __add__(self, other):
        if not isinstance(other, MultilinearPoly):
            other = MultilinearPoly(self.n, {0: other})
        self._check(other)
        out = dict(self._coeffs)
        for S, c in other._coeffs.items():
            out[S] = out.get(S, Fraction(0)) + c
        return MultilinearPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MultilinearPoly(self.n, {S: -c for S, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultilinearPoly) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, MultilinearPoly):
            self._check(other)
            out: dict = {}
            for S, a in self._coeffs.items():
                for T, b in other._coeffs.items():
                    U = S ^ T
                    out[U] = out.get(U, Fraction(0)) + a * b
            return MultilinearPoly(self.n, out)
        k = Fraction(other)
        return MultilinearPoly(self.n, {S: c * k for S, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / Fraction(k))

    def embed(self, n: int, offset: int = 0) -> "MultilinearPoly":
        """Same polynomial on variables ``offset..offset+self.n-1`` of an n-variable space."""
        if offset + self.n > n:
            raise DimensionMismatchError("embedding does not fit")
        return MultilinearPoly(n, {S << offset: c for S, c in self._coeffs.items()})

    # evaluation -------------------------------------------------------
    def evaluate(self, x) -> Fraction:
        if isinstance(x, (int, np.integer)):
            idx = int(x)
        else:
            if len(x) != self.n:
                raise DimensionMismatchError("point arity mismatch")
            idx = 0
            for k, v in enumerate(x):
                if v == -1:
                    idx |= 1 << k
        total = Fraction(0)
        for S, c in self._coeffs.items():
            total += -c if bin(idx & S).count("1") & 1 else c
        return total

    __call__ = evaluate

    def table_scaled(self) -> tuple[np.ndarray, int]:
        """All 2^n evaluations as (integer array, common denominator)."""
        check_arity(self.n)
        den = common_denominator(self._coeffs.values())
        vec = np.zeros(1 << self.n, dtype=object)
        big = False
        for S, c in self._coeffs.items():
            num = c.numerator * (den // c.denominator)
            vec[S] = num
            big = big or abs(num) >= _INT64_SAFE >> 24
        if not big:
            vec = vec.astype(np.int64)
        return wht(vec, self.n), den

    def table(self) -> list[Fraction]:
        vals, den = self.table_scaled()
        return [Fraction(int(v), den) for v in vals]

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"S": mask_elements(S), "c": str(c)} for S, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "MultilinearPoly":
        return cls(int(obj["n"]), {as_mask(t["S"]): Fraction(t["c"]) for t in obj["terms"]})


def fourier(f) -> MultilinearPoly:
    """Parity-basis expansion of a truth table (or a sequence of 2^n rationals)."""
    if isinstance(f, TruthTable):
        n = f.n
        raw = wht(f.values.astype(np.int64), n)
        size = 1 << n
        return MultilinearPoly(n, {S: Fraction(int(v), size) for S, v in enumerate(raw) if v})
    vals = list(f)
    n = len(vals).bit_length() - 1
    if 1 << n != len(vals):
        raise DimensionMismatchError("length must be a power of 2")
    coeffs = transform_rational(vals, n)
    size = 1 << n
    return MultilinearPoly(n, {S: c / size for S, c in enumerate(coeffs) if c})


def weight(p: MultilinearPoly, include_constant: bool = True) -> Fraction:
    """L1 norm of the coefficients, optionally skipping the constant term."""
    return sum((abs(c) for S, c in p.coeffs.items() if include_constant or S != 0), Fraction(0))


def linf_error(p: MultilinearPoly, f: TruthTable) -> Fraction:
    """max_x |p(x) - f(x)|, exactly."""
    if p.n != f.n:
        raise DimensionMismatchError("arity mismatch")
    vals, den = p.table_scaled()
    diff = vals - f.values.astype(np.int64 if vals.dtype != object else object) * den
    worst = int(np.max(np.abs(diff)))
    return Fraction(worst, den)


def sign_represents(p: MultilinearPoly, f: TruthTable) -> bool:
    """True iff f(x)·p(x) > 0 at every point."""
    if p.n != f.n:
        raise DimensionMismatchError("arity mismatch")
    vals, _ = p.table_scaled()
    prod = vals * f.values.astype(np.int64 if vals.dtype != object else object)
    return bool(np.all(prod > 0))


# ---------------------------------------------------------------------------
# univariate polynomials


class UnivariatePoly:
    """Monomial-basis polynomial with exact coefficients (index k = coefficient of t^k)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        return isinstance(other, UnivariatePoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"

    def __add__(self, other):
        if not isinstance(other, UnivariatePoly):
            other = UnivariatePoly([other])
        k = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (k - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (k - len(other.coeffs))
        return UnivariatePoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, UnivariatePoly) else -Fraction(other))

    def __mul__(self, other):
        if not isinstance(other, UnivariatePoly):
            return UnivariatePoly([c * Fraction(other) for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UnivariatePoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UnivariatePoly(out)

    __rmul__ = __mul__

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "UnivariatePoly"):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        lead = other.coeffs[-1]
        dg = other.degree
        while len(rem) - 1 >= dg and any(rem):
            k = len(rem) - 1 - dg
            f = rem[-1] / lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UnivariatePoly(q), UnivariatePoly(rem)


def chebyshev(k: int) -> UnivariatePoly:
    """T_k via the integer recurrence T_{j+1} = 2t T_j - T_{j-1}."""
    a, b = UnivariatePoly([1]), UnivariatePoly([0, 1])
    if k == 0:
        return a
    two_t = UnivariatePoly([0, 2])
    for _ in range(k - 1):
        a, b = b, two_t * b - a
    return b


def krawtchouk(m: int, k: int, u: int) -> int:
    """Σ_{|S|=k} χ_S(x) for any x with exactly u coordinates equal to +1."""
    return sum((-1) ** j * math.comb(m - u, j) * math.comb(u, k - j) for j in range(0, k + 1))


def symmetric_lift(m: int, profile: list[Fraction]) -> MultilinearPoly:
    """Multilinear polynomial whose value at x is ``profile[u]``, u = #(+1 coordinates)."""
    check_arity(m)
    size = 1 << m
    levels = []
    for k in range(m + 1):
        s = sum((profile[u] * math.comb(m, u) * krawtchouk(m, k, u) for u in range(m + 1)), Fraction(0))
        levels.append(s / (size * math.comb(m, k)))
    coeffs = {}
    for S in range(size):
        a = levels[bin(S).count("1")]
        if a:
            coeffs[S] = a
    return MultilinearPoly(m, coeffs)


def substitution_profile(p: MultilinearPoly) -> UnivariatePoly:
    """P(t) obtained by replacing every variable of p with t."""
    out = [Fraction(0)] * (p.n + 1)
    for S, c in p.coeffs.items():
        out[bin(S).count("1")] += c
    return UnivariatePoly(out)


@dataclass(frozen=True)
class ChebyshevApprox:
    m: int
    target_error: Fraction
    cheb_degree: int
    error: Fraction
    profile: UnivariatePoly
    poly: MultilinearPoly
    exact_interpolation: bool

    @property
    def degree(self) -> int:
        return self.poly.degree


def chebyshev_and_approx(m: int, target_error) -> ChebyshevApprox:
    """Low-degree pointwise approximation of AND_m from a shifted Chebyshev polynomial.

    With u = number of +1 coordinates, the approximant is
    ``P(u) = 1 - 2 T_k((m-u)/(m-1)) / T_k(m/(m-1))``: exact (-1) at the all-TRUE
    input and within ``2/T_k(m/(m-1))`` of 1 elsewhere.  The smallest k whose
    exhaustively computed error meets the target is used; if none below m
    does, the exact interpolant is returned.
    """
    eps = Fraction(target_error)
    if not 0 < eps < 1:
        raise ValueError("target error must lie in (0, 1)")
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        p = MultilinearPoly(1, {1: 1})
        return ChebyshevApprox(1, eps, 1, Fraction(0), UnivariatePoly([0, 1]), p, False)
    and_profile = [Fraction(-1)] + [Fraction(1)] * m
    for k in range(1, m):
        T = chebyshev(k)
        G = T(Fraction(m, m - 1))
        prof = [1 - 2 * T(Fraction(m - u, m - 1)) / G for u in range(m + 1)]
        err = max(abs(a - b) for a, b in zip(prof, and_profile))
        if err <= eps:
            poly = symmetric_lift(m, prof)
            return ChebyshevApprox(m, eps, k, err, substitution_profile(poly), poly, False)
    poly = symmetric_lift(m, and_profile)
    return ChebyshevApprox(m, eps, m, Fraction(0), substitution_profile(poly), poly, True)


# ---------------------------------------------------------------------------
# Markov-type derivative checker


def _sturm_chain(P: UnivariatePoly) -> list[UnivariatePoly]:
    chain = [P, P.derivative()]
    while chain[-1].coeffs and chain[-1].degree > 0:
        _, r = chain[-2].divmod(chain[-1])
        if not r.coeffs:
            break
        chain.append(-r)
    return chain


def _sign_changes(chain, t) -> int:
    signs = [v for v in (q(t) for q in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _squarefree(P: UnivariatePoly) -> UnivariatePoly:
    a, b = P, P.derivative()
    while b.coeffs:
        a, b = b, a.divmod(b)[1]
    if a.degree <= 0:
        return P
    return P.divmod(a)[0]


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with least denominator in [lo, hi] (continued-fraction walk)."""
    if lo > hi:
        lo, hi = hi, lo
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    inner = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def isolate_roots(P: UnivariatePoly, lo: Fraction, hi: Fraction, width_exp: int = 40):
    """Real roots of P in [lo, hi]: list of (a, b, exact) with a == b when exact."""
    if P.degree <= 0:
        return []
    Q = _squarefree(P)
    chain = _sturm_chain(Q)
    out = []
    eps = Fraction(1, 1 << width_exp)

    def count(a, b):
        return _sign_changes(chain, a) - _sign_changes(chain, b)

    found_exact = set()
    for endpoint in (lo, hi):
        if Q(endpoint) == 0:
            found_exact.add(endpoint)
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        c = count(a, b)  # roots in (a, b]
        if c == 0:
            continue
        if c == 1 and b - a <= eps:
            if Q(b) == 0:
                found_exact.add(b)
                continue
            r = simplest_between(a, b)
            if Q(r) == 0:
                found_exact.add(r)
            else:
                out.append((a, b, False))
            continue
        mid = (a + b) / 2
        if Q(mid) == 0:
            found_exact.add(mid)
        stack.append((mid, b))
        stack.append((a, mid))
    out.extend((r, r, True) for r in found_exact)
    # drop duplicates from half-open counting
    uniq = {}
    for a, b, ex in out:
        key = (a, b)
        uniq[key] = ex
    return sorted(((a, b, ex) for (a, b), ex in uniq.items()), key=lambda z: z[0])


def _abs_max_enclosure(P: UnivariatePoly, lo=Fraction(-1), hi=Fraction(1)):
    """Enclosure [L, U] of max_{[lo,hi]} |P| via critical points of P."""
    cands = [(lo, lo, True), (hi, hi, True)]
    dP = P.derivative()
    if dP.coeffs:
        cands += isolate_roots(dP, lo, hi)
    slope = sum((abs(c) * k for k, c in enumerate(P.coeffs)), Fraction(0))  # |P'| bound on [-1,1]
    L = Fraction(0)
    U = Fraction(0)
    for a, b, exact in cands:
        va, vb = abs(P(a)), abs(P(b))
        low = max(va, vb)
        up = low if exact else low + slope * (b - a)
        L = max(L, low)
        U = max(U, up)
    return L, U


@dataclass(frozen=True)
class MarkovReport:
    degree: int
    max_abs_lo: Fraction
    max_abs_hi: Fraction
    max_deriv_lo: Fraction
    max_deriv_hi: Fraction
    w: Fraction
    R: Fraction
    ratio: float | None

    @property
    def exact(self) -> bool:
        return self.max_abs_lo == self.max_abs_hi and self.max_deriv_lo == self.max_deriv_hi

    @property
    def max_abs(self) -> Fraction:
        return self.max_abs_hi

    @property
    def max_deriv(self) -> Fraction:
        return self.max_deriv_hi

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "max_abs": [str(self.max_abs_lo), str(self.max_abs_hi)],
            "max_deriv": [str(self.max_deriv_lo), str(self.max_deriv_hi)],
            "exact": self.exact,
            "ratio": {"enclosure": self.ratio},
        }


def markov_bound_check(P: UnivariatePoly, w, R) -> MarkovReport:
    """Report max|P| and max|P'| over [-1, 1] plus an observational ratio.

    The ratio is ``max|P'| / (d R max(log w, log d))``; it is ``None`` when the
    denominator vanishes.  Nothing about the ratio is asserted.
    """
    if not P.coeffs:
        raise ValueError("P must be nonzero")
    w, R = Fraction(w), Fraction(R)
    a_lo, a_hi = _abs_max_enclosure(P)
    dP = P.derivative()
    if dP.coeffs:
        d_lo, d_hi = _abs_max_enclosure(dP)
    else:
        d_lo = d_hi = Fraction(0)
    d = P.degree
    logs = [math.log(float(w)) if w > 0 else float("-inf"), math.log(d) if d > 0 else float("-inf")]
    denom = d * float(R) * max(logs)
    ratio = float(d_hi) / denom if denom > 0 else None
    return MarkovReport(d, a_lo, a_hi, d_lo, d_hi, w, R, ratio)
