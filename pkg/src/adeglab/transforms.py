"""Lifts of a function F that turn approximation hardness into weight and
discrepancy hardness, plus exact discrepancy computation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .approx_lp import INF, hardest_distribution, threshold_weight, value_str
from .boolfn import TruthTable, check_arity
from .config import cap
from .errors import CapExceededError, CertificateError, DimensionMismatchError, PreconditionError
from .poly import MultilinearPoly, scale_to_integers, sign_represents, wht


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class CommMatrix:
    """±1 matrix M[x][y] = f(x, y); rows and columns are input indices."""

    entries: np.ndarray
    row_bits: int | None = None
    col_bits: int | None = None

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.int8)
        if a.ndim != 2 or a.size == 0:
            raise DimensionMismatchError("matrix must be two-dimensional and nonempty")
        if not np.all((a == 1) | (a == -1)):
            raise ValueError("entries must be +1 or -1")
        for bits, size in ((self.row_bits, a.shape[0]), (self.col_bits, a.shape[1])):
            if bits is not None and size != 1 << bits:
                raise DimensionMismatchError(f"side {size} is not 2^{bits}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def __eq__(self, other):
        return isinstance(other, CommMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __neg__(self) -> "CommMatrix":
        return CommMatrix(-self.entries, self.row_bits, self.col_bits)

    def transpose(self) -> "CommMatrix":
        return CommMatrix(self.entries.T.copy(), self.col_bits, self.row_bits)

    def to_text(self) -> str:
        return "\n".join("".join("+" if v == 1 else "-" for v in row) for row in self.entries) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CommMatrix":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if set(line) - {"+", "-"}:
                raise ValueError(f"bad matrix line {line!r}")
            rows.append([1 if c == "+" else -1 for c in line])
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("matrix rows must be nonempty and of equal length")
        return cls(np.array(rows, dtype=np.int8))


NAMED_MATRICES = {
    "allones2x2": [[1, 1], [1, 1]],
    "hadamard2": [[1, 1], [1, -1]],
}


def named_matrix(name: str) -> CommMatrix:
    try:
        return CommMatrix(np.array(NAMED_MATRICES[name]))
    except KeyError:
        raise ValueError(f"unknown matrix {name!r}") from None


class Distribution:
    """Exact probability masses over a finite index set (flat or matrix-shaped)."""

    __slots__ = ("_mass", "shape")

    def __init__(self, masses: Sequence, shape: tuple | None = None):
        vals = tuple(Fraction(v) for v in np.asarray(masses, dtype=object).ravel())
        if any(v < 0 for v in vals):
            raise ValueError("masses must be nonnegative")
        if sum(vals, Fraction(0)) != 1:
            raise ValueError("masses must sum to 1")
        self._mass = vals
        self.shape = tuple(shape) if shape is not None else (len(vals),)
        if int(np.prod(self.shape)) != len(vals):
            raise DimensionMismatchError("shape does not match the number of masses")

    @classmethod
    def uniform(cls, shape) -> "Distribution":
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        size = int(np.prod(shape))
        return cls([Fraction(1, size)] * size, shape)

    @property
    def mass(self) -> tuple:
        return self._mass

    def __len__(self):
        return len(self._mass)

    def __getitem__(self, i) -> Fraction:
        return self._mass[i]

    def scaled_ints(self) -> tuple:
        """(integer array in ``shape``, common denominator)."""
        nums, den = scale_to_integers(self._mass)
        return nums.reshape(self.shape), den

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "mass": [str(v) for v in self._mass]}


# ---------------------------------------------------------------------------
# Krause selector


def krause_selector(F: TruthTable) -> TruthTable:
    """F'(x, y, z) = F(w) with w_i = y_i if z_i = -1 else x_i; variables x, y, z in order."""
    n = F.n
    check_arity(3 * n)
    idx = np.arange(1 << (3 * n), dtype=np.int64)
    full = (1 << n) - 1
    x, y, z = idx & full, (idx >> n) & full, (idx >> (2 * n)) & full
    w = (x & ~z & full) | (y & z)
    return TruthTable(3 * n, F.values[w])


@dataclass(frozen=True)
class KrauseReport:
    F: TruthTable
    d: int
    mu: Distribution
    mu_prime: Distribution
    hardest_value: Fraction
    threshold_weight: object
    bound_sq: Fraction
    max_corr_sq: Fraction
    structure_ok: bool
    checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.structure_ok and not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.F.n,
            "d": self.d,
            "hardest_value": str(self.hardest_value),
            "threshold_weight": value_str(self.threshold_weight),
            "bound_squared": str(self.bound_sq),
            "max_correlation_squared": str(self.max_corr_sq),
            "characters_checked": self.checked,
            "structure_ok": self.structure_ok,
            "violations": self.violations,
            "passed": self.passed,
        }


def krause_distribution(F: TruthTable, d: int) -> KrauseReport:
    """Lift the hardest degree-d distribution μ of F to μ'(x,y,z) = 2^{-2n} μ(Sel_z(x,y)).

    Every character correlation E_{μ'}[F' χ_S] is computed exactly and checked
    against max{2n/W(F,d), 2^{-d}} after squaring.  The exact identity
    E_{μ'}[F' χ_S] = ±2^{-|S1|-|S2|} E_μ[F χ_{S1 ∪ S2}] when S1 ∩ S2 = ∅ and
    S3 ⊆ S1 ∪ S2 (zero otherwise) is checked for every S as well.
    """
    n = F.n
    if n > 4:
        raise PreconditionError("krause_distribution is limited to n <= 4")
    hd = hardest_distribution(F, d, check_weight=False)
    mu = Distribution(hd.dual_raw)
    W = threshold_weight(F, d).value
    bound_sq = max(Fraction(0) if W is INF else Fraction(2 * n) / W, Fraction(1, 2 ** d))

    full = (1 << n) - 1
    idx = np.arange(1 << (3 * n), dtype=np.int64)
    x, y, z = idx & full, (idx >> n) & full, (idx >> (2 * n)) & full
    w = (x & ~z & full) | (y & z)
    mu_nums, mu_den = scale_to_integers(mu.mass)
    lifted = mu_nums[w]
    # μ' = lifted / (mu_den 2^{2n}); correlations share that denominator
    Fp = F.values.astype(np.int64)[w]
    corr = wht(lifted * Fp, 3 * n)
    den_p = mu_den << (2 * n)
    mu_prime = Distribution([Fraction(int(v), den_p) for v in lifted])

    base = wht(mu_nums * F.values.astype(np.int64), n)  # E_μ[F χ_T] * mu_den
    structure_ok = True
    violations = []
    max_sq = Fraction(0)
    for S in range(1 << (3 * n)):
        s1, s2, s3 = S & full, (S >> n) & full, (S >> (2 * n)) & full
        e = Fraction(int(corr[S]), den_p)
        if s1 & s2 or s3 & ~(s1 | s2):
            expected = Fraction(0)
        else:
            sign = -1 if bin(s3 & s2).count("1") & 1 else 1
            k = bin(s1).count("1") + bin(s2).count("1")
            expected = sign * Fraction(int(base[s1 | s2]), mu_den << k)
        if e != expected or abs(e) != abs(expected):
            structure_ok = False
        sq = e * e
        max_sq = max(max_sq, sq)
        if sq > bound_sq:
            violations.append({"S": S, "correlation": str(e)})
    return KrauseReport(F, d, mu, mu_prime, hd.value, W, bound_sq, max_sq, structure_ok, 1 << (3 * n), violations)


# ---------------------------------------------------------------------------
# pattern matrix


def pattern_matrix(F: TruthTable) -> CommMatrix:
    """M[x][y] = F(..., OR_j (x_{i,j} AND y_{i,j}), ...) with x_{i,j} at bit 4i + j."""
    n = F.n
    if n > 4:
        raise CapExceededError("pattern_matrix is limited to n <= 4")
    side = 1 << (4 * n)
    xs = np.arange(side, dtype=np.int64)
    both = xs[:, None] & xs[None, :]
    w = np.zeros_like(both)
    for i in range(n):
        w |= (((both >> (4 * i)) & 0xF) != 0).astype(np.int64) << i
    return CommMatrix(F.values[w], 4 * n, 4 * n)


# ---------------------------------------------------------------------------
# discrepancy


EXACT = "exact"
GREEDY_LB = "greedy_lb"
SPECTRAL_UB = "spectral_ub"
MODES = (EXACT, GREEDY_LB, SPECTRAL_UB)


def _weighted(M: CommMatrix, mu: Distribution | None):
    if mu is None:
        mu = Distribution.uniform(M.shape)
    if mu.shape != M.shape:
        raise DimensionMismatchError(f"distribution shape {mu.shape} != matrix shape {M.shape}")
    nums, den = mu.scaled_ints()
    P = nums * M.entries.astype(object if nums.dtype == object else np.int64)
    return P, den


def _best_completion(col_sums: np.ndarray) -> np.ndarray:
    """max(Σ positive, -Σ negative) per row of a (k, cols) array."""
    pos = np.where(col_sums > 0, col_sums, 0).sum(axis=1)
    neg = np.where(col_sums < 0, -col_sums, 0).sum(axis=1)
    return np.maximum(pos, neg)


def _exact_disc(P: np.ndarray) -> int:
    """max_{A,B} |Σ_{A×B} P| over rows subsets A (rows <= columns assumed)."""
    r = P.shape[0]
    lo_bits = min(r, 12)
    hi_bits = r - lo_bits
    # subset sums of the low rows, built by adding one row per lowest set bit
    low = np.zeros((1 << lo_bits, P.shape[1]), dtype=P.dtype)
    for mask in range(1, 1 << lo_bits):
        lb = (mask & -mask).bit_length() - 1
        low[mask] = low[mask & (mask - 1)] + P[lb]
    best = 0
    base = np.zeros(P.shape[1], dtype=P.dtype)
    prev = 0
    for g in range(1 << hi_bits):
        gray = g ^ (g >> 1)
        if g:
            changed = (gray ^ prev).bit_length() - 1
            row = P[lo_bits + changed]
            base = base + row if gray >> changed & 1 else base - row
        prev = gray
        best = max(best, int(_best_completion(low + base).max()))
    return best


def _greedy_disc(P: np.ndarray, seed: int, restarts: int = 32) -> int:
    rng = random.Random(seed)
    r, c = P.shape
    best = 0
    for _ in range(restarts):
        A = np.array([rng.random() < 0.5 for _ in range(r)])
        for _ in range(4 * (r + c)):
            cs = P[A].sum(axis=0) if A.any() else np.zeros(c, dtype=P.dtype)
            sgn = 1 if np.where(cs > 0, cs, 0).sum() >= -np.where(cs < 0, cs, 0).sum() else -1
            B = sgn * cs > 0
            rs = P[:, B].sum(axis=1) if B.any() else np.zeros(r, dtype=P.dtype)
            pos, neg = rs > 0, rs < 0
            A_new = pos if rs[pos].sum() >= -rs[neg].sum() else neg
            val = abs(int(P[np.ix_(A_new, B)].sum())) if A_new.any() and B.any() else 0
            best = max(best, val)
            if np.array_equal(A_new, A):
                break
            A = A_new
    return best


def discrepancy(M: CommMatrix, mu: Distribution | None = None, mode: str = EXACT, seed: int = 0):
    """Maximum rectangle bias |Σ_{A×B} μ M| of M under μ (uniform by default).

    ``exact`` and ``greedy_lb`` return Fractions (the latter is the bias of a
    concrete rectangle, hence a lower bound).  ``spectral_ub`` returns a dict
    tagged ``enclosure`` holding a float upper bound ‖μ∘M‖ sqrt(rows cols).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    P, den = _weighted(M, mu)
    if P.shape[0] > P.shape[1]:
        P = P.T
    if mode == EXACT:
        limit = cap("MAX_DISC_SIDE")
        if P.shape[0] > limit:
            raise CapExceededError(f"exact discrepancy needs min side <= {limit}, got {P.shape[0]}")
        return Fraction(_exact_disc(P), den)
    if mode == GREEDY_LB:
        return Fraction(_greedy_disc(P, seed), den)
    dense = np.array(P, dtype=float) / float(den)
    norm = float(np.linalg.norm(dense, 2))
    ub = min(1.0, norm * float(np.sqrt(dense.shape[0] * dense.shape[1])) * (1 + 1e-9) + 1e-12)
    return {"enclosure": [0.0, ub], "kind": "spectral_ub"}


def pattern_bound_check(F: TruthTable, d: int, mu: Distribution | None = None) -> dict:
    """disc(M)^2 <= max{2n/W(F, d-1), 2^{-d}} for the pattern matrix of F."""
    if d < 1:
        raise PreconditionError("d must be at least 1")
    M = pattern_matrix(F)
    disc = discrepancy(M, mu, EXACT)
    W = threshold_weight(F, d - 1).value
    bound = max(Fraction(0) if W is INF else Fraction(2 * F.n) / W, Fraction(1, 2 ** d))
    return {
        "n": F.n,
        "d": d,
        "disc": str(disc),
        "threshold_weight": value_str(W),
        "bound": str(bound),
        "holds": disc * disc <= bound,
    }


# ---------------------------------------------------------------------------
# conjunction basis


def conjunction_poly(n: int, S: int) -> MultilinearPoly:
    """AND_S = 1 - 2 Π_{i∈S} (1 - x_i)/2 in the parity basis; AND_∅ = 1."""
    if S == 0:
        return MultilinearPoly(n, {0: 1})
    k = bin(S).count("1")
    coeffs = {0: 1}
    T = S
    while True:
        sign = -1 if bin(T).count("1") & 1 else 1
        coeffs[T] = coeffs.get(T, 0) - Fraction(2 * sign, 2 ** k)
        if T == 0:
            break
        T = (T - 1) & S
    return MultilinearPoly(n, coeffs)


def to_conjunction_basis(p: MultilinearPoly) -> dict:
    """Coefficients a_S with p = Σ a_S AND_S."""
    n = p.n
    check_arity(n)
    vals = p.table()
    # b: Möbius coefficients in the indicator basis I_S = [all of S TRUE]
    b = list(vals)
    for i in range(n):
        bit = 1 << i
        for T in range(1 << n):
            if T & bit:
                b[T] = b[T] - b[T ^ bit]
    a = {}
    a0 = b[0]
    for S in range(1, 1 << n):
        if b[S]:
            a[S] = -b[S] / 2
            a0 += b[S] / 2
    if a0:
        a[0] = a0
    return a


def from_conjunction_basis(n: int, coeffs: dict) -> MultilinearPoly:
    total = MultilinearPoly(n)
    for S, c in coeffs.items():
        total = total + conjunction_poly(n, S) * c
    return total


def monomial_basis_weight(p: MultilinearPoly | None = None, *, conj: dict | None = None,
                          n: int | None = None, f: TruthTable | None = None) -> dict:
    """Weights of one polynomial in the parity and conjunction bases.

    Give either ``p`` (parity basis) or ``conj`` with ``n``.  The parity weight
    never exceeds 3 times the conjunction weight.  When ``f`` is given, p is an
    integer-coefficient conjunction-basis PTF for f and n <= 5, the exact
    threshold weight W(f) is compared with 2n w'^2.
    """
    if (p is None) == (conj is None):
        raise ValueError("give exactly one of p or conj")
    if p is None:
        if n is None:
            raise ValueError("n is required with conj")
        conj = {S: Fraction(c) for S, c in conj.items() if c}
        p = from_conjunction_basis(n, conj)
    else:
        conj = to_conjunction_basis(p)
    w_par = sum((abs(c) for c in p.coeffs.values()), Fraction(0))
    w_conj = sum((abs(c) for c in conj.values()), Fraction(0))
    integer_conj = all(Fraction(c).denominator == 1 for c in conj.values())
    out = {
        "n": p.n,
        "parity_weight": str(w_par),
        "conjunction_weight": str(w_conj),
        "parity_coefficients": p.to_json()["terms"],
        "conjunction_coefficients": [
            {"S": [i for i in range(p.n) if S >> i & 1], "c": str(c)}
            for S, c in sorted(conj.items(), key=lambda kv: (bin(kv[0]).count("1"), kv[0]))
        ],
        "ratio_ok": w_par <= 3 * w_conj,
    }
    if f is not None:
        if f.n != p.n:
            raise DimensionMismatchError("arity mismatch")
        out["sign_represents"] = sign_represents(p, f)
        if out["sign_represents"] and integer_conj and p.n <= 5:
            W = threshold_weight(f, f.n).value
            bound = 2 * p.n * w_conj * w_conj
            out["threshold_weight"] = value_str(W)
            out["margin_bound"] = str(bound)
            out["margin_bound_holds"] = W <= bound
    if not out["ratio_ok"]:
        raise CertificateError("parity weight exceeds 3 times the conjunction weight")
    return out
