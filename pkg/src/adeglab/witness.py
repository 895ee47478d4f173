"""Dual witnesses: storage, exact metadata and verification."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .approx_lp import ADEG_EPS, ODEG_EPS, dual_to_function, error_lp, MeasureResult
from .boolfn import TruthTable, check_arity
from .errors import CertificateError, DimensionMismatchError, PreconditionError
from .exact_lp import LPSolution
from .poly import scale_to_integers, wht


class WitnessUnavailable(PreconditionError):
    """No one-sided witness exists for the requested parameters."""


class DualWitness:
    """A rational function ψ on {-1,1}^n, index-ordered like TruthTable.

    Metadata (L1 norm, pure high degree) is computed exactly on first use and
    cached; the values themselves are immutable.
    """

    __slots__ = ("n", "_values", "_cache")

    def __init__(self, n: int, values: Sequence):
        check_arity(n)
        vals = tuple(Fraction(v) for v in values)
        if len(vals) != 1 << n:
            raise DimensionMismatchError(f"expected {1 << n} values, got {len(vals)}")
        self.n = n
        self._values = vals
        self._cache = {}

    @property
    def values(self) -> tuple:
        return self._values

    def __len__(self):
        return len(self._values)

    def __getitem__(self, i) -> Fraction:
        return self._values[i]

    def __eq__(self, other):
        return isinstance(other, DualWitness) and self.n == other.n and self._values == other._values

    def __hash__(self):
        return hash((self.n, self._values))

    def __repr__(self):
        return f"DualWitness(n={self.n}, l1={self.l1_norm}, phd={self.pure_high_degree})"

    def scaled(self, k) -> "DualWitness":
        k = Fraction(k)
        return DualWitness(self.n, [v * k for v in self._values])

    def _scaled_ints(self):
        if "ints" not in self._cache:
            self._cache["ints"] = scale_to_integers(self._values)
        return self._cache["ints"]

    @property
    def l1_norm(self) -> Fraction:
        if "l1" not in self._cache:
            self._cache["l1"] = sum((abs(v) for v in self._values), Fraction(0))
        return self._cache["l1"]

    @property
    def total(self) -> Fraction:
        return sum(self._values, Fraction(0))

    def spectrum(self) -> np.ndarray:
        """Integer-scaled correlations Σ ψ χ_S for every S (same denominator as values)."""
        if "spec" not in self._cache:
            nums, _ = self._scaled_ints()
            self._cache["spec"] = wht(nums, self.n)
        return self._cache["spec"]

    def correlation_with_character(self, S: int) -> Fraction:
        _, den = self._scaled_ints()
        return Fraction(int(self.spectrum()[S]), den)

    @property
    def pure_high_degree(self) -> int:
        """Largest D with Σ ψ χ_S = 0 for all |S| <= D; -1 if Σψ != 0, n if ψ ≡ 0."""
        if "phd" not in self._cache:
            spec = self.spectrum()
            nz = np.nonzero(spec != 0)[0]
            if len(nz) == 0:
                phd = self.n
            else:
                phd = min(bin(int(S)).count("1") for S in nz) - 1
            self._cache["phd"] = phd
        return self._cache["phd"]

    def pure_high_degree_capped(self, cap: int) -> int:
        """min(pure_high_degree, cap)."""
        return min(self.pure_high_degree, cap)

    def correlation(self, f: TruthTable) -> Fraction:
        if f.n != self.n:
            raise DimensionMismatchError("arity mismatch")
        nums, den = self._scaled_ints()
        fv = f.values.astype(object if nums.dtype == object else np.int64)
        return Fraction(int(np.sum(nums * fv)), den)

    def one_sided(self, f: TruthTable) -> bool:
        """ψ(x) <= 0 on every TRUE input of f."""
        return all(self._values[int(x)] <= 0 for x in f.true_set())

    def wrong_side_masses(self, f: TruthTable) -> tuple:
        """(Σ_{A_1} |ψ|, Σ_{A_-1} |ψ|) with A_1 = {ψ > 0, f = -1}, A_-1 = {ψ < 0, f = 1}."""
        pos = Fraction(0)
        neg = Fraction(0)
        fv = f.values
        for x, v in enumerate(self._values):
            if v > 0 and fv[x] == -1:
                pos += v
            elif v < 0 and fv[x] == 1:
                neg -= v
        return pos, neg

    def to_json(self) -> dict:
        return {"n": self.n, "values": [str(v) for v in self._values]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "DualWitness":
        return cls(int(obj["n"]), [Fraction(v) for v in obj["values"]])


@dataclass(frozen=True)
class WitnessReport:
    correlation: Fraction
    l1: Fraction
    phd: int
    one_sided_ok: bool
    wrong_side_mass_pos: Fraction
    wrong_side_mass_neg: Fraction
    d: int
    eps: Fraction | None
    one_sided_required: bool

    @property
    def l1_ok(self) -> bool:
        return self.l1 == 1

    @property
    def phd_ok(self) -> bool:
        return self.phd >= self.d

    @property
    def correlation_ok(self) -> bool:
        return self.eps is None or self.correlation > self.eps

    @property
    def passed(self) -> bool:
        return (
            self.l1_ok
            and self.phd_ok
            and self.correlation_ok
            and (self.one_sided_ok or not self.one_sided_required)
        )

    def to_json(self) -> dict:
        return {
            "correlation": str(self.correlation),
            "l1": str(self.l1),
            "phd": self.phd,
            "one_sided_ok": self.one_sided_ok,
            "wrong_side_mass_pos": str(self.wrong_side_mass_pos),
            "wrong_side_mass_neg": str(self.wrong_side_mass_neg),
            "checks": {
                "l1": self.l1_ok,
                "phd": self.phd_ok,
                "correlation": self.correlation_ok,
                "one_sided": self.one_sided_ok or not self.one_sided_required,
            },
            "passed": self.passed,
        }


def verify(psi: DualWitness, f: TruthTable, d: int, eps=None, one_sided: bool = False) -> WitnessReport:
    """Check L1 = 1, phd >= d, correlation > eps and (optionally) one-sidedness."""
    if psi.n != f.n:
        raise DimensionMismatchError("arity mismatch")
    pos, neg = psi.wrong_side_masses(f)
    return WitnessReport(
        correlation=psi.correlation(f),
        l1=psi.l1_norm,
        phd=psi.pure_high_degree,
        one_sided_ok=psi.one_sided(f),
        wrong_side_mass_pos=pos,
        wrong_side_mass_neg=neg,
        d=d,
        eps=None if eps is None else Fraction(eps),
        one_sided_required=one_sided,
    )


def _fallback(f: TruthTable, d: int, one_sided: bool) -> DualWitness:
    """Witness with correlation 0 for an f that degree-d polynomials capture exactly.

    Two-sided: χ_[n] / 2^n.  One-sided: an LP search for ψ = u - v with unit
    mass, phd >= d, ψ <= 0 on TRUE inputs and Σ f ψ = 0.
    """
    size = f.size
    top = (1 << f.n) - 1
    chi = [Fraction(1 - 2 * (bin(x & top).count("1") & 1), size) for x in range(size)]
    if not one_sided:
        return DualWitness(f.n, chi)
    for c in (chi, [-v for v in chi]):
        cand = DualWitness(f.n, c)
        if cand.one_sided(f):
            return cand
    from .approx_lp import character_matrix
    from .exact_lp import EQ, LE, NONNEG, LinearProgram, solve_lp
    from .poly import low_degree_subsets

    subsets = low_degree_subsets(f.n, d)
    chim = character_matrix(f.n, subsets)
    fv = [int(v) for v in f.values]
    rows, senses, rhs = [], [], []
    for j in range(len(subsets)):
        col = [int(v) for v in chim[:, j]]
        rows.append(col + [-v for v in col])
        senses.append(EQ)
        rhs.append(0)
    rows.append([1] * (2 * size))
    senses.append(EQ)
    rhs.append(1)
    rows.append(fv + [-v for v in fv])
    senses.append(EQ)
    rhs.append(0)
    for x in range(size):
        if fv[x] == -1:
            r = [0] * (2 * size)
            r[x], r[size + x] = 1, -1
            rows.append(r)
            senses.append(LE)
            rhs.append(0)
    lp = LinearProgram([0] * (2 * size), rows, senses, rhs, [NONNEG] * (2 * size))
    sol = solve_lp(lp)
    if not sol.is_optimal:
        raise WitnessUnavailable("no one-sided witness with correlation 0 exists")
    vals = [sol.primal[x] - sol.primal[size + x] for x in range(size)]
    psi = DualWitness(f.n, vals)
    if psi.l1_norm != 1:
        # u and v overlapped on some input; renormalize the difference
        if psi.l1_norm == 0:
            raise WitnessUnavailable("no one-sided witness with correlation 0 exists")
        psi = psi.scaled(1 / psi.l1_norm)
    return psi


def from_dual_lp(sol: LPSolution, kind: str, f: TruthTable, d: int) -> DualWitness:
    """Normalized witness extracted from an optimal error-LP solution.

    The error LP's optimal dual already has unit L1 mass when ε* > 0.  When
    ε* = 0 the dual is identically zero; since f then has an exact degree-d
    representation with d < n, a top-character witness is returned instead
    (its correlation 0 still meets the strict bound "> ε" for every ε < 0).
    """
    if kind not in (ADEG_EPS, ODEG_EPS):
        raise ValueError(f"unsupported witness kind {kind!r}")
    if not sol.is_optimal:
        raise PreconditionError("solution is not optimal")
    one_sided = kind == ODEG_EPS
    lp, subsets, layout = error_lp(f, d, one_sided)
    phi = dual_to_function(sol.dual, layout, f.size)
    psi = DualWitness(f.n, phi)
    if psi.l1_norm == 0:
        if d >= f.n:
            raise WitnessUnavailable("no witness exists at degree n")
        return _fallback(f, d, one_sided)
    eps = sol.objective_value
    psi = psi.scaled(1 / psi.l1_norm) if psi.l1_norm != 1 else psi
    rep = verify(psi, f, d, None, one_sided)
    if rep.phd < d:
        raise CertificateError(f"extracted dual has pure high degree {rep.phd} < {d}")
    if one_sided and not rep.one_sided_ok:
        raise CertificateError("extracted one-sided dual is positive on a TRUE input")
    # strong duality: Σ f φ = ε* with unit mass
    if psi.l1_norm == 1 and rep.correlation != eps:
        raise CertificateError(f"correlation {rep.correlation} != optimum {eps}")
    return psi


def witness_from_measure(res: MeasureResult, f: TruthTable) -> DualWitness:
    return from_dual_lp(res.solution, res.kind, f, res.d)


def optimal_witness(f: TruthTable, d: int, one_sided: bool = False) -> tuple:
    """(ψ, ε*) for the degree-d (one-sided) error LP."""
    from .approx_lp import best_error

    res = best_error(f, d, one_sided)
    return witness_from_measure(res, f), res.value
