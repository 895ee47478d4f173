"""Dual-witness combiners: OR amplification, the weight variant, and the AND-OR cascade."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .approx_lp import INF, approx_weight, best_error, weight_dual_parts
from .boolfn import TruthTable, check_arity, compose, make_named
from .errors import CapExceededError, CertificateError, PreconditionError
from .poly import low_degree_subsets, scale_to_integers
from .witness import DualWitness, WitnessReport, optimal_witness, verify


class UnbalancedInnerError(PreconditionError):
    """The inner witness does not sum to zero."""


def canonical_outer(t: int) -> DualWitness:
    """Ψ on t bits: 1/2 at the all-FALSE input, -1/2 at the all-TRUE input."""
    vals = [Fraction(0)] * (1 << t)
    vals[0] += Fraction(1, 2)
    vals[(1 << t) - 1] -= Fraction(1, 2)
    return DualWitness(t, vals)


OuterDual = DualWitness


def _product_parts(inner: DualWitness, t: int):
    """For every composed input: (outer index, Π|a(x_i)| as ints), and the denominator D^t.

    a(·) are the integer numerators of ψ over its common denominator D, and bit i
    of the outer index is set iff s̃gn(ψ(x_i)) = -1, i.e. ψ(x_i) <= 0.
    """
    m = inner.n
    check_arity(t * m)
    nums, den = scale_to_integers(inner.values)
    nums = np.array([int(v) for v in nums], dtype=object)
    absn = np.abs(nums)
    nonpos = (nums <= 0).astype(np.int64)
    idx = np.arange(1 << (t * m), dtype=np.int64)
    mask = (1 << m) - 1
    z = np.zeros(len(idx), dtype=np.int64)
    prod = np.ones(len(idx), dtype=object)
    for i in range(t):
        block = (idx >> (i * m)) & mask
        z |= nonpos[block] << i
        prod = prod * absn[block]
    return z, prod, den ** t


def _combine(outer: DualWitness, inner: DualWitness, scale: Fraction) -> DualWitness:
    t = outer.n
    z, prod, den_t = _product_parts(inner, t)
    onums, oden = scale_to_integers(outer.values)
    onums = np.array([int(v) for v in onums], dtype=object)
    num = onums[z] * prod
    k = Fraction(scale) / (oden * den_t)
    return DualWitness(t * inner.n, [k * int(v) for v in num])


def combine(outer: DualWitness, inner: DualWitness) -> DualWitness:
    """ζ(x_1..x_t) = 2^t · outer(s̃gn ψ(x_1), ..., s̃gn ψ(x_t)) · Π |ψ(x_i)|."""
    if inner.total != 0:
        raise UnbalancedInnerError(f"inner witness sums to {inner.total}, not 0")
    if inner.l1_norm != 1:
        raise PreconditionError(f"inner witness must have unit L1 norm, got {inner.l1_norm}")
    return _combine(outer, inner, Fraction(2) ** outer.n)


def block_contributions(zeta: DualWitness, inner: DualWitness, t: int, F: TruthTable) -> dict:
    """Σ ζ F restricted to each sign pattern z of the inner blocks (keys: outer index)."""
    z, _, _ = _product_parts(inner, t)
    out: dict = {}
    vals = zeta.values
    fv = F.values
    for x in range(len(vals)):
        v = vals[x]
        if v:
            key = int(z[x])
            out[key] = out.get(key, Fraction(0)) + v * int(fv[x])
    return out


@dataclass
class AmplificationResult:
    witness: DualWitness
    report: WitnessReport
    inner: DualWitness
    inner_error: Fraction
    target: TruthTable
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"report": self.report.to_json(), "inner_error": str(self.inner_error)}
        out.update(self.extra)
        return out


def or_amplify(f: TruthTable, d: int, t: int) -> AmplificationResult:
    """Witness that OR_t(f, ..., f) has one-sided (1 - 2^-t)-approximate degree > d.

    Requires the one-sided degree-d error of f to exceed 1/2.
    """
    if t < 1:
        raise PreconditionError("t must be positive")
    check_arity(t * f.n)
    res = best_error(f, d, one_sided=True)
    if not res.value > Fraction(1, 2):
        two = best_error(f, d, one_sided=False).value
        raise PreconditionError(
            f"one-sided degree-{d} error of f is {res.value} <= 1/2 (two-sided {two}); "
            "the amplification guarantee does not apply"
        )
    from .witness import witness_from_measure

    psi = witness_from_measure(res, f)
    F = compose(make_named("OR", m=t), f)
    zeta = combine(canonical_outer(t), psi)
    target = 1 - Fraction(1, 2 ** t)
    rep = verify(zeta, F, d, target, one_sided=True)
    blocks = block_contributions(zeta, psi, t, F)
    all_false = blocks.get(0, Fraction(0))
    all_true = blocks.get((1 << t) - 1, Fraction(0))
    split_ok = all_false == Fraction(1, 2) and all_true >= Fraction(1, 2) * (1 - Fraction(2, 2 ** t))
    extra = {
        "t": t,
        "d": d,
        "target_error": str(target),
        "block_all_false": str(all_false),
        "block_all_true": str(all_true),
        "error_split_ok": split_ok,
    }
    return AmplificationResult(zeta, rep, psi, res.value, F, extra)


# ---------------------------------------------------------------------------
# weight amplification


@dataclass
class WeightAmplificationResult:
    witness: DualWitness
    inner: DualWitness
    weight: object
    w: Fraction
    mt: Fraction
    max_low_correlation: Fraction
    margin: Fraction
    bound: Fraction
    target: TruthTable
    t: int
    d: int

    @property
    def low_correlation_ok(self) -> bool:
        return self.max_low_correlation <= 1

    @property
    def margin_ok(self) -> bool:
        return self.margin > self.bound

    @property
    def passed(self) -> bool:
        return self.low_correlation_ok and self.margin_ok

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "d": self.d,
            "weight": str(self.weight),
            "w": str(self.w),
            "M_t": str(self.mt),
            "max_low_correlation": str(self.max_low_correlation),
            "margin": str(self.margin),
            "bound": str(self.bound),
            "checks": {"low_correlation": self.low_correlation_ok, "margin": self.margin_ok},
            "passed": self.passed,
        }


def weight_amplify(f: TruthTable, d: int, t: int, w=None) -> WeightAmplificationResult:
    """Weight combiner ζ = M_t · Ψ(s̃gn ψ(x_1), ...) · Π|ψ(x_i)|, M_t = 2^{-2t} ‖ψ‖_1^{1-t}.

    ψ is the dual of the non-constant one-sided weight LP at ε = 3/4, and
    ``w`` defaults to W*_{3/4}(f, d) (any w below it is also admissible).
    Checks |Σ ζ χ_S| <= 1 for |S| <= d and
    Σ ζ F - (1 - 2^{-t}) Σ |ζ| > 2^{-5t} w.
    """
    if t < 1:
        raise PreconditionError("t must be positive")
    check_arity(t * f.n)
    eps = Fraction(3, 4)
    res = approx_weight(f, d, eps, one_sided_nonconstant=True)
    W = res.value
    if W is INF or W == 0:
        raise PreconditionError(f"W*_(3/4)(f, {d}) = {W}; the weight combiner needs a finite positive value")
    w = W if w is None else Fraction(w)
    if not W >= w:
        raise PreconditionError(f"supplied w = {w} exceeds W*_(3/4)(f, {d}) = {W}")
    phi, _ = weight_dual_parts(res, f)
    psi = DualWitness(f.n, phi)
    if psi.total != 0:
        raise CertificateError("weight dual is not balanced")
    l1 = psi.l1_norm
    mt = Fraction(1, 4 ** t) * l1 ** (1 - t)
    outer = canonical_outer(t)
    zeta = _combine(outer, psi, mt)
    F = compose(make_named("OR", m=t), f)
    spec = zeta.spectrum()
    _, den = zeta._scaled_ints()
    lows = low_degree_subsets(F.n, d)
    max_low = max(abs(Fraction(int(spec[S]), den)) for S in lows)
    margin = zeta.correlation(F) - (1 - Fraction(1, 2 ** t)) * zeta.l1_norm
    bound = Fraction(1, 2 ** (5 * t)) * w
    return WeightAmplificationResult(zeta, psi, W, w, mt, max_low, margin, bound, F, t, d)


# ---------------------------------------------------------------------------
# depth-3 AND-OR cascade


@dataclass
class StageReport:
    name: str
    arity: int
    target: str
    l1: Fraction
    phd: int
    correlation: Fraction
    wrong_side_pos: Fraction
    wrong_side_neg: Fraction
    degree: int | None = None
    lp_error: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "stage": self.name,
            "arity": self.arity,
            "target": self.target,
            "l1": str(self.l1),
            "phd": self.phd,
            "correlation": str(self.correlation),
            "wrong_side_mass_pos": str(self.wrong_side_pos),
            "wrong_side_mass_neg": str(self.wrong_side_neg),
        }
        if self.degree is not None:
            out["degree"] = self.degree
        if self.lp_error is not None:
            out["lp_error"] = str(self.lp_error)
        return out


@dataclass
class CascadeResult:
    M: int
    t: int
    stages: list
    witness: DualWitness
    target: TruthTable

    def to_json(self) -> list:
        return [s.to_json() for s in self.stages]


def _cascade_degree(f: TruthTable, one_sided: bool) -> tuple:
    """Largest d < n whose (one-sided) error exceeds 1/2, with that error.

    d = 0 always qualifies for a non-constant f; constant f gets (0, error).
    """
    best = None
    for d in range(f.n):
        e = best_error(f, d, one_sided).value
        if e > Fraction(1, 2) or d == 0:
            best = (d, e)
        else:
            break
    return best


def _stage(name, psi: DualWitness, F: TruthTable, label: str, degree=None, err=None) -> StageReport:
    pos, neg = psi.wrong_side_masses(F)
    return StageReport(name, F.n, label, psi.l1_norm, psi.pure_high_degree, psi.correlation(F), pos, neg, degree, err)


def cascade_depth3(M: int, t: int) -> CascadeResult:
    """Three-level combiner for AND_M(OR_M(AND_M)) built from small LP witnesses."""
    if M < 1 or t < 1 or M % t:
        raise PreconditionError("need M >= 1, t >= 1 and t dividing M")
    check_arity(M ** 3)
    AND_M = make_named("AND", m=M)
    stages = []
    # stage 1: one-sided AND_M witness
    d1, e1 = _cascade_degree(AND_M, True)
    psi1, _ = optimal_witness(AND_M, d1, one_sided=True)
    stages.append(_stage("psi1", psi1, AND_M, f"AND_{M}", d1, e1))
    # stage 2/3: OR_t over AND_M
    psi2 = canonical_outer(t)
    stages.append(_stage("psi2", psi2, make_named("OR", m=t), f"OR_{t}"))
    F3 = compose(make_named("OR", m=t), AND_M)
    psi3 = combine(psi2, psi1)
    stages.append(_stage("psi3", psi3, F3, f"OR_{t}(AND_{M})"))
    # stage 4/5: OR_{M/t} over the stage-3 function gives OR_M(AND_M)
    k = M // t
    OR_k = make_named("OR", m=k)
    d4, e4 = _cascade_degree(OR_k, False)
    psi4, _ = optimal_witness(OR_k, d4, one_sided=False)
    stages.append(_stage("psi4", psi4, OR_k, f"OR_{k}", d4, e4))
    F5 = compose(OR_k, F3)
    psi5 = combine(psi4, psi3)
    stages.append(_stage("psi5", psi5, F5, f"OR_{M}(AND_{M})"))
    # stage 6/7: AND_M on top
    d6, e6 = _cascade_degree(AND_M, True)
    psi6, _ = optimal_witness(AND_M, d6, one_sided=True)
    stages.append(_stage("psi6", psi6, AND_M, f"AND_{M}", d6, e6))
    F7 = compose(AND_M, F5)
    psi7 = combine(psi6, psi5)
    stages.append(_stage("psi7", psi7, F7, f"AND_{M}(OR_{M}(AND_{M}))"))
    return CascadeResult(M, t, stages, psi7, F7)
