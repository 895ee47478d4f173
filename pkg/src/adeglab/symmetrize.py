"""Symmetrization over domain and range permutations for inputs read as g: [N] -> [R]."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolfn import TruthTable, check_arity
from .config import cap
from .errors import CapExceededError, DimensionMismatchError, PreconditionError
from .poly import MultilinearPoly, fourier, linf_error
from .witness import DualWitness


class OrbitAssumptionError(PreconditionError):
    """f is not a symmetric property, or p^sym is not constant on the TRUE set."""


@dataclass(frozen=True)
class PropertyEncoding:
    """x in {-1,1}^{N log2 R} read as N blocks; block bits are most significant first
    and a coordinate equal to -1 is binary 1."""

    N: int
    R: int

    def __post_init__(self):
        if self.N < 1 or self.R < 1 or self.R & (self.R - 1):
            raise PreconditionError("need N >= 1 and R a power of 2")
        check_arity(self.m)

    @property
    def bits(self) -> int:
        return self.R.bit_length() - 1

    @property
    def m(self) -> int:
        return self.N * self.bits

    def block_values(self) -> np.ndarray:
        """(2^m, N) array of g_x(i) for every input index."""
        b = self.bits
        idx = np.arange(1 << self.m, dtype=np.int64)
        out = np.zeros((len(idx), self.N), dtype=np.int64)
        for blk in range(self.N):
            for k in range(b):
                out[:, blk] |= ((idx >> (blk * b + k)) & 1) << (b - 1 - k)
        return out

    def decode(self, index: int) -> tuple:
        return tuple(int(v) for v in self.block_values()[index]) if self.m <= 16 else self._decode1(index)

    def _decode1(self, index: int) -> tuple:
        b = self.bits
        out = []
        for blk in range(self.N):
            v = 0
            for k in range(b):
                v |= ((index >> (blk * b + k)) & 1) << (b - 1 - k)
            out.append(v)
        return tuple(out)

    def encode(self, g) -> int:
        b = self.bits
        idx = 0
        for blk, v in enumerate(g):
            if not 0 <= v < self.R:
                raise ValueError("value outside [R]")
            for k in range(b):
                if (v >> (b - 1 - k)) & 1:
                    idx |= 1 << (blk * b + k)
        return idx

    def _encoder(self) -> np.ndarray:
        """enc[blk, v] = index bits contributed by block blk holding value v."""
        enc = np.zeros((self.N, self.R), dtype=np.int64)
        for blk in range(self.N):
            for v in range(self.R):
                g = [0] * self.N
                g[blk] = v
                enc[blk, v] = self.encode(g)
        return enc

    def group_order(self, domain_only: bool = False) -> int:
        return math.factorial(self.N) * (1 if domain_only else math.factorial(self.R))

    def actions(self, domain_only: bool = False):
        """Yield index permutations ``perm`` with y = perm[x] and g_y = σ ∘ g_x ∘ π."""
        order = self.group_order(domain_only)
        limit = cap("MAX_GROUP")
        if order > limit:
            raise CapExceededError(f"group order {order} exceeds cap {limit}")
        vals = self.block_values()
        enc = self._encoder()
        sigmas = [tuple(range(self.R))] if domain_only else list(itertools.permutations(range(self.R)))
        for sigma in sigmas:
            s = np.array(sigma, dtype=np.int64)
            for pi in itertools.permutations(range(self.N)):
                new = s[vals[:, list(pi)]]
                perm = np.zeros(len(vals), dtype=np.int64)
                for blk in range(self.N):
                    perm |= enc[blk][new[:, blk]]
                yield perm


def act(enc: PropertyEncoding, x: int, sigma, pi) -> int:
    """Index of σ·x·π for a single input."""
    g = enc._decode1(x)
    return enc.encode([sigma[g[pi[i]]] for i in range(enc.N)])


def _check_arity(p_n: int, enc: PropertyEncoding):
    if p_n != enc.m:
        raise DimensionMismatchError(f"arity {p_n} does not match encoding arity {enc.m}")


def _orbit_average(values, enc: PropertyEncoding, domain_only: bool) -> list:
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = np.array([int(v.numerator) * (den // v.denominator) for v in values], dtype=object)
    acc = np.zeros(len(values), dtype=object)
    count = 0
    for perm in enc.actions(domain_only):
        acc = acc + ints[perm]
        count += 1
    return [Fraction(int(a), den * count) for a in acc]


def psym(p: MultilinearPoly, enc: PropertyEncoding) -> MultilinearPoly:
    """Exact average of p(σ·x·π) over all range permutations σ and domain permutations π."""
    _check_arity(p.n, enc)
    return fourier(_orbit_average(p.table(), enc, domain_only=False))


def is_symmetric_property(f: TruthTable, enc: PropertyEncoding) -> bool:
    _check_arity(f.n, enc)
    return all(np.array_equal(f.values[perm], f.values) for perm in enc.actions())


def one_sided_repair(p: MultilinearPoly, f: TruthTable, enc: PropertyEncoding, eps) -> MultilinearPoly:
    """Turn a one-sided ε-approximation of a symmetric property into a two-sided one.

    p^sym takes a single value v on the TRUE set; if v is already within ε of -1
    p^sym is returned, otherwise r = 1 + 2(p^sym - 1)/|v - 1|.
    """
    _check_arity(p.n, enc)
    _check_arity(f.n, enc)
    eps = Fraction(eps)
    table = p.table()
    fv = f.values
    for x, val in enumerate(table):
        if fv[x] == 1 and abs(val - 1) > eps:
            raise PreconditionError("p is not within eps of f on the FALSE inputs")
        if fv[x] == -1 and val > -1 + eps:
            raise PreconditionError("p exceeds -1 + eps on a TRUE input")
    if not is_symmetric_property(f, enc):
        raise OrbitAssumptionError("f is not invariant under domain and range permutations")
    avg = _orbit_average(table, enc, domain_only=False)
    true_vals = {avg[int(x)] for x in f.true_set()}
    if len(true_vals) > 1:
        raise OrbitAssumptionError("p^sym is not constant on the TRUE set")
    ps = fourier(avg)
    if not true_vals:
        return ps
    v = true_vals.pop()
    if -1 - eps <= v <= -1 + eps:
        return ps
    return 1 + (ps - 1) * (Fraction(2) / abs(v - 1))


def symmetrize_dual_domain(psi: DualWitness, enc: PropertyEncoding) -> DualWitness:
    """Average ψ over block permutations only, then rescale to unit L1 mass."""
    _check_arity(psi.n, enc)
    if enc.N > 6:
        raise CapExceededError("domain symmetrization is limited to N <= 6")
    avg = _orbit_average(psi.values, enc, domain_only=True)
    out = DualWitness(psi.n, avg)
    if out.l1_norm not in (0, 1):
        out = out.scaled(1 / out.l1_norm)
    return out
