"""Truth tables on {-1,1}^n, named functions, composition, block sensitivity.

Conventions: ``1`` is FALSE and ``-1`` is TRUE.  Index ``i`` of a table encodes
the input whose coordinate ``k`` is ``-1`` exactly when bit ``k`` of ``i`` is set,
so index 0 is the all-ones input.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .config import cap
from .errors import CapExceededError, DimensionMismatchError, PreconditionError


def check_arity(n: int) -> None:
    if n < 0:
        raise DimensionMismatchError("arity must be nonnegative")
    limit = cap("MAX_ARITY")
    if n > limit:
        raise CapExceededError(f"arity {n} exceeds the configured cap {limit}")


def point(n: int, index: int) -> tuple:
    """The ±1 input encoded by ``index``."""
    return tuple(-1 if (index >> k) & 1 else 1 for k in range(n))


def index_of(x: Sequence[int]) -> int:
    idx = 0
    for k, v in enumerate(x):
        if v == -1:
            idx |= 1 << k
        elif v != 1:
            raise ValueError("inputs must be ±1")
    return idx


def popcount_parity(a: np.ndarray) -> np.ndarray:
    """Parity of the popcount of each entry (0 or 1), vectorized."""
    a = np.asarray(a, dtype=np.int64).copy()
    p = np.zeros_like(a)
    while np.any(a):
        p ^= a & 1
        a >>= 1
    return p


def character_values(n: int, S: int) -> np.ndarray:
    """χ_S evaluated at every index, as an int64 array of ±1."""
    idx = np.arange(1 << n, dtype=np.int64)
    return 1 - 2 * popcount_parity(idx & S)


@dataclass(frozen=True, eq=False)
class TruthTable:
    """A Boolean function as a dense ±1 vector of length ``2**n``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_arity(self.n)
        v = np.asarray(self.values, dtype=np.int8).copy()
        if v.shape != (1 << self.n,):
            raise DimensionMismatchError(f"expected {1 << self.n} values, got shape {v.shape}")
        if not np.all((v == 1) | (v == -1)):
            raise ValueError("truth table entries must be ±1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    # construction -----------------------------------------------------
    @classmethod
    def from_function(cls, n: int, fn: Callable[[tuple], int]) -> "TruthTable":
        check_arity(n)
        return cls(n, [fn(point(n, i)) for i in range(1 << n)])

    @classmethod
    def constant(cls, n: int, value: int = 1) -> "TruthTable":
        check_arity(n)
        return cls(n, np.full(1 << n, value, dtype=np.int8))

    @classmethod
    def character(cls, n: int, S) -> "TruthTable":
        """χ_S as a truth table; ``S`` is a bitmask or an iterable of 0-based indices."""
        check_arity(n)
        return cls(n, character_values(n, as_mask(S)))

    # access -----------------------------------------------------------
    def __call__(self, x) -> int:
        """Value at a ±1 point or at an input index."""
        if isinstance(x, (int, np.integer)):
            return int(self.values[int(x)])
        return int(self.values[index_of(x)])

    def __eq__(self, other):
        return isinstance(other, TruthTable) and self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n}, {self.to_text().splitlines()[1][:64]})"

    def __neg__(self) -> "TruthTable":
        return TruthTable(self.n, -self.values)

    @property
    def size(self) -> int:
        return 1 << self.n

    def true_set(self) -> np.ndarray:
        """Indices where the function is TRUE (value -1)."""
        return np.nonzero(self.values == -1)[0]

    def false_set(self) -> np.ndarray:
        return np.nonzero(self.values == 1)[0]

    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    # text formats -----------------------------------------------------
    def to_text(self, hex_packed: bool = False) -> str:
        if hex_packed:
            val = 0
            for i in np.nonzero(self.values == -1)[0]:
                val |= 1 << int(i)
            digits = max(1, (self.size + 3) // 4)
            return f"n={self.n},hex\n{val:0{digits}x}\n"
        chars = "".join("-" if v == -1 else "+" for v in self.values)
        return f"n={self.n}\n{chars}\n"

    @classmethod
    def from_text(cls, text: str) -> "TruthTable":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n="):
            raise ValueError("truth table text must start with 'n=<k>'")
        head = lines[0][2:]
        hex_packed = head.endswith(",hex")
        n = int(head[:-4] if hex_packed else head)
        body = "".join(lines[1:])
        if hex_packed:
            val = int(body, 16)
            if val >> (1 << n):
                raise ValueError("hex payload has bits beyond 2^n")
            vals = [-1 if (val >> i) & 1 else 1 for i in range(1 << n)]
        else:
            if len(body) != 1 << n or set(body) - {"+", "-"}:
                raise ValueError(f"expected {1 << n} '+'/'-' characters")
            vals = [-1 if ch == "-" else 1 for ch in body]
        return cls(n, vals)


def as_mask(S) -> int:
    if isinstance(S, (int, np.integer)):
        return int(S)
    m = 0
    for i in S:
        m |= 1 << int(i)
    return m


def mask_elements(S: int) -> list:
    out = []
    k = 0
    while S:
        if S & 1:
            out.append(k)
        S >>= 1
        k += 1
    return out


# ---------------------------------------------------------------------------
# named functions


def _and(m):
    v = np.ones(1 << m, dtype=np.int8)
    v[(1 << m) - 1] = -1
    return TruthTable(m, v)


def _or(m):
    v = -np.ones(1 << m, dtype=np.int8)
    v[0] = 1
    return TruthTable(m, v)


def _parity(m):
    return TruthTable(m, character_values(m, (1 << m) - 1))


def _block_values(N: int, R: int) -> np.ndarray:
    """Array of shape (2^m, N): value of each block (MSB first, bit -1 = 1)."""
    b = _log2_exact(R)
    m = N * b
    check_arity(m)
    idx = np.arange(1 << m, dtype=np.int64)
    out = np.zeros((1 << m, N), dtype=np.int64)
    for blk in range(N):
        for k in range(b):
            bit = (idx >> (blk * b + k)) & 1
            out[:, blk] |= bit << (b - 1 - k)
    return out


def _log2_exact(R: int) -> int:
    if R < 1 or R & (R - 1):
        raise PreconditionError(f"range size R={R} must be a power of 2")
    return R.bit_length() - 1


def _ed(N, R):
    vals = _block_values(N, R)
    s = np.sort(vals, axis=1)
    distinct = np.all(s[:, 1:] != s[:, :-1], axis=1) if N > 1 else np.ones(len(vals), bool)
    return TruthTable(N * _log2_exact(R), np.where(distinct, -1, 1))


def _two_to_one(N, R):
    if N % 2:
        raise PreconditionError("TWO_TO_ONE requires an even domain size N")
    vals = _block_values(N, R)
    counts = np.zeros((len(vals), R), dtype=np.int64)
    for blk in range(N):
        np.add.at(counts, (np.arange(len(vals)), vals[:, blk]), 1)
    ok = np.all((counts == 0) | (counts == 2), axis=1)
    return TruthTable(N * _log2_exact(R), np.where(ok, -1, 1))


def _andor_tree(fanins):
    fanins = list(fanins)
    if not fanins:
        return TruthTable(1, [1, -1])
    total = math.prod(fanins)
    check_arity(total)
    # leaves are variables; build bottom-up
    leaf = TruthTable(1, [1, -1])
    depth = len(fanins)
    f = leaf
    for level in range(depth - 1, -1, -1):
        gate = _and if level % 2 == 0 else _or
        f = compose(gate(fanins[level]), f)
    return f


def make_named(name: str, **params) -> TruthTable:
    """Construct a named function.

    ``AND``/``OR``/``PARITY`` take ``m``; ``ED`` and ``TWO_TO_ONE`` take
    ``N`` and ``R``; ``ANDOR_TREE`` takes ``fanins`` (root gate is AND, layers
    alternate); ``READ_ONCE_DNF`` takes ``t`` terms of width ``m``.
    """
    key = name.upper().replace("-", "_")
    try:
        if key == "AND":
            return _and(int(params["m"]))
        if key == "OR":
            return _or(int(params["m"]))
        if key == "PARITY":
            return _parity(int(params["m"]))
        if key == "ED":
            return _ed(int(params["N"]), int(params["R"]))
        if key == "TWO_TO_ONE":
            return _two_to_one(int(params["N"]), int(params["R"]))
        if key == "ANDOR_TREE":
            return _andor_tree(params["fanins"])
        if key == "READ_ONCE_DNF":
            t, m = int(params["t"]), int(params["m"])
            return compose(_or(t), _and(m))
    except KeyError as exc:
        raise PreconditionError(f"{name} requires parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown function name {name!r}")


# ---------------------------------------------------------------------------
# composition


@dataclass(frozen=True)
class BlockComposition:
    outer: TruthTable
    inner: TruthTable

    @property
    def copies(self) -> int:
        return self.outer.n

    @property
    def arity(self) -> int:
        return self.outer.n * self.inner.n

    def table(self) -> TruthTable:
        return compose(self.outer, self.inner)


def inner_outputs(inner: TruthTable, t: int) -> np.ndarray:
    """Index into the outer table for every composed input (bit i set iff block i is TRUE)."""
    m = inner.n
    check_arity(t * m)
    idx = np.arange(1 << (t * m), dtype=np.int64)
    mask = (1 << m) - 1
    truth = (inner.values == -1).astype(np.int64)
    z = np.zeros_like(idx)
    for i in range(t):
        z |= truth[(idx >> (i * m)) & mask] << i
    return z


def compose(outer: TruthTable, inner: TruthTable, copies: int | None = None) -> TruthTable:
    """F(x_1..x_t) = outer(inner(x_1), ..., inner(x_t)) on disjoint blocks."""
    t = outer.n if copies is None else copies
    if t != outer.n:
        raise DimensionMismatchError("copies must equal the outer arity")
    z = inner_outputs(inner, t)
    return TruthTable(t * inner.n, outer.values[z])


# ---------------------------------------------------------------------------
# block sensitivity


def sensitive_blocks(f: TruthTable, a) -> np.ndarray:
    """Boolean mask over all blocks B (bitmasks) with f(a ⊕ B) != f(a)."""
    ai = a if isinstance(a, (int, np.integer)) else index_of(a)
    idx = np.arange(f.size, dtype=np.int64)
    return f.values[idx ^ int(ai)] != f.values[int(ai)]


def max_disjoint_packing(sensitive: np.ndarray, n: int) -> int:
    """Maximum number of pairwise-disjoint sensitive blocks (bitmask DP)."""
    key = 0
    for b in np.nonzero(sensitive)[0]:
        key |= 1 << int(b)
    return _packing(key, n)


@functools.lru_cache(maxsize=1 << 16)
def _packing(key: int, n: int) -> int:
    size = 1 << n
    if key == 0:
        return 0
    sens_set = set(b for b in range(size) if (key >> b) & 1)
    # minimal sensitive blocks suffice for a packing
    minimal = [b for b in sens_set if not any((c != b and c & b == c) for c in _submasks(b) if c in sens_set)]
    best = [0] * size
    for U in range(1, size):
        low = U & -U
        # either the lowest element of U is unused, or it lies in some block
        v = best[U ^ low]
        for B in minimal:
            if B & low and B & U == B:
                cand = best[U ^ B] + 1
                if cand > v:
                    v = cand
        best[U] = v
    return best[size - 1]


def _submasks(b):
    s = (b - 1) & b
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & b


def block_sensitivity(f: TruthTable, a) -> int:
    """bs_a(f): the maximum number of disjoint blocks whose flip changes f(a)."""
    if isinstance(a, (int, np.integer)):
        if not 0 <= int(a) < f.size:
            raise DimensionMismatchError("input index out of range")
    elif len(a) != f.n:
        raise DimensionMismatchError("input arity mismatch")
    return max_disjoint_packing(sensitive_blocks(f, a), f.n)


def flip_change_probability(f: TruthTable, a, gamma: Fraction) -> Fraction:
    """Pr[f(a ⊕ B) != f(a)] where each coordinate joins B independently w.p. γ."""
    gamma = Fraction(gamma)
    sens = sensitive_blocks(f, a)
    n = f.n
    sizes = np.array([bin(b).count("1") for b in range(f.size)])
    counts = np.bincount(sizes[sens], minlength=n + 1)
    return sum(
        (int(counts[k]) * gamma ** k * (1 - gamma) ** (n - k) for k in range(n + 1)),
        Fraction(0),
    )


def block_sensitivity_patterns(n: int) -> np.ndarray:
    """bs for every sensitive-block pattern on n <= 4 variables.

    Entry ``key`` is the largest number of disjoint blocks among those B with
    bit B of ``key`` set, computed level by level in the popcount of ``key``
    since removing a block and everything meeting it leaves a proper subset.
    """
    if not 1 <= n <= 4:
        raise DimensionMismatchError("pattern table is limited to 1 <= n <= 4")
    size = 1 << n
    keys = np.arange(1 << size, dtype=np.int64)
    # disjoint[B] = pattern of nonempty blocks C with C ∩ B = ∅
    disjoint = np.array(
        [sum(1 << C for C in range(1, size) if C & B == 0) for B in range(size)], dtype=np.int64
    )
    pop = np.zeros(len(keys), dtype=np.int64)
    for b in range(size):
        pop += (keys >> b) & 1
    bs = np.zeros(len(keys), dtype=np.int64)
    for k in range(1, size + 1):
        sel = keys[pop == k]
        best = np.zeros(len(sel), dtype=np.int64)
        for B in range(1, size):
            has = (sel >> B) & 1 == 1
            cand = 1 + bs[sel[has] & disjoint[B]]
            best[has] = np.maximum(best[has], cand)
        bs[sel] = best
    return bs
